import json
from fractions import Fraction
from math import log2

import pytest
from hypothesis import given, strategies as st

from binpart import counting as co
from binpart.partitions import b_stream, bm_stream
from binpart.report import REGISTRY
from binpart.squares import is_three_squares, r2

B1 = b_stream(2000)
B3 = bm_stream(3, 2000)
B7 = bm_stream(7, 2000)


def brute_count(vals, x):
    return sum(1 for n in range(x + 1) if not is_three_squares(vals[n]))


def test_count_S_examples():
    assert co.count_S(1, 100) == brute_count(B1, 100) == 8
    assert [n for n in range(101) if not is_three_squares(B1[n])] == [20, 21, 36, 37, 68, 69, 80, 81]
    assert co.count_S(1, 19) == 0
    assert co.count_S(3, 8) == brute_count(B3, 8) == 0


def test_count_curves_against_exact_values():
    for m, vals in ((1, B1), (3, B3), (7, B7)):
        curve = co.count_curve(m, 2000)
        running = 0
        for x in range(2001):
            running += not is_three_squares(vals[x])
            assert curve[x] == running, (m, x)


def test_count_S_rejects_other_m():
    with pytest.raises(ValueError):
        co.count_S(5, 10)


@given(st.fractions(min_value=-50, max_value=50, max_denominator=50), st.integers(1, 10**6))
def test_cmp_log2_matches_float_away_from_ties(y, x):
    gap = float(y) - log2(x)
    if abs(gap) > 1e-9:
        assert co.cmp_log2(y, x) == (1 if gap > 0 else -1)


def test_cmp_log2_ties_are_exact():
    assert co.cmp_log2(Fraction(3), 8) == 0
    assert co.cmp_log2(Fraction(1, 2), 2) == -1
    assert co.cmp_log2(Fraction(-1), 1) == -1


def test_P1_closed_form():
    assert all(co.P1(x) == co.P1_direct(x) for x in range(3000))


def test_R1_examples():
    assert co.R1(36) == 1
    assert co.R1(612) == 2
    assert co.R1(7) == co.R1(1)


@given(st.integers(0, 10**7))
def test_R1_recursion_matches_direct(n):
    assert co.R1_rec(n) == co.R1(n)


def test_S3_and_S2k_parts_reassemble():
    curve3 = co.count_curve(3, 3000)
    assert all(co.S3_from_parts(x) == curve3[x] for x in range(3000))
    curve7 = co.count_curve(7, 3000)
    assert all(co.S2k_from_Q(3, x) == curve7[x] for x in range(7, 3000))


def test_bound_check_examples():
    assert co.bound_check("S1x", 1 << 16).passed
    d = co.count_S(1, 100) - Fraction(100, 12)
    assert d == Fraction(-1, 3)
    assert Fraction(-5, 3) < d < 0.5 * log2(100) - 19 / 12


def test_S3_upper_bound_fails_only_at_one():
    rep = co.bound_check("S3x", 1 << 16)
    assert not rep.passed
    assert rep.counterexample["x"] == 1
    assert any("1 violating x: 1" in n for n in rep.notes)


@pytest.mark.parametrize("k", [3, 4])
def test_S2k_bounds(k):
    assert co.bound_check("S2kx", 1 << 16, k).passed


def test_extremal_examples():
    rows = co.extremal_sequences("S1x", 4)
    assert [r.index for r in rows["m"][1:4]] == [36, 612, 9828]
    for r in rows["m"][2:5]:
        assert r.measured == r.expected == 2 * (r.l - 1)
    # the base case: S_1(m_0) = 0 but S_1(m_1) = 3, not 0
    assert co.count_S(1, 0) == 0 and co.count_S(1, 36) == 3
    n_rows = co.extremal_sequences("S3x", 2)["n"]
    assert [r.index for r in n_rows] == [0, 16, 80]


def test_density_near_limits():
    x = 1 << 18
    for m in (1, 3, 7):
        assert abs(co.count_S(m, x) / x - float(co.density(m))) < 0.005


def test_two_squares_tables_examples():
    rows = dict(co.table_T(8))
    assert rows[1] == 2 and rows[8] == 64
    stats = {s: first for s, _, first in co.r2_stats(100)}
    assert stats[4] == 0 and stats[8] == 4 and stats[12] == 21
    assert r2(B1[0]) == 4


def test_two_squares_count_matches_table_rows():
    r = co.r2_of_b2n(256)
    assert co.two_squares_count(256, r) == dict(co.table_T(8, r))[8]


def test_scan_is_identical_across_thread_counts():
    assert co.r2_of_b2n(600, threads=1) == co.r2_of_b2n(600, threads=8)


def test_checkpoint_resume(tmp_path):
    full = co.r2_of_b2n(2500, checkpoint_dir=tmp_path)
    ck = json.loads((tmp_path / "r2-b2n-2500.json").read_text())
    assert ck["campaign-id"] == "r2-b2n-2500" and ck["last-index"] == 2500
    # truncate the checkpoint and resume
    ck["last-index"] = 999
    ck["partial-rows"] = ck["partial-rows"][:1000]
    (tmp_path / "r2-b2n-2500.json").write_text(json.dumps(ck))
    assert co.r2_of_b2n(2500, checkpoint_dir=tmp_path) == full


def test_figure_data_examples():
    curve = co.figure_data("S1", 1024)
    assert len(curve.points) == 1024
    pts = dict(curve.points)
    assert pts[20] == Fraction(-2, 3)
    assert pts[19] == Fraction(-19, 12)
    lines = curve.to_csv().splitlines()
    assert lines[0] == "x,deviation,lower_bound,upper_bound"
    assert len(lines) == 1025
    for (x, d), lo, up in zip(curve.points, curve.lower, curve.upper):
        if lo is not None:
            assert lo < d < up
    with pytest.raises(ValueError):
        co.figure_data("S7")


@pytest.mark.parametrize("name", ["count-predicates", "pqr-S1", "pqr-S3", "pqr-S2k", "u-partition",
                                  "table4", "table5"])
def test_counting_families_pass(name):
    fam = REGISTRY[name]
    assert fam.run(**fam.small).passed


def test_census_small_prefix():
    got = co.representation_census(60)
    brute = sum(1 for n in range(1, 61) if is_three_squares(B1[2 * n]))
    assert got["three_squares"] == brute
    assert got["x2y4z4"] <= got["x2y2z4"] <= got["three_squares"]


@pytest.mark.slow
def test_census_full():
    rep = REGISTRY["census"].run(n_max=1000)
    assert json.loads(rep.notes[0])["three_squares"] == 916
