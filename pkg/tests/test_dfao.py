import json

import pytest
from hypothesis import given, strategies as st

from binpart.characterizations import chi, s1_prime_array
from binpart.dfao import (Dfao, KernelFamily, Relation, calibrate_order, chi_dfao, digits, guess_relations, kernel,
                          nullspace, ptm_dfao, run_dfao)
from binpart.report import REGISTRY
from binpart.sequences import ptm


def test_run_dfao_examples():
    assert run_dfao(ptm_dfao(), 0) == 1
    assert run_dfao(ptm_dfao(), 3, "msb") == run_dfao(ptm_dfao(), 3, "lsb") == ptm(3) == 1
    assert run_dfao(chi_dfao(), 10, "lsb") == 1


def test_state_counts():
    assert len(ptm_dfao().states) == 2
    assert len(chi_dfao().states) == 6


def test_empty_word_gives_initial_output():
    d = chi_dfao()
    assert run_dfao(d, 0, "msb") == run_dfao(d, 0, "lsb") == d.outputs[d.initial]


def test_bad_order_and_input():
    with pytest.raises(ValueError):
        run_dfao(ptm_dfao(), 3, "middle")
    with pytest.raises(ValueError):
        run_dfao(ptm_dfao(), -1)


@given(st.integers(0, 2**64))
def test_ptm_dfao_both_orders(n):
    assert run_dfao(ptm_dfao(), n, "msb") == run_dfao(ptm_dfao(), n, "lsb") == ptm(n)


def test_chi_dfao_calibration():
    cal = calibrate_order(chi_dfao(), chi)
    assert cal.order == "lsb"
    assert cal.mismatches["msb"] and not cal.mismatches["lsb"]


def test_chi_dfao_agrees_to_2_16():
    ref = s1_prime_array(1 << 16)
    d = chi_dfao()
    assert all(run_dfao(d, n, "lsb") == ref[n] for n in range(1 << 16))


def test_dfao_rejects_partial_transitions():
    with pytest.raises(ValueError):
        Dfao(("a",), "a", {"a": ("a",)}, {"a": 0})
    with pytest.raises(ValueError):
        Dfao(("a",), "b", {"a": ("a", "a")}, {"a": 0})
    with pytest.raises(ValueError):
        Dfao(("a",), "a", {"a": ("a", "z")}, {"a": 0})


def test_dfao_json_round_trip():
    for d in (ptm_dfao(), chi_dfao()):
        text = d.to_json()
        assert set(json.loads(text)) >= {"states", "initial", "transitions", "outputs"}
        back = Dfao.from_json(text)
        assert back == d
        assert all(run_dfao(back, n, "lsb") == run_dfao(d, n, "lsb") for n in range(500))


def test_digits():
    assert digits(0) == []
    assert digits(6) == [1, 1, 0]
    assert digits(5, 3) == [1, 2]


def test_kernel_examples():
    fam = kernel(ptm, 2, 64, 6)
    assert len(fam) == 2
    fam = kernel(chi, 2, 256, 8)
    assert len(fam) <= 6
    assert len(kernel(lambda n: 7, 2, 32, 4)) == 1


def test_kernel_members_distinct_and_tagged():
    fam = kernel(chi, 2, 128, 6)
    vals = [m.values for m in fam.members]
    assert len(set(vals)) == len(vals)
    for m in fam.members:
        j, i = m.origin
        assert m.values == tuple(chi((1 << j) * n + i) for n in range(128))
    assert isinstance(json.loads(fam.to_json())["members"], int)


def test_guess_relations_examples():
    ptm_rel = {str(r) for r in guess_relations(kernel(ptm, 2, 64, 6)).relations}
    assert "a(2n) - a(n) = 0" in ptm_rel
    chi_rel = {str(r) for r in guess_relations(kernel(chi, 2, 256, 8)).relations}
    assert "a(4n) - a(n) = 0" in chi_rel


def test_guess_relations_validates_on_longer_prefix():
    # a(n) = [n == 40]: a(2n) looks like 0 on a short prefix but is not
    seq = [1 if n == 40 else 0 for n in range(1 << 10)]
    fam = kernel(seq, 2, 16, 2)
    search = guess_relations(fam, validate_length=64)
    assert search.rejected > 0
    assert all(r.holds(lambda n: seq[n], 64) for r in search.relations)


def test_nullspace_exact():
    basis = nullspace([[1, 2, 3], [2, 4, 6]], 3)
    assert len(basis) == 2
    for v in basis:
        assert v[0] + 2 * v[1] + 3 * v[2] == 0


def test_relation_rendering():
    assert str(Relation(((1, (2, 1)), (-3, (0, 0))))) == "a(4n+1) - 3*a(n) = 0"
    assert str(Relation(((-1, (1, 0)), (1, (0, 0))))) == "-a(2n) + a(n) = 0"


def test_kernel_family_closed_flag():
    assert kernel(ptm, 2, 64, 3).closed
    assert not KernelFamily(2, 1, 0, [], [1]).closed


@pytest.mark.parametrize("name", ["dfao-ptm", "dfao-chi", "kernel-ptm", "kernel-chi", "kernel-b-mod",
                                  "relations-f"])
def test_dfao_families_pass(name):
    fam = REGISTRY[name]
    rep = fam.run(**fam.small)
    assert rep.passed, rep.to_json()
