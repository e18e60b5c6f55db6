import pytest
from hypothesis import given, strategies as st

from binpart.characterizations import (ALIASES, GAP_VALUES, S1_PREFIX, TABLE_CD, MembershipWitness, beta, beta_array,
                                       c_a, cd_equivalent, chi, chi_form_b, chi_form_c, derive_table_cd,
                                       f_and_gaps, gap_class_witnesses, in_S1, in_S2k, in_S3, not_three_squares_from_residue,
                                       realizes_gap, s1_prime_array, table_cd_from_binomials,
                                       verify_congruence_family)
from binpart.partitions import b_stream, bm_stream
from binpart.report import REGISTRY
from binpart.sequences import nu2, ptm
from binpart.squares import is_three_squares

N_EXACT = 1500
LISTED = list(zip(TABLE_CD["c"], TABLE_CD["d"]))
B1 = b_stream(N_EXACT)
B3 = bm_stream(3, N_EXACT)
B7 = bm_stream(7, N_EXACT)


def in_S_exact(vals, n):
    return not is_three_squares(vals[n])


def test_chi_examples():
    assert [chi(n) for n in (10, 11, 34)] == [1, 0, 1]


def test_chi_is_the_even_index_oracle():
    for n in range(N_EXACT // 2):
        assert chi(n) == int(in_S_exact(B1, 2 * n)), n


@given(st.integers(0, 2**40))
def test_chi_forms_agree(n):
    assert chi(n) == chi_form_b(n) == chi_form_c(n)


def test_in_S1_examples():
    w = in_S1(20)
    assert w.member and (w.route["k"], w.route["r"], w.route["i"]) == (0, 0, 0)
    assert in_S_exact(B1, 20)
    w = in_S1(21)
    assert w.member and w.route["i"] == 1
    assert not in_S1(7)


def test_in_S1_exhaustive_small():
    for n in range(N_EXACT + 1):
        assert bool(in_S1(n)) == in_S_exact(B1, n), n


def test_in_S3_examples():
    w = in_S3(40)
    assert w.member and (w.route["k"], w.route["p"], w.route["i"]) == (1, 0, 0)
    assert in_S3(9).member and in_S_exact(B3, 9)
    assert not in_S3(5) and not in_S_exact(B3, 5)


def test_in_S3_exhaustive_small():
    for n in range(N_EXACT + 1):
        assert bool(in_S3(n)) == in_S_exact(B3, n), n


def test_in_S2k_examples():
    assert in_S2k(3, 1).member
    assert not in_S2k(3, 0)
    assert bool(in_S2k(3, 16)) == (ptm(16) == ptm(8) == 1) == in_S_exact(B7, 16)


def test_in_S2k_exhaustive_small():
    for n in range(N_EXACT + 1):
        assert bool(in_S2k(3, n)) == in_S_exact(B7, n), n
    with pytest.raises(ValueError):
        in_S2k(2, 5)


@given(st.integers(0, 2**48))
def test_witness_reconstructs(n):
    for w in (in_S1(n), in_S3(n), in_S2k(4, n)):
        assert w.reconstruct() == (n if w.member else None)


def test_witness_is_truthy_by_membership():
    assert not MembershipWitness(3, False)
    assert MembershipWitness(3, True, {"set": "S2k", "k": 3, "m": 0, "l": 3})


def test_beta_examples():
    assert beta(0) == B1[4] // 4 % 8 == 1
    assert beta(2) == B1[20] // 4 % 8 == 7
    assert beta(1) == B1[12] // 4 % 8 == 5


def test_beta_is_odd():
    assert set(int(v) for v in beta_array(5000)) <= {1, 3, 5, 7}


def test_c_a_examples():
    assert c_a(1, 0) == 0 and beta(0) == 1
    assert c_a(7, 0) == 2 and beta(2) == 7
    assert c_a(3, 0) == 3 and beta(3) == 3
    with pytest.raises(ValueError):
        c_a(2, 0)


def test_c_a_enumerates_classes():
    betas = beta_array(4000)
    for a in (1, 3, 5, 7):
        want = [m for m in range(4001) if betas[m] == a]
        got = [c_a(a, l) for l in range(len(want))]
        assert got == want


def test_f_and_gaps_examples():
    rec = f_and_gaps(5)
    assert (rec[0].f, rec[1].f, rec[0].g) == (10, 18, 8)
    assert (rec[1].g, rec[2].g, rec[2].f, rec[3].f) == (16, 6, 34, 40)
    assert (rec[3].g, rec[4].f) == (18, 58)


def test_s1_prefix():
    assert tuple(r.f for r in f_and_gaps(len(S1_PREFIX))) == S1_PREFIX


def test_gap_values():
    assert {r.g for r in f_and_gaps(20000)} == set(GAP_VALUES)


def test_gap_class_witness_examples():
    assert gap_class_witnesses(6, 1) == [34]
    assert gap_class_witnesses(10, 1) == [160]
    assert gap_class_witnesses(24, 1) == [178]
    assert all(realizes_gap(n, g) for g in GAP_VALUES for n in gap_class_witnesses(g, 5))
    with pytest.raises(ValueError):
        gap_class_witnesses(12, 1)


def test_s1_prime_array_matches_chi():
    arr = s1_prime_array(5000)
    assert all(arr[n] == chi(n) for n in range(5001))


def test_table_cd_derived_from_residues():
    for k in (3, 4, 5):
        derived = derive_table_cd(k)
        assert all(cd_equivalent(x, y) for x, y in zip(derived, LISTED))


def test_table_cd_from_binomials():
    assert all(cd_equivalent(x, y) for x, y in zip(table_cd_from_binomials(), LISTED))


def test_cd_equivalence():
    assert cd_equivalent((1, -5), (17, 11))
    assert cd_equivalent((1, -5), (33, 27))
    assert not cd_equivalent((1, -5), (17, -5))


def test_oracle_from_residue_matches_exact():
    for v in B1[:1000] + B3[:1000] + B7[:1000]:
        r = v % 32
        val = nu2(v)
        if val <= 2:
            assert not_three_squares_from_residue(r, val) == (not is_three_squares(v))
    with pytest.raises(ValueError):
        not_three_squares_from_residue(0, 3)


def test_aliases_point_at_registered_families():
    assert all(name in REGISTRY for name in ALIASES.values())


def test_verify_congruence_family_examples():
    assert verify_congruence_family("Prop3.2", max=10**4).passed
    assert verify_congruence_family("Thm5.5", max=10**3, ks=(3,)).passed
    assert verify_congruence_family("Sigma32", max=10**4).passed
    with pytest.raises(KeyError):
        verify_congruence_family("nope")


def test_b_mod16_line_one_is_flagged():
    rep = verify_congruence_family("Prop3.7", max=1000)
    assert not rep.passed
    assert rep.counterexample["n"] == 0


@pytest.mark.parametrize("name", ["b3-mod32", "b2k-small-mod8", "table-cd", "s1-forms", "evil-odious",
                                  "s2k-forms", "s1-prefix", "gap-classes"])
def test_characterization_families_pass(name):
    fam = REGISTRY[name]
    assert fam.run(**fam.small).passed
