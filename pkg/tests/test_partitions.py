from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binpart.partitions import (MAX_MODULUS_EXPONENT, ResidueStream, ResourceLimitError, b, b3_stream,
                                b_stream, bm_mod_stream, bm_stream, nu2_b, nu2_bm_closed)
from binpart.report import REGISTRY
from binpart.sequences import nu2


@lru_cache(maxsize=None)
def _enumerate(n, largest):
    # binary partitions of n with parts <= largest, by brute recursion
    if n == 0:
        return 1
    total, part = 0, 1
    while part <= min(n, largest):
        total += _enumerate(n - part, part)
        part <<= 1
    return total


def brute_b(n):
    return _enumerate(n, 1 << n.bit_length())


def convolve(a, c, n):
    return [sum(a[i] * c[j - i] for i in range(j + 1)) for j in range(n + 1)]


def test_b_stream_examples():
    assert b_stream(4) == [1, 1, 2, 2, 4]
    assert b_stream(1) == [1, 1]
    assert b_stream(10)[-1] == brute_b(10) == 14


def test_b_examples():
    assert b(0) == 1
    assert b(4) == 4
    assert b(20) == brute_b(20) == 60


def test_b_matches_enumeration():
    assert b_stream(60) == [brute_b(n) for n in range(61)]


def test_b3_examples():
    assert b3_stream(2) == [1, 3, 9]
    assert b3_stream(3)[-1] == 3 * 9 - 3 * 3 + 1 == 19
    assert b3_stream(100) == bm_stream(3, 100)


def test_bm_stream_examples():
    assert bm_stream(1, 4) == [1, 1, 2, 2, 4]
    assert bm_stream(2, 2) == [1, 2, 5]
    base = b_stream(30)
    assert bm_stream(3, 30) == convolve(convolve(base, base, 30), base, 30)


def test_bm_mod_stream_examples():
    assert list(bm_mod_stream(1, 4, 5).values) == [1, 1, 2, 2, 4]
    assert list(bm_mod_stream(3, 3, 5).values) == [1, 3, 9, 19]
    assert bm_mod_stream(1, 20, 5)[20] == 60 % 32 == 28


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(1, MAX_MODULUS_EXPONENT), st.integers(0, 300))
def test_bm_mod_stream_reduces_exact(m, p, n_max):
    exact = bm_stream(m, n_max)
    assert list(bm_mod_stream(m, n_max, p).values) == [v % (1 << p) for v in exact]


def test_residue_dump_round_trip():
    s = bm_mod_stream(7, 500, 6)
    back = ResidueStream.from_bytes(s.to_bytes(), 6)
    assert np.array_equal(back.values, s.values)
    with pytest.raises(ValueError):
        ResidueStream.from_bytes(bytes([64]), 6)


def test_bm_mod_stream_rejects_bad_arguments():
    with pytest.raises(ValueError):
        bm_mod_stream(0, 10, 3)
    with pytest.raises(ValueError):
        bm_mod_stream(1, 10, 7)
    with pytest.raises(ResourceLimitError):
        bm_mod_stream(1, 2**40, 3)


def test_nu2_b_matches_exact_values():
    vals = b_stream(5000)
    assert all(nu2_b(n) == nu2(vals[n]) for n in range(2, 5001))


def test_nu2_b_literal_examples_are_not_reproduced():
    # the printed rule keys on nu2(n); the data key on nu2(n // 2)
    assert nu2(b(4)) == 2 and nu2_b(4) == 2
    assert nu2(b(2)) == 1 and nu2_b(2) == 1


def test_nu2_bm_closed_examples():
    assert nu2_bm_closed(1, 1) == 0
    assert nu2_bm_closed(2, 4) == 1
    assert nu2_bm_closed(3, 100) == nu2(bm_stream(7, 100)[100])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_nu2_bm_closed_against_stream(k):
    vals = bm_stream((1 << k) - 1, 1500)
    assert all(nu2_bm_closed(k, n) == nu2(vals[n]) for n in range(1501))


@pytest.mark.parametrize("name", ["stream-agreement", "churchhouse-valuation", "gupta-rodseth",
                                  "colored-valuation", "colored-binomial", "binomial-valuation",
                                  "mahler-growth"])
def test_partition_families_pass(name):
    fam = REGISTRY[name]
    assert fam.run(**fam.small).passed


def test_gupta_rodseth_records_literal_failure():
    rep = REGISTRY["gupta-rodseth"].run(max=2000, s_max=4)
    assert rep.passed
    assert any("s=0, n=1" in note for note in rep.notes)


def test_paperfolding_failure_is_flagged():
    rep = REGISTRY["paperfolding"].run(max=200)
    assert not rep.passed
    assert rep.counterexample["m"] == 2 and rep.counterexample["n"] == 2
