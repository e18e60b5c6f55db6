import pickle

import pytest

from hypothesis import given, strategies as st

from binpart.sequences import (INFINITE, bigT, evil, nu2, odious, paperfold, ptm, ptm_bit, s2, sigma,
                               zero_T_representative)


def test_s2_examples():
    assert s2(0) == 0
    assert s2(5) == 2
    assert all(s2(1 << k) == 1 for k in range(65))


def test_nu2_examples():
    assert nu2(0) is INFINITE
    assert nu2(12) == 2
    assert nu2(7) == 0


def test_infinite_is_a_singleton_that_refuses_arithmetic():
    assert pickle.loads(pickle.dumps(INFINITE)) is INFINITE
    assert INFINITE == INFINITE and INFINITE != 0
    with pytest.raises(TypeError):
        INFINITE + 1
    with pytest.raises(TypeError):
        INFINITE > 3


def test_ptm_examples():
    assert ptm(0) == 1
    assert ptm(1) == -1
    assert ptm(6) == 1 - 2 * (bin(6).count("1") % 2)


def test_bigT_examples():
    assert [bigT(n) for n in (0, 2, 3)] == [0, 1, 0]


def test_sigma_examples():
    assert [sigma(n) for n in (0, 5, 7)] == [0, 0, 1]


def test_paperfold_examples():
    assert [paperfold(n) for n in (1, 3, 6)] == [1, -1, -1]


def test_zero_T_representative_examples():
    assert [zero_T_representative(m) for m in (0, 1, 2)] == [0, 3, 5]


def _runs_of_ones(n):
    return len([r for r in bin(n)[2:].split("0") if r])


@given(st.integers(0, 2**80))
def test_ptm_recurrences(n):
    assert ptm(2 * n) == ptm(n)
    assert ptm(2 * n + 1) == -ptm(n)
    assert ptm(n) == 1 - 2 * ptm_bit(n)


@given(st.integers(0, 2**80))
def test_sigma_counts_blocks(n):
    assert sigma(n) == _runs_of_ones(n) % 2


@given(st.integers(1, 2**60))
def test_paperfold_recurrence(n):
    assert paperfold(2 * n) == paperfold(n)
    assert paperfold(2 * n + 1) == (-1) ** n


@given(st.integers(1, 2**200))
def test_nu2_divides(n):
    v = nu2(n)
    assert n % (1 << v) == 0 and (n >> v) & 1


def test_evil_odious_partition_the_naturals():
    seen = sorted([evil(m) for m in range(500)] + [odious(m) for m in range(500)])
    assert seen == list(range(1000))
    assert all(bigT(evil(m)) == 0 and bigT(odious(m)) == 1 for m in range(500))
