"""Elementary 2-automatic sequences, evaluated exactly in O(log n).

Every function accepts arbitrary-precision ``int`` input.
"""

from __future__ import annotations


class _Infinite:
    """Valuation of zero. Compares equal only to itself; arithmetic raises."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())

    def _no_arithmetic(self, *_):
        raise TypeError("the 2-adic valuation of 0 is infinite; arithmetic on it is undefined")

    __add__ = __radd__ = __sub__ = __rsub__ = _no_arithmetic
    __mul__ = __rmul__ = __mod__ = __rmod__ = _no_arithmetic
    __floordiv__ = __rfloordiv__ = __truediv__ = __rtruediv__ = _no_arithmetic
    __lt__ = __le__ = __gt__ = __ge__ = _no_arithmetic
    __int__ = __index__ = _no_arithmetic

    def __hash__(self) -> int:
        return hash("binpart.INFINITE")


INFINITE = _Infinite()


def s2(n: int) -> int:
    """Number of ones in the binary expansion of ``n``."""
    return n.bit_count()


def nu2(n: int):
    """2-adic valuation; ``INFINITE`` for 0."""
    if n == 0:
        return INFINITE
    return (n & -n).bit_length() - 1


def ptm(n: int) -> int:
    """Prouhet-Thue-Morse sign t_n = (-1)^s2(n)."""
    return -1 if n.bit_count() & 1 else 1


def ptm_bit(n: int) -> int:
    """T_n = s2(n) mod 2, so that t_n = 1 - 2 T_n."""
    return n.bit_count() & 1


def sigma(n: int) -> int:
    """Parity of the number of maximal runs of ones in binary ``n``."""
    # a run is counted at its top bit: a one whose next-higher bit is zero
    return (n & ~(n >> 1)).bit_count() & 1


def paperfold(n: int) -> int:
    """Regular paperfolding sign: p_{2n} = p_n, p_{2n+1} = (-1)^n, n >= 1."""
    if n < 1:
        raise ValueError("paperfolding sequence is indexed from 1")
    odd = n >> ((n & -n).bit_length() - 1)
    return -1 if (odd >> 1) & 1 else 1


def evil(m: int) -> int:
    """The m-th integer with T = 0 (counting from 0): 2m + T_m."""
    return 2 * m + ptm_bit(m)


def odious(m: int) -> int:
    """The m-th integer with T = 1 (counting from 0): 2m + 1 - T_m."""
    return 2 * m + 1 - ptm_bit(m)


bigT = ptm_bit
zero_T_representative = evil
