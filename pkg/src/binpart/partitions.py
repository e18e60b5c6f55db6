"""Exact and modular evaluation of b(n), b_3(n) and b_m(n).

Exact values come from the defining recurrences (``b_stream``,
``b3_stream``) or from powering the truncated series B(x) (``bm_stream``).
Residues mod 2^p come from the compiled kernel, which runs the functional
equation (1 - x)^m B_m(x) = B_m(x^2) in word arithmetic.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .sequences import nu2

try:  # GMP multiplication is much faster for the packed products below
    import gmpy2
except ImportError:  # pragma: no cover - exercised only without gmpy2
    gmpy2 = None

MAX_EXACT_N = 2**22
MAX_MODULAR_N = 2**26
MAX_MODULUS_EXPONENT = 6


class ResourceLimitError(MemoryError):
    """Requested stream exceeds the configured memory budget."""


def _check_budget(n_max: int, limit: int, what: str) -> None:
    if n_max < 0:
        raise ValueError(f"index bound must be non-negative, got {n_max}")
    if n_max > limit:
        raise ResourceLimitError(
            f"{what} stream up to {n_max} exceeds budget {limit}; raise the limit explicitly"
        )


_b_lock = threading.Lock()
_b_values = [1, 1]


def b_stream(n_max: int) -> list[int]:
    """Exact b(0), ..., b(n_max)."""
    _check_budget(n_max, MAX_EXACT_N, "exact")
    with _b_lock:
        vals = _b_values
        for n in range(len(vals), n_max + 1):
            vals.append(vals[n - 1] + vals[n >> 1] if n % 2 == 0 else vals[n - 1])
        return vals[: n_max + 1]


def b(n: int) -> int:
    """Number of binary partitions of ``n``."""
    if n < len(_b_values):
        return _b_values[n]
    return b_stream(n)[n]


def b3_stream(n_max: int) -> list[int]:
    """Exact b_3(0..n_max) from its four-term recurrence."""
    _check_budget(n_max, MAX_EXACT_N, "exact")
    vals = [1, 3, 9][: n_max + 1]
    for n in range(3, n_max + 1):
        h = n >> 1
        if n % 2 == 0:
            vals.append(3 * vals[n - 1] - 3 * vals[n - 2] + vals[n - 3] + vals[h])
        else:
            vals.append(3 * vals[n - 1] - 3 * vals[n - 2] + vals[n - 3])
    return vals


def _pack(coeffs: list[int], width: int) -> int:
    return int.from_bytes(b"".join(c.to_bytes(width, "little") for c in coeffs), "little")


def _series_mul(a: list[int], c: list[int], n_terms: int) -> list[int]:
    """Truncated product of two series with non-negative integer coefficients.

    Kronecker substitution: both series are packed into one integer each with
    a fixed byte width per coefficient, multiplied once, and unpacked.
    """
    a = a[:n_terms]
    c = c[:n_terms]
    bits = max(a).bit_length() + max(c).bit_length() + n_terms.bit_length() + 1
    width = (bits + 7) // 8
    x, y = _pack(a, width), _pack(c, width)
    prod = int(gmpy2.mpz(x) * gmpy2.mpz(y)) if gmpy2 is not None else x * y
    raw = (prod & ((1 << (8 * width * n_terms)) - 1)).to_bytes(width * n_terms, "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") for i in range(n_terms)]


def bm_stream(m: int, n_max: int) -> list[int]:
    """Exact b_m(0..n_max) as the m-th power of the truncated series B(x)."""
    if m < 1:
        raise ValueError("number of colours must be positive")
    _check_budget(n_max, MAX_EXACT_N, "exact")
    n_terms = n_max + 1
    base = b_stream(n_max)
    result = None
    while m:
        if m & 1:
            result = base if result is None else _series_mul(result, base, n_terms)
        m >>= 1
        if m:
            base = _series_mul(base, base, n_terms)
    return list(result)


@dataclass(frozen=True, eq=False)
class ResidueStream:
    """Values of a sequence reduced mod 2^p, indexed from 0."""

    modulus_exponent: int
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def modulus(self) -> int:
        return 1 << self.modulus_exponent

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, idx):
        return self.values[idx]

    def to_bytes(self) -> bytes:
        """Raw dump: one unsigned byte per residue, index order."""
        return self.values.astype("<u1").tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes, modulus_exponent: int) -> "ResidueStream":
        vals = np.frombuffer(raw, dtype="<u1").copy()
        if len(vals) and int(vals.max()) >= 1 << modulus_exponent:
            raise ValueError("dump holds a value outside the residue range")
        return cls(modulus_exponent, vals)


def bm_mod_stream(m: int, n_max: int, p: int) -> ResidueStream:
    """b_m(0..n_max) mod 2^p using word arithmetic only."""
    if m < 1:
        raise ValueError("number of colours must be positive")
    if not 1 <= p <= MAX_MODULUS_EXPONENT:
        raise ValueError(f"modulus exponent must lie in [1, {MAX_MODULUS_EXPONENT}], got {p}")
    _check_budget(n_max, MAX_MODULAR_N, "modular")
    return ResidueStream(p, kernels.bm_mod_stream(m, n_max, p))


def nu2_b(n: int) -> int:
    """2-adic valuation of b(n) for n >= 2, without computing b(n).

    1 when floor(n/2) has even valuation, 2 when odd.
    """
    if n < 2:
        raise ValueError("closed form for nu2(b(n)) holds for n >= 2")
    return 1 if nu2(n >> 1) % 2 == 0 else 2


def nu2_bm_closed(k: int, n: int) -> int:
    """2-adic valuation of b_{2^k - 1}(n) by the four-branch table.

    Breakpoints of the residue i = n mod 2^(k+2) are 2^k, 2^(k+1), 3*2^k.
    """
    if k < 1:
        raise ValueError("k must be positive")
    q, i = divmod(n, 1 << (k + 2))
    if i < 1 << k:
        return 0 if q == 0 else nu2_b(8 * q)
    if i < 1 << (k + 1):
        return 1
    if i < 3 << k:
        return 2
    return 1


def gupta_rodseth_exponent(s: int) -> int:
    """mu(s) = floor((3s + 4) / 2)."""
    return (3 * s + 4) // 2


def binomial_rows_mod(max_m: int, p: int) -> np.ndarray:
    """Pascal triangle rows 0..max_m mod 2^p; entry [m, n] = C(m, n) mod 2^p."""
    mask = (1 << p) - 1
    rows = np.zeros((max_m + 1, max_m + 1), dtype=np.uint64)
    rows[0, 0] = 1
    for m in range(1, max_m + 1):
        rows[m, 0] = 1
        rows[m, 1:] = (rows[m - 1, 1:] + rows[m - 1, :-1]) & mask
    return rows


def series_mul_mod(a, c, n_terms: int, p: int) -> np.ndarray:
    """Truncated product of two residue series mod 2^p."""
    return kernels.series_mul_mod(a, c, n_terms, p)


# --- verification campaigns -------------------------------------------------

from math import comb, log2  # noqa: E402

from .report import Report, register  # noqa: E402
from .sequences import paperfold  # noqa: E402

MODULE = "partitions"


@register("stream-agreement", MODULE, small={"max": 10**4}, full={"max": 10**5})
def verify_stream_agreement(max: int) -> Report:
    """Recurrence streams, series powers and word-level residues agree."""
    rep = Report("stream-agreement", {"max": max})
    exact_b = b_stream(max)
    if bm_stream(1, max) != exact_b:
        rep.fail(n=next(i for i, (u, v) in enumerate(zip(bm_stream(1, max), exact_b)) if u != v),
                 what="b_stream vs bm_stream(1)")
    small = min(max, 10**4)
    three = b3_stream(small)
    powered = bm_stream(3, small)
    for n, (u, v) in enumerate(zip(three, powered)):
        if u != v:
            rep.fail(n=n, what="b3 recurrence vs series cube", recurrence=u, series=v)
            break
    for m in range(1, 9):
        exact = bm_stream(m, small)
        for p in range(1, MAX_MODULUS_EXPONENT + 1):
            res = bm_mod_stream(m, small, p).values
            ref = np.array([v & ((1 << p) - 1) for v in exact], dtype=np.uint8)
            bad = np.flatnonzero(res != ref)
            if len(bad):
                n = int(bad[0])
                rep.fail(n=n, what="residue stream", m=m, p=p, residue=int(res[n]), exact=exact[n])
                break
    return rep


@register("churchhouse-valuation", MODULE, small={"max": 10**5}, full={"max": 10**6})
def verify_churchhouse(max: int) -> Report:
    """nu2(b(n)) against the closed form, and against the PTM second difference."""
    rep = Report("churchhouse-valuation", {"max": max})
    vals = b_stream(max)
    literal_bad = None
    for n in range(2, max + 1):
        v = nu2(vals[n])
        closed = nu2_b(n)
        second_diff = abs(ptm_(n) - 2 * ptm_(n - 1) + ptm_(n - 2)) // 2
        if v != closed or v != second_diff:
            rep.fail(n=n, b=vals[n], nu2=v, closed=closed, second_difference=second_diff)
            break
        if literal_bad is None and v != (1 if nu2(n) % 2 == 0 else 2):
            literal_bad = n
    if literal_bad is not None:
        rep.notes.append(
            f"parity rule applied to nu2(n) instead of nu2(floor(n/2)) fails first at n={literal_bad} "
            f"(b={vals[literal_bad]})"
        )
    return rep


def ptm_(n: int) -> int:
    return -1 if n.bit_count() & 1 else 1


@register("gupta-rodseth", MODULE, small={"max": 10**5, "s_max": 8}, full={"max": 10**6, "s_max": 8})
def verify_gupta_rodseth(max: int, s_max: int = 8) -> Report:
    """b(2^(s+2) n) = b(2^s n) mod 2^mu(s) for odd n, on even indices b(2m).

    The congruence is checked for the even-index sequence m -> b(2m), the
    same shift under which the valuation rule holds.  The plain b(n) reading
    is evaluated too and its first failure goes into the notes.
    """
    rep = Report("gupta-rodseth", {"max": max, "s_max": s_max})
    vals = b_stream(max)
    literal_bad = None
    for s in range(s_max + 1):
        mod = 1 << gupta_rodseth_exponent(s)
        n = 1
        while (n << (s + 3)) <= max:
            hi, lo = vals[n << (s + 3)], vals[n << (s + 1)]
            if (hi - lo) % mod:
                rep.fail(n=n, s=s, modulus=mod, high=hi, low=lo)
                return rep
            if literal_bad is None and (vals[n << (s + 2)] - vals[n << s]) % mod:
                literal_bad = (s, n)
            n += 2
    if literal_bad is not None:
        s, n = literal_bad
        rep.notes.append(
            f"plain b(n) reading fails first at s={s}, n={n}: "
            f"b({n << (s + 2)})={vals[n << (s + 2)]}, b({n << s})={vals[n << s]}, "
            f"modulus {1 << gupta_rodseth_exponent(s)}"
        )
    return rep


@register("colored-valuation", MODULE, small={"max": 10**4, "k_max": 4}, full={"max": 5 * 10**4, "k_max": 4})
def verify_colored_valuation(max: int, k_max: int = 4) -> Report:
    """nu2(b_{2^k-1}(n)) against the four-branch table, exact streams."""
    rep = Report("colored-valuation", {"max": max, "k_max": k_max})
    for k in range(1, k_max + 1):
        vals = bm_stream((1 << k) - 1, max)
        for n, v in enumerate(vals):
            if nu2(v) != nu2_bm_closed(k, n):
                rep.fail(n=n, k=k, nu2=nu2(v), closed=nu2_bm_closed(k, n))
                break
    rep.notes.append("last branch taken as 3*2^k <= i < 2^(k+2); with 3*2^(k+1) as lower end it is empty")
    return rep


@register("colored-binomial", MODULE, small={"max": 2000}, full={"max": 20000})
def verify_colored_binomial(max: int, ms: tuple[int, ...] = (2, 4, 6, 8, 16)) -> Report:
    """b_m(n) = C(m, n) + 2^(nu2(m)+1) C(m-2, n-2) mod 2^(nu2(m)+2)."""
    rep = Report("colored-binomial", {"max": max, "m": list(ms)})
    for m in ms:
        e = nu2(m)
        p = e + 2
        res = bm_mod_stream(m, max, p).values
        mod = 1 << p
        for n in range(max + 1):
            rhs = comb(m, n) + (1 << (e + 1)) * (comb(m - 2, n - 2) if n >= 2 else 0)
            if (int(res[n]) - rhs) % mod:
                rep.fail(n=n, m=m, residue=int(res[n]), expected=rhs % mod, modulus=mod)
                break
    return rep


@register("binomial-valuation", MODULE, small={"k_max": 12, "max": 1000}, full={"k_max": 14, "max": 2000})
def verify_binomial_valuation(k_max: int, max: int) -> Report:
    """nu2(C(2^k, n)) = k - nu2(n); C(2m, 2n) = C(m, n) mod 2^(nu2(m)+1)."""
    rep = Report("binomial-valuation", {"k_max": k_max, "max": max})
    for k in range(k_max + 1):
        row = binomial_rows_mod(1 << k, k + 1)[1 << k]
        for n in range(1, (1 << k) + 1):
            v = int(row[n])
            got = nu2(v) if v else k + 1
            if got != k - nu2(n):
                rep.fail(n=n, k=k, nu2=got, expected=k - nu2(n), part="a")
                return rep
    p = max.bit_length() + 1
    rows = binomial_rows_mod(2 * max, p)
    for m in range(1, max + 1):
        mod = 1 << (nu2(m) + 1)
        lhs = rows[2 * m, 0:2 * m + 1:2][: m + 1].astype(np.int64)
        rhs = rows[m, : m + 1].astype(np.int64)
        bad = np.flatnonzero((lhs - rhs) % mod)
        if len(bad):
            rep.fail(m=m, n=int(bad[0]), part="b", modulus=mod)
            return rep
    return rep


def paperfolding_series_mod(m: int, n_terms: int, p: int) -> np.ndarray:
    """Coefficients of (1 - x)^m (1 + 2m P(x)) mod 2^p, P(x) = sum_{n>=1} p_n x^n."""
    mask = (1 << p) - 1
    left = [comb(m, j) * (-1) ** j & mask for j in range(min(m, n_terms - 1) + 1)]
    right = [1] + [(2 * m * paperfold(n)) & mask for n in range(1, n_terms)]
    return series_mul_mod(np.array(left, dtype=np.uint64), np.array(right, dtype=np.uint64), n_terms, p)


@register("paperfolding", MODULE, small={"max": 2000}, full={"max": 10000})
def verify_paperfolding(max: int, ms: tuple[int, ...] = (2, 4, 6, 8, 10, 12, 14, 16)) -> Report:
    """B_m(x) = (1 - x)^m (1 + 2m P(x)) mod 2^(nu2(m)+3) for even m."""
    rep = Report("paperfolding", {"max": max, "m": list(ms)})
    for m in ms:
        p = nu2(m) + 3
        lhs = np.array([v & ((1 << p) - 1) for v in bm_stream(m, max - 1)], dtype=np.uint64)
        rhs = paperfolding_series_mod(m, max, p)
        bad = np.flatnonzero(lhs != rhs)
        if len(bad):
            n = int(bad[0])
            rep.fail(n=n, m=m, modulus=1 << p, lhs=int(lhs[n]), rhs=int(rhs[n]))
            rep.notes.append(f"m={m}: agreement holds only mod {1 << _paperfolding_depth(m, max)}")
    return rep


def _paperfolding_depth(m: int, n_terms: int) -> int:
    """Largest p <= nu2(m)+3 with agreement of the first n_terms coefficients mod 2^p."""
    exact = bm_stream(m, n_terms - 1)
    depth = 0
    for p in range(1, nu2(m) + 4):
        lhs = np.array([v & ((1 << p) - 1) for v in exact], dtype=np.uint64)
        if np.any(lhs != paperfolding_series_mod(m, n_terms, p)):
            break
        depth = p
    return depth


@register("mahler-growth", MODULE, small={"e_min": 10, "e_max": 17})
def verify_mahler(e_min: int, e_max: int) -> Report:
    """log2 b(n) / (log2(n)^2 / 2) within [0.5, 1.5] at n = 2^e (loose)."""
    rep = Report("mahler-growth", {"e_min": e_min, "e_max": e_max})
    vals = b_stream(1 << e_max)
    for e in range(e_min, e_max + 1):
        ratio = log2(vals[1 << e]) / (0.5 * e * e)
        if not 0.5 <= ratio <= 1.5:
            rep.fail(n=1 << e, ratio=ratio)
    return rep
