"""Closed-form membership tests for S_1, S_3, S_{2^k-1} and their verifiers.

S_m is the set of n such that b_m(n) is not a sum of three squares.  All
predicates read the binary digits of n directly; nothing is enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from ._backend import kernels
from .partitions import (
    b_stream,
    bm_mod_stream,
    bm_stream,
    nu2_b,
    nu2_bm_closed,
)
from .report import Report, register
from .sequences import evil, nu2, odious, ptm, ptm_bit, sigma
from .squares import is_three_squares

GAP_VALUES = (6, 8, 10, 16, 18, 24)
S1_PREFIX = (10, 18, 34, 40, 58, 66, 72, 90, 106, 114, 130, 136, 154, 160, 170, 178, 202, 210, 226)
TABLE_CD = {
    "c": (1, 7, 3, 5, 9, -1, 3, 5),
    "d": (-5, -3, 1, -9, -5, -3, -7, -1),
}


@dataclass(frozen=True)
class MembershipWitness:
    """Membership of ``n`` and the clause parameters that produced it.

    ``route`` holds the parameters of the parametric family that matched
    (``{"set": "S1", "k": .., "r": .., "i": ..}`` and so on), or ``None``
    for a non-member.
    """

    n: int
    member: bool
    route: dict[str, Any] | None = None

    def __bool__(self) -> bool:
        return self.member

    def reconstruct(self) -> int | None:
        """Rebuild n from the clause parameters."""
        if self.route is None:
            return None
        r = self.route
        if r["set"] == "S1":
            core = 8 * r["r"] + 2 * ptm(r["r"]) + 3
            return (core << (2 * r["k"] + 2)) + r["i"]
        if r["set"] == "S3":
            i, p = r["i"], r["p"]
            core = 8 * p + 2 * (i // 2) + 3 + 2 * (-1) ** i * ptm(p)
            return (core << (2 * r["k"] + 1)) + i
        if r["set"] == "S2k":
            return (r["m"] << r["k"]) + r["l"]
        raise ValueError(f"unknown route {r['set']!r}")


@dataclass(frozen=True)
class GapRecord:
    index: int
    f: int
    g: int


# --- chi and S_1 --------------------------------------------------------------


def chi(n: int) -> int:
    """Characteristic function of S_1' by the recurrences.

    chi(0) = 0, chi(2n+1) = 0, chi(4n) = chi(n), chi(8n+2) = T_n, chi(8n+6) = 0.
    """
    while n and n % 4 == 0:
        n //= 4
    if n % 8 == 2:
        return ptm_bit(n // 8)
    return 0


def chi_form_b(n: int) -> int:
    """n = 2^(2k+1) (4s+1) with t_s = -1."""
    if n <= 0:
        return 0
    e = nu2(n)
    core = n >> e
    return int(e % 2 == 1 and core % 4 == 1 and ptm(core >> 2) == -1)


def chi_form_c(n: int) -> int:
    """n = 2^(2k+1) (8r + 2 t_r + 3)."""
    if n <= 0:
        return 0
    e = nu2(n)
    if e % 2 == 0:
        return 0
    return int(_s1_core(n >> e) is not None)


def _s1_core(u: int) -> int | None:
    """r with u = 8r + 2 t_r + 3, if any."""
    t = {5: 1, 1: -1}.get(u % 8)
    if t is None:
        return None
    r = (u - 3 - 2 * t) // 8
    if r < 0 or ptm(r) != t:
        return None
    return r


def in_S1(n: int) -> MembershipWitness:
    """n = 2^(2k+2) (8r + 2 t_r + 3) + i with i in {0, 1}."""
    i = n & 1
    m = n - i
    if m > 0:
        e = nu2(m)
        if e >= 2 and e % 2 == 0:
            r = _s1_core(m >> e)
            if r is not None:
                return MembershipWitness(n, True, {"set": "S1", "k": (e - 2) // 2, "r": r, "i": i})
    return MembershipWitness(n, False)


# --- S_3 ------------------------------------------------------------------------


def in_S3(n: int) -> MembershipWitness:
    """n = 2^(2k+1) (8p + 2 floor(i/2) + 3 + 2 (-1)^i t_p) + i, k >= 1, 0 <= i < 4."""
    i = n & 7
    m = n - i
    if i < 4 and m > 0:
        e = nu2(m)
        if e >= 3 and e % 2 == 1:
            u = m >> e
            sign = -1 if i & 1 else 1
            for t in (1, -1):
                c = 2 * (i // 2) + 3 + 2 * sign * t
                if (u - c) % 8 == 0 and u >= c and ptm((u - c) // 8) == t:
                    return MembershipWitness(n, True, {"set": "S3", "k": (e - 1) // 2, "p": (u - c) // 8, "i": i})
    return MembershipWitness(n, False)


# --- S_{2^k - 1}, k >= 3 ---------------------------------------------------------


def in_S2k(k: int, n: int) -> MembershipWitness:
    """Membership in S_{2^k-1}.

    Below 2^k: t_n = -1 with n < 2^(k-2), or t_n = 1 with 2^(k-1) <= n < 3*2^(k-2).
    From 2^k on: t_n = t_(n - 2^k) = 1.
    """
    if k < 3:
        raise ValueError("closed form needs k >= 3")
    top = 1 << k
    m, l = divmod(n, top)
    if n < top:
        hit = (n < top >> 2 and ptm(n) == -1) or (top >> 1 <= n < 3 * (top >> 2) and ptm(n) == 1)
    else:
        hit = ptm(n) == 1 and ptm(n - top) == 1
    if not hit:
        return MembershipWitness(n, False)
    return MembershipWitness(n, True, {"set": "S2k", "k": k, "m": m, "l": l})


def s2k_form_c(k: int, n: int) -> bool:
    """n = 2^k m + l with l < 2^k, t_m = t_l and nu2(m) odd (n >= 2^k)."""
    m, l = divmod(n, 1 << k)
    return m > 0 and nu2(m) % 2 == 1 and ptm(m) == ptm(l)


# --- beta and the sequences c_a --------------------------------------------------


def beta_array(m_max: int) -> np.ndarray:
    """beta(m) = (b(8m+4) / 4) mod 8 for 0 <= m <= m_max."""
    res = bm_mod_stream(1, 8 * m_max + 4, 5).values
    return (res[4::8] >> 2) & 7


def beta(m: int) -> int:
    return int(beta_array(m)[m])


_C_FORMS = {
    1: lambda l: 4 * l - ptm(l) + 1,
    3: lambda l: 4 * l + ptm(l) + 2,
    5: lambda l: 4 * l - ptm(l) + 2,
    7: lambda l: 4 * l + ptm(l) + 1,
}


def c_a(a: int, l: int) -> int:
    """l-th element (from 0) of {m : beta(m) = a}, by its closed form."""
    if a not in _C_FORMS:
        raise ValueError(f"a must be one of 1, 3, 5, 7, got {a}")
    return _C_FORMS[a](l)


# --- gaps in S_1' -----------------------------------------------------------------


def s1_prime_array(n_max: int) -> np.ndarray:
    """chi(0..n_max) as uint8."""
    return np.asarray(kernels.chi_array(n_max), dtype=np.uint8)


def f_and_gaps(count: int) -> list[GapRecord]:
    """First ``count`` elements of S_1' with the gap to the next one."""
    limit = 16 * (count + 2) + 64
    while True:
        ones = np.flatnonzero(s1_prime_array(limit))
        if len(ones) > count:
            break
        limit *= 2
    return [GapRecord(i, int(ones[i]), int(ones[i + 1] - ones[i])) for i in range(count)]


def _gap_candidate(g: int, m: int) -> int | None:
    if g == 6:
        return 32 * m + 2 if ptm_bit(m) == 1 else None
    if g == 8:
        return 32 * m + 10 if ptm_bit(m) == 0 else None
    if g == 10:
        return 16 * m if chi(m) == 1 else None
    if g == 16:
        return 64 * m + 18 if ptm_bit(m) == 0 else None
    if g == 18:
        return 32 * m + 8 if ptm_bit(m) == 1 else None
    if g == 24:
        return 256 * m + 178 if ptm_bit(m) == 0 else None
    raise ValueError(f"gap must be one of {GAP_VALUES}, got {g}")


def realizes_gap(n: int, g: int) -> bool:
    """chi(n) = chi(n+g) = 1 and chi vanishes strictly between."""
    return chi(n) == 1 and chi(n + g) == 1 and not any(chi(n + j) for j in range(1, g))


def gap_class_witnesses(g: int, how_many: int) -> list[int]:
    """First ``how_many`` indices of the family I_g, each checked to realize gap g."""
    if g not in GAP_VALUES:
        raise ValueError(f"gap must be one of {GAP_VALUES}, got {g}")
    out: list[int] = []
    m = 0
    while len(out) < how_many:
        n = _gap_candidate(g, m)
        if n is not None:
            if not realizes_gap(n, g):
                raise ArithmeticError(f"index {n} (m={m}) of I_{g} does not realize gap {g}")
            out.append(n)
        m += 1
    return out


# --- coefficient table ------------------------------------------------------------------


def cd_equivalent(x: tuple[int, int], y: tuple[int, int]) -> bool:
    """Coefficient pairs act identically mod 32 iff they differ by (16a + 32u, 16a + 32v)."""
    dc, dd = x[0] - y[0], x[1] - y[1]
    return dc % 16 == 0 and (dd - dc) % 32 == 0


def table_cd_from_binomials() -> list[tuple[int, int]]:
    """c_i = sum_{l<=i} C(16,2l) t_(i-l), d_i = sum_{l>i} C(16,2l) t_(8+i-l), mod 32.

    For l > i the index 8m+i-l is 8(m-1) + (8+i-l), which brings in t_(m-1)
    times t_(8+i-l); writing that factor as -t_(l-i) does not reproduce the table.
    """
    from math import comb

    out = []
    for i in range(8):
        c = sum(comb(16, 2 * l) * ptm(i - l) for l in range(i + 1))
        d = sum(comb(16, 2 * l) * ptm(8 + i - l) for l in range(i + 1, 9))
        out.append((c % 32, d % 32))
    return out


def derive_table_cd(k: int, m_max: int = 64) -> list[tuple[int, int]]:
    """Recover (c_i, d_i) from residues of b_{2^k-1} mod 32.

    At an index with (t_m, t_(m-1)) = (1, 1) the residue times t_j is c+d;
    at one with (1, -1) it is c-d.  That fixes c mod 16 and then d mod 32.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    res = bm_mod_stream((1 << k) - 1, (m_max + 1) << k, 5).values
    m_same = next(m for m in range(1, m_max + 1) if ptm(m) == 1 and ptm(m - 1) == 1)
    m_diff = next(m for m in range(1, m_max + 1) if ptm(m) == 1 and ptm(m - 1) == -1)
    out = []
    for i in range(8):
        n_same = (m_same << k) + (i << (k - 3))
        n_diff = (m_diff << k) + (i << (k - 3))
        plus = int(res[n_same]) % 32
        minus = int(res[n_diff]) % 32
        if (plus + minus) % 2:
            raise ArithmeticError(f"residues {plus}, {minus} admit no coefficient pair")
        c = ((plus + minus) // 2) % 16
        out.append((c, (plus - c) % 32))
    return out


# --- oracle ------------------------------------------------------------------------


def not_three_squares_from_residue(residue: int, valuation: int) -> bool:
    """Legendre's test on a value known mod 32 with 2-adic valuation <= 2."""
    if valuation == 0:
        return residue % 8 == 7
    if valuation == 1:
        return False
    if valuation == 2:
        return residue % 32 == 28
    raise ValueError(f"valuation {valuation} is outside the range decided mod 32")


def _residue_valuation(residue: int) -> int | None:
    residue %= 32
    return None if residue == 0 else nu2(residue)


# --- verifiers -----------------------------------------------------------------------

MODULE = "characterizations"

ALIASES = {
    "Prop3.2": "b-mod32",
    "Prop3.7": "b-mod16",
    "Lemma4.1": "b3-mod32",
    "Prop5.2": "b2k-small-mod8",
    "Thm5.5": "b2k-mod32",
    "Sigma32": "sigma-mod32",
    "Thm2.2": "gupta-rodseth",
    "Thm2.3": "colored-valuation",
    "Thm3.6": "beta-classes",
    "Cor3.3": "s1-forms",
    "Cor5.6": "s2k-forms",
}


def _t_array(n_max: int) -> np.ndarray:
    return 1 - 2 * kernels.tm_bits(n_max).astype(np.int64)


def _first_bad(mask: np.ndarray) -> int | None:
    bad = np.flatnonzero(mask)
    return int(bad[0]) if len(bad) else None


@register("b-mod32", MODULE, small={"max": 10**5}, full={"max": 10**6})
def verify_b_mod32(max: int) -> Report:
    """b(16m) = b(4m), b(16m+4) = 4 t_m, b(16m+12) = 20 t_m mod 32."""
    rep = Report("b-mod32", {"max": max})
    r = bm_mod_stream(1, 16 * max + 12, 5).values.astype(np.int64)
    t = _t_array(max)
    m = np.arange(max + 1)
    checks = [
        ("b(16m) = b(4m)", r[16 * m], r[4 * m]),
        ("b(16m+4) = 4t_m", r[16 * m + 4], 4 * t),
        ("b(16m+12) = 20t_m", r[16 * m + 12], 20 * t),
    ]
    for label, lhs, rhs in checks:
        bad = _first_bad((lhs - rhs) % 32 != 0)
        if bad is not None:
            rep.fail(m=bad, relation=label, lhs=int(lhs[bad]) % 32, rhs=int(rhs[bad]) % 32)
    return rep


@register("b-mod16", MODULE, small={"max": 10**5}, full={"max": 10**6})
def verify_b_mod16(max: int) -> Report:
    """b(16n+8) = b(4n+2), b(8n+2) = 2 t_n, b(8n+6) = 6 t_n mod 16."""
    rep = Report("b-mod16", {"max": max})
    r = bm_mod_stream(1, 16 * max + 8, 5).values.astype(np.int64)
    t = _t_array(max)
    n = np.arange(max + 1)
    checks = [
        ("b(16n+8) = b(4n+2)", r[16 * n + 8], r[4 * n + 2]),
        ("b(8n+2) = 2t_n", r[8 * n + 2], 2 * t),
        ("b(8n+6) = 6t_n", r[8 * n + 6], 6 * t),
    ]
    for label, lhs, rhs in checks:
        bad = _first_bad((lhs - rhs) % 16 != 0)
        if bad is None:
            continue
        rep.fail(n=bad, relation=label, lhs=int(lhs[bad]) % 16, rhs=int(rhs[bad]) % 16, modulus=16)
        for p in (3, 2, 1):
            if not np.any((lhs - rhs) % (1 << p)):
                rep.notes.append(f"{label} holds only mod {1 << p} on the range")
                break
    return rep


@register("sigma-mod32", MODULE, small={"max": 10**5}, full={"max": 10**6})
def verify_sigma(max: int) -> Report:
    """b(8n+2), b(8n+6), b(16n+8) mod 32 via t_n and sigma_n."""
    rep = Report("sigma-mod32", {"max": max})
    r = bm_mod_stream(1, 16 * max + 8, 5).values.astype(np.int64)
    t = _t_array(max)
    n = np.arange(max + 1, dtype=np.int64)
    sg = np.array([sigma(int(i)) for i in range(max + 1)], dtype=np.int64)
    checks = [
        ("b(8n+2) = 2t_n + 16sigma_n", r[8 * n + 2], 2 * t + 16 * sg),
        ("b(8n+6) = 6t_n + 16sigma_n + 16n", r[8 * n + 6], 6 * t + 16 * sg + 16 * n),
        ("b(16n+8) = (10+8n^2)t_n + 16sigma_n", r[16 * n + 8], (10 + 8 * ((n * n) % 4)) * t + 16 * sg),
    ]
    for label, lhs, rhs in checks:
        bad = _first_bad((lhs - rhs) % 32 != 0)
        if bad is not None:
            rep.fail(n=bad, relation=label, lhs=int(lhs[bad]) % 32, rhs=int(rhs[bad]) % 32,
                     t=int(t[bad]), sigma=int(sg[bad]))
    return rep


@register("b3-mod32", MODULE, small={"max": 10**4}, full={"max": 10**5})
def verify_b3(max: int, k_max: int = 4) -> Report:
    """The b_3 congruences: residues of 8n+i+4, 32n+i against 8n+i, and 8(2n+1)+i.

    The second relation is checked mod 64 and mod 32 for i = 0..4; i = 0..3
    gate the result and the outcome for i = 4 is recorded in the notes.
    """
    rep = Report("b3-mod32", {"max": max, "k_max": k_max})
    top = 32 * max + 4
    top = top if top > ((2 * max + 1) << (2 * k_max + 1)) + 3 else ((2 * max + 1) << (2 * k_max + 1)) + 3
    r = bm_mod_stream(3, top, 6).values.astype(np.int64)
    t = _t_array(max)
    n = np.arange(max + 1, dtype=np.int64)
    alt = np.where(n % 2 == 0, 1, -1)
    for i in range(4):
        lhs = r[8 * n + i + 4]
        rhs = 2 * (2 * i + 1 + 4 * alt) * t
        bad = _first_bad((lhs - rhs) % 32 != 0)
        if bad is not None:
            rep.fail(n=bad, relation=f"b3(8n+{i}+4)", i=i, lhs=int(lhs[bad]) % 32, rhs=int(rhs[bad]) % 32)
    for i in range(5):
        for mod in (64, 32):
            bad = _first_bad((r[32 * n + i] - r[8 * n + i]) % mod != 0)
            if bad is None:
                rep.notes.append(f"b3(32n+{i}) = b3(8n+{i}) mod {mod}: holds")
                continue
            ctx = dict(n=bad, relation=f"b3(32n+{i}) = b3(8n+{i})", i=i, modulus=mod,
                       lhs=int(r[32 * bad + i]) % mod, rhs=int(r[8 * bad + i]) % mod)
            if i < 4:
                rep.fail(**ctx)
            else:
                rep.notes.append(f"b3(32n+{i}) = b3(8n+{i}) mod {mod}: fails, first at n={bad} "
                                 f"({ctx['lhs']} vs {ctx['rhs']})")
    for i in range(4):
        lhs = r[8 * (2 * n + 1) + i]
        rhs = 4 * (3 + 3 * i - i * i - 2 * alt * (-1) ** i) * t
        bad = _first_bad((lhs - rhs) % 32 != 0)
        if bad is not None:
            rep.fail(n=bad, relation=f"b3(8(2n+1)+{i})", i=i, lhs=int(lhs[bad]) % 32, rhs=int(rhs[bad]) % 32)
    # consequences: 2 mod 4 at 2^(2k)(2n+1)+i, stability mod 32 at 2^(2k+1)(2n+1)+i
    for k in range(1, k_max + 1):
        for i in range(4):
            even = (((2 * n + 1) << (2 * k)) + i)
            odd = (((2 * n + 1) << (2 * k + 1)) + i)
            bad = _first_bad(r[even] % 4 != 2)
            if bad is not None:
                rep.fail(n=bad, relation=f"b3(2^{2 * k}(2n+1)+{i}) = 2 mod 4", k=k, i=i, value=int(r[even[bad]]) % 4)
            bad = _first_bad((r[odd] - r[8 * (2 * n + 1) + i]) % 32 != 0)
            if bad is not None:
                rep.fail(n=bad, relation=f"b3(2^{2 * k + 1}(2n+1)+{i}) stable mod 32", k=k, i=i)
    return rep


@register("b2k-small-mod8", MODULE, small={"k_max": 8}, full={"k_max": 12})
def verify_b2k_small(k_max: int) -> Report:
    """b_{2^k-1}(n) mod 8 for n < 2^k is t_n times 1, 5, 7, 3 by quarter."""
    rep = Report("b2k-small-mod8", {"k_min": 3, "k_max": k_max})
    for k in range(3, k_max + 1):
        top = 1 << k
        r = bm_mod_stream(top - 1, top - 1, 3).values.astype(np.int64)
        t = _t_array(top - 1)
        quarter = np.arange(top) // (top >> 2)
        factor = np.array([1, 5, 7, 3])[quarter]
        bad = _first_bad((r - factor * t) % 8 != 0)
        if bad is not None:
            rep.fail(n=bad, k=k, residue=int(r[bad]), expected=int(factor[bad] * t[bad]) % 8)
    return rep


@register("b2k-mod32", MODULE, small={"max": 10**5, "ks": (3, 4, 5)}, full={"max": 10**6, "ks": (3, 4, 5)})
def verify_b2k_mod32(max: int, ks=(3, 4, 5)) -> Report:
    """b_{2^k-1}(2^k m + 2^(k-3) i + j) = t_j (c_i t_m + d_i t_(m-1)) mod 32, m >= 1."""
    rep = Report("b2k-mod32", {"max": max, "k": list(ks)})
    c = np.array(TABLE_CD["c"], dtype=np.int64)
    d = np.array(TABLE_CD["d"], dtype=np.int64)
    t = _t_array(max)
    for k in ks:
        r = bm_mod_stream((1 << k) - 1, max, 5).values.astype(np.int64)
        n = np.arange(1 << k, max + 1, dtype=np.int64)
        m = n >> k
        low = n & ((1 << k) - 1)
        i = low >> (k - 3)
        j = low & ((1 << (k - 3)) - 1)
        rhs = t[j] * (c[i] * t[m] + d[i] * t[m - 1])
        bad = _first_bad((r[n] - rhs) % 32 != 0)
        if bad is not None:
            idx = int(n[bad])
            rep.fail(n=idx, k=k, m=int(m[bad]), i=int(i[bad]), j=int(j[bad]),
                     residue=int(r[idx]), expected=int(rhs[bad]) % 32)
    return rep


@register("table-cd", MODULE, small={"ks": (3, 4, 5)})
def verify_table_cd(ks=(3, 4, 5)) -> Report:
    """Table coefficients against residues and binomial sums; c_i + d_i = -4 t_i."""
    rep = Report("table-cd", {"k": list(ks)})
    listed = list(zip(TABLE_CD["c"], TABLE_CD["d"]))
    for i, (c, d) in enumerate(listed):
        if (c + d + 4 * ptm(i)) % 32:
            rep.fail(index=i, relation="c_i + d_i = -4t_i", c=c, d=d)
        if (c - d) % 4 == 0:
            rep.fail(index=i, relation="4 does not divide c_i - d_i", c=c, d=d)
    for i, pair in enumerate(table_cd_from_binomials()):
        if not cd_equivalent(pair, listed[i]):
            rep.fail(index=i, route="binomial sums", derived=list(pair), table=list(listed[i]))
    for k in ks:
        for i, pair in enumerate(derive_table_cd(k)):
            if not cd_equivalent(pair, listed[i]):
                rep.fail(index=i, k=k, route="residues", derived=list(pair), table=list(listed[i]))
    return rep


@register("s1-forms", MODULE, small={"max": 10**6})
def verify_s1_forms(max: int) -> Report:
    """The three descriptions of S_1' agree: 2^(2k+1)(4s+1), 2^(2k+1)(8r+2t_r+3), chi."""
    rep = Report("s1-forms", {"max": max})
    n = np.arange(max + 1, dtype=np.int64)
    bits = kernels.tm_bits(max)
    tz = np.zeros_like(n)
    low = n & -n
    tz[1:] = np.log2(low[1:]).astype(np.int64)
    core = n >> tz
    odd_e = (n > 0) & (tz % 2 == 1)
    form_b = odd_e & (core % 4 == 1) & (bits[core >> 2] == 1)
    r = core >> 3
    tr = 1 - 2 * bits[r].astype(np.int64)
    form_c = odd_e & (core == 8 * r + 2 * tr + 3)
    form_d = _chi_by_recurrence(max)
    for label, arr in (("form b", form_b), ("form c", form_c)):
        bad = _first_bad(arr != form_d.astype(bool))
        if bad is not None:
            rep.fail(n=bad, form=label, value=int(arr[bad]), chi=int(form_d[bad]))
    step = 997
    for k in range(0, max + 1, step):
        if not (chi(k) == chi_form_b(k) == chi_form_c(k) == form_d[k]):
            rep.fail(n=k, form="scalar", chi=chi(k), b=chi_form_b(k), c=chi_form_c(k))
    return rep


def _chi_by_recurrence(n_max: int) -> np.ndarray:
    """chi(0..n_max) filled level by level from chi(4n) = chi(n)."""
    out = np.zeros(n_max + 1, dtype=np.uint8)
    bits = kernels.tm_bits(n_max)
    idx = np.arange(2, n_max + 1, 8)
    out[idx] = bits[(idx - 2) // 8]
    src_max = n_max // 4
    while src_max > 0:
        changed = out[4: 4 * src_max + 1: 4] != out[1: src_max + 1]
        if not changed.any():
            break
        out[4: 4 * src_max + 1: 4] = out[1: src_max + 1]
    return out


@register("evil-odious", MODULE, small={"max": 10**5})
def verify_evil_odious(max: int) -> Report:
    """{T_n = 0} = {2m + T_m}, {T_n = 1} = {2m + 1 - T_m}."""
    rep = Report("evil-odious", {"max": max})
    evils = {evil(m) for m in range(max // 2 + 1)}
    odiouses = {odious(m) for m in range(max // 2 + 1)}
    for n in range(max + 1):
        want = ptm_bit(n)
        if (n in evils) == bool(want) or (n in odiouses) != bool(want):
            rep.fail(n=n, T=want, evil=n in evils, odious=n in odiouses)
            break
    return rep


def _oracle_report(name: str, max: int, residues, valuation, predicate, exact: list[int],
                   spot_step: int) -> Report:
    """Compare a closed-form predicate with the residue oracle on 0..max.

    ``exact`` holds exact values for a prefix of the range; every
    ``spot_step``-th one is run through the big-integer Legendre test.
    """
    rep = Report(name, {"max": max, "spot_step": spot_step})
    for n in range(max + 1):
        v = valuation(n)
        res = int(residues[n])
        rv = _residue_valuation(res)
        if rv is not None and rv != v:
            rep.fail(n=n, what="valuation", closed=v, residue=res)
            break
        oracle = not_three_squares_from_residue(res, v)
        wit = predicate(n)
        if wit.member != oracle:
            rep.fail(n=n, closed_form=wit.member, oracle=oracle, residue=res, nu2=v, route=wit.route)
            break
        if wit.member and wit.reconstruct() not in (None, wit.n):
            rep.fail(n=n, what="witness does not rebuild n", route=wit.route)
            break
    for n in range(0, min(len(exact), max + 1), spot_step):
        if (not is_three_squares(exact[n])) != predicate(n).member:
            rep.fail(n=n, what="exact spot check", value=exact[n])
            break
    return rep


def _s1_witness(n: int) -> MembershipWitness:
    """Membership of n in S_1' through chi, cross-checked with the digit form of 2n."""
    w = in_S1(2 * n)
    if w.member != bool(chi(n)):
        return MembershipWitness(n, not w.member, {"set": "S1", "disagreement": "chi vs digit form"})
    return MembershipWitness(n, w.member, None)


@register("s1-oracle", MODULE, small={"max": 2 * 10**5}, full={"max": 10**6})
def verify_s1_oracle(max: int, spot_step: int = 1000) -> Report:
    """chi(n) = 1 iff b(2n) is not a sum of three squares, 0 <= n <= max."""
    res = bm_mod_stream(1, 2 * max + 1, 5).values
    exact = b_stream(2 * max)[0::2]
    rep = _oracle_report(
        "s1-oracle", max, res[0::2],
        valuation=lambda n: 0 if n == 0 else nu2_b(2 * n),
        predicate=_s1_witness,
        exact=exact,
        spot_step=spot_step,
    )
    for n in range(max + 1):
        if in_S1(2 * n + 1).member != in_S1(2 * n).member:
            rep.fail(n=n, what="odd neighbour")
            break
    return rep


@register("s3-oracle", MODULE, small={"max": 2 * 10**5}, full={"max": 10**6})
def verify_s3_oracle(max: int, spot_step: int = 1000, exact_max: int = 10**5) -> Report:
    """in_S3(n) iff b_3(n) is not a sum of three squares."""
    res = bm_mod_stream(3, max, 5).values
    return _oracle_report(
        "s3-oracle", max, res,
        valuation=lambda n: nu2_bm_closed(2, n),
        predicate=in_S3,
        exact=bm_stream(3, min(max, exact_max)),
        spot_step=spot_step,
    )


@register("s2k-oracle", MODULE, small={"max": 2 * 10**5, "ks": (3, 4, 5)}, full={"max": 10**6, "ks": (3, 4, 5)})
def verify_s2k_oracle(max: int, ks=(3, 4, 5), spot_step: int = 1000, exact_max: int = 10**5) -> Report:
    """in_S2k(k, n) iff b_{2^k-1}(n) is not a sum of three squares."""
    out = Report("s2k-oracle", {"max": max, "k": list(ks), "spot_step": spot_step})
    for k in ks:
        m = (1 << k) - 1
        rep = _oracle_report(
            "s2k-oracle", max, bm_mod_stream(m, max, 5).values,
            valuation=lambda n, k=k: nu2_bm_closed(k, n),
            predicate=lambda n, k=k: in_S2k(k, n),
            exact=bm_stream(m, min(max, exact_max)),
            spot_step=spot_step,
        )
        if rep.counterexample is not None:
            out.fail(k=k, **rep.counterexample)
    return out


@register("s2k-forms", MODULE, small={"max": 10**5, "ks": (3, 4, 5)})
def verify_s2k_forms(max: int, ks=(3, 4, 5)) -> Report:
    """t_n = t_(n-2^k) = 1 iff n = 2^k m + l with t_m = t_l and nu2(m) odd."""
    rep = Report("s2k-forms", {"max": max, "k": list(ks)})
    for k in ks:
        for n in range(1 << k, max + 1):
            if in_S2k(k, n).member != s2k_form_c(k, n):
                rep.fail(n=n, k=k, form_b=in_S2k(k, n).member, form_c=s2k_form_c(k, n))
                break
    return rep


@register("s1-prefix", MODULE, small={})
def verify_s1_prefix() -> Report:
    """First elements of S_1' against the known prefix."""
    rep = Report("s1-prefix", {"count": len(S1_PREFIX)})
    got = tuple(g.f for g in f_and_gaps(len(S1_PREFIX)))
    if got != S1_PREFIX:
        idx = next(i for i, (a, b_) in enumerate(zip(got, S1_PREFIX)) if a != b_)
        rep.fail(index=idx, got=got[idx], expected=S1_PREFIX[idx])
    return rep


@register("gaps", MODULE, small={"max": 10**6, "min_count": 10}, full={"max": 10**7, "min_count": 10})
def verify_gaps(max: int, min_count: int = 10) -> Report:
    """Gaps of S_1' up to max lie in {6,8,10,16,18,24}, each seen often enough."""
    rep = Report("gaps", {"max": max, "min_count": min_count})
    ones = np.flatnonzero(s1_prime_array(max))
    gaps = np.diff(ones)
    bad = _first_bad(~np.isin(gaps, GAP_VALUES))
    if bad is not None:
        rep.fail(index=bad, f=int(ones[bad]), g=int(gaps[bad]))
    counts = {g: int(np.count_nonzero(gaps == g)) for g in GAP_VALUES}
    for g, cnt in counts.items():
        if cnt < min_count:
            rep.fail(index=g, what="rare gap class", g=g, count=cnt)
    rep.notes.append("gap counts: " + ", ".join(f"{g}:{c}" for g, c in counts.items()))
    return rep


@register("gap-classes", MODULE, small={"how_many": 200})
def verify_gap_classes(how_many: int) -> Report:
    """Each family I_g realizes gap g on its first members."""
    rep = Report("gap-classes", {"how_many": how_many})
    for g in GAP_VALUES:
        try:
            gap_class_witnesses(g, how_many)
        except ArithmeticError as exc:
            rep.fail(index=g, g=g, error=str(exc))
    return rep


@register("beta-classes", MODULE, small={"max": 4 * 10**4}, full={"max": 4 * 10**5})
def verify_beta_classes(max: int) -> Report:
    """{c_a(l)} enumerates {m : beta(m) = a} in increasing order, m <= max."""
    rep = Report("beta-classes", {"max": max})
    values = beta_array(max)
    for a in (1, 3, 5, 7):
        want = np.flatnonzero(values == a).tolist()
        got = []
        l = 0
        while (v := c_a(a, l)) <= max:
            if got and v <= got[-1]:
                rep.fail(m=v, a=a, what="not increasing", l=l)
                break
            got.append(v)
            l += 1
        if got != want:
            idx = next((i for i, (x, y) in enumerate(zip(got, want)) if x != y), min(len(got), len(want)))
            rep.fail(m=(got + want)[idx] if idx < len(got) + len(want) else -1, a=a, l=idx,
                     closed_form=got[idx] if idx < len(got) else None,
                     oracle=want[idx] if idx < len(want) else None)
    if np.any(values % 2 == 0):
        bad = _first_bad(values % 2 == 0)
        rep.fail(m=bad, what="beta even")
    return rep


def verify_congruence_family(family_id: str, **range_) -> Report:
    """Run one congruence family by name or by its theorem alias."""
    from .report import REGISTRY

    name = ALIASES.get(family_id, family_id)
    if name not in REGISTRY:
        raise KeyError(f"unknown verifier family {family_id!r}")
    fam = REGISTRY[name]
    kwargs = dict(fam.small)
    kwargs.update(range_)
    return fam.run(**kwargs)
