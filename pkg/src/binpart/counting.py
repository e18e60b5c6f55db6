"""Counting functions S_m(x), the auxiliary P/Q/R functions behind their
bounds, and the two-squares statistics of b(2n).

Everything that enters a bound is an exact ``Fraction``.  Inequalities with
log2 x are decided by comparing integer powers: y < log2 x iff 2^a < x^b for
y = a/b, so no floating point is involved.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from ._backend import kernels
from .partitions import b_stream
from .report import Report, register
from .sequences import ptm, ptm_bit
from .squares import has_special_rep, is_three_squares, r2

TABLE4 = {1: 2, 2: 3, 3: 6, 4: 8, 5: 14, 6: 21, 7: 37, 8: 64, 9: 106, 10: 174,
          11: 325, 12: 617, 13: 1089, 14: 2018, 15: 3699, 16: 6804, 17: 12551,
          18: 23624, 19: 44606, 20: 84176}
# s -> (l, first n) over n <= 2^20
TABLE5 = {4: (4, 0), 8: (13768, 4), 12: (2, 21), 16: (26411, 30), 24: (760, 431),
          32: (22889, 115), 40: (36, 2522), 48: (1400, 117), 56: (1, 27502),
          64: (11710, 482), 72: (9, 21880), 80: (46, 36642), 96: (1094, 309),
          112: (2, 84169), 128: (4130, 1036), 144: (9, 91925), 160: (24, 10785),
          192: (451, 3085), 224: (1, 793875), 240: (1, 647317), 256: (1005, 15113),
          288: (13, 28561), 320: (19, 113399), 384: (149, 24877), 512: (202, 11231),
          576: (5, 420383), 640: (2, 210415), 768: (23, 88529), 1024: (27, 202049),
          1152: (1, 938983), 1280: (1, 162157), 1536: (5, 379324), 2048: (2, 324442),
          2560: (1, 295411), 4096: (1, 105400)}
TABLE6 = {10: 1.67, 11: 1.74, 12: 1.80, 13: 1.73, 14: 1.72, 15: 1.7, 16: 1.66,
          17: 1.63, 18: 1.62, 19: 1.62, 20: 1.61}
TABLE6_TOLERANCE = 0.005
CENSUS = {"three_squares": 916, "x2y2z4": 831, "x2y4z4": 7}
DENSITY_TOLERANCE = 0.005


def _check_m(m: int) -> int:
    """Return k for m = 2^k - 1 (m = 1, 3 give k = 1, 2)."""
    k = (m + 1).bit_length() - 1
    if m < 1 or (1 << k) != m + 1:
        raise ValueError(f"closed forms exist only for m = 2^k - 1, got {m}")
    return k


def density(m: int) -> Fraction:
    return Fraction(1, 12) if _check_m(m) <= 2 else Fraction(1, 6)


def membership_array(m: int, x_max: int) -> np.ndarray:
    """Indicator of S_m on 0..x_max."""
    k = _check_m(m)
    if x_max < 0:
        return np.zeros(0, dtype=np.uint8)
    if k == 1:
        return np.asarray(kernels.chi_array(x_max // 2), dtype=np.uint8)[np.arange(x_max + 1) >> 1]
    if k == 2:
        return np.asarray(kernels.s3_member_array(x_max), dtype=np.uint8)
    return np.asarray(kernels.s2k_member_array(k, x_max), dtype=np.uint8)


def count_curve(m: int, x_max: int) -> np.ndarray:
    """S_m(x) for x = 0..x_max."""
    return np.cumsum(membership_array(m, x_max), dtype=np.int64)


def count_S(m: int, x: int) -> int:
    """#{n <= x : b_m(n) is not a sum of three squares}."""
    if x < 0:
        _check_m(m)
        return 0
    return int(count_curve(m, x)[-1])


# --- exact comparison with log2 -------------------------------------------------


def cmp_log2(y: Fraction, x: int) -> int:
    """Sign of y - log2(x) for x >= 1, exactly."""
    y = Fraction(y)
    lhs = Fraction(2) ** y.numerator
    rhs = Fraction(x) ** y.denominator
    return (lhs > rhs) - (lhs < rhs)


def floor_log2(n: int) -> int:
    return n.bit_length() - 1


# --- S_1: P, Q, R ------------------------------------------------------------------


def P1_direct(x: int) -> int:
    """#{s : 8s + 2t_s + 3 <= x}."""
    return sum(1 for s in range(max(x, 0) // 8 + 1) if 8 * s + 2 * ptm(s) + 3 <= x)


def P1(x: int) -> int:
    """Closed form: P(8m+i) = m + (0, T_m, T_m, T_m, T_m, 1, 1, 1)[i]."""
    if x < 0:
        return 0
    m, i = divmod(x, 8)
    return m + (0 if i == 0 else ptm_bit(m) if i <= 4 else 1)


def Q1(x: int) -> int:
    total = 0
    while x > 0:
        total += P1(x)
        x //= 4
    return total


def R1(x: int) -> Fraction:
    """Q(x) - x/6 evaluated directly."""
    return Q1(x) - Fraction(x, 6)


@lru_cache(maxsize=None)
def R1_rec(n: int) -> Fraction:
    """Q(n) - n/6 through the sixteen reduction identities; direct below 64."""
    if n < 64:
        return R1(n)
    q8, r8 = divmod(n, 8)
    if r8 == 0:
        return R1_rec(2 * q8)
    if r8 in (1, 2, 3):
        q16, r16 = divmod(n, 16)
        if r16 < 8:
            return R1_rec(4 * q16 + r16)
        return R1_rec(4 * q16) + {9: Fraction(1, 2), 10: Fraction(1, 3), 11: Fraction(1, 6)}[r16]
    if r8 == 4:
        return R1_rec(2 * q8 + 1) + ptm_bit(q8) - Fraction(1, 2)
    if r8 == 5:
        return R1_rec(2 * q8 + 1) + Fraction(1, 3)
    if r8 == 6:
        return R1_rec(2 * q8 + 1) + Fraction(1, 6)
    return R1_rec(2 * q8 + 1)


# the alternative identities for residues 4 mod 8
R1_IDENTITIES_8N4: list[tuple[int, int, Callable[[int], tuple[int, Fraction]]]] = [
    (64, 4, lambda n: (16 * n + 4, Fraction(0))),
    (64, 20, lambda n: (16 * n + 2, Fraction(1 - ptm_bit(n)))),
    (64, 36, lambda n: (16 * n, Fraction(1 - ptm_bit(n)))),
    (64, 52, lambda n: (16 * n + 4, Fraction(0))),
    (16, 12, lambda n: (4 * n, Fraction(0))),
]


# --- S_3: P, Q, R ------------------------------------------------------------------


def P3_part(i: int, x: int) -> int:
    """#{n : 8n + 2 floor(i/2) + 3 + 2 (-1)^i t_n <= x}."""
    sign = -1 if i & 1 else 1
    return sum(1 for n in range(max(x, 0) // 8 + 1) if 8 * n + 2 * (i // 2) + 3 + 2 * sign * ptm(n) <= x)


def P3(x: int) -> int:
    """Closed form ceil(x/2)."""
    return 0 if x < 0 else (x + 1) // 2


def Q3(x: int) -> int:
    total = 0
    while x > 0:
        total += P3(x)
        x //= 4
    return total


def R3(x: int) -> Fraction:
    return Q3(x) - Fraction(2 * x, 3)


def S3_from_parts(x: int) -> int:
    """sum_{k>=1} sum_i P_i((x - i) / (2 * 4^k))."""
    total = 0
    k = 1
    while (2 << (2 * k)) <= x:
        den = 2 << (2 * k)
        total += sum(P3_part(i, (x - i) // den) for i in range(4) if x >= i)
        k += 1
    return total


# --- S_{2^k-1}: P_eps, Q_eps, R_eps ------------------------------------------------------


def Peps_direct(eps: int, x: int) -> int:
    return sum(1 for m in range(1, max(x, 0) + 1) if ptm(m) == eps)


def Peps(eps: int, n: int) -> Fraction:
    """(n - eps)/2 + (eps/2) t_n for even n, (n - eps)/2 for odd n."""
    if n < 0:
        return Fraction(0)
    base = Fraction(n - eps, 2)
    return base + (Fraction(eps * ptm(n), 2) if n % 2 == 0 else 0)


def Qeps(eps: int, x: int) -> int:
    """#{1 <= m <= x : t_m = eps, nu2(m) even}, via the alternating sum."""
    total = 0
    s = 0
    while x >> s:
        total += (-1) ** s * int(Peps(eps, x >> s))
        s += 1
    return total


def Reps(eps: int, x: int) -> Fraction:
    return Qeps(eps, x) - Fraction(x, 3)


def S2k_from_Q(k: int, x: int) -> int:
    """2^(k-2) + sum_{l < 2^k} Q_{t_l}((x - l) / 2^(k+1)) for x >= 2^k - 1."""
    return (1 << (k - 2)) + sum(Qeps(ptm(l), (x - l) >> (k + 1)) for l in range(1 << k) if x >= l)


# --- bounds ------------------------------------------------------------------------


@dataclass(frozen=True)
class Bound:
    """c1 * log2 x + c0 as exact rationals."""

    c1: Fraction
    c0: Fraction

    def value(self, x: int) -> float:
        import math

        return float(self.c1) * math.log2(x) + float(self.c0)

    def below(self, d: Fraction, x: int, strict: bool) -> bool:
        """d < c1 log2 x + c0 (or <=), c1 != 0."""
        y = (d - self.c0) / self.c1
        c = cmp_log2(y, x)
        if self.c1 > 0:
            return c < 0 or (not strict and c == 0)
        return c > 0 or (not strict and c == 0)

    def above(self, d: Fraction, x: int, strict: bool) -> bool:
        """d > c1 log2 x + c0 (or >=)."""
        y = (d - self.c0) / self.c1
        c = cmp_log2(y, x)
        if self.c1 > 0:
            return c > 0 or (not strict and c == 0)
        return c < 0 or (not strict and c == 0)


def theorem_bounds(which: str, k: int | None = None):
    """(x_min, lower, lower_strict, upper, upper_strict) for S(x) - delta x.

    A lower bound given as a plain constant has c1 = 0 and is handled apart.
    """
    if which == "S1x":
        return 6, Fraction(-5, 3), True, Bound(Fraction(1, 2), Fraction(-19, 12)), True
    if which == "S3x":
        return 1, Bound(Fraction(-1, 6), Fraction(-7, 12)), True, Bound(Fraction(1, 6), Fraction(-1, 6)), False
    if which == "S2kx":
        if k is None or k < 3:
            raise ValueError("S2kx needs k >= 3")
        c = Fraction(1 << (k - 2), 3)
        return 1 << k, Bound(-c, -c * (26 - k)), False, Bound(c, c * (26 - k)), False
    raise ValueError(f"unknown theorem {which!r}")


def _selector(which: str, k: int | None) -> int:
    return {"S1x": 1, "S3x": 3}.get(which) or (1 << k) - 1


def bound_check(which: str, x_max: int, k: int | None = None) -> Report:
    """Check the two-sided bound at every integer x from the theorem's x_min to x_max."""
    rep = Report(f"bounds-{which}" + (f"-k{k}" if which == "S2kx" else ""), {"x_max": x_max, "k": k})
    m = _selector(which, k)
    delta = density(m)
    x_min, lower, lo_strict, upper, up_strict = theorem_bounds(which, k)
    curve = count_curve(m, x_max)
    violations: list[int] = []
    for x in range(x_min, x_max + 1):
        d = int(curve[x]) - delta * x
        if isinstance(lower, Fraction):
            lo_ok = d > lower if lo_strict else d >= lower
        else:
            lo_ok = lower.above(d, x, lo_strict)
        up_ok = upper.below(d, x, up_strict)
        if not (lo_ok and up_ok):
            rep.fail(x=x, count=int(curve[x]), deviation=str(d), side="lower" if not lo_ok else "upper")
            violations.append(x)
    if violations:
        shown = ", ".join(map(str, violations[:20]))
        rep.notes.append(f"{len(violations)} violating x: {shown}" + (" ..." if len(violations) > 20 else ""))
    return rep


# --- extremal sequences -----------------------------------------------------------


@dataclass
class ExtremalRow:
    l: int
    index: int
    measured: Fraction | None
    expected: Fraction | None


def _unroll(start: int, mul: int, add: int, l_max: int) -> list[int]:
    seq = [start]
    for _ in range(l_max):
        seq.append(mul * seq[-1] + add)
    return seq


DIRECT_COUNT_LIMIT = 2**22


def extremal_sequences(theorem: str, l_max: int, k: int = 3) -> dict[str, list[ExtremalRow]]:
    """Unroll the extremal sequences and measure S(x) - delta x along them.

    ``measured`` is None once the index exceeds the direct-count budget.
    ``expected`` is the exact value the proof asserts, where it asserts one.
    """
    out: dict[str, list[ExtremalRow]] = {}
    if theorem == "S1x":
        seq = _unroll(0, 16, 36, l_max)
        top = max((x for x in seq if x <= DIRECT_COUNT_LIMIT), default=0)
        curve = count_curve(1, top)
        out["m"] = [
            ExtremalRow(l, x, int(curve[x]) - Fraction(x, 12) if x <= top else None,
                        Fraction(2 * (l - 1)) if l >= 2 else None)
            for l, x in enumerate(seq)
        ]
        out["R(m)"] = [ExtremalRow(l, x, R1_rec(x), Fraction(l)) for l, x in enumerate(seq)]
        return out
    if theorem == "S3x":
        for name, add, sign in (("m", 8, 1), ("n", 16, -1)):
            seq = _unroll(0, 4, add, l_max)
            top = max((x for x in seq if x <= DIRECT_COUNT_LIMIT), default=0)
            curve = count_curve(3, top)
            out[name] = [ExtremalRow(l, x, int(curve[x]) - Fraction(x, 12) if x <= top else None, None)
                         for l, x in enumerate(seq)]
            out[f"R({name}/8)"] = [ExtremalRow(l, x, R3(x // 8), Fraction(sign * l, 3)) for l, x in enumerate(seq)]
        return out
    if theorem == "S2kx":
        unit = 1 << (k + 1)
        for name, add, sign in (("m", 5 * unit, 1), ("n", 10 * unit, -1)):
            seq = _unroll(0, 16, add, l_max)
            top = max((x for x in seq if x <= DIRECT_COUNT_LIMIT), default=0)
            curve = count_curve((1 << k) - 1, top)
            out[name] = [ExtremalRow(l, x, int(curve[x]) - Fraction(x, 6) if x <= top else None, None)
                         for l, x in enumerate(seq)]
            for eps in (1, -1):
                out[f"R{eps:+d}({name}/2^{k + 1})"] = [
                    ExtremalRow(l, x, Reps(eps, x >> (k + 1)), Fraction(sign * l, 3)) for l, x in enumerate(seq)
                ]
        return out
    raise ValueError(f"unknown theorem {theorem!r}")


# --- two squares ------------------------------------------------------------------


class Checkpoint:
    """JSON checkpoint {campaign-id, last-index, partial-rows} for long scans."""

    def __init__(self, directory: str | os.PathLike | None, campaign: str, every: int = 1000):
        self.path = Path(directory) / f"{campaign}.json" if directory is not None else None
        self.campaign = campaign
        self.every = every

    def load(self) -> tuple[int, list]:
        if self.path is None or not self.path.exists():
            return -1, []
        data = json.loads(self.path.read_text())
        if data.get("campaign-id") != self.campaign:
            return -1, []
        return int(data["last-index"]), list(data["partial-rows"])

    def save(self, last: int, rows: list) -> None:
        if self.path is None:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"campaign-id": self.campaign, "last-index": last, "partial-rows": rows}))
        tmp.replace(self.path)


def _scan(campaign: str, values: Callable[[int], int], fn: Callable[[int], object], n_max: int,
          checkpoint_dir=None, threads: int = 1) -> list:
    """fn(values(n)) for n = 0..n_max, in order, with resumable checkpoints."""
    ck = Checkpoint(checkpoint_dir, f"{campaign}-{n_max}")
    last, rows = ck.load()
    start = last + 1
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for lo in range(start, n_max + 1, ck.every):
            hi = min(lo + ck.every, n_max + 1)
            block = list(pool.map(lambda n: fn(values(n)), range(lo, hi)))
            rows.extend(block)
            ck.save(hi - 1, rows)
    return rows


def r2_of_b2n(n_max: int, checkpoint_dir=None, threads: int = 1) -> list[int]:
    """r2(b(2n)) for n = 0..n_max."""
    vals = b_stream(2 * n_max)
    return _scan("r2-b2n", lambda n: vals[2 * n], r2, n_max, checkpoint_dir, threads)


def two_squares_count(x: int, r2_values: list[int] | None = None) -> int:
    """#{1 <= n <= x : b(2n) is a sum of two squares}."""
    r = r2_values if r2_values is not None else r2_of_b2n(x)
    return sum(1 for n in range(1, x + 1) if r[n] > 0)


def table_T(n_max: int, r2_values: list[int] | None = None) -> list[tuple[int, int]]:
    """Rows (n, T(2^n)) for 1 <= n <= n_max."""
    r = r2_values if r2_values is not None else r2_of_b2n(1 << n_max)
    hits = np.cumsum([0] + [1 if r[n] > 0 else 0 for n in range(1, (1 << n_max) + 1)])
    return [(n, int(hits[1 << n])) for n in range(1, n_max + 1)]


def table_T_ratios(rows: Iterable[tuple[int, int]]) -> list[tuple[int, float]]:
    """(m, T(2^m) m / 2^m)."""
    return [(m, t * m / (1 << m)) for m, t in rows]


def r2_stats(x_max: int, r2_values: list[int] | None = None) -> list[tuple[int, int, int]]:
    """Rows (s, count, first n) for each nonzero r2(b(2n)), 0 <= n <= x_max."""
    r = r2_values if r2_values is not None else r2_of_b2n(x_max)
    stats: dict[int, list[int]] = {}
    for n in range(x_max + 1):
        s = r[n]
        if s == 0:
            continue
        if s not in stats:
            stats[s] = [0, n]
        stats[s][0] += 1
    return [(s, c, f) for s, (c, f) in sorted(stats.items())]


def representation_census(n_max: int = 1000, checkpoint_dir=None, threads: int = 1) -> dict[str, int]:
    """Counts over 1 <= n <= n_max of b(2n) = x^2+y^2+z^2, x^2+y^2+z^4, x^2+y^4+z^4."""
    vals = b_stream(2 * n_max)

    def classify(v: int) -> list[int]:
        if not is_three_squares(v):
            return [0, 0, 0]
        return [1, int(has_special_rep(v, "x2y2z4")), int(has_special_rep(v, "x2y4z4"))]

    rows = _scan("census", lambda n: vals[2 * n], classify, n_max, checkpoint_dir, threads)
    total = [sum(r[i] for r in rows[1:]) for i in range(3)]
    return {"three_squares": total[0], "x2y2z4": total[1], "x2y4z4": total[2]}


# --- figure data --------------------------------------------------------------------


@dataclass
class CountCurve:
    """Exact points (x, S(x) - delta x) and the theorem's bound curves."""

    which: str
    points: list[tuple[int, Fraction]]
    lower: list[float | None] = field(default_factory=list)
    upper: list[float | None] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "deviation", "lower_bound", "upper_bound"])
        for (x, d), lo, up in zip(self.points, self.lower, self.upper):
            w.writerow([x, str(d), "" if lo is None else f"{lo:.6f}", "" if up is None else f"{up:.6f}"])
        return buf.getvalue()


def figure_data(which: str = "S1", x_max: int = 1 << 10) -> CountCurve:
    if which not in ("S1", "S3"):
        raise ValueError("figure data exists for S1 and S3")
    m = 1 if which == "S1" else 3
    thm = "S1x" if which == "S1" else "S3x"
    x_min, lower, _, upper, _ = theorem_bounds(thm)
    curve = count_curve(m, x_max)
    out = CountCurve(which, [])
    for x in range(1, x_max + 1):
        out.points.append((x, int(curve[x]) - Fraction(x, 12)))
        if x < x_min:
            out.lower.append(None)
            out.upper.append(None)
            continue
        out.lower.append(float(lower) if isinstance(lower, Fraction) else lower.value(x))
        out.upper.append(upper.value(x))
    return out


# --- verifiers ---------------------------------------------------------------------

MODULE = "counting"


@register("count-predicates", MODULE, small={"max": 2 * 10**4})
def verify_count_predicates(max: int) -> Report:
    """Vectorised membership arrays against the scalar predicates."""
    from .characterizations import in_S1, in_S2k, in_S3

    rep = Report("count-predicates", {"max": max})
    for m, pred in ((1, in_S1), (3, in_S3), (7, lambda n: in_S2k(3, n)), (15, lambda n: in_S2k(4, n))):
        arr = membership_array(m, max)
        for n in range(max + 1):
            if bool(arr[n]) != pred(n).member:
                rep.fail(n=n, m=m, array=int(arr[n]))
                break
    return rep


@register("pqr-S1", MODULE, small={"max": 1 << 16, "direct_max": 10**4})
def verify_pqr_s1(max: int, direct_max: int) -> Report:
    """P closed form, S_1 = Q(x/4) + Q((x-1)/4), R by identities, R range."""
    rep = Report("pqr-S1", {"max": max, "direct_max": direct_max})
    s = np.arange(direct_max + 1)
    t = 1 - 2 * kernels.tm_bits(direct_max).astype(np.int64)
    direct = np.cumsum(np.bincount(8 * s + 2 * t + 3, minlength=8 * direct_max + 6))
    for x in range(8 * direct_max):
        if P1(x) != direct[x]:
            rep.fail(x=x, what="P closed form", closed=P1(x), direct=int(direct[x]))
            break
    for x in range(0, 1000, 7):
        if P1(x) != P1_direct(x):
            rep.fail(x=x, what="P closed form, scalar count", closed=P1(x), direct=P1_direct(x))
            break
    curve = count_curve(1, max)
    for x in range(1, max + 1):
        if int(curve[x]) != Q1(x // 4) + Q1((x - 1) // 4):
            rep.fail(x=x, what="S_1 = Q(x/4) + Q((x-1)/4)")
            break
    for n in range(max + 1):
        direct = R1(n)
        if R1_rec(n) != direct:
            rep.fail(n=n, what="R identities", recurrence=str(R1_rec(n)), direct=str(direct))
            break
        if n >= 2 and not (Fraction(-2, 3) <= direct <= Fraction(floor_log2(n) - 1, 4)):
            rep.fail(n=n, what="R range", R=str(direct))
            break
    for mod, res, f in R1_IDENTITIES_8N4:
        for n in range((max - res) // mod + 1):
            target, add = f(n)
            if R1(mod * n + res) != R1(target) + add:
                rep.fail(n=mod * n + res, what=f"R({mod}n+{res}) identity")
                break
    return rep


@register("pqr-S3", MODULE, small={"max": 1 << 16, "direct_max": 10**5})
def verify_pqr_s3(max: int, direct_max: int) -> Report:
    """P = ceil(n/2), R(4n+i) increments, R range, the sum over P_i and the sandwich."""
    rep = Report("pqr-S3", {"max": max, "direct_max": direct_max})
    parts = [np.zeros(direct_max + 1, dtype=np.int64) for _ in range(4)]
    t = 1 - 2 * kernels.tm_bits(direct_max // 8 + 1).astype(np.int64)
    for i in range(4):
        sign = -1 if i & 1 else 1
        thresholds = 8 * np.arange(len(t)) + 2 * (i // 2) + 3 + 2 * sign * t
        hist = np.bincount(thresholds[(thresholds >= 0) & (thresholds <= direct_max)], minlength=direct_max + 1)
        parts[i] = np.cumsum(hist)
    total = sum(parts)
    n = np.arange(direct_max + 1)
    bad = np.flatnonzero(total != (n + 1) // 2)
    if len(bad):
        rep.fail(n=int(bad[0]), what="P = ceil(n/2)", direct=int(total[bad[0]]))
    inc = {0: Fraction(0), 1: Fraction(1, 3), 2: Fraction(-1, 3), 3: Fraction(0)}
    for x in range(max + 1):
        q, i = divmod(x, 4)
        if R3(x) != R3(q) + inc[i]:
            rep.fail(n=x, what="R(4n+i) increment", i=i)
            break
        if x >= 1 and not (-Fraction(floor_log2(x) + 1, 6) <= R3(x) <= Fraction(floor_log2(x), 6) + Fraction(1, 3)):
            rep.fail(n=x, what="R range", R=str(R3(x)))
            break
    curve = count_curve(3, max)
    for x in range(max + 1):
        s = int(curve[x])
        if x <= 4096 and s != S3_from_parts(x):
            rep.fail(x=x, what="S_3 as sum over P_i", count=s, parts=S3_from_parts(x))
            break
        lo = Q3((x - 3) // 8) if x >= 3 else 0
        if not lo <= s <= Q3(x // 8):
            rep.fail(x=x, what="Q((x-3)/8) <= S_3(x) <= Q(x/8)", count=s)
            break
    return rep


@register("pqr-S2k", MODULE, small={"max": 1 << 16, "direct_max": 10**5, "ks": (3, 4)})
def verify_pqr_s2k(max: int, direct_max: int, ks=(3, 4)) -> Report:
    """P_eps closed form, Q_eps as a nu2-parity count, R_eps identities and range, S via Q."""
    rep = Report("pqr-S2k", {"max": max, "direct_max": direct_max, "k": list(ks)})
    size = direct_max if direct_max > max else max
    n = np.arange(size + 1, dtype=np.int64)
    t = 1 - 2 * kernels.tm_bits(size).astype(np.int64)
    even = np.zeros(size + 1, dtype=bool)
    even[1:] = (np.log2(n[1:] & -n[1:]).astype(np.int64) % 2) == 0
    q_count = {}
    for eps in (1, -1):
        direct_p = np.cumsum((t == eps) & (n >= 1))
        closed_2p = n - eps + np.where(n % 2 == 0, eps * t, 0)  # twice the closed form
        bad = _first_bad_index(closed_2p[: direct_max + 1] != 2 * direct_p[: direct_max + 1])
        if bad is not None:
            rep.fail(n=bad, eps=eps, what="P_eps closed form")
        for x in range(0, 2000, 7):
            if Peps(eps, x) != Peps_direct(eps, x):
                rep.fail(n=x, eps=eps, what="P_eps closed form, scalar count")
                break
        q_count[eps] = np.cumsum((t == eps) & even & (n >= 1))
        for x in range(0, direct_max + 1, 101):
            if Qeps(eps, x) != q_count[eps][x]:
                rep.fail(n=x, eps=eps, what="Q_eps alternating sum vs count")
                break
        # 3 R_eps(x) = 3 Q_eps(x) - x, an integer
        r3 = 3 * q_count[eps][: max + 1] - n[: max + 1]
        rel = [(4, 0, 1, 0, 0), (8, 1, 2, 1, 0), (16, 5, 1, 0, 1), (16, 13, 4, 1, 0),
               (16, 2, 4, 2, 0), (8, 6, 2, 0, 0), (16, 10, 1, 0, -1), (4, 3, 1, 0, 0)]
        for mod, res, mul, off, third in rel:
            q = np.arange((max - res) // mod + 1)
            bad = _first_bad_index(r3[mod * q + res] != r3[mul * q + off] + third)
            if bad is not None:
                rep.fail(n=mod * bad + res, eps=eps, what=f"R_eps({mod}n+{res})")
        # |R| <= floor(log2 x)/12 + 2/3  <=>  4 |3R| <= floor(log2 x) + 8
        x = n[1: max + 1]
        bad = _first_bad_index(4 * np.abs(r3[1:]) > np.log2(x).astype(np.int64) + 8)
        if bad is not None:
            rep.fail(n=bad + 1, eps=eps, what="R_eps range", R=str(Fraction(int(r3[bad + 1]), 3)))
        for xs in range(1, max + 1, 499):
            if Reps(eps, xs) != Fraction(int(r3[xs]), 3):
                rep.fail(n=xs, eps=eps, what="R_eps exact vs array")
                break
    for k in ks:
        top = 1 << k
        curve = count_curve(top - 1, max)
        if int(curve[top - 1]) != 1 << (k - 2):
            rep.fail(x=top - 1, k=k, what="S(2^k - 1) = 2^(k-2)")
        x = np.arange(top - 1, max + 1)
        formula = np.full(len(x), 1 << (k - 2), dtype=np.int64)
        for l in range(top):
            formula += q_count[ptm(l)][(x - l) >> (k + 1)]
        bad = _first_bad_index(formula != curve[top - 1:])
        if bad is not None:
            rep.fail(x=int(x[bad]), k=k, what="S via Q_eps", count=int(curve[x[bad]]), formula=int(formula[bad]))
        q = x >> (k + 1)
        approx = (1 << (k - 1)) * (q_count[1][q] + q_count[-1][q])
        bad = _first_bad_index(np.abs(curve[top - 1:] - approx) > 5 * (1 << (k - 2)))
        if bad is not None:
            rep.fail(x=int(x[bad]), k=k, what="|S - 2^(k-1)(Q_1 + Q_-1)| <= 5*2^(k-2)")
        for xs in range(top - 1, min(max, 4096) + 1, 37):
            if int(curve[xs]) != S2k_from_Q(k, xs):
                rep.fail(x=xs, k=k, what="S via Q_eps, scalar")
                break
    return rep


def _first_bad_index(mask) -> int | None:
    bad = np.flatnonzero(mask)
    return int(bad[0]) if len(bad) else None


@register("bounds-S1x", MODULE, small={"x_max": 1 << 16}, full={"x_max": 1 << 20})
def verify_bounds_s1(x_max: int) -> Report:
    return bound_check("S1x", x_max)


@register("bounds-S3x", MODULE, small={"x_max": 1 << 16}, full={"x_max": 1 << 20})
def verify_bounds_s3(x_max: int) -> Report:
    return bound_check("S3x", x_max)


@register("bounds-S2kx", MODULE, small={"x_max": 1 << 16, "ks": (3, 4)}, full={"x_max": 1 << 20, "ks": (3, 4, 5)})
def verify_bounds_s2k(x_max: int, ks=(3, 4)) -> Report:
    out = Report("bounds-S2kx", {"x_max": x_max, "k": list(ks)})
    for k in ks:
        rep = bound_check("S2kx", x_max, k)
        if rep.counterexample is not None:
            out.fail(k=k, **rep.counterexample)
    return out


@register("extremal", MODULE, small={"l_max": 4})
def verify_extremal(l_max: int) -> Report:
    """Exact relations along the extremal sequences; the m_0/m_1 base case goes to notes."""
    rep = Report("extremal", {"l_max": l_max})
    s1 = extremal_sequences("S1x", l_max)
    for row in s1["R(m)"]:
        if row.measured != row.expected:
            rep.fail(index=row.l, sequence="S1 R(m_l) = l", value=str(row.measured))
    for row in s1["m"]:
        if row.expected is not None and row.measured is not None and row.measured != row.expected:
            rep.fail(index=row.l, sequence="S1(m_l) - m_l/12 = 2(l-1)", m=row.index, value=str(row.measured))
    base = [count_S(1, s1["m"][0].index), count_S(1, s1["m"][1].index)]
    if base != [0, 0]:
        rep.notes.append(f"S_1(m_0) = {base[0]}, S_1(m_1) = S_1(36) = {base[1]}; the claimed base values 0, 0 do not hold")
    s3 = extremal_sequences("S3x", l_max)
    for name in ("R(m/8)", "R(n/8)"):
        for row in s3[name]:
            if row.measured != row.expected:
                rep.fail(index=row.l, sequence=f"S3 {name}", value=str(row.measured))
    for k in (3, 4):
        s2k = extremal_sequences("S2kx", l_max, k)
        for name, rows in s2k.items():
            if not name.startswith("R"):
                continue
            for row in rows:
                if row.measured != row.expected:
                    rep.fail(index=row.l, sequence=f"k={k} {name}", value=str(row.measured))
    return rep


@register("density", MODULE, small={"x": 1 << 20})
def verify_density(x: int) -> Report:
    """|S(x)/x - delta| < 0.005 at x for m = 1, 3, 7."""
    rep = Report("density", {"x": x, "tolerance": DENSITY_TOLERANCE})
    for m in (1, 3, 7):
        ratio = count_S(m, x) / x
        rep.notes.append(f"m={m}: S(x)/x = {ratio:.6f}")
        if abs(ratio - float(density(m))) >= DENSITY_TOLERANCE:
            rep.fail(m=m, ratio=ratio, delta=str(density(m)))
    return rep


@register("u-partition", MODULE, small={"max": 1 << 20})
def verify_u_partition(max: int) -> Report:
    """The sets U_k = {2^(2k+1)(8s+2t_s+3)} are disjoint with union S_1' on [0, max]."""
    rep = Report("u-partition", {"max": max})
    seen = np.zeros(max + 1, dtype=np.int64)
    k = 0
    while (1 << (2 * k + 1)) * 3 <= max + 8:
        s_max = (max >> (2 * k + 1)) // 8 + 1
        s = np.arange(s_max + 1)
        t = 1 - 2 * kernels.tm_bits(s_max).astype(np.int64)
        vals = (8 * s + 2 * t + 3) << (2 * k + 1)
        vals = vals[vals <= max]
        np.add.at(seen, vals, 1)
        k += 1
    bad = np.flatnonzero(seen > 1)
    if len(bad):
        rep.fail(n=int(bad[0]), what="overlap")
    chi = np.asarray(kernels.chi_array(max), dtype=np.int64)
    bad = np.flatnonzero(seen != chi)
    if len(bad):
        rep.fail(n=int(bad[0]), what="union differs from chi", union=int(seen[bad[0]]), chi=int(chi[bad[0]]))
    return rep


@register("table4", MODULE, small={"n_max": 12}, full={"n_max": 14})
def verify_table4(n_max: int) -> Report:
    """T(2^n) for 1 <= n <= n_max against the reference counts."""
    rep = Report("table4", {"n_max": n_max})
    for n, got in table_T(n_max):
        if got != TABLE4[n]:
            rep.fail(n=n, got=got, expected=TABLE4[n])
    return rep


@register("table5", MODULE, small={"n_max": 12}, full={"n_max": 14})
def verify_table5(n_max: int) -> Report:
    """First index of each r2 value, for reference rows with first index <= 2^n_max."""
    rep = Report("table5", {"n_max": n_max})
    x = 1 << n_max
    first = {s: f for s, _, f in r2_stats(x)}
    for s, (_, n_i) in sorted(TABLE5.items()):
        if n_i > x:
            continue
        if first.get(s) != n_i:
            rep.fail(index=n_i, s=s, got=first.get(s), expected=n_i)
    extra = sorted(set(first) - set(TABLE5))
    if extra:
        rep.fail(index=min(first[s] for s in extra), what="value missing from table", s=extra)
    return rep


@register("census", MODULE, small=None, full={"n_max": 1000})
def verify_census(n_max: int) -> Report:
    """Counts of b(2n), n <= 1000, as sums of three squares and the two special shapes."""
    rep = Report("census", {"n_max": n_max})
    got = representation_census(n_max)
    rep.notes.append(json.dumps(got, sort_keys=True))
    for key, want in CENSUS.items():
        if got[key] != want:
            rep.fail(index=0, shape=key, got=got[key], expected=want)
    return rep
