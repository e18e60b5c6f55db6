"""Automata with output, k-kernels and integer relation guessing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Any, Callable, Sequence

import numpy as np

from .report import Report, register
from .sequences import ptm

MAX_ROWS = 512
MAX_COLUMNS = 4096


@dataclass(frozen=True)
class Dfao:
    """Deterministic finite automaton with output over base-k digits."""

    states: tuple[str, ...]
    initial: str
    transitions: dict[str, tuple[str, ...]]  # state -> next state for digit 0..k-1
    outputs: dict[str, Any]
    base: int = 2

    def __post_init__(self):
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        for s in self.states:
            row = self.transitions.get(s)
            if row is None or len(row) != self.base:
                raise ValueError(f"transition from {s!r} is not total")
            for t in row:
                if t not in self.states:
                    raise ValueError(f"transition from {s!r} leads to unknown state {t!r}")
            if s not in self.outputs:
                raise ValueError(f"state {s!r} has no output")

    def to_json(self) -> str:
        return json.dumps({
            "states": list(self.states),
            "initial": self.initial,
            "transitions": {s: list(self.transitions[s]) for s in self.states},
            "outputs": {s: self.outputs[s] for s in self.states},
            "base": self.base,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Dfao":
        data = json.loads(text)
        return cls(
            states=tuple(data["states"]),
            initial=data["initial"],
            transitions={s: tuple(v) for s, v in data["transitions"].items()},
            outputs=dict(data["outputs"]),
            base=int(data.get("base", 2)),
        )


def digits(n: int, base: int = 2) -> list[int]:
    """Canonical base-k digits of n, most significant first; [] for 0."""
    if n < 0:
        raise ValueError("automata read non-negative integers")
    out = []
    while n:
        n, d = divmod(n, base)
        out.append(d)
    return out[::-1]


def run_dfao(d: Dfao, n: int, order: str = "msb") -> Any:
    """Output after feeding the digits of n in ``order`` ("msb" or "lsb")."""
    word = digits(n, d.base)
    if order == "lsb":
        word.reverse()
    elif order != "msb":
        raise ValueError(f"order must be 'msb' or 'lsb', got {order!r}")
    state = d.initial
    for digit in word:
        state = d.transitions[state][digit]
    return d.outputs[state]


def ptm_dfao() -> Dfao:
    return Dfao(
        states=("even", "odd"),
        initial="even",
        transitions={"even": ("even", "odd"), "odd": ("odd", "even")},
        outputs={"even": 1, "odd": -1},
    )


def chi_dfao() -> Dfao:
    """Six-state automaton for chi; q5 is the only state with output 1."""
    return Dfao(
        states=("q0", "q1", "q2", "q3", "q4", "q5"),
        initial="q0",
        transitions={
            "q0": ("q1", "q2"),
            "q1": ("q0", "q3"),
            "q2": ("q2", "q2"),
            "q3": ("q4", "q2"),
            "q4": ("q4", "q5"),
            "q5": ("q5", "q4"),
        },
        outputs={"q0": 0, "q1": 0, "q2": 0, "q3": 0, "q4": 0, "q5": 1},
    )


@dataclass
class Calibration:
    order: str | None
    mismatches: dict[str, list[int]]


def calibrate_order(d: Dfao, oracle: Callable[[int], Any], n_max: int = 1 << 12) -> Calibration:
    """Try both digit orders against ``oracle`` on 0..n_max.

    ``order`` is the one that matches everywhere (msb preferred when both do),
    or None; ``mismatches`` lists the first disagreements of each order.
    """
    mismatches = {}
    for order in ("msb", "lsb"):
        mismatches[order] = [n for n in range(n_max + 1) if run_dfao(d, n, order) != oracle(n)][:32]
    chosen = next((o for o in ("msb", "lsb") if not mismatches[o]), None)
    return Calibration(chosen, mismatches)


# --- kernels --------------------------------------------------------------------


def _accessor(seq) -> Callable[[int], Any]:
    if callable(seq):
        return seq
    return lambda n: seq[n]


@dataclass
class KernelMember:
    values: tuple
    origins: list[tuple[int, int]]  # (j, i): n -> a(k^j n + i)

    @property
    def origin(self) -> tuple[int, int]:
        return self.origins[0]


@dataclass
class KernelFamily:
    """Distinct truncations of n -> a(k^j n + i), j <= depth, i < k^j."""

    k: int
    length: int
    depth: int
    members: list[KernelMember]
    new_per_level: list[int]
    accessor: Callable[[int], Any] | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def closed(self) -> bool:
        """True when the deepest level brought no new member."""
        return self.depth > 0 and self.new_per_level[-1] == 0

    def to_json(self) -> str:
        return json.dumps({
            "k": self.k, "length": self.length, "depth": self.depth,
            "members": len(self.members), "new_per_level": self.new_per_level,
            "origins": [[list(o) for o in m.origins] for m in self.members],
        }, sort_keys=True)


def kernel(seq, k: int = 2, length: int = 64, depth: int = 6) -> KernelFamily:
    """Empirical k-kernel: needs the sequence on [0, k^depth * length)."""
    a = _accessor(seq)
    table: dict[tuple, KernelMember] = {}
    order: list[KernelMember] = []
    new_per_level = []
    for j in range(depth + 1):
        step = k**j
        added = 0
        for i in range(step):
            vals = tuple(_plain(a(step * n + i)) for n in range(length))
            member = table.get(vals)
            if member is None:
                member = KernelMember(vals, [])
                table[vals] = member
                order.append(member)
                added += 1
            member.origins.append((j, i))
        new_per_level.append(added)
    return KernelFamily(k, length, depth, order, new_per_level, a)


def _plain(v):
    return v.item() if hasattr(v, "item") else v


# --- relation guessing -------------------------------------------------------------


@dataclass(frozen=True)
class Relation:
    """sum of coeff * a(k^j n + i) = 0 for all n."""

    terms: tuple[tuple[int, tuple[int, int]], ...]
    k: int = 2

    def __str__(self) -> str:
        parts = []
        for c, (j, i) in self.terms:
            arg = "n" if j == 0 else f"{self.k ** j}n"
            if i:
                arg += f"+{i}"
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {mag}a({arg})")
        text = " ".join(parts)
        return (text[2:] if text.startswith("+ ") else "-" + text[2:]) + " = 0"

    def holds(self, a: Callable[[int], Any], length: int) -> bool:
        return all(
            sum(c * _plain(a(self.k**j * n + i)) for c, (j, i) in self.terms) == 0
            for n in range(length)
        )


def nullspace(rows: Sequence[Sequence[int]], n_cols: int) -> list[list[Fraction]]:
    """Exact basis of {c : M c = 0} by reduced row echelon form over Q."""
    m = [[Fraction(v) for v in row] for row in rows]
    pivots: list[int] = []
    r = 0
    for col in range(n_cols):
        pr = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][col]
        m[r] = [v / piv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n_cols
        vec[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            vec[pc] = -m[row_idx][fc]
        basis.append(vec)
    return basis


def _integral(vec: list[Fraction]) -> list[int]:
    den = lcm(*(v.denominator for v in vec))
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints] if g else ints
    first = next((v for v in ints if v), 1)
    return [-v for v in ints] if first < 0 else ints


@dataclass
class RelationSearch:
    relations: list[Relation]
    rejected: int

    @property
    def found(self) -> bool:
        return bool(self.relations)


def guess_relations(family: KernelFamily, validate_length: int | None = None) -> RelationSearch:
    """Integer relations among kernel members, checked again on a 2L prefix.

    Members that coincide give alias relations a(k^j n + i) - a(k^j' n + i') = 0;
    the rest come from the exact null space of the truncation matrix.
    """
    if not family.members:
        raise ValueError("empty kernel family")
    if len(family.members) > MAX_COLUMNS:
        raise ValueError(f"{len(family.members)} kernel members exceed the {MAX_COLUMNS}-column cap")
    validate_length = validate_length or 2 * family.length
    a = family.accessor
    candidates: list[Relation] = []
    for member in family.members:
        first = member.origin
        for other in member.origins[1:]:
            candidates.append(Relation(((1, other), (-1, first)), family.k))
    n_rows = min(family.length, MAX_ROWS)
    rows = [[m.values[n] for m in family.members] for n in range(n_rows)]
    for vec in nullspace(rows, len(family.members)):
        coeffs = _integral(vec)
        terms = tuple((c, family.members[idx].origin) for idx, c in enumerate(coeffs) if c)
        candidates.append(Relation(terms, family.k))
    kept, rejected = [], 0
    for rel in candidates:
        if a is None or rel.holds(a, validate_length):
            kept.append(rel)
        else:
            rejected += 1
    return RelationSearch(kept, rejected)


# --- verifiers -----------------------------------------------------------------------

MODULE = "dfao"


@register("dfao-ptm", MODULE, small={"max": 10**5})
def verify_dfao_ptm(max: int) -> Report:
    rep = Report("dfao-ptm", {"max": max})
    d = ptm_dfao()
    for n in range(max + 1):
        msb, lsb = run_dfao(d, n, "msb"), run_dfao(d, n, "lsb")
        if not msb == lsb == ptm(n):
            rep.fail(n=n, msb=msb, lsb=lsb, ptm=ptm(n))
            break
    return rep


@register("dfao-chi", MODULE, small={"max": 1 << 18, "calibrate_max": 1 << 12})
def verify_dfao_chi(max: int, calibrate_max: int) -> Report:
    """Calibrate the digit order on a prefix, then compare with chi on 0..max."""
    from .characterizations import s1_prime_array

    rep = Report("dfao-chi", {"max": max, "calibrate_max": calibrate_max})
    d = chi_dfao()
    ref = s1_prime_array(max)
    cal = calibrate_order(d, lambda n: int(ref[n]), calibrate_max)
    if cal.order is None:
        rep.fail(n=min(min(v) for v in cal.mismatches.values() if v), what="no digit order matches",
                 mismatches=cal.mismatches)
        return rep
    rep.notes.append(f"digit order: {cal.order}")
    for n in range(max + 1):
        if run_dfao(d, n, cal.order) != ref[n]:
            rep.fail(n=n, dfao=run_dfao(d, n, cal.order), chi=int(ref[n]))
            break
    return rep


@register("kernel-ptm", MODULE, small={"length": 64, "depth": 6})
def verify_kernel_ptm(length: int, depth: int) -> Report:
    rep = Report("kernel-ptm", {"length": length, "depth": depth})
    fam = kernel(ptm, 2, length, depth)
    if len(fam) != 2:
        rep.fail(index=0, members=len(fam))
    rels = {str(r) for r in guess_relations(fam).relations}
    if "a(2n) - a(n) = 0" not in rels:
        rep.fail(index=1, what="a(2n) = a(n) not recovered")
    return rep


@register("kernel-chi", MODULE, small={"length": 256, "depth": 8})
def verify_kernel_chi(length: int, depth: int) -> Report:
    from .characterizations import s1_prime_array

    rep = Report("kernel-chi", {"length": length, "depth": depth})
    seq = s1_prime_array(2 * length * 2**depth)
    fam = kernel(seq, 2, length, depth)
    rep.notes.append(f"{len(fam)} members, new per level {fam.new_per_level}")
    if len(fam) > 6:
        rep.fail(index=0, members=len(fam))
    rels = {str(r) for r in guess_relations(fam).relations}
    if "a(4n) - a(n) = 0" not in rels:
        rep.fail(index=1, what="chi(4n) = chi(n) not recovered")
    return rep


@register("kernel-b-mod", MODULE, small={"length": 1024, "depth": 8, "p_max": 5})
def verify_kernel_b_mod(length: int, depth: int, p_max: int) -> Report:
    """b(n) mod 2^p has a kernel that closes by the given depth."""
    from .partitions import bm_mod_stream

    rep = Report("kernel-b-mod", {"length": length, "depth": depth, "p_max": p_max})
    res = bm_mod_stream(1, length << depth, p_max).values.astype(np.int64)
    for p in range(1, p_max + 1):
        seq = res & ((1 << p) - 1)
        fam = kernel(seq, 2, length, depth)
        rep.notes.append(f"p={p}: {len(fam)} members, new per level {fam.new_per_level}")
        if not fam.closed:
            rep.fail(index=p, p=p, members=len(fam), new_per_level=fam.new_per_level)
    return rep


@register("relations-f", MODULE, small={"length": 512, "depth": 4})
def verify_relations_f(length: int, depth: int) -> Report:
    """No integer relations among kernel members of (f_n) at this size (evidence only)."""
    from .characterizations import f_and_gaps

    rep = Report("relations-f", {"length": length, "depth": depth})
    need = 2 * length * 2**depth + 1
    f = [g.f for g in f_and_gaps(need)]
    fam = kernel(f, 2, length, depth)
    search = guess_relations(fam)
    rep.notes.append(f"{len(fam)} members; {len(search.relations)} relations survive validation, "
                     f"{search.rejected} rejected; absence at one size is evidence, not proof")
    if search.found:
        rep.fail(index=0, relations=[str(r) for r in search.relations])
    return rep
