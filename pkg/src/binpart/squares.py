"""Sums of two and three squares, factorization, explicit representations."""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

import numpy as np

from . import _fallback
from ._backend import kernels

TRIAL_DIVISION_BOUND = 10**5
RHO_BUDGET = 2**24
DEFAULT_SEED = 0


class FactorizationError(RuntimeError):
    """A composite cofactor resisted splitting within the iteration budget."""

    def __init__(self, cofactor: int, budget: int):
        super().__init__(
            f"could not split composite {cofactor} within {budget} rho steps; "
            "raise the budget or change the seed"
        )
        self.cofactor = cofactor
        self.budget = budget


class SearchBudgetExceeded(RuntimeError):
    """Representation search stopped early; says nothing about representability."""


def _sieve(limit: int) -> list[int]:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.flatnonzero(flags).tolist()


_SMALL_PRIMES = _sieve(TRIAL_DIVISION_BOUND)
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# the bases above decide primality for every n below this bound
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981


def is_probable_prime(n: int, rounds: int = 20, seed: int = DEFAULT_SEED) -> bool:
    """Miller-Rabin with fixed small bases, plus ``rounds`` seeded random bases
    once n is too large for the fixed bases to be conclusive."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def witness(a: int) -> bool:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            return False
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                return False
        return True

    if any(witness(a) for a in _MR_BASES):
        return False
    if n < _MR_DETERMINISTIC_LIMIT:
        return True
    rng = random.Random(seed)
    return not any(witness(rng.randrange(2, n - 1)) for _ in range(rounds))


def _brent_split(n: int, rng: random.Random, budget: int) -> int | None:
    """One nontrivial factor of composite odd n, or None when the budget runs out."""
    use_kernel = kernels.RHO_MAX_BITS is None or n.bit_length() <= kernels.RHO_MAX_BITS
    rho = kernels.rho_brent if use_kernel else _fallback.rho_brent
    spent = 0
    while spent < budget:
        y, c = rng.randrange(1, n), rng.randrange(1, n)
        d, used = rho(n, y, c, budget - spent)
        spent += max(used, 1)
        if d:
            return d
    return None


@lru_cache(maxsize=1 << 16)
def _factor_cached(n: int, seed: int, budget: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(_factor(n, seed, budget).items()))


def _factor(n: int, seed: int, budget: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n == 1:
        return out
    rng = random.Random(seed)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if m < TRIAL_DIVISION_BOUND**2 or is_probable_prime(m, seed=seed):
            out[m] = out.get(m, 0) + 1
            continue
        r = isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _brent_split(m, rng, budget)
        if d is None:
            raise FactorizationError(m, budget)
        stack += [d, m // d]
    return out


def factorize(n: int, seed: int = DEFAULT_SEED, budget: int = RHO_BUDGET,
              cache: bool = True) -> dict[int, int]:
    """Prime factorization {prime: exponent} of n >= 1, sorted by prime.

    Trial division below 10^5, then Miller-Rabin and Brent's variant of
    Pollard rho. Deterministic for a fixed seed. The cache only memoizes;
    results are identical with ``cache=False``.
    """
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    if cache:
        return dict(_factor_cached(n, seed, budget))
    return dict(sorted(_factor(n, seed, budget).items()))


def strip4(n: int) -> tuple[int, int]:
    """(r, core) with n = 4^r * core and 4 not dividing core."""
    if n < 1:
        raise ValueError("strip4 needs n >= 1")
    r = ((n & -n).bit_length() - 1) // 2
    return r, n >> (2 * r)


def is_three_squares(n: int) -> bool:
    """Legendre: n is x^2 + y^2 + z^2 unless n = 4^r (8s + 7)."""
    if n == 0:
        return True
    return strip4(n)[1] % 8 != 7


def is_two_squares(n: int, seed: int = DEFAULT_SEED, budget: int = RHO_BUDGET) -> bool:
    """Fermat: every prime 3 mod 4 must occur to an even power."""
    if n < 0:
        raise ValueError("negative input")
    if n == 0:
        return True
    odd = n >> ((n & -n).bit_length() - 1)
    if odd % 4 == 3:
        return False
    return all(e % 2 == 0 for p, e in factorize(odd, seed, budget).items() if p % 4 == 3)


def r2(n: int, seed: int = DEFAULT_SEED, budget: int = RHO_BUDGET) -> int:
    """Number of ordered signed pairs (x, y) with x^2 + y^2 = n, for n >= 1.

    Equals 4 times the sum over odd divisors d of (-1)^((d-1)/2).
    """
    if n < 1:
        raise ValueError("r2 needs n >= 1")
    count = 4
    for p, e in factorize(n, seed, budget).items():
        if p % 4 == 1:
            count *= e + 1
        elif p % 4 == 3 and e % 2:
            return 0
    return count


def _sqrt_minus_one(p: int) -> int:
    """Square root of -1 mod a prime p = 1 mod 4."""
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return pow(c, (p - 1) // 4, p)
    raise ValueError(f"{p} is not a prime congruent to 1 mod 4")


def prime_two_squares(p: int) -> tuple[int, int]:
    """(a, b) with a^2 + b^2 = p for p = 2 or a prime p = 1 mod 4 (Cornacchia)."""
    if p == 2:
        return 1, 1
    a, b = p, _sqrt_minus_one(p)
    limit = isqrt(p)
    while b > limit:
        a, b = b, a % b
    c = isqrt(p - b * b)
    if b * b + c * c != p:
        raise ValueError(f"{p} is not a prime congruent to 1 mod 4")
    return b, c


def two_square_rep(n: int, seed: int = DEFAULT_SEED, budget: int = RHO_BUDGET) -> tuple[int, int] | None:
    """Some (x, y) with x <= y and x^2 + y^2 = n, or None if there is none."""
    if n == 0:
        return 0, 0
    re, im = 1, 0
    for p, e in factorize(n, seed, budget).items():
        if p % 4 == 3:
            if e % 2:
                return None
            re, im = re * p ** (e // 2), im * p ** (e // 2)
            continue
        a, c = prime_two_squares(p)
        for _ in range(e):
            re, im = re * a - im * c, re * c + im * a
    x, y = sorted((abs(re), abs(im)))
    return x, y


@dataclass(frozen=True)
class Rep3:
    x: int
    y: int
    z: int

    def __post_init__(self):
        if not self.x <= self.y <= self.z:
            raise ValueError("components must satisfy x <= y <= z")

    @property
    def value(self) -> int:
        return self.x ** 2 + self.y ** 2 + self.z ** 2


def find_three_square_rep(n: int, budget: int = 10**5, seed: int = DEFAULT_SEED) -> Rep3 | None:
    """Explicit x^2 + y^2 + z^2 = n, trying the largest z first.

    Returns None when n is not a sum of three squares. Raises
    ``SearchBudgetExceeded`` when ``budget`` values of z were tried without
    success.
    """
    if n < 0:
        raise ValueError("negative input")
    if not is_three_squares(n):
        return None
    z = isqrt(n)
    for _ in range(budget):
        if z < 0:
            break
        rest = n - z * z
        if is_two_squares(rest, seed):
            x, y = two_square_rep(rest, seed)
            return Rep3(*sorted((x, y, z)))
        z -= 1
    raise SearchBudgetExceeded(f"no decomposition of {n} after {budget} values of z")


def _is_square(n: int) -> bool:
    r = isqrt(n)
    return r * r == n


def _fourth_root(n: int) -> int:
    return isqrt(isqrt(n))


def _square_plus_two_fourths_small(n: int) -> bool:
    # vectorised over z for n < 2^52, where float sqrt is exact enough to round
    top = _fourth_root(n)
    for y in range(top + 1):
        rest = n - y ** 4
        if rest < 0:
            break
        zs = np.arange(y, _fourth_root(rest) + 1, dtype=np.int64)
        if not len(zs):
            continue
        m = rest - zs ** 4
        s = np.floor(np.sqrt(m.astype(np.float64))).astype(np.int64)
        if np.any((s * s == m) | ((s + 1) * (s + 1) == m) | ((s - 1) * (s - 1) == m)):
            return True
    return False


def has_special_rep(n: int, shape: str, seed: int = DEFAULT_SEED) -> bool:
    """Does n admit x^2 + y^2 + z^4 (``"x2y2z4"``) or x^2 + y^4 + z^4 (``"x2y4z4"``)
    with non-negative integers?"""
    if n < 0:
        raise ValueError("negative input")
    if shape == "x2y2z4":
        z = 0
        while z ** 4 <= n:
            if is_two_squares(n - z ** 4, seed):
                return True
            z += 1
        return False
    if shape == "x2y4z4":
        if n < 2**52:
            return _square_plus_two_fourths_small(n)
        y = 0
        while 2 * y ** 4 <= n:
            z = y
            while y ** 4 + z ** 4 <= n:
                if _is_square(n - y ** 4 - z ** 4):
                    return True
                z += 1
            y += 1
        return False
    raise ValueError(f"unknown shape {shape!r}; expected 'x2y2z4' or 'x2y4z4'")


count_special_reps = has_special_rep


# --- verifiers -----------------------------------------------------------------------

from .report import Report, register  # noqa: E402

MODULE = "squares"


def _pair_counts(n_max: int) -> np.ndarray:
    """Number of signed ordered pairs (x, y) with x^2 + y^2 = N, for N <= n_max."""
    r = isqrt(n_max)
    xs = np.arange(-r, r + 1, dtype=np.int64) ** 2
    s = (xs[:, None] + xs[None, :]).ravel()
    return np.bincount(s[s <= n_max], minlength=n_max + 1)


@register("legendre", MODULE, small={"max": 10**4})
def verify_legendre(max: int) -> Report:
    rep = Report("legendre", {"max": max})
    r = isqrt(max)
    sq = np.arange(r + 1, dtype=np.int64) ** 2
    two = np.unique((sq[:, None] + sq[None, :]).ravel())
    three = np.zeros(max + 1, dtype=bool)
    for z2 in sq:
        t = two + z2
        three[t[t <= max]] = True
    for n in range(max + 1):
        if is_three_squares(n) != three[n]:
            rep.fail(n=n, legendre=is_three_squares(n), exhaustive=bool(three[n]))
            break
    return rep


@register("two-squares", MODULE, small={"max": 10**4})
def verify_two_squares(max: int) -> Report:
    rep = Report("two-squares", {"max": max})
    pairs = _pair_counts(max)
    for n in range(max + 1):
        if is_two_squares(n) != (pairs[n] > 0):
            rep.fail(n=n, fermat=is_two_squares(n), exhaustive=int(pairs[n]))
            break
    return rep


@register("r2", MODULE, small={"max": 10**4})
def verify_r2(max: int) -> Report:
    rep = Report("r2", {"max": max})
    pairs = _pair_counts(max)
    for n in range(1, max + 1):
        if r2(n) != pairs[n]:
            rep.fail(n=n, r2=r2(n), exhaustive=int(pairs[n]))
            break
    return rep


@register("factorize", MODULE, small={"count": 50, "bits": 128, "seed": 0},
          full={"count": 1000, "bits": 128, "seed": 0})
def verify_factorize(count: int, bits: int, seed: int) -> Report:
    """Random inputs multiply back; reported primes pass 40 rounds.

    Inputs whose cofactor resists splitting are counted in the notes, not failed:
    giving up is the documented behaviour.
    """
    rep = Report("factorize", {"count": count, "bits": bits, "seed": seed})
    rng = random.Random(seed)
    gave_up = 0
    for idx in range(count):
        n = rng.getrandbits(bits) | 1 << (bits - 1)
        try:
            fm = factorize(n, seed=seed, cache=False)
        except FactorizationError:
            gave_up += 1
            continue
        prod = 1
        for p, e in fm.items():
            prod *= p**e
        bad = [p for p in fm if not is_probable_prime(p, rounds=40, seed=seed)]
        if prod != n or bad:
            rep.fail(index=idx, n=n, factors=fm, not_prime=bad)
            break
    if gave_up:
        rep.notes.append(f"{gave_up} of {count} inputs exceeded the rho budget")
    return rep


@register("three-squares-density", MODULE, small={"max": 10**6})
def verify_three_squares_density(max: int, tolerance: float = 0.01) -> Report:
    rep = Report("three-squares-density", {"max": max})
    misses = sum(1 for n in range(1, max + 1) if not is_three_squares(n))
    ratio = misses / max
    rep.notes.append(f"non-representable density {ratio:.6f}")
    if abs(ratio - 1 / 6) >= tolerance:
        rep.fail(x=max, ratio=ratio)
    return rep

