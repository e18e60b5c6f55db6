"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Both implementations are imported directly, so BINPART_PURE has no effect
here. Results are checked for equality before timing is reported.
"""

import argparse
import timeit

import numpy as np

from binpart import _fallback

try:
    from binpart import _kernels
except ImportError:
    _kernels = None


def cases(scale):
    n = int(2**17 * scale)
    rng = np.random.default_rng(0)
    a = rng.integers(0, 64, int(3000 * scale))
    c = rng.integers(0, 64, int(3000 * scale))
    semiprime = 1000003 * 998244353
    return [
        ("bm_mod_stream m=1", "bm_mod_stream", (1, n, 5)),
        ("bm_mod_stream m=7", "bm_mod_stream", (7, n, 5)),
        ("bm_mod_stream m=31", "bm_mod_stream", (31, n // 4, 6)),
        ("tm_bits", "tm_bits", (n * 8,)),
        ("chi_array", "chi_array", (n * 8,)),
        ("s3_member_array", "s3_member_array", (n * 8,)),
        ("s2k_member_array k=4", "s2k_member_array", (4, n * 8)),
        ("series_mul_mod", "series_mul_mod", (a, c, len(a), 6)),
        ("rho_brent 50-bit", "rho_brent", (semiprime, 2, 1, 1 << 22)),
    ]


def same(x, y, params):
    if isinstance(x, tuple):
        # rho may land on either factor; both must split n
        n = params[0]
        return all(1 < d < n and n % d == 0 for d in (x[0], y[0]))
    return np.array_equal(np.asarray(x), np.asarray(y))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled kernels not built; nothing to compare")
        return
    print(f"{'kernel':24s} {'cython s':>10s} {'python s':>10s} {'speedup':>9s}")
    for label, name, params in cases(args.scale):
        fast, slow = getattr(_kernels, name), getattr(_fallback, name)
        if not same(fast(*params), slow(*params), params):
            raise SystemExit(f"{label}: implementations disagree")
        tf = min(timeit.repeat(lambda: fast(*params), number=1, repeat=args.repeat))
        ts = min(timeit.repeat(lambda: slow(*params), number=1, repeat=args.repeat))
        print(f"{label:24s} {tf:10.4f} {ts:10.4f} {ts / tf:8.1f}x")


if __name__ == "__main__":
    main()
