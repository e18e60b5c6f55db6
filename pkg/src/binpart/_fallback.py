"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Same names, same signatures, same outputs. Selected when the extension is
missing or when ``BINPART_PURE=1`` is set.
"""

import numpy as np


def signed_binomials_mod(m, p):
    """Coefficients of (1 - x)^m reduced mod 2^p, as unsigned residues."""
    mask = (1 << p) - 1
    row = [1] + [0] * m
    for i in range(1, m + 1):
        for j in range(i, 0, -1):
            row[j] = (row[j] + row[j - 1]) & mask
    for j in range(1, m + 1, 2):
        row[j] = (mask + 1 - row[j]) & mask
    return np.array(row, dtype=np.uint64)


def bm_mod_stream(m, n_max, p):
    mask = (1 << p) - 1
    coeffs = [int(c) for c in signed_binomials_mod(m, p)]
    terms = [(j, (mask + 1 - coeffs[j]) & mask) for j in range(1, m + 1) if coeffs[j]]
    v = [0] * (n_max + 1)
    v[0] = 1 & mask
    for n in range(1, n_max + 1):
        acc = 0 if n & 1 else v[n >> 1]
        for j, c in terms:
            if j > n:
                break
            acc += c * v[n - j]
        v[n] = acc & mask
    return np.array(v, dtype=np.uint8)


def tm_bits(n_max):
    bits = np.zeros(1, dtype=np.uint8)
    while len(bits) <= n_max:
        bits = np.concatenate([bits, bits ^ 1])
    return bits[: n_max + 1].copy()


def _trailing_zeros(n):
    # n > 0
    low = n & -n
    tz = np.zeros_like(n)
    for shift in (32, 16, 8, 4, 2, 1):
        big = low >= (np.int64(1) << shift)
        tz[big] += shift
        low = np.where(big, low >> shift, low)
    return tz


def chi_array(n_max):
    n = np.arange(n_max + 1, dtype=np.int64)
    t = tm_bits(n_max)
    out = np.zeros(n_max + 1, dtype=np.uint8)
    pos = n > 0
    e = np.zeros_like(n)
    e[pos] = _trailing_zeros(n[pos])
    core = n >> e
    # n = 2^(2k+1) (4s+1) with t_s = -1
    hit = pos & (e % 2 == 1) & (core % 4 == 1)
    out[hit] = t[core[hit] >> 2]
    return out


def s3_member_array(n_max):
    n = np.arange(n_max + 1, dtype=np.int64)
    t = tm_bits(n_max)
    i = n & 7
    rest = n - i
    ok = (i < 4) & (rest > 0)
    e = np.zeros_like(n)
    e[ok] = _trailing_zeros(rest[ok])
    ok &= (e >= 3) & (e % 2 == 1)
    core = rest >> e
    q = core >> 3
    tp = 1 - 2 * t[q].astype(np.int64)
    sign = np.where(i & 1, -1, 1)
    expect = 8 * q + 2 * (i >> 1) + 3 + 2 * sign * tp
    return (ok & (core == expect)).astype(np.uint8)


def s2k_member_array(k, n_max):
    n = np.arange(n_max + 1, dtype=np.int64)
    t = tm_bits(n_max).astype(bool)
    top = 1 << k
    low = (n < (1 << (k - 2))) & t
    mid = (n >= (1 << (k - 1))) & (n < (3 << (k - 2))) & ~t
    out = low | mid
    shifted = np.zeros(n_max + 1, dtype=bool)
    if n_max >= top:
        shifted[top:] = ~t[: n_max + 1 - top]
        out[top:] = ~t[top:] & shifted[top:]
    return out.astype(np.uint8)


def series_mul_mod(a, b, n_terms, p):
    mask = (1 << p) - 1
    x = [int(c) & mask for c in list(a)[:n_terms]]
    y = [int(c) & mask for c in list(b)[:n_terms]]
    z = [0] * n_terms
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j in range(min(len(y), n_terms - i)):
            z[i + j] += xi * y[j]
    return np.array([c & mask for c in z], dtype=np.uint64)


RHO_MAX_BITS = None


def rho_brent(n, y0, c, budget):
    """Brent rho for odd composite n. Returns (divisor or 0, steps used)."""
    from math import gcd

    batch = 128
    y, c = y0 % n, c % n
    x = ys = y
    g = r = q = 1
    spent = 0
    while g == 1 and spent < budget:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(batch, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = gcd(q, n)
            k += batch
        spent += r
        r *= 2
    if g in (0, n):
        g = 1
        guard = 0
        while g == 1 and guard < 2 * r + 2:
            ys = (ys * ys + c) % n
            g = gcd(abs(x - ys), n)
            guard += 1
    return (g if 1 < g < n else 0), spent
