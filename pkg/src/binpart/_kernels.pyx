# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Mirrors binpart._fallback function for function."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint8_t, uint32_t, uint64_t, int64_t

cnp.import_array()


def signed_binomials_mod(long m, int p):
    """Coefficients of (1 - x)^m reduced mod 2^p, as unsigned residues."""
    cdef uint64_t mask = (1 << p) - 1
    row = np.zeros(m + 1, dtype=np.uint64)
    cdef uint64_t[:] r = row
    cdef long i, j
    r[0] = 1
    for i in range(1, m + 1):
        for j in range(i, 0, -1):
            r[j] = (r[j] + r[j - 1]) & mask
    for j in range(1, m + 1, 2):
        r[j] = (mask + 1 - r[j]) & mask
    return row


def bm_mod_stream(long m, Py_ssize_t n_max, int p):
    """b_m(0..n_max) mod 2^p from (1 - x)^m B_m(x) = B_m(x^2)."""
    cdef uint32_t mask = (1 << p) - 1
    coeffs = signed_binomials_mod(m, p)
    # -(coefficient of x^j) moves to the right-hand side
    lags = [j for j in range(1, m + 1) if coeffs[j]]
    cdef Py_ssize_t nlag = len(lags)
    lag_arr = np.array(lags, dtype=np.int64)
    mul_arr = np.array([(mask + 1 - int(coeffs[j])) & mask for j in lags], dtype=np.uint32)
    cdef int64_t[:] lag = lag_arr
    cdef uint32_t[:] mul = mul_arr
    out = np.zeros(n_max + 1, dtype=np.uint8)
    cdef uint8_t[:] v = out
    cdef Py_ssize_t n, t, j
    cdef uint32_t acc
    v[0] = 1 & mask
    with nogil:
        for n in range(1, n_max + 1):
            acc = 0
            for t in range(nlag):
                j = lag[t]
                if j > n:
                    break
                acc += mul[t] * v[n - j]
            if n & 1 == 0:
                acc += v[n >> 1]
            v[n] = acc & mask
    return out


def tm_bits(Py_ssize_t n_max):
    """T_n = s2(n) mod 2 for 0 <= n <= n_max."""
    out = np.zeros(n_max + 1, dtype=np.uint8)
    cdef uint8_t[:] v = out
    cdef Py_ssize_t n
    with nogil:
        for n in range(1, n_max + 1):
            v[n] = v[n >> 1] ^ (n & 1)
    return out


cdef inline int _parity(uint64_t x) nogil:
    x ^= x >> 32
    x ^= x >> 16
    x ^= x >> 8
    x ^= x >> 4
    x ^= x >> 2
    x ^= x >> 1
    return <int>(x & 1)


cdef inline int _ctz(uint64_t x) nogil:
    cdef int c = 0
    while x & 1 == 0:
        x >>= 1
        c += 1
    return c


def chi_array(Py_ssize_t n_max):
    """chi(n) for 0 <= n <= n_max by the defining recurrences."""
    out = np.zeros(n_max + 1, dtype=np.uint8)
    cdef uint8_t[:] v = out
    cdef Py_ssize_t n
    cdef uint64_t r
    with nogil:
        for n in range(1, n_max + 1):
            r = n & 7
            if n & 1:
                v[n] = 0
            elif n & 3 == 0:
                v[n] = v[n >> 2]
            elif r == 2:
                v[n] = _parity(n >> 3)
            else:
                v[n] = 0
    return out


def s3_member_array(Py_ssize_t n_max):
    """Indicator of n = 2^(2k+1)(8p + 2*floor(i/2) + 3 + 2(-1)^i t_p) + i, k >= 1."""
    out = np.zeros(n_max + 1, dtype=np.uint8)
    cdef uint8_t[:] v = out
    cdef Py_ssize_t n
    cdef uint64_t i, rest, core, q
    cdef int e, tp
    cdef long expect
    with nogil:
        for n in range(n_max + 1):
            i = n & 7
            if i > 3:
                continue
            rest = n - i
            if rest == 0:
                continue
            e = _ctz(rest)
            if e < 3 or e % 2 == 0:
                continue
            core = rest >> e
            q = core >> 3
            tp = 1 - 2 * _parity(q)
            if i & 1:
                expect = 3 - 2 * tp
            else:
                expect = 3 + 2 * tp
            expect += 8 * <long>q + 2 * <long>(i >> 1)
            v[n] = 1 if <long>core == expect else 0
    return out


def s2k_member_array(int k, Py_ssize_t n_max):
    """Indicator of n with b_{2^k - 1}(n) not a sum of three squares, k >= 3."""
    out = np.zeros(n_max + 1, dtype=np.uint8)
    cdef uint8_t[:] v = out
    cdef Py_ssize_t n
    cdef Py_ssize_t top = 1 << k
    cdef Py_ssize_t q1 = 1 << (k - 2)
    cdef Py_ssize_t half = 1 << (k - 1)
    cdef Py_ssize_t q3 = 3 << (k - 2)
    cdef int tn
    with nogil:
        for n in range(n_max + 1):
            tn = _parity(n)
            if n < top:
                if n < q1:
                    v[n] = tn
                elif half <= n < q3:
                    v[n] = 1 - tn
            else:
                v[n] = 1 if (tn == 0 and _parity(n - top) == 0) else 0
    return out


def series_mul_mod(a, b, Py_ssize_t n_terms, int p):
    """First n_terms coefficients of a*b mod 2^p (schoolbook, word arithmetic)."""
    cdef uint64_t mask = (1 << p) - 1
    av = np.ascontiguousarray(a, dtype=np.uint64)
    bv = np.ascontiguousarray(b, dtype=np.uint64)
    out = np.zeros(n_terms, dtype=np.uint64)
    cdef uint64_t[:] x = av
    cdef uint64_t[:] y = bv
    cdef uint64_t[:] z = out
    cdef Py_ssize_t la = min(len(av), n_terms)
    cdef Py_ssize_t lb = min(len(bv), n_terms)
    cdef Py_ssize_t i, j, hi
    cdef uint64_t xi
    with nogil:
        for i in range(la):
            xi = x[i] & mask
            if xi == 0:
                continue
            hi = min(lb, n_terms - i)
            for j in range(hi):
                z[i + j] = (z[i + j] + xi * (y[j] & mask)) & mask
    return out


cdef extern from *:
    """
    typedef unsigned __int128 bp_u128;

    static inline void bp_mul256(bp_u128 a, bp_u128 b, bp_u128 *hi, bp_u128 *lo) {
        uint64_t a0 = (uint64_t)a, a1 = (uint64_t)(a >> 64);
        uint64_t b0 = (uint64_t)b, b1 = (uint64_t)(b >> 64);
        bp_u128 p00 = (bp_u128)a0 * b0, p01 = (bp_u128)a0 * b1;
        bp_u128 p10 = (bp_u128)a1 * b0, p11 = (bp_u128)a1 * b1;
        bp_u128 mid = (p00 >> 64) + (uint64_t)p01 + (uint64_t)p10;
        *lo = (mid << 64) | (uint64_t)p00;
        *hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    }

    /* Montgomery product a*b/2^128 mod n for odd n; ninv = -n^-1 mod 2^128 */
    static inline bp_u128 bp_redc_mul(bp_u128 a, bp_u128 b, bp_u128 n, bp_u128 ninv) {
        bp_u128 t_hi, t_lo, m_hi, m_lo, s_lo, s_hi, s_hi2;
        int carry;
        bp_mul256(a, b, &t_hi, &t_lo);
        bp_u128 m = t_lo * ninv;
        bp_mul256(m, n, &m_hi, &m_lo);
        s_lo = t_lo + m_lo;
        int c1 = s_lo < t_lo;
        s_hi = t_hi + m_hi;
        carry = s_hi < t_hi;
        s_hi2 = s_hi + (bp_u128)c1;
        carry |= s_hi2 < s_hi;
        if (carry || s_hi2 >= n) s_hi2 -= n;
        return s_hi2;
    }

    static bp_u128 bp_gcd(bp_u128 a, bp_u128 b) {
        while (b) { bp_u128 t = a % b; a = b; b = t; }
        return a;
    }

    /* Brent's rho on odd composite n with f(y) = y^2 + c (Montgomery domain).
       Returns a divisor 1 < g < n, or 0 if the step budget ran out or the
       walk collapsed; *used receives the number of steps taken. */
    static bp_u128 bp_rho(bp_u128 n, bp_u128 y, bp_u128 c, uint64_t budget, uint64_t *used) {
        bp_u128 inv = n;
        for (int i = 0; i < 7; i++) inv *= (bp_u128)2 - n * inv;
        bp_u128 ninv = (bp_u128)0 - inv;
        bp_u128 x = y, ys = y, q = 1, g = 1, d;
        uint64_t r = 1, k, spent = 0, batch = 128, j, lim;
        while (g == 1 && spent < budget) {
            x = y;
            for (j = 0; j < r; j++) { y = bp_redc_mul(y, y, n, ninv) + c; if (y >= n) y -= n; }
            k = 0;
            while (k < r && g == 1) {
                ys = y;
                lim = (r - k < batch) ? r - k : batch;
                for (j = 0; j < lim; j++) {
                    y = bp_redc_mul(y, y, n, ninv) + c; if (y >= n) y -= n;
                    d = x > y ? x - y : y - x;
                    q = bp_redc_mul(q, d, n, ninv);
                }
                g = bp_gcd(q, n);
                k += batch;
            }
            spent += r;
            r *= 2;
        }
        *used = spent;
        if (g == n || g == 0) {
            g = 1;
            uint64_t guard = 0;
            while (g == 1 && guard < 2 * r + 2) {
                ys = bp_redc_mul(ys, ys, n, ninv) + c; if (ys >= n) ys -= n;
                d = x > ys ? x - ys : ys - x;
                g = bp_gcd(d, n);
                guard++;
            }
        }
        if (g > 1 && g < n) return g;
        return 0;
    }
    """
    ctypedef unsigned long long bp_u128 "bp_u128"
    bp_u128 bp_rho(bp_u128 n, bp_u128 y, bp_u128 c, uint64_t budget, uint64_t *used) nogil


cdef bp_u128 _to_u128(object v):
    return (<bp_u128>(<uint64_t>(v >> 64)) << 64) | <bp_u128>(<uint64_t>(v & 0xFFFFFFFFFFFFFFFF))


cdef object _from_u128(bp_u128 v):
    return (int(<uint64_t>(v >> 64)) << 64) | int(<uint64_t>v)


RHO_MAX_BITS = 128


def rho_brent(n, y0, c, budget):
    """Brent rho for odd composite n < 2^128. Returns (divisor or 0, steps used)."""
    if n >= 1 << 128 or n % 2 == 0:
        raise ValueError("compiled rho needs odd n < 2^128")
    cdef bp_u128 nn = _to_u128(n)
    cdef bp_u128 yy = _to_u128(y0 % n)
    cdef bp_u128 cc = _to_u128(c % n)
    cdef uint64_t used = 0
    cdef uint64_t b = budget
    cdef bp_u128 g
    with nogil:
        g = bp_rho(nn, yy, cc, b, &used)
    return _from_u128(g), int(used)
