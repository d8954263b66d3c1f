# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled double-precision Lambda(s) kernel (same algorithm as
_kernels_fallback): direct quadrature for Re s < SPLIT and the
decomposition through pi^{-s/2} Gamma(s/2) zeta(s) beyond."""

import numpy as np
cimport numpy as cnp

cdef extern from "<complex.h>" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

cdef extern from "<math.h>" nogil:
    double log(double)
    double ceil(double)
    double exp(double)
    double cos(double)
    double sin(double)
    void sincos(double, double*, double*)

cdef double SPLIT = 3.0
cdef double LOG_PI = 1.1447298858494002
cdef double HALF_LOG_2PI = 0.9189385332046728

cdef double[8] STIRLING = [
    1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188, -691.0 / 360360, 1.0 / 156,
    -3617.0 / 122400,
]
cdef double[10] EM = [
    1.0 / 12, -1.0 / 720, 1.0 / 30240, -1.0 / 1209600, 1.0 / 47900160,
    -691.0 / 1307674368000, 1.0 / 74724249600, -3617.0 / 10670622842880000,
    43867.0 / 5109094217170944000, -174611.0 / 802857662698291200000,
]


cdef double complex c_loggamma(double complex z) nogil:
    cdef double complex acc = 0
    cdef double complex inv, inv2, p, series = 0
    cdef int k
    while creal(z) < 8.0:
        acc = acc - clog(z)
        z = z + 1
    inv = 1 / z
    inv2 = inv * inv
    p = inv
    for k in range(8):
        series = series + STIRLING[k] * p
        p = p * inv2
    return acc + (z - 0.5) * clog(z) - z + HALF_LOG_2PI + series


cdef double complex c_zeta(double complex s, double complex* pw, const int* spf) nogil:
    """Euler-Maclaurin with N = |s| + 10; n^{-s} is built multiplicatively
    from prime powers (spf = smallest prime factor table), so only primes
    cost an exponential."""
    cdef int n_cut = <int> ceil(cabs(s) + 10)
    cdef int n, k, p
    cdef double complex total = 0
    cdef double N = n_cut
    cdef double complex nps, rising, npow
    cdef double sr = creal(s), si = cimag(s), ln, mag, c, sn
    pw[1] = 1
    for n in range(2, n_cut):
        p = spf[n]
        if p == n:
            ln = log(<double> n)
            mag = exp(-sr * ln)
            sincos(si * ln, &sn, &c)
            pw[n] = mag * c - 1j * (mag * sn)
        else:
            pw[n] = pw[p] * pw[n // p]
        total = total + pw[n]
    total = total + 1
    nps = cexp(-s * log(N))
    total = total + N * nps / (s - 1) + nps / 2
    rising = s
    npow = nps / N
    for k in range(1, 11):
        total = total + EM[k - 1] * rising * npow
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
        npow = npow / (N * N)
    return total


cdef double complex c_direct(double complex s, double h, const double[:] off, const double[:, :] cf,
                             double complex* G, double* Gabs, double* cond) nogil:
    """-1/s + sum_{p,k} cf[p,k] R^p G_k with R = e^{hs/2}, G_k = e^{off_k s/2}."""
    cdef double complex head = -1 / s
    cdef double complex R = cexp(h * s / 2), Rp = 1, inner, total = head
    cdef double acc = cabs(head), Rabs, Rpabs = 1, inner_abs, w
    cdef Py_ssize_t p, k, K = off.shape[0]
    for k in range(K):
        G[k] = cexp(off[k] * s / 2)
        Gabs[k] = cabs(G[k])
    Rabs = cabs(R)
    for p in range(cf.shape[0]):
        inner = 0
        inner_abs = 0
        for k in range(K):
            w = cf[p, k]
            inner = inner + w * G[k]
            inner_abs += (w if w >= 0 else -w) * Gabs[k]
        total = total + Rp * inner
        acc += Rpabs * inner_abs
        Rp = Rp * R
        Rpabs = Rpabs * Rabs
    cond[0] = acc
    return total


def _smallest_prime_factor(int n):
    spf = np.arange(n, dtype=np.intc)
    cdef int p
    for p in range(2, int(n ** 0.5) + 1):
        if spf[p] == p:
            block = spf[p * p::p]
            np.minimum(block, p, out=block)
    return spf


def lambda_values(s, double h, offsets, coeffs):
    """(value, cond) of Lambda at every point of ``s`` (complex array, s != 0)."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] ss = np.ascontiguousarray(np.asarray(s, dtype=complex).ravel())
    cdef const double[:] off = np.ascontiguousarray(offsets, dtype=float)
    cdef const double[:, :] cf = np.ascontiguousarray(coeffs, dtype=float)
    cdef Py_ssize_t n = ss.shape[0], i
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] val = np.empty(n, dtype=complex)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cond = np.empty(n, dtype=float)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] gbuf = np.empty(off.shape[0], dtype=complex)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] abuf = np.empty(off.shape[0], dtype=float)
    cdef double complex* G = <double complex*> gbuf.data
    cdef double* Gabs = <double*> abuf.data
    cdef double complex z, main, other
    cdef double cd, co
    cdef int nmax = <int> ceil(np.abs(ss).max(initial=0.0) + 12)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] pbuf = np.empty(nmax, dtype=complex)
    cdef cnp.ndarray[int, ndim=1, mode="c"] sieve = np.ascontiguousarray(_smallest_prime_factor(nmax), dtype=np.intc)
    cdef double complex* pw = <double complex*> pbuf.data
    cdef const int* spf = <const int*> sieve.data
    with nogil:
        for i in range(n):
            z = ss[i]
            if creal(z) < SPLIT:
                val[i] = c_direct(z, h, off, cf, G, Gabs, &cd)
                cond[i] = cd
            else:
                main = cexp(c_loggamma(z / 2) - z / 2 * LOG_PI) * c_zeta(z, pw, spf)
                other = c_direct(1 - z, h, off, cf, G, Gabs, &co)
                val[i] = main - other
                cond[i] = cabs(main) + co
    return val, cond
