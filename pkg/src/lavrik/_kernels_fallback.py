"""Double-precision Lambda(s) on many points at once (numpy version).

Lambda(s) = -1/s + sum_j c_j exp(u_j s / 2) for Re s < SPLIT, where
(u_j, c_j) is a panel Gauss-Legendre discretisation of
int_0^U e^{us/2} psi(e^u) du (u = p h + offsets[k], c = coeffs[p, k]).
For Re s >= SPLIT the identity
    Lambda(s) = pi^{-s/2} Gamma(s/2) zeta(s) - Lambda(1 - s)
is used instead, which avoids the cancellation inside the integral when
Re s is large.  Both routes also return a condition sum: the sum of
moduli of everything added, so |value| / cond measures the loss.
"""

from __future__ import annotations

import numpy as np

SPLIT = 3.0
LOG_PI = float(np.log(np.pi))
HALF_LOG_2PI = 0.5 * float(np.log(2 * np.pi))
# B_{2k} / (2k (2k-1)) for the Stirling series, k = 1..8
_STIRLING = np.array([
    1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360, 1 / 156, -3617 / 122400,
])
# B_{2k} / (2k)! for Euler-Maclaurin, k = 1..10
_EM = np.array([
    1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160,
    -691 / 1307674368000, 1 / 74724249600, -3617 / 10670622842880000,
    43867 / 5109094217170944000, -174611 / 802857662698291200000,
])


def loggamma(z: np.ndarray) -> np.ndarray:
    """log Gamma(z) up to a multiple of 2 pi i (only exp of it is used); Re z > 0."""
    z = np.asarray(z, dtype=complex).copy()
    acc = np.zeros_like(z)
    shift = np.maximum(0, np.ceil(8.0 - z.real)).astype(int)
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        acc[m] -= np.log(z[m])
        z[m] += 1
    inv = 1 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    p = inv
    for coef in _STIRLING:
        series += coef * p
        p = p * inv2
    return acc + (z - 0.5) * np.log(z) - z + HALF_LOG_2PI + series


def rgamma(z: np.ndarray) -> np.ndarray:
    """1 / Gamma(z), exact zeros at non-positive integers."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = np.exp(-loggamma(z[right]))
    left = ~right
    if left.any():
        w = z[left]
        # 1/Gamma(w) = Gamma(1-w) sin(pi w) / pi
        out[left] = np.exp(loggamma(1 - w)) * np.sin(np.pi * w) / np.pi
        ints = (w.imag == 0) & (w.real == np.round(w.real))
        sub = out[left]
        sub[ints] = 0
        out[left] = sub
    return out


def smallest_prime_factor(n: int) -> np.ndarray:
    """spf[k] = smallest prime factor of k for 2 <= k < n."""
    spf = np.arange(n)
    for p in range(2, int(n ** 0.5) + 1):
        if spf[p] == p:
            block = spf[p * p::p]
            np.minimum(block, p, out=block)
    return spf


def zeta_em(s: np.ndarray) -> np.ndarray:
    """zeta(s) for Re s >= 1.5 by Euler-Maclaurin with N = |s| + 10 and ten corrections."""
    s = np.asarray(s, dtype=complex)
    if s.size == 0:
        return s.copy()
    n_cut = np.ceil(np.abs(s) + 10).astype(int)
    nmax = int(n_cut.max())
    spf = smallest_prime_factor(nmax)
    # n^{-s} is completely multiplicative: only primes need an exponential
    pw = np.empty((nmax,) + s.shape, dtype=complex)
    pw[1] = 1
    total = np.ones_like(s)
    for n in range(2, nmax):
        p = spf[n]
        pw[n] = np.exp(-s * np.log(n)) if p == n else pw[p] * pw[n // p]
        total += np.where(n < n_cut, pw[n], 0)
    N = n_cut.astype(float)
    logN = np.log(N)
    nps = np.exp(-s * logN)
    total += N * nps / (s - 1) + nps / 2
    rising = s.copy()
    npow = nps / N
    for k, coef in enumerate(_EM, start=1):
        total += coef * rising * npow
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
        npow = npow / (N * N)
    return total


def direct(s: np.ndarray, h: float, offsets: np.ndarray, coeffs: np.ndarray):
    """-1/s + sum_{p,k} coeffs[p,k] e^{(p h + offsets[k]) s/2} and its condition sum.

    e^{(p h + o_k) s/2} = R^p G_k with R = e^{h s/2}, G_k = e^{o_k s/2}, so the
    double sum is a matrix product followed by a weighted sum over panels.
    """
    s = np.asarray(s, dtype=complex)
    val = np.empty_like(s)
    cond = np.empty(s.shape, dtype=float)
    panels = coeffs.shape[0]
    pidx = np.arange(panels)[:, None]
    chunk = 8192
    for a in range(0, s.size, chunk):
        ss = s[a:a + chunk]
        G = np.exp(np.outer(offsets, ss) / 2)
        R = np.exp(pidx * (h * ss / 2)[None, :])
        inner = coeffs @ G
        inner_abs = np.abs(coeffs) @ np.abs(G)
        head = -1 / ss
        val[a:a + chunk] = head + (R * inner).sum(axis=0)
        cond[a:a + chunk] = np.abs(head) + (np.abs(R) * inner_abs).sum(axis=0)
    return val, cond


def lambda_values(s, h, offsets, coeffs):
    """(value, cond) of Lambda at every point of ``s`` (complex array, s != 0)."""
    s = np.asarray(s, dtype=complex).ravel()
    offsets = np.asarray(offsets, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    val = np.empty_like(s)
    cond = np.empty(s.shape, dtype=float)
    low = s.real < SPLIT
    if low.any():
        val[low], cond[low] = direct(s[low], h, offsets, coeffs)
    high = ~low
    if high.any():
        sh = s[high]
        gam = np.exp(loggamma(sh / 2) - sh / 2 * LOG_PI)
        zeta = np.concatenate([zeta_em(sh[a:a + 4096]) for a in range(0, sh.size, 4096)])
        main = gam * zeta
        other, other_cond = direct(1 - sh, h, offsets, coeffs)
        val[high] = main - other
        cond[high] = np.abs(main) + other_cond
    return val, cond
