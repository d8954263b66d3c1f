"""Euler-Maclaurin evaluation of zeta(s) with a rigorous remainder test.

Kept independent of the theta/incomplete-gamma machinery so it can serve
as the reference side of identity checks.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath

from .context import DEFAULT_CONTEXT, ConvergenceError, PoleError, PrecisionContext
from .hp_numerics import to_mpc

START_ORDER = 8  # Bernoulli corrections up to B_16 before the remainder test


@lru_cache(maxsize=64)
def _bernoulli_ratios(kmax: int, prec: int) -> tuple:
    """B_{2k} / (2k)! for k = 1..kmax."""
    with mpmath.workprec(prec):
        return tuple(mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) for k in range(1, kmax + 1))


def _em_attempt(s, n_cut: int, kmax: int, target_rel, floor):
    """One Euler-Maclaurin pass; returns the value or None if the tail test fails."""
    sigma = s.real
    head = mpmath.fsum(mpmath.exp(-s * mpmath.log(n)) for n in range(1, n_cut))
    nps = mpmath.exp(-s * mpmath.log(n_cut))  # N^-s
    total = head + n_cut * nps / (s - 1) + nps / 2
    ratios = _bernoulli_ratios(kmax + 1, mpmath.mp.prec)
    rising = s  # s (s+1) ... (s+2k-2)
    npow = nps / n_cut  # N^{-s-2k+1}
    inv_n2 = mpmath.mpf(1) / (n_cut * n_cut)
    prev = None
    for k in range(1, kmax + 1):
        term = ratios[k - 1] * rising * npow
        nxt_rising = rising * (s + 2 * k - 1) * (s + 2 * k)
        nxt = ratios[k] * nxt_rising * npow * inv_n2
        total += term
        if sigma + 2 * k + 1 > 0:
            # |R_k| <= |s + 2k + 1| / (sigma + 2k + 1) * |first omitted term|
            bound = abs(s + 2 * k + 1) / (sigma + 2 * k + 1) * abs(nxt)
            if bound <= target_rel * max(abs(total), floor):
                return total, bound
        mag = abs(term)
        if k >= START_ORDER and prev is not None and mag > prev and mag != 0:
            return None
        prev = mag
        rising = nxt_rising
        npow = npow * inv_n2
    return None


def zeta_oracle(s, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpc:
    """zeta(s) for s != 1 via Euler-Maclaurin summation.

    Starts from N = ceil(max(3 + |t|/2, bits/5)) and Bernoulli order 8; the
    order grows while correction terms shrink, and N doubles whenever the
    remainder bound cannot be met.  (The bits/5 floor keeps the Bernoulli
    order moderate at small |t|, where it would otherwise dominate the cost.)
    """
    prec = ctx.bits + 20
    with mpmath.workprec(prec):
        s = to_mpc(s)
        if s == 1:
            raise PoleError("zeta has a pole at s=1")
        t = float(abs(s.imag))
        n_cut = int(math.ceil(max(3 + t / 2, ctx.bits / 5)))
        floor = mpmath.ldexp(1, -ctx.bits // 4)
        kmax = max(START_ORDER, ctx.bits // 2, int(-float(s.real)) // 2 + START_ORDER)
        for _ in range(40):
            guard = 8 + n_cut.bit_length()
            with mpmath.workprec(prec + guard):
                got = _em_attempt(s, n_cut, kmax, ctx.eps / 4, floor)
            if got is not None:
                return +got[0]
            n_cut *= 2
        raise ConvergenceError("Euler-Maclaurin remainder test never passed")
