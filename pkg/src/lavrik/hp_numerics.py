"""Arbitrary-precision scalar kernels: log-gamma, upper incomplete gamma,
Gauss-Legendre rules and a semi-infinite quadrature for integrands that
oscillate uniformly in ``log x``.

All functions accept anything ``mpmath.mpc`` accepts and return mpmath
numbers carrying at least ``ctx.bits`` of precision.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from mpmath import mp

from .context import (
    DEFAULT_CONTEXT,
    ConvergenceError,
    DomainError,
    PoleError,
    PrecisionContext,
    PrecisionLossError,
)

LOG2E = 1.0 / math.log(2.0)


def to_mpc(z) -> mpmath.mpc:
    """Convert at the current working precision (strings keep full precision)."""
    if isinstance(z, str):
        return mpmath.mpc(mpmath.mpmathify(z.replace(" ", "")))
    if isinstance(z, tuple):
        return mpmath.mpc(*z)
    return mpmath.mpc(z)


def is_nonpositive_integer(z: mpmath.mpc) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == mpmath.floor(z.real)


def log2_abs(z) -> float:
    """log2 |z| as a float, valid far outside the double exponent range."""
    if not z:
        return -math.inf
    return float(mpmath.log(abs(z), 2))


# ---------------------------------------------------------------------------
# Gauss-Legendre rules
# ---------------------------------------------------------------------------


def _legendre_newton_fixed(x: int, n: int, frac: int) -> tuple[int, int]:
    """Return (P_n(x), P_{n-1}(x)) in fixed point with ``frac`` fraction bits."""
    one = 1 << frac
    p0, p1 = one, x
    for j in range(1, n):
        p0, p1 = p1, ((2 * j + 1) * ((x * p1) >> frac) - j * p0) // (j + 1)
    return p1, p0


@lru_cache(maxsize=256)
def gauss_legendre(n: int, prec: int) -> tuple[tuple, tuple]:
    """Nodes (ascending) and weights of the n-point Gauss-Legendre rule on [-1, 1].

    Double-precision Newton roots seed a fixed-point Newton iteration whose
    precision doubles every step.
    """
    if n < 1:
        raise ValueError("n must be positive")
    m = (n + 1) // 2
    k = np.arange(1, m + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(1, n):
            p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
        dx = p1 / (n * (x * p1 - p0) / (x * x - 1))
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    target = prec + 24 + n.bit_length()
    cur = 50
    xs = [int(round(float(v) * 2.0**cur)) for v in x]
    while cur < target:
        nxt = min(2 * cur, target)
        xs = [v << (nxt - cur) for v in xs]
        cur = nxt
        one = 1 << cur
        stepped = []
        for xv in xs:
            pn, pm = _legendre_newton_fixed(xv, n, cur)
            num = n * (((xv * pn) >> cur) - pm)
            den = ((xv * xv) >> cur) - one
            dp = (num << cur) // den
            stepped.append(xv - (pn << cur) // dp)
        xs = stepped
    with mpmath.workprec(prec + 16):
        pos_x, pos_w = [], []
        for xv in xs:
            pn, pm = _legendre_newton_fixed(xv, n, cur)
            xm = mpmath.ldexp(xv, -cur)
            dp = n * (xm * mpmath.ldexp(pn, -cur) - mpmath.ldexp(pm, -cur)) / (xm * xm - 1)
            pos_x.append(xm)
            pos_w.append(2 / ((1 - xm * xm) * dp * dp))
        # seeds are the m largest roots, descending
        if n % 2:
            pos_x[-1] = mpmath.mpf(0)
            mid_x, mid_w = [pos_x.pop()], [pos_w.pop()]
        else:
            mid_x, mid_w = [], []
        nodes = [-v for v in pos_x] + mid_x + pos_x[::-1]
        weights = pos_w + mid_w + pos_w[::-1]
    return tuple(nodes), tuple(weights)


# ---------------------------------------------------------------------------
# Gamma function kernels
# ---------------------------------------------------------------------------


def log_gamma(z, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpc:
    """Principal branch of log Gamma(z)."""
    with mpmath.workprec(ctx.bits + 16):
        z = to_mpc(z)
        if is_nonpositive_integer(z):
            raise PoleError(f"log_gamma has a pole at {z}")
        return mpmath.loggamma(z)


def _lower_series(a, z, max_terms: int):
    """Sum_k z^k / (a (a+1) ... (a+k)) and the largest term modulus."""
    eps = mpmath.ldexp(1, -mp.prec)
    term = 1 / a
    total = term
    biggest = abs(term)
    k = 0
    while True:
        k += 1
        if k > max_terms:
            raise ConvergenceError("lower incomplete gamma series did not converge")
        term = term * z / (a + k)
        total += term
        mag = abs(term)
        if mag > biggest:
            biggest = mag
        # geometric tail bound once the ratio is below 1/2
        if mag <= eps * abs(total) and abs(z) < abs(a + k + 1) / 2:
            return total, biggest


def _upper_cf(a, z, max_terms: int):
    """Legendre continued fraction for Gamma(a,z) * exp(z) * z^-a (modified Lentz)."""
    eps = mpmath.ldexp(1, -mp.prec)
    tiny = mpmath.ldexp(1, -4 * mp.prec)
    b = z + 1 - a
    f = b if b != 0 else tiny
    c = f
    d = mpmath.mpc(0)
    for n in range(1, max_terms + 1):
        an = -n * (n - a)
        b += 2
        d = b + an * d
        if d == 0:
            d = tiny
        c = b + an / c
        if c == 0:
            c = tiny
        d = 1 / d
        delta = c * d
        f *= delta
        if abs(delta - 1) < eps:
            return 1 / f
    raise ConvergenceError("incomplete gamma continued fraction did not converge")


def gamma_upper(a, z, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpc:
    """Upper incomplete gamma Gamma(a, z) for Re z > 0.

    For ``|z| <= |a| + 4`` the value is Gamma(a) minus the lower series;
    otherwise the Legendre continued fraction is used.  The lower route
    carries ``ceil(|z| log2 e) + 32`` guard bits, and is retried with more
    if the observed cancellation exceeds that.
    """
    with mpmath.workprec(ctx.bits + 16):
        a = to_mpc(a)
        z = to_mpc(z)
    if z.real <= 0:
        raise DomainError("gamma_upper requires Re z > 0")
    if abs(z) > abs(a) + 4:
        guard = 16 + int(math.log2(abs(float(abs(a))) + 2))
        with mpmath.workprec(ctx.bits + guard):
            return mpmath.exp(a * mpmath.log(z) - z) * _upper_cf(a, z, ctx.max_terms)
    if is_nonpositive_integer(a):
        raise PoleError(f"Gamma(a) has a pole at a={a}")
    guard = int(math.ceil(float(abs(z)) * LOG2E)) + 32
    for _ in range(4):
        with mpmath.workprec(ctx.bits + guard):
            series, biggest = _lower_series(a, z, ctx.max_terms)
            pref = mpmath.exp(a * mpmath.log(z) - z)
            lower = pref * series
            full = mpmath.exp(mpmath.loggamma(a))
            value = full - lower
            scale = max(abs(full), abs(pref) * biggest)
            if value == 0:
                loss = float(ctx.bits + guard)
            else:
                loss = log2_abs(scale) - log2_abs(value)
            if loss <= guard - 12:
                return value
            guard = int(loss) + 40
    raise PrecisionLossError("cancellation in Gamma(a) - gamma(a,z) not resolved")


# ---------------------------------------------------------------------------
# Semi-infinite quadrature
# ---------------------------------------------------------------------------


def _panel(f, a, b, xs, ws):
    half = (b - a) / 2
    mid = (a + b) / 2
    return half * mpmath.fsum(w * f(mid + half * x) for x, w in zip(xs, ws))


def _adaptive(f, a, b, xs, ws, rtol, scale, budget: list, depth: int = 0):
    whole = _panel(f, a, b, xs, ws)
    m = (a + b) / 2
    left = _panel(f, a, m, xs, ws)
    right = _panel(f, m, b, xs, ws)
    budget[0] -= 3 * len(xs)
    if budget[0] < 0:
        raise ConvergenceError("quadrature refinement limit reached (max_terms nodes)")
    pair = left + right
    if abs(pair - whole) <= rtol * max(abs(pair), scale) or depth > 40:
        return pair
    return _adaptive(f, a, m, xs, ws, rtol, scale, budget, depth + 1) + _adaptive(
        f, m, b, xs, ws, rtol, scale, budget, depth + 1
    )


def integrate_decaying(
    f: Callable,
    lower,
    osc_freq_hint: float,
    decay_hint: float,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
) -> mpmath.mpc:
    """Integrate ``f`` over ``[lower, inf)``.

    Beyond ``x = 1`` the substitution ``x = e^u`` is applied and the u-axis
    is cut into Gauss-Legendre panels whose width shrinks with
    ``osc_freq_hint`` (the oscillation frequency in log x).  Panels are
    bisected until two-level estimates agree.  Integration stops once the
    tail bound ``C exp(-decay_hint X) / decay_hint`` drops below
    ``eps * |partial sum|``, where C is the largest ``|f(x)| e^{decay x}``
    seen so far.
    """
    if decay_hint <= 0:
        raise DomainError("decay_hint must be positive")
    prec = ctx.bits + 24
    degree = max(12, int(math.ceil(ctx.bits * 0.3)))
    with mpmath.workprec(prec):
        lower = mpmath.mpf(lower)
        xs, ws = gauss_legendre(degree, prec)
        budget = [ctx.max_terms]
        eps = ctx.eps
        csup = [mpmath.mpf(0)]

        def tracked(x):
            v = f(x)
            c = abs(v) * mpmath.exp(decay_hint * x)
            if c > csup[0]:
                csup[0] = c
            return v

        total = mpmath.mpc(0)
        scale = mpmath.mpf(0)
        if lower < 1:
            piece = _adaptive(tracked, lower, mpmath.mpf(1), xs, ws, eps / 64, scale, budget)
            total += piece
            scale += abs(piece)
            start = mpmath.mpf(0)
        else:
            start = mpmath.log(lower)

        def g(u):
            x = mpmath.exp(u)
            return tracked(x) * x

        h = mpmath.mpf(min(0.5, degree / (2.0 * (abs(osc_freq_hint) + 1.0))))
        u = start
        while True:
            piece = _adaptive(g, u, u + h, xs, ws, eps / 64, scale, budget)
            total += piece
            scale += abs(piece)
            u += h
            X = mpmath.exp(u)
            tail = csup[0] * mpmath.exp(-decay_hint * X) / decay_hint
            if total != 0 and tail < eps * abs(total) / 4:
                break
            if budget[0] < 0:
                raise ConvergenceError("quadrature refinement limit reached (max_terms nodes)")
        return total
