"""The theta sum theta(z) = sum_{n in Z} exp(-pi n^2 z) and psi = (theta - 1)/2."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .context import DEFAULT_CONTEXT, ConvergenceError, DomainError, PrecisionContext
from .hp_numerics import to_mpc


@dataclass(frozen=True)
class ThetaValue:
    value: mpmath.mpc
    terms_used: int
    tail_bound: mpmath.mpf


def psi_sum(z, prec: int, max_terms: int = 200_000):
    """sum_{n>=1} exp(-pi n^2 z) by direct summation at ``prec`` bits.

    Returns ``(value, terms, tail_bound)``.  Uses q^{(n+1)^2} = q^{n^2} q^{2n+1},
    so only one exponential is evaluated.  Caller guarantees Re z > 0.
    """
    with mpmath.workprec(prec):
        q = mpmath.exp(-mpmath.pi * z)
        aq = abs(q)
        if aq == 0:
            return mpmath.mpc(0), 0, mpmath.mpf(0)
        eps = mpmath.ldexp(1, -prec)
        q2 = q * q
        step = q  # q^{2n-1}
        term = q  # q^{n^2}
        total = mpmath.mpc(term)
        n = 1
        while True:
            # tail sum_{m>n} |q|^{m^2} <= |q|^{(n+1)^2} / (1 - |q|^{2n+3})
            tail = aq ** ((n + 1) ** 2) / (1 - aq ** (2 * n + 3))
            if tail <= eps * abs(total):
                return total, n, tail
            n += 1
            if n > max_terms:
                raise ConvergenceError("theta series exceeded max_terms")
            step = step * q2
            term = term * step
            total += term


def _theta_direct(z, ctx: PrecisionContext) -> ThetaValue:
    prec = ctx.bits + 10
    s, n, tail = psi_sum(z, prec, ctx.max_terms)
    with mpmath.workprec(prec):
        return ThetaValue(1 + 2 * s, 2 * n + 1, 2 * tail)


def theta(z, ctx: PrecisionContext = DEFAULT_CONTEXT, transform: bool = True) -> ThetaValue:
    """theta(z) for Re z > 0 with a certified truncation bound.

    When Re z < 0.1 and 1/z lies further into the half-plane, the value is
    obtained from theta(z) = theta(1/z) / sqrt(z) (principal root).
    """
    with mpmath.workprec(ctx.bits + 10):
        z = to_mpc(z)
        if z.real <= 0:
            raise DomainError("theta requires Re z > 0")
        w = 1 / z
        if transform and z.real < 0.1 and w.real > z.real:
            inner = _theta_direct(w, ctx)
            root = mpmath.sqrt(z)
            return ThetaValue(inner.value / root, inner.terms_used, inner.tail_bound / abs(root))
    return _theta_direct(z, ctx)


def psi(x, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpc:
    """(theta(x) - 1) / 2."""
    with mpmath.workprec(ctx.bits + 10):
        x = to_mpc(x)
        if x.real <= 0:
            raise DomainError("psi requires Re x > 0")
        if x.real >= 0.1:
            return psi_sum(x, ctx.bits + 10, ctx.max_terms)[0]
        return (theta(x, ctx).value - 1) / 2


def theta_functional_check(z, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """|theta(1/z) - sqrt(z) theta(z)|, both sides summed directly."""
    with mpmath.workprec(ctx.bits + 10):
        z = to_mpc(z)
        if z.real <= 0 or (1 / z).real <= 0:
            raise DomainError("theta_functional_check requires Re z > 0 and Re 1/z > 0")
        lhs = theta(1 / z, ctx, transform=False).value
        rhs = mpmath.sqrt(z) * theta(z, ctx, transform=False).value
        return abs(lhs - rhs)
