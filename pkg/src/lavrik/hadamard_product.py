"""Product expansion of s Lambda(s) over its zeros, the constant alpha,
and the argument of Lambda on the critical line.

    Lambda(s) = -exp(-alpha s)/s * prod_n (1 - s/b_n) exp(s/b_n)
    a(t) = pi/2 - arg Lambda(1/2 + it),   Z(t) = u(t) a(t)
"""

from __future__ import annotations

import csv
import io
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from ._lambda_quad import lambda_quadrature
from .context import (
    DEFAULT_CONTEXT,
    ConvergenceError,
    DomainError,
    PrecisionContext,
    critical_line_bits,
)
from .hp_numerics import integrate_decaying
from .lambda_core import f_modulus, z_from_l
from .theta_kernel import psi, theta

ARG_BOUND = 0.19


@dataclass(frozen=True)
class ProductConstants:
    alpha: mpmath.mpf
    A: mpmath.mpf
    b0: mpmath.mpf

    def __post_init__(self):
        if not 1.08 < self.A < 1.09:
            raise DomainError("A = theta(1) must lie in (1.08, 1.09)")


def alpha_constant(ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """alpha = int_1^inf psi(y) dy / y."""
    inner = ctx.with_bits(ctx.bits + 16)

    def f(y):
        return psi(y, inner) / y

    value = integrate_decaying(f, 1, 0.0, math.pi, ctx)
    with mpmath.workprec(ctx.bits):
        return +value.real


def alpha_from_e1(ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """alpha as sum_n E_1(pi n^2) (term-wise integration)."""
    with mpmath.workprec(ctx.bits + 16):
        total = mpmath.mpf(0)
        n = 0
        while True:
            n += 1
            term = mpmath.e1(mpmath.pi * n * n)
            total += term
            if term < mpmath.ldexp(total, -ctx.bits - 8):
                return +total


def alpha_from_expansion(ctx: PrecisionContext = DEFAULT_CONTEXT, h=None) -> mpmath.mpf:
    """-d/ds log(-s Lambda(s)) at s = 0 by a central difference.

    log(-s Lambda(s)) = -alpha s + O(s^2), so the symmetric quotient has
    error O(h^2).
    """
    h = mpmath.ldexp(1, -ctx.bits // 6) if h is None else mpmath.mpf(h)
    vals = []
    for sgn in (1, -1):
        s = mpmath.mpc(sgn * h)
        lam, _, prec = lambda_quadrature(s, 1, ctx.bits + 32)
        with mpmath.workprec(prec):
            vals.append(mpmath.log(-(s * lam).real))
    with mpmath.workprec(ctx.bits + 16):
        return -(vals[0] - vals[1]) / (2 * h)


def product_constants(ctx: PrecisionContext = DEFAULT_CONTEXT, b0=None) -> ProductConstants:
    if b0 is None:
        from .zero_atlas import refine_zero

        b0 = refine_zero(mpmath.mpf("11.25"), ctx).beta
    A = theta(1, ctx).value.real
    return ProductConstants(alpha_constant(ctx), A, mpmath.mpf(b0))


def _upper(zeros, cutoff: Optional[int]):
    chosen = [z for z in zeros if z.b.imag >= 0]
    chosen.sort(key=lambda z: (abs(z.b), z.b.imag))
    if cutoff is not None:
        chosen = chosen[: cutoff + 1]
    return chosen


def partial_product(s, zeros: Sequence, consts: ProductConstants,
                    ctx: PrecisionContext = DEFAULT_CONTEXT, cutoff: Optional[int] = None) -> mpmath.mpc:
    """-e^{-alpha s}/s prod_{|n| <= N} (1 - s/b_n) e^{s/b_n}.

    ``zeros`` holds b0 and the zeros in the upper half-plane (conjugates
    are implied); ``cutoff`` N keeps b_0 .. b_N ordered by modulus.  Each
    conjugate pair enters as one factor with real coefficients,
    (1 - 2 Re(1/b) s + s^2/|b|^2) e^{2 Re(1/b) s}.
    """
    with mpmath.workprec(ctx.bits + 16):
        s = mpmath.mpc(s)
        if s == 0:
            raise DomainError("the product has a pole at s=0")
        log_total = -consts.alpha * s
        prod = -1 / s
        for z in _upper(zeros, cutoff):
            b = z.b
            if b.imag == 0:
                prod *= 1 - s / b
                log_total += s / b
            else:
                r = (1 / b).real
                m2 = 1 / abs(b) ** 2
                prod *= 1 - 2 * r * s + s * s * m2
                log_total += 2 * r * s
        return prod * mpmath.exp(log_total)


# ---------------------------------------------------------------------------
# Argument on the critical line
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArgTrack:
    t_grid: list
    arg_values: list
    a_values: list

    def to_csv(self, digits: int = 30) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "arg", "a"])
        for t, g, a in zip(self.t_grid, self.arg_values, self.a_values):
            w.writerow([mpmath.nstr(t, digits), mpmath.nstr(g, digits), mpmath.nstr(a, digits)])
        return out.getvalue()

    def value_at(self, t) -> mpmath.mpf:
        """arg at the grid point nearest to t."""
        i = min(range(len(self.t_grid)), key=lambda k: abs(self.t_grid[k] - t))
        return self.arg_values[i]


def arg_step(t: float) -> float:
    return min(0.1, 1.0 / (2.0 * math.log(2.0 + abs(t))))


def _lambda_line(t, bits: int) -> mpmath.mpc:
    with mpmath.workprec(bits + 32):
        s = mpmath.mpc(mpmath.mpf(1) / 2, t)
    return lambda_quadrature(s, 1, bits)[0]


def _line_bits(t, ctx: PrecisionContext) -> int:
    return max(ctx.bits, critical_line_bits(t))


def arg_track(t_max: float, ctx: PrecisionContext = DEFAULT_CONTEXT,
              t_grid: Optional[Sequence] = None) -> ArgTrack:
    """Continuous arg Lambda(1/2 + it) from arg Lambda(1/2) = pi.

    Default grid: steps min(0.1, 1/(2 log(2 + t))); a step whose phase
    increment reaches pi/2 is subdivided.  Each point is evaluated with at
    least pi t/(4 log 2) + 64 bits so that the exponentially small real
    part, and hence a(t), is resolved.
    """
    if t_max <= 0:
        raise DomainError("t_max must be positive")
    with mpmath.workprec(ctx.bits + 16):
        if t_grid is None:
            # steps rounded to 1e-6 so that grid points are short decimals
            grid = [Fraction(0)]
            while grid[-1] < t_max:
                step = Fraction(round(arg_step(float(grid[-1])) * 10**6), 10**6)
                grid.append(min(Fraction(str(t_max)), grid[-1] + step))
            grid = [mpmath.mpf(g.numerator) / g.denominator for g in grid]
        else:
            grid = [mpmath.mpf(g) for g in t_grid]
            if grid[0] != 0:
                grid.insert(0, mpmath.mpf(0))
        cur = +mpmath.pi
    ts, args, avals = [], [], []
    prev_val = _lambda_line(0, ctx.bits)
    if not prev_val.real < 0:
        raise ConvergenceError("Lambda(1/2) is expected to be negative")
    ts.append(grid[0])
    args.append(cur)
    pending = list(reversed(grid[1:]))
    last_t = grid[0]
    while pending:
        t = pending.pop()
        bits = _line_bits(t, ctx)
        val = _lambda_line(t, bits)
        if val == 0:
            raise ConvergenceError(f"Lambda vanishes on the critical line near t={mpmath.nstr(t, 10)}")
        with mpmath.workprec(bits):
            d = mpmath.arg(val / prev_val)
        if abs(d) >= mpmath.pi / 2:
            if t - last_t < mpmath.mpf(2) ** -30:
                raise ConvergenceError("argument step cannot be resolved")
            pending.append(t)
            pending.append((t + last_t) / 2)
            continue
        with mpmath.workprec(bits):
            cur = cur + d
        ts.append(t)
        args.append(cur)
        prev_val, last_t = val, t
    with mpmath.workprec(max(_line_bits(t_max, ctx), ctx.bits)):
        avals = [mpmath.pi / 2 - g for g in args]
    return ArgTrack(ts, args, avals)


class _BranchTable:
    """Coarse continuous arg Lambda(1/2+it) at 64 bits, extended on demand.

    Only used to pick the 2 pi branch for single-point evaluations.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.t = [0.0]
        self.arg = [math.pi]
        self.val = [complex(_lambda_line(0, 64))]

    def branch(self, t: float) -> float:
        with self._lock:
            while self.t[-1] < t:
                nt = self.t[-1] + arg_step(self.t[-1])
                v = complex(_lambda_line(nt, 64))
                d = math.atan2((v / self.val[-1]).imag, (v / self.val[-1]).real)
                if abs(d) >= math.pi / 2:
                    raise ConvergenceError("branch table step too coarse")
                self.t.append(nt)
                self.arg.append(self.arg[-1] + d)
                self.val.append(v)
            i = min(range(len(self.t)), key=lambda k: abs(self.t[k] - t))
            return self.arg[i]


_BRANCH = None


def _branch_table() -> _BranchTable:
    global _BRANCH
    if _BRANCH is None:
        _BRANCH = _BranchTable()
    return _BRANCH


def a_value(t, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """a(t) = pi/2 - arg Lambda(1/2 + it) for t >= 0 (continuous branch)."""
    t = mpmath.mpf(t)
    if t < 0:
        return -a_value(-t, ctx)
    bits = _line_bits(t, ctx)
    val = _lambda_line(t, bits)
    with mpmath.workprec(bits):
        principal = mpmath.arg(val)
        ref = _branch_table().branch(float(t))
        k = mpmath.nint((ref - principal) / (2 * mpmath.pi))
        return mpmath.pi / 2 - (principal + 2 * mpmath.pi * k)


def a_series(t, zeros: Sequence, consts: ProductConstants,
             ctx: PrecisionContext = DEFAULT_CONTEXT, cutoff: Optional[int] = None):
    """Truncated series -pi/2 + alpha t + arctan 2t - sum [arg(1 - s/b_n) + Im(s/b_n)].

    Returns ``(value, last_term)`` where ``last_term`` is the size of the
    contribution of the last conjugate pair kept.
    """
    with mpmath.workprec(ctx.bits + 16):
        t = mpmath.mpf(t)
        s = mpmath.mpc(mpmath.mpf(1) / 2, t)
        total = -mpmath.pi / 2 + consts.alpha * t + mpmath.atan(2 * t)
        last = mpmath.mpf(0)
        for z in _upper(zeros, cutoff):
            b = z.b
            term = mpmath.arg(1 - s / b) + (s / b).imag
            if b.imag != 0:
                bc = mpmath.conj(b)
                term += mpmath.arg(1 - s / bc) + (s / bc).imag
            total -= term
            last = abs(term)
        return total, last


def u_function(t, ctx: PrecisionContext = DEFAULT_CONTEXT, method: str = "ratio") -> mpmath.mpf:
    """u(t) with Z(t) = u(t) a(t).

    ``method="ratio"`` divides z_from_l by a(t); where |a| is below
    2^(-bits/4) e^(-pi t/4) (a(t) itself decays at that rate) the limit
    Z'(t)/a'(t) is taken with central differences.
    ``method="sinc"`` uses Re Lambda = |Lambda| sin a, i.e.
    u = (2 |Lambda| / f(t)) sin(a)/a, which needs no division by a.
    """
    t = mpmath.mpf(t)
    bits = _line_bits(t, ctx)
    inner = ctx.with_bits(bits)
    if method == "sinc":
        val = _lambda_line(t, bits)
        a = a_value(t, ctx)
        with mpmath.workprec(bits):
            return 2 * abs(val) * mpmath.exp(-f_modulus(t, inner)) * mpmath.sinc(a)
    if method != "ratio":
        raise ValueError(f"unknown method {method!r}")
    a = a_value(t, ctx)
    with mpmath.workprec(bits):
        floor = mpmath.ldexp(mpmath.exp(-mpmath.pi * abs(t) / 4), -ctx.bits // 4)
    if abs(a) > floor:
        z = z_from_l(t, inner)
        with mpmath.workprec(bits):
            return z / a
    # limit at a zero of a (and of Z)
    inner2 = ctx.with_bits(bits + 64)
    with mpmath.workprec(bits + 64):
        h = mpmath.ldexp(1, -bits // 3)
        dz = (z_from_l(t + h, inner2) - z_from_l(t - h, inner2)) / (2 * h)
        da = (a_value(t + h, inner2) - a_value(t - h, inner2)) / (2 * h)
        return dz / da


def critical_line_gap(t, ctx: PrecisionContext = DEFAULT_CONTEXT, A=None) -> mpmath.mpf:
    """|s Lambda(s) + A| at s = 1/2 + it."""
    if A is None:
        A = theta(1, ctx).value.real
    val = _lambda_line(t, ctx.bits)
    with mpmath.workprec(ctx.bits + 16):
        s = mpmath.mpc(mpmath.mpf(1) / 2, t)
        return abs(s * val + A)
