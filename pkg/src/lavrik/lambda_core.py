"""Evaluation of Lambda(tau, s), L(tau, s) and everything built from them.

Lambda(tau, s) = -tau^{s/2}/s + tau^{s/2} int_1^inf x^{s/2-1} psi(tau x) dx
is meromorphic with a single simple pole at s = 0 (residue -1), and
L(tau, s) = pi^{s/2} Lambda(tau, s) / Gamma(s/2) is entire.  Two routes
are available: direct quadrature of the integral and the incomplete-gamma
series.  The zeta oracle used for identity checks lives in
:mod:`lavrik.zeta_oracle` and shares no code with either route.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import mpmath

from ._lambda_quad import lambda_quadrature
from .context import (
    DEFAULT_CONTEXT,
    ConvergenceError,
    DomainError,
    PoleError,
    PrecisionContext,
    PrecisionLossError,
    critical_line_bits,
)
from .hp_numerics import gamma_upper, is_nonpositive_integer, log2_abs, to_mpc
from .zeta_oracle import zeta_oracle

SERIES_T_LIMIT = 50


@dataclass(frozen=True)
class EvalPoint:
    s: mpmath.mpc
    tau: mpmath.mpc = mpmath.mpc(1)

    def __post_init__(self):
        object.__setattr__(self, "s", to_mpc(self.s))
        object.__setattr__(self, "tau", to_mpc(self.tau))
        if self.tau.real <= 0:
            raise DomainError("Re tau must be positive")

    @classmethod
    def make(cls, s, tau=1, bits: int = 128) -> "EvalPoint":
        with mpmath.workprec(bits + 32):
            return cls(to_mpc(s), to_mpc(tau))


@dataclass(frozen=True)
class LambdaValue:
    log_modulus: mpmath.mpf
    phase: mpmath.mpf
    value: mpmath.mpc
    route: str


def _point(p, ctx: PrecisionContext) -> EvalPoint:
    if isinstance(p, EvalPoint):
        return p
    return EvalPoint.make(p, 1, ctx.bits)


def _wrap(value, route: str) -> LambdaValue:
    if value == 0:
        return LambdaValue(mpmath.ninf, mpmath.mpf(0), value, route)
    return LambdaValue(mpmath.log(abs(value)), mpmath.arg(value), value, route)


# ---------------------------------------------------------------------------
# Series route
# ---------------------------------------------------------------------------


def _lambda_series_value(s, tau, ctx: PrecisionContext):
    """-tau^{s/2}/s + pi^{-s/2} sum_n n^{-s} Gamma(s/2, pi n^2 tau)."""
    a = s / 2
    guard = 24
    for _ in range(4):
        prec = ctx.bits + guard
        inner = ctx.with_bits(prec)
        with mpmath.workprec(prec):
            head = -mpmath.exp(a * mpmath.log(tau)) / s
            total = mpmath.mpc(0)
            biggest = abs(head)
            n = 0
            while True:
                n += 1
                if n > ctx.max_terms:
                    raise ConvergenceError("incomplete-gamma series exceeded max_terms")
                z = mpmath.pi * n * n * tau
                term = mpmath.exp(-s * mpmath.log(n)) * gamma_upper(a, z, inner)
                total += term
                mag = abs(term)
                biggest = max(biggest, mag)
                # past |z| > |a| + 4 the terms decay like exp(-pi n^2 Re tau)
                if abs(z) > abs(a) + 4 and mag <= mpmath.ldexp(abs(total) + abs(head), -prec - 4):
                    break
            value = head + mpmath.exp(-a * mpmath.log(mpmath.pi)) * total
            scale = max(abs(head), abs(mpmath.exp(-a * mpmath.log(mpmath.pi))) * biggest)
            loss = log2_abs(scale) - max(log2_abs(value), log2_abs(scale) - ctx.bits)
            if loss <= guard - 12:
                return value
            guard = int(loss) + 32
    raise PrecisionLossError("cancellation in the incomplete-gamma series not resolved")


def l_function_series(p, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpc:
    """L(tau, s) from the incomplete-gamma series.

    Returns exactly 0 at the trivial zeros s = -2, -4, ...; at s = 0 returns
    the limit -1/2 (L is entire there).
    """
    p = _point(p, ctx)
    s, tau = p.s, p.tau
    with mpmath.workprec(ctx.bits + 16):
        if s == 0:
            return mpmath.mpc(-0.5)
        if is_nonpositive_integer(s / 2):
            return mpmath.mpc(0)
        lam = _lambda_series_value(s, tau, ctx)
        return lam * mpmath.exp(s / 2 * mpmath.log(mpmath.pi)) * mpmath.rgamma(s / 2)


def lambda_series(p, ctx: PrecisionContext = DEFAULT_CONTEXT) -> LambdaValue:
    p = _point(p, ctx)
    if p.s == 0:
        raise PoleError("Lambda has a pole at s=0")
    with mpmath.workprec(ctx.bits + 16):
        return _wrap(_lambda_series_value(p.s, p.tau, ctx), "series")


# ---------------------------------------------------------------------------
# Quadrature route and public evaluators
# ---------------------------------------------------------------------------


def lambda_completed(p, ctx: PrecisionContext = DEFAULT_CONTEXT, route: str = "quadrature") -> LambdaValue:
    """Lambda(tau, s) with relative error about ctx.eps.

    ``route`` is ``"quadrature"`` (default), ``"series"``, or ``"auto"``
    (series for |Im s| <= 50, quadrature beyond).
    """
    p = _point(p, ctx)
    if p.s == 0:
        raise PoleError("Lambda has a pole at s=0")
    if route == "auto":
        route = "series" if abs(p.s.imag) <= SERIES_T_LIMIT else "quadrature"
    if route == "series":
        return lambda_series(p, ctx)
    if route != "quadrature":
        raise ValueError(f"unknown route {route!r}")
    value, _, prec = lambda_quadrature(p.s, p.tau, ctx.bits)
    with mpmath.workprec(prec):
        return _wrap(value, "quadrature")


def lambda_value(s, ctx: PrecisionContext = DEFAULT_CONTEXT, tau=1) -> mpmath.mpc:
    """Plain Lambda(tau, s) value (quadrature route)."""
    with mpmath.workprec(ctx.bits + 32):
        s = to_mpc(s)
        tau = to_mpc(tau)
    if s == 0:
        raise PoleError("Lambda has a pole at s=0")
    return lambda_quadrature(s, tau, ctx.bits)[0]


def lambda_derivative(p, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpc:
    """d/ds Lambda(tau, s), by differentiating the integral under the sign.

    Lambda = tau^{s/2} G(s) with G = -1/s + I(s), so
    Lambda' = (log tau / 2) Lambda + tau^{s/2} (1/s^2 + I'(s)),
    I'(s) = int_1^inf x^{s/2-1} (log x / 2) psi(tau x) dx.
    """
    p = _point(p, ctx)
    if p.s == 0:
        raise PoleError("Lambda has a pole at s=0")
    return lambda_quadrature(p.s, p.tau, ctx.bits, deriv=True)[1]


def s_lambda(s, ctx: PrecisionContext = DEFAULT_CONTEXT, deriv: bool = False):
    """F(s) = s Lambda(s) for tau = 1 (entire, F(0) = -1), optionally with F'(s)."""
    with mpmath.workprec(ctx.bits + 32):
        s = to_mpc(s)
    if s == 0:
        if deriv:
            raise DomainError("derivative of s Lambda(s) at 0 is not provided")
        return mpmath.mpc(-1)
    lam, dlam, prec = lambda_quadrature(s, 1, ctx.bits, deriv=deriv)
    with mpmath.workprec(prec):
        if deriv:
            return s * lam, lam + s * dlam
        return s * lam


def l_function(s, ctx: PrecisionContext = DEFAULT_CONTEXT, tau=1) -> mpmath.mpc:
    """L(tau, s) = pi^{s/2} Lambda(tau, s) / Gamma(s/2) via the quadrature route."""
    with mpmath.workprec(ctx.bits + 32):
        s = to_mpc(s)
        tau = to_mpc(tau)
    if s == 0:
        return mpmath.mpc(-0.5)
    with mpmath.workprec(ctx.bits + 16):
        if is_nonpositive_integer(s / 2):
            return mpmath.mpc(0)
    lam, _, prec = lambda_quadrature(s, tau, ctx.bits)
    with mpmath.workprec(prec):
        return lam * mpmath.exp(s / 2 * mpmath.log(mpmath.pi)) * mpmath.rgamma(s / 2)


# ---------------------------------------------------------------------------
# Gamma-factor pieces on the critical line
# ---------------------------------------------------------------------------


def completed_gamma_log(s, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpc:
    """log(pi^{-s/2} Gamma(s/2)), principal log-gamma branch."""
    with mpmath.workprec(ctx.bits + 16):
        s = to_mpc(s)
        if is_nonpositive_integer(s / 2):
            raise PoleError("Gamma(s/2) has a pole")
        return mpmath.loggamma(s / 2) - s / 2 * mpmath.log(mpmath.pi)


def riemann_siegel_theta(t, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi, continuous, theta(0) = 0."""
    with mpmath.workprec(ctx.bits + 16):
        t = mpmath.mpf(t)
        return mpmath.loggamma(mpmath.mpc(0.25, t / 2)).imag - t / 2 * mpmath.log(mpmath.pi)


def f_modulus(t, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """log f(t), f(t) = |pi^{-s/2} Gamma(s/2)| on s = 1/2 + it."""
    with mpmath.workprec(ctx.bits + 16):
        t = mpmath.mpf(t)
        return mpmath.loggamma(mpmath.mpc(0.25, t / 2)).real - mpmath.log(mpmath.pi) / 4


def z_from_l(t, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """Riemann-Siegel Z(t) = (2 / f(t)) Re Lambda(1/2 + it).

    Re Lambda on the critical line is about exp(-pi|t|/4) times |Lambda|, so
    ctx.bits must be at least pi|t|/(4 log 2) + 64.
    """
    need = critical_line_bits(t)
    if ctx.bits < need:
        raise PrecisionLossError(f"Z({float(t):g}) needs at least {need} bits, context has {ctx.bits}")
    with mpmath.workprec(ctx.bits + 16):
        t = mpmath.mpf(t)
        s = mpmath.mpc(0.5, t)
    lam = lambda_quadrature(s, 1, ctx.bits)[0]
    with mpmath.workprec(ctx.bits + 16):
        return 2 * lam.real * mpmath.exp(-f_modulus(t, ctx))


def z_oracle(t, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """Z(t) = e^{i theta(t)} zeta(1/2 + it) from the Euler-Maclaurin oracle."""
    with mpmath.workprec(ctx.bits + 16):
        t = mpmath.mpf(t)
        z = mpmath.exp(1j * riemann_siegel_theta(t, ctx)) * zeta_oracle(mpmath.mpc(0.5, t), ctx)
        return z.real


def xi_and_Xi(z, ctx: PrecisionContext = DEFAULT_CONTEXT):
    """(xi(1/2 + iz), Xi(z), F(z)) with F(z) = (s(s-1)/2) Lambda(s), s = 1/2 + iz.

    Xi(z) = F(z) + F(-z) and xi(1/2 + iz) = Xi(z).
    """
    with mpmath.workprec(ctx.bits + 32):
        z = to_mpc(z)
        s = mpmath.mpf(0.5) + 1j * z
        s_neg = 1 - s
    if s == 0 or s_neg == 0:
        raise PoleError("F is evaluated through Lambda, which has a pole at s=0")
    lam_pos = lambda_quadrature(s, 1, ctx.bits)[0]
    lam_neg = lambda_quadrature(s_neg, 1, ctx.bits)[0]
    with mpmath.workprec(ctx.bits + 16):
        pre = s * (s - 1) / 2
        F_pos = pre * lam_pos
        F_neg = pre * lam_neg
        Xi = F_pos + F_neg
        return Xi, Xi, F_pos


def xi_from_zeta(s, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpc:
    """xi(s) = (s(s-1)/2) pi^{-s/2} Gamma(s/2) zeta(s) through the zeta oracle."""
    with mpmath.workprec(ctx.bits + 16):
        s = to_mpc(s)
        return s * (s - 1) / 2 * mpmath.exp(completed_gamma_log(s, ctx)) * zeta_oracle(s, ctx)


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------


def verify_decomposition(p, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """Relative residual of
    pi^{-s/2}Gamma(s/2)zeta(s) = Lambda(tau, s) + Lambda(1/tau, 1-s).

    The left side comes from the zeta oracle.  Normalised by |lhs|, or by
    max(|lhs|, |Lambda(tau, s)|) when lhs is small (near zeta zeros).
    """
    p = _point(p, ctx)
    s, tau = p.s, p.tau
    with mpmath.workprec(ctx.bits + 16):
        if s == 0 or s == 1:
            raise PoleError("decomposition excludes s in {0, 1}")
        lhs = mpmath.exp(completed_gamma_log(s, ctx)) * zeta_oracle(s, ctx)
    part1 = lambda_quadrature(s, tau, ctx.bits)[0]
    with mpmath.workprec(ctx.bits + 32):
        inv_tau = 1 / tau
        s1 = 1 - s
    part2 = lambda_quadrature(s1, inv_tau, ctx.bits)[0]
    with mpmath.workprec(ctx.bits + 16):
        norm = abs(lhs)
        if norm < mpmath.mpf("1e-2") * abs(part1):
            norm = max(norm, abs(part1))
        return abs(lhs - part1 - part2) / norm


class _ContourCache:
    """Values of h(z) = pi^{-z/2} Gamma(z/2) zeta(z) tau^{-z/2} on Re z = c,
    stored per Gauss-Legendre panel so several checks on the same line share
    them.  For real tau, h(conj z) = conj h(z) supplies the lower half."""

    def __init__(self):
        self._lock = threading.Lock()
        self._store: dict = {}

    def panel(self, c, tau, lo: int, width, degree: int, prec: int):
        real_tau = tau.imag == 0
        key = (str(c), str(tau), lo, str(width), degree, prec)
        if real_tau and lo < 0:
            # mirror of panel [-(lo+1)w, -lo w]
            ys, ws, vs = self.panel(c, tau, -lo - 1, width, degree, prec)
            return [-y for y in ys[::-1]], ws[::-1], [mpmath.conj(v) for v in vs[::-1]]
        with self._lock:
            hit = self._store.get(key)
        if hit is not None:
            return hit
        from .hp_numerics import gauss_legendre

        inner = DEFAULT_CONTEXT.with_bits(prec)
        xs, wts = gauss_legendre(degree, prec)
        with mpmath.workprec(prec + 16):
            half = width / 2
            mid = (2 * lo + 1) * half
            log_tau = mpmath.log(tau)
            ys, ws, vs = [], [], []
            for x, w in zip(xs, wts):
                y = mid + half * x
                z = mpmath.mpc(c, y)
                v = mpmath.exp(completed_gamma_log(z, inner) - z / 2 * log_tau) * zeta_oracle(z, inner)
                ys.append(y)
                ws.append(half * w)
                vs.append(v)
        with self._lock:
            self._store[key] = (ys, ws, vs)
        return ys, ws, vs

    def clear(self) -> None:
        with self._lock:
            self._store.clear()


CONTOUR = _ContourCache()


def _log_h_bound(c: float, y: float, tau) -> float:
    """Upper bound (natural log) for |h(c + iy)| from Stirling, zeta(c) >= |zeta(c+iy)|."""
    with mpmath.workprec(64):
        z = mpmath.mpc(c, y)
        lg = mpmath.loggamma(z / 2).real - c / 2 * mpmath.log(mpmath.pi) - (z / 2 * mpmath.log(tau)).real
        return float(lg) + float(mpmath.log(mpmath.zeta(c)))


def mellin_barnes_check(p, c, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpmath.mpf:
    """|Lambda(tau,s) + tau^{s/2}/s - (tau^{s/2}/2 pi i) int_{(c)} pi^{-z/2}Gamma(z/2)zeta(z) tau^{-z/2}/(z-s) dz|.

    The vertical segment |Im z| <= T is cut where the integrand bound
    (Stirling, decaying like exp(-(pi/4 - |arg tau|/2)|y|)) falls below eps
    relative to the left-hand side.  The segment is split into panels of
    equal width w <= min(2, distance from the line to the poles s, 1, 0);
    each panel's Gauss-Legendre degree comes from the analyticity ellipse
    (limited by the nearest pole) and from the size of the integrand
    there, so far panels need few nodes.  Residual is absolute.
    """
    p = _point(p, ctx)
    s, tau = p.s, p.tau
    c = mpmath.mpf(c)
    if not c > max(s.real, 1):
        raise DomainError("need c > max(Re s, 1)")
    if s == 0:
        raise PoleError("Lambda has a pole at s=0")
    lam = lambda_quadrature(s, tau, ctx.bits)[0]
    prec = ctx.bits + 16
    with mpmath.workprec(prec):
        ts = mpmath.exp(s / 2 * mpmath.log(tau))
        lhs = lam + ts / s
        target = ctx.eps * max(abs(lhs), mpmath.ldexp(1, -ctx.bits // 2)) / 16
        log_target = float(mpmath.log(target)) - float(mpmath.log(abs(ts)))
        rate = math.pi / 4 - abs(float(mpmath.arg(tau))) / 2
        cf, sr, si = float(c), float(s.real), float(s.imag)
        d_min = min(cf - sr, cf - 1.0)
        width = 2.0
        while width > d_min:
            width /= 2
        # truncation height: tail of |h|/|z - s| beyond T is about |h(T)| / (rate * T')
        height = 8.0
        while True:
            tail = max(_log_h_bound(cf, height, tau), _log_h_bound(cf, -height, tau))
            gap = max(height - abs(si), 1.0)
            if tail - math.log(gap) - math.log(rate) < log_target - 3.0:
                break
            height += 4.0
            if height > 1e6:
                raise ConvergenceError("could not find a truncation height for the Mellin-Barnes integral")
        npanel = int(math.ceil(height / width))
        wm = mpmath.mpf(width)
        budget = ctx.max_terms
        total = mpmath.mpc(0)
        poles = [(sr, si), (1.0, 0.0), (0.0, 0.0)]
        for lo in range(-npanel, npanel):
            y0 = (lo + 0.5) * width
            half = width / 2
            # nearest singularity of h(z)/(z - s) seen from the panel centre
            r = min(math.hypot(cf - a, y0 - b) for a, b in poles)
            semi = 0.9 * r / half  # semi-major axis of the admissible ellipse in units of half
            rho = semi + math.sqrt(semi * semi - 1.0)
            # max of |integrand| on the ellipse: centre value, Stirling growth toward small |y|
            near = y0 - math.copysign(min(abs(y0), 0.9 * r), y0)
            log_m = max(_log_h_bound(cf, y0, tau), _log_h_bound(cf, near, tau)) + 0.9 * r * 0.5 + 2.0
            log_m -= math.log(0.1 * r)
            need = log_m + math.log(64 / 15 * half) - math.log(rho * rho - 1) - (log_target - math.log(2 * npanel))
            degree = max(4, int(math.ceil(need / (2 * math.log(rho)))))
            degree = 4 * ((degree + 3) // 4)
            budget -= degree
            if budget < 0:
                raise ConvergenceError("Mellin-Barnes quadrature exceeds max_terms nodes")
            ys, ws, vs = CONTOUR.panel(c, tau, lo, wm, degree, prec)
            total += mpmath.fsum(w * v / (mpmath.mpc(c, y) - s) for y, w, v in zip(ys, ws, vs))
        # dz = i dy, so (1/2 pi i) int ... dz = (1/2 pi) int ... dy
        rhs = ts * total / (2 * mpmath.pi)
        return abs(lhs - rhs)
