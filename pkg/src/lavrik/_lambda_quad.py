"""Fixed-rule quadrature for I(tau, s) = int_0^inf exp(u s/2) psi(tau e^u) du.

The integral is the x = e^u form of int_1^inf x^{s/2-1} psi(tau x) dx.  It
is cut into equal Gauss-Legendre panels of width h.  Because every panel
uses the same reference nodes, exp(u s/2) factors into a per-panel power
R^p times K per-node factors, and the theta values at the nodes do not
depend on s at all, so they are cached per (tau, h, K, prec).

Rule choice is a priori: for each candidate (h, eta) the integrand is
bounded on the Bernstein ellipse of every panel (closed form, vectorised
in numpy), the Gauss-Legendre error bound
    (64/15) M rho^{-2K} / (rho^2 - 1)
is inverted for K, and the cheapest (h, K) is kept.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .context import PrecisionLossError
from .hp_numerics import gauss_legendre, log2_abs
from .theta_kernel import psi_sum

LN2 = math.log(2.0)
H_LADDER = (2.0, 1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625)
ETA_GRID = np.linspace(0.1, 3.5, 24)
MAX_PANELS = 20_000


@dataclass(frozen=True)
class Rule:
    h: float
    K: int
    panels: int
    prec: int
    cond_log2: float  # log2 of an upper bound on int |integrand| du


def _log_psi_bound(r):
    """log of exp(-r)/(1-exp(-3r)), an upper bound for |psi(w)| with pi Re w = r."""
    r = np.maximum(r, 1e-300)
    return -r - np.log(-np.expm1(-3.0 * r))


def _panel_log_max(lo, hi, sigma, rate, extra):
    """max over u in [lo, hi] of u sigma/2 - rate e^u, plus the psi denominator
    term (largest at lo) and a log(1 + |u|/2) allowance for derivatives."""
    if sigma > 0:
        ustar = math.log(sigma / (2.0 * rate))
        u = np.clip(ustar, lo, hi)
    else:
        u = lo.copy()
    main = u * sigma / 2.0 - rate * np.exp(u)
    denom = -np.log(-np.expm1(-3.0 * rate * np.exp(lo)))
    deriv = np.log1p((np.maximum(np.abs(lo), np.abs(hi)) + extra) / 2.0)
    return main + denom + deriv


def _online_profile(sigma: float, rate: float):
    """Peak (natural log) of the on-line integrand bound and its location."""
    if sigma > 0 and sigma / (2.0 * rate) > 1.0:
        ustar = math.log(sigma / (2.0 * rate))
    else:
        ustar = 0.0
    peak = ustar * sigma / 2.0 + float(_log_psi_bound(np.array(rate * math.exp(ustar))))
    return peak, ustar


def _tail_end(sigma: float, rate: float, peak: float, ustar: float, prec: int) -> float:
    """Smallest u past the peak where the remaining tail is below 2^-(prec+10) e^peak."""
    target = peak - (prec + 10) * LN2
    u = max(ustar, 0.0)
    step = 0.03125
    while True:
        x = math.exp(u)
        slope = rate * x - sigma / 2.0
        if slope > 0.5:
            tail = u * sigma / 2.0 + float(_log_psi_bound(np.array(rate * x))) - math.log(slope)
            if tail < target:
                return u
        u += step


@lru_cache(maxsize=65536)
def select_rule(sigma: float, tabs: float, tau_mod: float, tau_arg: float, prec: int) -> Rule:
    """Cheapest panel width / degree meeting the error target at ``prec`` bits."""
    rate0 = math.pi * tau_mod * math.cos(tau_arg)
    if rate0 <= 0:
        raise ValueError("Re tau must be positive")
    peak, ustar = _online_profile(sigma, rate0)
    uend = _tail_end(sigma, rate0, peak, ustar, prec)
    budget = peak - prec * LN2
    vmax = 0.8 * (math.pi / 2 - abs(tau_arg))
    best = None
    for h in H_LADDER:
        panels = max(1, int(math.ceil(uend / h)))
        if panels > MAX_PANELS:
            continue
        lo = np.arange(panels) * h
        for eta in ETA_GRID:
            v = 0.5 * h * math.sinh(eta)
            if v > vmax:
                break
            ext = 0.5 * h * (math.cosh(eta) - 1.0)
            rate = math.pi * tau_mod * math.cos(abs(tau_arg) + v)
            logm = _panel_log_max(lo - ext, lo + h + ext, sigma, rate, v) + v * tabs / 2.0
            total = float(np.logaddexp.reduce(logm))
            rho2 = math.exp(2 * eta)
            need = math.log(64 / 15) + math.log(h / 2) + total - math.log(rho2 - 1) - budget
            K = max(4, int(math.ceil(need / (2 * eta))))
            K = 8 * ((K + 7) // 8)
            cost = panels * K + 3 * K
            if best is None or cost < best[0]:
                best = (cost, h, K, panels)
    if best is None:
        raise PrecisionLossError("no quadrature rule fits within the panel budget")
    _, h, K, panels = best
    lo = np.arange(panels) * h
    online = _panel_log_max(lo, lo + h, sigma, rate0, 0.0) + math.log(h)
    cond = float(np.logaddexp.reduce(online)) / LN2
    return Rule(h, K, panels, prec, cond)


class _CoefficientCache:
    """(h/2) w_k psi(tau e^{u_pk}) per panel, extended lazily; thread-safe."""

    def __init__(self):
        self._lock = threading.Lock()
        self._store: dict = {}

    def panels(self, tau, h: float, K: int, prec: int, count: int) -> list:
        key = (tau.real, tau.imag, h, K, prec)
        with self._lock:
            have = self._store.setdefault(key, [])
            if len(have) >= count:
                return have
            xs, ws = gauss_legendre(K, prec)
            with mpmath.workprec(prec):
                hh = mpmath.mpf(h)
                half = hh / 2
                for p in range(len(have), count):
                    row = []
                    for x, w in zip(xs, ws):
                        u = p * hh + half * (1 + x)
                        val = psi_sum(tau * mpmath.exp(u), prec)[0]
                        row.append(half * w * val)
                    have.append(row)
            return have

    def clear(self) -> None:
        with self._lock:
            self._store.clear()


COEFFICIENTS = _CoefficientCache()


def _rule_for(s, tau, prec: int) -> Rule:
    sigma = math.ceil(float(s.real) * 4) / 4
    tabs = 2 * math.ceil(abs(float(s.imag)) / 2)
    prec_q = 64 * ((prec + 63) // 64)
    return select_rule(sigma, float(tabs), float(abs(tau)), float(mpmath.arg(tau)), prec_q)


def _integrate(s, tau, rule: Rule, deriv: bool):
    """I(s) (and I'(s)) with the given rule at rule.prec bits."""
    K = rule.K
    xs, _ = gauss_legendre(K, rule.prec)
    coeffs = COEFFICIENTS.panels(tau, rule.h, K, rule.prec, rule.panels)
    with mpmath.workprec(rule.prec):
        h = mpmath.mpf(rule.h)
        q = h * s / 4
        center = mpmath.exp(q)
        G = [None] * K
        for k in range(K // 2, K):
            x = xs[k]
            if x == 0:
                G[k] = center
                continue
            e = mpmath.exp(q * x)
            G[k] = center * e
            G[K - 1 - k] = center / e
        if deriv:
            Gd = [g * (h / 4) * (1 + x) for g, x in zip(G, xs)]
        step = mpmath.exp(h * s / 2)
        power = mpmath.mpc(1)
        total = mpmath.mpc(0)
        dtotal = mpmath.mpc(0)
        for p in range(rule.panels):
            row = coeffs[p]
            sp = mpmath.fdot(row, G)
            total += power * sp
            if deriv:
                dtotal += power * (p * h / 2 * sp + mpmath.fdot(row, Gd))
            power *= step
        return total, dtotal


def scale_log2(s, tau=1, bits: int = 64) -> float:
    """log2 of the size of the pieces that cancel in Lambda(tau, s).

    Evaluating at ``bits + scale_log2`` bits makes the absolute error of
    Lambda about 2^-bits, which is what residuals at zeros need.
    """
    with mpmath.workprec(bits + 32):
        s = mpmath.mpc(s)
        tau = mpmath.mpc(tau)
    rule = _rule_for(s, tau, bits)
    return max(rule.cond_log2, -log2_abs(s), 0.0)


def lambda_quadrature(s, tau, bits: int, deriv: bool = False):
    """Lambda(tau, s) (and its s-derivative) to about ``bits`` relative bits.

    Returns ``(value, derivative_or_None, working_prec)``.  Guard bits are
    set from the observed cancellation between the integral and -1/s,
    measured against the a priori size of the integrand.
    """
    with mpmath.workprec(bits + 32):
        s = mpmath.mpc(s)
        tau = mpmath.mpc(tau)
    base = _rule_for(s, tau, bits + 16)
    inv_s_log2 = -log2_abs(s)
    scale_log2 = max(base.cond_log2, inv_s_log2)
    guard = 16 + max(0, int(math.ceil(scale_log2 - inv_s_log2)))
    for _ in range(4):
        prec = bits + guard
        rule = _rule_for(s, tau, prec)
        I, dI = _integrate(s, tau, rule, deriv)
        with mpmath.workprec(rule.prec):
            inner = I - 1 / s
            floor_log2 = scale_log2 - bits
            loss = scale_log2 - max(log2_abs(inner), floor_log2)
            if loss <= guard - 8:
                if tau == 1:
                    lam = inner
                    dlam = (dI + 1 / (s * s)) if deriv else None
                else:
                    ts = mpmath.exp(s / 2 * mpmath.log(tau))
                    lam = ts * inner
                    dlam = (mpmath.log(tau) / 2 * lam + ts * (1 / (s * s) + dI)) if deriv else None
                return lam, dlam, rule.prec
        guard = int(math.ceil(loss)) + 24
    raise PrecisionLossError("cancellation in the Lambda integral was not resolved")
