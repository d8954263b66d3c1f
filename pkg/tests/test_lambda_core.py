"""Lambda(tau, s), L(tau, s) and the derived critical-line quantities."""

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lavrik import (
    DomainError,
    EvalPoint,
    PoleError,
    PrecisionContext,
    PrecisionLossError,
    f_modulus,
    l_function,
    l_function_series,
    lambda_completed,
    lambda_derivative,
    lambda_value,
    mellin_barnes_check,
    riemann_siegel_theta,
    verify_decomposition,
    xi_and_Xi,
    z_from_l,
)
from lavrik.lambda_core import lambda_series, s_lambda, xi_from_zeta, z_oracle

LAMBDA_HALF = "-1.98848311275325643965109495874159"


def lambda_by_mpmath_quad(s, tau=1, dps=30):
    """-tau^{s/2}/s + tau^{s/2} int_1^inf x^{s/2-1} psi(tau x) dx, psi from jtheta."""
    with mpmath.workdps(dps + 10):
        s = mpmath.mpc(s)
        tau = mpmath.mpc(tau)

        def psi(x):
            return (mpmath.jtheta(3, 0, mpmath.exp(-mpmath.pi * x)) - 1) / 2

        integral = mpmath.quad(lambda x: x ** (s / 2 - 1) * psi(tau * x), [1, 2, 4, 8, mpmath.inf])
        return tau ** (s / 2) * (-1 / s + integral)


def close(a, b, rel):
    return abs(a - b) <= rel * max(abs(b), mpmath.mpf(10) ** -30)


def test_lambda_half(ctx):
    val = lambda_value(0.5, ctx)
    with mpmath.workprec(140):
        assert abs(val - mpmath.mpf(LAMBDA_HALF)) < mpmath.mpf(10) ** -32
        assert val.imag == 0


@pytest.mark.parametrize("s,tau", [(0.5, 1), (3 + 4j, 1), (-2.5 + 1j, 1), (0.5 + 7j, 1.3 + 0.4j), (5, 0.7)])
def test_against_independent_quadrature(s, tau, ctx):
    ref = lambda_by_mpmath_quad(s, tau)
    got = lambda_completed(EvalPoint.make(s, tau, ctx.bits), ctx).value
    assert close(got, ref, mpmath.mpf(10) ** -25)


@pytest.mark.parametrize("s", [0.5, 2 + 3j, -7 + 1j, 0.5 + 40j, 10 - 20j])
def test_series_and_quadrature_routes_agree(s, ctx):
    p = EvalPoint.make(s, 1, ctx.bits)
    a = lambda_completed(p, ctx, route="series").value
    b = lambda_completed(p, ctx, route="quadrature").value
    assert close(a, b, mpmath.ldexp(1, -110))


def test_series_route_with_complex_tau(ctx):
    p = EvalPoint.make(1.5 + 2j, 0.8 - 0.5j, ctx.bits)
    a = lambda_series(p, ctx).value
    b = lambda_completed(p, ctx).value
    assert close(a, b, mpmath.ldexp(1, -110))


def test_auto_route_and_polar_form(ctx):
    v = lambda_completed(EvalPoint.make(0.5 + 3j), ctx, route="auto")
    assert v.route == "series"
    with mpmath.workprec(128):
        assert close(mpmath.exp(v.log_modulus + 1j * v.phase), v.value, mpmath.ldexp(1, -115))
    assert lambda_completed(EvalPoint.make(0.5 + 80j), ctx, route="auto").route == "quadrature"
    with pytest.raises(ValueError):
        lambda_completed(EvalPoint.make(2), ctx, route="simpson")


def test_pole_and_domain(ctx):
    with pytest.raises(PoleError):
        lambda_value(0, ctx)
    with pytest.raises(PoleError):
        lambda_completed(EvalPoint.make(0), ctx)
    with pytest.raises(DomainError):
        EvalPoint.make(1, tau=-1)


def test_residue_at_pole(ctx):
    with mpmath.workprec(140):
        assert abs(s_lambda(mpmath.mpf(10) ** -20, ctx) + 1) < mpmath.mpf(10) ** -18
    assert s_lambda(0, ctx) == -1


@given(st.floats(-10, 15), st.floats(0.1, 60))
def test_conjugate_symmetry(sigma, t):
    ctx = PrecisionContext(bits=80)
    with mpmath.workprec(100):
        s = mpmath.mpc(sigma, t)
        a = lambda_value(s, ctx)
        b = lambda_value(mpmath.conj(s), ctx)
        assert close(b, mpmath.conj(a), mpmath.ldexp(1, -70))


def test_l_function_special_values(ctx):
    assert l_function(0, ctx) == -0.5
    assert l_function_series(EvalPoint.make(0), ctx) == -0.5
    for n in range(1, 5):
        assert l_function(-2 * n, ctx) == 0
        assert l_function_series(EvalPoint.make(-2 * n), ctx) == 0
    # L(s) = pi^{s/2} Lambda(s) / Gamma(s/2) elsewhere
    with mpmath.workprec(140):
        s = mpmath.mpc(3, 2)
        expected = lambda_value(s, ctx) * mpmath.pi ** (s / 2) / mpmath.gamma(s / 2)
        assert close(l_function(s, ctx), expected, mpmath.ldexp(1, -110))


def test_l_function_is_continuous_at_zero(ctx):
    with mpmath.workprec(140):
        assert abs(l_function(mpmath.mpf(10) ** -15, ctx) + mpmath.mpf(1) / 2) < mpmath.mpf(10) ** -13


@given(
    st.floats(-6, 7),
    st.floats(-40, 40),
    st.floats(0.3, 3),
    st.floats(-1.2, 1.2),
)
def test_decomposition_identity(sigma, t, r, phi):
    ctx = PrecisionContext(bits=128)
    if abs(sigma) < 1e-3 and abs(t) < 1e-3 or abs(sigma - 1) < 1e-3 and abs(t) < 1e-3:
        return
    with mpmath.workprec(160):
        tau = mpmath.mpc(r * mpmath.cos(phi), r * mpmath.sin(phi))
    res = verify_decomposition(EvalPoint.make(mpmath.mpc(sigma, t), tau, ctx.bits), ctx)
    assert res < 10 * ctx.eps


@pytest.mark.parametrize("s,c", [(0.5, 2), (0.5, 3.5), (-2 + 5j, 1.5), (1.5 + 10j, 2.5)])
def test_mellin_barnes(s, c, ctx):
    assert mellin_barnes_check(EvalPoint.make(s), c, ctx) < 10 * ctx.eps


def test_mellin_barnes_domain(ctx):
    with pytest.raises(DomainError):
        mellin_barnes_check(EvalPoint.make(3), 2, ctx)


@pytest.mark.parametrize("s,tau", [(0.5 + 3j, 1), (4 - 2j, 1), (-1.5 + 0.5j, 1.2 + 0.3j)])
def test_derivative_matches_numerical_differentiation(s, tau, ctx):
    p = EvalPoint.make(s, tau, ctx.bits)
    got = lambda_derivative(p, ctx)
    with mpmath.workprec(160):
        h = mpmath.mpf(10) ** -12
        ref = (lambda_value(p.s + h, ctx, tau=p.tau) - lambda_value(p.s - h, ctx, tau=p.tau)) / (2 * h)
    # central difference: truncation ~h^2, rounding ~2^-128/h
    assert close(got, ref, mpmath.mpf(10) ** -20)


def test_theta_phase_and_modulus(ctx):
    with mpmath.workprec(128):
        for t in (1, 14, 100):
            assert abs(riemann_siegel_theta(t, ctx) - mpmath.siegeltheta(t)) < mpmath.mpf(10) ** -30
            s = mpmath.mpc(0.5, t)
            ref = mpmath.log(abs(mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2)))
            assert abs(f_modulus(t, ctx) - ref) < mpmath.mpf(10) ** -30


@pytest.mark.parametrize("t", [5, 20, 50])
def test_z_matches_oracle(t):
    ctx = PrecisionContext(bits=200)
    a = z_from_l(t, ctx)
    b = z_oracle(t, ctx)
    with mpmath.workprec(200):
        assert abs(a - b) < mpmath.mpf(10) ** -40
        assert abs(a - mpmath.siegelz(t)) < mpmath.mpf(10) ** -12


def test_z_vanishes_at_first_zeta_zero(zeta_ordinates):
    ctx = PrecisionContext(bits=160)
    assert abs(z_from_l(zeta_ordinates[0], ctx)) < mpmath.mpf(10) ** -25


def test_z_refuses_insufficient_precision():
    with pytest.raises(PrecisionLossError):
        z_from_l(200, PrecisionContext(bits=128))


@pytest.mark.parametrize("z", [0.3, 14.134725141734693790457, 2 + 0.5j])
def test_xi_forms_agree(z, ctx):
    xi, Xi, F = xi_and_Xi(z, ctx)
    with mpmath.workprec(140):
        zz = mpmath.mpc(z)
        ref = xi_from_zeta(0.5 + 1j * zz, ctx)
        assert abs(Xi - ref) <= mpmath.mpf(10) ** -30 * max(abs(ref), 1)
        assert xi == Xi
        # F(z) + F(-z) is Xi by construction; F alone is not even
        assert abs(F - xi_and_Xi(-zz, ctx)[2]) > 0


def test_xi_at_half(ctx):
    xi = xi_and_Xi(0, ctx)[0]
    with mpmath.workprec(128):
        assert abs(xi - mpmath.mpf("0.49712077818831410991277373968")) < mpmath.mpf(10) ** -28


@pytest.mark.parametrize("s", [0.5 + 30j, 8 - 3j, -4.5 + 12j])
def test_precision_doubling_confirms_rule(s, ctx):
    lo = lambda_value(s, ctx)
    hi = lambda_value(s, ctx.with_bits(2 * ctx.bits))
    with mpmath.workprec(2 * ctx.bits):
        assert abs(lo - hi) <= ctx.eps * abs(hi)


def test_xi_is_real_on_real_axis(ctx):
    Xi = xi_and_Xi(7.5, ctx)[1]
    with mpmath.workprec(128):
        assert abs(Xi.imag) < mpmath.mpf(10) ** -30 * abs(Xi)
