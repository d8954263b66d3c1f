"""Acceptance checks at the required tolerances.

Each check records one PASS/FAIL line (printed in the terminal summary
under "acceptance criteria").  Two component checks of criterion 1
compare against reference real parts of Lambda on the critical line that
are far above the true values; they are asserted as stated and marked
as expected failures.
"""

import json
import math
import random
import re
import time
from fractions import Fraction

import mpmath
import pytest

from lavrik import (
    EvalPoint,
    PrecisionContext,
    lambda_value,
    mellin_barnes_check,
    verify_decomposition,
    z_from_l,
)
from lavrik.cli import main as cli_main
from lavrik.hadamard_product import (
    alpha_constant,
    alpha_from_expansion,
    arg_track,
    critical_line_gap,
    partial_product,
    product_constants,
    u_function,
)
from lavrik.lambda_core import z_oracle
from lavrik.theta_kernel import theta, theta_functional_check
from lavrik.zero_atlas import (
    enumerate_zeros,
    load_atlas,
    refine_zero,
    verify_halfplane,
    zero_stats,
)

from conftest import ATLAS_PATH

REFERENCE = {
    "b0": "11.25170908146",
    "alpha": "0.010906559198968892180277118987156",
    "A": "1.0864348112",
    "lambda_half": "-1.988483112753",
    "lambda_100": ("6.844655e-16", "0.010862286"),
    "lambda_1000": ("7.955229e-17", "0.0010864328"),
}

CTX = PrecisionContext(bits=128)


def rel_ok(got, ref, rel):
    return abs(got - ref) <= rel * abs(ref)


def sign_changes(ts, values):
    """Grid intervals (t_i, t_{i+1}) over which the values change sign."""
    out = []
    for (t0, v0), (t1, v1) in zip(zip(ts, values), zip(ts[1:], values[1:])):
        if v0 * v1 < 0:
            out.append((t0, t1))
    return out


def bracket_root(f, lo, hi, tol):
    """Illinois iteration on a sign-changing bracket."""
    flo, fhi = f(lo), f(hi)
    side = 0
    while hi - lo > tol:
        mid = (lo * fhi - hi * flo) / (fhi - flo)
        if not lo < mid < hi:
            mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
            if side == -1:
                fhi /= 2
            side = -1
        else:
            hi, fhi = mid, fm
            if side == 1:
                flo /= 2
            side = 1
        if abs(fm) < mpmath.mpf(10) ** -45:
            return mid
    return (lo + hi) / 2


@pytest.fixture(scope="module")
def oracle_zeros():
    """Zeta-zero ordinates in (10, 60) from the Euler-Maclaurin oracle."""
    ctx = PrecisionContext(bits=200)
    with mpmath.workprec(200):
        grid = [mpmath.mpf(10) + mpmath.mpf(k) / 10 for k in range(0, 501)]
        vals = [z_oracle(t, ctx) for t in grid]
        roots = [bracket_root(lambda t: z_oracle(t, ctx), lo, hi, mpmath.mpf(10) ** -12)
                 for lo, hi in sign_changes(grid, vals)]
    return roots


# ---------------------------------------------------------------------------
# 1. Constants
# ---------------------------------------------------------------------------


def test_c1_b0(accept):
    t0 = time.time()
    rec = refine_zero(mpmath.mpf("11.25"), CTX)
    err = abs(rec.beta - mpmath.mpf(REFERENCE["b0"]))
    assert accept(1, "b0 = 11.25170908146 (+-1e-9)", err <= 1e-9,
                  f"computed {mpmath.nstr(rec.beta, 20)}, {time.time() - t0:.1f} s")


def test_c1_alpha(accept):
    t0 = time.time()
    a = alpha_constant(CTX)
    with mpmath.workprec(128):
        ok = mpmath.nstr(a, 30) == mpmath.nstr(mpmath.mpf(REFERENCE["alpha"]), 30)
    assert accept(1, "alpha to 30 digits", ok, f"computed {mpmath.nstr(a, 33)}, {time.time() - t0:.1f} s")


def test_c1_A(accept):
    A = theta(1, CTX).value.real
    assert accept(1, "A = theta(1) = 1.0864348112 (+-1e-9)", abs(A - mpmath.mpf(REFERENCE["A"])) <= 1e-9,
                  f"computed {mpmath.nstr(A, 20)}")


def test_c1_lambda_half(accept):
    v = lambda_value(0.5, CTX)
    ok = abs(v - mpmath.mpf(REFERENCE["lambda_half"])) <= 1e-10
    assert accept(1, "Lambda(1/2) = -1.988483112753 (+-1e-10)", ok, f"computed {mpmath.nstr(v.real, 20)}")


_LINE_VALUES = {}


def _line_value(t, bits):
    key = (t, bits)
    if key not in _LINE_VALUES:
        t0 = time.time()
        with mpmath.workprec(bits):
            s = mpmath.mpc(mpmath.mpf(1) / 2, t)
        _LINE_VALUES[key] = (lambda_value(s, PrecisionContext(bits=bits)), time.time() - t0)
    return _LINE_VALUES[key]


def test_c1_lambda_100_imag(accept):
    v, dt = _line_value(100, 256)
    ok = rel_ok(v.imag, mpmath.mpf(REFERENCE["lambda_100"][1]), 1e-5)
    assert accept(1, "Im Lambda(1/2+100i) = 0.010862286 (rel 1e-5, 256 bits)", ok,
                  f"computed {mpmath.nstr(v.imag, 15)}, {dt:.1f} s")


@pytest.mark.xfail(strict=True, reason="reference real part is rounding noise; true value ~7.4e-35")
def test_c1_lambda_100_real(accept):
    v, _ = _line_value(100, 256)
    # independent check of the true size: Re Lambda = f(t) Z(t) / 2
    with mpmath.workprec(256):
        s = mpmath.mpc(0.5, 100)
        expected = abs(mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2)) * mpmath.siegelz(100) / 2
        assert abs(v.real - expected) < mpmath.mpf(10) ** -12 * abs(expected)
    ok = rel_ok(v.real, mpmath.mpf(REFERENCE["lambda_100"][0]), 1e-5)
    accept(1, "Re Lambda(1/2+100i) = 6.844655e-16 (rel 1e-5, 256 bits)", ok,
           f"computed {mpmath.nstr(v.real, 15)} = f(t)Z(t)/2 from mpmath.siegelz")
    assert ok


def test_c1_lambda_1000_imag(accept):
    v, dt = _line_value(1000, 1400)
    ok = rel_ok(v.imag, mpmath.mpf(REFERENCE["lambda_1000"][1]), 1e-5)
    assert accept(1, "Im Lambda(1/2+1000i) = 0.0010864328 (rel 1e-5, 1400 bits)", ok,
                  f"computed {mpmath.nstr(v.imag, 15)}, {dt:.1f} s")


@pytest.mark.xfail(strict=True, reason="reference real part is rounding noise; true value ~1.6e-342")
def test_c1_lambda_1000_real(accept):
    v, _ = _line_value(1000, 1400)
    with mpmath.workprec(1400):
        s = mpmath.mpc(0.5, 1000)
        expected = abs(mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2)) * mpmath.siegelz(1000) / 2
        assert abs(v.real - expected) < mpmath.mpf(10) ** -12 * abs(expected)
    ok = rel_ok(v.real, mpmath.mpf(REFERENCE["lambda_1000"][0]), 1e-5)
    accept(1, "Re Lambda(1/2+1000i) = 7.955229e-17 (rel 1e-5, 1400 bits)", ok,
           f"computed {mpmath.nstr(v.real, 15)} = f(t)Z(t)/2 from mpmath.siegelz")
    assert ok


# ---------------------------------------------------------------------------
# 2. Identity suites
# ---------------------------------------------------------------------------


def test_c2_identities(accept):
    rng = random.Random(20240601)
    tol = 10 * CTX.eps
    t0 = time.time()
    worst_dec = mpmath.mpf(0)
    complex_tau = 0
    for _ in range(100):
        with mpmath.workprec(160):
            s = mpmath.mpc(rng.uniform(-6, 7), rng.uniform(-40, 40))
            r, phi = math.exp(rng.uniform(-1.2, 1.2)), rng.uniform(-1.3, 1.3)
            tau = mpmath.mpc(r * math.cos(phi), r * math.sin(phi))
        complex_tau += tau.imag != 0
        worst_dec = max(worst_dec, verify_decomposition(EvalPoint.make(s, tau, CTX.bits), CTX))
    t_dec = time.time() - t0
    ok_dec = accept(2, "decomposition residual < 10 eps, 100 random (tau, s)",
                    worst_dec < tol and complex_tau > 50,
                    f"max {mpmath.nstr(worst_dec, 3)} vs {mpmath.nstr(tol, 3)}, "
                    f"{complex_tau} complex tau, {t_dec:.0f} s")

    t0 = time.time()
    points = [0.5, 2 + 3j, -1.5 + 2j, 0.25 + 8j, 1.5 - 4j, -3 + 1j, 0.75 + 12j, 3 + 5j, -0.5 - 6j, 1 + 10j]
    worst_mb = mpmath.mpf(0)
    for s in points:
        base = max(complex(s).real, 1)
        for c in (base + 1, base + 2.5):
            worst_mb = max(worst_mb, mellin_barnes_check(EvalPoint.make(s), c, CTX))
    t_mb = time.time() - t0
    ok_mb = accept(2, "Mellin-Barnes residual < 10 eps, 10 points x 2 abscissae", worst_mb < tol,
                   f"max {mpmath.nstr(worst_mb, 3)}, {t_mb:.0f} s")

    t0 = time.time()
    worst_th = mpmath.mpf(0)
    for _ in range(50):
        r, phi = math.exp(rng.uniform(-2, 2)), rng.uniform(-1.4, 1.4)
        with mpmath.workprec(160):
            z = mpmath.mpc(r * math.cos(phi), r * math.sin(phi))
        worst_th = max(worst_th, theta_functional_check(z, CTX))
    t_th = time.time() - t0
    ok_th = accept(2, "theta functional equation residual < eps, 50 samples", worst_th < CTX.eps,
                   f"max {mpmath.nstr(worst_th, 3)} vs {mpmath.nstr(CTX.eps, 3)}, {t_th:.1f} s")
    total = t_dec + t_mb + t_th
    ok_time = accept(2, "identity suites within 2 minutes at 128 bits", total <= 120, f"{total:.0f} s")
    assert ok_dec and ok_mb and ok_th and ok_time


# ---------------------------------------------------------------------------
# 3. Z reconstruction
# ---------------------------------------------------------------------------


def test_c3_z_reconstruction(accept, oracle_zeros, zeta_ordinates):
    ctx = PrecisionContext(bits=200)  # 60 digits
    t0 = time.time()
    worst = mpmath.mpf(0)
    for t in range(10, 101, 10):
        worst = max(worst, abs(z_from_l(t, ctx) - z_oracle(t, ctx)))
    ok_vals = accept(3, "|Z_from_L - Z_oracle| < 1e-10 at t = 10, 20, ..., 100 (60 digits)",
                     worst < 1e-10, f"max {mpmath.nstr(worst, 3)}")
    with mpmath.workprec(200):
        grid = [mpmath.mpf(10) + mpmath.mpf(k) / 10 for k in range(0, 501)]
        vals = [z_from_l(t, ctx) for t in grid]
        roots = [bracket_root(lambda t: z_from_l(t, ctx), lo, hi, mpmath.mpf(10) ** -12)
                 for lo, hi in sign_changes(grid, vals)]
    dt = time.time() - t0
    same = len(roots) == len(oracle_zeros)
    dev = max((abs(a - b) for a, b in zip(roots, oracle_zeros)), default=mpmath.mpf(1)) if same else mpmath.inf
    ok_roots = accept(3, "sign changes of Z_from_L on (10, 60) at oracle zeros within 1e-6",
                      same and dev < 1e-6,
                      f"{len(roots)} changes vs {len(oracle_zeros)} oracle zeros, max deviation {mpmath.nstr(dev, 3)}")
    # the oracle itself against reference ordinates
    ref_dev = max(abs(a - b) for a, b in zip(oracle_zeros, zeta_ordinates))
    ok_ref = len(oracle_zeros) == len(zeta_ordinates) and ref_dev < 1e-10
    ok_time = accept(3, "Z reconstruction within 5 minutes", dt <= 300, f"{dt:.0f} s")
    assert ok_vals and ok_roots and ok_ref and ok_time


# ---------------------------------------------------------------------------
# 4. Zero atlas to height 200
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def fresh_atlas(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("atlas") / "zeros.jsonl")
    t0 = time.time()
    atlas = enumerate_zeros(200, CTX, path=path)
    return atlas, path, time.time() - t0


def test_c4_atlas(accept, fresh_atlas, atlas):
    zeros, path, dt = fresh_atlas
    report = verify_halfplane(zeros)
    ok_hp = accept(4, "half-plane: min Re b >= b0 - 1e-6", report.passed,
                   f"{len(zeros)} zeros with Im b <= 200, min Re {report.min_re:.12f}, b0 {report.b0:.12f}")
    moduli = [abs(r.b) for r in zeros]
    ordered = moduli == sorted(moduli) and [r.n for r in zeros] == list(range(len(zeros)))
    upper = zeros[0].b.imag == 0 and all(r.b.imag > 0 for r in zeros[1:])
    conj_ok = all(abs(r.conjugate().b - mpmath.conj(r.b)) == 0 for r in zeros)
    ok_inv = accept(4, "conjugate / ordering invariants", ordered and upper and conj_ok,
                    "upper half-plane table ordered by modulus, conjugates implied")
    ok_wind = accept(4, "winding total equals zero count", zeros.total_winding == len(zeros),
                     f"winding {zeros.total_winding}, zeros {len(zeros)}")
    stats = zero_stats(zeros, [float(x) for x in range(15, 201, 5)], coverage=200)
    ok_count = accept(4, "N(x) residual |R| < 5 on x in [15, 200]", stats.max_abs_count_residual < 5,
                      f"max |R| = {stats.max_abs_count_residual:.3f}")
    law = [r.law_residual for r in stats.laws if r.n > 0]
    ok_ineq = accept(4, "gamma / log(gamma / 2 pi) >= 2 beta / pi for every zero", stats.inequality_all,
                     f"gamma - beta log(beta/4 pi): min {min(law):.3f}, max {max(law):.3f}")
    shipped = [r for r in atlas if r.gamma <= 200]
    same = len(shipped) == len(zeros) and all(abs(a.b - b.b) < 1e-30 for a, b in zip(shipped, zeros))
    ok_time = accept(4, "enumeration within 30 minutes (1 worker)", dt <= 1800,
                     f"{dt:.0f} s; agrees with shipped table: {same}")
    assert ok_hp and ok_inv and ok_wind and ok_count and ok_ineq and ok_time and same


def test_c4_resumable(accept, fresh_atlas, tmp_path):
    zeros, path, _ = fresh_atlas
    state = json.load(open(path + ".state.json"))
    ok = Fraction(state["t_done"]) == 200 and state["total_winding"] == len(zeros)
    # the shipped table was produced by resuming this pipeline chunk by chunk
    shipped = load_atlas(ATLAS_PATH)
    assert accept(4, "table is resumable (state file, shipped extension to Im 620)",
                  ok and shipped.t_max >= 600 and shipped.total_winding == len(shipped),
                  f"state t_done={state['t_done']}, shipped {len(shipped)} zeros to {shipped.t_max:g}")


# ---------------------------------------------------------------------------
# 5. Argument representation
# ---------------------------------------------------------------------------


def test_c5_argument(accept):
    t0 = time.time()
    track = arg_track(200, CTX)
    late = [(t, a) for t, a in zip(track.t_grid, track.a_values) if t > 10]
    worst = max(abs(a) for _, a in late)
    ok_bound = accept(5, "|a(t)| <= 0.19 for sampled t in (10, 200]", worst <= 0.19,
                      f"{len(late)} samples, max |a| = {mpmath.nstr(worst, 6)}")

    window = [(t, a) for t, a in zip(track.t_grid, track.a_values) if 10 < t < 60]
    ts = [t for t, _ in window]
    a_changes = sign_changes(ts, [a for _, a in window])
    z_changes = sign_changes(ts, [z_oracle(t, CTX) for t in ts])
    ok_sets = accept(5, "sign changes of a(t) and Z(t) coincide on (10, 60)", a_changes == z_changes,
                     f"{len(a_changes)} vs {len(z_changes)} grid intervals")

    sample = [mpmath.mpf(k) * 3 - mpmath.mpf("0.5") for k in range(1, 21)]
    us = [u_function(t, CTX) for t in sample]
    ok_u = accept(5, "u(t) > 0 at 20 points in (0, 60)", all(u > 0 for u in us),
                  f"min u = {mpmath.nstr(min(us), 5)}")

    A = theta(1, CTX).value.real
    gaps = [critical_line_gap(mpmath.mpf(k) / 4, CTX, A) for k in range(0, 801)]
    ok_gap = accept(5, "|s Lambda(s) + A| <= 0.0922 on the critical line, t in [0, 200]",
                    max(gaps) <= 0.0922, f"801 samples, max {mpmath.nstr(max(gaps), 6)}")
    dt = time.time() - t0
    ok_time = accept(5, "argument checks within 10 minutes", dt <= 600, f"{dt:.0f} s")
    assert ok_bound and ok_sets and ok_u and ok_gap and ok_time


# ---------------------------------------------------------------------------
# 6. Product expansion
# ---------------------------------------------------------------------------


def test_c6_product(accept, atlas):
    consts = product_constants(CTX, b0=atlas[0].beta)
    assert len(atlas) >= 201
    all_ok = True
    for s in (0.5, 2, 5 + 5j):
        target = lambda_value(s, CTX)
        errs = [abs(partial_product(s, atlas, consts, CTX, cutoff=n) - target) for n in (50, 100, 200)]
        ok = errs[0] > errs[1] > errs[2]
        all_ok &= accept(6, f"product error strictly decreasing over cutoffs 50, 100, 200 at s = {s}", ok,
                         ", ".join(mpmath.nstr(e, 4) for e in errs))
    fd = alpha_from_expansion(CTX)
    diff = abs(fd - consts.alpha)
    all_ok &= accept(6, "alpha from log-expansion finite difference matches to 1e-8", diff < 1e-8,
                     f"difference {mpmath.nstr(diff, 3)}")
    assert all_ok


# ---------------------------------------------------------------------------
# 7. Figures
# ---------------------------------------------------------------------------


def _csv_curves(path):
    import csv

    curves = {}
    with open(path) as fh:
        for row in csv.DictReader(fh):
            curves.setdefault((row["kind"], int(row["idx"])), []).append(
                (mpmath.mpf(row["re"]), mpmath.mpf(row["im"])))
    return curves


def test_c7_figures(accept, oracle_zeros, fresh_atlas, tmp_path, capsys):
    t0 = time.time()
    csv_path = str(tmp_path / "xray_lambda.csv")
    code = cli_main(["xray", "--which", "Lambda", "--region", "-10", "30", "-20", "40", "--nx", "401",
                     "--ny", "401", "--refine-critical", "--format", "csv", "--out", csv_path, "--quiet"])
    assert code == 0
    curves = _csv_curves(csv_path)
    near = []
    for (kind, _), pts in curves.items():
        if kind != "imaginary_line":
            continue
        seg = [(x, y) for x, y in pts if 15 <= y <= 40]
        if seg and max(abs(x - mpmath.mpf(0.5)) for x, _ in seg) <= 0.5 \
                and min(y for _, y in seg) <= 15.5 and max(y for _, y in seg) >= 39.5:
            near.append(pts)
    ok_curve = accept(7, "imaginary-kind curve within 0.5 of Re s = 1/2 for t in [15, 40]", len(near) >= 1,
                      f"{len(near)} such curve(s)")
    crossings = sorted({y for pts in near for x, y in pts if x == mpmath.mpf(0.5) and 15 <= y <= 40})
    expected = [z for z in oracle_zeros if 15 <= z <= 40]
    dev = max((abs(a - b) for a, b in zip(crossings, expected)), default=mpmath.inf) \
        if len(crossings) == len(expected) else mpmath.inf
    ok_cross = accept(7, "its critical-line crossings match oracle zeta zeros to 1e-3", dev < 1e-3,
                      f"{len(crossings)} crossings, max deviation {mpmath.nstr(dev, 3)}")

    svg_l = str(tmp_path / "xray_L.svg")
    code_l = cli_main(["xray", "--which", "L", "--region", "-10", "30", "-20", "40", "--nx", "401",
                       "--ny", "401", "--out", svg_l, "--quiet"])
    ok_l = accept(7, "L panel of the same region renders", code_l == 0 and "<polyline" in open(svg_l).read())

    zeros, atlas_path, _ = fresh_atlas
    svg_uno = str(tmp_path / "zeros_sLambda.svg")
    code_u = cli_main(["xray", "--which", "sLambda", "--region", "-2", "200", "-2", "200", "--nx", "401",
                       "--ny", "401", "--zeros", atlas_path, "--out", svg_uno, "--quiet"])
    text = open(svg_uno).read()
    marks = [(float(x), float(y)) for x, y in re.findall(r'class="zero" cx="([\d.]+)" cy="([\d.]+)"', text)]
    inside = all(0 <= x <= 800 and 0 <= y <= 800 for x, y in marks)
    in_box = [r for r in zeros if -2 <= r.beta <= 200 and -2 <= r.gamma <= 200]
    ok_uno = accept(7, "zeros of s Lambda on (-2, 200)^2: every atlas zero marked inside the box",
                    code_u == 0 and len(marks) == len(in_box) and inside,
                    f"{len(marks)} markers for {len(in_box)} atlas zeros")
    dt = time.time() - t0
    accept(7, "figure generation time (informational)", True, f"{dt:.0f} s")
    capsys.readouterr()
    assert ok_curve and ok_cross and ok_l and ok_uno
