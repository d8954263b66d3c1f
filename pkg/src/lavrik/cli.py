"""Command-line front end.

    lavrik eval --which Lambda --sigma 0.5 --t 0
    lavrik verify --which decomposition --samples 50 --seed 1
    lavrik zeros --t-max 200 --out zeros.jsonl
    lavrik xray --which Lambda --region -10 30 -20 40 --out xray.svg
    lavrik argtrack --t-max 200 --out arg.csv

Every JSON document carries the tool version and the effective
configuration; numbers are decimal strings.  Exit codes: 0 success,
1 a verification failed, 2 domain error, 3 precision loss.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from typing import Optional

import mpmath

from . import __version__
from .context import DomainError, LavrikError, PrecisionContext, PrecisionLossError, critical_line_bits

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_DOMAIN = 2
EXIT_PRECISION = 3

BITS_ENV = "LAVRIK_BITS"
DEFAULT_BITS = 128


def _default_bits() -> int:
    raw = os.environ.get(BITS_ENV)
    if not raw:
        return DEFAULT_BITS
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"{BITS_ENV} must be an integer, got {raw!r}")


def _dec(x, digits: int = 17) -> str:
    """Decimal string of a real number (mpmath keeps every requested digit)."""
    if not isinstance(x, mpmath.mpf):
        x = mpmath.mpf(x)
    return mpmath.nstr(x, digits, min_fixed=-4, max_fixed=16)


def _complex_doc(z, digits: int, err=None) -> dict:
    doc = {"re": _dec(z.real, digits), "im": _dec(z.imag, digits)}
    if err is not None:
        doc["error_estimate"] = mpmath.nstr(err, 3)
    return doc


def _context(args) -> PrecisionContext:
    return PrecisionContext(bits=args.bits, eps=args.eps)


def _config(args) -> dict:
    skip = {"func"}
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        cfg[k] = v if isinstance(v, (int, str, bool, type(None), list)) else str(v)
    return cfg


def _emit(args, doc: dict, text: Optional[str] = None, stdout: bool = False) -> None:
    """Write the document (JSON by default) to --out, or to stdout when
    there is no --out or ``stdout`` is set."""
    payload = {"tool": "lavrik", "version": __version__, "config": _config(args)}
    payload.update(doc)
    if args.format == "text" and text is not None:
        out = text
    else:
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out and not stdout:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _digits(ctx: PrecisionContext) -> int:
    return max(15, int(ctx.eps_bits * math.log10(2)))


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _decimal(text: str) -> str:
    """argparse type: a real number kept as text, converted at working precision."""
    float(text)
    return text


def cmd_eval(args) -> int:
    from .lambda_core import EvalPoint, l_function, lambda_completed, xi_and_Xi, z_from_l
    from .theta_kernel import theta

    ctx = _context(args)
    digits = _digits(ctx)
    with mpmath.workprec(ctx.bits + 32):
        s = mpmath.mpc(mpmath.mpf(args.sigma), mpmath.mpf(args.t))
        tau = mpmath.mpc(mpmath.mpf(args.tau_re), mpmath.mpf(args.tau_im))
    which = args.which
    if which == "Lambda":
        value = lambda_completed(EvalPoint.make(s, tau, ctx.bits), ctx).value
    elif which == "L":
        value = l_function(s, ctx, tau)
    elif which == "Z":
        need = critical_line_bits(float(args.t))
        if args.bits < need:
            raise PrecisionLossError(f"Z({args.t}) needs --bits >= {need}")
        with mpmath.workprec(ctx.bits + 32):
            value = mpmath.mpc(z_from_l(s.imag, ctx))
    elif which == "theta":
        value = theta(s, ctx).value
    elif which == "Xi":
        value = xi_and_Xi(s, ctx)[1]
    else:  # argparse restricts the choices
        raise DomainError(which)
    with mpmath.workprec(ctx.bits):
        err = abs(value) * ctx.eps
        if which == "Z":
            # Re Lambda on the critical line cancels about pi t / (4 log 2) bits
            err = mpmath.ldexp(err, need - 64)
        _emit(args, {"which": which, "value": _complex_doc(value, digits, err)},
              text=f"{_dec(value.real, digits)} {_dec(value.imag, digits)}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _random_tau(rng: random.Random) -> mpmath.mpc:
    r = math.exp(rng.uniform(-1.0, 1.0))
    phi = rng.uniform(-1.2, 1.2)
    return mpmath.mpc(r * math.cos(phi), r * math.sin(phi))


def cmd_verify(args) -> int:
    from .lambda_core import EvalPoint, mellin_barnes_check, verify_decomposition
    from .theta_kernel import theta_functional_check

    ctx = _context(args)
    rng = random.Random(args.seed)
    t_lo, t_hi = args.t_range
    rows = []
    with mpmath.workprec(ctx.bits + 32):
        tol = 10 * ctx.eps if args.which != "theta_fe" else ctx.eps
    if args.which == "decomposition":
        for _ in range(args.samples):
            with mpmath.workprec(ctx.bits + 32):
                s = mpmath.mpc(rng.uniform(-4, 5), rng.uniform(t_lo, t_hi))
                tau = _random_tau(rng) if rng.random() < 0.75 else mpmath.mpc(rng.uniform(0.3, 3))
            res = verify_decomposition(EvalPoint.make(s, tau, ctx.bits), ctx)
            rows.append({"s": _complex_doc(s, 17), "tau": _complex_doc(tau, 17), "residual": mpmath.nstr(res, 5)})
    elif args.which == "mellin":
        points = [complex(args.sigma, args.t)] if args.sigma is not None else [
            complex(rng.uniform(-3, 1.5), rng.uniform(t_lo, t_hi)) for _ in range(args.samples)]
        for s in points:
            for c in args.c:
                if c <= max(s.real, 1):
                    raise DomainError(f"c = {c} must exceed max(Re s, 1) = {max(s.real, 1)}")
                res = mellin_barnes_check(EvalPoint.make(s, 1, ctx.bits), c, ctx)
                rows.append({"s": _complex_doc(mpmath.mpc(s), 17), "c": str(c), "residual": mpmath.nstr(res, 5)})
    else:
        points = [complex(1, 0)] if args.sigma is None else [complex(args.sigma, args.t)]
        points += [complex(math.exp(rng.uniform(-1, 1)) * math.cos(p), math.exp(rng.uniform(-1, 1)) * math.sin(p))
                   for p in (rng.uniform(-1.2, 1.2) for _ in range(args.samples - 1))]
        for z in points:
            res = theta_functional_check(mpmath.mpc(z), ctx)
            rows.append({"z": _complex_doc(mpmath.mpc(z), 17), "residual": mpmath.nstr(res, 5)})
    worst = max((mpmath.mpf(r["residual"]) for r in rows), default=mpmath.mpf(0))
    passed = bool(worst < tol)
    _emit(args, {"which": args.which, "rows": rows, "max_residual": mpmath.nstr(worst, 5),
                 "tolerance": mpmath.nstr(tol, 5), "passed": passed},
          text=f"{args.which}: max residual {mpmath.nstr(worst, 5)} tol {mpmath.nstr(tol, 5)} "
               f"{'PASS' if passed else 'FAIL'}\n")
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# zeros
# ---------------------------------------------------------------------------


def cmd_zeros(args) -> int:
    from .zero_atlas import enumerate_zeros, verify_halfplane, zero_stats

    ctx = _context(args)
    path = args.resume or args.out
    if path is None:
        raise DomainError("zeros needs --out PATH (or --resume PATH)")
    if args.out and not args.resume:
        for p in (path, path + ".state.json"):
            if os.path.exists(p):
                os.remove(p)

    def progress(msg: str) -> None:
        if not args.quiet:
            print(msg, file=sys.stderr)

    atlas = enumerate_zeros(args.t_max, ctx, path=path, resume=bool(args.resume),
                            workers=args.workers, progress=progress)
    report = verify_halfplane(atlas)
    grid = [x for x in range(20, int(args.t_max) + 1, 20)]
    stats = zero_stats(atlas, grid, coverage=args.t_max)
    laws = [{"n": r.n, "law_residual": f"{r.law_residual:.6g}", "inequality": r.inequality_holds}
            for r in stats.laws]
    summary = {
        "table": path,
        "count": len(atlas),
        "total_winding": atlas.total_winding,
        "halfplane": {"passed": report.passed, "b0": repr(report.b0), "min_re": repr(report.min_re)},
        "counting": [{"x": r.x, "empirical": r.empirical, "formula": f"{r.formula:.6f}",
                      "residual": f"{r.residual:.6f}"} for r in stats.counts],
        "max_abs_count_residual": f"{stats.max_abs_count_residual:.6f}",
        "laws": laws,
        "inequality_all": stats.inequality_all,
    }
    doc = {"summary": summary}
    # the table itself lives in the JSON-lines file; the summary goes to stdout
    _emit(args, doc, text=f"{len(atlas)} zeros, half-plane {'PASS' if report.passed else 'FAIL'}\n",
          stdout=True)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# xray
# ---------------------------------------------------------------------------


def cmd_xray(args) -> int:
    from .xray_plotter import Region, extract_curves, render, sign_grid
    from .zero_atlas import load_atlas

    ctx = _context(args)
    region = Region(*args.region)
    grid = sign_grid(args.which, region, args.nx, args.ny, ctx)
    refine_region = None
    if args.refine_critical:
        h = (region.sigma2 - region.sigma1) / (args.nx - 1)
        refine_region = Region(0.5 - 1.5 * h, 0.5 + 1.5 * h, region.t1, region.t2)
    curves = extract_curves(grid, refine=args.refine or args.refine_critical, ctx=ctx,
                            refine_region=refine_region)
    zeros = []
    if args.zeros:
        for r in load_atlas(args.zeros):
            for b in ((r.b,) if r.b.imag == 0 else (r.b, mpmath.conj(r.b))):
                if region.sigma1 <= b.real <= region.sigma2 and region.t1 <= b.imag <= region.t2:
                    zeros.append(b)
    fmt = args.format or "svg"
    if fmt not in ("svg", "csv"):
        raise DomainError("xray writes svg or csv")
    doc = render(curves, zeros, fmt=fmt, region=region, thick=args.thick, thin=args.thin,
                 title=f"lavrik {__version__} xray {args.which} {' '.join(map(str, args.region))} "
                       f"{args.nx}x{args.ny} bits={args.bits}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(doc)
    else:
        sys.stdout.write(doc)
    if not args.quiet:
        print(f"{len(curves)} curves, {len(zeros)} zero markers, {grid.escalated} nodes escalated",
              file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argtrack
# ---------------------------------------------------------------------------


def cmd_argtrack(args) -> int:
    from .hadamard_product import alpha_constant, arg_track
    from .theta_kernel import theta

    ctx = _context(args)
    track = arg_track(args.t_max, ctx)
    A = theta(1, ctx).value.real
    with mpmath.workprec(ctx.bits):
        bound = mpmath.asin(mpmath.mpf("0.2") / A)
        late = [abs(a) for t, a in zip(track.t_grid, track.a_values) if t > 10]
        worst = max(late, default=mpmath.mpf(0))
        alpha = alpha_constant(ctx)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(track.to_csv())
    passed = bool(worst <= mpmath.mpf("0.19"))
    report = {
        "points": len(track.t_grid),
        "anchor": {"t": _dec(track.t_grid[0], 5), "arg": _dec(track.arg_values[0], 30)},
        "max_abs_a_beyond_10": mpmath.nstr(worst, 10),
        "bound_arcsin": mpmath.nstr(bound, 12),
        "bound_checked": "0.19",
        "passed": passed,
        "alpha": mpmath.nstr(alpha, 30),
        "csv": args.out,
    }
    _emit(args, {"report": report},
          text=f"max |a(t)| for t>10: {mpmath.nstr(worst, 6)}; alpha = {mpmath.nstr(alpha, 30)}\n",
          stdout=True)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bits", type=int, default=_default_bits(),
                        help=f"working precision in bits (default ${BITS_ENV} or {DEFAULT_BITS})")
    common.add_argument("--eps", type=float, default=None, help="target relative error (default 2^-(bits-8))")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv", "svg", "text"), default=None,
                        help="output format (default json; svg for xray)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for zeros")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--quiet", action="store_true", help="no progress on stderr")

    ap = argparse.ArgumentParser(prog="lavrik", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"lavrik {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate one function value")
    p.add_argument("--which", choices=("L", "Lambda", "Z", "theta", "Xi"), default="Lambda")
    p.add_argument("--sigma", type=_decimal, default="0.5", help="real part (for theta and Xi: of z)")
    p.add_argument("--t", type=_decimal, default="0", help="imaginary part (for Z: the height t)")
    p.add_argument("--tau-re", type=_decimal, default="1")
    p.add_argument("--tau-im", type=_decimal, default="0")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", parents=[common], help="check an identity at sampled points")
    p.add_argument("--which", choices=("decomposition", "mellin", "theta_fe"), default="decomposition")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--t-range", type=float, nargs=2, default=(-30.0, 30.0), metavar=("LO", "HI"))
    p.add_argument("--sigma", type=float, default=None, help="single point instead of random samples")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--c", type=float, nargs="+", default=[2.0], help="abscissae of the vertical line")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zeros", parents=[common], help="enumerate zeros of s Lambda(s)")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--resume", default=None, metavar="PATH", help="extend an existing table in place")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("xray", parents=[common], help="X-ray plot as SVG or CSV")
    p.add_argument("--which", choices=("Lambda", "L", "sLambda"), default="Lambda")
    p.add_argument("--region", type=float, nargs=4, default=(-10.0, 30.0, -20.0, 40.0),
                   metavar=("S1", "S2", "T1", "T2"))
    p.add_argument("--nx", type=int, default=401)
    p.add_argument("--ny", type=int, default=401)
    p.add_argument("--refine", action="store_true", help="polish every vertex")
    p.add_argument("--refine-critical", action="store_true", help="polish vertices next to Re s = 1/2")
    p.add_argument("--zeros", default=None, help="JSON-lines zero table for markers")
    p.add_argument("--thick", type=float, default=1.6, help="stroke width of real lines")
    p.add_argument("--thin", type=float, default=0.6, help="stroke width of imaginary lines")
    p.set_defaults(func=cmd_xray)

    p = sub.add_parser("argtrack", parents=[common], help="continuous arg Lambda on the critical line")
    p.add_argument("--t-max", type=float, required=True)
    p.set_defaults(func=cmd_argtrack)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None and args.command != "xray":
        args.format = "json"
    try:
        return args.func(args)
    except PrecisionLossError as exc:
        print(f"precision loss: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (DomainError, ValueError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except LavrikError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    raise SystemExit(main())
