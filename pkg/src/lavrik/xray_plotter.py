"""X-ray plots: the curves where a complex function is real (thick) or
purely imaginary (thin), traced by marching squares on a sign grid.

Grid values come from the double-precision kernel; a component whose
size is below 2^-40 of the kernel's condition sum is re-evaluated with
the arbitrary-precision evaluator at rising precision until its sign is
certain (on the critical line this needs about pi t / (4 log 2) bits).
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import mpmath
import numpy as np

from . import kernels
from ._kernels_fallback import rgamma
from ._lambda_quad import lambda_quadrature
from .context import DEFAULT_CONTEXT, DomainError, PrecisionContext

ESCALATE_LOG2 = -40
MAX_ESCALATION_BITS = 4096
POLE_RADIUS = 0.1
EDGE_TOL = mpmath.mpf(2) ** -44  # refined vertex position, as a fraction of the edge
FUNCTIONS = ("Lambda", "L", "sLambda")

REAL_LINE = "real_line"  # Im f = 0, drawn thick
IMAGINARY_LINE = "imaginary_line"  # Re f = 0, drawn thin


@dataclass(frozen=True)
class Region:
    sigma1: float
    sigma2: float
    t1: float
    t2: float

    def __post_init__(self):
        if not (self.sigma1 < self.sigma2 and self.t1 < self.t2):
            raise DomainError("degenerate plot region")


@dataclass
class SignGrid:
    """Signs of Re f and Im f on an nx-by-ny lattice (index [i, j] = (sigma_i, t_j))."""

    region: Region
    nx: int
    ny: int
    sign_re: np.ndarray
    sign_im: np.ndarray
    re: np.ndarray
    im: np.ndarray
    mask: np.ndarray
    bits: int
    function: Union[str, Callable]
    escalated: int = 0
    ctx: PrecisionContext = field(default=DEFAULT_CONTEXT)

    def sigma(self, i) -> float:
        return float(_coord(self.region.sigma1, self.region.sigma2, self.nx, i))

    def t(self, j) -> float:
        return float(_coord(self.region.t1, self.region.t2, self.ny, j))


@dataclass(frozen=True)
class XRayCurve:
    kind: str
    points: list  # complex numbers (mpmath.mpc when refined, else complex)
    refined: bool = False

    @property
    def closed(self) -> bool:
        return len(self.points) > 2 and self.points[0] == self.points[-1]


def _coord(a: float, b: float, n: int, i) -> Fraction:
    """Exact lattice coordinate a + i (b - a)/(n - 1)."""
    fa, fb = Fraction(a), Fraction(b)
    return fa + (fb - fa) * Fraction(i) / (n - 1)


def _mp_point(sig: Fraction, t: Fraction, prec: int) -> mpmath.mpc:
    with mpmath.workprec(prec):
        return mpmath.mpc(mpmath.mpf(sig.numerator) / sig.denominator, mpmath.mpf(t.numerator) / t.denominator)


def _mp_value(function, s: mpmath.mpc, bits: int) -> mpmath.mpc:
    """f(s) at about ``bits`` relative bits."""
    if callable(function):
        with mpmath.workprec(bits):
            return mpmath.mpc(function(s))
    if function == "Lambda":
        return lambda_quadrature(s, 1, bits)[0]
    if function == "sLambda":
        if s == 0:
            return mpmath.mpc(-1)
        lam, _, prec = lambda_quadrature(s, 1, bits)
        with mpmath.workprec(prec):
            return s * lam
    if function == "L":
        if s == 0:
            return mpmath.mpc(-0.5)
        with mpmath.workprec(bits):
            half = s / 2
            if half.imag == 0 and half.real <= 0 and half.real == mpmath.floor(half.real):
                return mpmath.mpc(0)
        lam, _, prec = lambda_quadrature(s, 1, bits)
        with mpmath.workprec(prec):
            return lam * mpmath.exp(s / 2 * mpmath.log(mpmath.pi)) * mpmath.rgamma(s / 2)
    raise ValueError(f"unknown function {function!r}")


def resolve_signs(function, s: mpmath.mpc, start_bits: int = 64):
    """(sign Re f, sign Im f, value) with precision raised until both signs are certain.

    A component counts as certain once it exceeds 2^(16-bits) |f|;
    exact zeros (such as Im f on the real axis) are returned as sign 0.
    """
    bits = start_bits
    while True:
        v = _mp_value(function, s, bits)
        with mpmath.workprec(bits):
            mag = abs(v)
            if mag == 0:
                return 0, 0, v
            floor = mpmath.ldexp(mag, 16 - bits)
            ok_re = v.real == 0 or abs(v.real) > floor
            ok_im = v.imag == 0 or abs(v.imag) > floor
        if ok_re and ok_im:
            return int(mpmath.sign(v.real)), int(mpmath.sign(v.imag)), v
        if bits >= MAX_ESCALATION_BITS:
            warnings.warn(f"sign of a component of f({mpmath.nstr(s, 8)}) unresolved at {bits} bits")
            return (int(mpmath.sign(v.real)) if ok_re else 0), (int(mpmath.sign(v.imag)) if ok_im else 0), v
        bits *= 2


def _fast_values(function, S: np.ndarray):
    if callable(function):
        vals = np.vectorize(lambda z: complex(function(z)), otypes=[complex])(S)
        return vals, np.abs(vals)
    safe = np.where(S == 0, 1.0, S)
    lam, cond = kernels.lambda_grid(safe)
    if function == "Lambda":
        return lam, cond
    if function == "sLambda":
        vals = S * lam
        vals[S == 0] = -1
        cond = np.abs(S) * cond
        cond[S == 0] = 1
        return vals, cond
    if function == "L":
        factor = np.exp(safe / 2 * math.log(math.pi)) * rgamma(safe / 2)
        vals = lam * factor
        vals[S == 0] = -0.5
        cond = cond * np.abs(factor)
        cond[S == 0] = 0.5
        return vals, cond
    raise ValueError(f"unknown function {function!r}")


def sign_grid(function, region: Region, nx: int = 400, ny: int = 400,
              ctx: PrecisionContext = DEFAULT_CONTEXT, bits: int = 64) -> SignGrid:
    """Sign matrices of Re f and Im f on an nx-by-ny lattice over ``region``.

    ``function`` is one of "Lambda", "L", "sLambda" or a callable taking a
    complex number.  For "Lambda" the disc |s| < 0.1 around the pole is
    masked (sign 0, mask True).
    """
    if nx < 2 or ny < 2:
        raise DomainError("grid needs at least 2 x 2 nodes")
    if not callable(function) and function not in FUNCTIONS:
        raise ValueError(f"function must be one of {FUNCTIONS} or a callable")
    xs = [_coord(region.sigma1, region.sigma2, nx, i) for i in range(nx)]
    ys = [_coord(region.t1, region.t2, ny, j) for j in range(ny)]
    S = np.array([[complex(float(x), float(y)) for y in ys] for x in xs])
    vals, cond = _fast_values(function, S)
    mask = np.zeros(S.shape, dtype=bool)
    if function == "Lambda":
        mask = np.abs(S) < POLE_RADIUS
    sre = np.sign(vals.real).astype(np.int8)
    sim = np.sign(vals.imag).astype(np.int8)
    re = vals.real.copy()
    im = vals.imag.copy()
    if callable(function):
        doubtful = np.zeros(S.shape, dtype=bool)
    else:
        tol = np.ldexp(cond, ESCALATE_LOG2)
        doubtful = ((np.abs(vals.real) < tol) & (vals.real != 0)) | ((np.abs(vals.imag) < tol) & (vals.imag != 0))
        doubtful |= ~np.isfinite(vals)
        # exact zeros from the fast kernel are only trusted where they are exact in theory
        real_axis = np.array([[y == 0 for y in ys] for _ in xs])
        doubtful |= (vals.real == 0) | ((vals.imag == 0) & ~real_axis)
        doubtful &= ~mask
    escalated = 0
    for i, j in zip(*np.nonzero(doubtful)):
        s = _mp_point(xs[i], ys[j], bits + 64)
        a, b, v = resolve_signs(function, s, bits)
        sre[i, j], sim[i, j] = a, b
        re[i, j] = float(v.real) if a else 0.0
        im[i, j] = float(v.imag) if b else 0.0
        # keep interpolation consistent with the certified sign when the double underflows
        if a and re[i, j] == 0:
            re[i, j] = a * 1e-300
        if b and im[i, j] == 0:
            im[i, j] = b * 1e-300
        escalated += 1
    sre[mask] = 0
    sim[mask] = 0
    return SignGrid(region, nx, ny, sre, sim, re, im, mask, bits, function, escalated, ctx)


# ---------------------------------------------------------------------------
# Marching squares
# ---------------------------------------------------------------------------

_EDGES = ("bottom", "right", "top", "left")


def _crossing(g: SignGrid, comp: str, a: tuple, b: tuple) -> Optional[complex]:
    """Linear-interpolated zero of the component on lattice edge a-b, if it changes sign."""
    sg = g.sign_re if comp == "re" else g.sign_im
    val = g.re if comp == "re" else g.im
    if g.mask[a] or g.mask[b]:
        return None
    sa, sb = (sg[a] >= 0), (sg[b] >= 0)
    if sa == sb:
        return None
    fa, fb = float(val[a]), float(val[b])
    lam = 0.5 if fa == fb else fa / (fa - fb)
    lam = min(1.0, max(0.0, lam))
    za = complex(g.sigma(a[0]), g.t(a[1]))
    zb = complex(g.sigma(b[0]), g.t(b[1]))
    return za + lam * (zb - za)


def _cell_segments(g: SignGrid, comp: str, i: int, j: int):
    corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
    keys = [("h", i, j), ("v", i + 1, j), ("h", i, j + 1), ("v", i, j)]
    pts = {}
    for k in range(4):
        z = _crossing(g, comp, corners[k], corners[(k + 1) % 4])
        if z is not None:
            pts[k] = z
    if len(pts) == 2:
        a, b = sorted(pts)
        return [((keys[a], pts[a]), (keys[b], pts[b]))]
    if len(pts) == 4:
        # saddle: decide the pairing from the sign at the cell centre
        sg = g.sign_re if comp == "re" else g.sign_im
        sig = (Fraction(_coord(g.region.sigma1, g.region.sigma2, g.nx, i))
               + _coord(g.region.sigma1, g.region.sigma2, g.nx, i + 1)) / 2
        tt = (_coord(g.region.t1, g.region.t2, g.ny, j) + _coord(g.region.t1, g.region.t2, g.ny, j + 1)) / 2
        a, b, _ = resolve_signs(g.function, _mp_point(sig, tt, g.bits + 64), g.bits)
        centre = (a if comp == "re" else b) >= 0
        if centre == (sg[corners[0]] >= 0):
            pairs = [(0, 1), (2, 3)]
        else:
            pairs = [(0, 3), (1, 2)]
        return [((keys[p], pts[p]), (keys[q], pts[q])) for p, q in pairs]
    return []


def _chain(segments) -> list:
    """Join segments sharing edge keys into polylines (open or closed)."""
    adj: dict = {}
    where: dict = {}
    for idx, ((ka, za), (kb, zb)) in enumerate(segments):
        adj.setdefault(ka, []).append((idx, kb))
        adj.setdefault(kb, []).append((idx, ka))
        where[ka] = za
        where[kb] = zb
    used = [False] * len(segments)
    lines = []
    # start from chain ends (degree 1) first, in deterministic key order
    order = sorted(adj, key=lambda k: (len(adj[k]) != 1, k))
    for start in order:
        for idx, _ in adj[start]:
            if used[idx]:
                continue
            path = [start]
            cur = start
            nxt_idx = idx
            while nxt_idx is not None:
                used[nxt_idx] = True
                (ka, _), (kb, _) = segments[nxt_idx]
                cur = kb if ka == cur else ka
                path.append(cur)
                nxt_idx = next((k for k, _ in adj[cur] if not used[k]), None)
            lines.append([(k, where[k]) for k in path])
    return lines


def _refine_vertex(g: SignGrid, comp: str, key: tuple, z0: complex, ctx: PrecisionContext) -> mpmath.mpc:
    """Illinois-secant along the lattice edge ``key``.

    Stops when the component is below 1e-8 |f| and the bracket is narrower
    than EDGE_TOL times the edge.
    """
    kind, i, j = key
    a = (i, j)
    b = (i + 1, j) if kind == "h" else (i, j + 1)
    prec = ctx.bits + 32
    sa = _mp_point(_coord(g.region.sigma1, g.region.sigma2, g.nx, a[0]),
                   _coord(g.region.t1, g.region.t2, g.ny, a[1]), prec)
    sb = _mp_point(_coord(g.region.sigma1, g.region.sigma2, g.nx, b[0]),
                   _coord(g.region.t1, g.region.t2, g.ny, b[1]), prec)

    def comp_at(lam):
        s = sa + lam * (sb - sa)
        bits = ctx.bits
        while True:
            v = _mp_value(g.function, s, bits)
            c = v.real if comp == "re" else v.imag
            with mpmath.workprec(bits):
                if c == 0 or abs(c) > mpmath.ldexp(abs(v), 16 - bits) or bits >= MAX_ESCALATION_BITS:
                    return c, abs(v), s
            bits *= 2

    with mpmath.workprec(prec):
        lo, hi = mpmath.mpf(0), mpmath.mpf(1)
        flo, _, _ = comp_at(lo)
        fhi, _, _ = comp_at(hi)
        if flo == 0:
            return sa
        if fhi == 0:
            return sb
        if (flo > 0) == (fhi > 0):
            return mpmath.mpc(z0)
        side = 0
        s_best = None
        for _ in range(80):
            lam = (lo * fhi - hi * flo) / (fhi - flo)
            fm, mag, s = comp_at(lam)
            s_best = s
            # a small component alone is not enough: on the critical line Re Lambda is
            # exponentially small compared with |Lambda|, so the bracket must also close
            small = abs(fm) < mpmath.mpf("1e-8") * (mag + mpmath.mpf("1e-30"))
            if fm == 0 or (small and hi - lo < EDGE_TOL):
                return s
            if (fm > 0) == (flo > 0):
                lo, flo = lam, fm
                if side == -1:
                    fhi /= 2
                side = -1
            else:
                hi, fhi = lam, fm
                if side == 1:
                    flo /= 2
                side = 1
        return s_best


def extract_curves(grid: SignGrid, refine: bool = False, ctx: PrecisionContext = DEFAULT_CONTEXT,
                   refine_region: Optional[Region] = None) -> list:
    """Polylines of Re f = 0 (imaginary_line) and Im f = 0 (real_line).

    With ``refine``, vertices (restricted to ``refine_region`` if given)
    are moved along their lattice edge by a secant iteration until the
    vanishing component is below 1e-8 |f|.
    """
    curves = []
    for comp, kind in (("im", REAL_LINE), ("re", IMAGINARY_LINE)):
        segments = []
        for i in range(grid.nx - 1):
            for j in range(grid.ny - 1):
                segments.extend(_cell_segments(grid, comp, i, j))
        for line in _chain(segments):
            pts = []
            done = False
            for key, z in line:
                if refine and (refine_region is None or (
                        refine_region.sigma1 <= z.real <= refine_region.sigma2
                        and refine_region.t1 <= z.imag <= refine_region.t2)):
                    pts.append(_refine_vertex(grid, comp, key, z, ctx))
                    done = True
                else:
                    pts.append(z)
            curves.append(XRayCurve(kind, pts, refined=refine and done))
    return curves


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _fmt(x, digits: int = 17) -> str:
    if isinstance(x, (mpmath.mpf,)):
        return mpmath.nstr(x, digits)
    return repr(float(x))


def curves_to_csv(curves: Sequence[XRayCurve], digits: int = 17) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["kind", "idx", "re", "im"])
    for idx, c in enumerate(curves):
        for z in c.points:
            w.writerow([c.kind, idx, _fmt(z.real, digits), _fmt(z.imag, digits)])
    return out.getvalue()


def curves_from_csv(text: str) -> list:
    rows = list(csv.DictReader(io.StringIO(text)))
    curves: dict = {}
    kinds: dict = {}
    for r in rows:
        idx = int(r["idx"])
        curves.setdefault(idx, []).append(complex(float(r["re"]), float(r["im"])))
        kinds[idx] = r["kind"]
    return [XRayCurve(kinds[i], curves[i]) for i in sorted(curves)]


def render(curves: Sequence[XRayCurve], zeros: Optional[Sequence] = None, fmt: str = "svg",
           region: Optional[Region] = None, width: int = 800, height: int = 800,
           thick: float = 1.6, thin: float = 0.6, marker_radius: float = 3.0,
           title: Optional[str] = None) -> str:
    """SVG 1.1 document (or CSV text) for the curves and optional zero markers.

    Output depends only on the inputs, so equal inputs give identical bytes.
    """
    if fmt == "csv":
        return curves_to_csv(curves)
    if fmt != "svg":
        raise ValueError("fmt must be 'svg' or 'csv'")
    zs = [complex(z.b) if hasattr(z, "b") else complex(z) for z in (zeros or [])]
    if region is None:
        pts = [complex(p) for c in curves for p in c.points] + zs
        if pts:
            xs = [p.real for p in pts]
            ys = [p.imag for p in pts]
            pad = 1e-9
            region = Region(min(xs) - pad, max(xs) + pad + (max(xs) == min(xs)),
                            min(ys) - pad, max(ys) + pad + (max(ys) == min(ys)))
        else:
            region = Region(0.0, 1.0, 0.0, 1.0)
    sx = width / (region.sigma2 - region.sigma1)
    sy = height / (region.t2 - region.t1)

    def xy(z):
        return (f"{(z.real - region.sigma1) * sx:.3f}", f"{(region.t2 - z.imag) * sy:.3f}")

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<style>.real_line{fill:none;stroke:#000;stroke-width:%g}"
        ".imaginary_line{fill:none;stroke:#555;stroke-width:%g}"
        ".zero{fill:#c00;stroke:none}.axis{stroke:#999;stroke-width:0.5}</style>" % (thick, thin),
    ]
    if title:
        lines.append(f"<title>{title}</title>")
    if region.sigma1 < 0 < region.sigma2:
        x, _ = xy(complex(0, 0))
        lines.append(f'<line class="axis" x1="{x}" y1="0" x2="{x}" y2="{height}"/>')
    if region.t1 < 0 < region.t2:
        _, y = xy(complex(0, 0))
        lines.append(f'<line class="axis" x1="0" y1="{y}" x2="{width}" y2="{y}"/>')
    for c in curves:
        coords = " ".join(",".join(xy(complex(p))) for p in c.points)
        lines.append(f'<polyline class="{c.kind}" points="{coords}"/>')
    for z in zs:
        x, y = xy(z)
        lines.append(f'<circle class="zero" cx="{x}" cy="{y}" r="{marker_radius:g}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def svg_polylines(svg: str) -> list:
    """(kind, vertex count) for each polyline in an SVG produced by :func:`render`."""
    import re

    out = []
    for m in re.finditer(r'<polyline class="([a-z_]+)" points="([^"]*)"', svg):
        pts = m.group(2).split()
        out.append((m.group(1), len(pts)))
    return out


def svg_markers(svg: str) -> int:
    return svg.count('<circle class="zero"')


def critical_crossings(curves: Sequence[XRayCurve], sigma: float = 0.5, t_range=(15.0, 40.0),
                       tol: float = 1e-12) -> list:
    """Ordinates where imaginary-kind curves meet the vertical line Re s = sigma."""
    out = []
    for c in curves:
        if c.kind != IMAGINARY_LINE:
            continue
        for z in c.points:
            zc = complex(z)
            if abs(zc.real - sigma) <= tol and t_range[0] <= zc.imag <= t_range[1]:
                out.append(z.imag if isinstance(z, mpmath.mpc) else zc.imag)
    return sorted(set(out), key=float)
