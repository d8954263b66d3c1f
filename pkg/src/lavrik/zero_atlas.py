"""Zeros b_n of F(s) = s Lambda(s): winding-number search, Newton
refinement, a resumable JSON-lines table and the empirical statistics.

Every box corner and boundary sample lies on an exact dyadic grid, so the
samples shared by neighbouring boxes are evaluated once.  Boundary walks
run at low precision (the Lambda evaluator adds guard bits for its own
cancellation), and Newton refinement runs at the context precision plus
the cancellation scale of the integral so residuals are absolute.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Optional

import mpmath

from ._lambda_quad import lambda_quadrature, scale_log2
from .context import (
    DEFAULT_CONTEXT,
    ConvergenceError,
    DomainError,
    LavrikError,
    PrecisionContext,
)

WALK_BITS = 64
MIN_STEP = Fraction(1, 1 << 22)
SIGMA_LEFT = Fraction(41, 4)  # b0 - 1, rounded down to the quarter grid
T_BOTTOM = Fraction(-1, 4)
STRIP_HEIGHT = Fraction(8)
CHUNK_HEIGHT = Fraction(64)
BAND_HALFWIDTH = 4.0
NEWTON_BOX_SIDE = Fraction(2)
B0_REFERENCE = 11.25170908146


class BoundaryZeroError(LavrikError):
    """A zero of s Lambda(s) lies on (or numerically at) a box edge."""


class NonClosureError(LavrikError):
    """Accumulated phase is not an integer multiple of 2 pi."""


class SuspectedMissedZeroError(LavrikError):
    """Sub-box counts disagree with the enclosing box count."""


class IncompleteAtlasError(LavrikError):
    """A statistic was requested beyond the certified coverage of the atlas."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(str(x))


def _dyadic_floor(x: float, denom: int) -> Fraction:
    return Fraction(math.floor(x * denom), denom)


def _dyadic_ceil(x: float, denom: int) -> Fraction:
    return Fraction(math.ceil(x * denom), denom)


# ---------------------------------------------------------------------------
# Regions and sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchRegion:
    """Rectangle [sigma1, sigma2] x [t1, t2] with exact rational corners.

    ``step`` overrides the boundary sampling step (default
    min(1/4, 1/log(2 + |t|)) rounded down to a power of two).
    """

    sigma1: Fraction
    sigma2: Fraction
    t1: Fraction
    t2: Fraction
    step: Optional[Fraction] = None
    ctx: PrecisionContext = DEFAULT_CONTEXT

    def __post_init__(self):
        for name in ("sigma1", "sigma2", "t1", "t2"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.step is not None:
            object.__setattr__(self, "step", _frac(self.step))
        if not (self.sigma1 < self.sigma2 and self.t1 < self.t2):
            raise DomainError("degenerate search region")

    @property
    def box(self) -> tuple:
        return (float(self.sigma1), float(self.sigma2), float(self.t1), float(self.t2))

    def contains(self, s, pad: float = 0.0) -> bool:
        x, y = float(s.real), float(s.imag)
        return (float(self.sigma1) - pad <= x <= float(self.sigma2) + pad
                and float(self.t1) - pad <= y <= float(self.t2) + pad)

    def split(self, frac: Fraction = Fraction(1, 2)):
        """Two halves across the longer side, cut at ``frac`` of that side."""
        if self.sigma2 - self.sigma1 >= self.t2 - self.t1:
            cut = self.sigma1 + (self.sigma2 - self.sigma1) * frac
            return replace(self, sigma2=cut), replace(self, sigma1=cut)
        cut = self.t1 + (self.t2 - self.t1) * frac
        return replace(self, t2=cut), replace(self, t1=cut)

    def shifted_top(self, delta: Fraction) -> "SearchRegion":
        return replace(self, t2=self.t2 + delta)


def boundary_step(t_abs: float) -> Fraction:
    """Largest power of two not above min(1/4, 1/log(2 + t))."""
    target = min(0.25, 1.0 / math.log(2.0 + t_abs))
    k = math.ceil(-math.log2(target))
    return Fraction(1, 1 << k)


class Sampler:
    """Memoised F(s) = s Lambda(s) at walk precision on exact rational points."""

    def __init__(self, bits: int = WALK_BITS):
        self.bits = bits
        self.cache: dict = {}
        self.evaluations = 0

    def __call__(self, sigma: Fraction, t: Fraction) -> mpmath.mpc:
        key = (sigma, t)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        with mpmath.workprec(self.bits + 64):
            s = mpmath.mpc(mpmath.mpf(sigma.numerator) / sigma.denominator,
                           mpmath.mpf(t.numerator) / t.denominator)
        if s == 0:
            value = mpmath.mpc(-1)
        else:
            lam, _, prec = lambda_quadrature(s, 1, self.bits)
            with mpmath.workprec(prec):
                value = s * lam
        self.evaluations += 1
        self.cache[key] = value
        return value


def _phase_step(fa, fb) -> float:
    if fa == 0 or fb == 0:
        raise BoundaryZeroError("s Lambda(s) vanishes at a boundary sample")
    with mpmath.workprec(64):
        return float(mpmath.arg(fb / fa))


def _walk(sampler: Sampler, p: tuple, q: tuple) -> float:
    """Phase change of F from p to q, bisecting while |dphase| >= pi/2."""
    d = _phase_step(sampler(*p), sampler(*q))
    if abs(d) < math.pi / 2:
        return d
    length = abs(q[0] - p[0]) + abs(q[1] - p[1])
    if length <= MIN_STEP:
        raise BoundaryZeroError(
            f"phase cannot be resolved near s = {float(p[0]):.9g} + {float(p[1]):.9g}i"
        )
    m = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
    return _walk(sampler, p, m) + _walk(sampler, m, q)


def _edge_samples(a: Fraction, b: Fraction, h: Fraction) -> list:
    """a, every multiple of h strictly between a and b, then b (in walk order)."""
    lo, hi = min(a, b), max(a, b)
    k0 = math.floor(lo / h) + 1
    k1 = math.ceil(hi / h) - 1
    inner = [h * k for k in range(k0, k1 + 1) if lo < h * k < hi]
    if a > b:
        inner.reverse()
    return [a] + inner + [b]


def _edge_phase(sampler: Sampler, p: tuple, q: tuple, step: Optional[Fraction]) -> float:
    if p[1] == q[1]:
        h = step or boundary_step(abs(float(p[1])))
        xs = _edge_samples(p[0], q[0], h)
        pts = [(x, p[1]) for x in xs]
    else:
        h = step or boundary_step(max(abs(float(p[1])), abs(float(q[1]))))
        ys = _edge_samples(p[1], q[1], h)
        pts = [(p[0], y) for y in ys]
    return sum(_walk(sampler, u, v) for u, v in zip(pts, pts[1:]))


def winding_number(region: SearchRegion, sampler: Optional[Sampler] = None) -> int:
    """Number of zeros of s Lambda(s) inside ``region`` (argument principle)."""
    sampler = sampler or Sampler()
    corners = [
        (region.sigma1, region.t1),
        (region.sigma2, region.t1),
        (region.sigma2, region.t2),
        (region.sigma1, region.t2),
    ]
    total = 0.0
    for p, q in zip(corners, corners[1:] + corners[:1]):
        total += _edge_phase(sampler, p, q, region.step)
    turns = total / (2 * math.pi)
    n = round(turns)
    if abs(turns - n) > 1e-3:
        raise NonClosureError(f"boundary phase {total!r} is not a multiple of 2 pi")
    return n


# ---------------------------------------------------------------------------
# Zero records and refinement
# ---------------------------------------------------------------------------


def _digits(bits: int) -> int:
    """Decimal digits that recover a (bits + 16)-bit binary value exactly."""
    return int(math.ceil((bits + 16) * math.log10(2))) + 2


@dataclass(frozen=True)
class ZeroRecord:
    n: Optional[int]
    b: mpmath.mpc
    residual: mpmath.mpf
    bits: int
    box: tuple

    @property
    def beta(self) -> mpmath.mpf:
        return self.b.real

    @property
    def gamma(self) -> mpmath.mpf:
        return self.b.imag

    def conjugate(self) -> "ZeroRecord":
        n = None if self.n is None else -self.n
        s1, s2, t1, t2 = self.box
        return ZeroRecord(n, mpmath.conj(self.b), self.residual, self.bits, (s1, s2, -t2, -t1))

    def to_dict(self) -> dict:
        d = _digits(self.bits)
        with mpmath.workprec(self.bits + 16):
            return {
                "n": self.n,
                "re": mpmath.nstr(self.b.real, d, strip_zeros=False),
                "im": mpmath.nstr(self.b.imag, d, strip_zeros=False),
                "residual": mpmath.nstr(self.residual, 6),
                "bits": self.bits,
                "box": [float(v) for v in self.box],
            }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "ZeroRecord":
        bits = int(d["bits"])
        with mpmath.workprec(bits + 16):
            b = mpmath.mpc(mpmath.mpf(d["re"]), mpmath.mpf(d["im"]))
            res = mpmath.mpf(d["residual"])
        return cls(d.get("n"), b, res, bits, tuple(float(v) for v in d["box"]))


def _f_and_df(s, bits: int):
    lam, dlam, prec = lambda_quadrature(s, 1, bits, deriv=True)
    with mpmath.workprec(prec):
        return s * lam, lam + s * dlam


def _eval_bits(s, bits: int) -> int:
    return bits + int(math.ceil(scale_log2(s, 1, bits))) + 16


def _newton(s, bits: int, tol_log2: float, box: Optional[SearchRegion], max_iter: int = 40):
    """Newton on F = s Lambda(s); returns (root, last steps)."""
    steps = []
    real = s.imag == 0
    for _ in range(max_iter):
        work = _eval_bits(s, bits)
        f, df = _f_and_df(s, work)
        with mpmath.workprec(work):
            if df == 0:
                raise ConvergenceError("zero derivative in Newton iteration")
            step = f / df
            if real:
                step = mpmath.mpc(step.real, 0)
            s = s - step
        size = abs(step)
        steps.append(size)
        if box is not None:
            pad = 0.5 * max(float(box.sigma2 - box.sigma1), float(box.t2 - box.t1))
            if not box.contains(s, pad):
                raise ConvergenceError("Newton iterate left the search box")
        if size == 0 or mpmath.log(size, 2) - mpmath.log(abs(s), 2) < tol_log2:
            return s, steps
    raise ConvergenceError("Newton iteration did not converge")


def refine_zero(
    seed,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    box: Optional[SearchRegion] = None,
    sampler: Optional[Sampler] = None,
) -> ZeroRecord:
    """Newton-refine a zero of s Lambda(s) from ``seed``.

    With ``box`` the iterate must stay near it and the final point must lie
    inside; without it, a box of half-side 1/64 around the result is
    certified to have winding number 1.
    """
    with mpmath.workprec(ctx.bits + 32):
        s = mpmath.mpc(seed)
    s, _ = _newton(s, WALK_BITS, -40, box)
    if abs(s.imag) < 1e-12 * abs(s) and s.imag != 0:
        s = mpmath.mpc(s.real, 0)
    s, steps = _newton(s, ctx.bits, -(ctx.bits - 4), box, max_iter=12)
    if len(steps) >= 4 and all(steps[i + 1] > steps[i] / 16 for i in range(len(steps) - 4, len(steps) - 1)):
        warnings.warn(f"linear Newton convergence near {mpmath.nstr(s, 12)}: possible multiple zero")
    work = _eval_bits(s, ctx.bits)
    lam, _, prec = lambda_quadrature(s, 1, work)
    with mpmath.workprec(prec):
        residual = abs(s * lam)
    if box is not None:
        if not box.contains(s):
            raise ConvergenceError("refined zero lies outside its box")
        cert = box
    else:
        r = Fraction(1, 64)
        cs, ct = _dyadic_floor(float(s.real), 1024), _dyadic_floor(float(s.imag), 1024)
        cert = SearchRegion(cs - r, cs + r, ct - r, ct + r, ctx=ctx)
        if winding_number(cert, sampler) != 1:
            raise ConvergenceError("zero is not simple or not isolated at radius 1/64")
    with mpmath.workprec(ctx.bits + 16):
        b = +s
    n = 0 if b.imag == 0 else None
    return ZeroRecord(n, b, +residual, ctx.bits, cert.box)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def zero_curve_sigma(t: float) -> float:
    """sigma where |pi^{-s/2} Gamma(s/2)| = 1/|s| on Im s = t.

    Zeros of s Lambda(s) with large imaginary part sit close to this curve,
    where the two halves of Lambda(s) = pi^{-s/2}Gamma(s/2)zeta(s) - Lambda(1-s)
    have equal size.
    """
    t = abs(t)

    def g(sig):
        with mpmath.workprec(53):
            s = mpmath.mpc(sig, t)
            return float(mpmath.loggamma(s / 2).real - sig / 2 * math.log(math.pi) + mpmath.log(abs(s)))

    lo, hi = 1.0, 50.0 + 4.0 * t
    if g(lo) > 0:
        return lo
    for _ in range(60):
        mid = (lo + hi) / 2
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def sigma_bound(t: float, pad: float = 1.5, floor: float = 40.0) -> float:
    """Right edge of the search: beta <= pi gamma / (2 log(gamma / 2 pi)), padded."""
    t = abs(t)
    if t <= 2 * math.pi * math.e:
        return floor
    return max(floor, pad * math.pi * t / (2 * math.log(t / (2 * math.pi))))


class Atlas(list):
    """Ordered list of ZeroRecord (upper half-plane and b0) with coverage data."""

    def __init__(self, records: Iterable = (), t_max: float = 0.0, total_winding: Optional[int] = None,
                 region: Optional[tuple] = None):
        super().__init__(records)
        self.t_max = t_max
        self.total_winding = total_winding
        self.region = region


@dataclass
class _ChunkResult:
    t_lo: Fraction
    t_hi: Fraction
    sigma_right: Fraction
    total: int
    zeros: list = field(default_factory=list)
    evaluations: int = 0


def _resolve(box: SearchRegion, count: int, sampler: Sampler, ctx: PrecisionContext) -> list:
    if count == 0:
        return []
    if count < 0:
        raise SuspectedMissedZeroError("negative winding count")
    if count == 1 and max(box.sigma2 - box.sigma1, box.t2 - box.t1) <= NEWTON_BOX_SIDE:
        center = mpmath.mpc(float((box.sigma1 + box.sigma2) / 2), float((box.t1 + box.t2) / 2))
        try:
            return [refine_zero(center, ctx, box=box)]
        except ConvergenceError:
            pass
    if max(box.sigma2 - box.sigma1, box.t2 - box.t1) < MIN_STEP * 64:
        raise SuspectedMissedZeroError(f"cannot separate {count} zeros in box {box.box}")
    for frac in (Fraction(1, 2), Fraction(3, 8), Fraction(5, 8), Fraction(7, 16), Fraction(9, 16)):
        a, b = box.split(frac)
        try:
            ca = winding_number(a, sampler)
            cb = winding_number(b, sampler)
        except BoundaryZeroError:
            continue
        if ca + cb != count:
            raise SuspectedMissedZeroError(
                f"sub-box counts {ca}+{cb} disagree with parent count {count} on {box.box}"
            )
        return _resolve(a, ca, sampler, ctx) + _resolve(b, cb, sampler, ctx)
    raise BoundaryZeroError(f"every split of box {box.box} passes through a zero")


def _band(t_lo: Fraction, t_hi: Fraction, sigma_left: Fraction, sigma_right: Fraction, width: float):
    lo = zero_curve_sigma(float(max(t_lo, 0))) - width
    hi = zero_curve_sigma(float(t_hi)) + width
    a = max(sigma_left, _dyadic_floor(lo, 4))
    b = min(sigma_right, _dyadic_ceil(hi, 4))
    if b <= a:
        b = min(sigma_right, a + 1)
    return a, b


def _scan_chunk(t_lo: Fraction, t_hi: Fraction, sigma_left: Fraction, ctx: PrecisionContext,
                band_width: float = BAND_HALFWIDTH, step: Optional[Fraction] = None) -> _ChunkResult:
    """All zeros in [sigma_left, sigma_bound(t_hi)] x [t_lo, t_hi]."""
    sampler = Sampler()
    sigma_right = _dyadic_ceil(sigma_bound(float(t_hi)), 1)
    outer = SearchRegion(sigma_left, sigma_right, t_lo, t_hi, step=step, ctx=ctx)
    total = winding_number(outer, sampler)
    # the empirical right bound is checked on a wider box
    wider = SearchRegion(sigma_right, _dyadic_ceil(1.25 * float(sigma_right), 1), t_lo, t_hi, step=step, ctx=ctx)
    if winding_number(wider, sampler) != 0:
        raise SuspectedMissedZeroError(f"zeros beyond sigma = {float(sigma_right)} for t in [{float(t_lo)}, {float(t_hi)}]")
    width = band_width
    while True:
        zeros = []
        found = 0
        lo = t_lo
        while lo < t_hi:
            hi = min(t_hi, lo + STRIP_HEIGHT)
            for attempt in range(4):
                a, b = _band(lo, hi, sigma_left, sigma_right, width)
                strip = SearchRegion(a, b, lo, hi, step=step, ctx=ctx)
                try:
                    count = winding_number(strip, sampler)
                    zeros.extend(_resolve(strip, count, sampler, ctx))
                    break
                except BoundaryZeroError:
                    if hi == t_hi:
                        raise
                    hi = min(t_hi, hi + Fraction(1, 8))
            found += count
            lo = hi
        if found == total:
            return _ChunkResult(t_lo, t_hi, sigma_right, total, zeros, sampler.evaluations)
        if width >= float(sigma_right - sigma_left):
            raise SuspectedMissedZeroError(f"band search found {found} zeros, outer winding says {total}")
        width *= 2


def _scan_chunk_task(args):
    t_lo, t_hi, sigma_left, bits, band_width = args
    return _scan_chunk(t_lo, t_hi, sigma_left, PrecisionContext(bits=bits), band_width)


def _order(records: list) -> list:
    """Sort by modulus then imaginary part and assign indices (b0 gets 0)."""
    ordered = sorted(records, key=lambda r: (abs(r.b), r.b.imag))
    return [replace(r, n=i) for i, r in enumerate(ordered)]


def _state_path(path: str) -> str:
    return path + ".state.json"


def load_atlas(path: str) -> Atlas:
    """Read a zero table (and its coverage state, if present)."""
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(ZeroRecord.from_dict(json.loads(line)))
    t_max, total, region = max((float(r.gamma) for r in records), default=0.0), None, None
    state = _state_path(path)
    if os.path.exists(state):
        with open(state) as fh:
            st = json.load(fh)
        t_max = float(Fraction(st["t_done"]))
        total = st.get("total_winding")
        region = tuple(st.get("region", ())) or None
    return Atlas(_order(records), t_max, total, region)


def _write_atlas(path: str, atlas: Atlas, sigma_left: Fraction, t_done: Fraction) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        for rec in atlas:
            fh.write(rec.to_json() + "\n")
    os.replace(tmp, path)
    state = {
        "t_done": str(t_done),
        "sigma_left": str(sigma_left),
        "total_winding": atlas.total_winding,
        "region": list(atlas.region) if atlas.region else None,
    }
    with open(_state_path(path) + ".tmp", "w") as fh:
        json.dump(state, fh)
    os.replace(_state_path(path) + ".tmp", _state_path(path))


def enumerate_zeros(
    t_max: float,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    path: Optional[str] = None,
    resume: bool = True,
    workers: int = 1,
    sigma_left: Fraction = SIGMA_LEFT,
    band_width: float = BAND_HALFWIDTH,
    progress: Optional[Callable[[str], None]] = None,
) -> Atlas:
    """b0 and every zero with 0 < Im b <= t_max, ordered by modulus.

    The region [sigma_left, sigma_bound] x [-1/4, t_max] is processed in
    chunks of height 64.  In each chunk the outer winding number is
    compared with the sum over a band of boxes around the curve
    |pi^{-s/2}Gamma(s/2)| = 1/|s| (the band widens until they agree);
    boxes are bisected until they hold one zero, which is then refined.
    With ``path``, the table is rewritten after every chunk and a rerun
    with ``resume`` continues above the covered height.
    """
    if t_max < 0:
        raise DomainError("t_max must be non-negative")
    sigma_left = _frac(sigma_left)
    top = max(_dyadic_ceil(t_max, 8), Fraction(1, 4))
    records: list = []
    start = T_BOTTOM
    total_winding = 0
    if path and resume and os.path.exists(path) and os.path.exists(_state_path(path)):
        prev = load_atlas(path)
        with open(_state_path(path)) as fh:
            st = json.load(fh)
        if Fraction(st["sigma_left"]) != sigma_left:
            raise DomainError("existing table was computed with a different left edge")
        records = [r for r in prev if r.bits >= ctx.bits] if all(r.bits >= ctx.bits for r in prev) else []
        if records or not prev:
            start = Fraction(st["t_done"])
            total_winding = st.get("total_winding") or 0
        if start >= top:
            return _finish(records, float(t_max), total_winding, sigma_left, start)
    bounds = []
    lo = start
    while lo < top:
        hi = min(top, lo + CHUNK_HEIGHT)
        bounds.append((lo, hi))
        lo = hi
    tasks = [(lo, hi, sigma_left, ctx.bits, band_width) for lo, hi in bounds]
    done = start

    def absorb(res: _ChunkResult):
        nonlocal total_winding, done
        total_winding += res.total
        records.extend(r for r in res.zeros if r.b.imag >= 0)
        done = res.t_hi
        if progress:
            progress(f"t in [{float(res.t_lo):g}, {float(res.t_hi):g}]: {res.total} zeros, "
                     f"{res.evaluations} evaluations")
        if path:
            _write_atlas(path, _finish(records, float(done), total_winding, sigma_left, done),
                         sigma_left, done)

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_scan_chunk_task, tasks):
                absorb(res)
    else:
        for task in tasks:
            absorb(_scan_chunk_task(task))
    return _finish(records, float(t_max), total_winding, sigma_left, done)


def _finish(records, t_max: float, total_winding: int, sigma_left: Fraction, done: Fraction) -> Atlas:
    # zeros in (t_max, top] and the strip below the real axis are dropped
    keep = [r for r in records if r.b.imag <= t_max]
    region = (float(sigma_left), sigma_bound(float(done)), float(T_BOTTOM), float(done))
    return Atlas(_order(keep), t_max, total_winding, region)


# ---------------------------------------------------------------------------
# Statistics and checks
# ---------------------------------------------------------------------------


def counting_formula(x: float) -> float:
    """x/(4 pi) log(x/2 pi) - x/(4 pi) + sqrt(same)."""
    m = x / (4 * math.pi) * math.log(x / (2 * math.pi)) - x / (4 * math.pi)
    return m + math.sqrt(m) if m > 0 else m


@dataclass(frozen=True)
class CountRow:
    x: float
    empirical: int
    formula: float
    residual: float


@dataclass(frozen=True)
class ZeroLawRow:
    n: int
    beta: float
    gamma: float
    law_residual: float  # gamma - beta log(beta / 4 pi)
    inequality_holds: Optional[bool]  # gamma / log(gamma / 2 pi) >= 2 beta / pi


@dataclass(frozen=True)
class ZeroStats:
    counts: list
    laws: list

    @property
    def max_abs_count_residual(self) -> float:
        return max((abs(r.residual) for r in self.counts), default=0.0)

    @property
    def inequality_all(self) -> bool:
        return all(r.inequality_holds for r in self.laws if r.inequality_holds is not None)


def zero_stats(zeros: list, x_grid: Iterable[float], coverage: Optional[float] = None) -> ZeroStats:
    """Empirical N(x) = #{n >= 0 : |b_n| <= x} against the formula, and the gamma-beta laws.

    ``coverage`` is the height up to which the list is complete (taken from
    an :class:`Atlas` when available); every zero with |b| <= x has
    Im b <= x, so x may not exceed it.
    """
    if coverage is None:
        coverage = getattr(zeros, "t_max", None)
        if coverage is None:
            coverage = max((float(r.gamma) for r in zeros), default=0.0)
    moduli = sorted(float(abs(r.b)) for r in zeros if r.b.imag >= 0)
    counts = []
    for x in x_grid:
        if x > coverage + 1e-12:
            raise IncompleteAtlasError(f"x = {x} exceeds atlas coverage {coverage}")
        emp = sum(1 for m in moduli if m <= x)
        f = counting_formula(x)
        counts.append(CountRow(float(x), emp, f, emp - f))
    laws = []
    for r in zeros:
        if r.b.imag < 0:
            continue
        beta, gamma = float(r.beta), float(r.gamma)
        law = gamma - beta * math.log(beta / (4 * math.pi))
        ineq = None
        if gamma > 2 * math.pi:
            ineq = gamma / math.log(gamma / (2 * math.pi)) >= 2 * beta / math.pi
        laws.append(ZeroLawRow(r.n if r.n is not None else -1, beta, gamma, law, ineq))
    return ZeroStats(counts, laws)


@dataclass(frozen=True)
class HalfplaneReport:
    passed: bool
    b0: float
    min_re: float
    violations: list
    quadrant_violations: list


def verify_halfplane(zeros: list, b0: Optional[float] = None, tol: float = 1e-6) -> HalfplaneReport:
    """min Re b >= b0 - tol, and every zero in the first or fourth quadrant."""
    if b0 is None:
        real = [r for r in zeros if r.b.imag == 0]
        b0 = float(real[0].beta) if real else B0_REFERENCE
    violations = [r for r in zeros if float(r.beta) < b0 - tol]
    quadrant = [r for r in zeros if not r.beta > 0]
    min_re = min((float(r.beta) for r in zeros), default=math.inf)
    return HalfplaneReport(not violations and not quadrant, b0, min_re, violations, quadrant)
