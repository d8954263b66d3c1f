"""Backend selection for the double-precision grid kernel.

The compiled extension is used when it was built; otherwise (or when the
environment variable LAVRIK_PURE_PYTHON is set to a non-empty value other
than "0") the numpy implementation is used.  Both expose
``lambda_values(s, h, offsets, coeffs) -> (values, cond)``.
"""

from __future__ import annotations

import math
import os
from functools import lru_cache

import mpmath
import numpy as np

from . import _kernels_fallback as fallback
from .hp_numerics import gauss_legendre
from .theta_kernel import psi_sum

_force_pure = os.environ.get("LAVRIK_PURE_PYTHON", "") not in ("", "0")

compiled = None
if not _force_pure:
    try:
        from . import _kernels as compiled  # type: ignore[no-redef]
    except ImportError:
        compiled = None

BACKEND = "cython" if compiled is not None else "numpy"
lambda_values = compiled.lambda_values if compiled is not None else fallback.lambda_values

U_END = 3.5  # psi(e^u) < 1e-40 beyond; Re s < SPLIT on both routes' direct part
NODES_PER_PANEL = 16


@lru_cache(maxsize=32)
def quadrature_nodes(t_abs_max: float):
    """Panel rule for int_0^U e^{us/2} psi(e^u) du: (h, offsets, coeffs).

    Node u = p h + offsets[k] carries weight coeffs[p, k] = (h/2) w_k psi(e^u).
    The panel width shrinks with the largest |Im s| so every 16-point panel
    sees at most about 4 radians of oscillation.
    """
    h = min(0.25, 8.0 / (t_abs_max + 2.0))
    panels = int(math.ceil(U_END / h))
    xs, ws = gauss_legendre(NODES_PER_PANEL, 64)
    offsets = np.array([float((1 + x) * h / 2) for x in xs])
    coeffs = np.empty((panels, NODES_PER_PANEL))
    with mpmath.workprec(80):
        for p in range(panels):
            for k, (x, w) in enumerate(zip(xs, ws)):
                uu = (p + (1 + x) / 2) * h
                coeffs[p, k] = float(h / 2 * w * psi_sum(mpmath.exp(uu), 80)[0].real)
    return h, offsets, coeffs


def lambda_grid(s: np.ndarray, backend: str | None = None):
    """Double-precision (Lambda, cond) on an array of points; shape preserved."""
    s = np.asarray(s, dtype=complex)
    tmax = float(np.abs(s.imag).max(initial=0.0))
    tmax = 2.0 ** math.ceil(math.log2(tmax + 1.0))  # coarse key for the node cache
    h, offsets, coeffs = quadrature_nodes(tmax)
    fn = lambda_values
    if backend == "numpy":
        fn = fallback.lambda_values
    elif backend == "cython":
        if compiled is None:
            raise ImportError("compiled kernel not available")
        fn = compiled.lambda_values
    elif backend is not None:
        raise ValueError(f"unknown backend {backend!r}")
    val, cond = fn(s.ravel(), h, offsets, coeffs)
    return np.asarray(val).reshape(s.shape), np.asarray(cond).reshape(s.shape)
