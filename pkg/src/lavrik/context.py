"""Precision configuration and the error types shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import mpmath

MIN_BITS = 64


class LavrikError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LavrikError, ValueError):
    """Argument outside the domain of the function (e.g. Re z <= 0)."""


class PoleError(DomainError):
    """Evaluation requested at a pole."""


class PrecisionLossError(LavrikError):
    """The working precision cannot deliver the requested accuracy."""


class ConvergenceError(LavrikError):
    """A series, continued fraction or quadrature hit its term cap."""


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision and truncation tolerances.

    ``bits`` is the binary working precision, ``eps`` the target relative
    truncation error (defaults to ``2**-(bits-8)``) and ``max_terms`` caps
    series lengths, continued-fraction depth and quadrature node counts.
    """

    bits: int = 128
    eps: float | None = field(default=None)
    max_terms: int = 200_000

    def __post_init__(self) -> None:
        if self.bits < MIN_BITS:
            raise ValueError(f"bits must be >= {MIN_BITS}, got {self.bits}")
        if self.eps is None:
            object.__setattr__(self, "eps", mpmath.ldexp(1, -(self.bits - 8)))
        else:
            object.__setattr__(self, "eps", mpmath.mpf(self.eps))
        if not (0 < self.eps < mpmath.ldexp(1, -32)):
            raise ValueError("eps must lie in (0, 2**-32)")
        if self.max_terms <= 0:
            raise ValueError("max_terms must be positive")

    @property
    def eps_bits(self) -> int:
        """-log2(eps) rounded up."""
        return int(math.ceil(-float(mpmath.log(self.eps, 2))))

    def with_bits(self, bits: int) -> "PrecisionContext":
        """Same tolerances scaled to a different precision."""
        shift = bits - self.bits
        return replace(self, bits=bits, eps=mpmath.ldexp(self.eps, -shift))


def critical_line_bits(t) -> int:
    """Bits needed to resolve Re Lambda(1/2+it), which is ~exp(-pi|t|/4)|Lambda|."""
    return int(math.ceil(math.pi * abs(float(t)) / (4 * math.log(2)))) + 64


DEFAULT_CONTEXT = PrecisionContext()
