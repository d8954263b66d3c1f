"""High-precision evaluation of the Lavrik-split completed zeta function,
the entire function L(tau, s), its zeros and the related figures."""

from .context import (
    DEFAULT_CONTEXT,
    ConvergenceError,
    DomainError,
    LavrikError,
    PoleError,
    PrecisionContext,
    PrecisionLossError,
    critical_line_bits,
)
from .lambda_core import (
    EvalPoint,
    LambdaValue,
    l_function,
    l_function_series,
    lambda_completed,
    lambda_derivative,
    lambda_value,
    mellin_barnes_check,
    riemann_siegel_theta,
    f_modulus,
    verify_decomposition,
    xi_and_Xi,
    z_from_l,
)
from .zeta_oracle import zeta_oracle

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONTEXT",
    "ConvergenceError",
    "DomainError",
    "EvalPoint",
    "LambdaValue",
    "LavrikError",
    "PoleError",
    "PrecisionContext",
    "PrecisionLossError",
    "critical_line_bits",
    "f_modulus",
    "l_function",
    "l_function_series",
    "lambda_completed",
    "lambda_derivative",
    "lambda_value",
    "mellin_barnes_check",
    "riemann_siegel_theta",
    "verify_decomposition",
    "xi_and_Xi",
    "z_from_l",
    "zeta_oracle",
]
