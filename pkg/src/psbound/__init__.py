"""Trace and operator inequalities behind quantum state discrimination bounds."""

__version__ = "0.1.0"

from .bounds import (
    ChernoffResult,
    chernoff_bound,
    chernoff_s,
    family_bound,
    lemma_functionals,
    ps_check,
    ps_lhs,
    ps_rhs,
    ps_three_matrix_check,
    sandwich_check,
    trace_distance,
)
from .errors import PsboundError
from .functions import (
    DiscreteMeasureSpec,
    ScalarFunction,
    companion_g,
    compose_with_g_inverse,
    from_discrete_measure,
    function_from_spec,
    lambert_w0,
    transpose_function,
)
from .geometry import operator_mean, parallel_sum, perspective, weighted_mean
from .reports import CheckReport

__all__ = [
    "__version__",
    "CheckReport",
    "ChernoffResult",
    "DiscreteMeasureSpec",
    "PsboundError",
    "ScalarFunction",
    "chernoff_bound",
    "chernoff_s",
    "companion_g",
    "compose_with_g_inverse",
    "family_bound",
    "from_discrete_measure",
    "function_from_spec",
    "lambert_w0",
    "lemma_functionals",
    "operator_mean",
    "parallel_sum",
    "perspective",
    "ps_check",
    "ps_lhs",
    "ps_rhs",
    "ps_three_matrix_check",
    "sandwich_check",
    "trace_distance",
    "transpose_function",
    "weighted_mean",
]
