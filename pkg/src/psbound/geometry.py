"""Operator means, perspectives, parallel sums and the operator inequalities
built from them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, DimensionError, SpecError
from .functions import DiscreteMeasureSpec, Reciprocal, ScalarFunction
from .linalg import abs_value, apply_function, eigh, hermitian, loewner_leq, op_norm, psd_verdict
from .reports import PRECONDITION_UNMET, CheckReport

MAX_CONDITION = 1e12
ANTICOMMUTATOR_RTOL = 1e-9
COUNTEREXAMPLE_SHIFT = 1e-4


def anticommutator_min_eig(A, B) -> float:
    return float(np.linalg.eigvalsh(hermitian(A @ B + B @ A))[0])


@dataclass(frozen=True)
class AnticommutatorPair:
    """Positive definite ``A, B`` with ``AB + BA >= 0``."""

    A: np.ndarray
    B: np.ndarray
    anticommutator_min_eig: float
    strategy: str = "given"
    rejections: int = 0

    @staticmethod
    def tolerance(A, B) -> float:
        return ANTICOMMUTATOR_RTOL * (1.0 + op_norm(A @ B + B @ A))

    @classmethod
    def from_matrices(cls, A, B, *, strategy="given", rejections=0) -> "AnticommutatorPair":
        A = hermitian(A)
        B = hermitian(B)
        if A.shape != B.shape:
            raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
        for name, M in (("A", A), ("B", B)):
            if np.linalg.eigvalsh(M)[0] <= 0:
                raise SpecError(f"{name} must be positive definite")
        m = anticommutator_min_eig(A, B)
        if m < -cls.tolerance(A, B):
            raise SpecError(f"AB + BA is not positive (min eigenvalue {m:.3e})")
        return cls(A, B, m, strategy, rejections)


def _pd_roots(A):
    """``(A^1/2, A^-1/2)`` for a well-conditioned positive definite ``A``."""
    dec = eigh(A)
    w = dec.eigenvalues
    if w[0] <= 0:
        raise ConditioningError(f"matrix is not positive definite (min eigenvalue {w[0]:.3e})", np.inf)
    cond = w[-1] / w[0]
    if cond > MAX_CONDITION:
        raise ConditioningError(f"condition number {cond:.3e} exceeds {MAX_CONDITION:.0e}", cond)
    r = np.sqrt(w)
    return dec.reconstruct(r), dec.reconstruct(1.0 / r)


def pd_inverse(A) -> np.ndarray:
    _, inv_half = _pd_roots(A)
    return inv_half @ inv_half


def _congruence(f, outer, inner):
    """``outer^1/2 f(outer^-1/2 inner outer^-1/2) outer^1/2``."""
    half, inv_half = _pd_roots(outer)
    core = hermitian(inv_half @ inner @ inv_half)
    return hermitian(half @ apply_function(core, f) @ half)


def operator_mean(f: ScalarFunction, A, B) -> np.ndarray:
    """Kubo-Ando mean ``A^1/2 f(A^-1/2 B A^-1/2) A^1/2``."""
    A, B = _same_shape(A, B)
    return _congruence(f, A, B)


def perspective(f: ScalarFunction, A, B) -> np.ndarray:
    """Noncommutative perspective of ``y f(x / y)``: ``B^1/2 f(B^-1/2 A B^-1/2) B^1/2``.

    With ``f = 1/x`` this gives ``perspective(f, I, A) = A^2``.
    """
    A, B = _same_shape(A, B)
    return _congruence(f, B, A)


def _solve(A, B):
    try:
        return np.linalg.solve(A, B)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError("singular matrix in a linear solve", np.inf) from exc


def parallel_sum(A, B) -> np.ndarray:
    """``A : B = (A^-1 + B^-1)^-1``, evaluated as ``A (A + B)^-1 B``.

    The solve form avoids inverting ``A`` and ``B`` separately, which loses
    several digits when either is ill-conditioned.
    """
    A, B = _same_shape(A, B)
    return hermitian(A @ _solve(A + B, B))


def weighted_mean(A, B, alpha: float) -> np.ndarray:
    """``(1 - alpha) A + alpha B``."""
    if not 0.0 <= alpha <= 1.0:
        raise SpecError(f"alpha must lie in [0, 1], got {alpha}")
    A, B = _same_shape(A, B)
    return (1.0 - alpha) * A + alpha * B


def perspective_by_parallel_sums(spec: DiscreteMeasureSpec, A, B) -> np.ndarray:
    """Perspective of a decreasing discrete-measure function written as
    ``alpha B + sum_i w_i (l_i + 1) / l_i ((l_i B A^-1 B) : B)``."""
    A, B = _same_shape(A, B)
    if spec.beta != 0:
        raise SpecError("decreasing representations have beta = 0")
    BAB = hermitian(B @ _solve(A, B))
    out = spec.alpha * B
    for lam, w in spec.atoms:
        out = out + w * (lam + 1.0) / lam * parallel_sum(lam * BAB, B)
    return hermitian(out)


def _same_shape(A, B):
    A = hermitian(A)
    B = hermitian(B)
    if A.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


def _power_stormer_core(A, B):
    return A + B - abs_value(A - B)


def hkh_check(f: ScalarFunction, pair: AnticommutatorPair, *, seed=None) -> CheckReport:
    """``A + B - |A - B| <= 2 A sigma_f B`` for a pair with ``AB + BA >= 0``."""
    if abs(float(f(1.0)) - 1.0) > 1e-10:
        raise SpecError(f"the operator mean needs f(1) = 1, got f(1) = {float(f(1.0))!r}")
    A, B = pair.A, pair.B
    report = CheckReport.psd(
        f"hkh[{f}]", 2.0 * operator_mean(f, A, B) - _power_stormer_core(A, B), seed=seed,
        details={"strategy": pair.strategy},
    )
    if not report.passed:
        report.witness = {"A": A, "B": B}
    return report


def _check_vanishes_at_zero(f):
    if abs(float(f(0.0))) > 1e-12:
        raise SpecError(f"{f} must satisfy f(0) = 0, got {float(f(0.0))!r}")


def theorem_os_check(f: ScalarFunction, A, B, alpha: float, *, seed=None) -> CheckReport:
    """``P_f(A, B) <= (1 - a) A + a B - max(a, 1 - a) |A - B|`` when the right side is positive.

    Trials whose right side is not positive semidefinite are reported with
    status ``precondition-unmet``.
    """
    _check_vanishes_at_zero(f)
    A, B = _same_shape(A, B)
    rhs = weighted_mean(A, B, alpha) - max(alpha, 1.0 - alpha) * abs_value(A - B)
    label = f"os[{f};alpha={alpha:g}]"
    verdict = psd_verdict(rhs)
    if not verdict.is_psd:
        return CheckReport.skipped(label, PRECONDITION_UNMET, "right side is not positive", seed=seed,
                                   details={"rhs_min_eigenvalue": verdict.min_eigenvalue, "alpha": alpha})
    report = CheckReport.psd(label, rhs - perspective(f, A, B), seed=seed, details={"alpha": alpha})
    if not report.passed:
        report.witness = {"A": A, "B": B}
    return report


def corollary_check(f: ScalarFunction, pair: AnticommutatorPair, *, seed=None) -> CheckReport:
    """``A + B - |A - B| >= 2 P_f(A, B)`` for a pair with ``AB + BA >= 0``."""
    _check_vanishes_at_zero(f)
    A, B = pair.A, pair.B
    report = CheckReport.psd(
        f"corollary[{f}]", _power_stormer_core(A, B) - 2.0 * perspective(f, A, B), seed=seed,
        details={"strategy": pair.strategy},
    )
    if not report.passed:
        report.witness = {"A": A, "B": B}
    return report


def counterexample_pair(shift: float = COUNTEREXAMPLE_SHIFT):
    """``A = [[1, 1], [1, 1]] + shift I`` and ``C = [[2, 1], [1, 1]] + shift I``."""
    I = np.eye(2)
    return np.array([[1.0, 1.0], [1.0, 1.0]]) + shift * I, np.array([[2.0, 1.0], [1.0, 1.0]]) + shift * I


def second_variable_counterexample(A=None, C=None) -> CheckReport:
    """Confirm ``A <= C`` while ``P_f(I, A) <= P_f(I, C)`` fails for ``f = 1/x``.

    Passes when the pair really is a counterexample. The margin is
    ``-lambda_min(P_f(I, C) - P_f(I, A))``, positive for a counterexample.
    """
    if A is None and C is None:
        A, C = counterexample_pair()
    A, C = _same_shape(A, C)
    f = Reciprocal()
    I = np.eye(A.shape[0])
    ordered = loewner_leq(A, C)
    diff = perspective(f, I, C) - perspective(f, I, A)
    dv = psd_verdict(diff)
    confirmed = ordered.is_psd and not dv.is_psd
    lhs = dv.min_eigenvalue
    return CheckReport(
        "second_variable_counterexample", lhs, 0.0, -lhs, confirmed, dv.tolerance_used,
        status="passed" if confirmed else "failed",
        witness={"A": A, "C": C},
        details={"order_min_eigenvalue": ordered.min_eigenvalue, "ordered": ordered.is_psd,
                 "perspective_difference_min_eigenvalue": dv.min_eigenvalue,
                 # an indefinite difference also rules out decrease in the second variable
                 "not_decreasing": not psd_verdict(-diff).is_psd},
    )
