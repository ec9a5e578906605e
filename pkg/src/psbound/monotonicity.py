"""Numerical tests of matrix monotonicity and of trace-map convexity.

A ``violated`` verdict is a certificate (its witness can be re-checked); a
``consistent`` verdict is only evidence at the tested order and trial count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SpecError
from .functions import ScalarFunction
from .linalg import apply_function, eigh, op_norm, psd_verdict
from .reports import CheckReport
from .sampling import random_loewner_pair, trial_seed

CONSISTENT = "consistent"
VIOLATED = "violated"

DEFAULT_ORDERS = (2, 3, 4, 5, 6)
DEFAULT_RANGE = (1e-2, 1e2)
CONVEXITY_RTOL = 1e-9


@dataclass
class MonotonicityVerdict:
    method: str
    order: int
    conclusion: str
    margin: float
    witness: dict | None = None
    trials: int = 0
    decreasing: bool = False
    notes: dict = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.conclusion == VIOLATED


def derivative(f: ScalarFunction, x: float) -> float:
    """Central difference with step ``1e-6 (1 + |x|)``."""
    h = 1e-6 * (1.0 + abs(x))
    return (float(f(x + h)) - float(f(x - h))) / (2.0 * h)


def loewner_matrix(f: ScalarFunction, points) -> np.ndarray:
    """Divided-difference matrix with derivatives on the diagonal."""
    x = np.asarray(points, dtype=float)
    fx = np.asarray(f(x), dtype=float)
    dx = x[:, None] - x[None, :]
    off = np.divide(fx[:, None] - fx[None, :], dx, out=np.zeros_like(dx), where=dx != 0)
    off[np.diag_indices_from(off)] = [derivative(f, xi) for xi in x]
    return off


def _check_points(points):
    x = np.sort(np.asarray(points, dtype=float).ravel())
    if x.size == 0:
        raise SpecError("need at least one point")
    if np.any(np.diff(x) <= 0):
        raise SpecError("Loewner points must be distinct")
    return x


def loewner_matrix_test(f: ScalarFunction, points, tol: float | None = None) -> MonotonicityVerdict:
    """Order-n monotonicity via positivity of the Loewner matrix."""
    x = _check_points(points)
    L = loewner_matrix(f, x)
    verdict = psd_verdict(L, tol)
    conclusion = CONSISTENT if verdict.is_psd else VIOLATED
    return MonotonicityVerdict(
        "loewner", len(x), conclusion, verdict.min_eigenvalue,
        witness={"points": x, "loewner_matrix": L} if not verdict.is_psd else None,
        notes={"tolerance": verdict.tolerance_used},
    )


def default_point_sets(domain=None, orders=DEFAULT_ORDERS, span=DEFAULT_RANGE):
    """Log-spaced point sets inside ``span`` clipped to the function domain."""
    lo, hi = span
    if domain is not None:
        if math.isfinite(domain.lo):
            lo = max(lo, domain.lo + 1e-3 * (1.0 + abs(domain.lo)))
        if math.isfinite(domain.hi):
            hi = min(hi, domain.hi - 1e-3 * (1.0 + abs(domain.hi)))
    if not (0 < lo < hi):
        raise SpecError(f"no usable point range inside {domain}")
    return [np.geomspace(lo, hi, n) for n in orders]


def monotone_consistent(f: ScalarFunction, orders=DEFAULT_ORDERS) -> bool:
    """Loewner-matrix evidence that ``f`` is matrix monotone up to ``max(orders)``."""
    try:
        sets = default_point_sets(f.domain, orders)
        return all(not loewner_matrix_test(f, pts).violated for pts in sets)
    except DomainError:
        return False


def _pair_margin(f, A, B, decreasing):
    fa = apply_function(A, f)
    fb = apply_function(B, f)
    D = fa - fb if decreasing else fb - fa
    tol = 1e-9 * (1.0 + op_norm(fa) + op_norm(fb))
    return psd_verdict(D, tol)


def randomized_monotonicity_test(
    f: ScalarFunction,
    dim: int,
    trials: int,
    seed: int,
    decreasing: bool = False,
    pairs=(),
) -> MonotonicityVerdict:
    """Search for ``A <= B`` with ``f(A) <= f(B)`` (``>=`` if decreasing) failing.

    Injected ``pairs`` are tried before the random ones.
    """
    if dim < 2:
        raise SpecError("randomized monotonicity test needs dim >= 2")
    candidates = [(np.asarray(A), np.asarray(B), None) for A, B in pairs]
    count = 0
    worst = math.inf

    def trial_iter():
        yield from candidates
        for i in range(trials):
            s = trial_seed(seed, "monotone", dim, i)
            A, B = random_loewner_pair(dim, s)
            yield A, B, s

    for A, B, s in trial_iter():
        count += 1
        verdict = _pair_margin(f, A, B, decreasing)
        worst = min(worst, verdict.min_eigenvalue)
        if not verdict.is_psd:
            return MonotonicityVerdict(
                "randomized", A.shape[0], VIOLATED, verdict.min_eigenvalue,
                witness={"A": A, "B": B, "seed": s}, trials=count, decreasing=decreasing,
                notes={"tolerance": verdict.tolerance_used},
            )
    return MonotonicityVerdict("randomized", dim, CONSISTENT, worst, trials=count, decreasing=decreasing)


def recheck(verdict: MonotonicityVerdict, f: ScalarFunction) -> float:
    """Recompute the margin from the stored witness alone."""
    if verdict.witness is None:
        raise SpecError("verdict carries no witness")
    if verdict.method == "loewner":
        return float(np.linalg.eigvalsh(loewner_matrix(f, verdict.witness["points"]))[0])
    w = verdict.witness
    return _pair_margin(f, w["A"], w["B"], verdict.decreasing).min_eigenvalue


# -- convexity in the exponent ----------------------------------------------------


def default_convexity_grid(points: int = 33) -> np.ndarray:
    """Uniform interior grid ``k / (points + 1)``, closed under midpoints of even gaps."""
    return np.arange(1, points + 1) / (points + 1.0)


def convexity_scan(A, B, grid=None, *, seed=None) -> CheckReport:
    """Midpoint convexity of ``t -> tr(A^t B^(1-t))`` on a grid in ``(0, 1)``."""
    grid = default_convexity_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(grid >= 1) or np.any(np.diff(grid) <= 0):
        raise SpecError("grid must be ascending inside (0, 1)")
    decA, decB = eigh(A), eigh(B)
    for name, dec in (("A", decA), ("B", decB)):
        if dec.eigenvalues[0] <= 0:
            raise DomainError(f"{name} must be positive definite for fractional powers",
                              value=float(dec.eigenvalues[0]))
    values = np.array([
        np.sum(decA.reconstruct(decA.eigenvalues ** t) * decB.reconstruct(decB.eigenvalues ** (1 - t)).T).real
        for t in grid
    ])
    tol = CONVEXITY_RTOL * (1.0 + float(np.max(np.abs(values))))
    worst = (math.inf, 0.0, 0.0)
    pairs = 0
    for i in range(len(grid)):
        for j in range(i + 1, len(grid)):
            mid = 0.5 * (grid[i] + grid[j])
            k = int(np.searchsorted(grid, mid))
            if k < len(grid) and math.isclose(grid[k], mid, rel_tol=0, abs_tol=1e-12):
                pairs += 1
                avg = 0.5 * (values[i] + values[j])
                if avg - values[k] < worst[0]:
                    worst = (avg - values[k], values[k], avg)
    if pairs == 0:
        raise SpecError("grid contains no midpoint triples")
    margin, lhs, rhs = worst
    report = CheckReport("convexity", lhs, rhs, margin, margin >= -tol, tol, seed=seed,
                         status="passed" if margin >= -tol else "failed",
                         details={"midpoint_pairs": pairs})
    if not report.passed:
        report.witness = {"A": np.asarray(A), "B": np.asarray(B), "grid": grid}
    return report
