"""Powers-Stormer type trace inequalities and Chernoff-type bounds."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError, PsboundError, SpecError
from .functions import Companion, ScalarFunction, power_family
from .linalg import (
    abs_value,
    apply_function,
    eigh,
    kron,
    op_norm,
    positive_part_projection,
    trace_norm,
    trace_product,
)
from .reports import INCONCLUSIVE, CheckReport

PS_RTOL = 1e-8
LEMMA_RTOL = 1e-9
IMAG_RTOL = 1e-10
DENSITY_TRACE_TOL = 1e-8

CHERNOFF_EPS = 1e-3
CHERNOFF_GRID = 257
GOLDEN_XTOL = 1e-10

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@functools.lru_cache(maxsize=512)
def companion_of(f: ScalarFunction) -> Companion:
    """Companion ``x / f(x)``; construction probes ``f`` so it is cached."""
    return Companion(f)


def _pair(A, B):
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A, B


def _real_trace(M, N) -> float:
    return trace_product(M, N).real


def ps_lhs(A, B) -> float:
    """``tr(A + B) - tr|A - B|``."""
    A, B = _pair(A, B)
    return float(np.trace(A + B).real) - trace_norm(A - B)


def ps_rhs(f: ScalarFunction, A, B) -> float:
    """``2 tr(f(A) g(B))`` with ``g(x) = x / f(x)``."""
    A, B = _pair(A, B)
    g = companion_of(f)
    return 2.0 * _real_trace(apply_function(A, f), apply_function(B, g))


def ps_check(f: ScalarFunction, A, B, *, seed=None, label=None) -> CheckReport:
    """``tr(A + B) - tr|A - B| <= 2 tr(f(A) g(B))``."""
    label = label or f"ps[{f}]"
    lhs = ps_lhs(A, B)
    try:
        rhs = ps_rhs(f, A, B)
    except DomainError as exc:
        return CheckReport.skipped(label, INCONCLUSIVE, str(exc), seed=seed)
    tol = PS_RTOL * (1.0 + abs(lhs) + abs(rhs))
    report = CheckReport.compare(label, lhs, rhs, tol, seed=seed)
    if not report.passed:
        report.witness = {"A": np.asarray(A), "B": np.asarray(B)}
    return report


def ps_three_matrix_check(f: ScalarFunction, A, B, X, *, seed=None, label=None) -> CheckReport:
    """``tr(AX + XB) - tr(X^1/2 |A - B| X^1/2) <= 2 tr(f(A) X g(B))``.

    The right-hand trace is complex for noncommuting operands; its real part
    is compared and the imaginary part is kept in ``details``.
    """
    label = label or f"ps3[{f}]"
    A, B = _pair(A, B)
    X = np.asarray(X, dtype=complex)
    Xh = apply_function(X, np.sqrt)
    lhs = (trace_product(A, X) + trace_product(X, B)).real - trace_product(Xh @ abs_value(A - B), Xh).real
    try:
        g = companion_of(f)
        t = 2.0 * trace_product(apply_function(A, f) @ X, apply_function(B, g))
    except DomainError as exc:
        return CheckReport.skipped(label, INCONCLUSIVE, str(exc), seed=seed)
    tol = PS_RTOL * (1.0 + abs(lhs) + abs(t.real))
    report = CheckReport.compare(label, lhs, t.real, tol, seed=seed, details={"rhs_imag": t.imag})
    if not report.passed:
        report.witness = {"A": A, "B": B, "X": X}
    return report


def lemma_functionals(f_dec: ScalarFunction, g_mon: ScalarFunction, A, B) -> tuple[float, float]:
    """``(tr(P A (g(B) - g(A))), tr(P A (f(A) - f(B))))``, ``P`` the range projection of ``(B - A)_+``."""
    A, B = _pair(A, B)
    P = positive_part_projection(B - A)
    PA = P @ A
    dg = apply_function(B, g_mon) - apply_function(A, g_mon)
    df = apply_function(A, f_dec) - apply_function(B, f_dec)
    out = []
    for D in (dg, df):
        t = trace_product(PA, D)
        scale = 1.0 + op_norm(A) * op_norm(D) * A.shape[0]
        if abs(t.imag) > IMAG_RTOL * scale:
            raise PsboundError(f"lemma functional has imaginary part {t.imag:.3e}")
        out.append(t.real)
    return out[0], out[1]


def lemma_check(f_dec: ScalarFunction, g_mon: ScalarFunction, A, B, *, seed=None) -> CheckReport:
    """Both lemma functionals nonnegative; margin is the smaller of the two."""
    A, B = _pair(A, B)
    mon, dec = lemma_functionals(f_dec, g_mon, A, B)
    scale = 1.0 + op_norm(A) * max(
        op_norm(apply_function(X, fn)) for X in (A, B) for fn in (f_dec, g_mon)
    ) * A.shape[0]
    report = CheckReport.compare(
        f"lemma[{f_dec};{g_mon}]", 0.0, min(mon, dec), LEMMA_RTOL * scale, seed=seed,
        details={"monotone_functional": mon, "decreasing_functional": dec},
    )
    if not report.passed:
        report.witness = {"A": A, "B": B}
    return report


# -- Chernoff ---------------------------------------------------------------------


@dataclass(frozen=True)
class ChernoffResult:
    value: float
    argmin_s: float
    grid_size: int
    refined: bool


def _power_trace(decA, decB, s: float) -> float:
    As = decA.reconstruct(_pos_power(decA.eigenvalues, s))
    Bs = decB.reconstruct(_pos_power(decB.eigenvalues, 1.0 - s))
    return _real_trace(As, Bs)


def _pos_power(w, t):
    w = np.clip(w, 0.0, None)
    return np.where(w > 0, np.power(np.where(w > 0, w, 1.0), t), 0.0)


def chernoff_s(A, B, s: float) -> float:
    """``tr(A^s B^(1-s))`` for ``s`` in ``(0, 1)`` with ``0^t = 0``."""
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s}", value=s)
    A, B = _pair(A, B)
    return _power_trace(eigh(A), eigh(B), s)


def golden_section(fn, a: float, b: float, xtol: float = GOLDEN_XTOL, max_iter: int = 200):
    """Minimize a unimodal ``fn`` on ``[a, b]``; returns ``(x, fn(x))``."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    return (c, fc) if fc <= fd else (d, fd)


def chernoff_grid(eps: float = CHERNOFF_EPS, size: int = CHERNOFF_GRID) -> np.ndarray:
    return np.linspace(eps, 1.0 - eps, size)


def chernoff_bound(A, B, eps: float = CHERNOFF_EPS, grid_size: int = CHERNOFF_GRID) -> ChernoffResult:
    """``min_s tr(A^s B^(1-s))`` over ``[eps, 1 - eps]``.

    Uniform grid scan, then golden-section refinement on the two cells
    around the best node (the objective is convex in ``s``).
    """
    A, B = _pair(A, B)
    decA, decB = eigh(A), eigh(B)
    grid = chernoff_grid(eps, grid_size)
    vals = np.array([_power_trace(decA, decB, s) for s in grid])
    k = int(np.argmin(vals))
    best_s, best = float(grid[k]), float(vals[k])
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid_size - 1)]
    s, v = golden_section(lambda t: _power_trace(decA, decB, t), float(lo), float(hi))
    refined = v < best
    if refined:
        best_s, best = s, v
    return ChernoffResult(best, best_s, grid_size, refined)


def family_bound(catalog: Sequence[ScalarFunction], A, B) -> tuple[float, ScalarFunction]:
    """Least ``tr(f(A) g(B))`` over a finite catalog, with the minimizing ``f``."""
    if not catalog:
        raise SpecError("family_bound needs a non-empty catalog")
    A, B = _pair(A, B)
    decA, decB = eigh(A), eigh(B)
    best = None
    for f in catalog:
        g = companion_of(f)
        value = _real_trace(apply_function(A, f, decomposition=decA), apply_function(B, g, decomposition=decB))
        if best is None or value < best[0]:
            best = (value, f)
    return best


def power_family_bound(A, B, eps: float = CHERNOFF_EPS, grid_size: int = CHERNOFF_GRID):
    return family_bound(power_family(chernoff_grid(eps, grid_size)), A, B)


def _check_density(rho, name):
    t = np.trace(rho).real
    if abs(t - 1.0) > DENSITY_TRACE_TOL:
        raise SpecError(f"{name} has trace {t!r}, expected 1")


def trace_distance(rho, sigma) -> float:
    """``||rho - sigma||_1 / 2`` for density matrices."""
    rho, sigma = _pair(rho, sigma)
    _check_density(rho, "rho")
    _check_density(sigma, "sigma")
    return 0.5 * trace_norm(rho - sigma)


def sandwich_check(rho, sigma, *, seed=None) -> CheckReport:
    """``1 - CH <= phi <= sqrt(1 - CH^2)`` with the quantum Chernoff bound ``CH``."""
    phi = trace_distance(rho, sigma)
    ch = chernoff_bound(rho, sigma)
    lower = phi - (1.0 - ch.value)
    upper = math.sqrt(max(1.0 - ch.value ** 2, 0.0)) - phi
    tol = PS_RTOL * 3.0
    margin = min(lower, upper)
    passed = margin >= -tol
    report = CheckReport(
        "sandwich", 0.0, margin, margin, passed, tol, seed=seed,
        status="passed" if passed else "failed",
        details={"chernoff": ch.value, "argmin_s": ch.argmin_s, "trace_distance": phi,
                 "lower_margin": lower, "upper_margin": upper},
    )
    if not passed:
        report.witness = {"rho": np.asarray(rho), "sigma": np.asarray(sigma)}
    return report


def family_lower_bound_check(catalog, rho, sigma, *, seed=None) -> CheckReport:
    """``1 - phi(rho, sigma) <= min_f tr(f(rho) g(sigma))``."""
    phi = trace_distance(rho, sigma)
    value, f = family_bound(catalog, rho, sigma)
    report = CheckReport.compare("family_lower_bound", 1.0 - phi, value, PS_RTOL, seed=seed,
                                 details={"argmin_function": str(f), "trace_distance": phi})
    if not report.passed:
        report.witness = {"rho": np.asarray(rho), "sigma": np.asarray(sigma)}
    return report


def tensor_trace(f: ScalarFunction, g: ScalarFunction, A, B) -> float:
    """``tr(f(A) (x) g(B))``."""
    return float(np.trace(kron(apply_function(A, f), apply_function(B, g))).real)


def joint_convexity_check(f, g, A1, B1, A2, B2, *, seed=None) -> CheckReport:
    """Midpoint joint convexity of ``(A, B) -> tr(f(A) (x) g(B))``."""
    mid = tensor_trace(f, g, 0.5 * (A1 + A2), 0.5 * (B1 + B2))
    avg = 0.5 * (tensor_trace(f, g, A1, B1) + tensor_trace(f, g, A2, B2))
    return CheckReport.compare(f"joint_convexity[{f};{g}]", mid, avg, PS_RTOL * (1.0 + abs(mid) + abs(avg)), seed=seed)
