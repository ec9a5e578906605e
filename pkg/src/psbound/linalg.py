"""Dense complex Hermitian linear algebra.

Matrices are plain complex ``numpy`` arrays. :func:`hermitian` is the single
entry point that validates and symmetrizes user input; everything downstream
assumes its output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConvergenceError, DimensionError, DomainError, SpecError

#: relative asymmetry accepted by the JSON reader
JSON_ASYMMETRY_RTOL = 1e-8
#: eigenvalues above ``PROJECTION_CUTOFF * (1 + ||A||)`` count as positive
PROJECTION_CUTOFF = 1e-12
#: default Loewner-order tolerance is ``PSD_RTOL * (1 + ||A||)``
PSD_RTOL = 1e-9

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 64
_JACOBI_FLOOR = 1e-30


def hermitian(M, *, rtol: float | None = None) -> np.ndarray:
    """Return ``(M + M*) / 2`` as a complex array.

    If ``rtol`` is given, inputs whose relative asymmetry exceeds it are
    rejected instead of silently symmetrized.
    """
    A = np.array(M, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {A.shape}")
    if rtol is not None:
        resid = asymmetry(A)
        if resid > rtol:
            raise SpecError(f"matrix is not Hermitian (relative asymmetry {resid:.3e} > {rtol:.1e})")
    return 0.5 * (A + A.conj().T)


def asymmetry(M) -> float:
    """Relative Frobenius asymmetry ``||M - M*|| / (2 max(1, ||M||))``."""
    M = np.asarray(M, dtype=complex)
    return float(np.linalg.norm(M - M.conj().T) / (2.0 * max(1.0, np.linalg.norm(M))))


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values=None) -> np.ndarray:
        """``U diag(values) U*``, defaulting to the eigenvalues themselves."""
        w = self.eigenvalues if values is None else values
        U = self.eigenvectors
        return (U * w) @ U.conj().T


def eigh(A, method: str = "lapack") -> SpectralDecomposition:
    """Eigendecomposition with ascending eigenvalues.

    ``method="jacobi"`` runs the in-house cyclic complex Jacobi solver; the
    default delegates to LAPACK through numpy.
    """
    A = hermitian(A)
    if method == "jacobi":
        return jacobi_eigh(A)
    if method != "lapack":
        raise SpecError(f"unknown eigensolver {method!r}")
    w, U = np.linalg.eigh(A)
    return SpectralDecomposition(w, U)


def jacobi_eigh(A, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> SpectralDecomposition:
    """Cyclic Jacobi eigensolver for complex Hermitian matrices.

    Each rotation first rotates the phase of ``a_pq`` to make it real and then
    applies the classical real Jacobi rotation. Converges when the
    off-diagonal Frobenius mass drops below ``tol * ||A||_F``.
    """
    A = hermitian(A)
    n = A.shape[0]
    U = np.eye(n, dtype=complex)
    scale = np.linalg.norm(A)

    def off(M):
        return np.linalg.norm(M - np.diag(np.diag(M)))

    if scale == 0.0 or n == 1:
        return SpectralDecomposition(np.real(np.diag(A)).copy(), U)

    resid = off(A)
    sweeps = 0
    while resid >= tol * scale:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal residual {resid:.3e})",
                residual=resid,
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                # negligible entries are skipped; dividing by them overflows
                if mag <= _JACOBI_FLOOR * scale:
                    continue
                phase = apq / mag
                theta = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                V = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ V
                A[idx, :] = V.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                U[:, idx] = U[:, idx] @ V
        A = 0.5 * (A + A.conj().T)
        resid = off(A)
        sweeps += 1

    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], U[:, order])


def op_norm(A) -> float:
    """Spectral norm of a Hermitian matrix."""
    w = np.linalg.eigvalsh(np.asarray(A, dtype=complex))
    return float(np.max(np.abs(w)))


def psd_tolerance(A) -> float:
    return PSD_RTOL * (1.0 + op_norm(A))


def apply_function(A, f: Callable, *, decomposition: SpectralDecomposition | None = None) -> np.ndarray:
    """Spectral calculus ``f(A) = U diag(f(w)) U*``.

    ``f`` is any vectorized callable; if it carries a ``domain`` attribute,
    eigenvalues within ``1e-12 (1 + ||A||)`` below a closed endpoint are
    snapped onto it (so PSD inputs with rounding noise hit the ``x = 0``
    convention) and anything further out raises :class:`DomainError`.
    """
    dec = decomposition if decomposition is not None else eigh(A)
    w = np.array(dec.eigenvalues, dtype=float)
    domain = getattr(f, "domain", None)
    if domain is not None:
        snap = PROJECTION_CUTOFF * (1.0 + float(np.max(np.abs(w))))
        w = domain.snap(w, snap)
        bad = ~domain.contains(w)
        if np.any(bad):
            raise DomainError(f"eigenvalue {w[bad][0]!r} outside the domain {domain} of {f}", value=float(w[bad][0]))
    fw = np.asarray(f(w), dtype=float)
    return dec.reconstruct(fw)


def abs_value(A) -> np.ndarray:
    """``|A| = (A*A)^{1/2}``; for Hermitian ``A`` the eigenvalues become ``|w|``."""
    return apply_function(A, np.abs)


def jordan_parts(A) -> tuple[np.ndarray, np.ndarray]:
    """Positive and negative parts ``A = A_+ - A_-``."""
    dec = eigh(A)
    w = dec.eigenvalues
    return dec.reconstruct(np.where(w > 0, w, 0.0)), dec.reconstruct(np.where(w < 0, -w, 0.0))


def positive_part_projection(A) -> np.ndarray:
    """Orthogonal projection onto the range of ``A_+``."""
    dec = eigh(A)
    w = dec.eigenvalues
    cutoff = PROJECTION_CUTOFF * (1.0 + float(np.max(np.abs(w))))
    V = dec.eigenvectors[:, w > cutoff]
    return V @ V.conj().T


def trace_norm(A) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(np.asarray(A, dtype=complex)))))


def trace_product(M, N) -> complex:
    """``tr(M N)`` as ``sum_ij M_ij N_ji`` without forming the product."""
    return complex(np.sum(np.asarray(M) * np.asarray(N).T))


@dataclass(frozen=True)
class PositivityVerdict:
    is_psd: bool
    min_eigenvalue: float
    tolerance_used: float

    def __bool__(self):
        return self.is_psd


def psd_verdict(M, tol: float | None = None) -> PositivityVerdict:
    """Is the Hermitian matrix ``M`` positive semidefinite at ``tol``?"""
    w = np.linalg.eigvalsh(hermitian(M))
    if tol is None:
        tol = PSD_RTOL * (1.0 + float(np.max(np.abs(w))))
    lo = float(w[0])
    tol = float(tol)
    return PositivityVerdict(bool(lo >= -tol), lo, tol)


def loewner_leq(A, B, tol: float | None = None) -> PositivityVerdict:
    """Verdict on ``A <= B``, i.e. on the positivity of ``B - A``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return psd_verdict(B - A, tol)


def kron(A, B) -> np.ndarray:
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


# -- matrix JSON ------------------------------------------------------------


def matrix_to_dict(A) -> dict:
    A = np.asarray(A, dtype=complex)
    return {
        "dim": int(A.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }


def matrix_from_dict(data: dict) -> np.ndarray:
    try:
        dim = int(data["dim"])
        rows = data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed matrix JSON: {exc}") from exc
    if len(rows) != dim or any(len(row) != dim for row in rows):
        raise DimensionError(f"matrix JSON is not {dim}x{dim}")
    try:
        M = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    return hermitian(M, rtol=JSON_ASYMMETRY_RTOL)


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_dict(data)


def save_matrix(A, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(A)))
