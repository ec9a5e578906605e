"""Seeded random models: Wishart PD matrices, densities and structured pairs.

Every sampler takes an integer seed and drives a counter-based Philox
generator, so a trial is reproducible from ``(dim, seed)`` alone regardless
of which worker runs it.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .errors import GenerationError, SpecError
from .geometry import AnticommutatorPair, anticommutator_min_eig
from .linalg import hermitian, op_norm, psd_verdict

PD_SHIFT = 1e-6
REJECTION_BUDGET = 10_000
PERTURBATION_SCALE = 0.1
STRATEGIES = ("commuting", "perturbative", "rejection")


def trial_seed(seed: int, *keys) -> int:
    """64-bit seed for one trial, derived by hashing the campaign seed and keys."""
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<q", int(seed) & 0x7FFFFFFFFFFFFFFF))
    for k in keys:
        h.update(b"\x00" + str(k).encode())
    return struct.unpack("<Q", h.digest())[0] >> 1


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def ginibre(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    """Matrix of independent standard complex normals."""
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def _wishart(rng, dim):
    G = ginibre(rng, dim)
    W = G @ G.conj().T
    return hermitian(W + PD_SHIFT * np.trace(W).real / dim * np.eye(dim))


def _require_dim(dim):
    if int(dim) < 1:
        raise SpecError(f"dimension must be >= 1, got {dim}")
    return int(dim)


def _validate_pd(M, what):
    if np.linalg.eigvalsh(M)[0] <= 0:
        raise GenerationError(f"{what} generator produced a matrix that is not positive definite")
    return M


def random_pd(dim: int, seed: int) -> np.ndarray:
    """``G G* + 1e-6 tr(G G*) / dim I`` for a complex Ginibre ``G``."""
    dim = _require_dim(dim)
    return _validate_pd(_wishart(generator(seed), dim), "wishart_pd")


def normalize_trace(M) -> np.ndarray:
    return M / np.trace(M).real


def random_density(dim: int, seed: int) -> np.ndarray:
    rho = normalize_trace(random_pd(dim, seed))
    if abs(np.trace(rho).real - 1.0) > 1e-12:
        raise GenerationError("density generator lost unit trace")
    return rho


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar unitary via QR with phase correction."""
    Q, R = np.linalg.qr(ginibre(rng, dim))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_loewner_pair(dim: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """``(A, B)`` with ``B = A + r r*`` for a random PD ``A`` and vector ``r``."""
    dim = _require_dim(dim)
    rng = generator(seed)
    A = _validate_pd(_wishart(rng, dim), "loewner_ordered_pair")
    r = ginibre(rng, dim, 1) * np.sqrt(op_norm(A) / dim)
    B = hermitian(A + r @ r.conj().T)
    if not psd_verdict(B - A):
        raise GenerationError("loewner_ordered_pair generator produced an unordered pair")
    return A, B


def random_pd_pairs(dim: int, seed: int, count: int = 2) -> list[np.ndarray]:
    rng = generator(seed)
    return [_validate_pd(_wishart(rng, dim), "wishart_pd") for _ in range(count)]


def random_anticommutator_pair(dim: int, seed: int, strategy: str = "commuting") -> AnticommutatorPair:
    """PD pair with ``AB + BA >= 0`` drawn by the named strategy.

    ``commuting``: shared Haar eigenbasis, independent log-uniform spectra.
    ``perturbative``: ``B = A + eps R R*`` with ``eps`` halved until valid.
    ``rejection``: independent Wishart pairs, first valid one kept.
    """
    dim = _require_dim(dim)
    rng = generator(seed)
    if strategy == "commuting":
        U = random_unitary(rng, dim)
        a = 10.0 ** rng.uniform(-1, 1, dim)
        b = 10.0 ** rng.uniform(-1, 1, dim)
        A = hermitian((U * a) @ U.conj().T)
        B = hermitian((U * b) @ U.conj().T)
        return AnticommutatorPair.from_matrices(A, B, strategy=strategy)
    if strategy == "perturbative":
        A = _wishart(rng, dim)
        R = ginibre(rng, dim)
        E = R @ R.conj().T
        eps = PERTURBATION_SCALE * op_norm(A) / op_norm(E) * rng.uniform(0.1, 1.0)
        for attempt in range(64):
            B = hermitian(A + eps * E)
            if anticommutator_min_eig(A, B) >= -AnticommutatorPair.tolerance(A, B):
                return AnticommutatorPair.from_matrices(A, B, strategy=strategy, rejections=attempt)
            eps *= 0.5
        raise GenerationError("perturbative strategy failed to reach a positive anticommutator")
    if strategy == "rejection":
        for attempt in range(REJECTION_BUDGET):
            A = _wishart(rng, dim)
            B = _wishart(rng, dim)
            if anticommutator_min_eig(A, B) >= -AnticommutatorPair.tolerance(A, B):
                return AnticommutatorPair.from_matrices(A, B, strategy=strategy, rejections=attempt)
        raise GenerationError(
            f"rejection sampling found no pair with AB + BA >= 0 in {REJECTION_BUDGET} draws at dim {dim}; "
            "try --strategy commuting or perturbative"
        )
    raise SpecError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")

