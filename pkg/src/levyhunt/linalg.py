"""Spectral tools for the Gaussian covariance ``Q``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import Atoms, IsotropicStable, LevyMeasure, LineDensity

__all__ = [
    "SpectralData",
    "spectral_decompose",
    "matrix_sqrt",
    "range_projectors",
    "measure_off_range_mass",
    "null_space_basis",
    "DEFAULT_RANK_THRESHOLD",
]

DEFAULT_RANK_THRESHOLD = 1e-10
SYMMETRY_TOL = 1e-9
DIRECTION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralData:
    """``O Q O^T = diag(eigenvalues)`` with eigenvalues non-increasing.

    Rows of ``O`` are eigenvectors.  Eigenvalues below the rank threshold are
    stored as exact zeros.
    """

    O: np.ndarray
    eigenvalues: np.ndarray
    rank: int

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self) -> np.ndarray:
        return self.O.T @ np.diag(self.eigenvalues) @ self.O

    def range_basis(self) -> np.ndarray:
        """Orthonormal columns spanning ``sqrt(Q) R^n``."""
        return self.O[: self.rank].T.copy()

    def null_basis(self) -> np.ndarray:
        """Orthonormal columns spanning the orthocomplement of the range."""
        return self.O[self.rank :].T.copy()


def spectral_decompose(Q, rank_threshold: float = DEFAULT_RANK_THRESHOLD) -> SpectralData:
    """Eigen-decompose a symmetric PSD matrix.

    Eigenvalues at or below ``rank_threshold * max(largest eigenvalue, 1 if all tiny)``
    are set to zero.  Raises ``ValueError`` on a non-symmetric input.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if Q.shape[0] != Q.shape[1]:
        raise ValueError(f"Q must be square, got shape {Q.shape}")
    n = Q.shape[0]
    if n == 0:
        return SpectralData(np.zeros((0, 0)), np.zeros(0), 0)
    if not np.allclose(Q, Q.T, rtol=0.0, atol=SYMMETRY_TOL * (1.0 + np.abs(Q).max())):
        raise ValueError("Q is not symmetric")
    Qs = 0.5 * (Q + Q.T)
    w, v = np.linalg.eigh(Qs)
    order = np.argsort(w, kind="stable")[::-1]
    w = w[order]
    O = v[:, order].T
    top = w[0] if w[0] > rank_threshold else 1.0
    cut = rank_threshold * top
    w = np.where(w > cut, w, 0.0)
    rank = int(np.count_nonzero(w))
    return SpectralData(O, w, rank)


def matrix_sqrt(s: SpectralData) -> np.ndarray:
    """Symmetric PSD square root ``O^T diag(sqrt(lambda)) O``."""
    R = s.O.T @ np.diag(np.sqrt(s.eigenvalues)) @ s.O
    return 0.5 * (R + R.T)


def range_projectors(s: SpectralData) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal projectors onto ``sqrt(Q) R^n`` and its orthocomplement."""
    n = s.dim
    Ek = np.zeros(n)
    Ek[: s.rank] = 1.0
    P1 = s.O.T @ np.diag(Ek) @ s.O
    P1 = 0.5 * (P1 + P1.T)
    P2 = np.eye(n) - P1
    return P1, P2


def null_space_basis(Q, rank_threshold: float = DEFAULT_RANK_THRESHOLD) -> np.ndarray:
    return spectral_decompose(Q, rank_threshold).null_basis()


def measure_off_range_mass(mu: LevyMeasure, P2) -> float:
    """Mass of ``mu`` on ``{x : P2 x != 0}`` (``inf`` when infinite)."""
    P2 = np.asarray(P2, dtype=float)
    if not np.any(np.abs(P2) > DIRECTION_TOL):
        return 0.0
    total = 0.0
    for c in mu:
        if isinstance(c, Atoms):
            if c.weights.size:
                off = np.linalg.norm(c.locations @ P2.T, axis=1) > DIRECTION_TOL * np.maximum(1.0, c.norms())
                total += float(c.weights[off].sum())
        elif isinstance(c, LineDensity):
            if np.linalg.norm(P2 @ c.direction) > DIRECTION_TOL:
                total += c.moment(0)
        elif isinstance(c, IsotropicStable):
            if np.abs(P2 @ c.basis_matrix()).max() > DIRECTION_TOL:
                total += c.radial_moment(0)
        if math.isinf(total):
            return math.inf
    return total
