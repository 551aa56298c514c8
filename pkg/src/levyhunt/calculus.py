"""
Process algebra on triplets: independent sums, product embeddings, subspace
projections and big-jump truncation.

All operations return new triplets; the exponent identities they satisfy are

* sum: ``psi = psi_1 + psi_2``;
* product: ``psi(x, y) = psi_1(x) + psi_2(y)``;
* projection onto ``span(V)`` (orthonormal columns): ``psi_Y(w) = psi_X(V w)``;
* truncation by a finite ``mu1 <= mu``:
  ``psi - psi' = int (1 - e^{i<z,x>}) mu1(dx)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .linalg import DIRECTION_TOL
from .measure import (
    ORIGIN_TOL,
    Atoms,
    IsotropicStable,
    LevyMeasure,
    LineDensity,
    RadialDensity,
    stable_marginal_constant,
)
from .triplet import LevyTriplet

__all__ = [
    "sum_triplets",
    "product_embed",
    "ProjectionResult",
    "project_triplet",
    "truncate_big_jumps",
    "InsideRadius",
    "OutsideRadius",
    "OffRangeOf",
    "restrict_measure",
    "NotProjectableError",
]

ORTHONORMAL_TOL = 1e-10


class NotProjectableError(ValueError):
    """A measure component has no pushforward in the supported families."""


def sum_triplets(t1: LevyTriplet, t2: LevyTriplet) -> LevyTriplet:
    """Triplet of ``X_1 + X_2`` for independent ``X_1, X_2``."""
    if t1.dim != t2.dim:
        raise ValueError(f"dimension mismatch: {t1.dim} vs {t2.dim}")
    return LevyTriplet(t1.a + t2.a, t1.Q + t2.Q, t1.mu + t2.mu)


def _embed_component(c, n_before: int, n_after: int):
    def pad(v):
        return np.concatenate([np.zeros(n_before), v, np.zeros(n_after)])

    if isinstance(c, Atoms):
        m = c.weights.size
        loc = np.hstack([np.zeros((m, n_before)), c.locations, np.zeros((m, n_after))])
        return Atoms(loc, c.weights.copy())
    if isinstance(c, LineDensity):
        return LineDensity(pad(c.direction), c.positive, c.negative)
    B = c.basis_matrix()
    k = B.shape[1]
    B = np.vstack([np.zeros((n_before, k)), B, np.zeros((n_after, k))])
    return IsotropicStable(c.alpha, c.intensity, c.dim + n_before + n_after, B, c.rmin, c.rmax)


def product_embed(t1: LevyTriplet, t2: LevyTriplet) -> LevyTriplet:
    """Triplet of ``(X_1, X_2)`` on ``R^(n+m)`` for independent components."""
    n, m = t1.dim, t2.dim
    Q = np.zeros((n + m, n + m))
    Q[:n, :n] = t1.Q
    Q[n:, n:] = t2.Q
    comps = [_embed_component(c, 0, m) for c in t1.mu]
    comps += [_embed_component(c, n, 0) for c in t2.mu]
    return LevyTriplet(np.concatenate([t1.a, t2.a]), Q, LevyMeasure(comps))


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """Triplet of ``Y = V^T X`` in the coordinates of the orthonormal basis ``V``.

    ``dropped_mass`` is the mass of jumps whose image is the origin; those
    jumps move ``Y`` by zero and are removed from the measure.
    """

    subspace_basis: np.ndarray
    projected_triplet: LevyTriplet
    a_prime: np.ndarray
    dropped_mass: float = 0.0


def _check_basis(V, dim):
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    if V.shape[0] != dim:
        raise ValueError(f"basis vectors have length {V.shape[0]}, triplet has dim {dim}")
    k = V.shape[1]
    if not 1 <= k <= dim:
        raise ValueError(f"subspace dimension must be in [1, {dim}], got {k}")
    err = np.abs(V.T @ V - np.eye(k)).max()
    if err > ORTHONORMAL_TOL:
        raise ValueError(f"basis is not orthonormal (max |V^T V - I| = {err:.3g})")
    return V


def _project_stable(c: IsotropicStable, V):
    """Pushforward of an isotropic stable part under ``y = V^T x``."""
    M = V.T @ c.basis_matrix()
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    k = c.support_dim
    if np.any((s > 1e-10) & (np.abs(s - 1.0) > 1e-10)):
        raise NotProjectableError(
            "isotropic stable component is not mapped isometrically onto its image "
            f"(singular values {np.round(s, 12).tolist()})"
        )
    r = int(np.count_nonzero(s > 0.5))
    if r == 0:
        return None, c.radial_moment(0)
    if r < k and not c.full_window:
        raise NotProjectableError("windowed isotropic stable parts only project isometrically")
    intensity = c.intensity * stable_marginal_constant(c.alpha, k, r)
    m = V.shape[1]
    basis = None if r == m else U[:, :r]
    return IsotropicStable(c.alpha, intensity, m, basis, c.rmin, c.rmax), 0.0


def project_triplet(t: LevyTriplet, subspace_basis) -> ProjectionResult:
    """Triplet of the projection of ``X`` onto ``span(subspace_basis)``.

    ``subspace_basis`` holds orthonormal columns (a single vector is accepted).
    In basis coordinates ``w`` the projected exponent is ``psi_X(V w)``; the
    linear term picks up the compensator change
    ``int V^T x (1{|x|<1} - 1{|V^T x|<1}) mu(dx)``.
    """
    V = _check_basis(subspace_basis, t.dim)
    m = V.shape[1]
    a = V.T @ t.a
    Q = V.T @ t.Q @ V
    Q = 0.5 * (Q + Q.T)
    comps = []
    dropped = 0.0
    for c in t.mu:
        if isinstance(c, Atoms):
            if not c.weights.size:
                continue
            Y = c.locations @ V
            ny = np.linalg.norm(Y, axis=1)
            nx = c.norms()
            ind = (nx < 1.0).astype(float) - (ny < 1.0).astype(float)
            a = a + (c.weights * ind) @ Y
            keep = ny > ORIGIN_TOL
            dropped += float(c.weights[~keep].sum())
            if keep.any():
                comps.append(Atoms(Y[keep], c.weights[keep]))
        elif isinstance(c, LineDensity):
            img = V.T @ c.direction
            k = float(np.linalg.norm(img))
            if k <= ORIGIN_TOL:
                dropped += c.moment(0)
                continue
            if abs(k - 1.0) > 1e-15:
                lo, hi = sorted((1.0, 1.0 / k))
                corr = c.moment(1, lo, hi, signed=True)
                a = a + (-img if k < 1.0 else img) * corr
            comps.append(LineDensity(img / k, c.positive.scaled(k), c.negative.scaled(k)))
        else:
            new, lost = _project_stable(c, V)
            dropped += lost
            if new is not None:
                comps.append(new)
    pt = LevyTriplet(a, Q, LevyMeasure(comps))
    return ProjectionResult(V, pt, a.copy(), dropped)


# ---------------------------------------------------------------- restriction


@dataclass(frozen=True)
class InsideRadius:
    r: float


@dataclass(frozen=True)
class OutsideRadius:
    r: float


@dataclass(frozen=True, eq=False)
class OffRangeOf:
    """Points ``x`` with ``P2 x != 0``."""

    P2: np.ndarray


def restrict_measure(mu: LevyMeasure, region) -> LevyMeasure:
    """Restriction of ``mu`` to ``{|x| < r}``, ``{|x| >= r}`` or off the range of ``P2``."""
    out = []
    if isinstance(region, (InsideRadius, OutsideRadius)):
        r = region.r
        if r <= 0:
            raise ValueError("radius must be positive")
        inside = isinstance(region, InsideRadius)
        lo, hi = (0.0, r) if inside else (r, math.inf)
        for c in mu:
            if isinstance(c, Atoms):
                n = c.norms()
                keep = (n < r) if inside else (n >= r)
                if keep.any():
                    out.append(Atoms(c.locations[keep], c.weights[keep]))
            elif isinstance(c, LineDensity):
                pos, neg = c.positive.windowed(lo, hi), c.negative.windowed(lo, hi)
                if pos.terms or neg.terms:
                    out.append(LineDensity(c.direction, pos, neg))
            else:
                a, b = max(c.rmin, lo), min(c.rmax, hi)
                if a < b:
                    out.append(IsotropicStable(c.alpha, c.intensity, c.dim, c.basis, a, b))
        return LevyMeasure(out)
    if isinstance(region, OffRangeOf):
        P2 = np.asarray(region.P2, dtype=float)
        for c in mu:
            if isinstance(c, Atoms):
                if not c.weights.size:
                    continue
                off = np.linalg.norm(c.locations @ P2.T, axis=1) > DIRECTION_TOL * np.maximum(1.0, c.norms())
                if off.any():
                    out.append(Atoms(c.locations[off], c.weights[off]))
            elif isinstance(c, LineDensity):
                # a line meets a subspace only at 0 unless it lies inside it
                if np.linalg.norm(P2 @ c.direction) > DIRECTION_TOL:
                    out.append(c)
            else:
                # a proper subspace of the support is Lebesgue-null there
                if np.abs(P2 @ c.basis_matrix()).max() > DIRECTION_TOL:
                    out.append(c)
        return LevyMeasure(out)
    raise TypeError(f"unsupported region {region!r}")


# ----------------------------------------------------------------- truncation


def _subtract_atoms(base: Atoms, sub: Atoms, tol=1e-12):
    w = base.weights.copy()
    for x, v in zip(sub.locations, sub.weights):
        if v <= 0:
            raise ValueError("truncated atoms must have positive weight")
        hit = np.flatnonzero(np.linalg.norm(base.locations - x, axis=1) <= tol * max(1.0, np.linalg.norm(x)))
        remaining = v
        for j in hit:
            take = min(w[j], remaining)
            w[j] -= take
            remaining -= take
        if remaining > tol * max(1.0, v):
            raise ValueError(f"mu1 is not dominated by mu: atom at {x.tolist()} exceeds available weight")
    keep = w > tol * max(1.0, base.weights.max(initial=0.0))
    return Atoms(base.locations[keep], w[keep])


def _density_dominated(big: RadialDensity, small: RadialDensity) -> bool:
    grid = np.unique(np.concatenate([big.probe_grid(), small.probe_grid()]))
    diff = big(grid) - small(grid)
    return bool(np.all(diff >= -1e-12 * np.maximum(1.0, np.abs(big(grid)))))


def _stable_window_complement(c: IsotropicStable, lo: float, hi: float) -> list:
    pieces = []
    if c.rmin < lo:
        pieces.append(IsotropicStable(c.alpha, c.intensity, c.dim, c.basis, c.rmin, lo))
    if hi < c.rmax:
        pieces.append(IsotropicStable(c.alpha, c.intensity, c.dim, c.basis, hi, c.rmax))
    return pieces


def truncate_big_jumps(t: LevyTriplet, mu1: LevyMeasure) -> LevyTriplet:
    """Remove a finite sub-measure ``mu1`` of ``t.mu`` and fold its compensator into ``a``.

    Returns ``(a + int_{|x|<1} x mu1(dx), Q, mu - mu1)``.  Line densities in
    ``mu1`` must share a direction with a line of ``mu`` and be pointwise
    dominated by it; stable parts must be windows of a stable part of ``mu``.
    """
    if not isinstance(mu1, LevyMeasure):
        mu1 = LevyMeasure(mu1)
    mass = mu1.total_mass()
    if not math.isfinite(mass):
        raise ValueError("mu1 must have finite total mass")
    comps = list(t.mu)
    sub_atoms = mu1.merged_atoms(t.dim)
    if sub_atoms.weights.size:
        base = t.mu.merged_atoms(t.dim)
        if not base.weights.size:
            raise ValueError("mu1 is not dominated by mu: mu has no atoms")
        rest = _subtract_atoms(base, sub_atoms)
        comps = [c for c in comps if not isinstance(c, Atoms)]
        if rest.weights.size:
            comps.insert(0, rest)
    for c in mu1:
        if isinstance(c, Atoms):
            continue
        for j, d in enumerate(comps):
            if isinstance(c, LineDensity) and isinstance(d, LineDensity):
                if np.allclose(c.direction, d.direction, atol=1e-12):
                    pos, neg = c.positive, c.negative
                elif np.allclose(c.direction, -d.direction, atol=1e-12):
                    pos, neg = c.negative, c.positive
                else:
                    continue
                if _density_dominated(d.positive, pos) and _density_dominated(d.negative, neg):
                    comps[j] = LineDensity(d.direction, d.positive + (-pos), d.negative + (-neg))
                    break
            elif isinstance(c, IsotropicStable) and isinstance(d, IsotropicStable):
                B1, B2 = c.basis_matrix(), d.basis_matrix()
                same = (
                    c.alpha == d.alpha
                    and B1.shape == B2.shape
                    and np.allclose(B1 @ B1.T, B2 @ B2.T, atol=1e-12)
                    and abs(c.intensity - d.intensity) <= 1e-12 * d.intensity
                    and d.rmin <= c.rmin
                    and c.rmax <= d.rmax
                )
                if same:
                    comps[j : j + 1] = _stable_window_complement(d, c.rmin, c.rmax)
                    break
        else:
            raise ValueError(f"mu1 is not dominated by mu: no matching component for {c.kind}")
    a = t.a + mu1.small_jump_mean(t.dim)
    return LevyTriplet(a, t.Q.copy(), LevyMeasure(comps))
