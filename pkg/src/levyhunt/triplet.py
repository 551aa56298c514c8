"""Lévy triplets, process specifications and their validation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .measure import Atoms, IsotropicStable, LevyMeasure, LineDensity

__all__ = [
    "LevyTriplet",
    "ProcessSpec",
    "ASSERTION_FLAGS",
    "Check",
    "ValidationReport",
    "validate_triplet",
]

ASSERTION_FLAGS = (
    "hasResolventDensities",
    "hasBoundedContinuousTransitionDensities",
    "isSpecialSubordinator",
)

PSD_TOL = 1e-10
SYMMETRY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LevyTriplet:
    """Exponent data ``(a, Q, mu)``.

    ``psi(z) = i<a,z> + <z,Qz>/2 + int (1 - e^{i<z,x>} + i<z,x> 1{|x|<1}) mu(dx)``
    and ``E exp(i<z,X_t>) = exp(-t psi(z))``.  With this convention a pure
    drift ``X_t = b t`` has ``a = -b``; use :meth:`from_drift` to build a
    triplet from the physical velocity.

    The constructor normalises shapes but does not enforce invariants; call
    :func:`validate_triplet` for that.
    """

    a: np.ndarray
    Q: np.ndarray
    mu: LevyMeasure

    def __init__(self, a, Q=None, mu=None):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        n = a.size
        Q = np.zeros((n, n)) if Q is None else np.atleast_2d(np.asarray(Q, dtype=float))
        if mu is None:
            mu = LevyMeasure()
        elif not isinstance(mu, LevyMeasure):
            mu = LevyMeasure(mu)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "mu", mu)

    @property
    def dim(self) -> int:
        return self.a.size

    @classmethod
    def from_drift(cls, b, Q=None, mu=None) -> "LevyTriplet":
        """Triplet whose compensated-jump-free part moves with velocity ``b``."""
        return cls(-np.atleast_1d(np.asarray(b, dtype=float)), Q, mu)

    @classmethod
    def brownian(cls, dim: int = 1, scale: float = 1.0) -> "LevyTriplet":
        return cls(np.zeros(dim), scale * np.eye(dim))

    @classmethod
    def zero(cls, dim: int) -> "LevyTriplet":
        return cls(np.zeros(dim))

    def physical_drift(self) -> np.ndarray:
        """``-a - int_{|x|<1} x mu(dx)``; meaningful when the integral converges."""
        return -self.a - self.mu.small_jump_mean(self.dim)

    def equals(self, other: "LevyTriplet", tol: float = 0.0) -> bool:
        from .io import triplet_to_dict

        if self.dim != other.dim:
            return False
        if tol == 0.0:
            return triplet_to_dict(self) == triplet_to_dict(other)
        return (
            np.allclose(self.a, other.a, atol=tol, rtol=0)
            and np.allclose(self.Q, other.Q, atol=tol, rtol=0)
            and _measure_close(self.mu, other.mu, tol)
        )


def _measure_close(m1: LevyMeasure, m2: LevyMeasure, tol: float) -> bool:
    """Component-permutation-tolerant comparison; atoms are pooled."""
    dim = None
    for c in list(m1) + list(m2):
        dim = c.dim
        break
    if dim is None:
        return True
    a1, a2 = m1.merged_atoms(dim), m2.merged_atoms(dim)
    if a1.weights.size != a2.weights.size:
        return False
    if a1.weights.size:
        o1 = np.lexsort(np.round(a1.locations.T, 8))
        o2 = np.lexsort(np.round(a2.locations.T, 8))
        if not (
            np.allclose(a1.locations[o1], a2.locations[o2], atol=tol, rtol=0)
            and np.allclose(a1.weights[o1], a2.weights[o2], atol=tol, rtol=0)
        ):
            return False
    rest1 = [c for c in m1 if not isinstance(c, Atoms)]
    rest2 = [c for c in m2 if not isinstance(c, Atoms)]
    if len(rest1) != len(rest2):
        return False
    used = set()
    for c in rest1:
        for j, d in enumerate(rest2):
            if j not in used and _component_close(c, d, tol):
                used.add(j)
                break
        else:
            return False
    return True


def _component_close(c, d, tol) -> bool:
    if type(c) is not type(d):
        return False
    if isinstance(c, LineDensity):
        grid = np.logspace(-6, 3, 60)
        if np.allclose(c.direction, d.direction, atol=tol, rtol=0):
            p, q = (c.positive, c.negative), (d.positive, d.negative)
        elif np.allclose(c.direction, -d.direction, atol=tol, rtol=0):
            p, q = (c.positive, c.negative), (d.negative, d.positive)
        else:
            return False
        return all(np.allclose(x(grid), y(grid), rtol=max(tol, 1e-12), atol=0) for x, y in zip(p, q))
    B1, B2 = c.basis_matrix(), d.basis_matrix()
    return (
        abs(c.alpha - d.alpha) <= tol
        and abs(c.intensity - d.intensity) <= tol * max(1.0, abs(c.intensity))
        and np.allclose(B1 @ B1.T, B2 @ B2.T, atol=max(tol, 1e-12))
        and c.rmin == d.rmin
        and c.rmax == d.rmax
    )


@dataclass(frozen=True, eq=False)
class ProcessSpec:
    """A triplet plus user-asserted analytic properties (never inferred)."""

    triplet: LevyTriplet
    assertions: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.assertions) - set(ASSERTION_FLAGS)
        if unknown:
            raise ValueError(f"unknown assertion flags: {sorted(unknown)}")
        full = {k: bool(self.assertions.get(k, False)) for k in ASSERTION_FLAGS}
        object.__setattr__(self, "assertions", full)

    def flag(self, name: str) -> bool:
        return self.assertions[name]

    def with_assertions(self, **flags) -> "ProcessSpec":
        merged = dict(self.assertions)
        merged.update(flags)
        return ProcessSpec(self.triplet, merged)


@dataclass
class Check:
    name: str
    passed: bool
    measured: object = None
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"[{mark}] {c.name}: {c.measured!r} {c.detail}".rstrip())
        return "\n".join(lines)


def validate_triplet(t: LevyTriplet) -> ValidationReport:
    """Check every triplet invariant; problems are reported, never raised."""
    checks = []
    n = t.dim
    Q = t.Q
    shape_ok = Q.shape == (n, n)
    checks.append(Check("Q shape matches dim", shape_ok, Q.shape))
    comp_dims = [c.dim for c in t.mu]
    dims_ok = all(d == n for d in comp_dims)
    checks.append(Check("measure dims match", dims_ok, comp_dims))
    if shape_ok:
        scale = 1.0 + (np.abs(Q).max() if Q.size else 0.0)
        asym = float(np.abs(Q - Q.T).max()) if Q.size else 0.0
        sym_ok = asym <= SYMMETRY_TOL * scale
        checks.append(Check("Q symmetric", sym_ok, asym))
        lam_min = float(np.linalg.eigvalsh(0.5 * (Q + Q.T)).min()) if n else 0.0
        checks.append(Check("Q positive semidefinite", lam_min >= -PSD_TOL, lam_min))
    for i, c in enumerate(t.mu):
        checks.extend(_component_checks(i, c))
    return ValidationReport(checks)


def _component_checks(i: int, c) -> list:
    tag = f"mu[{i}] {c.kind}"
    out = []
    if isinstance(c, Atoms):
        w = c.weights
        out.append(Check(f"{tag} shapes", c.locations.shape[0] == w.size, (c.locations.shape, w.shape)))
        out.append(Check(f"{tag} weights > 0", bool(np.all(w > 0)), float(w.min()) if w.size else None))
        nmin = float(c.norms().min()) if w.size else None
        out.append(Check(f"{tag} no atom at origin", nmin is None or nmin > 0.0, nmin))
        return out
    if isinstance(c, LineDensity):
        norm = float(np.linalg.norm(c.direction))
        out.append(Check(f"{tag} unit direction", abs(norm - 1.0) <= 1e-10, norm))
        mins = min(c.positive.min_value(), c.negative.min_value())
        out.append(Check(f"{tag} density >= 0", mins >= -1e-12, mins))
        val = c.levy_integral()
        out.append(Check(f"{tag} int(1^r^2) finite", math.isfinite(val), val))
        return out
    ok_alpha = 0.0 < c.alpha < 2.0
    out.append(Check(f"{tag} 0 < alpha < 2", ok_alpha, c.alpha))
    out.append(Check(f"{tag} intensity > 0", c.intensity > 0, c.intensity))
    B = c.basis_matrix()
    orth = float(np.abs(B.T @ B - np.eye(B.shape[1])).max()) if B.size else 0.0
    out.append(Check(f"{tag} orthonormal basis", B.shape[0] == c.dim and orth <= 1e-10, orth))
    out.append(Check(f"{tag} window", 0.0 <= c.rmin < c.rmax, (c.rmin, c.rmax)))
    return out
