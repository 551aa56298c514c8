"""
Composite Lévy measures.

A :class:`LevyMeasure` is a list of components, each of one of three kinds:

* :class:`Atoms` -- finitely many weighted point masses away from the origin;
* :class:`LineDensity` -- mass carried by a line through the origin, given by a
  radial density on each of the two rays;
* :class:`IsotropicStable` -- ``c |x|^(-k-alpha) dx`` on a k-dimensional
  subspace (the full space by default), optionally windowed to an annulus.

Radial densities are sums of :class:`PowerTerm` pieces
``coef * r^(-1-alpha) * exp(-damping * r)`` on ``[lo, hi)``, which keeps every
moment near the origin in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import integrate, special

__all__ = [
    "PowerTerm",
    "RadialDensity",
    "Atoms",
    "LineDensity",
    "IsotropicStable",
    "LevyMeasure",
    "sphere_area",
    "stable_radial_constant",
    "stable_marginal_constant",
]

ORIGIN_TOL = 1e-12


def _power_moment(coef, p, u, v):
    """``coef * int_u^v r^p dr`` with infinite endpoints allowed."""
    if v <= u:
        return 0.0
    if p == -1.0:
        if u == 0.0 or math.isinf(v):
            return math.copysign(math.inf, coef) if coef else 0.0
        return coef * math.log(v / u)
    q = p + 1.0
    if u == 0.0 and q < 0:
        return math.copysign(math.inf, coef) if coef else 0.0
    if math.isinf(v) and q > 0:
        return math.copysign(math.inf, coef) if coef else 0.0
    hi = 0.0 if math.isinf(v) else v**q
    lo = 0.0 if u == 0.0 else u**q
    return coef * (hi - lo) / q


@dataclass(frozen=True)
class PowerTerm:
    """``coef * r^(-1-alpha) * exp(-damping*r)`` on ``[lo, hi)``.

    ``coef`` may be negative (differences of densities), as long as the total
    density stays nonnegative.
    """

    coef: float
    alpha: float
    lo: float = 0.0
    hi: float = math.inf
    damping: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise ValueError(f"need 0 <= lo < hi, got lo={self.lo}, hi={self.hi}")
        if self.damping < 0:
            raise ValueError("damping must be >= 0")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        m = (r >= self.lo) & (r < self.hi) & (r > 0)
        rm = r[m]
        out[m] = self.coef * rm ** (-1.0 - self.alpha) * np.exp(-self.damping * rm)
        return out

    def scalar(self, r: float) -> float:
        if r < self.lo or r >= self.hi or r <= 0.0:
            return 0.0
        val = self.coef * r ** (-1.0 - self.alpha)
        if self.damping:
            val *= math.exp(-self.damping * r)
        return val

    def moment(self, k: int, u: float = 0.0, v: float = math.inf) -> float:
        """``int_u^v r^k * term(r) dr`` in closed form where possible."""
        u = max(u, self.lo)
        v = min(v, self.hi)
        if v <= u or self.coef == 0.0:
            return 0.0
        p = k - 1.0 - self.alpha
        lam = self.damping
        if lam == 0.0:
            return _power_moment(self.coef, p, u, v)
        if p > -1.0:
            a = p + 1.0
            scale = math.exp(special.gammaln(a)) / lam**a
            if u * lam > a:
                lower = special.gammaincc(a, lam * u)
                upper = 0.0 if math.isinf(v) else special.gammaincc(a, lam * v)
                return self.coef * scale * (lower - upper)
            upper = 1.0 if math.isinf(v) else special.gammainc(a, lam * v)
            return self.coef * scale * (upper - special.gammainc(a, lam * u))
        if u == 0.0:
            return math.copysign(math.inf, self.coef)
        # exp(-lam r) underflows past u + 745/lam
        v = min(v, u + 745.0 / lam)
        val, _ = integrate.quad(lambda r: r**p * math.exp(-lam * r), u, v, limit=200, epsabs=0.0, epsrel=1e-13)
        return self.coef * val

    def scaled(self, k: float) -> "PowerTerm":
        """Density of ``k*R`` when ``R`` has this density (``k > 0``)."""
        return PowerTerm(
            coef=self.coef * k**self.alpha,
            alpha=self.alpha,
            lo=self.lo * k,
            hi=self.hi * k,
            damping=self.damping / k,
        )

    def to_dict(self) -> dict:
        return {
            "coef": self.coef,
            "alpha": self.alpha,
            "lo": self.lo,
            "hi": None if math.isinf(self.hi) else self.hi,
            "damping": self.damping,
        }


@dataclass(frozen=True)
class RadialDensity:
    """A density on ``(0, inf)`` built from :class:`PowerTerm` pieces."""

    terms: tuple = ()

    def __init__(self, terms: Iterable[PowerTerm] = ()):
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def stable(cls, coef: float, alpha: float, lo: float = 0.0, hi: float = math.inf) -> "RadialDensity":
        return cls([PowerTerm(coef, alpha, lo, hi)])

    @classmethod
    def from_table(cls, r, values, *, tail_alpha_zero=None, tail_alpha_inf=None) -> "RadialDensity":
        """Log-log interpolated density on tabulated nodes ``r`` (strictly increasing, > 0).

        Each cell ``[r_i, r_{i+1})`` is an exact power law.  Optional tails
        extend the first/last node with power laws of the given index.
        """
        r = np.asarray(r, dtype=float)
        v = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.size < 2 or np.any(np.diff(r) <= 0) or r[0] <= 0:
            raise ValueError("nodes must be increasing positive reals")
        if np.any(v <= 0):
            raise ValueError("tabulated values must be positive")
        terms = []
        for i in range(r.size - 1):
            slope = math.log(v[i + 1] / v[i]) / math.log(r[i + 1] / r[i])
            alpha = -1.0 - slope
            coef = v[i] * r[i] ** (1.0 + alpha)
            terms.append(PowerTerm(coef, alpha, r[i], r[i + 1]))
        if tail_alpha_zero is not None:
            a = tail_alpha_zero
            terms.insert(0, PowerTerm(v[0] * r[0] ** (1.0 + a), a, 0.0, r[0]))
        if tail_alpha_inf is not None:
            a = tail_alpha_inf
            terms.append(PowerTerm(v[-1] * r[-1] ** (1.0 + a), a, r[-1], math.inf))
        return cls(terms)

    @property
    def is_zero(self) -> bool:
        return all(t.coef == 0.0 for t in self.terms)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for t in self.terms:
            out = out + t(r)
        return out

    def scalar(self, r: float) -> float:
        return sum(t.scalar(r) for t in self.terms)

    def moment(self, k: int, u: float = 0.0, v: float = math.inf) -> float:
        return float(sum(t.moment(k, u, v) for t in self.terms))

    def breakpoints(self) -> list:
        pts = set()
        for t in self.terms:
            pts.add(t.lo)
            if not math.isinf(t.hi):
                pts.add(t.hi)
        return sorted(pts)

    def leading_behaviour(self):
        """Leading ``(alpha, coef)`` of the density as ``r -> 0``, or ``None`` if it vanishes near 0.

        Terms are grouped by index; the most singular index with a nonzero
        net coefficient wins.
        """
        near = {}
        for t in self.terms:
            if t.lo == 0.0:
                near[t.alpha] = near.get(t.alpha, 0.0) + t.coef
        for alpha in sorted(near, reverse=True):
            if abs(near[alpha]) > 1e-14 * max(1.0, max(abs(c) for c in near.values())):
                return alpha, near[alpha]
        return None

    def scaled(self, k: float) -> "RadialDensity":
        return RadialDensity(t.scaled(k) for t in self.terms)

    def windowed(self, lo: float, hi: float) -> "RadialDensity":
        out = []
        for t in self.terms:
            a, b = max(t.lo, lo), min(t.hi, hi)
            if a < b:
                out.append(replace(t, lo=a, hi=b))
        return RadialDensity(out)

    def __add__(self, other: "RadialDensity") -> "RadialDensity":
        return RadialDensity(self.terms + other.terms)

    def __neg__(self) -> "RadialDensity":
        return RadialDensity(replace(t, coef=-t.coef) for t in self.terms)

    def probe_grid(self, rmin: float = 1e-12, rmax: float = 1e6, per_decade: int = 20) -> np.ndarray:
        n = int(per_decade * math.log10(rmax / rmin)) + 1
        grid = np.logspace(math.log10(rmin), math.log10(rmax), n)
        extra = [b for b in self.breakpoints() if b > 0]
        extra += [b * (1 - 1e-9) for b in extra]
        return np.unique(np.concatenate([grid, extra]))

    def min_value(self) -> float:
        """Smallest sampled value; negative means the term sum dips below zero."""
        if not self.terms:
            return 0.0
        return float(np.min(self(self.probe_grid())))

    def to_list(self) -> list:
        return [t.to_dict() for t in self.terms]


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere in R^k (``2`` for k = 1)."""
    return 2.0 * math.pi ** (k / 2.0) / math.gamma(k / 2.0)


def _one_dim_stable_integral(alpha: float) -> float:
    # int_0^inf (1 - cos r) r^(-1-alpha) dr
    if abs(alpha - 1.0) < 1e-14:
        return math.pi / 2.0
    return math.gamma(1.0 - alpha) * math.cos(math.pi * alpha / 2.0) / alpha


def stable_marginal_constant(alpha: float, k_from: int, k_to: int) -> float:
    """``int_{R^(k_from-k_to)} (1+|u|^2)^(-(k_from+alpha)/2) du``.

    The marginal of ``c|x|^(-k_from-alpha)dx`` on a ``k_to``-dimensional
    coordinate subspace is ``c * K |y|^(-k_to-alpha) dy`` with this ``K``.
    """
    m = k_from - k_to
    if m == 0:
        return 1.0
    return math.pi ** (m / 2.0) * math.exp(
        special.gammaln((k_to + alpha) / 2.0) - special.gammaln((k_from + alpha) / 2.0)
    )


def stable_radial_constant(alpha: float, k: int) -> float:
    """``C`` with ``int_{R^k} (1 - cos<w,x>) |x|^(-k-alpha) dx = C |w|^alpha``."""
    return 2.0 * stable_marginal_constant(alpha, k, 1) * _one_dim_stable_integral(alpha)


@dataclass(frozen=True, eq=False)
class Atoms:
    """Finitely many point masses ``sum_i w_i delta_{x_i}``."""

    locations: np.ndarray
    weights: np.ndarray
    kind = "atoms"

    def __init__(self, locations, weights):
        loc = np.atleast_2d(np.asarray(locations, dtype=float))
        w = np.atleast_1d(np.asarray(weights, dtype=float))
        if loc.size == 0:
            loc = loc.reshape(0, loc.shape[-1] if loc.ndim == 2 else 0)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.locations.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.locations, axis=1)

    def to_dict(self) -> dict:
        return {"kind": "atoms", "locations": self.locations.tolist(), "weights": self.weights.tolist()}


@dataclass(frozen=True, eq=False)
class LineDensity:
    """Mass on the line ``R * direction``: ``positive`` on the ray ``r*d``, ``negative`` on ``-r*d``."""

    direction: np.ndarray
    positive: RadialDensity
    negative: RadialDensity
    kind = "lineDensity"

    def __init__(self, direction, positive=None, negative=None):
        d = np.asarray(direction, dtype=float).ravel()
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "positive", positive if positive is not None else RadialDensity())
        object.__setattr__(self, "negative", negative if negative is not None else RadialDensity())

    @property
    def dim(self) -> int:
        return self.direction.size

    def moment(self, k: int, u: float = 0.0, v: float = math.inf, *, signed: bool = False) -> float:
        """Radial moment over both rays; ``signed`` weights the negative ray by ``(-1)^k``-style sign -1."""
        pos = self.positive.moment(k, u, v)
        neg = self.negative.moment(k, u, v)
        return pos - neg if signed else pos + neg

    def levy_integral(self) -> float:
        """``int (1 ^ r^2)`` over both rays."""
        return self.moment(2, 0.0, 1.0) + self.moment(0, 1.0, math.inf)

    def to_dict(self) -> dict:
        return {
            "kind": "lineDensity",
            "direction": self.direction.tolist(),
            "positive": self.positive.to_list(),
            "negative": self.negative.to_list(),
        }


@dataclass(frozen=True, eq=False)
class IsotropicStable:
    """``intensity * |y|^(-k-alpha) dy`` on ``span(basis)`` restricted to ``rmin <= |y| < rmax``.

    ``basis`` is a ``dim x k`` matrix with orthonormal columns; ``None`` means
    the whole space.
    """

    alpha: float
    intensity: float
    dim_: int
    basis: np.ndarray | None = None
    rmin: float = 0.0
    rmax: float = math.inf
    kind = "isotropicStable"

    def __init__(self, alpha, intensity, dim, basis=None, rmin=0.0, rmax=math.inf):
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "intensity", float(intensity))
        object.__setattr__(self, "dim_", int(dim))
        if basis is not None:
            basis = np.asarray(basis, dtype=float)
            if basis.ndim == 1:
                basis = basis.reshape(-1, 1)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "rmin", float(rmin))
        object.__setattr__(self, "rmax", float(rmax))

    @property
    def dim(self) -> int:
        return self.dim_

    @property
    def support_dim(self) -> int:
        return self.dim_ if self.basis is None else self.basis.shape[1]

    @property
    def full_window(self) -> bool:
        return self.rmin == 0.0 and math.isinf(self.rmax)

    def basis_matrix(self) -> np.ndarray:
        return np.eye(self.dim_) if self.basis is None else self.basis

    def radial_moment(self, k: int, u: float = 0.0, v: float = math.inf) -> float:
        """``int_{u <= |y| < v} |y|^k mu(dy)``."""
        u, v = max(u, self.rmin), min(v, self.rmax)
        if v <= u:
            return 0.0
        area = sphere_area(self.support_dim)
        return _power_moment(self.intensity * area, k - 1.0 - self.alpha, u, v)

    def second_moment_matrix(self, radius: float) -> np.ndarray:
        """``int_{|y|<radius} y y^T mu(dy)`` as a ``dim x dim`` matrix."""
        k = self.support_dim
        scal = self.radial_moment(2, 0.0, radius) / k
        B = self.basis_matrix()
        return scal * (B @ B.T)

    def levy_integral(self) -> float:
        return self.radial_moment(2, 0.0, 1.0) + self.radial_moment(0, 1.0, math.inf)

    def to_dict(self) -> dict:
        out = {"kind": "isotropicStable", "alpha": self.alpha, "intensity": self.intensity}
        if self.basis is not None:
            out["basis"] = self.basis.T.tolist()
        if self.rmin != 0.0:
            out["rmin"] = self.rmin
        if not math.isinf(self.rmax):
            out["rmax"] = self.rmax
        return out


Component = Union[Atoms, LineDensity, IsotropicStable]


@dataclass(frozen=True, eq=False)
class LevyMeasure:
    """A finite list of measure components on ``R^dim \\ {0}``."""

    components: tuple = field(default_factory=tuple)

    def __init__(self, components: Sequence[Component] = ()):
        object.__setattr__(self, "components", tuple(components))

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __add__(self, other: "LevyMeasure") -> "LevyMeasure":
        return LevyMeasure(self.components + other.components)

    def atoms(self) -> list:
        return [c for c in self.components if isinstance(c, Atoms)]

    def lines(self) -> list:
        return [c for c in self.components if isinstance(c, LineDensity)]

    def stables(self) -> list:
        return [c for c in self.components if isinstance(c, IsotropicStable)]

    @property
    def is_atomic(self) -> bool:
        return all(isinstance(c, Atoms) for c in self.components)

    @property
    def is_empty(self) -> bool:
        for c in self.components:
            if isinstance(c, Atoms) and c.weights.size:
                return False
            if isinstance(c, LineDensity) and not (c.positive.is_zero and c.negative.is_zero):
                return False
            if isinstance(c, IsotropicStable):
                return False
        return True

    def merged_atoms(self, dim: int) -> Atoms:
        """All atomic components as a single :class:`Atoms`."""
        locs = [c.locations for c in self.atoms() if c.weights.size]
        ws = [c.weights for c in self.atoms() if c.weights.size]
        if not locs:
            return Atoms(np.zeros((0, dim)), np.zeros(0))
        return Atoms(np.vstack(locs), np.concatenate(ws))

    def total_mass(self) -> float:
        total = 0.0
        for c in self.components:
            if isinstance(c, Atoms):
                total += c.total_mass
            elif isinstance(c, LineDensity):
                total += c.moment(0)
            else:
                total += c.radial_moment(0)
        return total

    def small_jump_mean(self, dim: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        """``int_{lo <= |x| < hi} x mu(dx)``; infinite entries where it diverges."""
        out = np.zeros(dim)
        for c in self.components:
            if isinstance(c, Atoms):
                n = c.norms()
                m = (n >= lo) & (n < hi)
                out += (c.weights[m, None] * c.locations[m]).sum(axis=0)
            elif isinstance(c, LineDensity):
                m1 = c.moment(1, lo, hi, signed=True)
                if math.isinf(m1) or math.isnan(m1):
                    return np.full(dim, math.inf)
                out += m1 * c.direction
            else:
                # symmetric; absolute integrability still required
                if math.isinf(c.radial_moment(1, lo, hi)):
                    return np.full(dim, math.inf)
        return out

    def variation_integral(self) -> float:
        """``int (1 ^ |x|) mu(dx)``."""
        total = 0.0
        for c in self.components:
            if isinstance(c, Atoms):
                total += float((c.weights * np.minimum(1.0, c.norms())).sum())
            elif isinstance(c, LineDensity):
                total += c.moment(1, 0.0, 1.0) + c.moment(0, 1.0, math.inf)
            else:
                total += c.radial_moment(1, 0.0, 1.0) + c.radial_moment(0, 1.0, math.inf)
        return total

    def to_list(self) -> list:
        return [c.to_dict() for c in self.components]
