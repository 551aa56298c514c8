"""
Energy functionals for atomic test measures.

For ``nu = sum_i w_i delta_{x_i}`` the squared modulus of the Fourier
transform is the trigonometric polynomial
``|nu_hat(z)|^2 = sum_{i,j} w_i w_j cos<z, x_i - x_j>``, so every energy
integral is a finite sum of radial integrals

``int_0^inf h(r theta) r^(n-1) cos(r <theta, Delta>) dr``

over an angular rule on the unit sphere (a single pair of directions in
1-D).  The frequency-zero part decides convergence; when it converges the
oscillating parts converge absolutely and are done with Fourier-weighted
QUADPACK rules.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .diagnostics import EXACT, FAILS, HOLDS, NUMERIC, CheckResult
from .exponent import psi_values
from .measure import Atoms
from .quadrature import DivergentIntegralError, QuadratureError, integrate_halfline, quad, quad_split
from .triplet import LevyTriplet

__all__ = [
    "MAX_ENERGY_DIM",
    "QuadSpec",
    "EnergyReport",
    "ClogResult",
    "angular_rule",
    "lambda_energy",
    "one_energy",
    "energy_limit",
    "clog_partial_sum",
    "product_bound_check",
]

MAX_ENERGY_DIM = 3


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature settings.

    ``n_angles`` is the number of angles in 2-D and the number of azimuths
    in 3-D (with ``n_angles // 2`` Gauss-Legendre polar nodes).
    """

    rmax: float = 1e8
    margin: float = 0.1
    epsrel: float = 1e-11
    n_angles: int = 64


def angular_rule(dim: int, n: int = 64):
    """Nodes and weights on the unit sphere; the weights sum to its area."""
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if dim == 2:
        th = 2.0 * math.pi * (np.arange(n) + 0.5) / n
        return np.column_stack([np.cos(th), np.sin(th)]), np.full(n, 2.0 * math.pi / n)
    if dim == 3:
        u, wu = np.polynomial.legendre.leggauss(max(n // 2, 2))
        ph = 2.0 * math.pi * (np.arange(n) + 0.5) / n
        s = np.sqrt(1.0 - u * u)
        dirs = np.stack(
            [np.outer(s, np.cos(ph)), np.outer(s, np.sin(ph)), np.outer(u, np.ones(n))], axis=-1
        ).reshape(-1, 3)
        return dirs, np.outer(wu, np.full(n, 2.0 * math.pi / n)).ravel()
    raise ValueError(f"energy quadrature supports dim <= {MAX_ENERGY_DIM}, got {dim}")


def _differences(nu: Atoms):
    """Pairwise differences ``x_i - x_j`` with products ``w_i w_j``."""
    x, w = nu.locations, nu.weights
    d = (x[:, None, :] - x[None, :, :]).reshape(-1, x.shape[1])
    c = np.outer(w, w).ravel()
    return d, c


def _frequencies(theta, d, c):
    """Merge ``cos(r <theta, Delta>)`` terms by absolute frequency."""
    om = np.abs(d @ theta)
    key = np.round(om, 12)
    out = {}
    for k, o, cc in zip(key, om, c):
        if k in out:
            out[k][1] += cc
        else:
            out[k] = [o, cc]
    return sorted((o, cc) for o, cc in out.values() if cc != 0.0)


def _check(t: LevyTriplet, nu: Atoms):
    if t.dim > MAX_ENERGY_DIM:
        raise ValueError(f"energy quadrature supports dim <= {MAX_ENERGY_DIM}, got {t.dim}")
    if nu.weights.size and nu.dim != t.dim:
        raise ValueError(f"measure has dim {nu.dim}, triplet has dim {t.dim}")
    if np.any(nu.weights < 0):
        raise ValueError("test measure must be nonnegative")


def _cos_integral(f, om: float, edges, goal: float) -> float:
    """``int f(r) cos(om r) dr`` over consecutive ``edges``."""
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        v, err = quad_split(f, lo, hi, goal, epsabs=1e-14, weight="cos", wvar=om)
        if not math.isfinite(v) or err > goal:
            raise QuadratureError(f"quadrature on [{lo}, {hi}] did not converge", v, err)
        total += v
    return total


def _energy(t: LevyTriplet, nu: Atoms, h, qs: QuadSpec) -> float:
    """``int h(z) |nu_hat(z)|^2 dz`` for a scalar kernel ``h``; raises on divergence."""
    _check(t, nu)
    if not nu.weights.size or not np.any(nu.weights):
        return 0.0
    n = t.dim
    dirs, wts = angular_rule(n, qs.n_angles)
    d, c = _differences(nu)
    total = 0.0
    partial = 0.0
    for theta, wt in zip(dirs, wts):
        f = lambda r, th=theta: h(r * th) * r ** (n - 1) if r > 0 else (h(0.0 * th) if n == 1 else 0.0)
        freqs = _frequencies(theta, d, c)
        # the diagonal terms put frequency 0 first with a positive coefficient
        res = integrate_halfline(f, rmax=qs.rmax, margin=qs.margin, epsrel=qs.epsrel, nonnegative=True)
        if res.status != "converges":
            partial += wt * freqs[0][1] * res.partial
            err = DivergentIntegralError if res.status == "diverges" else QuadratureError
            raise err(f"energy integral {res.status} (tail exponent {res.exponent:.3g})", partial)
        # oscillating terms stop where the frequency-0 integral did; |f| bounds
        # their remainder by its (negligible) tail
        edges = [0.0] + [hi for _, hi, _ in res.decades]
        goal = 1e-10 * (1.0 + abs(res.value))
        for om, cc in freqs:
            v = res.value if om == 0.0 else _cos_integral(f, om, edges, goal)
            total += wt * cc * v
            partial += wt * cc * v
    return max(total, 0.0)


def _re_resolvent(t: LevyTriplet, lam: complex):
    def h(z):
        p = complex(psi_values(t, np.atleast_1d(z)))
        return (1.0 / (lam + p)).real

    return h


def lambda_energy(t: LevyTriplet, nu: Atoms, lam: float, qs: QuadSpec = QuadSpec()) -> float:
    """``E^lam(nu) = int Re(1/(lam + psi(z))) |nu_hat(z)|^2 dz``.

    Raises
    ------
    DivergentIntegralError
        If the tail is classified divergent; ``partial`` carries the value so far.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return _energy(t, nu, _re_resolvent(t, lam), qs)


def one_energy(t: LevyTriplet, nu: Atoms, qs: QuadSpec = QuadSpec()) -> float:
    """``int (A/B^2) |nu_hat|^2 dz`` with ``A = 1 + Re psi``, ``B = |1 + psi|``.

    Returns ``inf`` when the integral is classified divergent and ``nan`` when
    the tail is inconclusive.
    """

    def h(z):
        p = complex(psi_values(t, np.atleast_1d(z)))
        A = 1.0 + max(p.real, 0.0)
        if not math.isfinite(A):
            return 0.0
        # A |1/(1+psi)|^2 avoids squaring a huge |1 + psi|
        return A * min(abs(1.0 / (1.0 + p)) ** 2, 1.0 / (A * A))

    try:
        return _energy(t, nu, h, qs)
    except DivergentIntegralError:
        return math.inf
    except QuadratureError:
        return math.nan


@dataclass
class EnergyReport:
    lambda_ladder: list
    values: list
    one_energy: float
    limit_estimate: float
    trend: str
    slope: float
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "lambdaLadder": self.lambda_ladder,
            "values": self.values,
            "oneEnergy": self.one_energy,
            "limitEstimate": {"value": self.limit_estimate, "trend": self.trend, "slope": self.slope},
            "notes": self.notes,
        }

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "energy"])
        for lam, v in zip(self.lambda_ladder, self.values):
            w.writerow([format(lam, ".17g"), format(v, ".17g")])


def _ladder_point(args):
    t, nu, lam, qs = args
    try:
        return lambda_energy(t, nu, lam, qs), ""
    except QuadratureError as e:
        return math.nan, f"lambda={lam:g}: {e}"


def classify_limit(ladder, values, floor: float = 1e-10):
    """Fit ``log E`` against ``log lambda`` over the top half of the ladder."""
    lam = np.asarray(ladder, dtype=float)
    v = np.asarray(values, dtype=float)
    top = slice(len(lam) // 2, None)
    if len(lam) < 2 or not np.all(np.isfinite(v[top])):
        return "inconclusive", math.nan, math.nan
    if np.all(v[top] == 0.0):
        return "toZero", -math.inf, 0.0
    if np.any(v[top] <= 0.0):
        return "inconclusive", math.nan, math.nan
    slope = float(np.polyfit(np.log(lam[top]), np.log(v[top]), 1)[0])
    if slope < -0.1:
        return "toZero", slope, 0.0
    if abs(slope) < 0.02 and v[-1] > floor:
        return "positive", slope, float(v[-1])
    return "inconclusive", slope, math.nan


def energy_limit(
    t: LevyTriplet,
    nu: Atoms,
    ladder=None,
    qs: QuadSpec = QuadSpec(),
    workers: int = 1,
) -> EnergyReport:
    """``E^lam(nu)`` on a geometric ladder and the trend as ``lam -> inf``.

    Parameters
    ----------
    ladder : sequence of float, optional
        Increasing positive values; default ``4**k`` for ``k = 0..8``.
    workers : int
        Process pool size for the ladder points; results are merged in
        ladder order so the report does not depend on it.

    Raises
    ------
    DivergentIntegralError
        If ``nu`` does not have finite 1-energy.
    """
    ladder = [4.0**k for k in range(9)] if ladder is None else [float(x) for x in ladder]
    if any(x <= 0 for x in ladder) or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be increasing and positive")
    one = one_energy(t, nu, qs)
    if math.isinf(one):
        raise DivergentIntegralError("test measure has infinite 1-energy", one)
    jobs = [(t, nu, lam, qs) for lam in ladder]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_ladder_point, jobs))
    else:
        results = [_ladder_point(j) for j in jobs]
    values = [v for v, _ in results]
    notes = [m for _, m in results if m]
    if math.isnan(one):
        notes.append("1-energy tail inconclusive")
    trend, slope, limit = classify_limit(ladder, values)
    return EnergyReport(ladder, values, one, limit, trend, slope, notes)


@dataclass
class ClogResult:
    total: float
    terms: list
    levels: list

    def to_dict(self) -> dict:
        return {"total": self.total, "terms": self.terms, "levels": self.levels}


def _level_crossings(g, r, level):
    """Roots of ``g(r) = level`` bracketed on the grid ``r``."""
    vals = np.array([g(x) for x in r]) - level
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]:
        roots.append(optimize.brentq(lambda x: g(x) - level, r[i], r[i + 1], xtol=1e-14, rtol=1e-13))
    return roots, vals


def clog_partial_sum(
    t: LevyTriplet,
    nu: Atoms,
    varsigma: float,
    y_seq,
    K: int | None = None,
    qs: QuadSpec = QuadSpec(),
    rmax: float = 1e8,
) -> ClogResult:
    """``sum_k int_{y_k <= B(z) < y_k^varsigma} |nu_hat|^2 / (B log B) dz`` for ``k <= K``.

    Each annulus is located radially by bracketing ``B`` on a log grid and
    refining the crossings; an annulus that reaches ``rmax`` is integrated up
    to ``rmax`` and flagged by a ``nan`` term only if it does not close.
    """
    _check(t, nu)
    if varsigma <= 1:
        raise ValueError("varsigma must exceed 1")
    ys = [float(y) for y in y_seq]
    if K is not None:
        ys = ys[:K]
    if not ys or ys[0] <= 1 or any(b <= a for a, b in zip(ys, ys[1:])):
        raise ValueError("y_seq must be increasing and start above 1")
    terms = [0.0] * len(ys)
    if not nu.weights.size or not np.any(nu.weights):
        return ClogResult(0.0, terms, ys)
    n = t.dim
    dirs, wts = angular_rule(n, qs.n_angles)
    d, c = _differences(nu)
    grid = np.concatenate([[0.0], np.logspace(-6, math.log10(rmax), 30 * (6 + int(math.log10(rmax))) + 1)])
    for theta, wt in zip(dirs, wts):
        B = lambda r, th=theta: abs(1.0 + complex(psi_values(t, r * th)))
        P = lambda r: sum(cc * math.cos(om * r) for om, cc in _frequencies(theta, d, c))
        f = lambda r: P(r) * r ** (n - 1) / (B(r) * math.log(B(r)))
        for k, y in enumerate(ys):
            lo_roots, lo_vals = _level_crossings(B, grid, y)
            hi_roots, hi_vals = _level_crossings(B, grid, y**varsigma)
            if lo_vals[-1] >= 0 and hi_vals[-1] < 0:
                # annulus still open at rmax
                terms[k] = math.nan
                continue
            cuts = sorted(set([0.0] + lo_roots + hi_roots + [grid[-1]]))
            val = 0.0
            try:
                for u, v in zip(cuts, cuts[1:]):
                    m = 0.5 * (u + v)
                    if y <= B(m) < y**varsigma:
                        val += quad(f, u, v, epsabs=1e-13, epsrel=1e-10, limit=500)
            except QuadratureError:
                val = math.nan
            terms[k] += wt * val
    return ClogResult(float(sum(terms)), terms, ys)


def _as_complex(x) -> np.ndarray:
    if isinstance(x, (list, tuple)) and x and hasattr(x[0], "re"):
        return np.array([complex(v.re, v.im) for v in x])
    return np.asarray(x, dtype=complex)


def product_bound_check(phi, psi, lam: float, symmetric: bool = False, tol: float = 1e-12) -> CheckResult:
    """Pointwise ``Re 1/(lam + Phi + Psi) >= Re(1/(lam + Phi)) / (2 (1 + |Psi|^2 / lam^2))``.

    ``phi`` and ``psi`` are paired exponent samples.  With ``symmetric`` the
    roles of ``Phi`` and ``Psi`` are also swapped and checked.
    """
    if not lam > 1:
        raise ValueError("lambda must exceed 1")
    P, S = _as_complex(phi), _as_complex(psi)
    if P.shape != S.shape:
        raise ValueError("phi and psi samples must pair up")
    lhs = (1.0 / (lam + P + S)).real
    rhs = (1.0 / (lam + P)).real / (2.0 * (1.0 + np.abs(S) ** 2 / lam**2))
    viol = rhs - lhs
    if symmetric:
        rhs2 = (1.0 / (lam + S)).real / (2.0 * (1.0 + np.abs(P) ** 2 / lam**2))
        viol = np.maximum(viol, rhs2 - lhs)
    worst = float(max(viol.max(initial=0.0), 0.0))
    count = int((viol > tol).sum())
    ev = {"max_violation": worst, "violations": count, "samples": int(P.size), "lambda": lam}
    return CheckResult(HOLDS if count == 0 else FAILS, NUMERIC if P.size else EXACT, ev)
