"""Thin layer over QUADPACK: error policy and half-line integration with tail classification."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

__all__ = [
    "QuadratureError",
    "DivergentIntegralError",
    "quad",
    "tail_exponent",
    "HalfLineIntegral",
    "integrate_halfline",
    "classify_exponent",
    "log_tail_exponent",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""

    def __init__(self, message, partial=math.nan, residual=math.nan):
        super().__init__(f"{message} (partial={partial!r}, residual={residual!r})")
        self.partial = partial
        self.residual = residual


class DivergentIntegralError(QuadratureError):
    """An improper integral was classified as divergent."""


def quad(f, a, b, *, epsabs=1e-12, epsrel=1e-12, limit=200, goal=None, **kw) -> float:
    """``scipy.integrate.quad`` that raises :class:`QuadratureError` past ``goal``.

    ``goal`` is the acceptable absolute error (default ``1e-8 * (1 + |value|)``);
    QUADPACK warnings below it are ignored.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, **kw)[:2]
    if goal is None:
        goal = 1e-8 * (1.0 + abs(val))
    # QUADPACK reports some failures as +-DBL_MAX
    if not abs(val) < 1e300 or err > goal:
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge", val, err)
    return val


def tail_exponent(f, lo: float, hi: float, n: int = 9) -> float:
    """Least-squares slope of ``log|f|`` against ``log z`` on ``[lo, hi]``.

    Returns ``-inf`` if ``f`` vanishes on the whole window.
    """
    z = np.logspace(math.log10(lo), math.log10(hi), n)
    vals = np.abs(np.array([f(x) for x in z], dtype=float))
    ok = vals > 0
    if not ok.any():
        return -math.inf
    if ok.sum() < 3:
        return math.nan
    slope = np.polyfit(np.log(z[ok]), np.log(vals[ok]), 1)[0]
    return float(slope)


def log_tail_exponent(f, lo: float, hi: float, n: int = 9) -> float:
    """Slope of ``log|r f(r)|`` against ``log log r`` on ``[lo, hi]`` (``lo > e``)."""
    z = np.logspace(math.log10(lo), math.log10(hi), n)
    vals = np.abs(np.array([x * f(x) for x in z], dtype=float))
    if np.any(vals <= 0):
        return math.nan
    return float(np.polyfit(np.log(np.log(z)), np.log(vals), 1)[0])


def classify_exponent(p: float, margin: float = 0.1) -> str:
    """``converges`` / ``diverges`` / ``unknown`` for a tail ``~ z^p``."""
    if math.isnan(p):
        return "unknown"
    if p < -1.0 - margin:
        return "converges"
    if p > -1.0 + margin:
        return "diverges"
    return "unknown"


@dataclass
class HalfLineIntegral:
    """``int_start^inf f`` split by decades.

    ``value`` is the partial integral plus a power-law tail estimate when the
    tail converges, ``inf`` when it diverges.
    """

    value: float
    partial: float
    tail: float
    exponent: float
    status: str
    radius: float
    decades: list = field(default_factory=list)


SPLITS = (64, 1024)


def _piece(f, lo, hi, epsabs, epsrel, limit, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit, **kw)[:2]


def quad_split(f, lo, hi, goal, *, epsabs=1e-13, epsrel=1e-11, limit=2000, first=None, **kw):
    """``(value, error)`` of ``int_lo^hi f`` on a finite interval, aiming at ``error <= goal``.

    ``goal`` may be a callable of the value.  If one adaptive pass misses it
    (many oscillations, or a target at the noise floor of ``f``) the interval
    is cut into equal sub-pieces with an achievable relative tolerance.
    ``first`` is an already computed single-pass ``(value, error)``.
    """
    target = goal if callable(goal) else (lambda v: goal)
    val, err = first if first is not None else _piece(f, lo, hi, epsabs, epsrel, limit, **kw)
    for n_sub in SPLITS:
        if math.isfinite(val) and abs(val) < 1e300 and err <= target(val):
            break
        sub = np.linspace(lo, hi, n_sub + 1)
        rel = max(epsrel, 1e-10)
        pieces = [_piece(f, a, b, epsabs / n_sub, rel, limit, **kw) for a, b in zip(sub, sub[1:])]
        val, err = sum(p for p, _ in pieces), sum(e for _, e in pieces)
    return val, err


def _growing(vals, margin) -> bool:
    if len(vals) < 3:
        return False
    g = [math.log10(max(v, 1e-300)) for v in vals]
    return min(g[2] - g[1], g[1] - g[0]) > margin


def integrate_halfline(
    f,
    *,
    start: float = 0.0,
    rmax: float = 1e8,
    margin: float = 0.1,
    stop_rtol: float = 1e-13,
    epsabs: float = 1e-13,
    epsrel: float = 1e-11,
    limit: int = 2000,
    nonnegative: bool = False,
) -> HalfLineIntegral:
    """Integrate a non-oscillatory ``f`` on ``[start, inf)``.

    Pieces are ``[start, 1]`` and then decades ``[10^k, 10^(k+1)]`` up to
    ``rmax``.  The tail exponent is fitted on the last completed decade.
    Quadrature failures propagate as :class:`QuadratureError`, except for a
    ``nonnegative`` integrand: there a rough decade estimate is kept and
    divergence is read off the growth of consecutive decade integrals.
    """
    edges = [start]
    r = max(1.0, start)
    if r > start:
        edges.append(r)
    while r < rmax:
        r = min(r * 10.0, rmax)
        edges.append(r)
    partial = 0.0
    decades = []
    p = math.nan
    tail = 0.0
    rough = False
    for i in range(len(edges) - 1):
        lo, hi = edges[i], edges[i + 1]
        goal = lambda v: max(1e-9 * (1 + abs(partial + v)), 1e-12)
        piece, err = _piece(f, lo, hi, epsabs, epsrel, limit)
        if not (math.isfinite(piece) and err <= goal(piece)) and not (
            nonnegative and lo >= 10.0 and _growing([d[2] for d in decades[-2:]] + [piece], margin)
        ):
            # growing decades go to the divergence test below without refinement
            piece, err = quad_split(f, lo, hi, goal, epsabs=epsabs, epsrel=epsrel, limit=limit, first=(piece, err))
        if not math.isfinite(piece) or err > goal(piece):
            if not (nonnegative and math.isfinite(piece)):
                raise QuadratureError(f"quadrature on [{lo}, {hi}] did not converge", partial + piece, err)
            rough = True
        partial += piece
        decades.append((lo, hi, piece))
        if rough and len(decades) >= 3 and lo >= 10.0:
            # I_k ~ 10^(k (p+1)) for f ~ r^p
            if _growing([d[2] for d in decades[-3:]], margin):
                g = [math.log10(max(d[2], 1e-300)) for d in decades[-2:]]
                p = g[1] - g[0] - 1.0
                return HalfLineIntegral(math.inf, partial, math.nan, p, "diverges", hi, decades)
        if hi >= 100.0 and lo > 0:
            p = tail_exponent(f, lo, hi)
            fR = f(hi)
            if p == -math.inf or fR == 0.0:
                return HalfLineIntegral(partial, partial, 0.0, p, "converges", hi, decades)
            if p < -1.0 - margin:
                tail = fR * hi / (-p - 1.0)
                if abs(tail) <= stop_rtol * abs(partial):
                    return HalfLineIntegral(partial + tail, partial, tail, p, "converges", hi, decades)
    status = classify_exponent(p, margin)
    R = edges[-1]
    if rough and status != "diverges":
        raise QuadratureError("oscillatory decades did not converge", partial)
    if status == "unknown" and R >= 1e4:
        # borderline power: r f(r) ~ (log r)^q diverges for q >= -1
        q = log_tail_exponent(f, R / 1e3, R)
        if q > -1.0 + margin:
            status = "diverges"
    if status == "converges":
        tail = f(R) * R / (-p - 1.0)
        return HalfLineIntegral(partial + tail, partial, tail, p, status, R, decades)
    value = math.inf if status == "diverges" else math.nan
    return HalfLineIntegral(value, partial, math.nan, p, status, R, decades)
