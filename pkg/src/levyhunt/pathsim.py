"""
Monte Carlo paths from a triplet and hitting-probability estimates.

Scheme
------
With cutoff ``eps`` (``0 < eps <= 1``) the process is split as

* drift ``-a - int_{eps <= |x| < 1} x mu(dx)``,
* a Gaussian part with covariance ``Q + int_{|x| < eps} x x^T mu(dx)``
  (the compensated small jumps replaced by a matching Gaussian),
* compound Poisson jumps with intensity ``mu`` restricted to ``|x| >= eps``.

The Gaussian part is simulated on the union of the time grid and the jump
times, so the position just before each jump is exact for the scheme.

Random numbers
--------------
Path ``i`` uses ``numpy.random.Philox`` (Philox4x64-10, a counter-based
generator) with the 128-bit key ``(seed, i)``.  Each path draws, in order:
the jump count, the jump times, the jump components and sizes, then the
Gaussian increments.  Paths are therefore independent of each other and of
how they are scheduled.  Bridge-crossing uniforms for hyperplane targets use
key ``(seed, 2**64 - 1)``.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .linalg import spectral_decompose
from .measure import Atoms, IsotropicStable, LineDensity, RadialDensity
from .triplet import LevyTriplet

__all__ = [
    "SimPlan",
    "Ensemble",
    "PointTube",
    "Hyperplane",
    "SubspaceTube",
    "HittingEstimate",
    "simulate_paths",
    "hitting_estimate",
    "empirical_cf",
    "MAX_EXPECTED_JUMPS",
]

MAX_EXPECTED_JUMPS = 2e7
_BRIDGE_STREAM = 2**64 - 1


@dataclass(frozen=True)
class SimPlan:
    horizon: float = 1.0
    step_count: int = 100
    small_jump_cutoff: float = 0.1
    paths: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.step_count < 1:
            raise ValueError("step_count must be at least 1")
        if not 0.0 < self.small_jump_cutoff <= 1.0:
            raise ValueError("small_jump_cutoff must be in (0, 1]")
        if self.paths < 1:
            raise ValueError("paths must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def _generator(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))


class _RadialSampler:
    """Inverse-CDF sampler for a radial density restricted to ``[lo, inf)``."""

    def __init__(self, dens: RadialDensity, lo: float, decades: int = 8, per_decade: int = 200):
        self.mass = dens.moment(0, lo, math.inf)
        self.r = lo * np.logspace(0.0, decades, decades * per_decade + 1)
        m = np.array([dens.moment(0, lo, x) for x in self.r])
        self.cdf = m / self.mass if self.mass > 0 else m
        self.top = float(self.cdf[-1])
        heavy = [t.alpha for t in dens.terms if math.isinf(t.hi) and t.damping == 0.0 and t.coef > 0]
        self.tail_alpha = min(heavy) if heavy else None

    def sample(self, u: np.ndarray) -> np.ndarray:
        out = np.empty_like(u)
        body = u < self.top
        k = np.clip(np.searchsorted(self.cdf, u[body], side="right"), 1, len(self.r) - 1)
        c0, c1 = self.cdf[k - 1], self.cdf[k]
        frac = np.where(c1 > c0, (u[body] - c0) / np.where(c1 > c0, c1 - c0, 1.0), 0.0)
        out[body] = self.r[k - 1] + frac * (self.r[k] - self.r[k - 1])
        rest = ~body
        if rest.any():
            R = self.r[-1]
            if self.tail_alpha is None or self.top >= 1.0:
                out[rest] = R
            else:
                tail = (1.0 - u[rest]) / (1.0 - self.top)
                out[rest] = R * np.maximum(tail, 1e-300) ** (-1.0 / self.tail_alpha)
        return out


@dataclass
class _JumpSource:
    mass: float
    sample: object  # callable (generator, n) -> (n, dim) array


def _jump_sources(t: LevyTriplet, eps: float) -> list:
    dim = t.dim
    out = []
    for c in t.mu:
        if isinstance(c, Atoms):
            if not c.weights.size:
                continue
            keep = c.norms() >= eps
            if not keep.any():
                continue
            loc, w = c.locations[keep], c.weights[keep]
            cw = np.cumsum(w) / w.sum()
            cw[-1] = 1.0
            out.append(
                _JumpSource(
                    float(w.sum()),
                    lambda g, n, loc=loc, cw=cw: loc[np.searchsorted(cw, g.random(n), side="right")],
                )
            )
        elif isinstance(c, LineDensity):
            for sign, dens in ((1.0, c.positive), (-1.0, c.negative)):
                if dens.is_zero:
                    continue
                s = _RadialSampler(dens, eps)
                if s.mass <= 0:
                    continue
                u = c.direction * sign
                out.append(_JumpSource(s.mass, lambda g, n, s=s, u=u: s.sample(g.random(n))[:, None] * u[None, :]))
        elif isinstance(c, IsotropicStable):
            mass = c.radial_moment(0, eps, math.inf)
            if mass <= 0:
                continue
            lo, hi, al = max(eps, c.rmin), c.rmax, c.alpha
            B = c.basis_matrix()

            def samp(g, n, lo=lo, hi=hi, al=al, B=B):
                # r^(-alpha) uniform between lo^(-alpha) and hi^(-alpha)
                u = g.random(n)
                top = 0.0 if math.isinf(hi) else hi ** (-al)
                r = (lo ** (-al) - u * (lo ** (-al) - top)) ** (-1.0 / al)
                d = g.standard_normal((n, B.shape[1]))
                d /= np.linalg.norm(d, axis=1, keepdims=True)
                return r[:, None] * (d @ B.T)

            out.append(_JumpSource(mass, samp))
    return out


def _small_jump_cov(t: LevyTriplet, eps: float) -> np.ndarray:
    C = np.zeros((t.dim, t.dim))
    for c in t.mu:
        if isinstance(c, Atoms):
            if c.weights.size:
                m = c.norms() < eps
                x = c.locations[m]
                C += (x * c.weights[m, None]).T @ x
        elif isinstance(c, LineDensity):
            C += np.outer(c.direction, c.direction) * (c.positive.moment(2, 0.0, eps) + c.negative.moment(2, 0.0, eps))
        else:
            C += c.second_moment_matrix(eps)
    return C


@dataclass
class Ensemble:
    """Simulated paths.

    ``grid`` holds the grid times, ``X`` the positions at grid times with shape
    ``(paths, steps + 1, dim)``.  Jump events are flat arrays sorted by path
    and then time: ``jump_path``, ``jump_time``, ``jump_pre`` (position just
    before the jump) and ``jump_size``.
    """

    plan: SimPlan
    dim: int
    grid: np.ndarray
    X: np.ndarray
    drift: np.ndarray
    cov: np.ndarray
    jump_rate: float
    jump_path: np.ndarray
    jump_time: np.ndarray
    jump_pre: np.ndarray
    jump_size: np.ndarray

    def jump_counts(self) -> np.ndarray:
        return np.bincount(self.jump_path, minlength=self.plan.paths)

    def events_of(self, i: int):
        lo, hi = np.searchsorted(self.jump_path, [i, i + 1])
        return self.jump_time[lo:hi], self.jump_pre[lo:hi], self.jump_size[lo:hi]

    def header(self) -> dict:
        return {
            "format": "levyhunt-ensemble",
            "version": 1,
            "plan": asdict(self.plan),
            "dim": self.dim,
            "drift": self.drift.tolist(),
            "cov": self.cov.tolist(),
            "jump_rate": self.jump_rate,
            "rng": "Philox4x64-10, key (seed, path)",
        }

    def save_npz(self, path) -> None:
        """Binary export: JSON header plus grid, positions and flat event lists."""
        np.savez(
            path,
            header=np.array(json.dumps(self.header())),
            grid=self.grid,
            X=self.X,
            jump_path=self.jump_path,
            jump_time=self.jump_time,
            jump_pre=self.jump_pre,
            jump_size=self.jump_size,
        )

    @classmethod
    def load_npz(cls, path) -> "Ensemble":
        with np.load(path) as f:
            h = json.loads(str(f["header"]))
            return cls(
                SimPlan(**h["plan"]),
                h["dim"],
                f["grid"],
                f["X"],
                np.array(h["drift"]),
                np.array(h["cov"]),
                h["jump_rate"],
                f["jump_path"],
                f["jump_time"],
                f["jump_pre"],
                f["jump_size"],
            )

    def summary_csv(self) -> str:
        """One row per path: final position and number of jumps."""
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["path"] + [f"x{i + 1}" for i in range(self.dim)] + ["jumps"])
        counts = self.jump_counts()
        for i in range(self.plan.paths):
            w.writerow([i] + [format(v, ".17g") for v in self.X[i, -1]] + [int(counts[i])])
        return buf.getvalue()


def simulate_paths(t: LevyTriplet, plan: SimPlan) -> Ensemble:
    """Simulate ``plan.paths`` independent paths of the process started at 0."""
    eps = plan.small_jump_cutoff
    dim = t.dim
    sources = _jump_sources(t, eps)
    masses = np.array([s.mass for s in sources])
    rate = float(masses.sum()) if sources else 0.0
    if not math.isfinite(rate) or rate * plan.horizon * plan.paths > MAX_EXPECTED_JUMPS:
        raise ValueError(
            f"jump intensity {rate:g} above cutoff {eps:g} is too large to simulate; use a larger small_jump_cutoff"
        )
    mid = t.mu.small_jump_mean(dim, eps, 1.0)
    drift = -t.a - mid
    cov = t.Q + _small_jump_cov(t, eps)
    s = spectral_decompose(cov)
    L = s.O[: s.rank].T * np.sqrt(s.eigenvalues[: s.rank])
    p = masses / rate if rate > 0 else masses
    T, n = plan.horizon, plan.step_count
    grid = np.linspace(0.0, T, n + 1)
    X = np.empty((plan.paths, n + 1, dim))
    ev_path, ev_time, ev_pre, ev_size = [], [], [], []
    cum_p = np.cumsum(p)
    cum_p[-1:] = 1.0
    sq = np.sqrt(np.diff(grid))
    base = drift[None, :] * np.diff(grid)[:, None]
    for i in range(plan.paths):
        g = _generator(plan.seed, i)
        k = int(g.poisson(rate * T)) if rate > 0 else 0
        if not k:
            inc = base if not s.rank else base + (g.standard_normal((n, s.rank)) * sq[:, None]) @ L.T
            X[i, 0] = 0.0
            np.cumsum(inc, axis=0, out=X[i, 1:])
            continue
        jt = np.sort(g.random(k) * T)
        comp = np.searchsorted(cum_p, g.random(k), side="right")
        js = np.empty((k, dim))
        for c in range(len(sources)):
            m = comp == c
            nc = int(m.sum())
            if nc:
                js[m] = sources[c].sample(g, nc)
        times = np.sort(np.concatenate([grid, jt]))
        dt = np.diff(times)
        inc = drift[None, :] * dt[:, None]
        if s.rank:
            inc = inc + (g.standard_normal((len(dt), s.rank)) * np.sqrt(dt)[:, None]) @ L.T
        cont = np.zeros((len(times), dim))
        np.cumsum(inc, axis=0, out=cont[1:])
        idx = np.searchsorted(times, jt)
        cum = np.cumsum(js, axis=0)
        # jumps counted up to each node: number of jump times <= node time
        cnt = np.searchsorted(jt, times, side="right")
        path = cont + np.vstack([np.zeros((1, dim)), cum])[cnt]
        ev_path.append(np.full(k, i))
        ev_time.append(jt)
        ev_pre.append(path[idx] - js)
        ev_size.append(js)
        X[i] = path[np.searchsorted(times, grid)]
    if ev_path:
        jp, jt, jpre, js = (np.concatenate(ev_path), np.concatenate(ev_time), np.vstack(ev_pre), np.vstack(ev_size))
    else:
        jp, jt, jpre, js = np.zeros(0, dtype=int), np.zeros(0), np.zeros((0, dim)), np.zeros((0, dim))
    return Ensemble(plan, dim, grid, X, drift, cov, rate, jp, jt, jpre, js)


# ------------------------------------------------------------------ targets


@dataclass(frozen=True)
class PointTube:
    center: tuple
    eps: float

    def describe(self) -> dict:
        return {"kind": "pointTube", "center": list(self.center), "eps": self.eps}


@dataclass(frozen=True)
class Hyperplane:
    normal: tuple
    offset: float

    def describe(self) -> dict:
        return {"kind": "hyperplane", "normal": list(self.normal), "offset": self.offset}


@dataclass(frozen=True)
class SubspaceTube:
    """Tube of radius ``eps`` around the span of ``basis`` (a list of vectors)."""

    basis: tuple
    eps: float

    def describe(self) -> dict:
        return {"kind": "subspaceTube", "basis": [list(b) for b in self.basis], "eps": self.eps}


@dataclass
class HittingEstimate:
    probability: float
    ci95: float
    hits: int
    paths: int
    seed: int
    target: dict
    window: tuple
    discretization_caveat: bool = False
    hit_time_edges: list = field(default_factory=list)
    hit_time_counts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "probability": self.probability,
            "ci95": self.ci95,
            "hits": self.hits,
            "paths": self.paths,
            "seed": self.seed,
            "target": self.target,
            "window": list(self.window),
            "discretizationCaveat": self.discretization_caveat,
            "hitTimeHistogram": {"edges": self.hit_time_edges, "counts": self.hit_time_counts},
        }


def _segments(ens: Ensemble, i: int, k0: int, k1: int):
    """Nodes ``(times, start values, end values)`` of the continuous pieces of path ``i`` on grid steps ``k0..k1``."""
    tg = ens.grid[k0 : k1 + 1]
    xg = ens.X[i, k0 : k1 + 1]
    jt, jpre, js = ens.events_of(i)
    m = (jt > tg[0]) & (jt <= tg[-1])
    if not m.any():
        return tg[:-1], tg[1:], xg[:-1], xg[1:]
    jt, jpre, js = jt[m], jpre[m], js[m]
    times = np.concatenate([tg, jt])
    starts = np.concatenate([xg, jpre + js])
    ends = np.concatenate([xg, jpre])
    order = np.argsort(times, kind="stable")
    times, starts, ends = times[order], starts[order], ends[order]
    # ties between a grid time and a jump: grid value already includes the jump
    return times[:-1], times[1:], starts[:-1], ends[1:]


def _distance_fn(target, dim):
    if isinstance(target, PointTube):
        c = np.asarray(target.center, dtype=float)
        if c.size != dim:
            raise ValueError("target and ensemble dimensions differ")
        P = np.eye(dim)
        return P, c
    B = np.atleast_2d(np.asarray(target.basis, dtype=float))
    if B.shape[1] != dim:
        raise ValueError("target and ensemble dimensions differ")
    Qb, _ = np.linalg.qr(B.T)
    return np.eye(dim) - Qb @ Qb.T, np.zeros(dim)


def _tube_hits(P, c, eps, x0, x1):
    """Minimum distance of the segments ``x0 -> x1`` to the tube axis, against ``eps``."""
    u0 = (x0 - c) @ P.T
    d = (x1 - x0) @ P.T
    dd = np.einsum("...i,...i->...", d, d)
    s = np.clip(-np.einsum("...i,...i->...", u0, d) / np.where(dd > 0, dd, 1.0), 0.0, 1.0)
    closest = u0 + s[..., None] * d
    dist = np.linalg.norm(closest, axis=-1)
    return dist <= eps, s


def hitting_estimate(ens: Ensemble, target, window=None) -> HittingEstimate:
    """Fraction of paths that enter ``target`` during ``window`` (snapped to the grid).

    Hyperplanes count continuous crossings, exact landings and within-step
    crossings of the Gaussian part (Brownian-bridge probability); a jump over
    the plane is not a hit.  Tubes use the straight segment between nodes and
    set ``discretization_caveat`` when ``eps`` is within three typical steps.
    """
    plan = ens.plan
    t1, t2 = (0.0, plan.horizon) if window is None else (float(window[0]), float(window[1]))
    if not 0.0 <= t1 < t2 <= plan.horizon + 1e-12:
        raise ValueError("window must satisfy 0 <= t1 < t2 <= horizon")
    k0 = int(np.argmin(np.abs(ens.grid - t1)))
    k1 = int(np.argmin(np.abs(ens.grid - t2)))
    dt = ens.grid[1] - ens.grid[0]
    caveat = False
    first = np.full(plan.paths, np.nan)
    if isinstance(target, Hyperplane):
        nvec = np.asarray(target.normal, dtype=float)
        if nvec.size != ens.dim:
            raise ValueError("target and ensemble dimensions differ")
        nn = float(np.linalg.norm(nvec))
        nvec = nvec / nn
        off = target.offset / nn
        sig2 = float(nvec @ ens.cov @ nvec)
        bridge = _generator(plan.seed, _BRIDGE_STREAM)

        def seg_hits(ta, tb, y0, y1, u):
            h = (y0 == 0.0) | (y1 == 0.0) | (np.sign(y0) != np.sign(y1))
            if sig2 > 0:
                span = np.maximum(tb - ta, 1e-300)
                pc = np.exp(-2.0 * np.maximum(y0 * y1, 0.0) / (sig2 * span))
                h = h | (u < pc)
            return h

        # grid-only paths vectorised; the uniforms are drawn for every path and step
        U = bridge.random((plan.paths, k1 - k0))
        counts = ens.jump_counts()
        plain = np.nonzero(counts == 0)[0]
        Y = ens.X[plain, k0 : k1 + 1] @ nvec - off
        H = seg_hits(ens.grid[k0:k1], ens.grid[k0 + 1 : k1 + 1], Y[:, :-1], Y[:, 1:], U[plain])
        anyh = H.any(axis=1)
        idx = np.argmax(H, axis=1)
        first[plain[anyh]] = ens.grid[k0 + idx[anyh]]
        for i in np.nonzero(counts > 0)[0]:
            ta, tb, xa, xb = _segments(ens, i, k0, k1)
            u = bridge.random(len(ta)) if len(ta) != k1 - k0 else U[i]
            h = seg_hits(ta, tb, xa @ nvec - off, xb @ nvec - off, u)
            if h.any():
                first[i] = ta[np.argmax(h)]
    else:
        P, c = _distance_fn(target, ens.dim)
        step = math.sqrt(max(float(np.trace(ens.cov)), 0.0) * dt) + float(np.linalg.norm(ens.drift)) * dt
        caveat = target.eps < 3.0 * step
        counts = ens.jump_counts()
        plain = np.nonzero(counts == 0)[0]
        Xp = ens.X[plain, k0 : k1 + 1]
        H, s = _tube_hits(P, c, target.eps, Xp[:, :-1], Xp[:, 1:])
        anyh = H.any(axis=1)
        idx = np.argmax(H, axis=1)
        first[plain[anyh]] = ens.grid[k0 + idx[anyh]] + s[anyh, idx[anyh]] * dt
        for i in np.nonzero(counts > 0)[0]:
            ta, tb, xa, xb = _segments(ens, i, k0, k1)
            h, s = _tube_hits(P, c, target.eps, xa, xb)
            if h.any():
                j = int(np.argmax(h))
                first[i] = ta[j] + s[j] * (tb[j] - ta[j])
    hit = ~np.isnan(first)
    hits = int(hit.sum())
    prob = hits / plan.paths
    ci = 1.96 * math.sqrt(prob * (1.0 - prob) / plan.paths)
    counts_h, edges = np.histogram(first[hit], bins=10, range=(ens.grid[k0], ens.grid[k1]))
    return HittingEstimate(
        prob,
        ci,
        hits,
        plan.paths,
        plan.seed,
        target.describe(),
        (float(ens.grid[k0]), float(ens.grid[k1])),
        bool(caveat),
        edges.tolist(),
        counts_h.tolist(),
    )


def empirical_cf(ens: Ensemble, z_list, time: float | None = None):
    """Sample mean of ``exp(i<z, X_time>)`` and its standard error (real and imaginary parts).

    Returns
    -------
    values : complex ndarray
    stderr : complex ndarray
        ``std(Re)/sqrt(n) + 1j * std(Im)/sqrt(n)``.
    """
    time = ens.plan.horizon if time is None else float(time)
    k = int(np.argmin(np.abs(ens.grid - time)))
    if abs(ens.grid[k] - time) > 1e-12 * max(1.0, time):
        raise ValueError(f"time {time} is not a grid time")
    Z = np.atleast_2d(np.asarray(z_list, dtype=float))
    ph = np.exp(1j * (ens.X[:, k, :] @ Z.T))
    n = ph.shape[0]
    vals = ph.mean(axis=0)
    se = ph.real.std(axis=0, ddof=1) / math.sqrt(n) + 1j * ph.imag.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(Z.shape[0], dtype=complex)
    return vals, se
