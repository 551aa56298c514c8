"""
Checks for Hunt's hypothesis (H) and the verdict engine.

Each checker returns a :class:`CheckResult` with a tri-state status, a
certainty grade (``exact`` for closed-form or finite computations,
``numeric`` for anything sampled or integrated) and the evidence it used.
:func:`decide_H` runs the checkers in a fixed priority order and records
every rule it consulted in the :class:`Verdict` trace.

Sufficient criteria never produce ``fails``; only necessity results do.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import NotProjectableError, OffRangeOf, product_embed, project_triplet, restrict_measure, sum_triplets
from .exponent import psi_values
from .linalg import DEFAULT_RANK_THRESHOLD, measure_off_range_mass, range_projectors, spectral_decompose
from .measure import Atoms, IsotropicStable, LevyMeasure, LineDensity, PowerTerm, RadialDensity
from .quadrature import QuadratureError, integrate_halfline
from .triplet import LevyTriplet, ProcessSpec

__all__ = [
    "HOLDS",
    "FAILS",
    "UNKNOWN",
    "CheckResult",
    "TraceEntry",
    "Verdict",
    "Decomposition",
    "DecideOptions",
    "SubordinatorReport",
    "is_compound_poisson",
    "kesten_point_polarity",
    "kf_ratio_profile",
    "condition_S",
    "small_jump_liminf",
    "exponent_growth_liminf",
    "one_dim_dominance",
    "subordinator_diagnostics",
    "pairwise_rules",
    "decide_H",
]

HOLDS, FAILS, UNKNOWN = "holds", "fails", "unknown"
EXACT, NUMERIC = "exact", "numeric"
MARGIN = 0.1
# fitted stable indices this close to 0 or 1 are treated as boundary cases
INDEX_MARGIN = 0.01


@dataclass
class CheckResult:
    status: str
    certainty: str
    evidence: dict = field(default_factory=dict)
    notes: str = ""
    classification: str | None = None

    def to_dict(self) -> dict:
        out = {"status": self.status, "certainty": self.certainty, "evidence": self.evidence}
        if self.notes:
            out["notes"] = self.notes
        if self.classification is not None:
            out["classification"] = self.classification
        return out


@dataclass
class TraceEntry:
    rule: str
    theorem: str
    result: CheckResult

    def to_dict(self) -> dict:
        d = {"rule": self.rule, "theorem": self.theorem}
        d.update(self.result.to_dict())
        return d


@dataclass
class Verdict:
    status: str
    trace: list

    @property
    def deciding(self) -> TraceEntry | None:
        if self.status == UNKNOWN:
            return None
        for e in reversed(self.trace):
            if e.result.status == self.status:
                return e
        return None

    def to_dict(self) -> dict:
        return {"status": self.status, "trace": [e.to_dict() for e in self.trace]}

    def summary_markdown(self, title: str = "Verdict") -> str:
        lines = [f"# {title}", "", f"**Status:** {self.status}", "", "| rule | theorem | status | certainty | notes |", "|---|---|---|---|---|"]
        for e in self.trace:
            notes = e.result.notes.replace("|", "/").replace("\n", " ")
            lines.append(f"| {e.rule} | {e.theorem} | {e.result.status} | {e.result.certainty} | {notes} |")
        return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ helpers


def _psi(t, z):
    return complex(psi_values(t, np.atleast_1d(np.asarray(z, dtype=float))))


def _require_dim1(t, name):
    if t.dim != 1:
        raise ValueError(f"{name} needs a one-dimensional triplet, got dim {t.dim}")


def _q_is_zero(t) -> bool:
    return not np.any(np.abs(t.Q) > 1e-14)


def _rays(t: LevyTriplet):
    """Densities of ``mu_+`` and the reflected ``mu_-`` of a 1-D measure, plus the atoms of each side."""
    pos, neg = RadialDensity(), RadialDensity()
    apos, aneg = [], []
    for c in t.mu:
        if isinstance(c, Atoms):
            for x, w in zip(c.locations[:, 0], c.weights):
                (apos if x > 0 else aneg).append((abs(x), w))
        elif isinstance(c, LineDensity):
            if c.direction[0] > 0:
                pos, neg = pos + c.positive, neg + c.negative
            else:
                pos, neg = pos + c.negative, neg + c.positive
        else:
            d = RadialDensity([PowerTerm(c.intensity, c.alpha, c.rmin, c.rmax)])
            pos, neg = pos + d, neg + d
    return pos, neg, apos, aneg


def _is_symmetric(t: LevyTriplet) -> bool:
    if np.any(t.a != 0.0):
        return False
    atoms = t.mu.merged_atoms(t.dim)
    if atoms.weights.size:
        key = lambda loc, w: tuple(np.round(loc, 12)) + (round(float(w), 12),)
        a = sorted(key(x, w) for x, w in zip(atoms.locations, atoms.weights))
        b = sorted(key(-x, w) for x, w in zip(atoms.locations, atoms.weights))
        if a != b:
            return False
    for c in t.mu.lines():
        if c.positive.to_list() != c.negative.to_list():
            return False
    return True


def _trend_holds(values, per_decade, floor=1e-12):
    """Positive and non-decreasing (within the margin) over the last decade."""
    v = np.asarray(values, dtype=float)
    if v.size < 2 * per_decade or not np.all(np.isfinite(v[-2 * per_decade :])):
        return False, {}
    last = v[-per_decade:]
    prev = v[-2 * per_decade : -per_decade]
    ev = {"min_last_decade": float(last.min()), "min_previous_decade": float(prev.min())}
    ok = last.min() > floor and last.min() >= (1.0 - MARGIN) * prev.min()
    return bool(ok), ev


# ------------------------------------------------------------------ checkers


def is_compound_poisson(t: LevyTriplet) -> CheckResult:
    """Compound Poisson: ``Q = 0``, finite ``mu`` and zero physical drift."""
    mass = t.mu.total_mass()
    ev = {"total_mass": mass, "Q_zero": _q_is_zero(t)}
    if not ev["Q_zero"] or not math.isfinite(mass):
        return CheckResult(FAILS, EXACT, ev, "Gaussian part present" if not ev["Q_zero"] else "infinite jump activity")
    drift = t.physical_drift()
    ev["physical_drift"] = drift.tolist()
    ok = float(np.linalg.norm(drift)) <= 1e-10 * (1.0 + float(np.linalg.norm(t.a)))
    return CheckResult(HOLDS if ok else FAILS, EXACT, ev, "" if ok else "nonzero drift")


def kesten_point_polarity(t: LevyTriplet, rmax: float = 1e8, margin: float = MARGIN) -> CheckResult:
    """Finiteness of ``int_0^inf Re(1/(1+psi(z))) dz`` for a 1-D process.

    ``holds`` means the integral is finite, so single points are not polar.
    """
    _require_dim1(t, "kesten_point_polarity")
    if is_compound_poisson(t).status == HOLDS:
        return CheckResult(UNKNOWN, EXACT, {}, "compound Poisson process: criterion does not apply")

    def g(z):
        return (1.0 / (1.0 + _psi(t, z))).real

    try:
        res = integrate_halfline(g, rmax=rmax, margin=margin)
    except QuadratureError as e:
        return CheckResult(UNKNOWN, NUMERIC, {"partial": e.partial}, f"quadrature failed: {e}")
    ev = {"value": res.value, "partial": res.partial, "tail_exponent": res.exponent, "radius": res.radius}
    status = {"converges": HOLDS, "diverges": FAILS}.get(res.status, UNKNOWN)
    return CheckResult(status, NUMERIC, ev, f"integral {res.status}")


def _directions(t: LevyTriplet, n_random: int = 8, seed: int = 0) -> np.ndarray:
    n = t.dim
    if n == 1:
        return np.array([[1.0], [-1.0]])
    dirs = [np.eye(n), -np.eye(n)]
    s = spectral_decompose(t.Q)
    dirs += [s.O, -s.O]
    rng = np.random.default_rng(seed)
    r = rng.normal(size=(n_random, n))
    dirs.append(r / np.linalg.norm(r, axis=1, keepdims=True))
    return np.vstack(dirs)


def kf_ratio_profile(
    t: LevyTriplet,
    radii=None,
    directions=None,
) -> CheckResult:
    """Growth of ``|Im psi| / (1 + Re psi)`` along rays.

    Classification is ``bounded`` (Kanda-Forst, with ``M_hat``), ``logGrowth``
    (``|1+psi| <= A (1 + log A)``, an admissible Rao function) or
    ``unbounded``.
    """
    if radii is None:
        radii = np.logspace(-2, 8, 61)
    per_decade = int(round((len(radii) - 1) / math.log10(radii[-1] / radii[0])))
    if _is_symmetric(t):
        return CheckResult(HOLDS, EXACT, {"M_hat": 0.0}, "symmetric exponent: Im psi = 0", "bounded")
    full_rank = t.dim > 0 and spectral_decompose(t.Q).rank == t.dim
    dirs = _directions(t) if directions is None else np.atleast_2d(directions)
    Z = (dirs[:, None, :] * np.asarray(radii)[None, :, None]).reshape(-1, t.dim)
    vals = psi_values(t, Z).reshape(len(dirs), len(radii))
    A = 1.0 + np.maximum(vals.real, 0.0)
    ratio = np.abs(vals.imag) / A
    rao = np.abs(1.0 + vals) / (A * (1.0 + np.log(A)))
    m_ratio = ratio.max(axis=0)
    m_rao = rao.max(axis=0)
    ev = {"M_hat": float(m_ratio.max()), "rao_M_hat": float(m_rao.max())}
    if full_rank:
        return CheckResult(HOLDS, EXACT, ev, "full-rank Q: Re psi grows quadratically", "bounded")

    def flat(m):
        last = m[-per_decade:].max()
        prev = m[-2 * per_decade : -per_decade].max()
        return last <= (1.0 + MARGIN) * prev + 1e-12

    if flat(m_ratio):
        return CheckResult(HOLDS, NUMERIC, ev, "ratio flat over the last decade", "bounded")
    if flat(m_rao):
        return CheckResult(UNKNOWN, NUMERIC, ev, "Kanda-Forst ratio grows; Rao ratio with f = 1 + log is flat", "logGrowth")
    return CheckResult(FAILS, NUMERIC, ev, "ratio keeps growing", "unbounded")


def condition_S(t: LevyTriplet, rank_threshold: float = DEFAULT_RANK_THRESHOLD) -> CheckResult:
    """Solvability of ``sqrt(Q) y = b'`` with ``b' = -a - int_{|x|<1} x mu_1(dx)``.

    ``mu_1`` is ``mu`` restricted off ``sqrt(Q) R^n``; the check applies only
    when that restriction is finite.
    """
    s = spectral_decompose(t.Q, rank_threshold)
    _, P2 = range_projectors(s)
    off = measure_off_range_mass(t.mu, P2)
    ev = {"rank": s.rank, "off_range_mass": off}
    if not math.isfinite(off):
        return CheckResult(UNKNOWN, EXACT, ev, "infinite off-range mass: not applicable")
    mu1 = restrict_measure(t.mu, OffRangeOf(P2))
    b_prime = -t.a - mu1.small_jump_mean(t.dim)
    resid = float(np.linalg.norm(P2 @ b_prime))
    ev.update(b_prime=b_prime.tolist(), residual=resid)
    ok = resid <= 1e-9 * (1.0 + float(np.linalg.norm(b_prime)))
    certainty = EXACT if mu1.is_atomic else NUMERIC
    return CheckResult(HOLDS if ok else FAILS, certainty, ev, "b' in range of sqrt(Q)" if ok else "b' has a component off the range")


def _small_jump_mass(t: LevyTriplet, eps: float) -> float:
    total = 0.0
    for c in t.mu:
        if isinstance(c, Atoms):
            x = c.locations[:, 0]
            m = np.abs(x) <= eps
            total += float((c.weights[m] * x[m] ** 2).sum())
        elif isinstance(c, LineDensity):
            total += c.moment(2, 0.0, eps)
        else:
            total += c.radial_moment(2, 0.0, eps)
    return total


def small_jump_liminf(t: LevyTriplet, weight: str = "log", eps_grid=None) -> CheckResult:
    """``int_{-eps}^{eps} x^2 mu(dx)`` against ``eps/|log eps|`` (or the log-log variant) as ``eps -> 0``."""
    _require_dim1(t, "small_jump_liminf")
    if eps_grid is None:
        eps_grid = np.logspace(-1, -8, 71)
    eps_grid = np.asarray(eps_grid, dtype=float)
    per_decade = int(round((len(eps_grid) - 1) / math.log10(eps_grid[0] / eps_grid[-1])))
    g = np.array([_small_jump_mass(t, e) for e in eps_grid])
    L = np.abs(np.log(eps_grid))
    if weight == "log":
        w = eps_grid / L
    elif weight == "logLog":
        w = eps_grid / (L * np.log(L))
    else:
        raise ValueError(f"unknown weight {weight!r}")
    ratio = g / w
    ok, ev = _trend_holds(ratio, per_decade)
    ev.update(weight=weight, ratio_at_smallest=float(ratio[-1]))
    if ok:
        return CheckResult(
            HOLDS,
            NUMERIC,
            ev,
            "small-jump ratio positive and non-decreasing; resolvent densities not required here, "
            "although the related |psi| growth criterion assumes them",
        )
    return CheckResult(UNKNOWN, NUMERIC, ev, "ratio tends to 0 or trend ambiguous; criterion silent")


def exponent_growth_liminf(
    t: LevyTriplet,
    mode: str = "reOverZlog",
    gamma: float = 0.5,
    radial_grid=None,
    resolvent_densities: bool = False,
) -> CheckResult:
    """``Re psi / (|z|/log|z|)`` or ``|psi| / (|z| log^(1+gamma)|z|)`` as ``|z| -> inf``.

    The second mode needs lower-semicontinuous 1-excessive functions, which
    is asserted through ``resolvent_densities``.
    """
    _require_dim1(t, "exponent_growth_liminf")
    if mode == "absOverZlogPow" and not resolvent_densities:
        return CheckResult(UNKNOWN, EXACT, {}, "requires the hasResolventDensities assertion")
    if radial_grid is None:
        radial_grid = np.logspace(1, 8, 57)
    z = np.asarray(radial_grid, dtype=float)
    per_decade = int(round((len(z) - 1) / math.log10(z[-1] / z[0])))
    vals = np.vstack([psi_values(t, z[:, None]), psi_values(t, -z[:, None])])
    lz = np.log(z)
    if mode == "reOverZlog":
        ratio = np.maximum(vals.real, 0.0) / (z / lz)
    elif mode == "absOverZlogPow":
        ratio = np.abs(vals) / (z * lz ** (1.0 + gamma))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    ratio = ratio.min(axis=0)
    ok, ev = _trend_holds(ratio, per_decade)
    ev.update(mode=mode, ratio_at_largest=float(ratio[-1]))
    if mode == "absOverZlogPow":
        ev["gamma"] = gamma
    if ok:
        return CheckResult(HOLDS, NUMERIC, ev, "growth ratio positive and non-decreasing")
    return CheckResult(UNKNOWN, NUMERIC, ev, "ratio tends to 0 or trend ambiguous; criterion silent")


def _variation_plus(pos: RadialDensity, apos) -> float:
    return pos.moment(1, 0.0, 1.0) + pos.moment(0, 1.0, math.inf) + sum(min(1.0, x) * w for x, w in apos)


def one_dim_dominance(t: LevyTriplet, k: float | None = None, delta: float = 0.5) -> CheckResult:
    """Dominance test ``mu_-(reflected) <= k mu_+ + nu`` with ``int_0^delta x nu(dx) < inf``.

    Requires ``Q = 0`` and ``int (1 ^ x) mu_+(dx) = inf``.  With ``nu`` the
    positive part of ``mu_- - k mu_+`` the test reduces to comparing the
    leading power laws of the two sides at the origin, which is exact for the
    parametric densities used here.  Atoms are finite and go into ``nu``.
    """
    _require_dim1(t, "one_dim_dominance")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if not _q_is_zero(t):
        return CheckResult(UNKNOWN, EXACT, {}, "requires Q = 0")
    pos, neg, apos, _ = _rays(t)
    var_plus = _variation_plus(pos, apos)
    ev = {"variation_plus": var_plus, "delta": delta}
    lp, ln = pos.leading_behaviour(), neg.leading_behaviour()
    ev["leading_plus"] = list(lp) if lp else None
    ev["leading_minus"] = list(ln) if ln else None
    if math.isfinite(var_plus):
        return CheckResult(UNKNOWN, EXACT, ev, "int (1 ^ x) mu_+ is finite: hypothesis not met")
    # negative side integrable against x near 0: nu = mu_- works with k = 0
    if ln is None or neg.moment(1, 0.0, delta) < math.inf:
        kk = 0.0 if k is None else k
        ev["k"] = kk
        return CheckResult(HOLDS, EXACT, ev, "reflected negative part has finite first moment near 0")
    a_p, c_p = lp
    a_n, c_n = ln
    if a_n < a_p:
        kk = 0.5 if k is None else k
        ok = kk > 0.0
    elif a_n == a_p:
        ratio = c_n / c_p
        ev["leading_ratio"] = ratio
        kk = 0.5 * (1.0 + ratio) if k is None else k
        ok = ratio < 1.0 and ratio < kk < 1.0
    else:
        kk, ok = k, False
    ev["k"] = kk
    if ok:
        return CheckResult(HOLDS, EXACT, ev, "leading singularity of the negative side dominated by k mu_+")
    return CheckResult(UNKNOWN, EXACT, ev, "no admissible k < 1: remainder has infinite first moment near 0")


@dataclass
class SubordinatorReport:
    is_subordinator: bool
    drift: float | None
    drift_necessity: CheckResult
    special: CheckResult
    quasi_stable: CheckResult
    type_alpha_beta: CheckResult

    def to_dict(self) -> dict:
        return {
            "is_subordinator": self.is_subordinator,
            "drift": self.drift,
            "drift_necessity": self.drift_necessity.to_dict(),
            "special": self.special.to_dict(),
            "quasi_stable": self.quasi_stable.to_dict(),
            "type_alpha_beta": self.type_alpha_beta.to_dict(),
        }


def _quasi_stable(pos: RadialDensity, delta: float = 0.5, xmin: float = 1e-12) -> CheckResult:
    x = np.logspace(math.log10(xmin), math.log10(delta), 12 * int(round(math.log10(delta / xmin))) + 1)[:-1]
    rho = pos(x)
    if np.any(rho <= 0):
        return CheckResult(UNKNOWN, NUMERIC, {}, "density vanishes somewhere near 0")
    lo = x < xmin * 1e3
    slope = np.polyfit(np.log(x[lo]), np.log(rho[lo]), 1)[0]
    alpha = -1.0 - slope
    ev = {"alpha_hat": float(alpha), "delta": delta, "grid_min": xmin}
    if not INDEX_MARGIN <= alpha <= 1.0 - INDEX_MARGIN:
        return CheckResult(UNKNOWN, NUMERIC, ev, "estimated index not clear of the ends of (0, 1)")
    R = rho * x ** (1.0 + alpha)
    bottom = x < xmin * 1e4
    drift = np.polyfit(np.log(x[bottom]), np.log(R[bottom]), 1)[0]
    ev.update(c1=float(R.min()), c2=float(R.max()), log_slope_bottom=float(drift))
    if R.max() / R.min() <= 1e4 and abs(drift) < 0.02:
        return CheckResult(HOLDS, NUMERIC, ev, "density sandwiched between multiples of a stable density")
    return CheckResult(UNKNOWN, NUMERIC, ev, "no stable envelope found on the grid")


def _type_alpha_beta(pos: RadialDensity, alpha=None, beta=None, xmin: float = 1e-12) -> CheckResult:
    x = np.logspace(math.log10(xmin), 0.0, 12 * int(round(-math.log10(xmin))) + 1)[:-1]
    rho = pos(x)
    if np.any(rho <= 0):
        return CheckResult(UNKNOWN, NUMERIC, {}, "density vanishes somewhere on (0, 1]")
    fitted = alpha is None or beta is None
    if fitted:
        idx = -np.gradient(np.log(rho), np.log(x)) - 1.0
        a_hat, b_hat = float(idx.min()), float(idx.max())
        if b_hat - a_hat < 0.02:
            a_hat, b_hat = a_hat - 0.01, b_hat + 0.01
        alpha = a_hat if alpha is None else alpha
        beta = b_hat if beta is None else beta
    ev = {"alpha": alpha, "beta": beta}
    lo, hi = (INDEX_MARGIN, 1.0 - INDEX_MARGIN) if fitted else (0.0, 1.0)
    if not (lo <= alpha < beta <= hi and 0.0 < alpha and beta < 1.0):
        return CheckResult(UNKNOWN, NUMERIC, ev, "indices not in 0 < alpha < beta < 1")
    c = max(float(np.max(1.0 / (rho * x ** (1.0 + alpha)))), float(np.max(rho * x ** (1.0 + beta))), 1.0 + 1e-12)
    ev["c"] = c
    if c > 1e8:
        return CheckResult(UNKNOWN, NUMERIC, ev, "envelope constant too large to be meaningful")
    return CheckResult(
        HOLDS, NUMERIC, ev, "type-(alpha, beta) envelope holds on (0, 1]; (H) is open for this class"
    )


def subordinator_diagnostics(t: LevyTriplet, special: bool = False, alpha=None, beta=None) -> SubordinatorReport:
    """Subordinator structure of a 1-D triplet and the rules that apply to it."""
    _require_dim1(t, "subordinator_diagnostics")
    pos, neg, apos, aneg = _rays(t)
    na = CheckResult(UNKNOWN, EXACT, {}, "not a subordinator")
    one_sided = _q_is_zero(t) and neg.is_zero and not aneg and not t.mu.stables()
    var = t.mu.variation_integral() if one_sided else math.inf
    if not one_sided or not math.isfinite(var):
        return SubordinatorReport(False, None, na, na, na, na)
    d = float(t.physical_drift()[0])
    tol = 1e-12 * (1.0 + abs(float(t.a[0])))
    if d < -tol:
        return SubordinatorReport(False, d, na, na, na, na)
    if d <= tol:
        d = 0.0
    if d > 0:
        nec = CheckResult(FAILS, EXACT, {"drift": d}, "positive drift: (H) fails")
    else:
        nec = CheckResult(HOLDS, EXACT, {"drift": d}, "zero drift: necessary condition met")
    if special:
        sp = CheckResult(HOLDS if d == 0 else FAILS, EXACT, {"drift": d}, "special subordinator asserted")
    else:
        sp = CheckResult(UNKNOWN, EXACT, {}, "isSpecialSubordinator not asserted")
    if d == 0 and not pos.is_zero:
        qs = _quasi_stable(pos)
    else:
        qs = CheckResult(UNKNOWN, EXACT, {}, "needs zero drift and a density")
    tab = _type_alpha_beta(pos, alpha, beta) if d == 0 and not pos.is_zero else CheckResult(UNKNOWN, EXACT, {}, "needs a pure-jump density")
    return SubordinatorReport(True, d, nec, sp, qs, tab)


# ------------------------------------------------------------ decompositions


def pairwise_rules(
    t1: LevyTriplet,
    v1: Verdict,
    t2: LevyTriplet,
    v2: Verdict,
    kind: str = "sum",
    *,
    resolvent_densities: bool = False,
    energy_comparison: bool = False,
    n_samples: int = 200,
    seed: int = 0,
) -> CheckResult:
    """Verdict for ``X_1 + X_2`` (``kind='sum'``) or ``(X_1, X_2)`` (``kind='product'``).

    ``resolvent_densities`` asserts resolvent densities for ``X_1`` and for the
    sum, ``energy_comparison`` asserts that finite 1-energy for the sum implies
    finite 1-energy for ``X_1``.
    """
    cp1 = is_compound_poisson(t1).status == HOLDS
    cp2 = is_compound_poisson(t2).status == HOLDS
    if v1.status == HOLDS and cp2 or v2.status == HOLDS and cp1:
        tag = "compound Poisson summand" if kind == "sum" else "product with compound Poisson"
        return CheckResult(HOLDS, EXACT, {"rule": tag}, f"{tag}: one part satisfies (H), the other is compound Poisson")
    s1, s2 = condition_S(t1), condition_S(t2)
    if s1.status == HOLDS and s2.status == HOLDS:
        tag = "sum under condition (S)" if kind == "sum" else "product under condition (S)"
        cert = EXACT if s1.certainty == s2.certainty == EXACT else NUMERIC
        return CheckResult(HOLDS, cert, {"rule": tag}, f"{tag}: both parts satisfy (S)")
    if kind == "sum" and v1.status == HOLDS and resolvent_densities and energy_comparison:
        if t1.dim != t2.dim:
            raise ValueError("sum needs equal dimensions")
        rng = np.random.default_rng(seed)
        Z = rng.normal(size=(n_samples, t1.dim)) * np.exp(rng.uniform(-2, 8, size=(n_samples, 1)) * math.log(10))
        p1, p2 = psi_values(t1, Z), psi_values(t2, Z)
        r = np.abs(p2.imag) / (1.0 + p1.real + p2.real)
        c_hat = float(r.max())
        if c_hat == 0.0 or _is_symmetric(t2):
            return CheckResult(HOLDS, EXACT, {"c_hat": 0.0}, "Im psi_2 = 0: imaginary-part comparison is trivial")
        radii = np.linalg.norm(Z, axis=1)
        top = r[radii >= np.quantile(radii, 0.9)].max()
        mid = r[(radii >= np.quantile(radii, 0.7)) & (radii < np.quantile(radii, 0.9))].max()
        if top <= (1.0 + MARGIN) * mid + 1e-12:
            return CheckResult(HOLDS, NUMERIC, {"c_hat": c_hat}, "imaginary part of psi_2 controlled by 1 + Re psi_1 + Re psi_2")
        return CheckResult(UNKNOWN, NUMERIC, {"c_hat": c_hat}, "imaginary-part ratio grows")
    return CheckResult(UNKNOWN, EXACT, {}, "no pairwise rule applies")


@dataclass
class Decomposition:
    """A user-declared structure of the process.

    ``kind`` is ``"sum"`` (``X = X_1 + X_2``), ``"product"``
    (``X = (X_1, X_2)``) or ``"subordination"`` (``X = Y`` time-changed by the
    subordinator ``parts[1]``).  Sums and products are verified through the
    exponent identity; subordination is taken as asserted.
    """

    kind: str
    parts: tuple
    resolvent_densities: bool = False
    energy_comparison: bool = False


@dataclass
class DecideOptions:
    rank_threshold: float = DEFAULT_RANK_THRESHOLD
    decomposition: Decomposition | None = None
    numeric_rules: bool = True


def _as_spec(x) -> ProcessSpec:
    return x if isinstance(x, ProcessSpec) else ProcessSpec(x)


def _check_identity(t: LevyTriplet, composed: LevyTriplet, n: int = 20, seed: int = 1) -> float:
    rng = np.random.default_rng(seed)
    Z = rng.normal(size=(n, t.dim)) * rng.choice([0.1, 1.0, 10.0], size=(n, 1))
    a, b = psi_values(t, Z), psi_values(composed, Z)
    return float(np.max(np.abs(a - b) / (1.0 + np.abs(a))))


def decide_H(spec, options: DecideOptions | None = None) -> Verdict:
    """Decide (H) for a process spec by running the rules in priority order."""
    spec = _as_spec(spec)
    opts = options or DecideOptions()
    t = spec.triplet
    trace = []

    def record(rule, theorem, res):
        trace.append(TraceEntry(rule, theorem, res))
        return res

    def done(status):
        return Verdict(status, trace)

    # 1. compound Poisson
    r = record("rule 1: compound Poisson", "compound Poisson processes", is_compound_poisson(t))
    if r.status == HOLDS:
        return done(HOLDS)

    # 2. full-rank Gaussian part
    s = spectral_decompose(t.Q, opts.rank_threshold)
    if s.rank == t.dim:
        record("rule 2: non-degenerate Q", "full-rank Gaussian part", CheckResult(HOLDS, EXACT, {"rank": s.rank}))
        return done(HOLDS)
    record("rule 2: non-degenerate Q", "full-rank Gaussian part", CheckResult(UNKNOWN, EXACT, {"rank": s.rank}, "Q is degenerate"))

    # 3. finite off-range mass: (H) <=> (S)
    r = condition_S(t, opts.rank_threshold)
    r = record("rule 3: condition (S)", "finite off-range mass equivalence", r)
    if r.status in (HOLDS, FAILS):
        return done(r.status)

    sub = None
    if t.dim == 1:
        sub = subordinator_diagnostics(t, special=spec.flag("isSpecialSubordinator"))
    # 4. subordinators
    if sub is not None and sub.is_subordinator:
        record("rule 4: subordinator drift", "subordinator drift necessity", sub.drift_necessity)
        if sub.drift_necessity.status == FAILS:
            return done(FAILS)
        if sub.special.status != UNKNOWN:
            record("rule 4: special subordinator", "special subordinator equivalence", sub.special)
            return done(sub.special.status)

    # 5. drift of the projection onto the null space of Q
    r = _projection_drift_rule(t, s)
    record("rule 5: projection drift", "projection drift necessity", r)
    if r.status == FAILS:
        return done(FAILS)

    if opts.numeric_rules:
        # 6. one-dimensional sufficient criteria
        if t.dim == 1:
            checks = [
                ("rule 6: dominance", "one-dimensional dominance test", lambda: one_dim_dominance(t)),
                ("rule 6: small jumps (log)", "small-jump liminf", lambda: small_jump_liminf(t, "log")),
                ("rule 6: small jumps (log log)", "small-jump liminf, log-log weight", lambda: small_jump_liminf(t, "logLog")),
                ("rule 6: exponent growth", "Re psi growth liminf", lambda: exponent_growth_liminf(t, "reOverZlog")),
                (
                    "rule 6: exponent modulus growth",
                    "|psi| growth liminf",
                    lambda: exponent_growth_liminf(t, "absOverZlogPow", resolvent_densities=spec.flag("hasResolventDensities")),
                ),
            ]
            for rule, thm, fn in checks:
                r = record(rule, thm, _guard(fn))
                if r.status == HOLDS:
                    return done(HOLDS)
            if sub is not None and sub.is_subordinator:
                r = record("rule 6: quasi-stable subordinator", "locally quasi-stable subordinators", sub.quasi_stable)
                if r.status == HOLDS:
                    return done(HOLDS)
                record("classification: type-(alpha, beta)", "type-(alpha, beta) subordinators (open case)", sub.type_alpha_beta)

        # 7. Kanda-Forst / Rao classes, gated on assertions
        bcd = spec.flag("hasBoundedContinuousTransitionDensities")
        rd = spec.flag("hasResolventDensities")
        if bcd or rd:
            kf = record("rule 7: Kanda-Forst ratio", "Kanda-Forst condition", _guard(lambda: kf_ratio_profile(t)))
            if kf.classification == "bounded" and (bcd or rd):
                return done(HOLDS)
            if kf.classification == "logGrowth" and rd:
                record("rule 7: Rao growth", "Rao growth condition", CheckResult(HOLDS, NUMERIC, kf.evidence, "f(x) = 1 + log x"))
                return done(HOLDS)
        else:
            record("rule 7: Kanda-Forst / Rao", "Kanda-Forst condition", CheckResult(UNKNOWN, EXACT, {}, "density assertions not set"))

    # 8. declared decompositions
    if opts.decomposition is not None:
        r = record("rule 8: decomposition", opts.decomposition.kind, _guard(lambda: _decomposition_rule(t, opts)))
        if r.status in (HOLDS, FAILS):
            return done(r.status)

    # 9.
    record("rule 9: no rule applies", "none", CheckResult(UNKNOWN, EXACT, {}, "outside the hypotheses of every implemented rule"))
    return done(UNKNOWN)


def _guard(fn) -> CheckResult:
    try:
        return fn()
    except (QuadratureError, NotProjectableError, FloatingPointError, ValueError) as e:
        return CheckResult(UNKNOWN, NUMERIC, {}, f"check failed: {e}")


def _projection_drift_rule(t: LevyTriplet, s) -> CheckResult:
    if s.rank == 0:
        y = t
        ev = {"projection": "identity"}
    else:
        try:
            pr = project_triplet(t, s.null_basis())
        except NotProjectableError as e:
            return CheckResult(UNKNOWN, EXACT, {}, f"projection not representable: {e}")
        y = pr.projected_triplet
        ev = {"projection": "null space of Q", "dropped_mass": pr.dropped_mass}
    var = y.mu.variation_integral()
    ev["variation_integral"] = var
    if not math.isfinite(var):
        return CheckResult(UNKNOWN, EXACT, ev, "projected jumps have infinite variation")
    drift = y.physical_drift()
    ev["drift"] = drift.tolist()
    if float(np.linalg.norm(drift)) > 1e-9 * (1.0 + float(np.linalg.norm(y.a))):
        return CheckResult(FAILS, EXACT, ev, "projection has finite-variation jumps and nonzero drift")
    return CheckResult(UNKNOWN, EXACT, ev, "projected drift is zero")


def _decomposition_rule(t: LevyTriplet, opts: DecideOptions) -> CheckResult:
    dec = opts.decomposition
    p1, p2 = (_as_spec(p) for p in dec.parts)
    sub_opts = DecideOptions(opts.rank_threshold, None, opts.numeric_rules)
    v1, v2 = decide_H(p1, sub_opts), decide_H(p2, sub_opts)
    ev = {"part_verdicts": [v1.status, v2.status]}
    if dec.kind in ("sum", "product"):
        composed = (sum_triplets if dec.kind == "sum" else product_embed)(p1.triplet, p2.triplet)
        if composed.dim != t.dim:
            return CheckResult(UNKNOWN, EXACT, ev, "declared parts have the wrong dimension")
        dev = _check_identity(t, composed)
        ev["identity_deviation"] = dev
        if dev > 1e-8:
            return CheckResult(UNKNOWN, NUMERIC, ev, "declared decomposition does not reproduce the exponent")
        r = pairwise_rules(
            p1.triplet,
            v1,
            p2.triplet,
            v2,
            dec.kind,
            resolvent_densities=dec.resolvent_densities,
            energy_comparison=dec.energy_comparison,
        )
        r.evidence.update(ev)
        return r
    if dec.kind == "subordination":
        tau = p2.triplet
        if tau.dim != 1:
            return CheckResult(UNKNOWN, EXACT, ev, "time change must be one-dimensional")
        sd = subordinator_diagnostics(tau, special=p2.flag("isSpecialSubordinator"))
        if not sd.is_subordinator:
            return CheckResult(UNKNOWN, EXACT, ev, "time change is not a subordinator")
        ev["tau_drift"] = sd.drift
        if v2.status == HOLDS:
            return CheckResult(HOLDS, EXACT, ev, "subordinator satisfying (H) (Glover-Rao)")
        if sd.drift > 0 and v1.status in (HOLDS, FAILS):
            return CheckResult(v1.status, EXACT, ev, "positive-drift time change preserves (H) in both directions")
        return CheckResult(UNKNOWN, EXACT, ev, "no subordination rule applies")
    raise ValueError(f"unknown decomposition kind {dec.kind!r}")
