"""Acceptance criteria 1-9.  Each test logs one PASS/FAIL line, shown in the terminal summary."""
import json
import math
import time

import numpy as np
import pytest
from scipy import integrate, stats

from levyhunt import Atoms, Hyperplane, LevyMeasure, LevyTriplet, PowerTerm, ProcessSpec, SimPlan
from levyhunt import (
    decide_H,
    empirical_cf,
    energy_limit,
    hitting_estimate,
    kesten_point_polarity,
    kf_ratio_profile,
    lambda_energy,
    load_spec,
    product_bound_check,
    project_triplet,
    psi_values,
    simulate_paths,
    truncate_big_jumps,
)
from levyhunt.cli import main

from helpers import DRIFT_DIAGONAL, line, random_atoms, random_line, random_psd, random_triplet, random_unit, sym_stable_1d

BM = LevyTriplet.brownian(1)
UNIT = Atoms([[0.0]], [1.0])


def report(log, n, ok, detail):
    msg = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    log.append(msg)
    print(msg)
    assert ok, msg


# ---------------------------------------------------------------- 1


def test_criterion_1_diagonal_example(tmp_path, acceptance_log):
    src = tmp_path / "diag.json"
    src.write_text(json.dumps({"dim": 2, "a": [1, -1], "Q": [[2, 2], [2, 2]], "mu": []}))
    t0 = time.perf_counter()

    def check(path):
        out = tmp_path / "verdict.json"
        assert main(["check", "-i", str(path), "-o", str(out)]) == 0
        return json.loads(out.read_text())

    v = check(src)
    ok = v["status"] == "fails" and any("condition (S)" in e["rule"] and e["status"] == "fails" for e in v["trace"])
    axes = []
    for k, e in enumerate(("1,0", "0,1")):
        p = tmp_path / f"axis{k}.json"
        assert main(["project", "-i", str(src), "-o", str(p), "--subspace", e]) == 0
        va = check(p)
        axes.append(va["status"])
        ok &= va["status"] == "holds" and any(e["theorem"] == "full-rank Gaussian part" and e["status"] == "holds" for e in va["trace"])
    r = 1 / math.sqrt(2)
    p = tmp_path / "anti.json"
    assert main(["project", "-i", str(src), "-o", str(p), "--subspace", f"{r},{-r}"]) == 0
    anti = load_spec(p).triplet
    pure_drift = np.all(anti.Q == 0) and len(anti.mu) == 0 and np.any(anti.a != 0)
    vd = check(p)
    elapsed = time.perf_counter() - t0
    ok &= pure_drift and vd["status"] == "fails" and elapsed < 1.0
    report(
        acceptance_log,
        1,
        ok,
        f"diagonal={v['status']} axes={axes} anti-diagonal pure drift={pure_drift} -> {vd['status']} ({elapsed:.2f}s < 1s)",
    )


# ---------------------------------------------------------------- 2


def test_criterion_2_projection_oracle(acceptance_log):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 5))
        comps = [random_atoms(rng, n)] + [random_line(rng, n) for _ in range(int(rng.integers(1, 3)))]
        t = LevyTriplet(rng.normal(size=n), random_psd(rng, n, int(rng.integers(0, n + 1))), comps)
        k = int(rng.integers(1, n))
        V = np.linalg.qr(rng.normal(size=(n, k)))[0]
        pt = project_triplet(t, V).projected_triplet
        w = rng.normal(size=(50, k)) * np.exp(rng.uniform(-2, 2, (50, 1)))
        dev = np.abs(psi_values(pt, w) - psi_values(t, w @ V.T))
        worst = max(worst, float(dev.max()))
    elapsed = time.perf_counter() - t0
    report(acceptance_log, 2, worst <= 1e-8 and elapsed < 30, f"max |psi_proj - psi| = {worst:.2e} <= 1e-8 ({elapsed:.1f}s < 30s)")


# ---------------------------------------------------------------- 3


def test_criterion_3_kesten(acceptance_log):
    t0 = time.perf_counter()
    bm = kesten_point_polarity(BM)
    half = kesten_point_polarity(sym_stable_1d(0.5))
    three_halves = kesten_point_polarity(sym_stable_1d(1.5))
    elapsed = time.perf_counter() - t0
    err = abs(bm.evidence["value"] - math.pi / math.sqrt(2))
    ok = err <= 1e-6 and bm.notes == "integral converges" and half.notes == "integral diverges"
    ok &= three_halves.notes == "integral converges" and elapsed < 5
    report(
        acceptance_log,
        3,
        ok,
        f"BM |I - pi/sqrt2| = {err:.1e}; 0.5-stable {half.notes}; 1.5-stable {three_halves.notes} ({elapsed:.2f}s < 5s)",
    )


# ---------------------------------------------------------------- 4


def test_criterion_4_energy_closed_forms(acceptance_log):
    t0 = time.perf_counter()
    ladder = [1.0, 4.0, 16.0, 64.0]
    bm = energy_limit(BM, UNIT, ladder)
    drift = energy_limit(LevyTriplet([1.0]), UNIT, ladder)
    elapsed = time.perf_counter() - t0
    e_bm = max(abs(v / (math.pi * math.sqrt(2 / lam)) - 1) for lam, v in zip(ladder, bm.values))
    e_dr = max(abs(v - math.pi) for v in drift.values)
    ok = e_bm <= 1e-6 and e_dr <= 1e-6 and bm.trend == "toZero" and drift.trend == "positive" and elapsed < 10
    report(
        acceptance_log,
        4,
        ok,
        f"BM rel err {e_bm:.1e} ({bm.trend}); drift abs err {e_dr:.1e} ({drift.trend}) ({elapsed:.2f}s < 10s)",
    )


# ---------------------------------------------------------------- 5


def test_criterion_5_truncation_identity(acceptance_log):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 4))
        mu = random_atoms(rng, n, k=int(rng.integers(2, 6)), scale=1.0)
        keep = rng.random(mu.weights.size) < 0.5
        keep[rng.integers(mu.weights.size)] = True
        w1 = mu.weights[keep] * rng.uniform(0.0, 1.0, keep.sum())
        mu1 = Atoms(mu.locations[keep], w1)
        t = LevyTriplet(rng.normal(size=n), random_psd(rng, n, int(rng.integers(0, n + 1))), [mu])
        tp = truncate_big_jumps(t, LevyMeasure([mu1]))
        z = rng.normal(size=(20, n)) * 3
        direct = (mu1.weights * (1 - np.exp(1j * z @ mu1.locations.T))).sum(axis=1)
        worst = max(worst, float(np.abs(psi_values(t, z) - psi_values(tp, z) - direct).max()))
    report(acceptance_log, 5, worst <= 1e-12, f"max residual {worst:.1e} <= 1e-12 over 100 cases x 20 z")


# ---------------------------------------------------------------- 6


def test_criterion_6_nondegenerate_bound(acceptance_log):
    rng = np.random.default_rng(6)
    violations, unbounded = 0, 0
    for _ in range(50):
        n = int(rng.integers(1, 5))
        Q = random_psd(rng, n, n) + 0.05 * np.eye(n)
        t = LevyTriplet(rng.normal(size=n), Q, [random_atoms(rng, n)])
        lmin = np.linalg.eigvalsh(Q)[0]
        z = rng.normal(size=(100, n)) * np.exp(rng.uniform(-3, 4, (100, 1)))
        bound = 0.5 * lmin * (z * z).sum(axis=1)
        violations += int((psi_values(t, z).real < bound * (1 - 1e-12)).sum())
        unbounded += kf_ratio_profile(t).classification != "bounded"
    report(acceptance_log, 6, violations == 0 and unbounded == 0, f"{violations} violations of Re psi >= lmin|z|^2/2; {unbounded} profiles not bounded")


# ---------------------------------------------------------------- 7


def test_criterion_7_product_energy_inequality(acceptance_log):
    rng = np.random.default_rng(7)
    worst, count = 0.0, 0
    for _ in range(20):
        n1, n2 = rng.integers(1, 4, 2)
        t1, t2 = random_triplet(rng, int(n1)), random_triplet(rng, int(n2))
        scale = np.exp(rng.uniform(-3, 5, (50, 1)))
        phi = psi_values(t1, rng.normal(size=(50, n1)) * scale)
        psi = psi_values(t2, rng.normal(size=(50, n2)) * scale[::-1])
        lam = 1 + np.exp(rng.uniform(-5, 5, 50))
        for p, s, lm in zip(phi, psi, lam):
            r = product_bound_check([p], [s], float(lm))
            worst = max(worst, r.evidence["max_violation"])
            count += r.evidence["violations"]
    report(acceptance_log, 7, count == 0, f"{count} violations above 1e-12 in 1000 triples (max excess {worst:.1e})")


# ---------------------------------------------------------------- 8


def test_criterion_8_monte_carlo(acceptance_log):
    t0 = time.perf_counter()
    bm = simulate_paths(BM, SimPlan(paths=100_000, step_count=100, seed=0))
    p = hitting_estimate(bm, Hyperplane((1.0,), 0.5)).probability
    oracle = 2 * stats.norm.sf(0.5)
    uni = hitting_estimate(simulate_paths(LevyTriplet([-1.0]), SimPlan(paths=1000, seed=0)), Hyperplane((1.0,), 0.5))
    rng = np.random.default_rng(8)
    misses = []
    cp = LevyTriplet([0.0], None, [Atoms([[1.0], [-0.5]], [1.0, 2.0])])
    for name, t, ens in (
        ("BM", BM, bm),
        ("compound Poisson", cp, simulate_paths(cp, SimPlan(paths=100_000, step_count=10, seed=0))),
        ("diagonal example", DRIFT_DIAGONAL, simulate_paths(DRIFT_DIAGONAL, SimPlan(paths=100_000, step_count=10, seed=0))),
    ):
        z = rng.normal(size=(10, t.dim)) * 1.5
        vals, se = empirical_cf(ens, z)
        exact = np.exp(-psi_values(t, z))
        bad = (np.abs(vals.real - exact.real) > 3 * se.real + 1e-12) | (np.abs(vals.imag - exact.imag) > 3 * se.imag + 1e-12)
        if bad.any():
            misses.append(f"{name}:{int(bad.sum())}")
    elapsed = time.perf_counter() - t0
    ok = abs(p - 0.6171) <= 0.02 and uni.probability == 1.0 and not misses and elapsed < 60
    report(
        acceptance_log,
        8,
        ok,
        f"BM hit {p:.4f} vs {oracle:.4f}; uniform motion {uni.probability}; CF misses {misses or 'none'} ({elapsed:.1f}s < 60s)",
    )


# ---------------------------------------------------------------- 9


def _small_mean(mu: Atoms) -> np.ndarray:
    inside = np.linalg.norm(mu.locations, axis=1) < 1
    return (mu.weights[inside, None] * mu.locations[inside]).sum(axis=0)


def _fv_line_mean(lin) -> float:
    """int_0^1 r (rho_+ - rho_-) dr for a finite-variation line, by direct quadrature."""

    def side(dens):
        tot = 0.0
        for t in dens.terms:
            hi = min(t.hi, 1.0)
            if hi > t.lo:
                tot += t.coef * integrate.quad(lambda r: math.exp(-t.damping * r), t.lo, hi, weight="alg", wvar=(-t.alpha, 0.0))[0]
        return tot

    return side(lin.positive) - side(lin.negative)


def _fv_line(rng, direction):
    terms = lambda: [PowerTerm(float(rng.uniform(0.2, 1.5)), float(rng.uniform(0.1, 0.9)))]
    return line(direction, terms(), terms() if rng.random() < 0.5 else [])


def _degenerate_basis(rng, n, r):
    O = np.linalg.qr(rng.normal(size=(n, n)))[0]
    R, N = O[:, :r], O[:, r:]
    Q = R @ np.diag(rng.uniform(0.5, 2.0, r)) @ R.T if r else np.zeros((n, n))
    return Q, R, N


def corpus(rng):
    """(spec, expected) pairs; expected verdicts follow from the construction alone."""
    out = []
    for _ in range(100):  # compound Poisson
        n = int(rng.integers(1, 5))
        mu = random_atoms(rng, n, scale=1.0)
        out.append(("compound Poisson", ProcessSpec(LevyTriplet(-_small_mean(mu), None, [mu])), "holds"))
    for _ in range(100):  # full-rank Gaussian part
        n = int(rng.integers(1, 5))
        t = LevyTriplet(rng.normal(size=n), random_psd(rng, n, n) + 0.01 * np.eye(n), [random_atoms(rng, n), random_line(rng, n)])
        out.append(("full rank", ProcessSpec(t), "holds"))
    for i in range(100):  # degenerate Q, finite off-range mass
        n = int(rng.integers(2, 5))
        r = int(rng.integers(0, n))
        Q, R, N = _degenerate_basis(rng, n, r)
        mu = random_atoms(rng, n, scale=1.0)
        comps = [mu]
        if r:
            comps.append(line(R[:, 0], [PowerTerm(1.0, float(rng.uniform(0.5, 1.9)))]))
        a = -_small_mean(mu) + (R @ rng.normal(size=r) if r else 0.0)
        fails = i % 2 == 1
        if fails:
            a = a + N @ (random_unit(rng, n - r) * rng.uniform(0.2, 2.0))
        out.append(("condition (S)", ProcessSpec(LevyTriplet(a, Q, comps)), "fails" if fails else "holds"))
    for i in range(100):  # one-dimensional subordinators
        lin = _fv_line(rng, [1.0])
        lin = line([1.0], lin.positive.terms)
        atoms = Atoms(rng.uniform(0.1, 3.0, (2, 1)), rng.uniform(0.1, 1.0, 2))
        fails = i % 2 == 0
        d = float(rng.uniform(0.05, 2.0)) if fails else 0.0
        a = [-d - _fv_line_mean(lin) - float(_small_mean(atoms)[0])]
        assertions = {} if fails else {"isSpecialSubordinator": True}
        out.append(("subordinator", ProcessSpec(LevyTriplet(a, None, [atoms, lin]), assertions), "fails" if fails else "holds"))
    for _ in range(100):  # finite-variation null-direction jumps with null drift
        n = int(rng.integers(2, 5))
        r = int(rng.integers(0, n))
        Q, R, N = _degenerate_basis(rng, n, r)
        u = N @ random_unit(rng, n - r)
        lin = _fv_line(rng, u)
        mu = random_atoms(rng, n, scale=1.0)
        a = -_small_mean(mu) - _fv_line_mean(lin) * u + N @ (random_unit(rng, n - r) * rng.uniform(0.2, 2.0))
        if r:
            a = a + R @ rng.normal(size=r)
        out.append(("projection drift", ProcessSpec(LevyTriplet(a, Q, [mu, lin])), "fails"))
    return out


def outside_corpus(rng, count=100):
    """Degenerate Q with infinite-variation jumps in a null direction: no rule applies."""
    out = []
    for _ in range(count):
        n = int(rng.integers(2, 5))
        r = int(rng.integers(0, n))
        Q, R, N = _degenerate_basis(rng, n, r)
        u = N @ random_unit(rng, n - r)
        al = float(rng.uniform(1.0, 1.95))
        lin = line(u, [PowerTerm(float(rng.uniform(0.2, 1.5)), al)], [PowerTerm(float(rng.uniform(0.0, 1.5)), al)])
        out.append(ProcessSpec(LevyTriplet(rng.normal(size=n), Q, [random_atoms(rng, n), lin])))
    return out


def test_criterion_9_soundness(acceptance_log):
    rng = np.random.default_rng(9)
    wrong, decided, by_cat = [], 0, {}
    for cat, spec, expected in corpus(rng):
        v = decide_H(spec)
        if v.status != "unknown":
            decided += 1
            if v.status != expected:
                wrong.append((cat, v.status, expected))
        by_cat.setdefault(cat, [0, 0])
        by_cat[cat][0] += v.status == expected
        by_cat[cat][1] += 1
    not_unknown = sum(decide_H(s).status != "unknown" for s in outside_corpus(rng))
    coverage = ", ".join(f"{k} {a}/{b}" for k, (a, b) in by_cat.items())
    report(
        acceptance_log,
        9,
        not wrong and not_unknown == 0,
        f"{len(wrong)} incorrect of {decided} decided (500 specs; {coverage}); {not_unknown}/100 outside specs not unknown",
    )
