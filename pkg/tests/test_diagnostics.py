import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyhunt import Atoms, IsotropicStable, LevyTriplet, LineDensity, PowerTerm, ProcessSpec, RadialDensity
from levyhunt import (
    DecideOptions,
    Decomposition,
    condition_S,
    decide_H,
    exponent_growth_liminf,
    is_compound_poisson,
    kesten_point_polarity,
    kf_ratio_profile,
    one_dim_dominance,
    pairwise_rules,
    small_jump_liminf,
    subordinator_diagnostics,
)

from helpers import DRIFT_DIAGONAL, line, random_atoms, random_psd, sym_stable_1d


def subordinator(terms, drift=0.0):
    """1-D subordinator with density ``terms`` on (0, inf) and physical drift ``drift``."""
    mu = [line([1.0], terms)]
    t = LevyTriplet([0.0], None, mu)
    return LevyTriplet([-drift - t.mu.small_jump_mean(1)[0]], None, mu)


def one_sided_stable(alpha, coef=1.0):
    return LevyTriplet([0.0], None, [line([1.0], [PowerTerm(coef, alpha)])])


# ------------------------------------------------------------ checkers


def test_compound_poisson():
    assert is_compound_poisson(LevyTriplet([0.0], None, [Atoms([[2.0]], [1.0])])).status == "holds"
    # atom inside the unit ball: a = -0.5 cancels the compensator
    assert is_compound_poisson(LevyTriplet([-0.5], None, [Atoms([[0.5]], [1.0])])).status == "holds"
    assert is_compound_poisson(LevyTriplet([0.0], None, [Atoms([[0.5]], [1.0])])).status == "fails"
    assert is_compound_poisson(LevyTriplet.brownian(1)).status == "fails"
    assert is_compound_poisson(sym_stable_1d(0.5)).status == "fails"


def test_kesten():
    r = kesten_point_polarity(LevyTriplet.brownian(1))
    assert r.status == "holds" and r.certainty == "numeric"
    np.testing.assert_allclose(r.evidence["value"], math.pi / math.sqrt(2), rtol=1e-6)
    assert kesten_point_polarity(sym_stable_1d(0.5)).status == "fails"
    assert kesten_point_polarity(sym_stable_1d(1.5)).status == "holds"
    assert kesten_point_polarity(LevyTriplet([0.0], None, [Atoms([[1.0]], [1.0])])).status == "unknown"
    with pytest.raises(ValueError):
        kesten_point_polarity(LevyTriplet.brownian(2))


def test_kf_ratio_profile():
    r = kf_ratio_profile(sym_stable_1d(0.7))
    assert r.classification == "bounded" and r.certainty == "exact" and r.evidence["M_hat"] == 0.0
    assert kf_ratio_profile(LevyTriplet([3.0, 1.0], np.eye(2))).classification == "bounded"
    assert kf_ratio_profile(LevyTriplet([-1.0])).classification == "unbounded"
    assert kf_ratio_profile(DRIFT_DIAGONAL).classification == "unbounded"
    stable_drift = LevyTriplet([1.0], None, sym_stable_1d(1.5).mu)
    assert kf_ratio_profile(stable_drift).classification == "bounded"
    # one-sided index-1 density: Im psi ~ z log z against Re psi ~ z
    assert kf_ratio_profile(one_sided_stable(1.0)).classification == "logGrowth"


def test_condition_S():
    r = condition_S(DRIFT_DIAGONAL)
    assert r.status == "fails" and r.certainty == "exact"
    assert condition_S(LevyTriplet([1.0, 1.0], DRIFT_DIAGONAL.Q)).status == "holds"
    # off-range atom at (0.5, -0.5) inside the unit ball compensates the drift
    t = LevyTriplet([-0.5, 0.5], DRIFT_DIAGONAL.Q, [Atoms([[0.5, -0.5]], [1.0])])
    assert condition_S(t).status == "holds"
    inf_off = LevyTriplet([0.0, 0.0], DRIFT_DIAGONAL.Q, [line(np.array([1.0, -1.0]) / math.sqrt(2), [PowerTerm(1, 0.5)])])
    assert condition_S(inf_off).status == "unknown"


def test_small_jump_liminf():
    assert small_jump_liminf(LevyTriplet([0.0], None, [line([1.0], [PowerTerm(1, 1.2)])])).status == "holds"
    assert small_jump_liminf(LevyTriplet([0.0], None, [line([1.0], [PowerTerm(1, 0.5)])])).status == "unknown"
    assert small_jump_liminf(sym_stable_1d(1.0), "logLog").status == "holds"
    assert small_jump_liminf(LevyTriplet([0.0], None, [Atoms([[0.1]], [1.0])])).status == "unknown"


def test_exponent_growth_liminf():
    assert exponent_growth_liminf(sym_stable_1d(1.5)).status == "holds"
    assert exponent_growth_liminf(LevyTriplet.brownian(1)).status == "holds"
    assert exponent_growth_liminf(LevyTriplet([0.0], None, [Atoms([[1.0]], [1.0])])).status == "unknown"
    gated = exponent_growth_liminf(one_sided_stable(1.0), "absOverZlogPow")
    assert gated.status == "unknown" and "hasResolventDensities" in gated.notes
    assert exponent_growth_liminf(one_sided_stable(1.0), "absOverZlogPow", gamma=0.5, resolvent_densities=True).status == "holds"


def test_dominance():
    two = lambda c_pos, a_pos, c_neg, a_neg: LevyTriplet([0.0], None, [line([1.0], [PowerTerm(c_pos, a_pos)], [PowerTerm(c_neg, a_neg)])])
    r = one_dim_dominance(two(1.0, 1.5, 0.5, 1.5))
    assert r.status == "holds" and 0.5 < r.evidence["k"] < 1.0
    assert one_dim_dominance(two(1.0, 1.5, 3.0, 1.2)).status == "holds"
    assert one_dim_dominance(two(1.0, 1.5, 1.0, 0.5)).status == "holds"
    assert one_dim_dominance(two(1.0, 1.5, 2.0, 1.5)).status == "unknown"
    assert one_dim_dominance(two(1.0, 1.2, 1.0, 1.5)).status == "unknown"
    # positive side of finite variation: hypothesis not met
    r = one_dim_dominance(two(1.0, 0.5, 0.5, 0.5))
    assert r.status == "unknown" and math.isfinite(r.evidence["variation_plus"])
    assert one_dim_dominance(LevyTriplet([0.0], [[1.0]], two(1, 1.5, 0.5, 1.5).mu)).status == "unknown"


def test_subordinator_diagnostics():
    s = subordinator([PowerTerm(1.0, 0.5)], drift=0.3)
    rep = subordinator_diagnostics(s)
    assert rep.is_subordinator and rep.drift == pytest.approx(0.3)
    assert rep.drift_necessity.status == "fails" and rep.drift_necessity.certainty == "exact"
    rep = subordinator_diagnostics(subordinator([PowerTerm(1.0, 0.5)]), special=True)
    assert rep.special.status == "holds" and rep.quasi_stable.status == "holds"
    gamma = subordinator([PowerTerm(1.0, 0.0, 0.0, math.inf, 1.0)])
    assert subordinator_diagnostics(gamma).quasi_stable.status == "unknown"
    mixed = subordinator([PowerTerm(1.0, 0.3, 0.0, 1.0), PowerTerm(1.0, 0.7, 0.0, 1.0)])
    tab = subordinator_diagnostics(mixed).type_alpha_beta
    assert tab.status == "holds" and 0.0 < tab.evidence["alpha"] < tab.evidence["beta"] < 1.0
    assert not subordinator_diagnostics(sym_stable_1d(0.5)).is_subordinator
    assert not subordinator_diagnostics(LevyTriplet([0.0], None, [line([1.0], [PowerTerm(1, 1.5)])])).is_subordinator


# ------------------------------------------------------------ verdicts


def rules_of(v):
    return [e.rule for e in v.trace]


def test_decide_diagonal_example():
    v = decide_H(DRIFT_DIAGONAL)
    assert v.status == "fails"
    assert v.deciding.rule.startswith("rule 3") and "condition (S)" in v.deciding.rule
    assert "condition (S)" in v.summary_markdown()


@pytest.mark.parametrize(
    "t,status,rule",
    [
        (LevyTriplet.brownian(1), "holds", "rule 2"),
        (LevyTriplet([0.0, 0.0], None, [Atoms([[1.0, 2.0]], [1.0])]), "holds", "rule 1"),
        (LevyTriplet([1.0]), "fails", "rule 3"),
        (subordinator([PowerTerm(1.0, 0.5)], drift=1.0), "fails", "rule 4"),
        (
            LevyTriplet([0.0, 1.0], np.diag([1.0, 0.0]), [line([0.0, 1.0], [PowerTerm(1.0, 0.5)])]),
            "fails",
            "rule 5",
        ),
        (sym_stable_1d(1.5), "holds", "rule 6"),
        (subordinator([PowerTerm(1.0, 0.5)]), "holds", "rule 6"),
    ],
)
def test_decide_rules(t, status, rule):
    v = decide_H(t)
    assert v.status == status
    assert v.deciding.rule.startswith(rule)


def test_decide_special_subordinator():
    spec = ProcessSpec(subordinator([PowerTerm(1.0, 0.0, 0.0, math.inf, 1.0)]), {"isSpecialSubordinator": True})
    v = decide_H(spec)
    assert v.status == "holds" and v.deciding.rule == "rule 4: special subordinator"


def test_decide_unknown_outside_rules():
    t = LevyTriplet([0.0, 1.0], np.diag([1.0, 0.0]), [line([0.0, 1.0], [PowerTerm(1.0, 1.5)], [PowerTerm(1.0, 1.5)])])
    v = decide_H(t)
    assert v.status == "unknown" and rules_of(v)[-1].startswith("rule 9")
    gamma = subordinator([PowerTerm(1.0, 0.0, 0.0, math.inf, 1.0)])
    assert decide_H(gamma).status == "unknown"


def test_decide_with_density_assertions():
    t = LevyTriplet([0.0, 1.0], np.diag([1.0, 0.0]), [line([0.0, 1.0], [PowerTerm(1.0, 1.5)], [PowerTerm(1.0, 1.5)])])
    v = decide_H(ProcessSpec(t, {"hasBoundedContinuousTransitionDensities": True}))
    assert v.status == "holds" and v.deciding.rule.startswith("rule 7")


def test_product_with_compound_poisson():
    from levyhunt import product_embed

    x1, x2 = sym_stable_1d(1.5), LevyTriplet([0.0], None, [Atoms([[2.0]], [1.0])])
    z = product_embed(x1, x2)
    assert decide_H(z).status == "unknown"
    v = decide_H(z, DecideOptions(decomposition=Decomposition("product", (x1, x2))))
    assert v.status == "holds" and v.deciding.rule.startswith("rule 8")
    wrong = Decomposition("product", (x2, x1))
    assert decide_H(z, DecideOptions(decomposition=wrong)).status == "unknown"


def test_sum_rules():
    cp = LevyTriplet([0.0], None, [Atoms([[1.0]], [2.0])])
    st15 = sym_stable_1d(1.5)
    v1, vcp = decide_H(st15), decide_H(cp)
    assert pairwise_rules(st15, v1, cp, vcp).status == "holds"
    drift = LevyTriplet([1.0])
    vd = decide_H(drift)
    assert pairwise_rules(st15, v1, drift, vd).status == "unknown"
    r = pairwise_rules(st15, v1, drift, vd, resolvent_densities=True, energy_comparison=True)
    assert r.status == "holds" and r.certainty == "numeric"
    # both parts under condition (S)
    b1 = LevyTriplet([0.0, 0.0], np.diag([1.0, 0.0]), [Atoms([[0.0, 2.0]], [1.0])])
    b2 = LevyTriplet([0.0, 0.0], np.diag([0.0, 1.0]))
    assert pairwise_rules(b1, decide_H(b1), b2, decide_H(b2)).status == "holds"


def test_subordination_rules():
    y = LevyTriplet([1.0])
    tau = subordinator([PowerTerm(1.0, 0.5)], drift=1.0)
    v = decide_H(y, DecideOptions(decomposition=Decomposition("subordination", (y, tau))))
    assert v.status == "fails"
    tau0 = ProcessSpec(subordinator([PowerTerm(1.0, 0.5)]), {"isSpecialSubordinator": True})
    dummy = LevyTriplet([0.0, 1.0], np.diag([1.0, 0.0]), [line([0.0, 1.0], [PowerTerm(1.0, 1.5)], [PowerTerm(1.0, 1.5)])])
    v = decide_H(dummy, DecideOptions(decomposition=Decomposition("subordination", (LevyTriplet.brownian(2), tau0))))
    assert v.status == "holds"


def test_verdict_serialisation():
    d = decide_H(DRIFT_DIAGONAL).to_dict()
    assert d["status"] == "fails"
    assert {"rule", "theorem", "status", "certainty", "evidence"} <= set(d["trace"][-1])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_assertions_only_add_holds(seed):
    """Setting density assertions may turn unknown into holds but never flips a decided verdict."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    rank = int(rng.integers(0, n))
    comps = [random_atoms(rng, n)]
    if rng.random() < 0.6:
        d = np.zeros(n)
        d[-1] = 1.0
        al = float(rng.uniform(0.2, 1.8))
        comps.append(line(d, [PowerTerm(1.0, al)], [PowerTerm(float(rng.uniform(0, 1)), al)]))
    Q = np.zeros((n, n))
    Q[:rank, :rank] = random_psd(rng, rank, rank) if rank else 0.0
    t = LevyTriplet(rng.normal(size=n) * (rng.random() < 0.7), Q, comps)
    base = decide_H(t, DecideOptions(numeric_rules=False))
    flagged = decide_H(
        ProcessSpec(t, {"hasResolventDensities": True, "hasBoundedContinuousTransitionDensities": True}),
        DecideOptions(numeric_rules=False),
    )
    if base.status != "unknown":
        assert flagged.status == base.status


def test_subordinator_round_off_drift_is_zero():
    lin = line([1.0], [PowerTerm(1.4302069259452113, 0.8366472317413223)])
    atoms = Atoms([[1.60308028], [0.6252371]], [0.62618992, 0.41507852])
    t = LevyTriplet([0.0], None, [atoms, lin])
    t = LevyTriplet(-t.mu.small_jump_mean(1), None, [atoms, lin])
    rep = subordinator_diagnostics(t, special=True)
    assert rep.drift == 0.0 and rep.special.status == "holds"
