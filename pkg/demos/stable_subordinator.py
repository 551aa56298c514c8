"""
Stable subordinators: drift decides.

A 1/2-stable subordinator with zero drift satisfies (H); adding any positive
drift breaks it.  The verdict trace shows which rule decided, and the
subordinator report shows the structure it found (drift, quasi-stable
envelope, type-(alpha, beta) envelope).

Run from the repository root: ``python3 demos/stable_subordinator.py``.
"""
import math

from levyhunt import LevyTriplet, LineDensity, PowerTerm, ProcessSpec, RadialDensity, decide_H
from levyhunt.diagnostics import subordinator_diagnostics


def subordinator(terms, d=0.0):
    """Density ``terms`` on (0, inf) with physical drift ``d``."""
    mu = [LineDensity([1.0], RadialDensity(terms))]
    m = LevyTriplet([0.0], None, mu).mu.small_jump_mean(1)[0]
    return LevyTriplet([-d - m], None, mu)


cases = {
    "1/2-stable, d=0": subordinator([PowerTerm(1.0, 0.5)]),
    "1/2-stable, d=0.2": subordinator([PowerTerm(1.0, 0.5)], 0.2),
    "mixed 0.3 and 0.7 near 0": subordinator([PowerTerm(1.0, 0.3, 0.0, 1.0), PowerTerm(1.0, 0.7, 0.0, 1.0)]),
    "gamma": subordinator([PowerTerm(1.0, 0.0, 0.0, math.inf, 1.0)]),
}
for name, t in cases.items():
    v = decide_H(t)
    rep = subordinator_diagnostics(t)
    print(f"{name}: (H) {v.status}", f"via {v.deciding.rule}" if v.deciding else "")
    print(f"    drift {rep.drift:.3g}; quasi-stable {rep.quasi_stable.status}; type-(alpha,beta) {rep.type_alpha_beta.status}",
          {k: round(x, 3) for k, x in rep.type_alpha_beta.evidence.items()})

# the gamma subordinator is special; asserting it lets the exact rule decide
v = decide_H(ProcessSpec(cases["gamma"], {"isSpecialSubordinator": True}))
print(f"\ngamma with isSpecialSubordinator: (H) {v.status} via {v.deciding.rule}")
