import math

import numpy as np
import pytest
from scipy import integrate

from levyhunt import Atoms, IsotropicStable, LevyMeasure, LineDensity, PowerTerm, RadialDensity
from levyhunt.measure import sphere_area, stable_marginal_constant, stable_radial_constant


@pytest.mark.parametrize("k", [0, 1, 2])
@pytest.mark.parametrize("alpha,damp", [(0.5, 0.0), (1.5, 0.0), (0.3, 1.0), (1.7, 2.5)])
def test_power_moment_matches_quadrature(k, alpha, damp):
    t = PowerTerm(1.3, alpha, 0.0, math.inf, damp)
    for u, v in [(0.1, 0.7), (0.5, 4.0), (2.0, 30.0)]:
        ref = integrate.quad(lambda r: r**k * t.scalar(r), u, v, epsrel=1e-13)[0]
        np.testing.assert_allclose(t.moment(k, u, v), ref, rtol=1e-10)


def test_power_moment_divergence():
    t = PowerTerm(1.0, 1.5)
    assert math.isinf(t.moment(1, 0.0, 1.0))
    assert math.isfinite(t.moment(2, 0.0, 1.0))
    assert math.isinf(PowerTerm(1.0, 0.0).moment(0, 1.0, math.inf))
    assert math.isfinite(PowerTerm(1.0, 0.2).moment(0, 1.0, math.inf))


def test_radial_density_window_and_leading():
    d = RadialDensity([PowerTerm(2.0, 0.7, 0.0, 1.0), PowerTerm(1.0, 0.3)])
    a, c = d.leading_behaviour()
    assert a == 0.7 and c == 2.0
    w = d.windowed(0.5, 2.0)
    np.testing.assert_allclose(w.moment(0), d.moment(0, 0.5, 2.0), rtol=1e-14)


def test_sphere_area_and_stable_constants():
    np.testing.assert_allclose([sphere_area(1), sphere_area(2), sphere_area(3)], [2, 2 * math.pi, 4 * math.pi])
    # int (1 - cos z x)|x|^(-1-alpha)dx = C |z|^alpha in 1-D, checked by quadrature
    for alpha in (0.5, 1.0, 1.5):
        head = integrate.quad(lambda r: (1 - math.cos(r)) * r ** (-1 - alpha), 0, 50, limit=500)[0]
        tail = 50.0**-alpha / alpha - integrate.quad(lambda r: r ** (-1 - alpha), 50, math.inf, weight="cos", wvar=1.0)[0]
        np.testing.assert_allclose(stable_radial_constant(alpha, 1), 2 * (head + tail), rtol=1e-7)
    assert stable_marginal_constant(1.2, 3, 3) == 1.0


def test_stable_marginal_by_quadrature():
    # 2-D -> 1-D marginal of |x|^(-2-alpha)
    alpha = 0.8
    K = stable_marginal_constant(alpha, 2, 1)
    ref = integrate.quad(lambda u: (1 + u * u) ** (-(2 + alpha) / 2), -math.inf, math.inf)[0]
    np.testing.assert_allclose(K, ref, rtol=1e-10)


def test_measure_aggregates():
    mu = LevyMeasure(
        [
            Atoms([[0.5, 0.0], [2.0, 0.0]], [1.0, 3.0]),
            LineDensity([0.0, 1.0], RadialDensity([PowerTerm(1.0, 0.5, 0.0, 2.0)])),
        ]
    )
    np.testing.assert_allclose(mu.small_jump_mean(2), [0.5, 2.0], rtol=1e-14)
    np.testing.assert_allclose(mu.variation_integral(), 0.5 + 3.0 + 2.0 + 2 * (1 - 2**-0.5), rtol=1e-14)
    assert math.isinf(mu.total_mass())
    assert not mu.is_atomic and not mu.is_empty


def test_isotropic_stable_moments():
    c = IsotropicStable(1.2, 0.7, 3, rmin=0.1, rmax=5.0)
    np.testing.assert_allclose(c.radial_moment(0), 0.7 * 4 * math.pi * (0.1**-1.2 - 5**-1.2) / 1.2, rtol=1e-14)
    M = c.second_moment_matrix(1.0)
    np.testing.assert_allclose(np.trace(M), c.radial_moment(2, 0.0, 1.0), rtol=1e-14)
