"""
Lévy–Khintchine exponent evaluation.

``psi(z) = i<a,z> + <z,Qz>/2 + int (1 - e^{i<z,x>} + i<z,x> 1{|x|<1}) mu(dx)``

Atoms are summed exactly, isotropic stable parts use the closed form
``c * C(alpha, k) * |B^T z|^alpha``, and line densities reduce to 1-D
integrals along their direction that are evaluated with QUADPACK:
algebraic-weight rules near the origin, Fourier-weight rules (QAWO/QAWF)
where ``s r > 1``, split at ``r = 1`` and ``r = 1/|s|``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .measure import (
    Atoms,
    IsotropicStable,
    LineDensity,
    RadialDensity,
    sphere_area,
    stable_radial_constant,
)
from .quadrature import QuadratureError, quad
from .triplet import LevyTriplet

__all__ = [
    "ExponentValue",
    "ABValue",
    "eval_psi",
    "psi_values",
    "eval_AB",
    "measure_cf",
    "write_psi_grid_csv",
    "radial_exponent",
]

_EPS = dict(epsabs=1e-13, epsrel=1e-12, limit=200)


@dataclass(frozen=True)
class ExponentValue:
    re: float
    im: float

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __complex__(self) -> complex:
        return self.value


@dataclass(frozen=True)
class ABValue:
    A: float
    B: float


def _one_minus_cos_over_r2(a: float, r: float) -> float:
    if r == 0.0:
        return 0.5 * a * a
    h = math.sin(0.5 * a * r)
    return 2.0 * h * h / (r * r)


def _s_minus_sin_over_r3(s: float, r: float) -> float:
    # (s r - sin(s r)) / r^3
    x = s * r
    if abs(x) < 1e-2:
        x2 = x * x
        return s**3 * (1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0)
    return (x - math.sin(x)) / r**3


def _s_minus_sin(s: float, r: float) -> float:
    x = s * r
    if abs(x) < 1e-2:
        x2 = x * x
        return x * x2 * (1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0)
    return x - math.sin(x)


def _fourier_tail(f, u: float, weight: str, a: float) -> float:
    """QAWF on ``[u, inf)``; a too strict ``epsabs`` can stall the cycle extrapolation, so it is relaxed stepwise."""
    for eps in (1e-13, 1e-11, 1e-9):
        try:
            return quad(f, u, math.inf, weight=weight, wvar=a, epsabs=eps, limlst=100)
        except QuadratureError as e:
            err = e
    raise err


def radial_exponent(s: float, dens: RadialDensity) -> complex:
    """``int_0^inf (1 - e^{isr} + isr 1{r<1}) dens(r) dr``."""
    if s == 0.0 or not dens.terms or dens.is_zero:
        return 0j
    a = abs(s)
    sgn = 1.0 if s > 0 else -1.0
    bps = {b for b in dens.breakpoints() if b > 0}
    bps.update((1.0, 1.0 / a))
    bps = sorted(bps)
    # decade splits keep damped or localised mass visible to the adaptive rule
    fine = [bps[0]]
    for b in bps[1:]:
        while b / fine[-1] > 10.0:
            fine.append(fine[-1] * 10.0)
        fine.append(b)
    bps = fine
    r0 = bps[0]
    f = dens.scalar
    re = 0.0
    im = 0.0
    for t in dens.terms:
        if t.lo != 0.0 or t.coef == 0.0:
            continue
        lam = t.damping
        re += t.coef * quad(
            lambda r: math.exp(-lam * r) * _one_minus_cos_over_r2(a, r),
            0.0, r0, weight="alg", wvar=(1.0 - t.alpha, 0.0), **_EPS,
        )
        im += t.coef * quad(
            lambda r: math.exp(-lam * r) * _s_minus_sin_over_r3(s, r),
            0.0, r0, weight="alg", wvar=(2.0 - t.alpha, 0.0), **_EPS,
        )
    top = max(t.hi for t in dens.terms)
    for u, v in zip(bps, bps[1:] + [math.inf]):
        if u >= top:
            # QAWF on an identically zero tail can return DBL_MAX
            break
        inside = u < 1.0
        if math.isinf(v):
            re += dens.moment(0, u, v) - _fourier_tail(f, u, "cos", a)
            im -= sgn * _fourier_tail(f, u, "sin", a)
        elif a * v <= 1.0 + 1e-12:
            re += quad(lambda r: f(r) * 2.0 * math.sin(0.5 * a * r) ** 2, u, v, **_EPS)
            if inside:
                im += quad(lambda r: f(r) * _s_minus_sin(s, r), u, v, **_EPS)
            else:
                im -= quad(lambda r: f(r) * math.sin(s * r), u, v, **_EPS)
        else:
            re += dens.moment(0, u, v) - quad(f, u, v, weight="cos", wvar=a, **_EPS)
            if inside:
                im += s * dens.moment(1, u, v)
            im -= sgn * quad(f, u, v, weight="sin", wvar=a, **_EPS)
    return complex(re, im)


def _bessel_profile(k: int, u: float) -> float:
    """``int_{S^(k-1)} (1 - cos(u theta_1)) dtheta``."""
    area = sphere_area(k)
    nu = k / 2.0 - 1.0
    if u < 1e-2:
        # 1 - Gamma(nu+1) (2/u)^nu J_nu(u), summed directly to avoid cancellation
        q = 0.25 * u * u
        return area * q / (nu + 1) * (1.0 - q / (2 * (nu + 2)) * (1.0 - q / (3 * (nu + 3))))
    if k == 1:
        return 2.0 * (1.0 - math.cos(u))
    if k == 3:
        return area * (1.0 - math.sin(u) / u)
    lam = math.gamma(nu + 1) * (2.0 / u) ** nu * special.jv(nu, u)
    return area * (1.0 - lam)


def _windowed_stable(c: IsotropicStable, w: float) -> float:
    k = c.support_dim
    full = c.intensity * stable_radial_constant(c.alpha, k) * w**c.alpha
    if c.full_window:
        return full
    g = lambda r: r ** (-1.0 - c.alpha) * _bessel_profile(k, r * w)

    def piece(lo, hi):
        if hi <= lo:
            return 0.0
        total = 0.0
        cut = min(hi, 1.0 / w)
        if lo == 0.0:
            total += quad(
                lambda r: _bessel_profile(k, r * w) / (r * r) if r > 0 else sphere_area(k) * w * w / (2 * k),
                0.0, cut, weight="alg", wvar=(1.0 - c.alpha, 0.0), **_EPS,
            )
            lo = cut
        if hi > lo:
            total += quad(g, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=1000)
        return total

    if math.isinf(c.rmax):
        return full - c.intensity * piece(0.0, c.rmin)
    return c.intensity * piece(c.rmin, c.rmax)


def psi_values(t: LevyTriplet, Z) -> np.ndarray:
    """Vectorised exponent: ``Z`` of shape ``(m, dim)`` (or ``(dim,)``) -> complex array."""
    Z = np.asarray(Z, dtype=float)
    single = Z.ndim == 1
    Z = np.atleast_2d(Z)
    if Z.shape[1] != t.dim:
        raise ValueError(f"z has length {Z.shape[1]}, triplet has dim {t.dim}")
    out = 1j * (Z @ t.a) + 0.5 * np.einsum("mi,ij,mj->m", Z, t.Q, Z)
    for c in t.mu:
        if isinstance(c, Atoms):
            if not c.weights.size:
                continue
            ph = Z @ c.locations.T
            comp = (c.norms() < 1.0).astype(float)
            out = out + ((1.0 - np.exp(1j * ph) + 1j * ph * comp) * c.weights).sum(axis=1)
        elif isinstance(c, LineDensity):
            svals = Z @ c.direction
            vals = np.empty(len(svals), dtype=complex)
            for i, s in enumerate(svals):
                v = radial_exponent(s, c.positive)
                v += radial_exponent(-s, c.negative)
                vals[i] = v
            out = out + vals
        else:
            W = np.linalg.norm(Z @ c.basis_matrix(), axis=1)
            out = out + np.array([_windowed_stable(c, w) if w > 0 else 0.0 for w in W])
    return out[0] if single else out


def eval_psi(t: LevyTriplet, z) -> ExponentValue:
    v = complex(psi_values(t, np.asarray(z, dtype=float).ravel()))
    re = v.real
    if -1e-12 <= re < 0.0:
        re = 0.0
    return ExponentValue(re, v.imag)


def eval_AB(t: LevyTriplet, z) -> ABValue:
    p = eval_psi(t, z)
    A = 1.0 + p.re
    B = abs(complex(1.0 + p.re, p.im))
    return ABValue(A, max(A, B))


def measure_cf(nu: Atoms, z) -> complex | np.ndarray:
    """``sum_i w_i exp(i<z, x_i>)``; origin atoms allowed."""
    Z = np.asarray(z, dtype=float)
    single = Z.ndim == 1
    Z = np.atleast_2d(Z)
    if not nu.weights.size:
        out = np.zeros(Z.shape[0], dtype=complex)
    else:
        out = np.exp(1j * (Z @ nu.locations.T)) @ nu.weights
    return complex(out[0]) if single else out


def write_psi_grid_csv(t: LevyTriplet, Z, fh) -> None:
    """Write ``z_1..z_n, re_psi, im_psi, A, B`` rows for each grid point."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    vals = psi_values(t, Z)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([f"z{i + 1}" for i in range(t.dim)] + ["re_psi", "im_psi", "A", "B"])
    for z, v in zip(Z, vals):
        A = 1.0 + v.real
        B = abs(1.0 + v)
        w.writerow([format(x, ".17g") for x in z] + [format(x, ".17g") for x in (v.real, v.imag, A, B)])
