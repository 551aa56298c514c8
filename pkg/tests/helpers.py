"""Shared builders for the test-suite."""
import math

import numpy as np

from levyhunt import Atoms, IsotropicStable, LevyTriplet, LineDensity, PowerTerm, RadialDensity
from levyhunt.measure import stable_radial_constant

DRIFT_DIAGONAL = LevyTriplet([1.0, -1.0], [[2.0, 2.0], [2.0, 2.0]])


def sym_stable_1d(alpha, scale=1.0):
    """1-D symmetric stable with ``psi(z) = scale |z|^alpha``."""
    return LevyTriplet([0.0], None, [IsotropicStable(alpha, scale / stable_radial_constant(alpha, 1), 1)])


def line(direction, pos_terms=(), neg_terms=()):
    return LineDensity(direction, RadialDensity(pos_terms), RadialDensity(neg_terms))


def random_unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_atoms(rng, n, k=None, scale=1.5):
    k = int(rng.integers(1, 5)) if k is None else k
    loc = rng.normal(size=(k, n)) * scale
    return Atoms(loc, rng.uniform(0.1, 2.0, size=k))


def random_line(rng, n, finite_variation=None):
    """Line density with power terms; ``finite_variation`` limits alpha below 1."""
    top = 1.0 if finite_variation else 1.9

    def terms():
        out = []
        for _ in range(int(rng.integers(1, 3))):
            al = float(rng.uniform(0.1, top))
            hi = math.inf if rng.random() < 0.5 else float(rng.uniform(0.5, 3.0))
            damp = float(rng.uniform(0.0, 2.0)) if rng.random() < 0.3 else 0.0
            out.append(PowerTerm(float(rng.uniform(0.2, 1.5)), al, 0.0, hi, damp))
        return out

    neg = terms() if rng.random() < 0.7 else []
    return line(random_unit(rng, n), terms(), neg)


def random_psd(rng, n, rank):
    if rank == 0:
        return np.zeros((n, n))
    A = rng.normal(size=(n, rank))
    return A @ A.T


def random_triplet(rng, n, rank=None, lines=True):
    rank = int(rng.integers(0, n + 1)) if rank is None else rank
    comps = [random_atoms(rng, n)]
    if lines and rng.random() < 0.7:
        comps.append(random_line(rng, n))
    return LevyTriplet(rng.normal(size=n), random_psd(rng, n, rank), comps)
