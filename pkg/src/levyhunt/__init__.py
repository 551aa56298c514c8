"""Lévy processes: exponents, polarity diagnostics, energies and simulation."""

__version__ = "0.1.0"

from .calculus import (
    InsideRadius,
    NotProjectableError,
    OffRangeOf,
    OutsideRadius,
    ProjectionResult,
    product_embed,
    project_triplet,
    restrict_measure,
    sum_triplets,
    truncate_big_jumps,
)
from .diagnostics import (
    CheckResult,
    DecideOptions,
    Decomposition,
    SubordinatorReport,
    Verdict,
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
from .energy import (
    EnergyReport,
    QuadSpec,
    clog_partial_sum,
    energy_limit,
    lambda_energy,
    one_energy,
    product_bound_check,
)
from .exponent import ABValue, ExponentValue, eval_AB, eval_psi, measure_cf, psi_values
from .io import SpecError, SpecErrors, load_spec, parse_spec, serialize
from .linalg import matrix_sqrt, measure_off_range_mass, null_space_basis, range_projectors, spectral_decompose
from .measure import (
    Atoms,
    IsotropicStable,
    LevyMeasure,
    LineDensity,
    PowerTerm,
    RadialDensity,
    stable_radial_constant,
)
from .pathsim import (
    Ensemble,
    HittingEstimate,
    Hyperplane,
    PointTube,
    SimPlan,
    SubspaceTube,
    empirical_cf,
    hitting_estimate,
    simulate_paths,
)
from .quadrature import DivergentIntegralError, QuadratureError
from .triplet import LevyTriplet, ProcessSpec, validate_triplet
