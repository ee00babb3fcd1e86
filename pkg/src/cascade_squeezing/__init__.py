"""Two-mode cavity squeezing from subharmonic light and a cascade atom.

Analytic layer: system parameters, the atomic expectation-value dynamics
under the adiabatically eliminated field, the closed second-order field
moments, and quadrature variances in both ordering conventions.  Exact
layer: a truncated-Fock master-equation oracle used to validate the
expectation-value identities and to quantify the elimination error.
"""

from .atom import (
    AtomicGenerator,
    AtomicState,
    atomic_generator,
    atomic_steady_state,
    integrate_atomic,
)
from .errors import (
    DegenerateError,
    DomainError,
    ModelError,
    MultiplicityError,
    RegimeError,
    StepSizeError,
    TraceDriftError,
    ValidationError,
)
from .moments import (
    FieldMoments,
    FieldMomentSystem,
    FirstMoments,
    c2_moment,
    commutator_defect,
    field_system,
    first_moments,
    integrate_moments,
    steady_moments_closed,
    steady_moments_solve,
    vacuum_moments,
)
from .oracle import (
    EhrenfestReport,
    GapReport,
    Liouvillian,
    TruncatedSpace,
    approximation_gap,
    basis_state,
    build_liouvillian,
    edge_occupancy,
    ehrenfest_residuals,
    evolve,
    extract_moments,
    steady_state,
    vacuum_bottom_state,
    validate_density_matrix,
)
from .params import SystemParams, new_params, params_from_gamma_c
from .quadrature import (
    VACUUM_LEVEL_ARBITRARY,
    QuadratureReport,
    critical_gamma_c,
    normal_moments,
    quadrature_report,
    squeezing_normal,
    vacuum_normal,
    variance_arbitrary,
    variance_normal_assembled,
    variance_normal_closed,
    variance_normal_minus_closed,
    variance_normal_plus_closed,
)

__version__ = "0.1.0"
