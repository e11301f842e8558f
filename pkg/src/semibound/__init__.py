"""semibound: certified decay bounds for matrix semigroups.

Turns resolvent-norm information about a generator matrix A into
explicit, certified bounds on ||exp(tA)||, and validates every bound
against directly computed matrix exponentials.
"""

from .bounds import (
    BoundCurve,
    CutoffCertificate,
    ExponentialWeight,
    TabulatedWeight,
    WeightSpec,
    contrb_bound,
    contrb_schedule,
    contrbprime_bound,
    gps_bound,
    m_new,
    m_new_growth_constant,
    optimal_contrb,
    optimal_cutoff,
    optimal_power,
    optimal_split,
    phi_bound_curve,
    phi_limit,
    power_bound,
    propa_constant,
    scheduled_power,
    weight_norm,
)
from .errors import HypothesisError, NumericsError, SemiboundError, SpectrumError
from .gallery import (
    DiscretizationSpec,
    build_by_name,
    build_complex_airy,
    build_davies_oscillator,
    build_jordan,
    build_kfp_quadratic,
    build_random_nonnormal,
    build_toeplitz,
)
from .linalg import (
    GrowthBound,
    OperatorMatrix,
    eigenvalues,
    laplace_identity_residual,
    load_matrix,
    numerical_abscissa,
    resolvent_norm,
    save_matrix,
    semigroup_norm,
    sigma_min,
    spectral_abscissa,
)
from .recursion import (
    RecursionState,
    dyadic_floors,
    extend_majorant,
    k0_rule,
    stretched_bound,
    uniform_constant,
)
from .resolvent import (
    CertifiedInterval,
    HilleYosidaReport,
    ResolventProfile,
    hille_yosida_check,
    lipschitz_extend,
    omega0_estimate,
    profile,
    r_of_omega,
    r_on_line,
)
from .splitting import (
    CircleContour,
    RectangleContour,
    SpectralSplit,
    SplitReport,
    auto_contour,
    riesz_projection,
    sampled_remainder_majorant,
    split_bound,
    split_report,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
