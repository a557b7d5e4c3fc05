"""qnlab: a desk-scale numerical laboratory for finite-dimensional
quasi-normed spaces — concrete gauges, ellipsoids and volumes, sign-average
constants, interpolation functionals, Euclidean factorizations, character
sums, and a seeded experiment harness that checks every claim it can at
explicit tolerances.
"""

from .numkernel import DegenerateMatrixError, RandomSource
from .spaces import (
    HornResult,
    OperatorSpec,
    Polytope,
    QuasiNormedSpace,
    RConvexAtoms,
    Schatten,
    WeightedLp,
    coordinate_section,
    horn_check,
    polytope_section,
    quotient,
)
from .geometry import (
    Ellipsoid,
    InscribedResult,
    RatioEstimate,
    SantaloResult,
    SplitVolumeResult,
    VolumeEstimate,
    inscribed_ellipsoid,
    mvee,
    mvee_of_ball,
    rhull_volume_defect,
    santalo_check,
    section_projection_volume_check,
    unit_ball_volume,
    volume,
    vr,
    vr_star,
)
from .interpolation import (
    KValue,
    NormPair,
    OperatorInterpolationResult,
    QuadraticGauge,
    SpaceGauge,
    SumRuleResult,
    ThetaNormResult,
    ThetaParams,
    diagonal_theta_norm,
    ell2_sum_theta_check,
    equal_norms_type,
    interp_operator_bound_check,
    k_functional,
    quadratic_theta_norm_exact,
    theta_norm,
    theta_norm_constant,
)
from .randsigns import (
    ConstantEstimate,
    RademacherAverage,
    cotype2_lower,
    cotype_q_lower,
    kconvexity_lower,
    khintchine_ratio,
    rademacher_average,
    sign_patterns,
    type2_lower,
)
from .factorization import (
    ApproxNumber,
    DeltaResult,
    DistanceBracket,
    FactorizationWitness,
    Gamma2Result,
    GaussianMean,
    OpNormResult,
    ProfileResult,
    approx_numbers,
    delta_boundedness_sweep,
    delta_upper,
    envelope_distance,
    euclidean_distance,
    gamma2_boundedness_sweep,
    gamma2_upper,
    gaussian_mean,
    op_norm,
    weak_cotype2_profile,
)
from .sidon import (
    Character,
    CpRatio,
    FiniteAbelianGroup,
    RegularityResult,
    SidonResult,
    all_characters,
    character_gram,
    character_matrix,
    coordinate_characters,
    cp_ratio,
    sidon_constant,
    sidon_regularity_experiment,
    translate_coefficients,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    format_space,
    list_experiments,
    parse_group,
    parse_space,
    run,
    write_report,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
