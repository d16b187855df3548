"""summa: moment-weighted recursion detection and divergent-series summation.

The pipeline: divide series coefficients by a moment weight (formal Borel
transform), detect the minimal linear recursion they satisfy, reconstruct
the rational function it represents, read off singular directions, and
evaluate the Laplace or q-theta sum along admissible rays.  The operator
layer converts recursions to the differential / moment-differential /
q-difference equations those series solve, and verifies solutions both
formally and analytically.
"""

from .coeffs import GaussianRational
from .errors import Failure, SummaError
from .operators import (
    Diff1,
    DiffS,
    Moment,
    OdeSpec,
    QDilation,
    apply_operator,
    diff_power,
    formal_residual,
    formal_solution,
    kind_for_weight,
    moment_derivative,
    ode_to_recursion,
    recursion_to_ode,
    weight_for,
)
from .ratfun import (
    DirectionSet,
    ExpOrder,
    GrowthCertificate,
    MGrowth,
    Polynomial,
    RationalFunction,
    growth_certificate,
    is_direction_summable,
    roots,
    singular_directions,
)
from .recursion import (
    ApproxRecursionCertificate,
    HankelReport,
    NotFound,
    Recursion,
    VerifyReport,
    approx_recursion,
    hankel_det,
    hankel_report,
    min_recursion,
    rational_reconstruct,
    verify_recursion,
)
from .regular import (
    Diagnostics,
    Inconclusive,
    SequenceM,
    check_lc,
    check_mg,
    check_snq,
    d_m,
    diagnose,
    m_of_t,
    omega,
    proximate_order_check,
)
from .series import (
    FormalPowerSeries,
    MomentWeight,
    borel_transform,
    generate_from_recursion,
    gevrey_order_estimate,
)
from .summation import (
    AsymptoticFit,
    LaplaceEvaluator,
    QLaplaceEvaluator,
    QuadratureConfig,
    SumResult,
    analytic_residual,
    asymptotic_check,
    laplace_sum,
    pi_q,
    q_laplace_sum,
    theta,
    theta_growth_envelope,
    variation_check,
)

__version__ = "0.1.0"
