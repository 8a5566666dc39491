"""Certified solving of Gamma(z_k) = A_k(z_1..z_n) equations and systems.

The working quadrant geometry of |Gamma| (monotone level curves and their
orthogonal constant-argument curves) lets closed contours trap zeros of
Gamma - A with explicit winding-number certificates; the same construction
per coordinate solves multivariate systems on polydisk domains at infinity,
and a rectangle variant handles exp(z) = A(z).
"""

from .algebraic_fn import AlgebraicFunction, AsymptoticData, estimate_asymptotics, perturbation_radius
from .contour import Contour, WindingResult, build_K, build_rectangle, rho, winding_number
from .errors import (
    BranchPointError,
    DegenerateDirectionError,
    DomainError,
    GammaEcError,
    GeometryError,
    NewtonDivergence,
    NoCrossing,
    NonConvergence,
    NoRadiusFound,
    PoleError,
    SelectionFailure,
    SeparationFailure,
    TraceDivergence,
    ZeroOnContour,
)
from .exp_rouche import solve_exp_equation
from .gamma_core import (
    GammaValue,
    QuadrantRegion,
    alpha,
    digamma,
    gamma,
    gamma_gauss_oracle,
    gamma_weierstrass_oracle,
    grad_log_abs_gamma,
    log_gamma,
    stirling_bounds_check,
    verify_gamma_algebraic_identity,
    verify_identities,
)
from .level_curves import (
    CompanionPoint,
    LevelCurve,
    arg_rate,
    modulus_slope,
    point_on_modulus_arc,
    trace_argument_curve,
    trace_modulus_curve,
    z_star,
)
from .solver_1d import (
    CertifiedZero,
    SearchState,
    certify_one_zero,
    count_zeros_by_radius,
    distribution_offset,
    enumerate_zeros,
    find_xi,
    solve_plane_curve,
)
from .solver_nd import (
    PolydiskDomain,
    ProductRegion,
    SystemSpec,
    build_product_region,
    make_system_spec,
    periodic_points,
    select_xi,
    solve_system,
    verify_rouche_boundary,
)

__version__ = "0.1.0"
