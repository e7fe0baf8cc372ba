"""Numerical checks of Hopf-type boundary-point principles for ODE inequalities."""

__version__ = "0.1.0"

from .barriers import CertifiedBarrier, certify_sign, make_barrier
from .comparison import NonlinearOperator, compare_contact, linearize
from .errors import (
    ArgumentError,
    BarrierError,
    CapabilityError,
    DomainError,
    HopfkitError,
    MonotonicityError,
    NonDifferentiableError,
    ParseError,
    ReductionError,
    ShootingError,
    SingularityError,
    UnboundVariableError,
)
from .expr import GRAMMAR_VERSION, parse, to_source
from .functions import ExprFunction, PolynomialFunction
from .gallery import gallery_cases, get_case, sharp_example
from .hopf import (
    AutonomousRHS,
    HopfProblem,
    boundary_dichotomy,
    check_equivalent_form,
    check_hopf_left,
    check_hopf_right,
    check_third_order_bounded,
    reflect_problem,
    small_interval_max_principle,
    unique_continuation_probe,
    uniqueness_probe,
)
from .jets import Jet
from .odeint import (
    TrajectoryFunction,
    integrate_linear_ivp,
    integrate_nonlinear_ivp,
    integrate_two_sided,
    solve_second_order_bvp,
)
from .operator import LinearOperator
from .problem import run_problem
from .reduction import reduce_chain, solve_f_ode, verify_reduction_identity
from .report import EXIT_CODES, FAILS, HOLDS, HYPOTHESES_UNMET, NOT_APPLICABLE, UNDETERMINED, VerdictReport
