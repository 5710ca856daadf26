"""Basic reproduction number and stability for linear autonomous delay systems."""
from .delay_op import DelayLinearOperator, HistorySegment, check_cooperative, check_positive, evaluate, hat, scale
from .errors import AssumptionViolated, R0FdeError
from .linalg import eigenvalues, spectral_radius, stability_modulus
from .r0_engine import NextGenModel, consistency_report, lambda_star, r0_bisection, r0_direct, validate
from .spectral import principal_eigenvalue, sign_equivalence_report
from .tick import TickParams, equilibrium, linearize, r0_closed_form, simulate, threshold_verdict

__version__ = "0.1.0"
