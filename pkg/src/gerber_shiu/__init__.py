"""Gerber-Shiu discounted penalty functions by Volterra collocation."""

from .boundary import Phi0Result, kappa_delta, phi0
from .convergence import ConvergenceReport, error_exact, error_self, figure_data, order, run_study
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    GerberShiuError,
    NumericalError,
    StepSizeError,
)
from .oracles import McConfig, McEstimate, exponential_ode_oracle, simulate_gs
from .quadrature import GaussRule, gauss_rule, integrate, integrate_to_infinity
from .risk_model import (
    ClaimCausingRuin,
    CombinationOfExponentials,
    CustomClaims,
    CustomPenalty,
    DeficitAtRuin,
    Erlang2,
    Exponential,
    RiskParams,
    RuinIndicator,
    beta_transform,
    build_gs_vie,
    gs_forcing,
    gs_kernel,
    penalty_mass_mA,
    penalty_tail_A,
    phi1,
    survival,
)
from .vie import (
    CollocationConfig,
    CollocationSolution,
    VieProblem,
    build_block_matrices,
    evaluate,
    lagrange_basis,
    residual,
    solve,
)

__version__ = "0.1.0"
