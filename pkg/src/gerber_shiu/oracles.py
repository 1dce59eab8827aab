"""Reference solutions independent of the collocation pipeline.

* :func:`simulate_gs` estimates Phi_delta(u) by simulating the surplus
  process with interest.
* :func:`exponential_ode_oracle` integrates the second-order ODE that the
  integro-differential equation reduces to when claims are exponential.
  The derivation is in ``docs/ode_oracle.md``; only its coefficients live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConfigurationError, NumericalError
from .risk_model import (
    ClaimCausingRuin,
    ClaimModel,
    DeficitAtRuin,
    Exponential,
    Penalty,
    RiskParams,
    RuinIndicator,
    _require_alpha_zero,
)

# ----------------------------------------------------------------------------
# Monte Carlo

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_SLOTS = 3  # inter-claim time, two uniforms for the claim size


def _mix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer (bijective avalanche on uint64)."""
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def counter_uniforms(seed: int, path: np.ndarray, event: int, slot: int) -> np.ndarray:
    """Uniform(0, 1) draws keyed by (seed, path, event, slot).

    A stateless counter-based generator: every draw is a hash of its
    coordinates, so results do not depend on batching or evaluation order.
    """
    with np.errstate(over="ignore"):
        key = _mix64(np.uint64(seed) * _GOLDEN + _GOLDEN)
        x = _mix64(key ^ (np.asarray(path, dtype=np.uint64) * _GOLDEN))
        x = _mix64(x + np.uint64(event * _SLOTS + slot) * _M1)
    return ((x >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


@dataclass(frozen=True)
class McConfig:
    paths: int = 1_000_000
    seed: int = 12345
    u0: float = 5.0
    safe_barrier: float | None = None
    max_events: int = 100_000

    def __post_init__(self):
        if self.paths < 1:
            raise ConfigurationError("paths must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        if self.u0 < 0:
            raise ConfigurationError("initial reserve must be >= 0")
        if self.safe_barrier is not None and not self.safe_barrier > self.u0:
            raise ConfigurationError("safe_barrier must exceed u0")

    def barrier(self, model: ClaimModel) -> float:
        """Survival level; defaults to u0 + 40 mean claims."""
        return self.safe_barrier if self.safe_barrier is not None else self.u0 + 40 * model.mean


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    paths: int
    censored_fraction: float


@dataclass(frozen=True)
class RuinSample:
    """Per-path outcome: ruined flag, surplus before ruin and deficit.

    ``status`` is 1 for ruin, 2 for survival (barrier reached) and 3 for
    paths cut by the event cap.
    """

    status: np.ndarray
    surplus_before: np.ndarray
    deficit: np.ndarray

    @property
    def ruined(self) -> np.ndarray:
        return self.status == 1

    def estimate(self, penalty: Penalty) -> McEstimate:
        vals = np.zeros(self.status.size)
        hit = self.ruined
        vals[hit] = penalty.w(self.surplus_before[hit], self.deficit[hit])
        return _summarize(vals, float(np.mean(self.status == 3)))


def _summarize(values: np.ndarray, censored: float) -> McEstimate:
    n = values.size
    mean = float(np.sum(values) / n)
    std_error = float(np.std(values, ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
    return McEstimate(mean, std_error, n, censored)


def simulate_paths(params: RiskParams, model: ClaimModel, cfg: McConfig) -> RuinSample:
    """Simulate the surplus process until ruin, the barrier or the event cap.

    Between claims the surplus grows as U -> U e^{delta T} + c (e^{delta T}-1)/delta
    (U + cT when delta = 0).  Paths run in lock-step over events.
    """
    _require_alpha_zero(params)
    if params.lam > 0:
        params.check_loading(model)
    n = cfg.paths
    status = np.zeros(n, dtype=np.int8)
    before = np.zeros(n)
    deficit = np.zeros(n)
    if params.lam == 0:
        status[:] = 2
        return RuinSample(status, before, deficit)
    barrier = cfg.barrier(model)
    idx = np.arange(n, dtype=np.uint64)
    surplus = np.full(n, float(cfg.u0))
    for event in range(cfg.max_events):
        if idx.size == 0:
            break
        wait = -np.log(counter_uniforms(cfg.seed, idx, event, 0)) / params.lam
        if params.delta > 0:
            growth = np.expm1(params.delta * wait)
            surplus = surplus + (surplus + params.c / params.delta) * growth
        else:
            surplus = surplus + params.c * wait
        claim = model.sample(counter_uniforms(cfg.seed, idx, event, 1),
                             counter_uniforms(cfg.seed, idx, event, 2))
        after = surplus - claim
        ruin = after < 0
        safe = after > barrier
        if np.any(ruin):
            hit = idx[ruin].astype(np.int64)
            status[hit] = 1
            before[hit] = surplus[ruin]
            deficit[hit] = -after[ruin]
        if np.any(safe):
            status[idx[safe].astype(np.int64)] = 2
        keep = ~(ruin | safe)
        idx, surplus = idx[keep], after[keep]
    status[idx.astype(np.int64)] = 3
    return RuinSample(status, before, deficit)


def simulate_gs(params: RiskParams, model: ClaimModel, penalty: Penalty, cfg: McConfig) -> McEstimate:
    """Monte Carlo estimate of E[w(U(tau-), |U(tau)|) 1(tau < inf)].

    Paths reaching ``cfg.barrier`` count as survivors (bias at most the
    penalty function at the barrier); paths hitting ``max_events`` are
    counted as censored and contribute 0.
    """
    return simulate_paths(params, model, cfg).estimate(penalty)


def default_safe_barrier(params: RiskParams, model: ClaimModel, u0: float, *,
                         bound: float = 1e-6, horizon: float = 200.0) -> float:
    """Reserve level whose ruin probability is below ``bound``.

    Estimated with a coarse collocation solve; one significant figure is
    enough for a bias bound.  Never below u0 + 40 mean claims.
    """
    from .boundary import phi0
    from .risk_model import build_gs_vie
    from .vie import CollocationConfig, solve

    pen = RuinIndicator()
    start = phi0(params, model, pen).value
    sol = solve(build_gs_vie(params, model, pen, start, horizon), CollocationConfig.default(2, 400))
    grid = np.linspace(0.0, horizon, 2001)
    below = np.nonzero(np.asarray(sol(grid)) < bound)[0]
    level = grid[below[0]] if below.size else horizon
    return float(max(u0 + 40 * model.mean, level))


# ----------------------------------------------------------------------------
# ODE oracle for exponential claims

# For Fbar(x) = exp(-b x) the penalty tail is A(u) = a0 * p(u) * exp(-b u)
# and applying (d/du + b) to the convolution in the integro-differential
# equation gives
#   (c + delta u) Phi'' = (lam - delta - b (c + delta u)) Phi' - lam r(u),
#   r(u) = A'(u) + b A(u).
# Per penalty: A(0) and r(u).
def _exponential_tail_terms(penalty: Penalty, b: float) -> tuple[float, Callable]:
    if isinstance(penalty, RuinIndicator):
        return 1.0, lambda u: 0.0
    if isinstance(penalty, DeficitAtRuin):
        return 1.0 / b, lambda u: 0.0
    if isinstance(penalty, ClaimCausingRuin):
        return 1.0 / b, lambda u: np.exp(-b * u)
    raise ConfigurationError("ODE oracle supports the ruin, deficit and claim-cause penalties")


def exponential_ode_oracle(params: RiskParams, beta: float, penalty: Penalty, u_max: float,
                           tol: float = 1e-13, phi_zero: float | None = None) -> Callable:
    """High-accuracy evaluator of Phi_delta on [0, u_max] for Exp(beta) claims.

    Initial data: Phi(0) from the boundary-value module (or ``phi_zero``) and
    Phi'(0) = ((lam + alpha) Phi(0) - lam A(0)) / c.  Integrated with the
    8th-order Dormand-Prince method at relative tolerance ``tol``.
    """
    _require_alpha_zero(params)
    if not beta > 0:
        raise ConfigurationError("claim rate must be positive")
    a0, r = _exponential_tail_terms(penalty, beta)
    c, lam, delta = params.c, params.lam, params.delta
    if phi_zero is None:
        from .boundary import phi0

        phi_zero = phi0(params, Exponential(beta), penalty).value
    slope = ((lam + params.alpha) * phi_zero - lam * a0) / c

    def rhs(u, y):
        q = c + delta * u
        return [y[1], ((lam - delta - beta * q) * y[1] - lam * r(u)) / q]

    sol = solve_ivp(rhs, (0.0, u_max), [phi_zero, slope], method="DOP853", rtol=tol,
                    atol=tol * 1e-3, dense_output=True)
    if not sol.success:
        raise NumericalError(f"ODE oracle failed: {sol.message}")

    def evaluate(u):
        arr = np.asarray(u, dtype=float)
        if np.any(arr < 0) or np.any(arr > u_max):
            raise ConfigurationError(f"oracle defined on [0, {u_max}] only")
        val = sol.sol(arr.ravel())[0].reshape(arr.shape)
        return float(val) if val.ndim == 0 else val

    return evaluate
