"""Piecewise-polynomial collocation for linear second-kind Volterra equations.

Solves y(t) = g(t) + int_0^t K(t, s) y(s) ds on [0, T] in the space of
piecewise polynomials of degree m-1 on the uniform grid t_n = n*h,
collocating at t_{n,i} = t_n + c_i h.  On each subinterval the m nodal
values U_n solve

    (I - h B_n) U_n = g_n + sum_{l<n} h B_n^(l) U_l,

with B entries int_0^{c_i} K(t_{n,i}, t_n + s h) L_j(s) ds (current block)
and int_0^1 K(t_{n,i}, t_l + s h) L_j(s) ds (history), all evaluated with
one fixed Gauss rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import ConfigurationError, DomainError, NumericalError, StepSizeError
from .quadrature import GaussRule, gauss_rule

DEFAULT_PARAMS = {
    1: (1.0,),
    2: (1 / 3, 2 / 3),
    3: (1 / 3, 2 / 3, 1.0),
    4: (0.25, 0.5, 0.75, 1.0),
}

COND_LIMIT = 1e12


@dataclass(frozen=True)
class VieProblem:
    """Forcing g, kernel K(t, s) on 0 <= s <= t <= T, horizon T.

    ``factorized = (p, k)`` optionally declares K(t, s) = p(t) * k(t - s);
    the solver then integrates k once per lag instead of once per block.
    All callables must accept numpy arrays.
    """

    forcing: Callable
    kernel: Callable
    T: float
    factorized: tuple[Callable, Callable] | None = None

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError("horizon T must be positive")

    def spot_check(self, samples: int = 17) -> None:
        """Raise if g or K is non-finite on a sample grid."""
        t = np.linspace(0.0, self.T, samples)
        if not np.all(np.isfinite(self.forcing(t))):
            raise NumericalError("forcing is not finite on [0, T]")
        tt, ss = np.meshgrid(t, t, indexing="ij")
        mask = ss <= tt
        if not np.all(np.isfinite(self.kernel(tt[mask], ss[mask]))):
            raise NumericalError("kernel is not finite on D")


@dataclass(frozen=True)
class CollocationConfig:
    """Collocation parameters 0 < c_1 < ... < c_m <= 1 and N subintervals."""

    params: tuple[float, ...]
    N: int

    def __post_init__(self):
        c = np.asarray(self.params, dtype=float)
        object.__setattr__(self, "params", tuple(float(x) for x in c))
        if c.ndim != 1 or c.size < 1:
            raise ConfigurationError("at least one collocation parameter is required")
        if np.any(np.diff(c) <= 0):
            raise ConfigurationError("collocation parameters must be strictly increasing")
        if c[0] <= 0 or c[-1] > 1:
            # c_1 = 0 makes the first row of B_n vanish and duplicates t_n
            raise ConfigurationError("collocation parameters must lie in (0, 1]")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigurationError("N must be a positive integer")

    @classmethod
    def default(cls, m: int, N: int) -> CollocationConfig:
        if m not in DEFAULT_PARAMS:
            raise ConfigurationError(f"no default collocation parameters for m={m}")
        return cls(DEFAULT_PARAMS[m], N)

    @property
    def m(self) -> int:
        return len(self.params)


def lagrange_basis(params: Sequence[float], i: int, theta):
    """L_i(theta) = prod_{k != i} (theta - c_k) / (c_i - c_k); ``i`` is 0-based."""
    c = np.asarray(params, dtype=float)
    if len(set(c.tolist())) != c.size:
        raise ConfigurationError("Lagrange basis needs distinct parameters")
    if not 0 <= i < c.size:
        raise DomainError(f"basis index {i} out of range for m={c.size}")
    theta = np.asarray(theta, dtype=float)
    out = np.ones_like(theta)
    for k, ck in enumerate(c):
        if k != i:
            out = out * (theta - ck) / (c[i] - ck)
    return float(out) if out.ndim == 0 else out


def lagrange_matrix(params: Sequence[float], theta) -> np.ndarray:
    """Array with ``[..., j] = L_j(theta)``."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([lagrange_basis(params, j, theta) for j in range(len(params))], axis=-1)


def _default_rule(config: CollocationConfig) -> GaussRule:
    return gauss_rule(config.m + 6)


def build_block_matrices(problem: VieProblem, config: CollocationConfig, n: int,
                         rule: GaussRule | None = None) -> tuple[np.ndarray, np.ndarray]:
    """B_n (m x m) and the stack of B_n^(l), l = 0..n-1, shape (n, m, m)."""
    if not 0 <= n < config.N:
        raise DomainError(f"subinterval index {n} outside [0, {config.N - 1}]")
    rule = rule or _default_rule(config)
    h = problem.T / config.N
    c = np.asarray(config.params)
    x, w = rule.unit()
    t_ni = (n + c) * h

    # current block: s in [0, c_i] mapped to c_i * x
    s_cur = c[:, None] * x[None, :]
    try:
        k_cur = problem.kernel(t_ni[:, None], (n + s_cur) * h)
        k_hist = problem.kernel(t_ni[None, :, None], (np.arange(n)[:, None, None] + x) * h)
    except Exception as exc:  # noqa: BLE001 - re-raised with context
        raise NumericalError(f"kernel evaluation failed for block n={n}: {exc}") from exc
    lag_cur = lagrange_matrix(c, s_cur)  # (m, q, m)
    b_n = np.einsum("iq,q,iqj->ij", np.asarray(k_cur, dtype=float) * c[:, None], w, lag_cur)
    lag_hist = lagrange_matrix(c, x)  # (q, m)
    b_hist = np.einsum("liq,q,qj->lij", np.asarray(k_hist, dtype=float).reshape(n, c.size, rule.order),
                       w, lag_hist)
    _check_finite(b_n, n, "B_n")
    _check_finite(b_hist, n, "B_n^(l)")
    return b_n, b_hist


def _check_finite(arr, n, what):
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NumericalError(f"non-finite {what} entry at n={n}, index {tuple(bad)}")


class _LagTable:
    """Lag integrals for K(t, s) = p(t) k(t - s) on a uniform grid.

    B_n = diag(p(t_{n,i})) W_0 and B_n^(l) = diag(p(t_{n,i})) W_{n-l}; the
    W's depend only on the lag, so they are computed once per solve.
    """

    def __init__(self, problem: VieProblem, config: CollocationConfig, rule: GaussRule):
        p, k = problem.factorized
        h = problem.T / config.N
        c = np.asarray(config.params)
        x, w = rule.unit()
        s_cur = c[:, None] * x[None, :]
        self.self_block = np.einsum("iq,q,iqj->ij", k((c[:, None] - s_cur) * h) * c[:, None], w,
                                    lagrange_matrix(c, s_cur))
        lags = np.arange(1, config.N)[:, None, None]
        vals = k((lags + c[None, :, None] - x[None, None, :]) * h)
        lag = np.zeros((config.N, c.size, c.size))
        lag[1:] = np.einsum("diq,q,qj->dij", vals, w, lagrange_matrix(c, x))
        self.lag = lag
        self.p = lambda n: np.asarray(p((n + c) * h), dtype=float)
        _check_finite(self.self_block, 0, "B_n")
        _check_finite(self.lag, 0, "B_n^(l)")


@dataclass(frozen=True)
class CollocationSolution:
    """Nodal values U[n, i] = u_h(t_n + c_i h) of the collocation solution."""

    config: CollocationConfig
    T: float
    coeffs: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return self.T / self.config.N

    @property
    def nodes(self) -> np.ndarray:
        """Collocation points t_{n,i}, shape (N, m)."""
        n = np.arange(self.config.N)[:, None]
        return (n + np.asarray(self.config.params)) * self.h

    def locate(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Subinterval index and local coordinate for points of [0, T].

        Subintervals are sigma_0 = [t_0, t_1] and sigma_n = (t_n, t_{n+1}],
        so an interior grid point belongs to the interval on its left.
        """
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.T) or np.any(np.isnan(t)):
            raise DomainError(f"evaluation points must lie in [0, {self.T}]")
        ratio = t / self.h
        # grid points computed as k*h may land a few ulps past k; keep them on sigma_{k-1}
        nearest = np.round(ratio)
        ratio = np.where(np.abs(ratio - nearest) <= 8 * np.finfo(float).eps * np.maximum(nearest, 1.0),
                         nearest, ratio)
        n = np.clip(np.ceil(ratio).astype(np.int64) - 1, 0, self.config.N - 1)
        return n, ratio - n

    def __call__(self, t):
        n, theta = self.locate(t)
        lag = lagrange_matrix(self.config.params, theta)
        val = np.sum(lag * self.coeffs[n], axis=-1)
        return float(val) if val.ndim == 0 else val


def evaluate(solution: CollocationSolution, t):
    """u_h(t) = sum_j L_j(theta) U_{n,j} with t = t_n + theta h."""
    return solution(t)


def solve(problem: VieProblem, config: CollocationConfig, rule: GaussRule | None = None,
          *, use_lag_table: bool = True) -> CollocationSolution:
    """Collocation solution, marching n = 0..N-1.

    History terms are accumulated in increasing l so reruns are bitwise
    identical.  Raises StepSizeError when h*||B_n||_1 >= 1 and
    NumericalError when I - h B_n is ill-conditioned.
    """
    rule = rule or _default_rule(config)
    N, m = config.N, config.m
    h = problem.T / N
    c = np.asarray(config.params)
    table = _LagTable(problem, config, rule) if (use_lag_table and problem.factorized) else None
    g_all = np.asarray(problem.forcing((np.arange(N)[:, None] + c) * h), dtype=float)
    if g_all.shape != (N, m) or not np.all(np.isfinite(g_all)):
        raise NumericalError("forcing is not finite at the collocation points")
    U = np.zeros((N, m))
    eye = np.eye(m)
    for n in range(N):
        if table is not None:
            p = table.p(n)
            b_n = p[:, None] * table.self_block
            if n:
                hist = np.einsum("lij,lj->li", table.lag[n:0:-1], U[:n])
                G = h * p * np.cumsum(hist, axis=0)[-1]
            else:
                G = np.zeros(m)
        else:
            b_n, b_hist = build_block_matrices(problem, config, n, rule)
            if n:
                G = np.cumsum(h * np.einsum("lij,lj->li", b_hist, U[:n]), axis=0)[-1]
            else:
                G = np.zeros(m)
        norm = h * np.abs(b_n).sum(axis=0).max()
        if norm >= 1.0:
            raise StepSizeError(
                f"h*||B_n||_1 = {norm:.3g} >= 1 at n={n}; increase N (currently {N})"
            )
        a = eye - h * b_n
        if np.linalg.cond(a, 1) > COND_LIMIT:
            raise NumericalError(f"block system at n={n} is ill-conditioned")
        U[n] = lu_solve(lu_factor(a), g_all[n] + G)
    U.setflags(write=False)
    return CollocationSolution(config, problem.T, U)


def residual(problem: VieProblem, solution: CollocationSolution, rule: GaussRule | None,
             n: int, i: int) -> float:
    """Collocation defect u_h(t) - g(t) - (V u_h)(t) at t = t_{n,i} (0-based i)."""
    config = solution.config
    rule = rule or _default_rule(config)
    if not 0 <= i < config.m:
        raise DomainError(f"index i={i} out of range")
    h = solution.h
    b_n, b_hist = build_block_matrices(problem, config, n, rule)
    U = solution.coeffs
    t = (n + config.params[i]) * h
    vol = h * b_n[i] @ U[n]
    if n:
        vol = vol + np.sum(h * np.einsum("lj,lj->l", b_hist[:, i, :], U[:n]))
    return float(U[n, i] - float(np.asarray(problem.forcing(np.array([t])))[0]) - vol)
