"""Error and order studies over a grid-doubling ladder of N."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .boundary import phi0
from .errors import ConfigurationError
from .risk_model import ClaimModel, Penalty, RiskParams, build_gs_vie
from .vie import CollocationConfig, CollocationSolution, solve

DEFAULT_LADDER = (64, 128, 256, 512, 1024, 2048)
GRID_POINTS = 3001


@dataclass(frozen=True)
class ReportRow:
    N: int
    value: float
    error: float | None = None
    order: float | None = None


@dataclass(frozen=True)
class ConvergenceReport:
    rows: list[ReportRow]
    kind: str  # "exact_referenced" or "self_difference"
    u_eval: float
    m: int
    params: tuple[float, ...]
    T: float
    meta: dict = field(default_factory=dict)

    def orders(self) -> list[float]:
        return [r.order for r in self.rows if r.order is not None]

    def errors(self) -> list[float]:
        return [r.error for r in self.rows if r.error is not None]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["N", "value", "error", "order"])
        for r in self.rows:
            writer.writerow([r.N, fmt(r.value), fmt(r.error), fmt(r.order)])
        return buf.getvalue()


def fmt(x) -> str:
    """17 significant digits, '' for absent values."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def error_exact(solutions: Mapping[int, CollocationSolution], exact: Callable,
                grid: np.ndarray | None = None) -> dict[int, float]:
    """Sup of |u_h - y| over a fixed evaluation grid (default 3001 points on [0, T])."""
    out = {}
    for N, sol in solutions.items():
        pts = np.linspace(0.0, sol.T, GRID_POINTS) if grid is None else np.asarray(grid, dtype=float)
        out[N] = float(np.max(np.abs(np.asarray(sol(pts)) - np.asarray(exact(pts)))))
    return out


def error_self(solutions: Mapping[int, CollocationSolution], t_eval: float) -> dict[int, float]:
    """|u_h^N(t) - u_h^{2N}(t)|, keyed by the finer N (its table row)."""
    out = {}
    for N in sorted(solutions):
        if 2 * N in solutions:
            out[2 * N] = abs(float(solutions[N](t_eval)) - float(solutions[2 * N](t_eval)))
    if not out:
        raise ConfigurationError("error_self needs at least one (N, 2N) pair")
    return out


def order(e: float, e2: float) -> float | None:
    """log2(e / e2); None when either error is not positive."""
    if e is None or e2 is None or not (e > 0 and e2 > 0):
        return None
    return math.log2(e / e2)


def _check_ladder(ladder: Sequence[int]):
    ladder = list(ladder)
    if len(ladder) < 2 or any(b != 2 * a for a, b in zip(ladder, ladder[1:])):
        raise ConfigurationError(f"N ladder must double strictly, got {ladder}")
    return ladder


def solve_ladder(params: RiskParams, model: ClaimModel, penalty: Penalty, m: int,
                 colloc: Sequence[float] | None, ladder: Sequence[int], T: float = 30.0,
                 phi_zero: float | None = None) -> dict[int, CollocationSolution]:
    """Collocation solutions of the Gerber-Shiu equation for each N."""
    if phi_zero is None:
        phi_zero = phi0(params, model, penalty).value
    problem = build_gs_vie(params, model, penalty, phi_zero, T)
    colloc = tuple(colloc) if colloc is not None else CollocationConfig.default(m, 1).params
    if len(colloc) != m:
        raise ConfigurationError(f"{len(colloc)} collocation parameters given for m={m}")
    return {N: solve(problem, CollocationConfig(colloc, N)) for N in ladder}


def run_study(params: RiskParams, model: ClaimModel, penalty: Penalty, m: int,
              colloc: Sequence[float] | None = None, ladder: Sequence[int] = DEFAULT_LADDER,
              u_eval: float = 5.0, *, T: float = 30.0, exact: Callable | None = None,
              grid: np.ndarray | None = None) -> ConvergenceReport:
    """Table-style study.

    With ``exact`` the error column is the sup error against it (rows from
    the first N); otherwise the self-difference at ``u_eval`` (rows from the
    second N).
    """
    ladder = _check_ladder(ladder)
    sols = solve_ladder(params, model, penalty, m, colloc, ladder, T)
    if exact is not None:
        kind, errs = "exact_referenced", error_exact(sols, exact, grid)
    else:
        kind, errs = "self_difference", error_self(sols, u_eval)
    rows, prev = [], None
    for N in ladder:
        err = errs.get(N)
        rows.append(ReportRow(N, float(sols[N](u_eval)), err, order(prev, err) if prev else None))
        prev = err
    first = sols[ladder[0]].config.params
    return ConvergenceReport(rows, kind, u_eval, m, first, T)


FIGURE_LADDER = (512, 1024, 2048, 4096)


@dataclass(frozen=True)
class FigureData:
    """Function values and relative errors of one Gerber-Shiu curve."""

    u: np.ndarray
    values: dict[int, np.ndarray]
    relerr: dict[int, np.ndarray]
    reference: str


def figure_data(params: RiskParams, model: ClaimModel, penalty: Penalty, m: int = 2,
                ladder: Sequence[int] = FIGURE_LADDER, u: np.ndarray | None = None,
                reference: str = "auto", T: float = 30.0) -> FigureData:
    """Curves on ``u`` for each N and their relative errors.

    ``reference`` is "oracle" (ODE oracle, exponential claims only), "self"
    (the finest N of the ladder) or "auto" (oracle when available).
    """
    from .oracles import exponential_ode_oracle
    from .risk_model import Exponential

    u = np.linspace(0.0, T, 301) if u is None else np.asarray(u, dtype=float)
    if reference == "auto":
        reference = "oracle" if isinstance(model, Exponential) else "self"
    if reference not in ("oracle", "self"):
        raise ConfigurationError("reference must be 'oracle', 'self' or 'auto'")
    start = phi0(params, model, penalty).value
    sols = solve_ladder(params, model, penalty, m, None, ladder, T, phi_zero=start)
    values = {N: np.asarray(sols[N](u)) for N in ladder}
    if reference == "oracle":
        if not isinstance(model, Exponential):
            raise ConfigurationError("oracle reference needs exponential claims")
        ref = exponential_ode_oracle(params, model.rate, penalty, T, phi_zero=start)(u)
    else:
        ref = values[max(ladder)]
    relerr = {N: np.abs(values[N] - ref) / np.abs(ref) for N in ladder}
    return FigureData(u, values, relerr, reference)
