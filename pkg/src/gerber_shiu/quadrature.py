"""Gauss-Legendre rules and the fixed-order integrators built on them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError

MAX_ORDER = 64


@dataclass(frozen=True)
class GaussRule:
    """q-point Gauss-Legendre rule on [-1, 1]."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def mapped(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights affinely mapped to [a, b]."""
        half = 0.5 * (b - a)
        return a + half * (self.nodes + 1.0), half * self.weights

    def unit(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on [0, 1]."""
        return self.mapped(0.0, 1.0)


def _legendre_and_derivative(q: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(1, q):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = q * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@lru_cache(maxsize=None)
def gauss_rule(q: int) -> GaussRule:
    """Return the q-point rule, computed by Newton iteration on P_q.

    Roots are refined from the Tricomi initial guess until every update is
    below 1e-15; weights are 2 / ((1 - x^2) P_q'(x)^2).  Rules are cached,
    and their arrays are read-only so the cache can be shared freely.
    """
    if not isinstance(q, (int, np.integer)) or not 1 <= q <= MAX_ORDER:
        raise DomainError(f"Gauss order must be an integer in [1, {MAX_ORDER}], got {q!r}")
    q = int(q)
    if q == 1:
        nodes, weights = np.zeros(1), np.full(1, 2.0)
    else:
        k = np.arange(1, q + 1)
        x = np.cos(np.pi * (k - 0.25) / (q + 0.5))
        for _ in range(100):
            p, dp = _legendre_and_derivative(q, x)
            step = p / dp
            x = x - step
            if np.max(np.abs(step)) < 1e-15:
                break
        else:  # pragma: no cover - Newton converges quadratically from this guess
            raise ConvergenceError(f"Newton iteration for Gauss order {q} did not converge")
        _, dp = _legendre_and_derivative(q, x)
        weights = 2.0 / ((1.0 - x * x) * dp * dp)
        # ascending order, exact symmetry
        x = x[::-1]
        weights = weights[::-1]
        x = 0.5 * (x - x[::-1])
        weights = 0.5 * (weights + weights[::-1])
        if q % 2:
            x[q // 2] = 0.0
        nodes = x
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return GaussRule(q, nodes, weights)


def integrate(rule: GaussRule, f: Callable, a: float, b: float):
    """Gauss-Legendre estimate of the integral of ``f`` over [a, b].

    ``f`` is called once with the array of mapped nodes and may return extra
    leading axes; the sum runs over the last axis.
    """
    if b < a:
        raise DomainError(f"integration interval requires a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    x, w = rule.mapped(a, b)
    return np.asarray(f(x)) @ w


def composite_nodes(rule: GaussRule, edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights of the composite rule over consecutive panels ``edges``.

    Returns arrays of shape (len(edges) - 1, q).
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    return a + half * (rule.nodes + 1.0), half * rule.weights


def integrate_to_infinity(
    f: Callable,
    start: float = 0.0,
    *,
    rule: GaussRule | None = None,
    initial: float = 1.0,
    max_panel: float = 2.0,
    rtol: float = 1e-13,
    cap: float = 1e4,
):
    """Integrate ``f`` over [start, inf) by interval doubling.

    The range [start, start + L] is extended by doubling L; each new chunk
    is split into Gauss panels no wider than ``max_panel``.  Iteration stops
    once two consecutive chunks each contribute less than ``rtol`` relative
    to the running total.  ``f`` receives a 1-d array of abscissae and may
    return extra leading (batch) axes; convergence is judged on the worst
    batch entry.  Raises ConvergenceError if L would exceed ``cap``.
    """
    rule = rule or gauss_rule(32)
    total = 0.0
    lo, length = 0.0, initial
    quiet = 0
    while True:
        hi = length
        n_panels = max(1, int(np.ceil((hi - lo) / max_panel)))
        x, w = composite_nodes(rule, np.linspace(lo, hi, n_panels + 1))
        chunk = np.asarray(f(start + x.ravel())) @ w.ravel()
        total = total + chunk
        scale = np.abs(total)
        small = np.abs(chunk) <= rtol * np.where(scale > 0, scale, 1.0)
        quiet = quiet + 1 if np.all(small) else 0
        if quiet >= 2 and hi >= 16.0:
            return total
        if 2 * length > cap:
            raise ConvergenceError(
                f"semi-infinite integral not converged at truncation {length:g} (cap {cap:g})"
            )
        lo, length = hi, 2 * length


@lru_cache(maxsize=None)
def integration_matrix(q: int) -> np.ndarray:
    """S with (S @ f(nodes))[i] = int_{-1}^{x_i} p(x) dx for the interpolant p.

    p is the degree q-1 polynomial through f at the q Gauss nodes, expanded
    in Legendre polynomials; the Gauss rule integrates that expansion exactly.
    """
    rule = gauss_rule(q)
    x = rule.nodes
    leg = np.zeros((q + 1, q))  # P_0..P_q at the nodes
    leg[0] = 1.0
    if q:
        leg[1] = x
    for k in range(1, q):
        leg[k + 1] = ((2 * k + 1) * x * leg[k] - k * leg[k - 1]) / (k + 1)
    antider = np.empty((q, q))  # int_{-1}^{x_i} P_k
    antider[0] = x + 1.0
    for k in range(1, q):
        antider[k] = (leg[k + 1] - leg[k - 1]) / (2 * k + 1)
    coef = (np.arange(q) + 0.5)[:, None] * leg[:q] * rule.weights[None, :]  # (k, j)
    mat = antider.T @ coef
    mat.setflags(write=False)
    return mat
