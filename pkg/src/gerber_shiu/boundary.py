"""The initial value Phi_delta(0) from its Laplace-transform representation.

With E(z) = -c z + lam mu int_0^z phi1(delta s) ds,

    kappa   = c int_0^inf exp(E(z)) dz,
    Phi(0)  = (lam m_A / kappa) int_0^inf beta(delta z) exp(E(z)) dz,

and for the ruin indicator Phi(0) = (kappa - 1) / kappa.  Since phi1 <= 1
and c > lam mu, E' <= -(c - lam mu) < 0, which gives an explicit tail bound
exp(E(Z)) / (c - lam mu) for both integrals beyond a cut Z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .quadrature import composite_nodes, gauss_rule, integration_matrix
from .risk_model import (
    ClaimModel,
    Penalty,
    RiskParams,
    RuinIndicator,
    _require_alpha_zero,
    beta_transform,
    penalty_mass_mA,
    phi1,
)

PANEL_ORDER = 32
TAIL_RATIO = 1e-16
REFINE_RTOL = 1e-13
SHORTCUT_TOL = 1e-9
AUDIT_TOL = 1e-11
MAX_CUT = 1e5


@dataclass(frozen=True)
class Phi0Result:
    value: float
    kappa_delta: float
    truncation_point: float
    est_abs_error: float


def inner_exponent(params: RiskParams, model: ClaimModel, z):
    """E(z) = -c z + lam mu int_0^z phi1(delta s) ds by direct composite Gauss."""
    z_arr = np.asarray(z, dtype=float)
    rule = gauss_rule(PANEL_ORDER)
    out = np.empty(z_arr.size)
    for k, zk in enumerate(z_arr.ravel()):
        if zk < 0:
            raise DomainError("z must be >= 0")
        if zk == 0:
            out[k] = 0.0
            continue
        x, w = composite_nodes(rule, np.linspace(0.0, zk, int(np.ceil(zk)) + 1))
        vals = np.asarray(phi1(model, params.delta * x.ravel())).reshape(x.shape)
        out[k] = -params.c * zk + params.lam * model.mean * np.sum(vals * w)
    out = out.reshape(z_arr.shape)
    return float(out) if out.ndim == 0 else out


class _Ladder:
    """Nodes of unit-or-finer Gauss panels on [0, Z] with E(z) at each node.

    The inner integral is accumulated panel by panel; inside a panel it is
    read off the Legendre interpolant of phi1(delta s) through the panel's
    own Gauss nodes, so only one phi1 evaluation per node is needed.
    """

    def __init__(self, params: RiskParams, model: ClaimModel, cut: float, width: float):
        n_panels = int(round(cut / width))
        edges = np.arange(n_panels + 1) * width
        self.nodes, self.weights = composite_nodes(gauss_rule(PANEL_ORDER), edges)
        self.phi = np.asarray(phi1(model, params.delta * self.nodes.ravel())).reshape(self.nodes.shape)
        half = 0.5 * width
        panel = half * (self.phi @ gauss_rule(PANEL_ORDER).weights)
        start = np.concatenate([[0.0], np.cumsum(panel)])
        inner = start[:-1, None] + half * (self.phi @ integration_matrix(PANEL_ORDER).T)
        lam_mu = params.lam * model.mean
        self.inner = inner
        self.exponent = -params.c * self.nodes + lam_mu * inner
        self.end_exponent = -params.c * edges[1:] + lam_mu * start[1:]
        self.edges = edges

    def integral(self, factor=None) -> float:
        f = np.exp(self.exponent)
        if factor is not None:
            f = f * factor
        return float(np.sum(f * self.weights))


def _truncation_point(params: RiskParams, model: ClaimModel) -> float:
    """Smallest integer Z with exp(E(Z)) < 1e-16 * int_0^Z exp(E)."""
    chunk = 64
    total_cut = 0
    while True:
        cut = total_cut + chunk
        ladder = _Ladder(params, model, cut, 1.0)
        running = np.cumsum(np.exp(ladder.exponent) @ gauss_rule(PANEL_ORDER).weights * 0.5)
        hit = np.nonzero(np.exp(ladder.end_exponent) < TAIL_RATIO * running)[0]
        if hit.size:
            return float(ladder.edges[hit[0] + 1])
        if cut > MAX_CUT:
            raise NumericalError("outer integrand did not decay; check the loading condition")
        total_cut, chunk = cut, 2 * chunk


@dataclass(frozen=True)
class _Integrals:
    j0: float
    j1: float | None
    cut: float
    tail: float
    refine: float


def _integrals(params, model, beta=None, extend: float = 1.0, audit: bool = True) -> _Integrals:
    zstar = _truncation_point(params, model)
    cut = float(np.ceil(extend * zstar))
    width, prev = 1.0, None
    while True:
        ladder = _Ladder(params, model, cut, width)
        j0 = ladder.integral()
        j1 = None
        if beta is not None:
            j1 = ladder.integral(beta(params.delta * ladder.nodes))
        if prev is not None:
            d0 = abs(j0 - prev[0]) / j0
            d1 = 0.0 if j1 is None else abs(j1 - prev[1]) / max(abs(j1), 1e-300)
            if max(d0, d1) < REFINE_RTOL or width < 1 / 64:
                change = max(abs(j0 - prev[0]), 0.0 if j1 is None else abs(j1 - prev[1]))
                break
        prev, width = (j0, j1), width / 2
    if audit:
        _audit(params, model, ladder)
    tail = float(np.exp(ladder.end_exponent[-1])) / (params.c - params.lam * model.mean)
    return _Integrals(j0, j1, cut, tail, change)


def _audit(params, model, ladder: _Ladder, count: int = 20, seed: int = 20240229):
    """Compare the panel-interpolated inner integral with direct quadrature."""
    rng = np.random.default_rng(seed)
    flat = rng.choice(ladder.nodes.size, size=min(count, ladder.nodes.size), replace=False)
    z = ladder.nodes.ravel()[flat]
    lam_mu = params.lam * model.mean
    direct = np.asarray(inner_exponent(params, model, z)) + params.c * z
    fast = lam_mu * ladder.inner.ravel()[flat]
    err = np.abs(direct - fast) / np.maximum(1.0, np.abs(direct))
    if np.max(err, initial=0.0) > AUDIT_TOL:
        raise NumericalError(f"inner-integral audit failed: max relative error {np.max(err):.2e}")


def kappa_delta(params: RiskParams, model: ClaimModel) -> float:
    """kappa = c int_0^inf exp(E(z)) dz (equals c / (c - lam mu) when delta = 0)."""
    params.check_loading(model)
    return params.c * _integrals(params, model).j0


def phi0(params: RiskParams, model: ClaimModel, penalty: Penalty, *, extend: float = 1.0,
         audit: bool = True) -> Phi0Result:
    """Phi_delta(0) for penalty w.

    ``extend`` multiplies the adaptive outer cut (used to check truncation
    invariance).  For the ruin indicator the general formula is checked
    against (kappa - 1)/kappa and the latter is returned.
    """
    _require_alpha_zero(params)
    params.check_loading(model)
    m_a = penalty_mass_mA(model, penalty)
    ruin = isinstance(penalty, RuinIndicator)
    if ruin:
        beta = lambda s: np.asarray(phi1(model, s))  # noqa: E731
    else:
        beta = lambda s: np.asarray(beta_transform(model, penalty, s))  # noqa: E731
    res = _integrals(params, model, beta, extend=extend, audit=audit)
    kappa = params.c * res.j0
    value = params.lam * m_a * res.j1 / kappa
    # d(lam m_A J1 / (c J0)) from perturbations of J0 and J1 of size tail + refine
    err_j = res.tail + res.refine
    est = params.lam * m_a / kappa * err_j * (1.0 + res.j1 / res.j0)
    if ruin:
        shortcut = (kappa - 1.0) / kappa
        if abs(shortcut - value) > SHORTCUT_TOL:
            raise NumericalError(
                f"ruin boundary value mismatch: general {value!r} vs shortcut {shortcut!r}"
            )
        value = shortcut
        est = params.c * err_j / kappa**2
    return Phi0Result(float(value), float(kappa), res.cut, float(est))
