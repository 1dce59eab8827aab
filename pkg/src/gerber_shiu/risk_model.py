"""Claim-size laws, penalty functions and the Gerber-Shiu Volterra equation.

Built-in claim laws have survival functions that are finite sums of terms
``a * x**k * exp(-r*x)``; such an :class:`ExpPoly` is closed under the tail
integrals, Laplace transforms and multiplication by ``x`` needed for the
penalty tail ``A``, its mass ``m_A`` and the transforms ``phi1`` and ``beta``.
Every quantity also has a quadrature route that works for custom inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DomainError
from .quadrature import gauss_rule, integrate_to_infinity

ArrayLike = float | np.ndarray


def _as_nonneg(x, what="x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError(f"{what} must be >= 0")
    return arr


def _out(arr: np.ndarray, like) -> ArrayLike:
    return float(arr) if np.ndim(like) == 0 else arr


# ----------------------------------------------------------------------------
# exponential polynomials


@dataclass(frozen=True)
class ExpPoly:
    """Finite sum of ``coef * x**k * exp(-rate*x)`` terms, ``rate > 0``."""

    terms: tuple[tuple[float, int, float], ...]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for coef, k, rate in self.terms:
            out = out + coef * x**k * np.exp(-rate * x)
        return out

    def __add__(self, other: ExpPoly) -> ExpPoly:
        return ExpPoly(self.terms + other.terms)

    def scaled(self, factor: float) -> ExpPoly:
        return ExpPoly(tuple((factor * a, k, r) for a, k, r in self.terms))

    def times_x(self) -> ExpPoly:
        return ExpPoly(tuple((a, k + 1, r) for a, k, r in self.terms))

    def tail(self) -> ExpPoly:
        """x -> integral of self over [x, inf)."""
        out = []
        for a, k, r in self.terms:
            for j in range(k + 1):
                out.append((a * factorial(k) / factorial(j) / r ** (k - j + 1), j, r))
        return ExpPoly(tuple(out))

    def derivative(self) -> ExpPoly:
        out = []
        for a, k, r in self.terms:
            if k:
                out.append((a * k, k - 1, r))
            out.append((-a * r, k, r))
        return ExpPoly(tuple(out))

    def laplace(self, s):
        """Laplace transform at ``s >= 0``."""
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for a, k, r in self.terms:
            out = out + a * factorial(k) / (s + r) ** (k + 1)
        return out

    def total(self) -> float:
        return float(sum(a * factorial(k) / r ** (k + 1) for a, k, r in self.terms))


# ----------------------------------------------------------------------------
# claim-size laws


class ClaimModel:
    """Claim-size distribution on (0, inf).

    Subclasses supply ``density``, ``cdf``, ``survival`` and ``mean``.
    ``survival_poly`` is the closed form of the survival function when one
    exists, else None.
    """

    survival_poly: ExpPoly | None = None

    @property
    def mean(self) -> float:
        raise NotImplementedError

    def density(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def survival(self, x):
        return self.survival_poly(x)

    def sample(self, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
        """Map two independent uniform(0,1) arrays to claim sizes."""
        raise ConfigurationError(f"{type(self).__name__} has no sampler")


@dataclass(frozen=True)
class Exponential(ClaimModel):
    rate: float = 1.0

    def __post_init__(self):
        if not self.rate > 0:
            raise ConfigurationError("exponential rate must be positive")

    @property
    def survival_poly(self):
        return ExpPoly(((1.0, 0, self.rate),))

    @property
    def mean(self):
        return 1.0 / self.rate

    def density(self, x):
        return self.rate * np.exp(-self.rate * np.asarray(x, dtype=float))

    def cdf(self, x):
        return -np.expm1(-self.rate * np.asarray(x, dtype=float))

    def sample(self, u1, u2):
        return -np.log(u1) / self.rate


@dataclass(frozen=True)
class Erlang2(ClaimModel):
    """Gamma law with shape 2; density rate^2 x exp(-rate x)."""

    rate: float = 2.0

    def __post_init__(self):
        if not self.rate > 0:
            raise ConfigurationError("Erlang rate must be positive")

    @property
    def survival_poly(self):
        return ExpPoly(((1.0, 0, self.rate), (self.rate, 1, self.rate)))

    @property
    def mean(self):
        return 2.0 / self.rate

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return self.rate**2 * x * np.exp(-self.rate * x)

    def cdf(self, x):
        return 1.0 - self.survival(x)

    def sample(self, u1, u2):
        return -(np.log(u1) + np.log(u2)) / self.rate


@dataclass(frozen=True)
class CombinationOfExponentials(ClaimModel):
    """Density w1 r1 exp(-r1 x) + w2 r2 exp(-r2 x) with w1 + w2 = 1.

    The defaults give 3 exp(-1.5x) - 3 exp(-3x), the sum of independent
    Exp(1.5) and Exp(3) variables.
    """

    w1: float = 2.0
    r1: float = 1.5
    w2: float = -1.0
    r2: float = 3.0

    def __post_init__(self):
        if not (self.r1 > 0 and self.r2 > 0):
            raise ConfigurationError("rates must be positive")
        if abs(self.w1 + self.w2 - 1.0) > 1e-12:
            raise ConfigurationError("weights must sum to 1")
        # f(0) >= 0 and f >= 0 at infinity
        slow_w = self.w1 if self.r1 < self.r2 else self.w2
        if self.w1 * self.r1 + self.w2 * self.r2 < 0 or slow_w < 0:
            raise ConfigurationError("weights do not define a density")

    @property
    def survival_poly(self):
        return ExpPoly(((self.w1, 0, self.r1), (self.w2, 0, self.r2)))

    @property
    def mean(self):
        return self.w1 / self.r1 + self.w2 / self.r2

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return self.w1 * self.r1 * np.exp(-self.r1 * x) + self.w2 * self.r2 * np.exp(-self.r2 * x)

    def cdf(self, x):
        return 1.0 - self.survival(x)

    def _is_hypoexponential(self):
        d = self.r2 - self.r1
        return d != 0 and abs(self.w1 - self.r2 / d) < 1e-12 and abs(self.w2 + self.r1 / d) < 1e-12

    def sample(self, u1, u2):
        if self._is_hypoexponential():
            return -np.log(u1) / self.r1 - np.log(u2) / self.r2
        if self.w1 >= 0 and self.w2 >= 0:
            rate = np.where(u2 < self.w1, self.r1, self.r2)
            return -np.log(u1) / rate
        raise ConfigurationError("no sampler for this combination of exponentials")


@dataclass(frozen=True)
class CustomClaims(ClaimModel):
    """User-supplied law.  Callables must accept numpy arrays.

    ``survival`` defaults to ``1 - cdf``; ``sampler(u1, u2)`` is only
    needed for Monte Carlo.
    """

    density_fn: Callable
    cdf_fn: Callable
    mean_value: float
    survival_fn: Callable | None = None
    sampler: Callable | None = None

    @property
    def mean(self):
        return float(self.mean_value)

    def density(self, x):
        return np.asarray(self.density_fn(np.asarray(x, dtype=float)), dtype=float)

    def cdf(self, x):
        return np.asarray(self.cdf_fn(np.asarray(x, dtype=float)), dtype=float)

    def survival(self, x):
        if self.survival_fn is not None:
            return np.asarray(self.survival_fn(np.asarray(x, dtype=float)), dtype=float)
        return 1.0 - self.cdf(x)

    def sample(self, u1, u2):
        if self.sampler is None:
            raise ConfigurationError("custom claim law has no sampler")
        return np.asarray(self.sampler(u1, u2), dtype=float)


# ----------------------------------------------------------------------------
# penalties


class Penalty:
    """Penalty w(x, y) of the surplus before ruin x and the deficit y."""

    name = "custom"

    def w(self, x, y):
        raise NotImplementedError

    def tail_poly(self, sbar: ExpPoly) -> ExpPoly | None:
        """Closed form of A given the survival function, if available."""
        return None


class RuinIndicator(Penalty):
    name = "ruin"

    def w(self, x, y):
        return np.ones(np.broadcast(x, y).shape)

    def tail_poly(self, sbar):
        return sbar

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(type(self))


class ClaimCausingRuin(Penalty):
    name = "claimcause"

    def w(self, x, y):
        return np.asarray(x) + np.asarray(y)

    def tail_poly(self, sbar):
        # int_t^inf s dF(s) = t*Fbar(t) + int_t^inf Fbar
        return sbar.times_x() + sbar.tail()

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(type(self))


class DeficitAtRuin(Penalty):
    name = "deficit"

    def w(self, x, y):
        return np.asarray(y) + 0.0 * np.asarray(x)

    def tail_poly(self, sbar):
        # int_t^inf (s - t) dF(s) = int_t^inf Fbar
        return sbar.tail()

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(type(self))


@dataclass(frozen=True, eq=False)
class CustomPenalty(Penalty):
    """Arbitrary nonnegative penalty; ``fn(x, y)`` must broadcast."""

    fn: Callable
    name: str = "custom"

    def w(self, x, y):
        return np.asarray(self.fn(x, y), dtype=float)


PENALTIES = {"ruin": RuinIndicator, "claimcause": ClaimCausingRuin, "deficit": DeficitAtRuin}


# ----------------------------------------------------------------------------
# model parameters


@dataclass(frozen=True)
class RiskParams:
    """Premium rate c, claim intensity lam, interest force delta, discount alpha.

    ``lam = 0`` is accepted (no-claims fixtures); the loading condition
    c > lam * mu depends on the claim law and is checked by the operations
    that need it via :meth:`check_loading`.
    """

    c: float = 1.2
    lam: float = 1.0
    delta: float = 0.01
    alpha: float = 0.0

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigurationError(f"premium rate c must be positive, got {self.c}")
        if self.lam < 0 or self.delta < 0 or self.alpha < 0:
            raise ConfigurationError("lam, delta and alpha must be nonnegative")

    def loading(self, model: ClaimModel) -> float:
        """Premium loading theta with c = lam*mu*(1 + theta)."""
        return self.c / (self.lam * model.mean) - 1.0 if self.lam > 0 else np.inf

    def check_loading(self, model: ClaimModel):
        if not self.c > self.lam * model.mean:
            raise ConfigurationError(
                f"positive loading required: c={self.c} <= lam*mu={self.lam * model.mean}"
            )


# ----------------------------------------------------------------------------
# model-derived functions

_METHODS = ("auto", "closed", "quad")


def _poly_or_none(model: ClaimModel, penalty: Penalty | None, method: str):
    if method not in _METHODS:
        raise ConfigurationError(f"method must be one of {_METHODS}")
    if method == "quad":
        return None
    sbar = model.survival_poly
    poly = None
    if sbar is not None:
        poly = sbar if penalty is None else penalty.tail_poly(sbar)
    if poly is None and method == "closed":
        raise ConfigurationError("no closed form for this model/penalty pair")
    return poly


def survival(model: ClaimModel, x: ArrayLike) -> ArrayLike:
    """Fbar(x) = 1 - F(x), in closed form where one exists."""
    arr = _as_nonneg(x)
    return _out(np.asarray(model.survival(arr), dtype=float), x)


def _tail_quad(model: ClaimModel, penalty: Penalty, t: np.ndarray) -> np.ndarray:
    tt = np.atleast_1d(t)[:, None]
    return integrate_to_infinity(lambda y: penalty.w(tt, y) * model.density(tt + y))


def penalty_tail_A(model: ClaimModel, penalty: Penalty, t: ArrayLike, method: str = "auto") -> ArrayLike:
    """A(t) = int_t^inf w(t, s - t) dF(s)."""
    arr = _as_nonneg(t, "t")
    poly = _poly_or_none(model, penalty, method)
    if poly is not None:
        return _out(poly(arr), t)
    return _out(_tail_quad(model, penalty, arr).reshape(arr.shape), t)


def penalty_mass_mA(model: ClaimModel, penalty: Penalty, method: str = "auto") -> float:
    """m_A = int_0^inf A(t) dt; exactly the mean for the ruin indicator."""
    if isinstance(penalty, RuinIndicator) and method != "quad":
        return model.mean
    poly = _poly_or_none(model, penalty, method)
    if poly is not None:
        return poly.total()
    return float(integrate_to_infinity(lambda t: _tail_quad(model, penalty, t)))


def phi1(model: ClaimModel, s: ArrayLike, method: str = "auto") -> ArrayLike:
    """phi1(s) = (1/mu) int_0^inf exp(-s x) Fbar(x) dx."""
    arr = _as_nonneg(s, "s")
    poly = _poly_or_none(model, None, method)
    if poly is not None:
        return _out(poly.laplace(arr) / model.mean, s)
    ss = np.atleast_1d(arr).ravel()[:, None]
    val = integrate_to_infinity(lambda x: np.exp(-ss * x) * model.survival(x)) / model.mean
    return _out(val.reshape(arr.shape), s)


def beta_transform(model: ClaimModel, penalty: Penalty, s: ArrayLike, method: str = "auto") -> ArrayLike:
    """beta(s) = (1/m_A) int_0^inf exp(-s x) A(x) dx."""
    arr = _as_nonneg(s, "s")
    poly = _poly_or_none(model, penalty, method)
    if poly is not None:
        return _out(poly.laplace(arr) / poly.total(), s)
    m_a = penalty_mass_mA(model, penalty, method="quad")
    ss = np.atleast_1d(arr).ravel()[:, None]
    val = integrate_to_infinity(lambda x: np.exp(-ss * x) * _tail_quad(model, penalty, x)) / m_a
    return _out(val.reshape(arr.shape), s)


class CumulativeTail:
    """u -> int_0^u A(t) dt on [0, horizon].

    Closed form when available; otherwise panel integrals of the quadrature
    route for A are accumulated once and the partial panel is integrated
    directly at each query point.
    """

    def __init__(self, model: ClaimModel, penalty: Penalty, horizon: float,
                 method: str = "auto", panel: float = 0.25):
        self.horizon = float(horizon)
        poly = _poly_or_none(model, penalty, method)
        self._poly = poly
        if poly is not None:
            self._mass = poly.total()
            self._tail = poly.tail()
            return
        self._a = lambda t: _tail_quad(model, penalty, np.asarray(t, dtype=float).ravel())
        self._rule = gauss_rule(16)
        n = max(1, int(np.ceil(self.horizon / panel)))
        self._edges = np.linspace(0.0, self.horizon, n + 1)
        x, w = self._rule.mapped(0.0, 1.0)
        widths = np.diff(self._edges)
        nodes = self._edges[:-1, None] + widths[:, None] * x
        vals = self._a(nodes).reshape(nodes.shape)
        self._cum = np.concatenate([[0.0], np.cumsum(vals @ w * widths)])

    def __call__(self, u):
        arr = _as_nonneg(u, "u")
        if self._poly is not None:
            return _out(self._mass - self._tail(arr), u)
        flat = np.atleast_1d(arr).ravel()
        if np.any(flat > self.horizon * (1 + 1e-12)):
            raise DomainError("cumulative tail queried beyond its horizon")
        k = np.clip(np.searchsorted(self._edges, flat, side="right") - 1, 0, len(self._edges) - 2)
        left = self._edges[k]
        x, w = self._rule.mapped(0.0, 1.0)
        nodes = left[:, None] + (flat - left)[:, None] * x
        part = (self._a(nodes).reshape(nodes.shape) @ w) * (flat - left)
        return _out((self._cum[k] + part).reshape(arr.shape), u)


def gs_kernel(params: RiskParams, model: ClaimModel, u: ArrayLike, t: ArrayLike) -> ArrayLike:
    """K(u, t) = (delta + alpha + lam*Fbar(u - t)) / (c + delta*u), 0 <= t <= u."""
    u_arr, t_arr = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(t, dtype=float))
    if np.any(t_arr > u_arr) or np.any(t_arr < 0):
        raise DomainError("kernel requires 0 <= t <= u")
    val = (params.delta + params.alpha + params.lam * model.survival(u_arr - t_arr)) / (
        params.c + params.delta * u_arr
    )
    return float(val) if val.ndim == 0 else val


def _require_alpha_zero(params: RiskParams):
    if params.alpha != 0:
        raise ConfigurationError(
            "the second-kind forcing is only available for alpha = 0"
        )


def gs_forcing(params: RiskParams, model: ClaimModel, penalty: Penalty, phi0: float, u: ArrayLike,
               *, cumulative: CumulativeTail | None = None) -> ArrayLike:
    """g(u) = (c*phi0 - lam * int_0^u A) / (c + delta*u)."""
    _require_alpha_zero(params)
    arr = _as_nonneg(u, "u")
    if params.lam == 0:
        integral = np.zeros_like(arr)
    else:
        cum = cumulative or CumulativeTail(model, penalty, float(np.max(arr, initial=0.0)))
        integral = np.asarray(cum(arr))
    val = (params.c * phi0 - params.lam * integral) / (params.c + params.delta * arr)
    return _out(val, u)


def build_gs_vie(params: RiskParams, model: ClaimModel, penalty: Penalty, phi0: float, T: float):
    """Volterra problem Phi(u) = g(u) + int_0^u K(u, t) Phi(t) dt on [0, T]."""
    from .vie import VieProblem

    _require_alpha_zero(params)
    if not T > 0:
        raise DomainError("horizon T must be positive")
    cum = CumulativeTail(model, penalty, T) if params.lam > 0 else None

    def forcing(u):
        return gs_forcing(params, model, penalty, phi0, u, cumulative=cum)

    def kernel(u, t):
        return gs_kernel(params, model, u, t)

    def multiplier(u):
        return 1.0 / (params.c + params.delta * np.asarray(u, dtype=float))

    def difference_kernel(x):
        return params.delta + params.alpha + params.lam * model.survival(np.asarray(x, dtype=float))

    return VieProblem(forcing, kernel, float(T), factorized=(multiplier, difference_kernel))
