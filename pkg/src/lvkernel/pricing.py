"""Option valuation: closed forms at basepoint z=x, quadrature pricing for
general basepoints and payoffs, puts via parity, finite-difference Greeks."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.special import erf

from .errors import DomainError, GridTooCoarseWarning
from .grid import PriceCurve, SpatialGrid, simpson_weights
from .kernel import KernelSpec, kernel_eval
from .models import BasepointRule, Model

__all__ = [
    "Payoff",
    "CallPayoff",
    "PutPayoff",
    "ButterflyPayoff",
    "SampledPayoff",
    "price_call_closed",
    "price_call_cev_closed",
    "price_put",
    "price_butterfly_closed",
    "price_quadrature",
    "price_curve",
    "greeks",
    "curve_greeks",
]

ArrayLike = Union[float, np.ndarray]

_SQRT_2PI = np.sqrt(2.0 * np.pi)


class Payoff:
    """Terminal condition h(y).  Subclasses are callable on scalars or arrays."""

    def __call__(self, y: ArrayLike) -> ArrayLike:
        raise NotImplementedError


@dataclass(frozen=True)
class CallPayoff(Payoff):
    strike: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.strike) or self.strike <= 0.0:
            raise DomainError("strike must be positive")

    def __call__(self, y: ArrayLike) -> ArrayLike:
        return np.maximum(np.asarray(y, dtype=float) - self.strike, 0.0)


@dataclass(frozen=True)
class PutPayoff(Payoff):
    strike: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.strike) or self.strike <= 0.0:
            raise DomainError("strike must be positive")

    def __call__(self, y: ArrayLike) -> ArrayLike:
        return np.maximum(self.strike - np.asarray(y, dtype=float), 0.0)


@dataclass(frozen=True)
class ButterflyPayoff(Payoff):
    """Hat function vanishing outside [k1, k2] and peaking at k."""

    k1: float
    k: float
    k2: float

    def __post_init__(self) -> None:
        if not (0.0 < self.k1 < self.k < self.k2):
            raise DomainError("butterfly strikes must satisfy 0 < k1 < k < k2")

    @property
    def call_weights(self) -> tuple[float, float, float]:
        """Weights (w1, w2, w3) so that the hat equals
        w1*call(k1) - w2*call(k) + w3*call(k2)."""
        w2 = (self.k2 - self.k1) / (self.k2 - self.k)
        w3 = (self.k - self.k1) / (self.k2 - self.k)
        return 1.0, w2, w3

    def __call__(self, y: ArrayLike) -> ArrayLike:
        y = np.asarray(y, dtype=float)
        w1, w2, w3 = self.call_weights
        return (
            w1 * np.maximum(y - self.k1, 0.0)
            - w2 * np.maximum(y - self.k, 0.0)
            + w3 * np.maximum(y - self.k2, 0.0)
        )


@dataclass(frozen=True)
class SampledPayoff(Payoff):
    """Payoff specified by samples on a grid; evaluated by linear interpolation."""

    y: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if y.ndim != 1 or v.shape != y.shape or y.size < 2:
            raise DomainError("sampled payoff needs matching 1-D arrays of length >= 2")
        if not np.all(np.diff(y) > 0.0):
            raise DomainError("sample points must be strictly increasing")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "values", v)

    def __call__(self, yq: ArrayLike) -> ArrayLike:
        return np.interp(yq, self.y, self.values)


def _check_order(order: int) -> int:
    if order not in (1, 2):
        raise DomainError(f"price order must be 1 or 2, got {order}")
    return order


def _as_input_kind(value: ArrayLike, scalar: bool) -> ArrayLike:
    """Return a float for scalar inputs (np.where promotes scalars to 0-d arrays)."""
    return float(value) if scalar else value


def price_call_closed(order: int, model: Model, t: float, K: float, x: ArrayLike) -> ArrayLike:
    """Closed-form call price of order 1 or 2 at basepoint z = x.

    Order 1:
        sqrt(t)/(2 sqrt(2 pi)) * exp(-m^2/(2 a^2 t)) * (2a - a' m)
        + 1/2 (erf(m/(sqrt(2t) a)) + 1) * (b t + m),           m = x - K.
    Order 2 adds the moment integrals of the second-order kernel correction,
    expressed through the jet (equivalent to the risk-neutral closed form).
    """
    _check_order(order)
    if not np.isfinite(t) or t <= 0.0:
        raise DomainError(f"time must be positive and finite, got {t}")
    if not np.isfinite(K) or K <= 0.0:
        raise DomainError("strike must be positive")
    scalar = not isinstance(x, np.ndarray)
    x = np.asarray(x, dtype=float) if not scalar else float(x)
    jet = model.jet(x)
    a, ap = jet.a, jet.da_dx
    m = x - K
    s2 = a * a * t
    q = m * m / (2.0 * s2)
    alive = q <= 745.0
    expq = np.where(alive, np.exp(-np.minimum(q, 745.0)), 0.0)
    E = 0.5 * (erf(m / (np.sqrt(2.0 * t) * a)) + 1.0)
    u1 = np.sqrt(t) / (2.0 * _SQRT_2PI) * expq * (2.0 * a - ap * m) + E * (jet.b * t + m)
    if order == 1:
        return _as_input_kind(u1, scalar)

    app, adot, b, bp, c = jet.d2a_dx2, jet.da_dt, jet.b, jet.db_dx, jet.c
    g = expq / np.sqrt(2.0 * np.pi * s2)        # Gaussian density at the strike
    F = m * E + s2 * g                          # int G0(x,y) (y-K)+ dy
    a2 = a * a
    a3 = a2 * a
    ap2 = ap * ap
    p2 = 0.5 * (0.5 * a3 * app + a2 * bp + a2 * ap2 / 2.0 + b * b + a * (b * ap + adot))
    p4 = (a2 / 3.0) * (0.5 * a3 * app + 2.0 * a2 * ap2 + 1.5 * a * ap * b)
    p6 = a3 * a3 * ap2 / 8.0
    m2 = m * m
    corr = (
        t * c * F
        + g * (t * t * p2
               + t * p4 * (m2 - s2) / (a2 * a2)
               + p6 * (m2 * m2 - 6.0 * m2 * s2 + 3.0 * s2 * s2) / (a2 * a2 * a2 * a2))
    )
    return _as_input_kind(u1 + corr, scalar)


def price_call_cev_closed(t: float, K: float, x: ArrayLike, sigma: float, alpha: float,
                          r: float = 0.0) -> ArrayLike:
    """First-order closed-form CEV call price at basepoint z = x.

    sigma*x^(alpha-1)*sqrt(t)/(2 sqrt(2 pi)) * exp(-m^2/(2 sigma^2 t x^(2 alpha)))
        * ((2-alpha) x + alpha K)
    + 1/2 (erf(m/(sqrt(2t) sigma x^alpha)) + 1) * ((1 + r t) x - K).
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if sigma <= 0.0:
        raise DomainError("sigma must be positive")
    if t <= 0.0 or K <= 0.0:
        raise DomainError("t and K must be positive")
    scalar = not isinstance(x, np.ndarray)
    x = np.asarray(x, dtype=float) if not scalar else float(x)
    if np.any(np.asarray(x) <= 0.0):
        raise DomainError("spot must be positive")
    m = x - K
    ax = sigma * x**alpha
    q = m * m / (2.0 * t * ax * ax)
    expq = np.where(q <= 745.0, np.exp(-np.minimum(q, 745.0)), 0.0)
    gauss = sigma * x ** (alpha - 1.0) * np.sqrt(t) / (2.0 * _SQRT_2PI) * expq \
        * ((2.0 - alpha) * x + alpha * K)
    tail = 0.5 * (erf(m / (np.sqrt(2.0 * t) * ax)) + 1.0) * ((1.0 + r * t) * x - K)
    return _as_input_kind(gauss + tail, scalar)


def price_put(order: int, model: Model, t: float, K: float, x: ArrayLike) -> ArrayLike:
    """Put price via parity: put = call - forward.

    The order-1 forward is int G1(x,y)(y-K) dy = (x-K) + b t; at order 2 the
    only extra full-line moment is c t (x-K) (the higher Hermite terms have
    vanishing first moments).
    """
    _check_order(order)
    scalar = not isinstance(x, np.ndarray)
    call = price_call_closed(order, model, t, K, x)
    jet = model.jet(x if not scalar else float(x))
    m = (np.asarray(x, dtype=float) if not scalar else float(x)) - K
    forward = m + jet.b * t
    if order == 2:
        forward = forward + jet.c * t * m
    return _as_input_kind(call - forward, scalar)


def price_butterfly_closed(order: int, model: Model, t: float, payoff: ButterflyPayoff,
                           x: ArrayLike) -> ArrayLike:
    """Closed-form butterfly price as a linear combination of three calls."""
    w1, w2, w3 = payoff.call_weights
    return (
        w1 * price_call_closed(order, model, t, payoff.k1, x)
        - w2 * price_call_closed(order, model, t, payoff.k, x)
        + w3 * price_call_closed(order, model, t, payoff.k2, x)
    )


def price_quadrature(spec: KernelSpec, t: float, payoff: Payoff, x: ArrayLike,
                     grid: SpatialGrid, check: bool = True) -> ArrayLike:
    """Composite-Simpson approximation of int kernel(x, y) h(y) dy over the grid.

    When ``check`` is true the value is recomputed on every second grid node;
    a difference beyond 1e-6*(1+|value|) emits GridTooCoarseWarning (the
    coarse comparison bounds the fine-grid quadrature error conservatively).
    """
    y = grid.nodes
    w = grid.weights
    hy = payoff(y)
    scalar = not isinstance(x, np.ndarray)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    k = kernel_eval(spec, t, xa[:, None], y[None, :])
    vals = k @ (w * hy)
    if check and grid.n_intervals % 2 == 0 and grid.n_intervals >= 4:
        w2 = simpson_weights(grid.n_nodes // 2 + 1, 2.0 * grid.dx)
        coarse = k[:, ::2] @ (w2 * hy[::2])
        defect = np.max(np.abs(vals - coarse) - 1e-6 * (1.0 + np.abs(vals)))
        if defect > 0.0:
            warnings.warn(
                f"quadrature grid dx={grid.dx} looks too coarse "
                f"(coarse-grid defect {defect:.3g})",
                GridTooCoarseWarning,
                stacklevel=2,
            )
    return float(vals[0]) if scalar else vals


def price_curve(spec: KernelSpec, t: float, payoff: Payoff, grid: SpatialGrid,
                method: str = "quadrature", check: bool = True) -> PriceCurve:
    """Price at every grid node, as a curve."""
    xs = grid.nodes
    if method == "closed":
        vals = _price_closed_dispatch(spec, t, payoff, xs)
    elif method == "quadrature":
        vals = price_quadrature(spec, t, payoff, xs, grid, check=check)
    else:
        raise DomainError(f"unknown pricing method {method!r}")
    return PriceCurve(xs, np.asarray(vals, dtype=float))


def _price_closed_dispatch(spec: KernelSpec, t: float, payoff: Payoff, x: ArrayLike) -> ArrayLike:
    if spec.basepoint is not BasepointRule.AT_X:
        raise DomainError("closed-form prices exist only for the z=x basepoint")
    order = spec.order
    if isinstance(payoff, CallPayoff):
        return price_call_closed(order, spec.model, t, payoff.strike, x)
    if isinstance(payoff, PutPayoff):
        return price_put(order, spec.model, t, payoff.strike, x)
    if isinstance(payoff, ButterflyPayoff):
        return price_butterfly_closed(order, spec.model, t, payoff, x)
    raise DomainError("closed-form pricing supports call, put and butterfly payoffs")


def greeks(price_fn: Callable[[float, ArrayLike], ArrayLike], t: float, x: ArrayLike,
           dx: float) -> tuple[ArrayLike, ArrayLike]:
    """Central-difference delta and gamma of an arbitrary pricing function.

    delta = (u(t, x+dx) - u(t, x-dx)) / (2 dx)
    gamma = (u(t, x+dx) + u(t, x-dx) - 2 u(t, x)) / dx^2
    """
    if dx <= 0.0:
        raise DomainError("dx must be positive")
    if np.any(np.asarray(x) - dx <= 0.0):
        raise DomainError("greeks need x - dx > 0")
    up = price_fn(t, np.asarray(x) + dx)
    dn = price_fn(t, np.asarray(x) - dx)
    mid = price_fn(t, x)
    delta = (np.asarray(up) - np.asarray(dn)) / (2.0 * dx)
    gamma = (np.asarray(up) + np.asarray(dn) - 2.0 * np.asarray(mid)) / dx**2
    return delta, gamma


def curve_greeks(curve: PriceCurve) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Central-difference delta and gamma on a curve's own nodes.

    Returns (x_inner, delta, gamma) on the interior nodes; the step is the
    curve's grid spacing.
    """
    x = curve.x
    if len(x) < 3:
        raise DomainError("need at least 3 samples for curve Greeks")
    dx = x[1] - x[0]
    u = curve.values
    delta = (u[2:] - u[:-2]) / (2.0 * dx)
    gamma = (u[2:] + u[:-2] - 2.0 * u[1:-1]) / dx**2
    return x[1:-1], delta, gamma
