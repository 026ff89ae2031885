"""Independent reference prices: exact Black-Scholes, Hagan-Woodward implied
volatility for CEV, and a Crank-Nicolson finite-difference solver."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.linalg import solve_banded
from scipy.sparse import diags
from scipy.sparse.linalg import splu

from .errors import DomainError, SingularMatrix
from .grid import PriceCurve, SpatialGrid
from .models import Model
from .pricing import Payoff

__all__ = [
    "norm_cdf",
    "norm_pdf",
    "bs_exact",
    "bs_delta",
    "bs_gamma",
    "bs_kernel",
    "hagan_woodward_vol",
    "hagan_woodward_price",
    "CNConfig",
    "cn_solve",
]

ArrayLike = Union[float, np.ndarray]


def norm_cdf(x: ArrayLike) -> ArrayLike:
    """Cumulative standard normal via the complementary error function."""
    from scipy.special import erfc

    return 0.5 * erfc(-np.asarray(x, dtype=float) / np.sqrt(2.0))


def norm_pdf(x: ArrayLike) -> ArrayLike:
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)


def _bs_d1_d2(t: float, K: float, x: ArrayLike, sigma: float, r: float):
    if t <= 0.0 or K <= 0.0 or sigma <= 0.0:
        raise DomainError("bs_exact needs t > 0, K > 0, sigma > 0")
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0):
        raise DomainError("bs_exact needs x > 0")
    st = sigma * np.sqrt(t)
    d1 = (np.log(xa / K) + (r + 0.5 * sigma * sigma) * t) / st
    return d1, d1 - st


def bs_exact(t: float, K: float, x: ArrayLike, sigma: float, r: float = 0.0) -> ArrayLike:
    """Exact Black-Scholes call price x N(d1) - K e^(-rt) N(d2)."""
    d1, d2 = _bs_d1_d2(t, K, x, sigma, r)
    v = np.asarray(x, dtype=float) * norm_cdf(d1) - K * np.exp(-r * t) * norm_cdf(d2)
    return float(v) if not isinstance(x, np.ndarray) else v


def bs_delta(t: float, K: float, x: ArrayLike, sigma: float, r: float = 0.0) -> ArrayLike:
    d1, _ = _bs_d1_d2(t, K, x, sigma, r)
    v = norm_cdf(d1)
    return float(v) if not isinstance(x, np.ndarray) else v


def bs_gamma(t: float, K: float, x: ArrayLike, sigma: float, r: float = 0.0) -> ArrayLike:
    d1, _ = _bs_d1_d2(t, K, x, sigma, r)
    v = norm_pdf(d1) / (np.asarray(x, dtype=float) * sigma * np.sqrt(t))
    return float(v) if not isinstance(x, np.ndarray) else v


def bs_kernel(t: float, x: float, y: ArrayLike, sigma: float, r: float = 0.0) -> ArrayLike:
    """Discounted lognormal transition density of the lognormal model.

    exp(-rt) / (y sqrt(2 pi sigma^2 t)) * exp(-(ln(x/y) + (r - sigma^2/2) t)^2
                                              / (2 sigma^2 t))
    """
    if t <= 0.0 or sigma <= 0.0 or x <= 0.0:
        raise DomainError("bs_kernel needs t, sigma, x > 0")
    ya = np.asarray(y, dtype=float)
    if np.any(ya <= 0.0):
        raise DomainError("bs_kernel needs y > 0")
    s2t = sigma * sigma * t
    arg = (np.log(x / ya) + (r - 0.5 * sigma * sigma) * t) ** 2 / (2.0 * s2t)
    return np.exp(-r * t) / (ya * np.sqrt(2.0 * np.pi * s2t)) * np.exp(-arg)


def hagan_woodward_vol(t: float, K: float, s0: ArrayLike, sigma: float, beta: float,
                       r: float = 0.0) -> ArrayLike:
    """Hagan-Woodward equivalent lognormal volatility for the CEV model.

    sigma_B = a/f^(1-beta) * (1 + (1-beta)(2+beta)/24 * ((e^{rT} S0 - K)/f)^2
                                + (1-beta)^2 a^2 T / (24 f^(2(1-beta))))
    with a = sigma * sqrt((e^{2r(1-beta)T} - 1)/(2r(1-beta)T)) and
    f = (e^{rT} S0 + K)/2.  The r -> 0 singularity is removable (a -> sigma).
    """
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    if t <= 0.0 or K <= 0.0 or sigma <= 0.0:
        raise DomainError("hagan_woodward_vol needs t, K, sigma > 0")
    s0a = np.asarray(s0, dtype=float)
    if np.any(s0a <= 0.0):
        raise DomainError("hagan_woodward_vol needs s0 > 0")
    u = 2.0 * r * (1.0 - beta) * t
    growth = np.expm1(u) / u if u != 0.0 else 1.0
    a = sigma * np.sqrt(growth)
    fwd = np.exp(r * t) * s0a
    f = (fwd + K) / 2.0
    omb = 1.0 - beta
    vol = a / f**omb * (
        1.0
        + omb * (2.0 + beta) / 24.0 * ((fwd - K) / f) ** 2
        + omb * omb * a * a * t / (24.0 * f ** (2.0 * omb))
    )
    return float(vol) if not isinstance(s0, np.ndarray) else vol


def hagan_woodward_price(t: float, K: float, s0: ArrayLike, sigma: float, beta: float,
                         r: float = 0.0) -> ArrayLike:
    """CEV call price: Black-Scholes evaluated at the Hagan-Woodward volatility."""
    vol = hagan_woodward_vol(t, K, s0, sigma, beta, r)
    s0a = np.asarray(s0, dtype=float)
    if isinstance(s0, np.ndarray):
        return np.array([bs_exact(t, K, float(s), float(v), r) for s, v in zip(s0a, np.asarray(vol))])
    return bs_exact(t, K, float(s0), float(vol), r)


@dataclass(frozen=True)
class CNConfig:
    """Grid and time-step configuration for the Crank-Nicolson solver."""

    grid: SpatialGrid
    dt: float
    t_total: float

    def __post_init__(self) -> None:
        if self.dt <= 0.0 or not np.isfinite(self.dt):
            raise DomainError("dt must be positive and finite")
        if self.t_total < self.dt:
            raise DomainError("t_total must be at least dt")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_total / self.dt)))


def _operator_bands(model: Model, t: float, xs: np.ndarray, dx: float):
    """Tridiagonal bands (sub, diag, super) of the spatial operator
    1/2 a^2 u'' + b u' + c u at interior nodes (index 1..n-2)."""
    a, b, c = model.coefficients(t, xs)
    a = np.broadcast_to(np.asarray(a, dtype=float), xs.shape)
    b = np.broadcast_to(np.asarray(b, dtype=float), xs.shape)
    c = np.broadcast_to(np.asarray(c, dtype=float), xs.shape)
    diff = 0.5 * a * a / dx**2
    adv = b / (2.0 * dx)
    lo = diff - adv          # coefficient of u_{i-1}
    mid = -2.0 * diff + c    # coefficient of u_i
    hi = diff + adv          # coefficient of u_{i+1}
    return lo, mid, hi


def cn_solve(model: Model, config: CNConfig, payoff: Payoff) -> PriceCurve:
    """Crank-Nicolson time stepping of du/dt = 1/2 a^2 u'' + b u' + c u.

    Initial data is the payoff sampled on the grid.  Lower boundary: Dirichlet
    u(t, x_min) = h(x_min) exp(c(x_min) t) (zero for calls and butterflies).
    Upper boundary: zero second derivative, folded into the last interior row
    so the system stays tridiagonal.
    """
    xs = config.grid.nodes
    dx = config.grid.dx
    n = xs.size
    if n < 4:
        raise DomainError("Crank-Nicolson grid needs at least 4 nodes")
    n_steps = config.n_steps
    dt = config.t_total / n_steps

    u = np.asarray(payoff(xs), dtype=float).copy()
    h0 = u[0]
    _, _, c_left = model.coefficients(0.0, xs[0])
    c_left = float(np.asarray(c_left))

    time_dep = model.is_time_dependent
    lu = None
    ab = None

    def build_implicit(t_new: float):
        """Banded matrix of I - dt/2 * A over unknowns u_0..u_{n-2}."""
        lo, mid, hi = _operator_bands(model, t_new, xs, dx)
        m = n - 1
        sub = np.zeros(m)
        diag = np.ones(m)
        sup = np.zeros(m)
        # interior rows 1..n-3 reference u_{i-1}, u_i, u_{i+1} normally
        idx = np.arange(1, m - 1)
        sub[idx - 1] = -0.5 * dt * lo[idx]
        diag[idx] = 1.0 - 0.5 * dt * mid[idx]
        sup[idx + 1] = -0.5 * dt * hi[idx]
        # row n-2: u_{n-1} = 2 u_{n-2} - u_{n-3} folds into the row
        i = m - 1
        sub[i - 1] = -0.5 * dt * (lo[i] - hi[i])
        diag[i] = 1.0 - 0.5 * dt * (mid[i] + 2.0 * hi[i])
        return sub, diag, sup

    def apply_explicit(t_old: float, u_old: np.ndarray) -> np.ndarray:
        lo, mid, hi = _operator_bands(model, t_old, xs, dx)
        out = u_old.copy()
        i = slice(1, n - 1)
        out[i] = u_old[i] + 0.5 * dt * (
            lo[i] * u_old[0:n - 2] + mid[i] * u_old[i] + hi[i] * u_old[2:n]
        )
        return out

    if not time_dep:
        sub, diag, sup = build_implicit(0.0)
        m = n - 1
        mat = diags(
            [sub[:-1], diag, sup[1:]], offsets=[-1, 0, 1], shape=(m, m), format="csc"
        )
        try:
            lu = splu(mat)
        except RuntimeError as exc:
            raise SingularMatrix(str(exc)) from exc

    for k in range(n_steps):
        t_old = k * dt
        t_new = (k + 1) * dt
        rhs_full = apply_explicit(t_old, u)
        rhs = rhs_full[: n - 1].copy()
        rhs[0] = h0 * np.exp(c_left * t_new)
        if time_dep:
            sub, diag, sup = build_implicit(t_new)
            ab = np.zeros((3, n - 1))
            ab[0, 1:] = sup[1:]
            ab[1, :] = diag
            ab[2, :-1] = sub[:-1]
            try:
                sol = solve_banded((1, 1), ab, rhs)
            except np.linalg.LinAlgError as exc:  # pragma: no cover
                raise SingularMatrix(str(exc)) from exc
        else:
            sol = lu.solve(rhs)
        u[: n - 1] = sol
        u[n - 1] = 2.0 * u[n - 2] - u[n - 3]

    return PriceCurve(xs, u)
