"""Short-time approximate transition kernels of orders 0, 1, and 2.

The order-n kernel is a Gaussian times a polynomial correction built from
rescaled Hermite polynomials H_k and coefficient polynomials P_0..P_6 of the
frozen-coefficient jet.  All operations are pure functions and vectorize over
numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError
from .models import BasepointRule, CoefficientJet, Model, basepoint

__all__ = [
    "EXP_ARG_MAX",
    "KernelSpec",
    "HermiteValues",
    "hermite",
    "g0",
    "g1_general",
    "g2_general",
    "kernel_eval",
]

ArrayLike = Union[float, np.ndarray]

# exp(-q) underflows double precision past this; the kernel is defined to be
# exactly zero there rather than subnormal noise
EXP_ARG_MAX = 745.0


@dataclass(frozen=True)
class KernelSpec:
    """Identifies one approximate kernel: model, expansion order, basepoint rule."""

    model: Model
    order: int = 2
    basepoint: BasepointRule = BasepointRule.AT_X

    def __post_init__(self) -> None:
        if self.order not in (0, 1, 2):
            raise DomainError(f"kernel order must be 0, 1 or 2, got {self.order}")


@dataclass(frozen=True)
class HermiteValues:
    """The seven values H_0..H_6 at a given Theta and scale a."""

    h: tuple

    def __getitem__(self, k: int) -> ArrayLike:
        return self.h[k]


def hermite(theta: ArrayLike, a: ArrayLike) -> HermiteValues:
    """Closed forms of the rescaled Hermite polynomials H_0..H_6.

    They satisfy H_0 = 1 and H_{k+1} = -Theta*H_k + H_k'(Theta)/a**2.
    """
    if np.any(np.asarray(a) <= 0.0):
        raise DomainError("hermite scale a must be positive")
    t = np.asarray(theta, dtype=float) if isinstance(theta, np.ndarray) else theta
    ia2 = 1.0 / (np.asarray(a, dtype=float) ** 2) if isinstance(a, np.ndarray) else 1.0 / a**2
    t2 = t * t
    h0 = np.ones_like(t) if isinstance(t, np.ndarray) else 1.0
    h1 = -t
    h2 = t2 - ia2
    h3 = -t * t2 + 3.0 * t * ia2
    h4 = t2 * t2 - 6.0 * t2 * ia2 + 3.0 * ia2 * ia2
    h5 = -t * t2 * t2 + 10.0 * t * t2 * ia2 - 15.0 * t * ia2 * ia2
    h6 = t2 * t2 * t2 - 15.0 * t2 * t2 * ia2 + 45.0 * t2 * ia2 * ia2 - 15.0 * ia2**3
    return HermiteValues((h0, h1, h2, h3, h4, h5, h6))


def _check_time(t: float) -> float:
    if not np.isfinite(t) or t <= 0.0:
        raise DomainError(f"time must be positive and finite, got {t}")
    return float(t)


def _gaussian(jet: CoefficientJet, t: float, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """Dilated Gaussian (2 pi t a^2)^(-1/2) exp(-(x-y)^2 / (2 t a^2)), with the
    underflow region mapped to exactly 0."""
    a2 = np.asarray(jet.a) ** 2
    q = (np.asarray(x) - np.asarray(y)) ** 2 / (2.0 * t * a2)
    pref = 1.0 / np.sqrt(2.0 * np.pi * t * a2)
    return np.where(q > EXP_ARG_MAX, 0.0, pref * np.exp(-np.minimum(q, EXP_ARG_MAX)))


def g0(jet: CoefficientJet, t: float, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """Order-0 kernel: the dilated Gaussian with scale a(0,z)*sqrt(t)."""
    _check_time(t)
    return _gaussian(jet, t, x, y)


def g1_general(jet: CoefficientJet, t: float, x: ArrayLike, y: ArrayLike, z: ArrayLike) -> ArrayLike:
    """Order-1 kernel at an arbitrary basepoint z.

    Gaussian prefactor times the bracket
        1 + (3 a a' - 2 b)/(2 a^2) * (x-y) - a'/(2 t a^3) * (x-y)^3
          + (x-z) * ((x-y)^2 - t a^2) / (t a^3).
    """
    _check_time(t)
    a, ap, b = jet.a, jet.da_dx, jet.b
    d = np.asarray(x) - np.asarray(y)
    a2 = a * a
    a3 = a2 * a
    bracket = (
        1.0
        + (3.0 * a * ap - 2.0 * b) / (2.0 * a2) * d
        - ap / (2.0 * t * a3) * d**3
        + (np.asarray(x) - np.asarray(z)) * (d * d - t * a2) / (t * a3)
    )
    return _gaussian(jet, t, x, y) * bracket


def _p_polynomials(jet: CoefficientJet, xi: ArrayLike):
    """Coefficient polynomials P_0..P_6 of the order-2 correction.

    xi is the rescaled basepoint offset (x - z)/sqrt(t); P_1, P_3, P_5 and the
    xi-dependent parts of P_2, P_4 vanish at z = x.
    """
    a, ap, app, adot = jet.a, jet.da_dx, jet.d2a_dx2, jet.da_dt
    b, bp, c = jet.b, jet.db_dx, jet.c
    xi2 = xi * xi
    ap2 = ap * ap
    a2 = a * a
    a3 = a2 * a
    p0 = c
    p1 = bp * xi
    p2 = 0.5 * (0.5 * a3 * app + a2 * bp + a2 * ap2 / 2.0 + b * b + ap2 * xi2
                + a * (b * ap + adot + app * xi2))
    p3 = a * xi * (ap * b + 0.5 * a2 * app + 1.5 * a * ap2)
    p4 = (a2 / 3.0) * (0.5 * a3 * app + 2.0 * a2 * ap2 + 1.5 * a * ap * b + 1.5 * ap2 * xi2)
    p5 = 0.5 * a2 * a2 * ap2 * xi
    p6 = a3 * a3 * ap2 / 8.0
    return p0, p1, p2, p3, p4, p5, p6


def g2_general(jet: CoefficientJet, t: float, x: ArrayLike, y: ArrayLike, z: ArrayLike) -> ArrayLike:
    """Order-2 kernel at an arbitrary basepoint z.

    Adds t * (P_0 + sum_k P_k(xi) H_k(Theta_t)) * G_0 to the order-1 kernel,
    with Theta_t = (x-y)/(a^2 sqrt(t)) and xi = (x-z)/sqrt(t).
    """
    _check_time(t)
    a = jet.a
    sqrt_t = np.sqrt(t)
    theta = (np.asarray(x) - np.asarray(y)) / (a * a * sqrt_t)
    xi = (np.asarray(x) - np.asarray(z)) / sqrt_t
    p = _p_polynomials(jet, xi)
    h = hermite(theta, a)
    series = p[0]
    for k in range(1, 7):
        series = series + p[k] * h[k]
    return g1_general(jet, t, x, y, z) + t * _gaussian(jet, t, x, y) * series


def kernel_eval(spec: KernelSpec, t: float, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """Evaluate the order-n kernel with the basepoint rule of ``spec``."""
    z = basepoint(spec.basepoint, x, y)
    jet = spec.model.jet(z)
    if spec.order == 0:
        return g0(jet, t, x, y)
    if spec.order == 1:
        return g1_general(jet, t, x, y, z)
    return g2_general(jet, t, x, y, z)
