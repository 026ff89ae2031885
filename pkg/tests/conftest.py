"""Shared test helpers: analytic payoffs, simple models, and independently
transcribed z = x kernel displays used as reduction cross-checks."""

from __future__ import annotations

import numpy as np

from lvkernel import CoefficientJet, CustomModel, Payoff

SQRT_2PI = np.sqrt(2.0 * np.pi)


class GaussianPayoff(Payoff):
    """Smooth bump exp(-(y - center)^2 / (2 width^2))."""

    def __init__(self, center: float, width: float) -> None:
        self.center = float(center)
        self.width = float(width)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return np.exp(-0.5 * ((y - self.center) / self.width) ** 2)


class ZeroPayoff(Payoff):
    def __call__(self, y):
        return np.zeros_like(np.asarray(y, dtype=float))


class OnePayoff(Payoff):
    def __call__(self, y):
        return np.ones_like(np.asarray(y, dtype=float))


def constant_coefficient_model(a: float = 1.0, b: float = 0.0,
                               c: float = 0.0) -> CustomModel:
    """Model whose jet is spatially constant (pure heat-type operator)."""

    def jet_fn(z):
        zero = np.zeros_like(np.asarray(z, dtype=float))
        return CoefficientJet(a=a + zero, da_dx=zero, d2a_dx2=zero,
                              da_dt=zero, b=b + zero, db_dx=zero, c=c + zero)

    return CustomModel(jet_fn=jet_fn)


# ---------------------------------------------------------------------------
# Hand-transcribed z = x kernel displays.  These are written directly from the
# closed specializations (lognormal and power-law volatility), independent of
# the general-basepoint code paths they cross-check.
# ---------------------------------------------------------------------------

def lognormal_order1_reference(t, x, y, sigma, r):
    """Order-1 kernel for a = sigma*x, b = r*x, frozen at z = x."""
    gauss = np.exp(-((x - y) ** 2) / (2.0 * t * sigma**2 * x**2)) / (
        np.sqrt(t) * SQRT_2PI * sigma * x
    )
    X = (x - y) / (sigma * x * np.sqrt(t))
    corr = (
        X / (SQRT_2PI * sigma * x)
        * np.exp(-0.5 * X * X)
        * ((3.0 * sigma**2 - 2.0 * r) / (2.0 * sigma) - 0.5 * sigma * X * X)
    )
    return gauss + corr


def lognormal_order2_reference_correction(t, x, y, sigma, r, sigma_dot=0.0):
    """Second-order correction (order-2 minus order-1 kernel) for the
    lognormal jet with optional initial volatility slope, frozen at z = x."""
    X = (x - y) / (sigma * x * np.sqrt(t))
    c0 = -(sigma**4 + 4.0 * sigma * sigma_dot + 4.0 * r**2
           + 4.0 * r * sigma**2) / (8.0 * sigma**2)
    c2 = (4.0 * sigma_dot * sigma + 4.0 * r**2 - 16.0 * r * sigma**2
          + 15.0 * sigma**4) / (8.0 * sigma**2)
    c4 = (12.0 * r - 29.0 * sigma**2) / 24.0
    c6 = sigma**2 / 8.0
    poly = c0 + c2 * X**2 + c4 * X**4 + c6 * X**6
    return np.sqrt(t) / (SQRT_2PI * sigma * x) * np.exp(-0.5 * X * X) * poly


def cev_order1_reference(t, x, y, sigma, alpha, r):
    """Order-1 kernel for a = sigma*x^alpha, b = r*x, frozen at z = x."""
    ax = sigma * x**alpha
    gauss = np.exp(-((x - y) ** 2) / (2.0 * t * ax * ax)) / (
        np.sqrt(t) * SQRT_2PI * ax
    )
    X = (x - y) / (ax * np.sqrt(t))
    bracket = (
        (3.0 * alpha * sigma**2 * x ** (alpha - 1.0)
         - 2.0 * r * x ** (1.0 - alpha)) / (2.0 * sigma)
        - 0.5 * alpha * sigma * x ** (alpha - 1.0) * X * X
    )
    corr = X / (SQRT_2PI * ax) * np.exp(-0.5 * X * X) * bracket
    return gauss + corr
