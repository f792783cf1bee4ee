"""
Change of variables between Black-Scholes and heat-equation coordinates.

    S = K e^x,            t = T - 2 tau / sigma^2
    f(S, t) = K e^{alpha x + beta tau} u(x, tau)

with k = 2r/sigma^2, alpha = (1-k)/2, beta = -(k+1)^2/4.  Under this map the
pricing PDE becomes u_tau = u_xx, with tau running from 0 (expiry) to
sigma^2 T / 2 (today).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError


@dataclass(frozen=True)
class TransformConstants:
    k: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class HeatCoords:
    x: float
    tau: float


def constants(r, sigma):
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma}")
    k = 2.0 * r / sigma**2
    return TransformConstants(k=k, alpha=(1.0 - k) / 2.0, beta=-((k + 1.0) ** 2) / 4.0)


def to_heat(S, t, contract, sigma):
    if not S > 0:
        raise DomainError(f"S must be > 0, got {S}")
    if t > contract.expiry:
        raise DomainError(f"t={t} lies after expiry {contract.expiry}")
    return HeatCoords(
        x=float(np.log(S / contract.strike)),
        tau=0.5 * sigma**2 * (contract.expiry - t),
    )


def from_heat(coords, contract, sigma):
    """Inverse of :func:`to_heat`; returns ``(S, t)``."""
    S = contract.strike * np.exp(coords.x)
    t = contract.expiry - 2.0 * coords.tau / sigma**2
    return float(S), float(t)


def tau_to_time(tau, contract, sigma):
    return contract.expiry - 2.0 * np.asarray(tau) / sigma**2


def initial_condition(x, k):
    """Transformed call payoff u(x, 0)."""
    x = np.asarray(x, dtype=float)
    return np.maximum(np.exp(0.5 * (k + 1.0) * x) - np.exp(0.5 * (k - 1.0) * x), 0.0)


def right_boundary(x_max, tau, contract, r, sigma):
    """u at the upper log-price edge, using the exact discounted intrinsic value."""
    c = constants(r, sigma)
    K = contract.strike
    tau = np.asarray(tau, dtype=float)
    t = tau_to_time(tau, contract, sigma)
    s_max = K * np.exp(x_max)
    return (s_max - K * np.exp(-r * (contract.expiry - t))) / (
        K * np.exp(c.alpha * x_max + c.beta * tau)
    )


def left_boundary(tau):
    """u at the lower edge; the call is worthless as S -> 0."""
    return np.zeros_like(np.asarray(tau, dtype=float))


def u_to_price(u, coords, contract, consts):
    """f = K e^{alpha x + beta tau} u.

    Exponents are combined before exponentiating so that a huge scale factor
    times a tiny (or zero) u does not overflow into inf or nan.
    """
    u = np.asarray(u, dtype=float)
    expo = consts.alpha * coords.x + consts.beta * coords.tau
    with np.errstate(divide="ignore"):
        magnitude = np.exp(expo + np.log(np.abs(u)))
    return contract.strike * np.sign(u) * magnitude
