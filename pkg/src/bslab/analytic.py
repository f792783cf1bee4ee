"""
Closed-form machinery for the Black-Scholes call problem.

* Cauchy-Euler equation  x^2 y'' + a x y' + b y = 0  and its power solutions
  y = alpha x^m1 + beta x^m2  (distinct real roots only).
* The separable family  f(S, t) = [alpha S^m1 + beta S^m2] gamma e^{(r-c)t}
  solving  r S f_S + f_t + sigma^2/2 S^2 f_SS - r f = 0.
* Call payoff, a quadrature pricing oracle, and implied volatility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import (
    ConvergenceError,
    DomainError,
    NoSolutionError,
    UnsupportedRootsError,
    ValidationError,
)

SQRT_2PI = math.sqrt(2.0 * math.pi)

# Bisection bracket for implied volatility.
VOL_LOW = 1e-6
VOL_HIGH = 5.0


@dataclass(frozen=True)
class CauchyEulerCoeffs:
    a: float
    b: float


@dataclass(frozen=True)
class PowerSolution:
    m1: float
    m2: float
    alpha: float
    beta: float

    def __post_init__(self):
        if self.m1 == self.m2:
            raise UnsupportedRootsError("power solution needs distinct exponents")

    @classmethod
    def from_coeffs(cls, coeffs, alpha, beta):
        m1, m2 = cauchy_euler_roots(coeffs)
        return cls(m1, m2, alpha, beta)


@dataclass(frozen=True)
class OptionContract:
    """European call with strike ``strike`` expiring at ``expiry``."""

    strike: float
    expiry: float

    def __post_init__(self):
        if not (np.isfinite(self.strike) and self.strike > 0):
            raise ValidationError(f"strike must be > 0, got {self.strike}")
        if not (np.isfinite(self.expiry) and self.expiry > 0):
            raise ValidationError(f"expiry must be > 0, got {self.expiry}")


def _quadratic_roots(lin, const, allow_repeated=False):
    # Roots of m^2 + lin*m + const, larger first; cancellation-free form.
    disc = lin * lin - 4.0 * const
    if disc < 0 or (disc == 0 and not allow_repeated):
        raise UnsupportedRootsError(
            f"discriminant {disc:g} gives {'complex' if disc < 0 else 'repeated'} roots"
        )
    q = -0.5 * (lin + math.copysign(math.sqrt(disc), lin if lin != 0 else 1.0))
    if q == 0.0:
        return 0.0, 0.0
    r1, r2 = q, const / q
    return (r1, r2) if r1 >= r2 else (r2, r1)


def cauchy_euler_roots(coeffs):
    """Real roots ``m1 > m2`` of ``m^2 + (a-1) m + b = 0``."""
    return _quadratic_roots(coeffs.a - 1.0, coeffs.b)


def eval_cauchy_euler(sol, x):
    if np.any(np.asarray(x) <= 0):
        raise DomainError("power solution is defined for x > 0 only")
    return sol.alpha * np.power(x, sol.m1) + sol.beta * np.power(x, sol.m2)


def separation_exponents(r, sigma, c):
    """Exponents of the spatial factor A(S) = S^m for separation constant ``c``.

    They solve ``sigma^2/2 m (m-1) + r m - c = 0``.
    """
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma}")
    k = 2.0 * r / sigma**2
    return _quadratic_roots(k - 1.0, -2.0 * c / sigma**2, allow_repeated=True)


@dataclass(frozen=True)
class SeparationSolution:
    alpha: float
    beta: float
    gamma: float
    c: float
    r: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError(f"sigma must be > 0, got {self.sigma}")
        separation_exponents(self.r, self.sigma, self.c)

    @property
    def exponents(self):
        return separation_exponents(self.r, self.sigma, self.c)


def eval_separation(sol, S, t):
    if np.any(np.asarray(S) <= 0):
        raise DomainError("separable solution is defined for S > 0 only")
    m1, m2 = sol.exponents
    spatial = sol.alpha * np.power(S, m1) + sol.beta * np.power(S, m2)
    return spatial * sol.gamma * np.exp((sol.r - sol.c) * np.asarray(t))


def payoff_call(S, K):
    return np.maximum(np.asarray(S, dtype=float) - K, 0.0)


def closed_form_call(S, t, contract, r, sigma):
    """Discounted risk-neutral expectation of the call payoff.

    ln S_T ~ N(ln S + (r - sigma^2/2)(T - t), sigma^2 (T - t)); the expectation
    is integrated by adaptive Gauss-Kronrod over the standard normal variable,
    from the exercise boundary up to ten deviations past the weighted peak.
    """
    if not S > 0:
        raise DomainError(f"spot must be > 0, got {S}")
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma}")
    tau = contract.expiry - t
    if not tau > 0:
        raise DomainError(f"t={t} must precede expiry {contract.expiry}")
    K = contract.strike
    sd = sigma * math.sqrt(tau)
    mean = math.log(S) + (r - 0.5 * sigma**2) * tau
    z_strike = (math.log(K) - mean) / sd
    lo = max(z_strike, -10.0)
    hi = max(10.0, sd + 10.0)  # S_T * density peaks at z = sd
    if lo >= hi:
        return 0.0

    def integrand(z):
        return (math.exp(mean + sd * z) - K) * math.exp(-0.5 * z * z) / SQRT_2PI

    value, _ = integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-13, limit=500)
    return math.exp(-r * tau) * max(value, 0.0)


def implied_vol(target_price, S, contract, r, tol=1e-12, max_iter=200):
    """Volatility whose oracle price at t = 0 equals ``target_price``.

    Bisection on [1e-6, 5]; the call price is strictly increasing in sigma.
    """
    K, T = contract.strike, contract.expiry
    lower = max(S - K * math.exp(-r * T), 0.0)
    if not (lower < target_price < S):
        raise NoSolutionError(
            f"target {target_price} outside no-arbitrage bounds ({lower}, {S})"
        )
    lo, hi = VOL_LOW, VOL_HIGH
    f_lo = closed_form_call(S, 0.0, contract, r, lo) - target_price
    f_hi = closed_form_call(S, 0.0, contract, r, hi) - target_price
    if f_lo > 0 or f_hi < 0:
        raise NoSolutionError(
            f"target {target_price} not attained for sigma in [{lo}, {hi}]"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = closed_form_call(S, 0.0, contract, r, mid) - target_price
        if f_mid == 0.0:
            return mid
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    mid = 0.5 * (lo + hi)
    miss = abs(closed_form_call(S, 0.0, contract, r, mid) - target_price)
    if miss > 1e-8:
        raise ConvergenceError(
            f"bisection stopped with price error {miss:.3g} after {max_iter} iterations"
        )
    return mid
