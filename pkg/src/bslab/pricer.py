"""
European call prices from the heat-equation solver and from Monte Carlo.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import fdm, transform
from .analytic import OptionContract, payoff_call
from .errors import RangeError, ValidationError
from .sde import GbmParams, simulate_gbm


@dataclass(frozen=True)
class MarketParams:
    r: float
    sigma: float

    def __post_init__(self):
        if not np.isfinite(self.r):
            raise ValidationError(f"r must be finite, got {self.r}")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValidationError(f"sigma must be > 0, got {self.sigma}")


@dataclass(frozen=True)
class PriceSurface:
    """``f[i, j]`` is the call value at time ``t_values[i]`` and spot ``s_values[j]``."""

    s_values: np.ndarray
    t_values: np.ndarray
    f: np.ndarray
    market: MarketParams
    contract: OptionContract


@dataclass(frozen=True)
class McEstimate:
    price: float
    std_err: float
    n_paths: int


def price_surface_fd(
    market,
    contract,
    s_max=500.0,
    n_space=200,
    n_time=2000,
    method="implicit",
    s_floor_ratio=1e-6,
):
    """Solve the transformed problem on a heat grid and map it back to (S, t)."""
    r, sigma = market.r, market.sigma
    grid = fdm.build_grid(contract, sigma, s_max, s_floor_ratio, n_space, n_time)
    consts = transform.constants(r, sigma)
    x_max = grid.x_max
    _check_representable(grid, consts)

    heat = fdm.solve_heat(
        grid,
        ic=lambda x: transform.initial_condition(x, consts.k),
        bc_left=transform.left_boundary,
        bc_right=lambda tau: transform.right_boundary(x_max, tau, contract, r, sigma),
        method=method,
    )
    x, tau = grid.x, grid.tau
    coords = transform.HeatCoords(x=x[None, :], tau=tau[:, None])
    f = transform.u_to_price(heat.values, coords, contract, consts)

    # tau runs forward from expiry; flip rows so market time ascends.
    t_values = np.linspace(0.0, contract.expiry, grid.n_time + 1)
    return PriceSurface(
        s_values=contract.strike * np.exp(x),
        t_values=t_values,
        f=f[::-1].copy(),
        market=market,
        contract=contract,
    )


_MAX_EXPONENT = 700.0  # exp overflows float64 just above 709


def _check_representable(grid, consts):
    # Large 2r/sigma^2 pushes e^{(k+1)x/2} and e^{alpha x} beyond float64.
    x_abs = max(abs(grid.x_min), abs(grid.x_max))
    worst = max(
        0.5 * abs(consts.k + 1.0) * x_abs,
        0.5 * abs(consts.k - 1.0) * x_abs,
        abs(consts.alpha) * x_abs + abs(consts.beta) * grid.tau_max,
    )
    if worst > _MAX_EXPONENT:
        raise ValidationError(
            f"heat transform exponent reaches {worst:.0f}; 2r/sigma^2 = {consts.k:g} "
            "is too large for double precision on this grid"
        )


def _bracket(nodes, value, name):
    lo, hi = nodes[0], nodes[-1]
    slack = 1e-12 * max(abs(lo), abs(hi), 1.0)
    if not (lo - slack <= value <= hi + slack):
        raise RangeError(f"{name}={value} outside [{lo}, {hi}]")
    i = int(np.searchsorted(nodes, value, side="right")) - 1
    i = min(max(i, 0), len(nodes) - 2)
    w = (value - nodes[i]) / (nodes[i + 1] - nodes[i])
    return i, min(max(w, 0.0), 1.0)


def price_at(surface, S, t):
    """Bilinear interpolation of the surface at (S, t)."""
    j, ws = _bracket(surface.s_values, S, "S")
    i, wt = _bracket(surface.t_values, t, "t")
    f = surface.f
    lower = (1 - ws) * f[i, j] + ws * f[i, j + 1]
    upper = (1 - ws) * f[i + 1, j] + ws * f[i + 1, j + 1]
    return float((1 - wt) * lower + wt * upper)


def hedge_ratio(surface, S, t):
    """Central difference of f in S, stepping one grid interval each way."""
    s = surface.s_values
    j, _ = _bracket(s, S, "S")
    h = s[j + 1] - s[j]
    if S - h < s[0] or S + h > s[-1]:
        raise RangeError(f"S={S} too close to the grid edge for a central difference")
    return (price_at(surface, S + h, t) - price_at(surface, S - h, t)) / (2.0 * h)


def portfolio_value(f, delta, S):
    """Value of one option hedged with ``delta`` units of the underlying sold short."""
    return f - delta * S


def price_mc(market, contract, spot, n_paths, seed, workers=1):
    """Risk-neutral Monte Carlo with one exact lognormal step to expiry."""
    if int(n_paths) < 100:
        raise ValidationError(f"n_paths must be >= 100, got {n_paths}")
    params = GbmParams(mu=market.r, sigma=market.sigma, s0=spot)
    terminal = simulate_gbm(params, 1, contract.expiry, n_paths, seed, workers).paths[:, -1]
    disc = math.exp(-market.r * contract.expiry)
    payoff = payoff_call(terminal, contract.strike)
    return McEstimate(
        price=float(disc * payoff.mean()),
        std_err=float(disc * payoff.std(ddof=1) / math.sqrt(n_paths)),
        n_paths=int(n_paths),
    )


def write_surface_csv(surface, fh):
    """``t\\S`` header with the S grid, then one row per time."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t\\S"] + [repr(float(s)) for s in surface.s_values])
    for t, row in zip(surface.t_values, surface.f):
        writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])
