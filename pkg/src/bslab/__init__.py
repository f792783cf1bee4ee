"""Black-Scholes call pricing: GBM simulation, analytic solutions, heat-equation finite differences."""

from .analytic import OptionContract, closed_form_call, implied_vol, payoff_call
from .errors import (
    BSLabError,
    ConvergenceError,
    DomainError,
    NoSolutionError,
    RangeError,
    SingularSystemError,
    StabilityError,
    UnsupportedRootsError,
    ValidationError,
)
from .fdm import Grid, build_grid, solve_heat, solve_tridiagonal
from .pricer import MarketParams, PriceSurface, hedge_ratio, price_at, price_mc, price_surface_fd
from .sde import GbmParams, PathSet, ensemble_stats, simulate_gbm

__version__ = "0.1.0"
