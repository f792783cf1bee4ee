import pytest

from bslab.analytic import OptionContract
from bslab.pricer import MarketParams, price_surface_fd

# Figure 4 setup: r = 5%, sigma = 20%, K = 100, T = 1 year, S_max = 5K.
FIG4 = dict(r=0.05, sigma=0.2, strike=100.0, expiry=1.0, s_max=500.0, n_space=200, n_time=2000)
# Discounted lognormal expectation at S = K = 100, r = 0.05, sigma = 0.2, T = 1,
# integrated numerically; agrees with the N(d1)/N(d2) expression to 1e-13.
ORACLE_ATM = 10.450583572185


@pytest.fixture(scope="session")
def market():
    return MarketParams(FIG4["r"], FIG4["sigma"])


@pytest.fixture(scope="session")
def contract():
    return OptionContract(FIG4["strike"], FIG4["expiry"])


@pytest.fixture(scope="session")
def surfaces(market, contract):
    return {
        m: price_surface_fd(market, contract, FIG4["s_max"], FIG4["n_space"], FIG4["n_time"], m)
        for m in ("explicit", "implicit")
    }
