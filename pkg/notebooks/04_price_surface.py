# Call price surface
# ==================
#
# r = 5%, sigma = 20%, K = 100, T = 1, S_max = 500, N = 200, M = 2000.
# The heat-equation solution is mapped back to f(S, t) and checked against the
# quadrature price and Monte Carlo.

import io

import numpy as np

from bslab.analytic import OptionContract, closed_form_call
from bslab.pricer import (
    MarketParams,
    hedge_ratio,
    portfolio_value,
    price_at,
    price_mc,
    price_surface_fd,
    write_surface_csv,
)

market = MarketParams(r=0.05, sigma=0.2)
contract = OptionContract(strike=100.0, expiry=1.0)

explicit = price_surface_fd(market, contract, 500.0, 200, 2000, "explicit")
implicit = price_surface_fd(market, contract, 500.0, 200, 2000, "implicit")
print(f"max |explicit - implicit| = {np.abs(explicit.f - implicit.f).max():.2e}")

print("\n     S   t=0 (FD)   t=0 (ref)   delta   t=0.5 (FD)")
for S in (60, 80, 100, 120, 150, 250, 400):
    fd = price_at(implicit, S, 0.0)
    ref = closed_form_call(S, 0.0, contract, market.r, market.sigma)
    print(f"{S:6.0f} {fd:10.4f} {ref:11.4f} {hedge_ratio(implicit, S, 0.0):7.3f} {price_at(implicit, S, 0.5):11.4f}")

f, d = price_at(implicit, 100.0, 0.0), hedge_ratio(implicit, 100.0, 0.0)
print(f"\nhedged portfolio at the money: f - delta*S = {portfolio_value(f, d, 100.0):.4f}")

mc = price_mc(market, contract, 100.0, 200_000, seed=1)
print(f"Monte Carlo: {mc.price:.4f} +- {mc.std_err:.4f}")

buf = io.StringIO()
write_surface_csv(implicit, buf)
print("\nCSV header:", buf.getvalue()[:60], "...")
