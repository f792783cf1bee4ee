import io
import math

import numpy as np
import pytest

from bslab.analytic import OptionContract, closed_form_call, payoff_call
from bslab.errors import RangeError, StabilityError, ValidationError
from bslab.pricer import (
    MarketParams,
    hedge_ratio,
    portfolio_value,
    price_at,
    price_mc,
    price_surface_fd,
    write_surface_csv,
)

from conftest import FIG4, ORACLE_ATM

K = FIG4["strike"]
# FD + bilinear interpolation error allowed on the Figure 4 grid (S spacing ~8%).
FD_ABS_TOL = 0.2


def oracle(S, t, sigma=0.2, r=0.05):
    return closed_form_call(S, t, OptionContract(K, 1.0), r, sigma)


def second_differences(surface):
    # slope change across each interior node, scaled back to price units
    ds = np.diff(surface.s_values)
    slopes = np.diff(surface.f, axis=1) / ds
    return np.diff(slopes, axis=1) * ds[1:]


def test_right_edge_concavity_shrinks(market, contract, surfaces):
    # The scheme carries an O(dx^2) offset from the exact asymptote that the
    # Dirichlet data at S_max pins to zero; this bends the last few nodes.
    coarse = second_differences(surfaces["implicit"]).min()
    fine = second_differences(price_surface_fd(market, contract, 500.0, 400, 8000)).min()
    assert -1e-2 < coarse < 0
    assert fine > coarse / 4


def test_market_params():
    with pytest.raises(ValidationError):
        MarketParams(0.05, 0.0)
    with pytest.raises(ValidationError):
        MarketParams(float("nan"), 0.2)


def test_surface_layout(surfaces):
    s = surfaces["implicit"]
    assert s.f.shape == (2001, 201)
    assert s.t_values[0] == 0.0 and s.t_values[-1] == 1.0
    assert np.all(np.diff(s.t_values) > 0) and np.all(np.diff(s.s_values) > 0)
    assert s.s_values[-1] == pytest.approx(500.0, rel=1e-14)


@pytest.mark.parametrize("method", ["explicit", "implicit"])
def test_terminal_slice(surfaces, method):
    s = surfaces[method]
    payoff = payoff_call(s.s_values, K)
    np.testing.assert_allclose(s.f[-1], payoff, rtol=1e-8, atol=0)


@pytest.mark.parametrize("method", ["explicit", "implicit"])
def test_surface_shape_properties(surfaces, method):
    s = surfaces[method]
    S, t = s.s_values[None, :], s.t_values[:, None]
    assert np.all(s.f >= 0)
    assert np.all(s.f <= S)
    lower = np.maximum(S - K * np.exp(-0.05 * (1.0 - t)), 0.0)
    assert np.all(s.f >= lower - 1e-3 * K)
    assert np.all(np.diff(s.f, axis=1) >= 0)
    second = second_differences(s)
    away_from_edge = s.s_values[1:-1] <= 2.5 * K
    assert np.all(second[:, away_from_edge] >= -1e-6 * K)
    # time decay: value does not increase towards expiry
    assert np.all(np.diff(s.f, axis=0) <= 1e-6 * K)


@pytest.mark.parametrize("method", ["explicit", "implicit"])
def test_large_spot_asymptote(surfaces, method):
    s = surfaces[method]
    S, t = s.s_values[-6:-1], s.t_values[:, None]
    gap = np.abs(s.f[:, -6:-1] - (S - K * np.exp(-0.05 * (1.0 - t))))
    assert gap.max() < 1e-2 * K


def test_schemes_agree(surfaces):
    assert np.abs(surfaces["explicit"].f - surfaces["implicit"].f).max() < 1e-2


def test_explicit_unstable_grid(market, contract):
    with pytest.raises(StabilityError):
        price_surface_fd(market, contract, 500.0, 200, 6, "explicit")


@pytest.mark.parametrize("method", ["explicit", "implicit"])
def test_low_vol_deep_itm(method):
    # r = 0 keeps 2r/sigma^2 representable at sigma = 0.01.
    s = price_surface_fd(MarketParams(0.0, 0.01), OptionContract(K, 1.0), 500.0, 200, 200, method)
    assert price_at(s, 400.0, 0.0) == pytest.approx(400.0 - K, rel=1e-3)


def test_overflowing_transform_rejected():
    with pytest.raises(ValidationError, match="too large"):
        price_surface_fd(MarketParams(0.05, 0.01), OptionContract(K, 1.0))


def test_price_at_node(surfaces):
    s = surfaces["implicit"]
    assert price_at(s, s.s_values[150], s.t_values[700]) == s.f[700, 150]


def test_price_at_money_expiry(market, contract, surfaces):
    # S = K is not a node of the default grid: the query sees the chord
    # across the payoff kink.
    s = surfaces["implicit"]
    j = np.searchsorted(s.s_values, K) - 1
    w = (K - s.s_values[j]) / (s.s_values[j + 1] - s.s_values[j])
    assert price_at(s, K, 1.0) == pytest.approx(w * s.f[-1, j + 1], rel=1e-12)
    # With s_floor_ratio = 5**-9 and N = 200, x = 0 is node 180.
    s = price_surface_fd(market, contract, 500.0, 200, 50, s_floor_ratio=5.0**-9)
    assert s.s_values[180] == pytest.approx(K, rel=1e-14)
    assert price_at(s, K, 1.0) == pytest.approx(0.0, abs=1e-8)


def test_price_at_bilinear(surfaces):
    s = surfaces["implicit"]
    j, i = 120, 40
    S = 0.25 * s.s_values[j] + 0.75 * s.s_values[j + 1]
    t = 0.5 * (s.t_values[i] + s.t_values[i + 1])
    expected = 0.5 * (
        0.25 * s.f[i, j] + 0.75 * s.f[i, j + 1] + 0.25 * s.f[i + 1, j] + 0.75 * s.f[i + 1, j + 1]
    )
    assert price_at(s, S, t) == pytest.approx(expected, rel=1e-13)


def test_price_at_out_of_range(surfaces):
    s = surfaces["implicit"]
    with pytest.raises(RangeError):
        price_at(s, 600.0, 0.5)
    with pytest.raises(RangeError):
        price_at(s, 100.0, -0.1)


@pytest.mark.parametrize("method", ["explicit", "implicit"])
def test_atm_price_vs_oracle(surfaces, method):
    fd = price_at(surfaces[method], 100.0, 0.0)
    assert abs(fd / ORACLE_ATM - 1) < 0.005


def test_hedge_ratio_limits(surfaces):
    s = surfaces["implicit"]
    assert hedge_ratio(s, 0.1 * K, 0.0) < 0.01
    assert abs(hedge_ratio(s, 4 * K, 0.0) - 1.0) < 0.02


def test_hedge_ratio_atm_vs_oracle(surfaces):
    h = 1e-3
    ref = (oracle(100 + h, 0.0) - oracle(100 - h, 0.0)) / (2 * h)
    assert abs(hedge_ratio(surfaces["implicit"], 100.0, 0.0) - ref) < 0.02


def test_hedge_ratio_bounds(surfaces):
    s = surfaces["explicit"]
    for S in np.geomspace(1.0, 450.0, 25):
        for t in (0.0, 0.3, 0.7, 0.99):
            assert -0.02 <= hedge_ratio(s, S, t) <= 1.02


def test_hedge_ratio_edge(surfaces):
    with pytest.raises(RangeError):
        hedge_ratio(surfaces["implicit"], 499.0, 0.0)


def test_portfolio_value(surfaces):
    assert portfolio_value(7.0, 0.0, 100.0) == 7.0
    assert portfolio_value(50.0, 1.0, 50.0) == 0.0
    s = surfaces["implicit"]
    f, d = price_at(s, 100.0, 0.0), hedge_ratio(s, 100.0, 0.0)
    assert portfolio_value(f, d, 100.0) == f - d * 100.0


def test_mc_deterministic_limit():
    est = price_mc(MarketParams(0.0, 1e-12), OptionContract(K, 1.0), 150.0, 1000, seed=3)
    assert est.price == pytest.approx(50.0, abs=1e-8)
    assert est.std_err < 1e-8


def test_mc_unreachable_strike():
    est = price_mc(MarketParams(0.05, 0.2), OptionContract(100.0 * 1e6, 1.0), 100.0, 1000, seed=3)
    assert est.price == 0.0 and est.std_err == 0.0


def test_mc_rejects_few_paths(market, contract):
    with pytest.raises(ValidationError):
        price_mc(market, contract, 100.0, 99, seed=1)


def test_mc_atm_vs_oracle(market, contract):
    est = price_mc(market, contract, 100.0, 200_000, seed=1)
    assert est.n_paths == 200_000
    assert abs(est.price - ORACLE_ATM) < 3 * est.std_err


def test_mc_partition_independent(market, contract):
    a = price_mc(market, contract, 100.0, 5000, seed=9)
    b = price_mc(market, contract, 100.0, 5000, seed=9, workers=3)
    assert a == b


def test_cross_family_agreement(surfaces, market):
    rng = np.random.default_rng(2024)
    points = zip(rng.uniform(80, 200, 10), rng.uniform(0.0, 0.75, 10))
    for S, t in points:
        ref = oracle(S, t)
        fd = price_at(surfaces["implicit"], S, t)
        mc = price_mc(market, OptionContract(K, 1.0 - t), S, 50_000, seed=17)
        assert abs(fd - ref) < FD_ABS_TOL
        assert abs(mc.price - ref) < 3 * mc.std_err
        assert abs(mc.price - fd) < 3 * mc.std_err + FD_ABS_TOL


def test_surface_csv(market, contract):
    s = price_surface_fd(market, contract, 500.0, 4, 3)
    buf = io.StringIO()
    write_surface_csv(s, buf)
    lines = buf.getvalue().split("\n")
    assert lines[-1] == "" and len(lines) - 1 == 3 + 2
    header = lines[0].split(",")
    assert header[0] == "t\\S" and len(header) == 4 + 2
    assert float(header[-1]) == pytest.approx(500.0)
    last = lines[-2].split(",")
    assert float(last[0]) == 1.0
    np.testing.assert_allclose([float(v) for v in last[1:]], s.f[-1])
