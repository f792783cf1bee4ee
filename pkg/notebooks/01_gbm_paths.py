# Geometric Brownian Motion ensembles
# ===================================
#
# Six volatilities, one path each, 50 steps of 0.1 with drift 1 and S_0 = 100.
# Every path reads its own Philox stream keyed by (seed, path index), so the
# same seed always reproduces the same trajectories.

import numpy as np

from bslab.sde import (
    GbmParams,
    ensemble_stats,
    sample_wiener_increments,
    simulate_gbm,
    wiener_path,
)

# A Wiener path is the running sum of N(0, dt) increments, starting at 0.
w = wiener_path(sample_wiener_increments(50, 0.1, seed=1))
print("W_0 =", w[0], " W_5 =", round(w[-1], 4))

sigmas = np.arange(0.8, 2, 0.2)
for sigma in sigmas:
    ps = simulate_gbm(GbmParams(mu=1.0, sigma=sigma, s0=100.0), n_steps=50, dt=0.1, n_paths=1, seed=1)
    print(f"sigma={sigma:.1f}  S_5 = {ps.paths[0, -1]:12.2f}  min = {ps.paths.min():8.3f}")

# Ensemble moments: E[S_t] = S_0 e^{mu t}.
ps = simulate_gbm(GbmParams(mu=1.0, sigma=0.8, s0=100.0), n_steps=10, dt=0.1, n_paths=100_000, seed=1)
mean, var = ensemble_stats(ps)
se = np.sqrt(var[-1] / ps.n_paths)
print(f"\nmean S_1 = {mean[-1]:.2f} +- {se:.2f}, theory {100 * np.e:.2f}")

# Splitting the work across threads does not change a single bit.
split = simulate_gbm(GbmParams(1.0, 0.8, 100.0), 10, 0.1, 100_000, seed=1, workers=4)
print("identical under 4 workers:", np.array_equal(ps.paths, split.paths))

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for sigma in sigmas:
        ps = simulate_gbm(GbmParams(1.0, sigma, 100.0), 50, 0.1, 1, seed=1)
        plt.plot(ps.times, ps.paths[0], label=f"{sigma:.1f}")
    plt.yscale("log")
    plt.xlabel("$t$")
    plt.ylabel("$S_t$")
    plt.legend(title="sigma")
    plt.savefig("gbm_paths.png", dpi=120)
    print("wrote gbm_paths.png")
except ImportError:
    pass
