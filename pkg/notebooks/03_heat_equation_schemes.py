# Explicit and implicit schemes for u_tau = u_xx
# ==============================================
#
# Manufactured solution u = exp(-pi^2 tau) sin(pi x) on [0, 1] with zero ends.

import numpy as np

from bslab.errors import StabilityError
from bslab.fdm import Grid, solve_heat

ZERO = lambda v: np.zeros_like(v)


def error(n_space, n_time, method, tau_end=0.1):
    g = Grid(0.0, 1.0, n_space, tau_end, n_time)
    s = solve_heat(g, lambda x: np.sin(np.pi * x), ZERO, ZERO, method)
    return np.abs(s.values[-1] - np.exp(-np.pi**2 * tau_end) * np.sin(np.pi * g.x)).max()


print("spatial refinement (dtau tiny):")
prev = None
for n in (10, 20, 40, 80):
    e = error(n, 20000, "implicit")
    print(f"  N={n:3d}  err={e:.3e}" + (f"  ratio={prev / e:.2f}" if prev else ""))
    prev = e

print("temporal refinement, implicit (N=400):")
prev = None
for m in (25, 50, 100, 200):
    e = error(400, m, "implicit")
    print(f"  M={m:3d}  err={e:.3e}" + (f"  ratio={prev / e:.2f}" if prev else ""))
    prev = e

# delta = dtau/dx^2 above 1/2 is refused by the explicit scheme ...
g = Grid(0.0, 1.0, 20, 0.1, 50)
print(f"\ndelta = {g.delta:.2f}")
try:
    solve_heat(g, lambda x: np.sin(np.pi * x), ZERO, ZERO, "explicit")
except StabilityError as exc:
    print("explicit:", exc)
# ... while the implicit one stays bounded.
s = solve_heat(g, lambda x: np.sin(np.pi * x), ZERO, ZERO, "implicit")
print(f"implicit: max |u| = {np.abs(s.values).max():.3f}, err = {error(20, 50, 'implicit'):.2e}")
