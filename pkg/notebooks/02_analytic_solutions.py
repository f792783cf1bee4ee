# Closed-form pieces
# ==================
#
# Power solutions of x^2 y'' + a x y' + b y = 0, the separable solutions of the
# pricing PDE, and a quadrature price used as the reference everywhere else.

from bslab.analytic import (
    CauchyEulerCoeffs,
    OptionContract,
    PowerSolution,
    SeparationSolution,
    cauchy_euler_roots,
    closed_form_call,
    eval_cauchy_euler,
    eval_separation,
    implied_vol,
    separation_exponents,
)
from bslab.errors import UnsupportedRootsError

print("roots a=0, b=-2:", cauchy_euler_roots(CauchyEulerCoeffs(0.0, -2.0)))
sol = PowerSolution.from_coeffs(CauchyEulerCoeffs(0.0, -2.0), alpha=1.0, beta=1.0)
print("y(2) =", eval_cauchy_euler(sol, 2.0))

try:
    cauchy_euler_roots(CauchyEulerCoeffs(1.0, 0.25))
except UnsupportedRootsError as exc:
    print("rejected:", exc)

# A = S^m with sigma^2/2 m(m-1) + r m = c.  c = r gives m = 1, i.e. f = S.
print("exponents for c = r:", separation_exponents(0.05, 0.2, 0.05))
f_is_S = SeparationSolution(alpha=1.0, beta=0.0, gamma=1.0, c=0.05, r=0.05, sigma=0.2)
print("f(80, 0.3) =", eval_separation(f_is_S, 80.0, 0.3))

# Reference price and its inversion.
contract = OptionContract(strike=100.0, expiry=1.0)
price = closed_form_call(100.0, 0.0, contract, r=0.05, sigma=0.2)
print(f"\nATM call, r=5%, sigma=20%: {price:.10f}")
for spot in (85.0, 100.0, 120.0):
    p = closed_form_call(spot, 0.0, contract, 0.05, 0.8)
    print(f"spot {spot:5.1f}: price {p:9.5f} -> implied vol {implied_vol(p, spot, contract, 0.05):.10f}")
