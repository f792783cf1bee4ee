"""
Finite differences for the heat equation u_tau = u_xx on a rectangle.

Nodes are x_n = x_min + n dx (n = 0..N) and tau_m = m dtau (m = 0..M), with
mesh ratio delta = dtau / dx^2.

Explicit (forward difference in tau), stable for 0 < delta <= 1/2::

    u_n^{m+1} = (1 - 2 delta) u_n^m + delta (u_{n+1}^m + u_{n-1}^m)

Implicit (backward difference in tau), unconditionally stable::

    -delta u_{n+1}^{m+1} + (1 + 2 delta) u_n^{m+1} - delta u_{n-1}^{m+1} = u_n^m

The implicit step solves an (N-1)x(N-1) tridiagonal system for the interior
nodes with the Thomas algorithm; the Dirichlet values at m+1 enter the first
and last right-hand-side entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystemError, StabilityError, ValidationError

METHODS = ("explicit", "implicit")


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_space: int
    tau_max: float
    n_time: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max) and self.x_min < self.x_max):
            raise ValidationError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.n_space < 3:
            raise ValidationError(f"n_space must be >= 3, got {self.n_space}")
        # n_time == 0 is allowed: the surface is the initial row only.
        if self.n_time < 0:
            raise ValidationError(f"n_time must be >= 0, got {self.n_time}")
        if self.n_time > 0 and not self.tau_max > 0:
            raise ValidationError(f"tau_max must be > 0, got {self.tau_max}")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_space

    @property
    def dtau(self):
        return self.tau_max / self.n_time if self.n_time else 0.0

    @property
    def delta(self):
        return self.dtau / self.dx**2

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.n_space + 1)

    @property
    def tau(self):
        return np.linspace(0.0, self.tau_max, self.n_time + 1)


@dataclass(frozen=True)
class HeatSurface:
    """``values[m, n]`` approximates u(x_n, tau_m)."""

    values: np.ndarray
    grid: Grid


@dataclass(frozen=True)
class TridiagonalSystem:
    sub: np.ndarray
    main: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        n = len(self.main)
        if n < 1 or len(self.rhs) != n or len(self.sub) != n - 1 or len(self.sup) != n - 1:
            raise ValidationError("inconsistent tridiagonal band lengths")

    def dense(self):
        return np.diag(self.main) + np.diag(self.sub, -1) + np.diag(self.sup, 1)


def build_grid(contract, sigma, s_max, s_floor_ratio=1e-6, n_space=200, n_time=2000):
    """Heat grid for a call: x in [ln s_floor_ratio, ln(s_max/K)], tau in [0, sigma^2 T/2]."""
    K = contract.strike
    if not s_max > K:
        raise ValidationError(f"s_max must exceed the strike, got {s_max} <= {K}")
    if not 0 < s_floor_ratio < s_max / K:
        raise ValidationError(f"s_floor_ratio must lie in (0, s_max/K), got {s_floor_ratio}")
    if not sigma > 0:
        raise ValidationError(f"sigma must be > 0, got {sigma}")
    if int(n_time) < 1:
        raise ValidationError(f"n_time must be >= 1, got {n_time}")
    return Grid(
        x_min=float(np.log(s_floor_ratio)),
        x_max=float(np.log(s_max / K)),
        n_space=int(n_space),
        tau_max=0.5 * sigma**2 * contract.expiry,
        n_time=int(n_time),
    )


def check_stability(delta):
    """Raise unless the explicit scheme is stable, i.e. 0 < delta <= 1/2."""
    if not delta > 0:
        raise ValidationError(f"mesh ratio must be positive, got {delta}")
    if delta > 0.5:
        raise StabilityError(delta)


def explicit_step(row, delta, left_bc, right_bc):
    row = np.asarray(row, dtype=float)
    out = np.empty_like(row)
    out[1:-1] = (1.0 - 2.0 * delta) * row[1:-1] + delta * (row[2:] + row[:-2])
    out[0] = left_bc
    out[-1] = right_bc
    return out


def thomas_factor(sub, main, sup):
    """Forward-elimination factors (modified super-diagonal, pivots)."""
    sub, main, sup = list(map(float, sub)), list(map(float, main)), list(map(float, sup))
    n = len(main)
    cp = [0.0] * n
    piv = [0.0] * n
    piv[0] = main[0]
    if piv[0] == 0.0:
        raise SingularSystemError("zero pivot in row 0")
    for i in range(1, n):
        cp[i - 1] = sup[i - 1] / piv[i - 1]
        piv[i] = main[i] - sub[i - 1] * cp[i - 1]
        if piv[i] == 0.0:
            raise SingularSystemError(f"zero pivot in row {i}")
    return sub, cp, piv


def thomas_solve(factors, rhs):
    sub, cp, piv = factors
    d = list(map(float, rhs))
    n = len(piv)
    d[0] /= piv[0]
    for i in range(1, n):
        d[i] = (d[i] - sub[i - 1] * d[i - 1]) / piv[i]
    for i in range(n - 2, -1, -1):
        d[i] -= cp[i] * d[i + 1]
    return np.array(d)


def solve_tridiagonal(system):
    """Thomas algorithm, O(L); no pivoting, so the band should be diagonally dominant."""
    return thomas_solve(thomas_factor(system.sub, system.main, system.sup), system.rhs)


def implicit_system(row, delta, left_bc_next, right_bc_next):
    """Interior system for one implicit step from ``row``."""
    rhs = np.array(row[1:-1], dtype=float)
    n = rhs.size
    rhs[0] += delta * left_bc_next
    rhs[-1] += delta * right_bc_next
    off = np.full(n - 1, -delta)
    return TridiagonalSystem(sub=off, main=np.full(n, 1.0 + 2.0 * delta), sup=off.copy(), rhs=rhs)


def implicit_step(row, delta, left_bc_next, right_bc_next):
    system = implicit_system(row, delta, left_bc_next, right_bc_next)
    out = np.empty(len(row))
    out[1:-1] = solve_tridiagonal(system)
    out[0] = left_bc_next
    out[-1] = right_bc_next
    return out


def solve_heat(grid, ic, bc_left, bc_right, method="implicit"):
    """March u_tau = u_xx from tau = 0 to tau_max.

    ``ic`` is evaluated on the array of x nodes, ``bc_left``/``bc_right`` on the
    array of tau nodes.  Row 0 is the initial condition in full; boundary
    columns are imposed from row 1 on.
    """
    if method not in METHODS:
        raise ValidationError(f"method must be one of {METHODS}, got {method!r}")
    M, N = grid.n_time, grid.n_space
    tau = grid.tau
    U = np.empty((M + 1, N + 1))
    U[0] = np.broadcast_to(ic(grid.x), N + 1)
    if M == 0:
        return HeatSurface(values=U, grid=grid)
    left = np.broadcast_to(np.asarray(bc_left(tau), dtype=float), M + 1)
    right = np.broadcast_to(np.asarray(bc_right(tau), dtype=float), M + 1)
    delta = grid.delta

    if method == "explicit":
        check_stability(delta)
        for m in range(M):
            U[m + 1] = explicit_step(U[m], delta, left[m + 1], right[m + 1])
    else:
        # The band is identical at every step: factor once, substitute per row.
        proto = implicit_system(U[0], delta, 0.0, 0.0)
        factors = thomas_factor(proto.sub, proto.main, proto.sup)
        for m in range(M):
            rhs = U[m, 1:-1].copy()
            rhs[0] += delta * left[m + 1]
            rhs[-1] += delta * right[m + 1]
            U[m + 1, 1:-1] = thomas_solve(factors, rhs)
            U[m + 1, 0] = left[m + 1]
            U[m + 1, -1] = right[m + 1]
    return HeatSurface(values=U, grid=grid)
