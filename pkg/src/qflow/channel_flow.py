"""Implicit-Euler finite differences for pressure-driven 1D channel flow.

The streamwise velocity u(y, t) between no-slip walls at y = 0 and y = h obeys

    du/dt = -(1/rho) dp/dx + nu d2u/dy2,    u(0) = u(h) = 0.

Backward Euler in time with second-order central differences in y gives, at
every interior grid point,

    -alpha u_{i-1} + (1 + 2 alpha) u_i - alpha u_{i+1} = u_i^old - (dt/rho) dp/dx

with alpha = nu dt / dy**2. Wall values are known (zero) and are removed
from the unknowns, so the system has Ngp - 2 rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, SingularSystemError

__all__ = [
    "FlowParams",
    "LinearSystem",
    "SolutionProfile",
    "initial_profile",
    "assemble_system",
    "classical_solve",
    "step_classical",
    "classical_trajectory",
    "iterate_to_steady_state",
    "analytic_steady_profile",
]


@dataclass(frozen=True)
class FlowParams:
    """Physical and numerical parameters of the channel-flow problem.

    Defaults are the values used in the reference experiments. ``alpha`` is
    prescribed and the time step is derived from it, so refining the grid
    also shrinks ``dt``. ``body_force`` is carried for completeness but does
    not enter the momentum balance.
    """

    height: float = 1.0
    density: float = 0.5
    viscosity: float = 0.6
    pressure_gradient: float = -2.0
    body_force: float = 0.4
    alpha: float = 0.4
    n_steps: int = 10
    grid_points: int = 5

    def __post_init__(self):
        if int(self.grid_points) != self.grid_points or self.grid_points < 3:
            raise ConfigurationError(f"grid_points must be an integer >= 3, got {self.grid_points!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 0:
            raise ConfigurationError(f"n_steps must be a non-negative integer, got {self.n_steps!r}")
        for name in ("height", "density", "viscosity", "alpha"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be positive and finite, got {value!r}")
        if not math.isfinite(self.pressure_gradient):
            raise ConfigurationError("pressure_gradient must be finite")

    @property
    def channel_bounds(self) -> tuple[float, float]:
        return (0.0, self.height)

    @property
    def kinematic_viscosity(self) -> float:
        return self.viscosity / self.density

    @property
    def dy(self) -> float:
        return self.height / (self.grid_points - 1)

    @property
    def dt(self) -> float:
        return self.alpha * self.dy**2 / self.kinematic_viscosity

    @property
    def interior_points(self) -> int:
        return self.grid_points - 2

    @property
    def y(self) -> np.ndarray:
        """Grid coordinates, walls included."""
        return np.linspace(0.0, self.height, self.grid_points)


@dataclass(frozen=True)
class LinearSystem:
    """Dense tridiagonal system ``A u = b`` over the interior points."""

    A: np.ndarray
    b: np.ndarray

    @property
    def size(self) -> int:
        return self.b.shape[0]

    def residual(self, u: np.ndarray) -> np.ndarray:
        return self.A @ np.asarray(u, dtype=float) - self.b


@dataclass(frozen=True)
class SolutionProfile:
    """Velocity at every grid point (walls included) after ``time_index`` steps."""

    values: np.ndarray
    time_index: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 3:
            raise ConfigurationError("a profile needs at least three grid values")
        if values[0] != 0.0 or values[-1] != 0.0:
            raise ConfigurationError("wall values must be exactly zero")
        object.__setattr__(self, "values", values)

    @property
    def interior(self) -> np.ndarray:
        return self.values[1:-1]

    @classmethod
    def from_interior(cls, interior: np.ndarray, time_index: int) -> "SolutionProfile":
        interior = np.asarray(interior, dtype=np.float64)
        return cls(np.concatenate(([0.0], interior, [0.0])), time_index)


def initial_profile(params: FlowParams) -> SolutionProfile:
    """Fluid at rest."""
    return SolutionProfile(np.zeros(params.grid_points), 0)


def assemble_system(params: FlowParams, prev: SolutionProfile) -> LinearSystem:
    """Backward-Euler system advancing ``prev`` by one time step."""
    if params.grid_points < 3:
        raise ConfigurationError("grid_points must be >= 3")
    if prev.values.size != params.grid_points:
        raise ConfigurationError(
            f"profile has {prev.values.size} points, parameters expect {params.grid_points}"
        )
    m = params.interior_points
    a = params.alpha
    A = np.zeros((m, m))
    idx = np.arange(m)
    A[idx, idx] = 1.0 + 2.0 * a
    A[idx[:-1], idx[:-1] + 1] = -a
    A[idx[1:], idx[1:] - 1] = -a
    forcing = -(params.dt / params.density) * params.pressure_gradient
    b = prev.interior + forcing
    return LinearSystem(A, b)


def classical_solve(system: LinearSystem) -> np.ndarray:
    """Solve a tridiagonal ``system`` by forward elimination and back substitution."""
    A = np.asarray(system.A, dtype=np.float64)
    d = np.asarray(system.b, dtype=np.float64)
    n = d.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"matrix shape {A.shape} does not match rhs length {n}")
    if n == 0:
        return np.zeros(0)
    if np.any(np.triu(A, 2)) or np.any(np.tril(A, -2)):
        raise ValueError("matrix is not tridiagonal")

    diag = np.diag(A).copy()
    upper = np.diag(A, 1)
    lower = np.diag(A, -1)
    cp = np.zeros(n)
    dp = np.zeros(n)

    if diag[0] == 0.0:
        raise SingularSystemError("zero pivot in row 0")
    cp[0] = upper[0] / diag[0] if n > 1 else 0.0
    dp[0] = d[0] / diag[0]
    for i in range(1, n):
        denom = diag[i] - lower[i - 1] * cp[i - 1]
        if denom == 0.0:
            raise SingularSystemError(f"zero pivot in row {i}")
        if i < n - 1:
            cp[i] = upper[i] / denom
        dp[i] = (d[i] - lower[i - 1] * dp[i - 1]) / denom

    x = dp
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def step_classical(params: FlowParams, prev: SolutionProfile) -> SolutionProfile:
    u = classical_solve(assemble_system(params, prev))
    return SolutionProfile.from_interior(u, prev.time_index + 1)


def classical_trajectory(params: FlowParams, start: SolutionProfile | None = None) -> list[SolutionProfile]:
    """Initial profile followed by ``params.n_steps`` classical steps."""
    profile = initial_profile(params) if start is None else start
    out = [profile]
    for _ in range(params.n_steps):
        profile = step_classical(params, profile)
        out.append(profile)
    return out


def iterate_to_steady_state(
    params: FlowParams, tol: float = 1e-10, max_steps: int = 1_000_000
) -> SolutionProfile:
    """Step from rest until the max-norm change per step drops below ``tol``."""
    profile = initial_profile(params)
    for _ in range(max_steps):
        nxt = step_classical(params, profile)
        if np.max(np.abs(nxt.values - profile.values)) < tol:
            return nxt
        profile = nxt
    raise RuntimeError(f"no steady state within {max_steps} steps")


def analytic_steady_profile(params: FlowParams, y):
    """Plane Poiseuille profile ``-(dp/dx) / (2 mu) * y * (h - y)``."""
    y_arr = np.asarray(y, dtype=np.float64)
    if np.any(y_arr < 0.0) or np.any(y_arr > params.height):
        raise ValueError("y must lie inside the channel")
    out = (-params.pressure_gradient / (2.0 * params.viscosity)) * y_arr * (params.height - y_arr)
    return float(out) if out.ndim == 0 else out
