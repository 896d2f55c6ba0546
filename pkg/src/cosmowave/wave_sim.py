"""Radially symmetric finite differences for u_tt - t^(-2a) Lap u + (mu/t) u_t = |u|^p.

The grid is r_i = i h on [0, r_max] with an even (reflecting) origin and a
homogeneous Dirichlet node at r_max. Time stepping is the damped leapfrog
of :mod:`cosmowave._kernels`. By default each step moves the numerical
front by one cell against the speed t^(-alpha) at the step midpoint, so the discrete
domain of dependence follows the light cone R + A(t) instead of running
ahead of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .exponents import DomainError, ModelParams
from .kato_ode import propagation_extent


class ConfigError(DomainError):
    """A simulation was configured so that its result cannot be trusted."""


@dataclass(frozen=True)
class RadialGrid:
    r_max: float
    N: int
    n: int

    def __post_init__(self):
        if not self.r_max > 0:
            raise ConfigError("r_max must be positive")
        if self.N < 16:
            raise ConfigError("need at least 16 cells")
        if self.n < 1:
            raise ConfigError("dimension must be positive")

    @property
    def h(self) -> float:
        return self.r_max / self.N

    @property
    def r(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h

    def trapezoid_weights(self) -> np.ndarray:
        """omega_{n-1} r^(n-1) times composite trapezoid weights."""
        w = np.full(self.N + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return sphere_area(self.n) * self.r ** (self.n - 1) * w


@dataclass
class RadialState:
    t: float
    u: np.ndarray
    v: np.ndarray
    dt: float
    blown_up: bool = False

    def copy(self) -> RadialState:
        return RadialState(self.t, self.u.copy(), self.v.copy(), self.dt, self.blown_up)


@dataclass(frozen=True)
class LightCone:
    alpha: float
    R: float

    def __post_init__(self):
        if self.alpha < 1:
            raise DomainError("the cone is only bounded here for alpha >= 1")

    def extent(self, t):
        return propagation_extent(t, self.alpha)

    def radius(self, t):
        return self.R + self.extent(t)

    @property
    def sup_radius(self) -> float:
        """Radius the cone approaches as t -> infinity (inf when alpha = 1)."""
        return math.inf if self.alpha == 1 else self.R + 1.0 / (self.alpha - 1.0)


@dataclass(frozen=True)
class Forcing:
    """Separable source g(t, r_i) = sum_k t**exponents[k] * profiles[k, i]."""

    exponents: np.ndarray
    profiles: np.ndarray

    @classmethod
    def none(cls, size: int) -> Forcing:
        return cls(np.empty(0), np.empty((0, size)))


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def radial_laplacian(state_or_u, grid: RadialGrid) -> np.ndarray:
    """u_rr + (n-1)/r u_r by centered differences; n u_rr at the origin, 0 at r_max."""
    u = state_or_u.u if isinstance(state_or_u, RadialState) else np.asarray(state_or_u, float)
    return _kernels.radial_laplacian_numpy(u, grid.h, grid.n)


def bump(r: np.ndarray, R: float) -> np.ndarray:
    """(1 - (r/R)^2)^4 on r <= R, zero outside; C^3 across r = R."""
    x = np.clip(1.0 - (r / R) ** 2, 0.0, None)
    return x**4


@dataclass(frozen=True)
class Stepping:
    """Time-step policy.

    ``dt_fixed > 0`` forces uniform steps. Otherwise each step is
    min(cfl h (t + dt/2)^alpha, t_frac t, nl_frac (p max|u|^(p-1))^(-1/2)): a
    Courant number ``cfl`` against the midpoint speed, capped by the damping
    and nonlinear time scales. ``origin`` is ``"extrapolate"`` (u_0 from the
    even extrapolation of u_1, u_2) or ``"ghost"`` (u_0 evolved with the
    symmetric ghost node, stable only for cfl <= sqrt(2/n)).
    """

    cfl: float = 1.0
    t_frac: float = 0.2
    nl_frac: float = 0.2
    dt_fixed: float = 0.0
    origin: str = "extrapolate"

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl must lie in (0, 1]")
        if self.origin not in ("extrapolate", "ghost"):
            raise ConfigError(f"unknown origin treatment {self.origin!r}")
        if self.t_frac <= 0 or self.nl_frac <= 0 or self.dt_fixed < 0:
            raise ConfigError("step caps must be positive")

    @property
    def origin_mode(self) -> int:
        return 1 if self.origin == "extrapolate" else 0


def initial_state(params: ModelParams, grid: RadialGrid, cfl: float = 1.0) -> RadialState:
    """u(1) = eps*bump, u_t(1) = eps*bump; ``dt`` starts at cfl*h."""
    if not 0 < cfl <= 1:
        raise ConfigError("cfl must lie in (0, 1]")
    u0 = params.epsilon * bump(grid.r, params.R)
    u0[-1] = 0.0
    return RadialState(1.0, u0, u0.copy(), cfl * grid.h)


def _advance(state, grid, params, nsteps, forcing=None, threshold=math.inf, nonlinear=True,
             stepping=Stepping(), t_stop=math.inf):
    if forcing is None:
        forcing = Forcing.none(grid.N + 1)
    done, t, status, _, dt = _kernels.advance(
        state.u, state.v, float(state.t), int(nsteps), grid.h, float(grid.n),
        float(params.alpha), float(params.mu), float(params.p), bool(nonlinear),
        forcing.exponents, forcing.profiles, float(threshold), float(stepping.dt_fixed),
        float(stepping.cfl), float(stepping.t_frac), float(stepping.nl_frac), float(t_stop),
        stepping.origin_mode,
    )
    state.t = t
    if dt > 0:
        state.dt = dt
    if status == _kernels.PDE_NONFINITE:
        state.blown_up = True
    return done, status


def step(state: RadialState, grid: RadialGrid, params: ModelParams,
         forcing: Forcing | None = None, nonlinear: bool = True,
         origin: str = "extrapolate") -> RadialState:
    """Advance a copy of ``state`` by one step of size ``state.dt``.

    Non-finite values do not raise; the returned state keeps its time and
    has ``blown_up`` set.
    """
    if state.dt > grid.h * state.t ** params.alpha:
        raise ConfigError("dt exceeds the CFL limit h / c(t)")
    new = state.copy()
    _advance(new, grid, params, 1, forcing, math.inf, nonlinear,
             Stepping(dt_fixed=state.dt, origin=origin))
    return new


def advance_to(state: RadialState, grid: RadialGrid, params: ModelParams, t_end: float,
               forcing: Forcing | None = None, nonlinear: bool = True,
               origin: str = "extrapolate") -> RadialState:
    """Uniform steps of at most ``state.dt`` until exactly t_end, in place."""
    nsteps = max(1, math.ceil((t_end - state.t) / state.dt - 1e-9))
    state.dt = (t_end - state.t) / nsteps
    _advance(state, grid, params, nsteps, forcing, math.inf, nonlinear,
             Stepping(dt_fixed=state.dt, origin=origin), t_stop=math.inf)
    state.t = t_end
    return state


def support_radius(state_or_u, grid: RadialGrid, tol: float) -> float:
    """Largest node radius where |u| exceeds ``tol``; 0 when there is none."""
    u = state_or_u.u if isinstance(state_or_u, RadialState) else np.asarray(state_or_u)
    idx = np.flatnonzero(np.abs(u) > tol)
    return float(idx[-1] * grid.h) if idx.size else 0.0


def functional_F(state: RadialState, grid: RadialGrid) -> tuple[float, float]:
    """(integral of u, integral of u_t) over R^n for the radial profile."""
    w = grid.trapezoid_weights()
    return float(w @ state.u), float(w @ state.v)


def radial_energy(state: RadialState, grid: RadialGrid, alpha: float) -> float:
    """(1/2) integral of (u_t^2 + t^(-2 alpha) u_r^2) over R^n, u_r at cell midpoints."""
    h = grid.h
    ur = np.diff(state.u) / h
    rm = (np.arange(grid.N) + 0.5) * h
    grad = sphere_area(grid.n) * np.sum(ur**2 * rm ** (grid.n - 1)) * h
    kin = grid.trapezoid_weights() @ (state.v**2)
    return 0.5 * (kin + state.t ** (-2.0 * alpha) * grad)


@dataclass
class SimResult:
    lifespan_estimate: float | None
    terminated_reason: str
    t: list = field(default_factory=list)
    max_u: list = field(default_factory=list)
    support_r: list = field(default_factory=list)
    F: list = field(default_factory=list)
    Fprime: list = field(default_factory=list)
    h: float | None = None
    dt: float | None = None
    support_tol: float | None = None

    @property
    def max_history(self):
        return list(zip(self.t, self.max_u))

    @property
    def support_history(self):
        return list(zip(self.t, self.support_r))

    @property
    def F_history(self):
        return list(zip(self.t, self.F, self.Fprime))

    def to_dict(self) -> dict:
        return {
            "lifespan_estimate": self.lifespan_estimate,
            "terminated_reason": self.terminated_reason,
            "h": self.h,
            "dt": self.dt,
            "support_tol": self.support_tol,
            "history": {
                "t": list(self.t), "max_u": list(self.max_u), "support_r": list(self.support_r),
                "F": list(self.F), "Fprime": list(self.Fprime),
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> SimResult:
        hist = d.get("history", {})
        return cls(
            lifespan_estimate=d["lifespan_estimate"],
            terminated_reason=d["terminated_reason"],
            h=d.get("h"), dt=d.get("dt"), support_tol=d.get("support_tol"),
            **{k: list(hist.get(k, [])) for k in ("t", "max_u", "support_r", "F", "Fprime")},
        )


def check_grid(params: ModelParams, grid: RadialGrid, horizon: float, margin_cells: int = 8):
    """Reject grids whose outer boundary the cone could reach before ``horizon``."""
    if params.alpha < 1:
        raise ConfigError("the simulator covers alpha >= 1 only")
    if params.n != grid.n:
        raise ConfigError(f"grid dimension {grid.n} differs from model dimension {params.n}")
    reach = LightCone(params.alpha, params.R).radius(horizon) + margin_cells * grid.h
    if not grid.r_max > reach:
        raise ConfigError(
            f"r_max = {grid.r_max} does not clear the cone R + A(horizon) + margin = {reach:.6g}"
        )


def _crossing_time(state, grid, params, threshold, stepping):
    """Bisect the partial step u + s v + s^2/2 (a - mu v/t) for max|u| = threshold."""
    acc = _kernels._accel_numpy(state.u, state.t, grid.h, float(grid.n), params.alpha,
                                params.p, True, np.empty(0), np.empty((0, grid.N + 1)))
    drift = acc - params.mu * state.v / state.t
    peak0 = float(np.max(np.abs(state.u)))
    hi = _kernels._next_dt(state.t, peak0, grid.h, params.alpha, params.p, True,
                           stepping.dt_fixed, stepping.cfl, stepping.t_frac,
                           stepping.nl_frac, math.inf)

    def peak(s):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.nanmax(np.abs(state.u + s * state.v + 0.5 * s * s * drift))

    lo = 0.0
    while peak(hi) < threshold and hi < 1e6:
        hi *= 2.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if peak(mid) >= threshold:
            hi = mid
        else:
            lo = mid
    return state.t + hi


def run_to_blowup(params: ModelParams, grid: RadialGrid, threshold: float = 1e6,
                  horizon: float = 100.0, stride: int = 50, stepping: Stepping = Stepping(),
                  support_rtol: float = 1e-12) -> SimResult:
    """March the compact bump data until max|u| >= threshold or t >= horizon.

    Histories of (t, max|u|, support radius, F, F') are recorded every
    ``stride`` steps and at termination. On a threshold crossing the final
    step is bisected so the reported lifespan is the crossing time itself.
    """
    check_grid(params, grid, horizon)
    state = initial_state(params, grid, stepping.cfl)
    tol = support_rtol * float(np.max(np.abs(state.u)))
    res = SimResult(None, "horizon", h=grid.h, dt=state.dt, support_tol=tol)

    def record():
        F, Fp = functional_F(state, grid)
        res.t.append(state.t)
        res.max_u.append(float(np.max(np.abs(state.u))))
        res.support_r.append(support_radius(state, grid, tol))
        res.F.append(F)
        res.Fprime.append(Fp)

    record()
    while state.t < horizon:
        done, status = _advance(state, grid, params, stride, None, threshold, True,
                                stepping, t_stop=horizon)
        if status == _kernels.PDE_THRESHOLD:
            if done:
                record()
            res.lifespan_estimate = _crossing_time(state, grid, params, threshold, stepping)
            res.terminated_reason = "threshold"
            break
        if status == _kernels.PDE_NONFINITE:
            res.lifespan_estimate = state.t
            res.terminated_reason = "nonfinite"
            break
        record()
    res.dt = state.dt
    return res


@dataclass
class ConeReport:
    max_violation_cells: float
    samples: int
    ok: bool
    slack_cells: float = 3.0

    def to_dict(self):
        return {"max_violation_cells": self.max_violation_cells, "samples": self.samples,
                "ok": self.ok, "slack_cells": self.slack_cells}


def verify_cone(result: SimResult, cone: LightCone, grid: RadialGrid,
                slack_cells: float = 3.0) -> ConeReport:
    """Compare every recorded support radius with R + A(t).

    ``max_violation_cells`` is max((support - R - A(t))/h) over samples;
    the run is consistent when it does not exceed ``slack_cells``.
    """
    if not result.t:
        return ConeReport(-math.inf, 0, True, slack_cells)
    t = np.asarray(result.t)
    excess = (np.asarray(result.support_r) - cone.radius(t)) / grid.h
    worst = float(excess.max())
    return ConeReport(worst, len(t), worst <= slack_cells, slack_cells)


def functional_monotonicity(result: SimResult, mu: float) -> dict:
    """Worst drops of F(t) - F(1) and of t^mu F'(t) between samples, relative to scale."""
    t = np.asarray(result.t)
    F = np.asarray(result.F)
    G = t**mu * np.asarray(result.Fprime)
    scale_F = max(abs(F[0]), 1e-300)
    scale_G = max(np.max(np.abs(G)), 1e-300)
    return {
        "F_min_minus_F1": float(np.min(F - F[0]) / scale_F),
        "tmuFp_worst_drop": float(np.min(np.diff(G), initial=0.0) / scale_G),
        "F1": float(F[0]),
    }
