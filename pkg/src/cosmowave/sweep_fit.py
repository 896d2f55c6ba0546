"""Epsilon sweeps over the ODE model or the PDE simulator, and scaling-law fits."""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .exponents import DomainError, ModelParams
from .kato_ode import Coefficient, integrate_kato
from .wave_sim import ConfigError, RadialGrid, Stepping, check_grid, run_to_blowup

log = logging.getLogger(__name__)

DEFAULT_EPS_GRID = tuple(2.0**-k for k in range(6, 17))
SLOPE_TOL = 0.10
R2_FLOOR = 0.98


class InsufficientDataError(DomainError):
    pass


def digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class OdeSource:
    mu: float
    p: float
    K: Coefficient = Coefficient()
    f0: float = 1.0
    f1: float = 1.0
    t0: float = 1.0
    threshold: float = 1e10
    horizon: float = 1e12

    kind = "ode"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["K"] = self.K.to_dict()
        return {"source": "ode", **d}

    def run(self, eps: float) -> tuple[float | None, str]:
        traj = integrate_kato(self.mu, self.p, self.K, eps * self.f0, eps * self.f1,
                              t0=self.t0, threshold=self.threshold, horizon=self.horizon)
        return traj.blowup_time, traj.terminated_reason


@dataclass(frozen=True)
class PdeSource:
    n: int
    alpha: float
    mu: float
    p: float
    r_max: float
    N: int
    R: float = 1.0
    threshold: float = 1e6
    horizon: float = 1e3
    stepping: Stepping = Stepping()

    kind = "pde"

    def to_dict(self) -> dict:
        return {"source": "pde", **asdict(self)}

    def grid(self) -> RadialGrid:
        return RadialGrid(self.r_max, self.N, self.n)

    def model(self, eps: float) -> ModelParams:
        return ModelParams(self.n, self.alpha, self.mu, self.p, eps, self.R)

    def validate(self):
        check_grid(self.model(1.0), self.grid(), self.horizon)

    def run(self, eps: float) -> tuple[float | None, str]:
        res = run_to_blowup(self.model(eps), self.grid(), self.threshold, self.horizon,
                            stride=200, stepping=self.stepping)
        return res.lifespan_estimate, res.terminated_reason


@dataclass
class SweepRecord:
    epsilon: float
    lifespan: float | None
    source: str
    config_digest: str
    reason: str = ""


def _threads(requested):
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("COSMOWAVE_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def sweep(source, eps_list, threads: int | None = None) -> list[SweepRecord]:
    """One record per epsilon, in input order.

    Runs are independent and may execute concurrently (the kernels release
    the GIL); ``COSMOWAVE_THREADS`` caps the pool. A failed run yields
    ``lifespan=None`` with the reason instead of aborting the sweep.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(not e > 0 for e in eps_list):
        raise ConfigError("eps_list must be nonempty and positive")
    if isinstance(source, PdeSource):
        source.validate()
    tag = digest(source.to_dict())

    def one(eps):
        try:
            T, reason = source.run(eps)
        except (DomainError, FloatingPointError, OverflowError) as exc:
            return SweepRecord(eps, None, source.kind, tag, f"error: {exc}")
        if T is not None and not T > 1:
            return SweepRecord(eps, None, source.kind, tag, f"nonphysical lifespan {T}")
        return SweepRecord(eps, T, source.kind, tag, reason)

    n = _threads(threads)
    if n == 1 or len(eps_list) == 1:
        return [one(e) for e in eps_list]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(one, eps_list))


@dataclass
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    theory_slope: float
    relative_deviation: float
    passed: bool
    transform: str
    n_points: int
    source: str = "ode"
    descriptive: bool = False
    inputs_digest: str = ""
    excluded: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _usable(records, trim_smallest):
    pts = [(r.epsilon, r.lifespan) for r in records if r.lifespan is not None]
    pts.sort()
    if trim_smallest and pts:
        pts = pts[1:]
    return pts


def _ols(x, y, theory, transform, records, excluded, tol, r2_floor):
    if len(x) < 4:
        raise InsufficientDataError(f"need at least 4 finite lifespans, have {len(x)}")
    fit = stats.linregress(np.asarray(x), np.asarray(y))
    r2 = min(1.0, max(0.0, float(fit.rvalue) ** 2))
    dev = abs(fit.slope - theory) / abs(theory)
    sources = {r.source for r in records}
    source = sources.pop() if len(sources) == 1 else "mixed"
    return FitResult(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=r2,
        theory_slope=theory,
        relative_deviation=float(dev),
        passed=bool(dev <= tol and r2 >= r2_floor),
        transform=transform,
        n_points=len(x),
        source=source,
        descriptive=source != "ode",
        inputs_digest=digest([[r.epsilon, r.lifespan, r.source, r.config_digest] for r in records]),
        excluded=excluded,
    )


def fit_powerlaw(records, p: float, *, tol: float = SLOPE_TOL, r2_floor: float = R2_FLOOR,
                 trim_smallest: bool = False) -> FitResult:
    """Least squares of ln T on ln eps against the slope -(p-1)/2."""
    pts = _usable(records, trim_smallest)
    x = [math.log(e) for e, _ in pts]
    y = [math.log(T) for _, T in pts]
    return _ols(x, y, -(p - 1.0) / 2.0, "loglog", records, [], tol, r2_floor)


def fit_log_corrected(records, n: int, p: float, *, tol: float = SLOPE_TOL,
                      r2_floor: float = R2_FLOOR, trim_smallest: bool = False) -> FitResult:
    """Least squares of ln(T^2 (ln T)^(-n(p-1))) on ln eps against the slope -(p-1).

    Lifespans T <= e make the transform non-monotone and are dropped.
    """
    pts = _usable(records, trim_smallest)
    kept, excluded = [], []
    for e, T in pts:
        (kept if T > math.e else excluded).append((e, T))
    if excluded:
        log.warning("dropping %d records with lifespan <= e", len(excluded))
    x = [math.log(e) for e, _ in kept]
    y = [2.0 * math.log(T) - n * (p - 1.0) * math.log(math.log(T)) for _, T in kept]
    return _ols(x, y, -(p - 1.0), "log_corrected", records, [e for e, _ in excluded],
                tol, r2_floor)


def upper_shape_check(records, p: float, slack: float = 0.02) -> dict:
    """Compare lifespans with C eps^(-(p-1)/2), C fixed by the largest-eps record.

    The accelerated-regime bound is an upper bound, so every lifespan should
    satisfy T <= (1 + slack) C eps^(-(p-1)/2).
    """
    pts = _usable(records, False)
    if not pts:
        raise InsufficientDataError("no finite lifespans")
    e_max, T_max = pts[-1]
    C = T_max * e_max ** ((p - 1.0) / 2.0)
    ratios = [T / (C * e ** (-(p - 1.0) / 2.0)) for e, T in pts]
    return {"C": C, "max_ratio": max(ratios), "ratios": ratios,
            "ok": max(ratios) <= 1.0 + slack, "slack": slack}


def monotone_in_eps(records, slack: float = 0.01) -> bool:
    """Lifespan nonincreasing in eps, up to a relative slack."""
    pts = _usable(records, False)
    return all(T_big <= (1.0 + slack) * T_small
               for (_, T_small), (_, T_big) in zip(pts, pts[1:]))
