"""Kato-type blow-up machinery for the functional F(t) = integral of u.

Two pieces live here. The iteration behind the generalized Kato lemmas
(the exponent sequences, the constant E and the resulting bounds on the
lifespan), and a direct integrator for the sharp comparison ODE

    F'' + (mu/t) F' = K(t) |F|^p

with blow-up detection by power-law extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .exponents import DomainError, NoBoundError, solve_log_power


class Variant(str, Enum):
    """Which lemma: with logarithmic weights (alpha = 1) or without (alpha > 1)."""

    LEMMA23 = "lemma23"
    LEMMA33 = "lemma33"


def _variant(v) -> Variant:
    if isinstance(v, Variant):
        return v
    v = str(v).lower().replace(".", "").replace("_", "")
    aliases = {"23": Variant.LEMMA23, "lemma23": Variant.LEMMA23,
               "33": Variant.LEMMA33, "lemma33": Variant.LEMMA33}
    if v not in aliases:
        raise DomainError(f"unknown lemma variant {v!r}")
    return aliases[v]


def propagation_extent(t, alpha: float):
    """A(t) = integral of s^(-alpha) over [1, t]; the growth of the support radius."""
    if alpha == 1:
        return np.log(t)
    return (1.0 - np.power(t, 1.0 - alpha)) / (alpha - 1.0)


@dataclass(frozen=True)
class KatoParams:
    """Constants of the lemma hypotheses.

    For the logarithmic lemma F >= A0 t^-a (ln t)^-b (t-T1)^c and
    F'' + mu F'/t >= A1 (ln t)^-q |F|^p. For the plain lemma the lower bound
    is A0 t^-a (t-T1)^b and ``c``, ``q`` are unused.
    """

    a: float
    b: float
    mu: float
    p: float
    A0: float
    A1: float
    c: float | None = None
    q: float | None = None
    T0: float = 1.5
    T1: float = 2.0

    def M(self, variant="lemma23") -> float:
        if _variant(variant) is Variant.LEMMA23:
            return (self.p - 1.0) * (self.c - self.a) + 2.0
        return (self.p - 1.0) * (self.b - self.a) + 2.0

    def validate(self, variant="lemma23") -> KatoParams:
        variant = _variant(variant)
        if not self.p > 1:
            raise DomainError("p must exceed 1")
        if self.a < 0 or self.mu < 0:
            raise DomainError("a and mu must be nonnegative")
        if not (self.b > 0 and self.A0 > 0 and self.A1 > 0):
            raise DomainError("b, A0 and A1 must be positive")
        if not self.T1 > self.T0 > 1:
            raise DomainError("need T1 > T0 > 1")
        if variant is Variant.LEMMA23:
            if self.c is None or self.q is None or not (self.c > 0 and self.q > 0):
                raise DomainError("the logarithmic lemma needs c > 0 and q > 0")
        if not self.M(variant) > 0:
            raise DomainError(f"M = {self.M(variant)} must be positive")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class KatoSequences:
    """Iterates of the lower-bound ladder F >= D_j t^-a_j (ln t)^-b_j (t-T1)^c_j.

    ``lnD`` is stored instead of D_j, which grows doubly exponentially. For
    the plain lemma, ``b`` holds the power of (t - T1) and ``c`` is None.
    """

    variant: Variant
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray | None
    lnD: np.ndarray
    E: float
    B: float
    overflowed: bool

    @property
    def D(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.lnD)

    @property
    def J(self) -> int:
        return len(self.a) - 1


_LN_MAX = math.log(np.finfo(float).max)


def kato_sequences(params: KatoParams, J: int, variant="lemma23") -> KatoSequences:
    """Run the recurrences for j = 0..J, stopping early once D_j leaves float range."""
    variant = _variant(variant)
    params.validate(variant)
    if J < 1:
        raise DomainError("J must be at least 1")
    p, mu = params.p, params.mu
    log_weight = variant is Variant.LEMMA23
    a = [float(params.a)]
    b = [float(params.b)]
    c = [float(params.c)] if log_weight else None
    lnD = [math.log(params.A0)]
    overflowed = False
    lnA1 = math.log(params.A1)
    for _ in range(J):
        gap = c[-1] if log_weight else b[-1]
        a_next = p * a[-1] + mu
        if log_weight:
            b_next = p * b[-1] + params.q
            c_next = p * c[-1] + mu + 2.0
        else:
            b_next = p * b[-1] + mu + 2.0
            c_next = None
        lnD_next = lnA1 + p * lnD[-1] - 2.0 * math.log(p * gap + mu + 2.0)
        vals = [a_next, b_next, lnD_next] + ([c_next] if log_weight else [])
        if not all(math.isfinite(x) for x in vals) or abs(lnD_next) > _LN_MAX:
            overflowed = True
            break
        a.append(a_next)
        b.append(b_next)
        if log_weight:
            c.append(c_next)
        lnD.append(lnD_next)
    return KatoSequences(
        variant=variant,
        a=np.array(a),
        b=np.array(b),
        c=np.array(c) if log_weight else None,
        lnD=np.array(lnD),
        E=kato_E(params, variant),
        B=kato_B(params, variant),
        overflowed=overflowed,
    )


def closed_form_sequences(params: KatoParams, j, variant="lemma23"):
    """Closed forms x_j = p^j (x_0 + s/(p-1)) - s/(p-1) of the linear recurrences."""
    variant = _variant(variant)
    p, mu = params.p, params.mu
    pj = np.power(p, np.asarray(j, dtype=float))

    def lin(x0, shift):
        return pj * (x0 + shift / (p - 1.0)) - shift / (p - 1.0)

    a = lin(params.a, mu)
    if variant is Variant.LEMMA23:
        return a, lin(params.b, params.q), lin(params.c, mu + 2.0)
    return a, lin(params.b, mu + 2.0), None


def kato_B(params: KatoParams, variant="lemma23") -> float:
    variant = _variant(variant)
    gap = params.c if variant is Variant.LEMMA23 else params.b
    return (gap + (params.mu + 2.0) / (params.p - 1.0)) ** -2 * params.A1


def kato_E(params: KatoParams, variant="lemma23") -> float:
    """E = min(0, ln B)/(p-1) - 2 ln p sum_k k p^-k + ln A0, the series summed to p/(p-1)^2."""
    p = params.p
    series = p / (p - 1.0) ** 2
    lnB = math.log(kato_B(params, variant))
    return min(0.0, lnB) / (p - 1.0) - 2.0 * math.log(p) * series + math.log(params.A0)


def kato_bound(params: KatoParams, variant="lemma23", C: float = 1.0) -> float:
    """Largest lifespan compatible with the lemma at normalization ``C``.

    The plain lemma gives C A0^(-(p-1)/M) directly. The logarithmic one is
    solved for the root of T^(M/(p-1)) (ln T)^(-b-q/(p-1)) = C/A0 on the
    branch T > exp((p-1)(b+q/(p-1))/M). Raises :class:`NoBoundError` when
    C/A0 lies below that branch's minimum.
    """
    variant = _variant(variant)
    params.validate(variant)
    if not C > 0:
        raise DomainError("normalization C must be positive")
    p = params.p
    M = params.M(variant)
    if variant is Variant.LEMMA33:
        return C * params.A0 ** (-(p - 1.0) / M)
    s = solve_log_power(M / (p - 1.0), params.b + params.q / (p - 1.0), math.log(C / params.A0))
    return math.exp(s)


def kato_bound_residual(params: KatoParams, T: float, C: float = 1.0) -> float:
    """Relative residual of T^(M/(p-1)) (ln T)^(-b-q/(p-1)) against C/A0, in log space."""
    p = params.p
    M = params.M(Variant.LEMMA23)
    s = math.log(T)
    lhs = M / (p - 1.0) * s - (params.b + params.q / (p - 1.0)) * math.log(s)
    return math.expm1(lhs - math.log(C / params.A0))


def divergence_condition(t: float, params: KatoParams, E: float, variant="lemma23") -> float:
    """Exponent multiplying p^j in the iterated lower bound; positive means divergence."""
    variant = _variant(variant)
    if not t > params.T1:
        raise DomainError(f"t must exceed T1 = {params.T1}")
    p, mu = params.p, params.mu
    gap = params.c if variant is Variant.LEMMA23 else params.b
    val = E + (gap + (mu + 2.0) / (p - 1.0)) * math.log(t - params.T1) \
        - (params.a + mu / (p - 1.0)) * math.log(t)
    if variant is Variant.LEMMA23:
        val -= (params.b + params.q / (p - 1.0)) * math.log(math.log(t))
    return val


# ---------------------------------------------------------------------------
# comparison ODE


@dataclass(frozen=True)
class Coefficient:
    """K(t): ``constant`` gives A1; ``cone`` gives A1 (R + A(t))^(-n(p-1))."""

    kind: str = "constant"
    A1: float = 1.0
    R: float = 1.0
    alpha: float = 1.0
    n: int = 2
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("constant", "cone"):
            raise DomainError(f"unknown coefficient kind {self.kind!r}")
        if not self.A1 > 0:
            raise DomainError("A1 must be positive")
        if self.kind == "cone" and not (self.R > 0 and self.alpha >= 1):
            raise DomainError("cone coefficient needs R > 0 and alpha >= 1")

    @classmethod
    def cone(cls, R, alpha, n, p, A1=1.0):
        return cls("cone", A1, R, alpha, n, p)

    @property
    def power(self) -> float:
        return self.n * (self.p - 1.0)

    def __call__(self, t):
        if self.kind == "constant":
            return self.A1 * np.ones_like(np.asarray(t, dtype=float))
        return self.A1 * (self.R + propagation_extent(t, self.alpha)) ** (-self.power)

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "A1": self.A1}
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> Coefficient:
        return cls(**d)

    def _kernel_args(self):
        kind = _kernels.KIND_CONSTANT if self.kind == "constant" else _kernels.KIND_CONE
        return kind, float(self.A1), float(self.R), float(self.alpha), float(self.power)


@dataclass
class OdeTrajectory:
    times: np.ndarray
    F: np.ndarray
    Fp: np.ndarray
    blowup_time: float | None
    terminated_reason: str

    def summary(self) -> dict:
        return {
            "blowup_time": self.blowup_time,
            "terminated_reason": self.terminated_reason,
            "steps": int(len(self.times) - 1),
            "t_final": float(self.times[-1]),
            "F_final": float(self.F[-1]),
            "Fprime_final": float(self.Fp[-1]),
        }


_REASONS = {
    _kernels.ODE_THRESHOLD: "threshold",
    _kernels.ODE_HORIZON: "horizon",
    _kernels.ODE_STEP_FLOOR: "step_floor",
    _kernels.ODE_MAX_STEPS: "max_steps",
}


def integrate_kato(mu: float, p: float, K: Coefficient, F0: float, F1: float,
                   t0: float = 1.0, threshold: float = 1e10, horizon: float = 1e12,
                   rtol: float = 1e-10, atol: float = 1e-12,
                   step_floor: float = 1e-14, max_steps: int = 500_000) -> OdeTrajectory:
    """Integrate F'' + (mu/t) F' = K(t)|F|^p from F(t0) = F0, F'(t0) = F1.

    Dormand-Prince 5(4) with embedded error control. Once F passes
    ``threshold`` the blow-up time is extrapolated from the local power law
    F ~ k (T - t)^(-2/(p-1)), which gives T = t + (2/(p-1)) F/F'.
    """
    if F0 < 0 or F1 < 0:
        raise DomainError("initial data F0, F1 must be nonnegative")
    if not p > 1:
        raise DomainError("p must exceed 1")
    if mu < 0:
        raise DomainError("mu must be nonnegative")
    if t0 < 1 and (mu != 0 or K.kind == "cone"):
        raise DomainError("t0 < 1 is only admitted for mu = 0 with a constant coefficient")
    if t0 < 0:
        raise DomainError("t0 must be nonnegative")
    if not threshold > F0:
        raise DomainError("threshold must exceed F0")
    h0 = 1e-4 * max(1.0, t0)
    ts, Fs, Gs, status = _kernels.dopri5(
        float(t0), float(F0), float(F1), float(mu), float(p), *K._kernel_args(),
        float(threshold), float(horizon), float(rtol), float(atol), float(step_floor),
        int(max_steps), float(h0),
    )
    blowup = None
    if status == _kernels.ODE_THRESHOLD:
        blowup = float(ts[-1] + (2.0 / (p - 1.0)) * Fs[-1] / Gs[-1])
    return OdeTrajectory(np.asarray(ts), np.asarray(Fs), np.asarray(Gs), blowup, _REASONS[status])


def ode_lifespan_sweep(mu: float, p: float, K: Coefficient, eps_list, shape=(1.0, 1.0),
                       **kwargs) -> list[tuple[float, float | None]]:
    """Blow-up time for each eps with data F(t0) = eps*f0, F'(t0) = eps*f1.

    Failed entries (no blow-up before the horizon, step floor) map to None.
    """
    f0, f1 = shape
    out = []
    for eps in eps_list:
        try:
            traj = integrate_kato(mu, p, K, eps * f0, eps * f1, **kwargs)
            out.append((float(eps), traj.blowup_time))
        except (DomainError, FloatingPointError):
            out.append((float(eps), None))
    return out


__all__ = [
    "Coefficient", "KatoParams", "KatoSequences", "NoBoundError", "OdeTrajectory", "Variant",
    "closed_form_sequences", "divergence_condition", "integrate_kato", "kato_B", "kato_E",
    "kato_bound", "kato_bound_residual", "kato_sequences", "ode_lifespan_sweep",
    "propagation_extent",
]
