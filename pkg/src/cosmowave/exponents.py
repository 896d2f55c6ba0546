"""Critical exponents, the FLRW parameter dictionary and lifespan upper bounds.

Everything here is a pure function of its arguments. Roots of the
exponent polynomials are computed in closed form with the cancellation-free
quadratic formula; the only transcendental equation (the logarithmically
corrected bound at alpha = 1) is solved by bracketing in ``s = ln T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from scipy.optimize import brentq

# relative tolerance used to decide that p sits exactly on a critical value
CRITICAL_RTOL = 1e-12


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class NoBoundError(DomainError):
    """No proven lifespan bound covers the requested parameters."""


class Regime(str, Enum):
    A_ACCELERATED = "A_accelerated"
    B_WAVELIKE = "B_wavelike"
    C_HEATLIKE = "C_heatlike"
    NO_BLOWUP_PROVED = "no_blowup_proved"


# ---------------------------------------------------------------------------
# parameter records


def _check_w(w, allow_w_above_one):
    if not w > -1.0:
        raise DomainError(f"w must exceed -1 (got {w}); w = -1 is not covered")
    if w > 1.0 and not allow_w_above_one:
        raise DomainError(f"w must satisfy w <= 1 (got {w}); pass allow_w_above_one=True to override")


def _check_n(n):
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2 (got {n})")


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of u_tt - t^(-2 alpha) Lap u + (mu/t) u_t = |u|^p and the data scale.

    ``epsilon = 0`` is accepted so that a zero-data run can be configured;
    the lifespan formulas themselves require ``epsilon > 0``.
    """

    n: int
    alpha: float
    mu: float
    p: float
    epsilon: float = 1.0
    R: float = 1.0

    def __post_init__(self):
        _check_n(self.n)
        if not self.p > 1:
            raise DomainError(f"p must exceed 1 (got {self.p})")
        if self.alpha < 0 or self.mu < 0:
            raise DomainError("alpha and mu must be nonnegative")
        if self.epsilon < 0:
            raise DomainError(f"epsilon must be nonnegative (got {self.epsilon})")
        if not self.R > 0:
            raise DomainError(f"R must be positive (got {self.R})")


@dataclass(frozen=True)
class FLRWParams:
    """Spatial dimension and equation-of-state parameter of the background."""

    n: int
    w: float
    allow_w_above_one: bool = False

    def __post_init__(self):
        _check_n(self.n)
        _check_w(self.w, self.allow_w_above_one)

    @property
    def alpha(self) -> float:
        return 2.0 / (self.n * (1.0 + self.w))

    @property
    def mu(self) -> float:
        return 2.0 / (1.0 + self.w)

    @property
    def scale_factor_exponent(self) -> float:
        """Power of t in a(t) = c t^(2/(n(1+w)))."""
        return self.alpha

    @property
    def accelerated(self) -> bool:
        wt = acceleration_threshold(self.n)
        return self.w <= wt or _is_close(self.w, wt)

    def model(self, p: float, epsilon: float = 1.0, R: float = 1.0) -> ModelParams:
        return ModelParams(self.n, self.alpha, self.mu, p, epsilon, R)


def acceleration_threshold(n: int) -> float:
    """w = 2/n - 1, uniform acceleration; smaller w accelerates."""
    return 2.0 / n - 1.0


# ---------------------------------------------------------------------------
# root finding


def quadratic_roots(a: float, b: float, c: float) -> tuple[float, ...]:
    """Real roots of a x^2 + b x + c in ascending order.

    Uses q = -(b + sign(b) sqrt(disc))/2 so that neither root suffers
    cancellation. Returns an empty tuple when the discriminant is negative.
    """
    if a == 0.0:
        if b == 0.0:
            raise DomainError("degenerate quadratic: a = b = 0")
        return (-c / b,)
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return ()
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    if q == 0.0:
        # b = 0 and c = 0
        return (0.0, 0.0)
    r1, r2 = q / a, c / q
    return (r1, r2) if r1 <= r2 else (r2, r1)


def _largest_root(a, b, c, what):
    roots = quadratic_roots(a, b, c)
    if not roots:
        raise DomainError(f"{what}: no real root")
    return roots[-1]


def solve_log_power(power: float, log_power: float, log_target: float) -> float:
    """Solve ``power*s - log_power*ln(s) = log_target`` on the increasing branch.

    This is T^power (ln T)^(-log_power) = exp(log_target) written in s = ln T.
    The left side is minimal at s0 = log_power/power and increasing beyond;
    the returned s satisfies s >= s0. Raises :class:`NoBoundError` when the
    target is below the branch minimum.
    """
    if power <= 0 or log_power < 0:
        raise DomainError("need power > 0 and log_power >= 0")

    def g(s):
        return power * s - log_power * math.log(s) - log_target

    s0 = log_power / power if log_power > 0 else 0.0
    if log_power == 0:
        return max(log_target / power, 0.0)
    g0 = g(s0)
    if g0 > 0:
        raise NoBoundError(
            f"target exp({log_target:g}) lies below the branch minimum exp({g0 + log_target:g})"
        )
    if g0 == 0:
        return s0
    hi = 2.0 * s0 + 1.0
    while g(hi) < 0:
        hi *= 2.0
    return brentq(g, s0, hi, xtol=1e-300, rtol=4 * 2.0**-52, maxiter=500)


# ---------------------------------------------------------------------------
# exponent polynomials


def gamma_S(n: int, p: float) -> float:
    """Strauss polynomial -(n-1)p^2 + (n+1)p + 2."""
    return -(n - 1) * p * p + (n + 1) * p + 2.0


def _gamma_coeffs(n, alpha, mu):
    if alpha >= 1:
        raise DomainError(f"gamma(n,p,alpha,mu) needs alpha < 1 (got {alpha})")
    lead = n - 1 + (mu - alpha) / (1 - alpha)
    lin = n + 1 + (mu + 3 * alpha) / (1 - alpha)
    return lead, lin


def gamma(n: int, p: float, alpha: float, mu: float) -> float:
    lead, lin = _gamma_coeffs(n, alpha, mu)
    return -p * p * lead + p * lin + 2.0


def p_fujita(d: float) -> float:
    if not d > 0:
        raise DomainError(f"Fujita exponent needs d > 0 (got {d})")
    return 1.0 + 2.0 / d


def p_strauss(n: int) -> float:
    _check_n(n)
    return _largest_root(-(n - 1), n + 1, 2.0, "Strauss polynomial")


def p_crit(n: int, alpha: float, mu: float) -> float:
    lead, lin = _gamma_coeffs(n, alpha, mu)
    if not lead > 0:
        raise DomainError(f"leading coefficient {lead} <= 0; gamma has no positive critical root")
    return _largest_root(-lead, lin, 2.0, "gamma")


def _gamma0_coeffs(n, w, allow_w_above_one):
    _check_w(w, allow_w_above_one)
    k = 4.0 / (n * (1.0 + w))
    return -(n - 1.0), n + 1.0 + k, 2.0 - k


def gamma0(n: int, p: float, w: float, *, allow_w_above_one: bool = False) -> float:
    a, b, c = _gamma0_coeffs(n, w, allow_w_above_one)
    return a * p * p + b * p + c


def p_crit_flrw(n: int, w: float, *, allow_w_above_one: bool = False) -> float:
    """Larger root of gamma0(n, ., w).

    For w below -1 + 2/n both roots are positive; the larger one is the
    critical exponent and always exceeds the Strauss exponent.
    """
    _check_n(n)
    return _largest_root(*_gamma0_coeffs(n, w, allow_w_above_one), "gamma0")


def fujita_dimension(n: int, w: float) -> float:
    """Effective dimension n - 2/(1+w) = n(1 - alpha) of the heatlike bound."""
    return n - 2.0 / (1.0 + w)


@dataclass(frozen=True)
class WStar:
    value: float | None
    discriminant: float

    @property
    def has_root(self) -> bool:
        return self.value is not None


def w_star(n: int) -> WStar:
    """Larger root of n(n^2+n+2)w^2 + 2n(n-1)^2 w + n^3-5n^2+8n-8.

    At this w the Fujita curve p_F(n - 2/(1+w)) crosses p_c(n, w). A negative
    discriminant is reported through ``value=None`` rather than raised.
    """
    _check_n(n)
    a = n * (n * n + n + 2.0)
    b = 2.0 * n * (n - 1.0) ** 2
    c = n**3 - 5.0 * n**2 + 8.0 * n - 8.0
    disc = b * b - 4 * a * c
    roots = quadratic_roots(a, b, c)
    return WStar(roots[-1] if roots else None, disc)


# ---------------------------------------------------------------------------
# regime classification


def _is_close(x, y):
    return math.isclose(x, y, rel_tol=CRITICAL_RTOL, abs_tol=0.0)


def heat_exponent(d: float, p: float) -> float | None:
    """eps-power -(p-1)/(2 - d(p-1)), or None when the denominator is not positive."""
    den = 2.0 - d * (p - 1.0)
    if den <= 0:
        return None
    return -(p - 1.0) / den


@dataclass
class RegimeReport:
    regime: Regime
    applicable_bound: str
    bound_exponent: float | None
    critical: bool = False
    tie: bool = False
    exponents: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "applicable_bound": self.applicable_bound,
            "bound_exponent": self.bound_exponent,
            "critical": self.critical,
            "tie": self.tie,
            "exponents": dict(self.exponents),
        }


def classify_regime(n: int, w: float, p: float, *, allow_w_above_one: bool = False) -> RegimeReport:
    """Label (w, p) by the lifespan bound that governs it.

    Polynomial bounds T <= C eps^e are compared through |e|: the smaller
    |e| gives the smaller upper bound as eps -> 0 and wins. Exponential
    bounds at critical p enter only when no polynomial bound applies.
    """
    _check_n(n)
    _check_w(w, allow_w_above_one)
    if not p > 1:
        raise DomainError(f"p must exceed 1 (got {p})")

    info = {"p_S": p_strauss(n), "w_threshold": acceleration_threshold(n)}
    ws = w_star(n)
    info["w_star"] = ws.value

    if w <= acceleration_threshold(n) or _is_close(w, acceleration_threshold(n)):
        flrw = FLRWParams(n, w, allow_w_above_one)
        info.update(alpha=flrw.alpha, mu=flrw.mu)
        if _is_close(w, acceleration_threshold(n)):
            bound = "T^2 (ln T)^(-n(p-1)) <= C eps^(-(p-1))"
        else:
            bound = "T <= C eps^(-(p-1)/2)"
        return RegimeReport(Regime.A_ACCELERATED, bound, -(p - 1.0) / 2.0, exponents=info)

    d = fujita_dimension(n, w)
    # d > 0 above the threshold; it only rounds to 0 right next to it
    pF = p_fujita(d) if d > 0 else math.inf
    pc = p_crit_flrw(n, w, allow_w_above_one=allow_w_above_one)
    g0 = gamma0(n, p, w, allow_w_above_one=allow_w_above_one)
    info.update(p_F=pF, p_c=pc, gamma0=g0, gamma_S=gamma_S(n, p), fujita_dimension=d)

    at_pF, at_pc = _is_close(p, pF), _is_close(p, pc)
    heat = heat_exponent(d, p) if (p < pF and not at_pF) else None
    wave = -2.0 * p * (p - 1.0) / g0 if (p < pc and not at_pc) else None
    info.update(heat_exponent=heat, wave_exponent=wave)

    heat_text = "T <= C eps^(-(p-1)/(2-(n-2/(1+w))(p-1)))"
    wave_text = "T <= C eps^(-2p(p-1)/gamma0(n,p,w))"
    if heat is not None and wave is not None:
        if abs(wave) < abs(heat):
            return RegimeReport(Regime.B_WAVELIKE, wave_text, wave, exponents=info)
        if abs(heat) < abs(wave):
            return RegimeReport(Regime.C_HEATLIKE, heat_text, heat, exponents=info)
        return RegimeReport(Regime.B_WAVELIKE, wave_text, wave, tie=True, exponents=info)
    if wave is not None:
        return RegimeReport(Regime.B_WAVELIKE, wave_text, wave, exponents=info)
    if heat is not None:
        return RegimeReport(Regime.C_HEATLIKE, heat_text, heat, exponents=info)
    if at_pc and pc > pF and not at_pF:
        return RegimeReport(
            Regime.B_WAVELIKE, "T <= exp(C eps^(-p(p-1)))", None, critical=True, exponents=info
        )
    if at_pF:
        return RegimeReport(
            Regime.C_HEATLIKE, "T <= exp(C eps^(-(p-1)))", None, critical=True, exponents=info
        )
    return RegimeReport(Regime.NO_BLOWUP_PROVED, "none", None, exponents=info)


# ---------------------------------------------------------------------------
# lifespan bounds


def log_corrected_lifespan(n: int, p: float, rhs: float) -> float:
    """Unique T > exp(n(p-1)/2) with T^2 (ln T)^(-n(p-1)) = rhs."""
    s = solve_log_power(2.0, n * (p - 1.0), math.log(rhs))
    return math.exp(s)


def lifespan_bound(params: ModelParams, C: float = 1.0) -> float:
    """Upper bound for the lifespan at normalization constant ``C``.

    alpha > 1 and alpha = 1 use the accelerated-regime bounds; alpha < 1 takes
    the smallest of the wavelike and heatlike bounds whose p-range contains p.
    """
    eps, p, n, alpha, mu = params.epsilon, params.p, params.n, params.alpha, params.mu
    if not 0 < eps <= 1:
        raise DomainError(f"epsilon must lie in (0, 1] (got {eps})")
    if not C > 0:
        raise DomainError("normalization C must be positive")

    if alpha > 1:
        return C * eps ** (-(p - 1.0) / 2.0)
    if alpha == 1:
        return log_corrected_lifespan(n, p, C * eps ** (-(p - 1.0)))

    candidates = []
    lead, _ = _gamma_coeffs(n, alpha, mu)
    # a nonpositive leading coefficient leaves gamma > 0 for every p > 0
    pc = p_crit(n, alpha, mu) if lead > 0 else math.inf
    pF = p_fujita(n * (1.0 - alpha))
    if p < pc and not _is_close(p, pc):
        g = gamma(n, p, alpha, mu)
        candidates.append(C * eps ** (-2.0 * p * (p - 1.0) / ((1.0 - alpha) * g)))
    elif _is_close(p, pc) and pc > pF:
        candidates.append(math.exp(C * eps ** (-p * (p - 1.0))))
    if p < pF and not _is_close(p, pF):
        e = heat_exponent(n * (1.0 - alpha), p)
        if e is not None:
            candidates.append(C * eps**e)
    elif _is_close(p, pF):
        candidates.append(math.exp(C * eps ** (-(p - 1.0))))
    if not candidates:
        raise NoBoundError(f"no proven bound for p={p} (p_c={pc:.6g}, p_F={pF:.6g})")
    return min(candidates)
