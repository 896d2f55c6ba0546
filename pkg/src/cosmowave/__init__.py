"""Semilinear damped waves with time-dependent speed on FLRW backgrounds.

Critical exponents and regime labels, the Kato-lemma lower-bound ladder
with its comparison ODE, a radial finite-difference simulator, and
epsilon sweeps with scaling-law fits.
"""

from ._accel import backend_name
from .exponents import (
    DomainError, FLRWParams, ModelParams, NoBoundError, Regime, RegimeReport,
    acceleration_threshold, classify_regime, fujita_dimension, gamma, gamma0, gamma_S,
    lifespan_bound, p_crit, p_crit_flrw, p_fujita, p_strauss, quadratic_roots, w_star,
)
from .kato_ode import (
    Coefficient, KatoParams, KatoSequences, OdeTrajectory, divergence_condition,
    integrate_kato, kato_bound, kato_sequences,
)
from .sweep_fit import FitResult, OdeSource, PdeSource, SweepRecord, fit_log_corrected, fit_powerlaw, sweep
from .wave_sim import (
    ConfigError, LightCone, RadialGrid, RadialState, SimResult, Stepping, advance_to,
    functional_F, radial_laplacian, run_to_blowup, step, support_radius, verify_cone,
)

__version__ = "0.1.0"
