"""Hot inner loops.

The scalar ODE integrator is a single loop that numba compiles when
enabled and that runs as plain Python otherwise. The leapfrog advance has
two bodies: an explicit node loop for numba and a vectorized numpy
version, selected through ``USE_NUMBA`` (see :mod:`cosmowave._accel`).
Both follow the same per-node arithmetic.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, njit

# status codes shared with the Python wrappers
ODE_THRESHOLD, ODE_HORIZON, ODE_STEP_FLOOR, ODE_MAX_STEPS = 0, 1, 2, 3
PDE_OK, PDE_THRESHOLD, PDE_NONFINITE = 0, 1, 2

KIND_CONSTANT, KIND_CONE = 0, 1


# ---------------------------------------------------------------------------
# comparison ODE  F'' + (mu/t) F' = K(t) |F|^p


@njit
def _coefficient(t, kind, A1, R, alpha, npow):
    if kind == KIND_CONSTANT:
        return A1
    if alpha == 1.0:
        ext = math.log(t)
    else:
        ext = (1.0 - t ** (1.0 - alpha)) / (alpha - 1.0)
    return A1 * (R + ext) ** (-npow)


@njit
def _power(x, p):
    # |x|^p that saturates to inf instead of raising on the Python path
    ax = abs(x)
    if ax == 0.0:
        return 0.0
    if p * math.log(ax) > 700.0:
        return math.inf
    return ax ** p


@njit
def _rhs(t, F, G, mu, p, kind, A1, R, alpha, npow):
    acc = _coefficient(t, kind, A1, R, alpha, npow) * _power(F, p)
    if mu != 0.0:
        acc -= mu / t * G
    return G, acc


@njit
def dopri5(t0, F0, G0, mu, p, kind, A1, R, alpha, npow,
            threshold, horizon, rtol, atol, floor_rel, max_steps, h0):
    ts = np.empty(max_steps)
    Fs = np.empty(max_steps)
    Gs = np.empty(max_steps)
    ts[0], Fs[0], Gs[0] = t0, F0, G0
    count = 1
    t, F, G = t0, F0, G0
    h = h0
    k1F, k1G = _rhs(t, F, G, mu, p, kind, A1, R, alpha, npow)
    status = ODE_MAX_STEPS
    while count < max_steps:
        if t >= horizon:
            status = ODE_HORIZON
            break
        if h > horizon - t:
            h = horizon - t
        if h < floor_rel * max(abs(t), 1.0):
            status = ODE_STEP_FLOOR
            break
        k2F, k2G = _rhs(t + h / 5.0, F + h * (k1F / 5.0), G + h * (k1G / 5.0),
                        mu, p, kind, A1, R, alpha, npow)
        k3F, k3G = _rhs(t + 3.0 * h / 10.0,
                        F + h * (3.0 / 40.0 * k1F + 9.0 / 40.0 * k2F),
                        G + h * (3.0 / 40.0 * k1G + 9.0 / 40.0 * k2G),
                        mu, p, kind, A1, R, alpha, npow)
        k4F, k4G = _rhs(t + 4.0 * h / 5.0,
                        F + h * (44.0 / 45.0 * k1F - 56.0 / 15.0 * k2F + 32.0 / 9.0 * k3F),
                        G + h * (44.0 / 45.0 * k1G - 56.0 / 15.0 * k2G + 32.0 / 9.0 * k3G),
                        mu, p, kind, A1, R, alpha, npow)
        k5F, k5G = _rhs(t + 8.0 * h / 9.0,
                        F + h * (19372.0 / 6561.0 * k1F - 25360.0 / 2187.0 * k2F
                                 + 64448.0 / 6561.0 * k3F - 212.0 / 729.0 * k4F),
                        G + h * (19372.0 / 6561.0 * k1G - 25360.0 / 2187.0 * k2G
                                 + 64448.0 / 6561.0 * k3G - 212.0 / 729.0 * k4G),
                        mu, p, kind, A1, R, alpha, npow)
        k6F, k6G = _rhs(t + h,
                        F + h * (9017.0 / 3168.0 * k1F - 355.0 / 33.0 * k2F + 46732.0 / 5247.0 * k3F
                                 + 49.0 / 176.0 * k4F - 5103.0 / 18656.0 * k5F),
                        G + h * (9017.0 / 3168.0 * k1G - 355.0 / 33.0 * k2G + 46732.0 / 5247.0 * k3G
                                 + 49.0 / 176.0 * k4G - 5103.0 / 18656.0 * k5G),
                        mu, p, kind, A1, R, alpha, npow)
        Fn = F + h * (35.0 / 384.0 * k1F + 500.0 / 1113.0 * k3F + 125.0 / 192.0 * k4F
                      - 2187.0 / 6784.0 * k5F + 11.0 / 84.0 * k6F)
        Gn = G + h * (35.0 / 384.0 * k1G + 500.0 / 1113.0 * k3G + 125.0 / 192.0 * k4G
                      - 2187.0 / 6784.0 * k5G + 11.0 / 84.0 * k6G)
        k7F, k7G = _rhs(t + h, Fn, Gn, mu, p, kind, A1, R, alpha, npow)
        eF = h * (71.0 / 57600.0 * k1F - 71.0 / 16695.0 * k3F + 71.0 / 1920.0 * k4F
                  - 17253.0 / 339200.0 * k5F + 22.0 / 525.0 * k6F - 1.0 / 40.0 * k7F)
        eG = h * (71.0 / 57600.0 * k1G - 71.0 / 16695.0 * k3G + 71.0 / 1920.0 * k4G
                  - 17253.0 / 339200.0 * k5G + 22.0 / 525.0 * k6G - 1.0 / 40.0 * k7G)
        sF = atol + rtol * max(abs(F), abs(Fn))
        sG = atol + rtol * max(abs(G), abs(Gn))
        qF, qG = eF / sF, eG / sG
        err = math.sqrt(0.5 * (qF * qF + qG * qG))
        if not (err <= 1.0):
            # rejected, including non-finite stages past the singularity
            if err == err and err < math.inf:
                h *= max(0.2, 0.9 * err ** -0.2)
            else:
                h *= 0.2
            continue
        t += h
        F, G = Fn, Gn
        k1F, k1G = k7F, k7G
        ts[count], Fs[count], Gs[count] = t, F, G
        count += 1
        if F >= threshold:
            status = ODE_THRESHOLD
            break
        if err == 0.0:
            h *= 5.0
        else:
            h *= min(5.0, max(0.2, 0.9 * err ** -0.2))
    return ts[:count], Fs[:count], Gs[:count], status



# ---------------------------------------------------------------------------
# radial leapfrog for u_tt - t^(-2 alpha) Lap u + (mu/t) u_t = |u|^p + g
#
# The state is (u, v) with v the centered velocity. One step of size dt reads
#     u+ = u + dt v + dt^2/2 (a - mu v / t)
#     v+ = ((u+ - u)/dt + dt/2 a+) / (1 + mu dt / (2 t+))
# For constant dt this is the three-level leapfrog with the damping term
# time-centered and solved implicitly; for varying dt it is velocity Verlet.
# Node N is homogeneous Dirichlet. Node 0 is either evolved with the ghost
# value u[-1] = u[1] (origin_mode 0) or set after each step by the even
# extrapolation (4 u[1] - u[2]) / 3 (origin_mode 1), which removes the stiff
# origin mode whose CFL limit is sqrt(2/n).
#
# Step sizes: dt_fixed > 0 gives uniform steps. Otherwise
#     dt = min(cfl h (t + dt/2)^alpha, t_frac t, nl_frac / sqrt(p max|u|^(p-1)), t_stop - t)
# i.e. a Courant number cfl against the speed at the step midpoint, capped by
# the damping and nonlinear time scales. The front of the scheme moves one
# cell per step while the cone moves c(t_n) (dt_prev + dt)/2; the midpoint
# choice makes that h up to O(dt^2), where the left-point choice h t^alpha
# would leave the cone (alpha/2) ln t cells behind.
#
# Forcing is separable: g(t, r_i) = sum_k t**fexp[k] * fprof[k, i].


@njit
def _accel_loops(u, t, h, n, alpha, p, nonlinear, fexp, fprof, out):
    N = u.shape[0] - 1
    c2 = t ** (-2.0 * alpha)
    ih2 = 1.0 / (h * h)
    out[0] = c2 * (n * 2.0 * (u[1] - u[0]) * ih2)
    for i in range(1, N):
        lap = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * ih2 \
            + (n - 1.0) / (i * h) * (u[i + 1] - u[i - 1]) / (2.0 * h)
        out[i] = c2 * lap
    out[N] = 0.0
    if nonlinear:
        for i in range(N):
            out[i] += abs(u[i]) ** p
    for k in range(fexp.shape[0]):
        tk = t ** fexp[k]
        for i in range(N):
            out[i] += tk * fprof[k, i]


@njit
def _next_dt(t, peak, h, alpha, p, nonlinear, dt_fixed, cfl, t_frac, nl_frac, t_stop):
    if dt_fixed > 0.0:
        dt = dt_fixed
    else:
        # Courant number against the speed at the step midpoint, so that the
        # dual intervals (dt_prev + dt)/2 carry the cone one cell per step
        dt = cfl * h * t ** alpha
        for _ in range(4):
            dt = cfl * h * (t + 0.5 * dt) ** alpha
        if t_frac * t < dt:
            dt = t_frac * t
        if nonlinear and peak > 0.0:
            cap = nl_frac / math.sqrt(p * peak ** (p - 1.0))
            if cap < dt:
                dt = cap
    if t + dt > t_stop:
        dt = t_stop - t
    return dt


@njit
def advance_loops(u, v, t, nsteps, h, n, alpha, mu, p, nonlinear, fexp, fprof,
                  threshold, dt_fixed, cfl, t_frac, nl_frac, t_stop, origin_mode):
    N = u.shape[0] - 1
    acc = np.empty_like(u)
    acc_new = np.empty_like(u)
    u_new = np.empty_like(u)
    _accel_loops(u, t, h, n, alpha, p, nonlinear, fexp, fprof, acc)
    peak = 0.0
    for i in range(N + 1):
        if abs(u[i]) > peak:
            peak = abs(u[i])
    done = 0
    status = PDE_OK
    dt = 0.0
    while done < nsteps and t < t_stop:
        dt = _next_dt(t, peak, h, alpha, p, nonlinear, dt_fixed, cfl, t_frac, nl_frac, t_stop)
        half = 0.5 * dt * dt
        for i in range(N):
            u_new[i] = u[i] + dt * v[i] + half * (acc[i] - mu * v[i] / t)
        u_new[N] = 0.0
        if origin_mode == 1:
            u_new[0] = (4.0 * u_new[1] - u_new[2]) / 3.0
        new_peak = 0.0
        finite = True
        for i in range(N + 1):
            ax = abs(u_new[i])
            if not ax < math.inf:
                finite = False
            elif ax > new_peak:
                new_peak = ax
        if not finite:
            status = PDE_NONFINITE
            break
        if new_peak >= threshold:
            status = PDE_THRESHOLD
            break
        t_new = t + dt
        _accel_loops(u_new, t_new, h, n, alpha, p, nonlinear, fexp, fprof, acc_new)
        damp = 1.0 / (1.0 + mu * dt / (2.0 * t_new))
        for i in range(N + 1):
            v[i] = ((u_new[i] - u[i]) / dt + 0.5 * dt * acc_new[i]) * damp
            u[i] = u_new[i]
            acc[i] = acc_new[i]
        if origin_mode == 1:
            v[0] = (4.0 * v[1] - v[2]) / 3.0
        t = t_new
        peak = new_peak
        done += 1
    return done, t, status, peak, dt


def _accel_numpy(u, t, h, n, alpha, p, nonlinear, fexp, fprof):
    out = np.empty_like(u)
    ih2 = 1.0 / (h * h)
    i = np.arange(1, u.shape[0] - 1)
    out[0] = n * 2.0 * (u[1] - u[0]) * ih2
    out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) * ih2 \
        + (n - 1.0) / (i * h) * (u[2:] - u[:-2]) / (2.0 * h)
    out *= t ** (-2.0 * alpha)
    out[-1] = 0.0
    if nonlinear:
        out[:-1] += np.abs(u[:-1]) ** p
    for k in range(fexp.shape[0]):
        out[:-1] += t ** fexp[k] * fprof[k, :-1]
    return out


def advance_numpy(u, v, t, nsteps, h, n, alpha, mu, p, nonlinear, fexp, fprof,
                  threshold, dt_fixed, cfl, t_frac, nl_frac, t_stop, origin_mode):
    peak = float(np.abs(u).max())
    done = 0
    status = PDE_OK
    dt = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        acc = _accel_numpy(u, t, h, n, alpha, p, nonlinear, fexp, fprof)
        while done < nsteps and t < t_stop:
            dt = _next_dt(t, peak, h, alpha, p, nonlinear, dt_fixed, cfl, t_frac, nl_frac, t_stop)
            u_new = u + dt * v + 0.5 * dt * dt * (acc - mu * v / t)
            u_new[-1] = 0.0
            if origin_mode == 1:
                u_new[0] = (4.0 * u_new[1] - u_new[2]) / 3.0
            a = np.abs(u_new)
            if not np.isfinite(a).all():
                status = PDE_NONFINITE
                break
            new_peak = float(a.max())
            if new_peak >= threshold:
                status = PDE_THRESHOLD
                break
            t_new = t + dt
            acc = _accel_numpy(u_new, t_new, h, n, alpha, p, nonlinear, fexp, fprof)
            v[:] = ((u_new - u) / dt + 0.5 * dt * acc) / (1.0 + mu * dt / (2.0 * t_new))
            u[:] = u_new
            if origin_mode == 1:
                v[0] = (4.0 * v[1] - v[2]) / 3.0
            t = t_new
            peak = new_peak
            done += 1
    return done, t, status, peak, dt


def radial_laplacian_numpy(u, h, n):
    """Centered radial Laplacian; node 0 uses the ghost value u[-1] = u[1]."""
    return _accel_numpy(u, 1.0, h, n, 0.0, 1.0, False, np.empty(0), np.empty((0, u.shape[0])))


advance = advance_loops if USE_NUMBA else advance_numpy
