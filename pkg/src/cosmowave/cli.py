"""Command-line front end: ``cosmowave <command> [flags]``.

Every command accepts ``--config run.json`` whose keys are the command's
flag names (dashes or underscores) plus ``schema`` and, optionally,
``command``. Explicit flags override the file. Exit codes: 0 success,
2 invalid input, 3 I/O failure, 4 abnormal run termination.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import re
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from . import exponents as ex
from ._accel import backend_name
from .kato_ode import (
    Coefficient, KatoParams, divergence_condition, integrate_kato, kato_B, kato_bound,
    kato_E, kato_sequences, propagation_extent,
)
from .sweep_fit import (
    DEFAULT_EPS_GRID, OdeSource, PdeSource, SweepRecord, fit_log_corrected, fit_powerlaw, sweep,
)
from .wave_sim import RadialGrid, Stepping, run_to_blowup

SCHEMA = "cosmowave/1"
EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_ABNORMAL = 0, 2, 3, 4

log = logging.getLogger("cosmowave")


class CliError(Exception):
    def __init__(self, message, code=EXIT_INVALID):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# output helpers


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _out_dir(args) -> Path:
    d = Path(args.out) if args.out else Path(".")
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {d}: {exc}", EXIT_IO) from exc
    return d


def _write_text(path: Path, text: str):
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    _write_text(path, "\n".join(lines) + "\n")


def _emit(args, summary: dict, human: list[str]):
    if args.json:
        sys.stdout.write(_dumps(summary))
    else:
        for line in human:
            print(line)


def _config_echo(args, keys) -> dict:
    cfg = {"schema": SCHEMA, "command": args.command}
    for k in keys:
        cfg[k] = getattr(args, k)
    return cfg


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + m.replace("_", "-") for m in missing)
        raise CliError(f"missing required parameter(s): {flags}")


# ---------------------------------------------------------------------------
# exponents


def cmd_exponents(args) -> int:
    _need(args, "n")
    n = args.n
    rep: dict = {"n": n, "p_S": ex.p_strauss(n), "p_F": ex.p_fujita(n)}
    if args.w is not None:
        if args.alpha is not None or args.mu is not None:
            raise CliError("give either --w or --alpha/--mu, not both")
        flrw = ex.FLRWParams(n, args.w, args.allow_w_above_one)
        alpha, mu = flrw.alpha, flrw.mu
        d = ex.fujita_dimension(n, args.w)
        rep.update(w=args.w, alpha=alpha, mu=mu, scale_factor_exponent=flrw.scale_factor_exponent,
                   accelerated=flrw.accelerated, w_threshold=ex.acceleration_threshold(n),
                   w_star=ex.w_star(n).value, fujita_dimension=d,
                   p_F_reduced=ex.p_fujita(d) if d > 0 else None)
        try:
            rep["p_c"] = ex.p_crit_flrw(n, args.w, allow_w_above_one=args.allow_w_above_one)
        except ex.DomainError:
            rep["p_c"] = None
        rep["regime"] = ex.Regime.A_ACCELERATED.value if flrw.accelerated else None
        if args.p is not None:
            report = ex.classify_regime(n, args.w, args.p, allow_w_above_one=args.allow_w_above_one)
            rep.update(p=args.p, gamma_S=ex.gamma_S(n, args.p),
                       gamma0=ex.gamma0(n, args.p, args.w, allow_w_above_one=args.allow_w_above_one),
                       regime=report.regime.value, classification=report.to_dict())
    else:
        _need(args, "alpha", "mu")
        alpha, mu = args.alpha, args.mu
        if alpha < 0 or mu < 0:
            raise CliError("alpha and mu must be nonnegative")
        rep.update(alpha=alpha, mu=mu, accelerated=alpha >= 1)
        try:
            rep["p_c"] = ex.p_crit(n, alpha, mu)
        except ex.DomainError:
            rep["p_c"] = None
        if args.p is not None:
            rep.update(p=args.p, gamma_S=ex.gamma_S(n, args.p))
            rep["gamma"] = ex.gamma(n, args.p, alpha, mu) if alpha < 1 else None
    rep["config"] = _config_echo(args, ["n", "w", "alpha", "mu", "p", "allow_w_above_one"])
    if args.out:
        _write_text(_out_dir(args) / "exponents.json", _dumps(rep))
    human = [f"{k} = {_fmt(v)}" for k, v in rep.items() if k not in ("config", "classification")]
    _emit(args, rep, human)
    return EXIT_OK


# ---------------------------------------------------------------------------
# regions


def _axis(lo, hi, num):
    # half-open (lo, hi]: the left endpoint is excluded
    return [lo + (hi - lo) * (i + 1) / num for i in range(num)]


def region_grid(n: int, w_axis, p_axis) -> dict:
    """Regime labels on the (w, p) grid and sampled boundary curves."""
    labels = [[ex.classify_regime(n, w, p).regime.value for w in w_axis] for p in p_axis]
    w_lo, w_hi = w_axis[0], w_axis[-1]
    p_lo, p_hi = p_axis[0], p_axis[-1]

    def inside(w, p):
        return p is not None and math.isfinite(p) and w_lo <= w <= w_hi and p_lo <= p <= p_hi

    fujita, critical = [], []
    for w in w_axis:
        d = ex.fujita_dimension(n, w)
        if d > 0 and inside(w, ex.p_fujita(d)):
            fujita.append([w, ex.p_fujita(d)])
        if w > ex.acceleration_threshold(n):
            pc = ex.p_crit_flrw(n, w)
            if inside(w, pc):
                critical.append([w, pc])
    curves = {"fujita": fujita, "critical": critical}
    wt = ex.acceleration_threshold(n)
    curves["acceleration"] = [[wt, p] for p in p_axis] if w_lo <= wt <= w_hi else []
    ws = ex.w_star(n).value
    curves["w_star"] = [[ws, p] for p in p_axis] if ws is not None and w_lo <= ws <= w_hi else []
    return {"schema": SCHEMA, "n": n, "w_axis": list(w_axis), "p_axis": list(p_axis),
            "labels": labels, "boundary_curves": curves, "w_star": ws, "w_threshold": wt}


def cmd_regions(args) -> int:
    if args.resolution < 2:
        raise CliError("resolution must be at least 2")
    if not (-1 < args.w_min < args.w_max <= 1):
        raise CliError("need -1 < w-min < w-max <= 1")
    if not args.p_max > 1:
        raise CliError("p-max must exceed 1")
    for n in args.n:
        if n < 2:
            raise CliError(f"n must be at least 2 (got {n})")
    out = _out_dir(args)
    w_axis = _axis(args.w_min, args.w_max, args.resolution)
    p_axis = _axis(1.0, args.p_max, args.resolution)
    summary = {"files": [], "grids": []}
    for n in args.n:
        grid = region_grid(n, w_axis, p_axis)
        rows = [(w, p, grid["labels"][j][i])
                for j, p in enumerate(p_axis) for i, w in enumerate(w_axis)]
        files = [f"regions_n{n}.csv", f"regions_n{n}.json"]
        _write_csv(out / files[0], ("w", "p", "label"), rows)
        _write_text(out / files[1], _dumps(grid))
        for name, pts in grid["boundary_curves"].items():
            fname = f"boundary_n{n}_{name}.csv"
            _write_csv(out / fname, ("w", "p"), pts)
            files.append(fname)
        counts = {}
        for row in grid["labels"]:
            for lab in row:
                counts[lab] = counts.get(lab, 0) + 1
        summary["files"] += files
        summary["grids"].append({"n": n, "w_star": grid["w_star"],
                                 "w_threshold": grid["w_threshold"], "label_counts": counts})
    summary["config"] = _config_echo(args, ["n", "resolution", "w_min", "w_max", "p_max"])
    human = [f"n={g['n']}: w*={_fmt(g['w_star'])}, counts={g['label_counts']}"
             for g in summary["grids"]]
    human.append(f"wrote {len(summary['files'])} files to {out}")
    _emit(args, summary, human)
    return EXIT_OK


# ---------------------------------------------------------------------------
# ode


def _coefficient(args) -> Coefficient:
    if args.coef == "constant":
        return Coefficient("constant", args.A1)
    _need(args, "n")
    return Coefficient.cone(args.R, args.alpha, args.n, args.p, args.A1)


ODE_KEYS = ["mu", "p", "coef", "A1", "R", "alpha", "n", "F0", "F1", "t0", "threshold",
            "horizon", "rtol", "atol"]


def cmd_ode(args) -> int:
    _need(args, "mu", "p")
    K = _coefficient(args)
    traj = integrate_kato(args.mu, args.p, K, args.F0, args.F1, t0=args.t0,
                          threshold=args.threshold, horizon=args.horizon,
                          rtol=args.rtol, atol=args.atol)
    out = _out_dir(args)
    _write_csv(out / "ode_trajectory.csv", ("t", "F", "Fprime"),
               zip(traj.times.tolist(), traj.F.tolist(), traj.Fp.tolist()))
    summary = {**traj.summary(), "backend": backend_name(),
               "config": _config_echo(args, ODE_KEYS)}
    _write_text(out / "ode.json", _dumps(summary))
    _emit(args, summary, [f"blowup_time = {_fmt(traj.blowup_time)}",
                          f"terminated_reason = {traj.terminated_reason}"])
    if traj.terminated_reason in ("step_floor", "max_steps"):
        return EXIT_ABNORMAL
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


SIM_KEYS = ["n", "alpha", "mu", "p", "eps", "R", "r_max", "N", "threshold", "horizon",
            "stride", "cfl", "t_frac", "nl_frac", "origin"]


def _auto_r_max(args):
    if args.r_max is not None:
        return args.r_max
    reach = args.R + float(propagation_extent(args.horizon, args.alpha))
    # leave room for the eight-cell margin the grid check asks for
    return reach * (1.0 + 16.0 / args.N) + 0.25


def _stepping(args) -> Stepping:
    return Stepping(cfl=args.cfl, t_frac=args.t_frac, nl_frac=args.nl_frac, origin=args.origin)


def cmd_simulate(args) -> int:
    _need(args, "n", "alpha", "mu", "p", "eps")
    args.r_max = _auto_r_max(args)
    params = ex.ModelParams(args.n, args.alpha, args.mu, args.p, args.eps, args.R)
    grid = RadialGrid(args.r_max, args.N, args.n)
    res = run_to_blowup(params, grid, args.threshold, args.horizon, args.stride, _stepping(args))
    out = _out_dir(args)
    _write_csv(out / "simulate_history.csv", ("t", "max_u", "support_r", "F", "Fprime"),
               zip(res.t, res.max_u, res.support_r, res.F, res.Fprime))
    summary = {"lifespan_estimate": res.lifespan_estimate,
               "terminated_reason": res.terminated_reason,
               "result": res.to_dict(), "backend": backend_name(),
               "config": _config_echo(args, SIM_KEYS)}
    _write_text(out / "simulate.json", _dumps(summary))
    _emit(args, summary, [f"lifespan_estimate = {_fmt(res.lifespan_estimate)}",
                          f"terminated_reason = {res.terminated_reason}"])
    return EXIT_ABNORMAL if res.terminated_reason == "nonfinite" else EXIT_OK


# ---------------------------------------------------------------------------
# sweep


_RANGE = re.compile(r"^\s*([0-9.eE+-]+)\^([+-]?\d+)\s*\.\.\s*(?:([0-9.eE+-]+)\^)?([+-]?\d+)\s*$")


def parse_eps_grid(text) -> list[float]:
    """``2^-6..2^-16`` (inclusive, unit exponent steps) or a comma list of numbers."""
    if text is None:
        return list(DEFAULT_EPS_GRID)
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    m = _RANGE.match(str(text))
    if m:
        base = float(m.group(1))
        if m.group(3) is not None and float(m.group(3)) != base:
            raise CliError("eps range must use one base")
        k0, k1 = int(m.group(2)), int(m.group(4))
        step = 1 if k1 >= k0 else -1
        return [base**k for k in range(k0, k1 + step, step)]
    vals = []
    for tok in str(text).split(","):
        tok = tok.strip()
        if "^" in tok:
            b, e = tok.split("^", 1)
            vals.append(float(b) ** float(e))
        else:
            vals.append(float(tok))
    return vals


SWEEP_KEYS = ["source", "mu", "p", "coef", "A1", "R", "alpha", "n", "F0", "F1", "r_max", "N",
              "threshold", "horizon", "eps_grid", "threads"]


def _sweep_source(args):
    _need(args, "mu", "p")
    if args.source == "ode":
        return OdeSource(args.mu, args.p, _coefficient(args), args.F0, args.F1,
                         threshold=args.threshold or 1e10, horizon=args.horizon or 1e12)
    _need(args, "n", "alpha")
    horizon = args.horizon or 1e3
    args.horizon = horizon
    args.r_max = _auto_r_max(args)
    return PdeSource(args.n, args.alpha, args.mu, args.p, args.r_max, args.N, args.R,
                     threshold=args.threshold or 1e6, horizon=horizon)


def _records_csv(path: Path, records):
    _write_csv(path, ("epsilon", "lifespan", "source"),
               ((r.epsilon, r.lifespan, r.source) for r in records))


def cmd_sweep(args) -> int:
    try:
        eps = parse_eps_grid(args.eps_grid)
    except ValueError as exc:
        raise CliError(f"cannot parse eps grid: {exc}") from exc
    source = _sweep_source(args)
    records = sweep(source, eps, threads=args.threads)
    out = _out_dir(args)
    _records_csv(out / "sweep.csv", records)
    summary = {"source_config": source.to_dict(), "records": [asdict(r) for r in records],
               "failed": sum(r.lifespan is None for r in records),
               "config": _config_echo(args, SWEEP_KEYS)}
    _write_text(out / "sweep.json", _dumps(summary))
    human = [f"{r.epsilon!r}\t{_fmt(r.lifespan)}\t{r.reason}" for r in records]
    _emit(args, summary, human)
    return EXIT_OK


# ---------------------------------------------------------------------------
# fit


def read_records(path: Path) -> list[SweepRecord]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    if not rows or rows[0] != ["epsilon", "lifespan", "source"]:
        raise CliError(f"{path} lacks the header epsilon,lifespan,source")
    digest = ""
    side = path.with_suffix(".json")
    if side.exists():
        try:
            digest = json.loads(side.read_text())["records"][0]["config_digest"]
        except (ValueError, KeyError, IndexError):
            digest = ""
    out = []
    try:
        for eps, T, src in rows[1:]:
            out.append(SweepRecord(float(eps), float(T) if T else None, src, digest))
    except ValueError as exc:
        raise CliError(f"malformed row in {path}: {exc}") from exc
    return out


def _sidecar_config(path: Path) -> dict:
    side = path.with_suffix(".json")
    if not side.exists():
        return {}
    try:
        return json.loads(side.read_text()).get("source_config", {})
    except (OSError, ValueError):
        return {}


FIT_KEYS = ["input", "transform", "p", "n", "trim", "tol", "r2_floor"]


def cmd_fit(args) -> int:
    path = Path(args.input) if args.input else _out_dir(args) / "sweep.csv"
    records = read_records(path)
    cfg = _sidecar_config(path)
    p = args.p if args.p is not None else cfg.get("p")
    if p is None:
        raise CliError("missing --p and no sweep metadata next to the input")
    transform = args.transform
    if transform == "auto":
        K = cfg.get("K", {})
        cone_log = K.get("kind") == "cone" and K.get("alpha") == 1.0
        pde_log = cfg.get("source") == "pde" and cfg.get("alpha") == 1.0
        transform = "log_corrected" if (cone_log or pde_log) else "loglog"
    if transform == "log_corrected":
        n = args.n if args.n is not None else cfg.get("n", cfg.get("K", {}).get("n"))
        if n is None:
            raise CliError("the log-corrected fit needs --n")
        res = fit_log_corrected(records, int(n), p, tol=args.tol, r2_floor=args.r2_floor,
                                trim_smallest=args.trim)
    else:
        res = fit_powerlaw(records, p, tol=args.tol, r2_floor=args.r2_floor,
                           trim_smallest=args.trim)
    summary = {**res.to_dict(), "config": _config_echo(args, FIT_KEYS)}
    _write_text(_out_dir(args) / "fit.json", _dumps(summary))
    verdict = "descriptive" if res.descriptive else ("pass" if res.passed else "fail")
    _emit(args, summary, [f"slope = {res.slope!r} (theory {res.theory_slope!r})",
                          f"r_squared = {res.r_squared!r}",
                          f"relative_deviation = {res.relative_deviation!r}",
                          f"result = {verdict}"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# certify


CERT_KEYS = ["lemma", "a", "b", "c", "q", "mu", "p", "A0", "A1", "T0", "T1", "J", "C"]


def divergence_onset(params: KatoParams, E: float, variant) -> float | None:
    """First t > T1 where the divergence exponent turns positive, by bracketing."""
    f = lambda t: divergence_condition(t, params, E, variant)  # noqa: E731
    lo = params.T1 * (1.0 + 1e-12) + 1e-12
    hi = max(2.0 * params.T1, params.T1 + 1.0)
    while f(hi) <= 0:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            return None
    if f(lo) > 0:
        return lo
    return float(brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps))


def cmd_certify(args) -> int:
    _need(args, "a", "b", "mu", "p", "A0", "A1")
    variant = "lemma23" if str(args.lemma) in ("23", "lemma23") else "lemma33"
    params = KatoParams(args.a, args.b, args.mu, args.p, args.A0, args.A1, args.c, args.q,
                        args.T0, args.T1).validate(variant)
    seq = kato_sequences(params, args.J, variant)
    E = kato_E(params, variant)
    bound = kato_bound(params, variant, args.C)
    summary = {
        "lemma": variant, "M": params.M(variant), "B": kato_B(params, variant), "E": E,
        "bound": bound, "C": args.C,
        "divergence_onset": divergence_onset(params, E, variant),
        "sequences": {"J": seq.J, "overflowed": seq.overflowed, "a": seq.a, "b": seq.b,
                      "c": seq.c, "lnD": seq.lnD},
        "config": _config_echo(args, CERT_KEYS),
    }
    if args.out:
        _write_text(_out_dir(args) / "certify.json", _dumps(summary))
    _emit(args, summary, [f"M = {summary['M']!r}", f"bound = {bound!r}", f"E = {E!r}",
                          f"divergence_onset = {_fmt(summary['divergence_onset'])}"])
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_global(p, suppress):
    d = argparse.SUPPRESS
    p.add_argument("--config", default=d if suppress else None, help="JSON run configuration")
    p.add_argument("--json", action="store_true", default=d if suppress else False,
                   help="print a machine-readable summary")
    p.add_argument("--out", default=d if suppress else None, help="output directory")
    p.add_argument("--seedless", action="store_true", default=d if suppress else False,
                   help="reserved; every command is deterministic")


def _ode_flags(p):
    p.add_argument("--mu", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--coef", choices=("constant", "cone"), default="constant")
    p.add_argument("--A1", type=float, default=1.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n", type=int)
    p.add_argument("--F0", type=float, default=1.0)
    p.add_argument("--F1", type=float, default=1.0)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="cosmowave", description=__doc__.splitlines()[0])
    _add_global(parser, False)
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("exponents", help="critical exponents and regime for one parameter set")
    p.add_argument("--n", type=int)
    p.add_argument("--w", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--allow-w-above-one", action="store_true")
    subs["exponents"] = p

    p = sub.add_parser("regions", help="regime label grids and boundary curves")
    p.add_argument("--n", type=int, nargs="+", default=[2, 3, 5])
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--w-min", type=float, default=-0.99)
    p.add_argument("--w-max", type=float, default=1.0)
    p.add_argument("--p-max", type=float, default=6.0)
    subs["regions"] = p

    p = sub.add_parser("ode", help="integrate the comparison ODE")
    _ode_flags(p)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=1e10)
    p.add_argument("--horizon", type=float, default=1e12)
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--atol", type=float, default=1e-12)
    subs["ode"] = p

    p = sub.add_parser("simulate", help="radial PDE run to blow-up or horizon")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--alpha", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--r-max", type=float)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--threshold", type=float, default=1e6)
    p.add_argument("--horizon", type=float, default=100.0)
    p.add_argument("--stride", type=int, default=50)
    p.add_argument("--cfl", type=float, default=1.0)
    p.add_argument("--t-frac", type=float, default=Stepping.t_frac)
    p.add_argument("--nl-frac", type=float, default=Stepping.nl_frac)
    p.add_argument("--origin", choices=("extrapolate", "ghost"), default="extrapolate")
    subs["simulate"] = p

    p = sub.add_parser("sweep", help="lifespans over an eps grid")
    p.add_argument("--source", choices=("ode", "pde"), default="ode")
    _ode_flags(p)
    p.add_argument("--r-max", type=float)
    p.add_argument("--N", type=int, default=1000)
    p.add_argument("--threshold", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--eps-grid", default=None, help="e.g. 2^-6..2^-16 or 0.1,0.05")
    p.add_argument("--threads", type=int)
    subs["sweep"] = p

    p = sub.add_parser("fit", help="fit a scaling law to sweep output")
    p.add_argument("--input")
    p.add_argument("--transform", choices=("auto", "loglog", "log_corrected"), default="auto")
    p.add_argument("--p", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--trim", action="store_true")
    p.add_argument("--tol", type=float, default=0.10)
    p.add_argument("--r2-floor", type=float, default=0.98)
    subs["fit"] = p

    p = sub.add_parser("certify", help="Kato-lemma constants and lifespan bound")
    p.add_argument("--lemma", choices=("23", "33", "lemma23", "lemma33"), default="33")
    for name in ("a", "b", "c", "q", "mu", "p", "A0", "A1"):
        p.add_argument("--" + name, type=float)
    p.add_argument("--T0", type=float, default=1.5)
    p.add_argument("--T1", type=float, default=2.0)
    p.add_argument("--J", type=int, default=40)
    p.add_argument("--C", type=float, default=1.0)
    subs["certify"] = p

    for p in subs.values():
        _add_global(p, True)
    return parser, subs


def load_config(path, command: str, subparser) -> dict:
    """Read a run configuration and map its keys onto ``subparser`` destinations."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_IO) from exc
    except ValueError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise CliError("config must be a JSON object")
    if raw.get("schema") != SCHEMA:
        raise CliError(f"config schema must be {SCHEMA!r}")
    if raw.get("command", command) != command:
        raise CliError(f"config is for {raw['command']!r}, not {command!r}")
    known = {a.dest for a in subparser._actions} - {"help", "config", "json", "out", "seedless"}
    values = {}
    for key, val in raw.items():
        if key in ("schema", "command"):
            continue
        dest = key.replace("-", "_")
        if dest not in known:
            raise CliError(f"unknown config field {key!r} for {command}")
        values[dest] = val
    return values


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"exponents": cmd_exponents, "regions": cmd_regions, "ode": cmd_ode,
                "simulate": cmd_simulate, "sweep": cmd_sweep, "fit": cmd_fit,
                "certify": cmd_certify}
    try:
        if args.config:
            subs[args.command].set_defaults(**load_config(args.config, args.command,
                                                          subs[args.command]))
            args = parser.parse_args(argv)
        return handlers[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ex.DomainError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
