"""Time the hot kernels under the numba and pure-numpy backends.

The backend is fixed at import, so each one runs in its own interpreter.

    python benchmarks/bench_kernels.py [--N 2000] [--steps 2000] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from cosmowave import backend_name
from cosmowave.exponents import ModelParams
from cosmowave.kato_ode import Coefficient, integrate_kato
from cosmowave.wave_sim import RadialGrid, Forcing, Stepping, initial_state, _advance

N, steps, repeat = int(sys.argv[1]), int(sys.argv[2]), int(sys.argv[3])
params = ModelParams(3, 2.0, 3.0, 2.0, 0.05, 1.0)
grid = RadialGrid(2.5, N, 3)

def leapfrog():
    st = initial_state(params, grid)
    _advance(st, grid, params, steps, Forcing.none(N + 1), np.inf, True, Stepping(), 1e9)
    return st.t

def ode():
    K = Coefficient.cone(1.0, 1.0, 2, 2.0)
    return integrate_kato(2.0, 2.0, K, 2.0**-10, 2.0**-10).blowup_time

out = {"backend": backend_name()}
for name, fn in (("leapfrog", leapfrog), ("ode", ode)):
    t0 = time.perf_counter(); fn(); first = time.perf_counter() - t0
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter(); fn(); times.append(time.perf_counter() - t0)
    out[name] = {"first_call_s": first, "best_s": min(times)}
print(json.dumps(out))
"""


def run(disable: bool, N: int, steps: int, repeat: int) -> dict:
    env = dict(os.environ, COSMOWAVE_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, str(N), str(steps), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=2000)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    t0 = time.perf_counter()
    results = [run(False, args.N, args.steps, args.repeat), run(True, args.N, args.steps, args.repeat)]
    print(f"leapfrog: N={args.N}, {args.steps} steps; ode: cone coefficient, eps=2^-10")
    print(f"{'backend':8s} {'kernel':9s} {'first call [s]':>15s} {'best [s]':>10s}")
    for r in results:
        for k in ("leapfrog", "ode"):
            print(f"{r['backend']:8s} {k:9s} {r[k]['first_call_s']:15.4f} {r[k]['best_s']:10.4f}")
    fast, slow = results
    for k in ("leapfrog", "ode"):
        print(f"speedup {k}: {slow[k]['best_s'] / fast[k]['best_s']:.1f}x")
    print(f"total wall time {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
