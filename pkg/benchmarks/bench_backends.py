"""Time the numba kernels against the numpy fallback.

Each backend runs in its own interpreter because the switch is read at import.

    python benchmarks/bench_backends.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

CASE = r"""
import json, time, warnings
import numpy as np
warnings.simplefilter("ignore")
from hsroute import _jit, HSConfig, SmoothingConfig, circular
from hsroute.hybrid_search import run_fan, hybrid_search
from hsroute.smoothing import from_hs_route, smooth
from hsroute.route_analysis import path_travel_time

f = circular()
cfg = HSConfig.synthetic(max_outer=2)
goal = (-7.0, 2.0)
start = np.array([0.0, 3.0, 2.0, 0.0])


def fan():
    run_fan(start, goal, np.pi, np.pi / 2, cfg, f)


def hs():
    return hybrid_search((3.0, 2.0), goal, cfg, f)


route = hs()
dr = from_hs_route(route, goal=goal)


def fma():
    smooth(dr, SmoothingConfig(iterations=200), cfg.V, f)


def metrics():
    path_travel_time(dr.points, cfg.V, f)


t0 = time.perf_counter()
fan(); fma(); metrics()
warm = time.perf_counter() - t0
out = {"backend": _jit.backend_name(), "first_call_s": warm}
for name, fn in [("fan", fan), ("hybrid_search", hs), ("fma_200_sweeps", fma), ("path_time", metrics)]:
    best = float("inf")
    for _ in range(REPEAT):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps(out))
"""


def run(disable, repeat):
    env = dict(os.environ)
    env.pop("HSROUTE_DISABLE_NUMBA", None)
    if disable:
        env["HSROUTE_DISABLE_NUMBA"] = "1"
    code = f"REPEAT = {repeat}\n" + CASE
    p = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(p.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    jit, py = run(False, args.repeat), run(True, args.repeat)
    keys = [k for k in jit if k != "backend"]
    print(f"{'case':<18}{jit['backend']:>12}{py['backend']:>12}{'speedup':>10}")
    for k in keys:
        print(f"{k:<18}{jit[k]:>11.4f}s{py[k]:>11.4f}s{py[k] / jit[k]:>9.1f}x")


if __name__ == "__main__":
    main()
