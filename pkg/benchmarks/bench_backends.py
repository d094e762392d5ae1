"""Time the compiled and pure-numpy backends on the built-in pulses.

Each backend runs in its own interpreter because the backend is fixed at
import time by ``PULSEPATH_DISABLE_JIT``.

    python benchmarks/bench_backends.py [--repeat N] [--json]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = """
import json, sys, time
import pulsepath
from pulsepath import ControlSpec, DriveField, Pulse, SimConfig, SystemParams, initial_state, propagate
from pulsepath.kernels import sigmoid_prefactor_array
import numpy as np

repeat = int(sys.argv[1])
prm = SystemParams(0.02, 6.0)
cases = {
    "fig1 exact dopri45": (ControlSpec(0.4, 1.0, 0.01), "exact", "dopri45"),
    "fig1 rwa dopri45": (ControlSpec(0.4, 1.0, 0.01), "rwa", "dopri45"),
    "fig1 exact rk4": (ControlSpec(0.4, 1.0, 0.01), "exact", "rk4"),
    "fig2 exact dopri45": (ControlSpec(0.4, 1.0, 0.05), "exact", "dopri45"),
}
out = {"backend": pulsepath.BACKEND, "cases": {}}
for name, (spec, frame, method) in cases.items():
    lo, hi = spec.default_window()
    drive = DriveField.from_pulse(Pulse(spec, prm))
    cfg = SimConfig(lo, hi, method=method)
    t0 = time.perf_counter()
    propagate(initial_state(spec, lo), drive, frame, cfg)
    first = time.perf_counter() - t0
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        propagate(initial_state(spec, lo), drive, frame, cfg)
        best = min(best, time.perf_counter() - t0)
    out["cases"][name] = {"first_s": first, "best_s": best}
t = np.linspace(-1500.0, 1500.0, 1_000_000)
sigmoid_prefactor_array(t, 0.4, 1.0, 0.01)
t0 = time.perf_counter()
sigmoid_prefactor_array(t, 0.4, 1.0, 0.01)
out["cases"]["envelope 1e6 points"] = {"first_s": float("nan"), "best_s": time.perf_counter() - t0}
print(json.dumps(out))
"""


def run_backend(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, PULSEPATH_DISABLE_JIT="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="timed repetitions per case")
    parser.add_argument("--json", action="store_true", help="print raw JSON instead of a table")
    args = parser.parse_args(argv)

    jit = run_backend(False, args.repeat)
    plain = run_backend(True, args.repeat)
    if args.json:
        print(json.dumps({"jit": jit, "numpy": plain}, indent=2))
        return
    print(f"{'case':<22} {jit['backend'] + ' (s)':>12} {'numpy (s)':>12} {'speed-up':>9}"
          f" {'first call (s)':>15}")
    for name, a in jit["cases"].items():
        b = plain["cases"][name]
        print(f"{name:<22} {a['best_s']:>12.4f} {b['best_s']:>12.4f} "
              f"{b['best_s'] / a['best_s']:>8.1f}x {a['first_s']:>15.2f}")


if __name__ == "__main__":
    main()
