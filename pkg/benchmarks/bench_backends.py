"""Compare the compiled quadrature kernel against the NumPy fallback.

Run from the repo root:

    python3 benchmarks/bench_backends.py [--order 32] [--repeat 5]

Both backends evaluate the same per-stream capacity workload (hierarchical
16-QAM, HP and LP streams, a 61-point Es/N0 grid) through the public API by
re-importing the package under each HIERCAP_BACKEND setting in a fresh
subprocess, so the numbers reflect what users actually get.
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys

_WORKER = r"""
import json, os, time
import numpy as np
import hiercap
from hiercap.capacity import QuadratureConfig, capacity_curve
from hiercap.constellations import hp_stream, lp_stream, make_hier_16qam

order = int(os.environ["BENCH_ORDER"])
repeat = int(os.environ["BENCH_REPEAT"])
q = QuadratureConfig(order=order)
grid = np.linspace(-10.0, 20.0, 61)
c = make_hier_16qam(2.0)
streams = [hp_stream(c), lp_stream(c)]

for s in streams:  # warm caches and JIT-ish costs before timing
    capacity_curve(s, grid, q)
best = float("inf")
for _ in range(repeat):
    t0 = time.perf_counter()
    checksum = 0.0
    for s in streams:
        checksum += sum(p.bits for p in capacity_curve(s, grid, q))
    best = min(best, time.perf_counter() - t0)
print(json.dumps({"backend": hiercap.BACKEND, "seconds": best, "checksum": checksum}))
"""


def run(backend: str, order: int, repeat: int) -> dict:
    import os

    env = dict(os.environ, HIERCAP_BACKEND=backend, BENCH_ORDER=str(order), BENCH_REPEAT=str(repeat))
    out = subprocess.run(
        [sys.executable, "-c", _WORKER], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--order", type=int, default=32)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    results = []
    for backend in ("numpy", "cython"):
        try:
            results.append(run(backend, args.order, args.repeat))
        except subprocess.CalledProcessError as exc:
            print(f"{backend}: unavailable ({exc.stderr.strip().splitlines()[-1]})")
    for r in results:
        print(f"{r['backend']:>7}: {r['seconds']*1e3:8.1f} ms  (checksum {r['checksum']:.12f})")
    if len(results) == 2:
        a, b = results
        if a["backend"] != b["backend"]:
            print(f"speedup: {a['seconds'] / b['seconds']:.2f}x ({b['backend']} over {a['backend']})")
            drift = abs(a["checksum"] - b["checksum"])
            print(f"checksum drift: {drift:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
