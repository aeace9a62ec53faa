"""Compare the compiled kernels with the pure-Python fallback.

Each backend runs in its own interpreter (the backend is fixed at import
time), so the timings include nothing cached by the other one.

    python benchmarks/bench_kernels.py            # both backends
    python benchmarks/bench_kernels.py --quick    # smaller workloads
"""
from __future__ import annotations

import argparse
import json
import os
import random
import subprocess
import sys
import time


def _workloads(quick: bool):
    from wittkit import calculus, jets, witt
    from wittkit.substrate.rings import Zmod

    law_level = 2 if quick else 3
    verify_level = 3 if quick else 4
    verify_kind = "Sum" if quick else "Product"
    npts = 2000 if quick else 20000

    def generate():
        calculus.generate(5, law_level, "Product")

    def verify():
        laws = calculus.generate(3, verify_level, verify_kind)
        assert calculus.verify_ghost_identity(3, verify_level, verify_kind, laws)

    def batch():
        W = witt.WittRing(Zmod(9), 3, 2)
        rng = random.Random(0)
        xs = [tuple(rng.randrange(9) for _ in range(3)) for _ in range(npts)]
        ys = [tuple(rng.randrange(9) for _ in range(3)) for _ in range(npts)]
        W.batch("Product", xs, ys)

    def adjunction():
        A = jets.parse_presentation("Z[t]/(t^3-t)")
        assert jets.adjunction_check(A, 3, 2 if not quick else 1, Zmod(9)).passed

    return [
        (f"generate Product p=5 n<={law_level}", generate),
        (f"generate+verify {verify_kind} p=3 n={verify_level}", verify),
        (f"batch Product W_2(Z/9) x{npts}", batch),
        ("jet adjunction Z[t]/(t^3-t) p=3 over Z/9", adjunction),
    ]


def worker(quick: bool) -> None:
    from wittkit import kernels

    out = {"backend": kernels.BACKEND, "times": {}}
    for name, fn in _workloads(quick):
        start = time.perf_counter()
        fn()
        out["times"][name] = time.perf_counter() - start
    print(json.dumps(out))


def run_backend(pure: bool, quick: bool) -> dict:
    env = dict(os.environ)
    env.pop("WITTKIT_PURE", None)
    if pure:
        env["WITTKIT_PURE"] = "1"
    argv = [sys.executable, __file__, "--worker"] + (["--quick"] if quick else [])
    proc = subprocess.run(argv, env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.worker:
        worker(args.quick)
        return 0
    compiled = run_backend(False, args.quick)
    pure = run_backend(True, args.quick)
    if compiled["backend"] != "compiled":
        print("warning: the compiled extension is not importable; both columns are pure Python")
    width = max(len(k) for k in compiled["times"])
    print(f"{'workload':<{width}}  {'compiled':>9}  {'python':>9}  {'speedup':>7}")
    for name, t in compiled["times"].items():
        tp = pure["times"][name]
        print(f"{name:<{width}}  {t:9.3f}  {tp:9.3f}  {tp / t:6.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
