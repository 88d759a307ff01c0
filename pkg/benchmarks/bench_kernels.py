"""Compare the numba kernels against the scipy.sparse fallback.

The fallback is selected with PROBESIM_DISABLE_NUMBA=1, which must be set
before probesim is imported; this script therefore re-executes itself in a
subprocess for each backend and compares the timings.

Usage: python benchmarks/bench_kernels.py [--model bacteria|tardigrade]
"""
import argparse
import json
import os
import subprocess
import sys
import time


def measure(model: str) -> dict:
    import numpy as np

    from probesim import _kernels
    from probesim.lindblad import CompiledLiouvillian, IntegratorConfig, evolve
    from probesim.models import (
        BacteriaModelParams,
        TardigradeModelParams,
        build_bacteria_model,
        build_tardigrade_model,
    )
    from probesim.tensorspace import ground_state

    if model == "bacteria":
        space, gen = build_bacteria_model(BacteriaModelParams())
    else:
        space, gen = build_tardigrade_model(TardigradeModelParams())
    _kernels.warmup()
    compiled = CompiledLiouvillian(gen)
    rho = ground_state(space).entries.copy()
    out = np.empty_like(rho)
    compiled.apply(rho, out)  # JIT + cache warm
    n_rep = 3 if space.total_dim > 500 else 50
    t0 = time.perf_counter()
    for _ in range(n_rep):
        compiled.apply(rho, out)
    rhs_time = (time.perf_counter() - t0) / n_rep

    result = {
        "backend": "numba" if _kernels.USING_NUMBA else "scipy",
        "model": model,
        "total_dim": space.total_dim,
        "rhs_seconds": rhs_time,
    }
    if model == "tardigrade":
        # short end-to-end propagation for the small model
        cfg = IntegratorConfig(t_final=10.0, n_samples=20)
        t0 = time.perf_counter()
        evolve(gen, ground_state(space), cfg)
        result["evolve_10ns_seconds"] = time.perf_counter() - t0
    return result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--model", choices=("bacteria", "tardigrade"),
                        default="tardigrade")
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        print(json.dumps(measure(args.model)))
        return

    results = []
    for disable in ("0", "1"):
        env = dict(os.environ, PROBESIM_DISABLE_NUMBA=disable)
        proc = subprocess.run(
            [sys.executable, __file__, "--model", args.model, "--child"],
            env=env, capture_output=True, text=True, check=True,
        )
        results.append(json.loads(proc.stdout.splitlines()[-1]))

    print(f"model: {args.model} (total_dim {results[0]['total_dim']})")
    for r in results:
        line = f"  {r['backend']:>6}: RHS apply {r['rhs_seconds'] * 1e3:9.3f} ms"
        if "evolve_10ns_seconds" in r:
            line += f", 10 ns propagation {r['evolve_10ns_seconds']:.2f} s"
        print(line)
    speedup = results[1]["rhs_seconds"] / results[0]["rhs_seconds"]
    print(f"  numba speedup on RHS: {speedup:.2f}x")


if __name__ == "__main__":
    main()
