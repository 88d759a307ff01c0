"""Command-line entry point.

Subcommands:
  simulate  --config FILE | --profile {ci,full}   run one scenario, write CSV
  sweep     --config FILE                         run a parameter sweep
  validate  --config FILE | --profile ...         dry-run: dims + memory estimate
  benchmark [--profile full] [--t-final T]        time the full-size model

Exit codes: 0 success, 1 runtime failure, 2 malformed config.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from importlib import resources

import numpy as np

from . import _kernels
from .lindblad import IntegrationError, IntegratorConfig, evolve_samples
from .scenarios import (
    ConfigError,
    load_config,
    run_scenario,
    run_sweep,
    scenario_from_dict,
    sweep_from_dict,
    _build,
)
from .tensorspace import ground_state

PROFILES = {
    "ci": "bacteria_ci.yaml",
    "full": "bacteria_full.yaml",
}


def _profile_doc(profile: str) -> dict:
    import yaml

    text = resources.files("probesim.configs").joinpath(PROFILES[profile]).read_text()
    return yaml.safe_load(text)


def _load_doc(args) -> dict:
    if args.config:
        return load_config(args.config)
    if getattr(args, "profile", None):
        return _profile_doc(args.profile)
    raise ConfigError("either --config or --profile is required")


def _memory_estimate(dim: int) -> str:
    state = dim * dim * 16
    # RK45 working set: state + 7 stages + a few temporaries
    working = state * 11
    for unit, scale in (("GiB", 2**30), ("MiB", 2**20), ("KiB", 2**10)):
        if working >= scale:
            return f"state {state / scale:.2f} {unit}, integrator working set ~{working / scale:.2f} {unit}"
    return f"state {state} B, integrator working set ~{working} B"


def cmd_validate(args) -> int:
    cfg = scenario_from_dict(_load_doc(args))
    space, gen = _build(cfg)
    print(f"model: {cfg.model}")
    print(f"subsystems: {[f'{s.label}({s.dim})' for s in space.subsystems]}")
    print(f"total_dim: {space.total_dim}")
    print(f"jump operators: {len(gen.jumps)}")
    print(f"memory: {_memory_estimate(space.total_dim)}")
    print(f"observables: {[o.name for o in cfg.observables]}")
    print(f"kernel backend: {'numba' if _kernels.USING_NUMBA else 'numpy/scipy'}")
    return 0


def cmd_simulate(args) -> int:
    cfg = scenario_from_dict(_load_doc(args))
    if args.output:
        cfg = dataclasses.replace(cfg, output_path=args.output)
    if cfg.output_path is None:
        raise ConfigError("no output path: set `output` in the config or pass --output")
    table = run_scenario(cfg)
    print(f"wrote {cfg.output_path} ({table.rows.shape[0]} samples)")
    return 0


def cmd_sweep(args) -> int:
    cfg = sweep_from_dict(_load_doc(args))
    if args.output:
        cfg = dataclasses.replace(cfg, output_path=args.output)
    if cfg.output_path is None:
        raise ConfigError("no output path: set `sweep.output` in the config or pass --output")
    records = run_sweep(cfg, threads=args.threads)
    failures = sum(1 for r in records if r.error is not None)
    print(f"wrote {cfg.output_path} ({len(records)} points, {failures} failures)")
    return 1 if failures == len(records) else 0


def cmd_benchmark(args) -> int:
    cfg = scenario_from_dict(_load_doc(args))
    integ = cfg.integrator
    if args.t_final is not None:
        integ = dataclasses.replace(integ, t_final=args.t_final,
                                    n_samples=max(2, args.checkpoints))
    else:
        integ = dataclasses.replace(integ, n_samples=max(2, args.checkpoints))
    space, gen = _build(cfg)
    print(f"benchmark: {cfg.model}, total_dim {space.total_dim}, "
          f"{len(gen.jumps)} jumps, t_final {integ.t_final} {cfg.time_unit}")
    print(f"kernel backend: {'numba' if _kernels.USING_NUMBA else 'numpy/scipy'}")
    _kernels.warmup()
    rho0 = ground_state(space)
    t0 = time.perf_counter()
    worst_trace = 0.0
    worst_eig = 0.0
    last_steps = 0
    for t, rho, stats in evolve_samples(gen, rho0, integ):
        worst_trace = max(worst_trace, stats["trace_drift"])
        lam_min = float(np.linalg.eigvalsh(rho)[0])
        worst_eig = min(worst_eig, lam_min)
        last_steps = stats["n_steps"]
        elapsed = time.perf_counter() - t0
        print(f"  t={t:10.4f} {cfg.time_unit}  steps={last_steps:7d}  "
              f"|Tr-1|={stats['trace_drift']:.2e}  min_eig={lam_min:+.2e}  "
              f"wall={elapsed:8.1f} s", flush=True)
    elapsed = time.perf_counter() - t0
    print(f"wall time: {elapsed:.1f} s ({elapsed / 3600:.3f} h) for "
          f"{last_steps} steps; max |Tr-1| {worst_trace:.2e}, "
          f"min eigenvalue {worst_eig:+.2e}")
    if args.t_final is not None and args.t_final > 0:
        full_t = args.full_t_final
        print(f"extrapolated to t_final={full_t} {cfg.time_unit}: "
              f"~{elapsed * full_t / integ.t_final / 3600:.2f} h")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="probesim")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, profile=True):
        p.add_argument("--config", help="YAML config file")
        if profile:
            p.add_argument("--profile", choices=sorted(PROFILES),
                           help="bundled config profile")
        p.add_argument("--threads", type=int, default=1,
                       help="worker pool size for sweeps")

    p = sub.add_parser("simulate", help="run one scenario and write a CSV")
    common(p)
    p.add_argument("--output", help="override output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a parameter sweep")
    common(p, profile=False)
    p.add_argument("--output", help="override output CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="build the model and report dims/memory")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("benchmark", help="time a model run with invariant checkpoints")
    common(p)
    p.add_argument("--t-final", type=float, default=None,
                   help="shorten the run to this horizon (time unit of the model)")
    p.add_argument("--full-t-final", type=float, default=50.0,
                   help="horizon used for the wall-time extrapolation")
    p.add_argument("--checkpoints", type=int, default=10)
    p.set_defaults(func=cmd_benchmark)
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
