"""Declarative scenario and sweep runner.

Configs are YAML documents with a `schema_version` field; see
docs/config_schema.md. Every run writes one CSV whose first line declares
the time unit (`# units: t=fs` or `t=ns`); floats are printed with 17
significant digits so re-runs are byte-identical.
"""
from __future__ import annotations

import dataclasses
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from .correlations import (
    Bipartition,
    discord_two_qubit,
    negativity,
    partial_trace,
    purity,
)
from .lindblad import IntegratorConfig, evolve_samples
from .models import (
    BacteriaModelParams,
    TardigradeModelParams,
    build_bacteria_model,
    build_tardigrade_model,
    scale_noise,
)
from .tensorspace import CompositeSpace, DensityMatrix, ground_state

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Malformed scenario/sweep configuration; message names the bad field."""


@dataclass(frozen=True)
class ObservableSpec:
    name: str
    kind: str  # purity | negativity | discord
    side_a: tuple[int, ...] = ()
    side_b: tuple[int, ...] = ()  # empty -> complement of side_a
    subsystems: tuple[int, ...] = ()  # discord: the two kept subsystems
    measured_side: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    model: str  # "bacteria" | "tardigrade"
    params: BacteriaModelParams | TardigradeModelParams
    integrator: IntegratorConfig
    observables: tuple[ObservableSpec, ...]
    output_path: Optional[str] = None

    @property
    def time_unit(self) -> str:
        return "fs" if self.model == "bacteria" else "ns"


@dataclass(frozen=True)
class SweepAxis:
    path: str  # "model.<field>" or "noise_exponent"
    values: tuple[float, ...]


@dataclass(frozen=True)
class SweepConfig:
    base: ScenarioConfig
    axes: tuple[SweepAxis, ...]
    tail_fraction: float = 0.1
    output_path: Optional[str] = None


@dataclass
class SteadyStateRecord:
    axis_values: dict[str, float]
    steady: dict[str, float]
    converged: dict[str, bool]
    slope: dict[str, float]
    error: Optional[str] = None


@dataclass
class ResultTable:
    columns: list[str]
    rows: np.ndarray  # (n_samples, n_columns) real
    time_unit: str

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def write_csv(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(f"# units: t={self.time_unit}\n")
            f.write(",".join(self.columns) + "\n")
            for row in self.rows:
                f.write(",".join(f"{x:.17g}" for x in row) + "\n")


def _build(cfg: ScenarioConfig):
    if cfg.model == "bacteria":
        return build_bacteria_model(cfg.params)
    return build_tardigrade_model(cfg.params)


def _eval_observable(space: CompositeSpace, rho: DensityMatrix, spec: ObservableSpec) -> float:
    if spec.kind == "purity":
        return purity(rho)
    if spec.kind == "negativity":
        side_a = spec.side_a
        side_b = spec.side_b or tuple(
            i for i in range(space.n_subsystems) if i not in side_a
        )
        covered = sorted(set(side_a) | set(side_b))
        if covered != list(range(space.n_subsystems)):
            rho = partial_trace(rho, covered)
            remap = {old: new for new, old in enumerate(covered)}
            side_a = tuple(remap[i] for i in side_a)
            side_b = tuple(remap[i] for i in side_b)
        return negativity(rho, Bipartition(side_a, side_b))
    if spec.kind == "discord":
        reduced = partial_trace(rho, spec.subsystems)
        return discord_two_qubit(reduced, measured_side=spec.measured_side)
    raise ConfigError(f"unknown observable kind {spec.kind!r}")


def _validate_observables(space: CompositeSpace, observables):
    n = space.n_subsystems
    for spec in observables:
        if spec.kind == "negativity":
            if not spec.side_a:
                raise ConfigError(f"observable {spec.name}: negativity needs side_a")
            for i in (*spec.side_a, *spec.side_b):
                if not 0 <= i < n:
                    raise ConfigError(
                        f"observable {spec.name}: subsystem index {i} out of range"
                    )
        elif spec.kind == "discord":
            if len(spec.subsystems) != 2:
                raise ConfigError(
                    f"observable {spec.name}: discord needs exactly two subsystems"
                )
            for i in spec.subsystems:
                if not 0 <= i < n:
                    raise ConfigError(
                        f"observable {spec.name}: subsystem index {i} out of range"
                    )
                if space.subsystems[i].dim != 2:
                    raise ConfigError(
                        f"observable {spec.name}: discord subsystem {i} must have dim 2"
                    )
        elif spec.kind != "purity":
            raise ConfigError(f"observable {spec.name}: unknown kind {spec.kind!r}")


def run_scenario(cfg: ScenarioConfig) -> ResultTable:
    """Propagate the model and tabulate observables at each sample time.

    Columns: t, trace_re, trace_im, purity, then one per observable.
    """
    space, gen = _build(cfg)
    _validate_observables(space, cfg.observables)
    rho0 = ground_state(space)
    columns = ["t", "trace_re", "trace_im", "purity"] + [o.name for o in cfg.observables]
    rows = []
    for t, rho, _stats in evolve_samples(gen, rho0, cfg.integrator):
        state = DensityMatrix(space, rho, check=False)
        tr = np.trace(rho)
        row = [t, tr.real, tr.imag, purity(state)]
        row += [_eval_observable(space, state, o) for o in cfg.observables]
        rows.append(row)
    table = ResultTable(columns, np.array(rows, dtype=float), cfg.time_unit)
    if cfg.output_path:
        table.write_csv(cfg.output_path)
    return table


def apply_axis(cfg: ScenarioConfig, path: str, value: float) -> ScenarioConfig:
    if path == "noise_exponent":
        # exponent i sets all decay/dephasing rates to ~10^(9-i); the
        # defaults sit at the 1e7 order, i.e. i = 2
        factor = 10.0 ** (2.0 - float(value))
        return dataclasses.replace(cfg, params=scale_noise(cfg.params, factor))
    if path.startswith("model."):
        name = path[len("model."):]
        fields = {f.name: f for f in dataclasses.fields(cfg.params)}
        if name not in fields:
            raise ConfigError(f"sweep axis {path!r}: no such model parameter")
        if fields[name].type == "int":
            value = int(value)
        return dataclasses.replace(
            cfg, params=dataclasses.replace(cfg.params, **{name: value})
        )
    raise ConfigError(f"sweep axis {path!r}: expected 'model.<field>' or 'noise_exponent'")


def steady_state_from_table(
    table: ResultTable, observables, tail_fraction: float = 0.1
) -> tuple[dict, dict, dict]:
    n = table.rows.shape[0]
    tail = max(2, int(np.ceil(n * tail_fraction)))
    t = table.column("t")[-tail:]
    steady, converged, slope = {}, {}, {}
    for name in observables:
        y = table.column(name)[-tail:]
        mean = float(y.mean())
        spread = float(y.max() - y.min())
        s = float(np.polyfit(t, y, 1)[0]) if t[-1] > t[0] else 0.0
        tol = max(0.05 * abs(mean), 1e-4 if abs(mean) < 1e-3 else 0.0)
        ok = spread < tol and abs(s) * (t[-1] - t[0]) < tol
        steady[name] = mean
        converged[name] = bool(ok)
        slope[name] = s
    return steady, converged, slope


def _run_sweep_point(args) -> SteadyStateRecord:
    cfg, axis_values, tail_fraction = args
    try:
        point = cfg
        for path, value in axis_values.items():
            point = apply_axis(point, path, value)
        point = dataclasses.replace(point, output_path=None)
        table = run_scenario(point)
    except Exception as exc:  # per-point failure: record and continue
        return SteadyStateRecord(axis_values, {}, {}, {}, error=str(exc))
    names = [o.name for o in point.observables]
    steady, converged, slope = steady_state_from_table(table, names, tail_fraction)
    return SteadyStateRecord(axis_values, steady, converged, slope)


def run_sweep(cfg: SweepConfig, threads: int = 1) -> list[SteadyStateRecord]:
    """Run the Cartesian product of the sweep axes and extract steady values.

    Steady value = mean over the final `tail_fraction` of samples; the
    convergence flag requires the tail spread and residual slope to stay
    within 5% of the tail mean (1e-4 absolute for near-zero means).
    """
    if not cfg.axes:
        raise ConfigError("sweep needs at least one axis")
    grids = [axis.values for axis in cfg.axes]
    points = [
        ({axis.path: v for axis, v in zip(cfg.axes, combo)})
        for combo in itertools.product(*grids)
    ]
    jobs = [(cfg.base, p, cfg.tail_fraction) for p in points]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_sweep_point, jobs))
    else:
        records = [_run_sweep_point(j) for j in jobs]
    if cfg.output_path:
        write_sweep_csv(cfg, records, cfg.output_path)
    return records


def write_sweep_csv(cfg: SweepConfig, records: list[SteadyStateRecord], path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    axis_names = [a.path for a in cfg.axes]
    obs_names = [o.name for o in cfg.base.observables]
    cols = list(axis_names)
    for name in obs_names:
        cols += [name, f"{name}_converged", f"{name}_slope"]
    with open(path, "w") as f:
        f.write(f"# units: t={cfg.base.time_unit}\n")
        f.write(",".join(cols + ["error"]) + "\n")
        for r in records:
            row = [f"{r.axis_values[a]:.17g}" for a in axis_names]
            for name in obs_names:
                if r.error is None:
                    row += [
                        f"{r.steady[name]:.17g}",
                        "1" if r.converged[name] else "0",
                        f"{r.slope[name]:.17g}",
                    ]
                else:
                    row += ["nan", "0", "nan"]
            row.append("" if r.error is None else r.error.replace(",", ";"))
            f.write(",".join(row) + "\n")


# ---------------------------------------------------------------------------
# YAML loading


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required field {key!r}")
    return mapping[key]


def _params_from_dict(model: str, raw: dict):
    cls = BacteriaModelParams if model == "bacteria" else TardigradeModelParams
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"params: unknown fields {sorted(unknown)} for model {model!r}")
    fixed = dict(raw)
    for key, val in fixed.items():
        # PyYAML reads floats like `0.05e9` (unsigned exponent) as strings
        if isinstance(val, str) and key not in ("noise_channels", "frequency_convention"):
            try:
                fixed[key] = float(val)
            except ValueError:
                raise ConfigError(f"params.{key}: expected a number, got {val!r}")
    for key in ("Omega", "G", "gamma", "gamma_deph"):
        if key in fixed and isinstance(fixed[key], list):
            fixed[key] = tuple(float(v) for v in fixed[key])
    try:
        return cls(**fixed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"params: {exc}") from exc


def _observables_from_list(raw: list) -> tuple[ObservableSpec, ...]:
    if not raw:
        raise ConfigError("observables: must be a non-empty list")
    specs = []
    for i, item in enumerate(raw):
        where = f"observables[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(f"{where}: expected a mapping")
        kind = _require(item, "kind", where)
        name = item.get("name", kind)
        specs.append(
            ObservableSpec(
                name=name,
                kind=kind,
                side_a=tuple(item.get("side_a", ())),
                side_b=tuple(item.get("side_b", ())),
                subsystems=tuple(item.get("subsystems", ())),
                measured_side=int(item.get("measured_side", 1)),
            )
        )
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ConfigError(f"observables: duplicate names in {names}")
    return tuple(specs)


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: expected {SCHEMA_VERSION}, got {version!r}"
        )
    model = _require(doc, "model", "config")
    if model not in ("bacteria", "tardigrade"):
        raise ConfigError(f"model: must be 'bacteria' or 'tardigrade', got {model!r}")
    params = _params_from_dict(model, doc.get("params", {}))
    if "noise_channels" in doc:
        params = dataclasses.replace(params, noise_channels=doc["noise_channels"])
    integ_raw = _require(doc, "integrator", "config")
    try:
        integrator = IntegratorConfig(**integ_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"integrator: {exc}") from exc
    observables = _observables_from_list(_require(doc, "observables", "config"))
    return ScenarioConfig(
        model=model,
        params=params,
        integrator=integrator,
        observables=observables,
        output_path=doc.get("output"),
    )


def sweep_from_dict(doc: dict) -> SweepConfig:
    base = scenario_from_dict(doc)
    sweep_raw = _require(doc, "sweep", "config")
    axes_raw = _require(sweep_raw, "axes", "sweep")
    if not axes_raw:
        raise ConfigError("sweep.axes: must be non-empty")
    axes = []
    for i, ax in enumerate(axes_raw):
        where = f"sweep.axes[{i}]"
        path = _require(ax, "path", where)
        try:
            values = tuple(float(v) for v in _require(ax, "values", where))
        except (TypeError, ValueError):
            raise ConfigError(f"{where}: values must be numbers")
        if not values:
            raise ConfigError(f"{where}: values must be non-empty")
        axes.append(SweepAxis(path, values))
    return SweepConfig(
        base=base,
        axes=tuple(axes),
        tail_fraction=float(sweep_raw.get("tail_fraction", 0.1)),
        output_path=sweep_raw.get("output", doc.get("output")),
    )


def load_config(path) -> dict:
    try:
        with open(path) as f:
            doc = yaml.safe_load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if doc is None:
        raise ConfigError(f"empty config file: {path}")
    return doc
