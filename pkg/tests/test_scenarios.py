import dataclasses
import textwrap

import numpy as np
import pytest
import yaml

from probesim.cli import cli_main
from probesim.lindblad import IntegratorConfig
from probesim.models import TardigradeModelParams
from probesim.scenarios import (
    ConfigError,
    ObservableSpec,
    ScenarioConfig,
    SweepAxis,
    SweepConfig,
    apply_axis,
    run_scenario,
    run_sweep,
    scenario_from_dict,
    steady_state_from_table,
    sweep_from_dict,
)


def tardigrade_cfg(t_final=5.0, n_samples=20, **params):
    return ScenarioConfig(
        model="tardigrade",
        params=TardigradeModelParams(**params),
        integrator=IntegratorConfig(t_final=t_final, n_samples=n_samples),
        observables=(
            ObservableSpec("neg_qubit_rest", "negativity", side_a=(2,)),
            ObservableSpec("neg_light_rest", "negativity", side_a=(0,)),
        ),
    )


MINIMAL_YAML = textwrap.dedent("""\
    schema_version: 1
    model: tardigrade
    params:
      g_ql: 0.15e+9
    integrator:
      t_final: 5.0
      n_samples: 10
    observables:
      - name: neg_qubit_rest
        kind: negativity
        side_a: [2]
    """)


def test_run_scenario_columns_and_trace():
    table = run_scenario(tardigrade_cfg())
    assert table.columns == ["t", "trace_re", "trace_im", "purity",
                             "neg_qubit_rest", "neg_light_rest"]
    assert table.rows.shape == (20, 6)
    assert np.allclose(table.column("t"), np.linspace(0, 5.0, 20))
    assert np.max(np.abs(table.column("trace_re") - 1.0)) < 1e-10
    assert np.max(np.abs(table.column("trace_im"))) < 1e-12
    # purity starts at 1 for the pure ground state
    assert table.column("purity")[0] == pytest.approx(1.0, abs=1e-12)


def test_csv_roundtrip_and_units_header(tmp_path):
    out = tmp_path / "run.csv"
    cfg = dataclasses.replace(tardigrade_cfg(), output_path=str(out))
    table = run_scenario(cfg)
    lines = out.read_text().splitlines()
    assert lines[0] == "# units: t=ns"
    assert lines[1] == ",".join(table.columns)
    back = np.loadtxt(out, delimiter=",", skiprows=2)
    assert np.array_equal(back, table.rows)  # 17 sig digits: exact roundtrip


def test_rerun_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        run_scenario(dataclasses.replace(tardigrade_cfg(), output_path=str(p)))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_zero_coupling_negativity_exactly_zero():
    cfg = tardigrade_cfg(t_final=10.0, n_samples=10, g_ql=0.0, f_tl=0.0)
    table = run_scenario(cfg)
    assert np.all(table.column("neg_qubit_rest") == 0.0)
    assert np.all(table.column("neg_light_rest") == 0.0)


def test_observable_validation():
    base = tardigrade_cfg()
    bad = dataclasses.replace(
        base, observables=(ObservableSpec("n", "negativity", side_a=(9,)),))
    with pytest.raises(ConfigError):
        run_scenario(bad)
    # discord on a dim-5 subsystem is rejected
    bad = dataclasses.replace(
        base, observables=(ObservableSpec("d", "discord", subsystems=(0, 2)),))
    with pytest.raises(ConfigError):
        run_scenario(bad)


def test_apply_axis_noise_exponent_and_model_field():
    cfg = tardigrade_cfg()
    hot = apply_axis(cfg, "noise_exponent", 0.0)  # rates ~1e9: factor 100
    assert hot.params.kappa_l == pytest.approx(cfg.params.kappa_l * 100)
    moved = apply_axis(cfg, "model.g_ql", 0.2e9)
    assert moved.params.g_ql == pytest.approx(0.2e9)
    with pytest.raises(ConfigError):
        apply_axis(cfg, "model.not_a_field", 1.0)
    with pytest.raises(ConfigError):
        apply_axis(cfg, "gibberish", 1.0)


def test_steady_state_tail():
    cfg = tardigrade_cfg(t_final=50.0, n_samples=50)
    table = run_scenario(cfg)
    steady, converged, slope = steady_state_from_table(
        table, ["neg_qubit_rest"], tail_fraction=0.2)
    tail = table.column("neg_qubit_rest")[-10:]
    assert steady["neg_qubit_rest"] == pytest.approx(tail.mean())
    assert set(converged) == set(slope) == {"neg_qubit_rest"}


def test_single_point_sweep_matches_scenario(tmp_path):
    base = tardigrade_cfg(t_final=20.0, n_samples=40)
    sweep = SweepConfig(
        base=base,
        axes=(SweepAxis("model.g_ql", (0.15e9,)),),
        tail_fraction=0.1,
        output_path=str(tmp_path / "sweep.csv"),
    )
    records = run_sweep(sweep)
    assert len(records) == 1
    assert records[0].error is None
    table = run_scenario(base)
    steady, _, _ = steady_state_from_table(
        table, ["neg_qubit_rest", "neg_light_rest"], tail_fraction=0.1)
    for name, val in steady.items():
        assert records[0].steady[name] == pytest.approx(val, rel=1e-12)
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "# units: t=ns"
    assert lines[1].startswith("model.g_ql,neg_qubit_rest,")


def test_sweep_point_failure_is_recorded():
    base = tardigrade_cfg()
    sweep = SweepConfig(base=base, axes=(SweepAxis("model.n_l", (5.0, 1.0)),))
    records = run_sweep(sweep)
    assert records[0].error is None
    assert records[1].error is not None  # n_l=1 violates truncation >= 2


def test_yaml_scenario_loading():
    cfg = scenario_from_dict(yaml.safe_load(MINIMAL_YAML))
    assert cfg.model == "tardigrade"
    # the unsigned-exponent string form still parses as a number
    assert cfg.params.g_ql == pytest.approx(0.15e9)
    assert cfg.integrator.t_final == 5.0


def test_yaml_rejections():
    doc = yaml.safe_load(MINIMAL_YAML)
    for mutate in (
        lambda d: d.pop("schema_version"),
        lambda d: d.update(schema_version=99),
        lambda d: d.update(model="ferret"),
        lambda d: d.pop("observables"),
        lambda d: d["params"].update(nonsense=1.0),
        lambda d: d["integrator"].update(method="leapfrog"),
        lambda d: d.update(observables=[{"kind": "negativity"}]),  # no side_a run
    ):
        bad = yaml.safe_load(MINIMAL_YAML)
        mutate(bad)
        with pytest.raises(ConfigError):
            cfg = scenario_from_dict(bad)
            run_scenario(cfg)


def test_sweep_from_dict():
    doc = yaml.safe_load(MINIMAL_YAML)
    doc["sweep"] = {"axes": [{"path": "noise_exponent", "values": [0, 1, 2]}],
                    "tail_fraction": 0.2}
    cfg = sweep_from_dict(doc)
    assert cfg.axes[0].path == "noise_exponent"
    assert cfg.axes[0].values == (0.0, 1.0, 2.0)
    assert cfg.tail_fraction == 0.2
    doc["sweep"]["axes"] = []
    with pytest.raises(ConfigError):
        sweep_from_dict(doc)


def test_cli_validate_profiles(capsys):
    assert cli_main(["validate", "--profile", "ci"]) == 0
    out = capsys.readouterr().out
    assert "total_dim: 36" in out
    assert cli_main(["validate", "--profile", "full"]) == 0
    out = capsys.readouterr().out
    assert "total_dim: 2500" in out


def test_cli_simulate_and_exit_codes(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.yaml"
    cfg_path.write_text(MINIMAL_YAML)
    out = tmp_path / "run.csv"
    assert cli_main(["simulate", "--config", str(cfg_path),
                     "--output", str(out)]) == 0
    capsys.readouterr()
    assert out.exists()
    # missing config file -> 2
    assert cli_main(["validate", "--config", str(tmp_path / "nope.yaml")]) == 2
    # config without an output path -> 2
    assert cli_main(["simulate", "--config", str(cfg_path)]) == 2
    capsys.readouterr()


def test_cli_sweep(tmp_path, capsys):
    doc = yaml.safe_load(MINIMAL_YAML)
    doc["sweep"] = {"axes": [{"path": "model.g_ql", "values": [0.0, "0.15e+9"]}]}
    cfg_path = tmp_path / "sweep.yaml"
    cfg_path.write_text(yaml.safe_dump(doc))
    out = tmp_path / "sweep.csv"
    assert cli_main(["sweep", "--config", str(cfg_path),
                     "--output", str(out)]) == 0
    capsys.readouterr()
    rows = out.read_text().splitlines()
    assert len(rows) == 4  # units header + column header + 2 points
