import shutil
from importlib import resources
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from plotkit import DataError, SpecError, load_spec, read_table, render
from plotkit.cli import cli_main

GOLDEN = Path(__file__).parent / "golden"
SAMPLES = resources.files("plotkit") / "samples"


@pytest.fixture
def sample_dir(tmp_path):
    """Copy of the bundled sample CSVs + specs, rendered in isolation."""
    for entry in SAMPLES.iterdir():
        if entry.name.endswith((".csv", ".yaml")):
            shutil.copy(str(entry), tmp_path / entry.name)
    return tmp_path


def write_csv(path, text):
    path.write_text(text)
    return path


# -- spec loading ----------------------------------------------------------

def test_load_sample_specs(sample_dir):
    spec = load_spec(sample_dir / "timeseries.yaml")
    assert spec.kind == "timeseries"
    assert spec.series == ("neg_light_rest", "neg_tardigrade_rest", "neg_qubit_rest")
    assert Path(spec.input).parent == sample_dir.resolve()
    scatter = load_spec(sample_dir / "scatter.yaml")
    assert scatter.negate_x


def test_spec_rejections(tmp_path):
    cases = [
        "kind: pie\ninput: a.csv\nseries: [x]\noutput: f",
        "kind: timeseries\nseries: [x]\noutput: f",  # no input
        "kind: timeseries\ninput: a.csv\nseries: []\noutput: f",
        "kind: timeseries\ninput: a.csv\nseries: [x]\noutput: f\nnegate_x: true",
        "kind: scatter\ninput: a.csv\nseries: [x]\noutput: f\nsurprise: 1",
    ]
    for i, text in enumerate(cases):
        p = tmp_path / f"bad{i}.yaml"
        p.write_text(text)
        with pytest.raises(SpecError):
            load_spec(p)
    with pytest.raises(SpecError):
        load_spec(tmp_path / "missing.yaml")


# -- CSV reading -----------------------------------------------------------

def test_read_table_units_and_columns(tmp_path):
    p = write_csv(tmp_path / "t.csv", "# units: t=ns\nt,a\n0,1\n1,2\n")
    table = read_table(p)
    assert table.time_unit == "ns"
    assert np.array_equal(table.column("a"), [1.0, 2.0])
    with pytest.raises(DataError, match="nope"):
        table.column("nope")


def test_read_table_errors(tmp_path):
    with pytest.raises(DataError):
        read_table(tmp_path / "missing.csv")
    with pytest.raises(DataError):  # header only, no rows
        read_table(write_csv(tmp_path / "empty.csv", "# units: t=fs\nt,a\n"))


def test_converged_mask(tmp_path):
    p = write_csv(tmp_path / "s.csv",
                  "x,a,a_converged,err\n0,1,1,\n1,2,0,boom\n")
    table = read_table(p)
    assert list(table.converged_mask("a")) == [True, False]
    assert list(table.converged_mask("x")) == [True, True]
    assert np.isnan(table.column("err")).all()


# -- rendering -------------------------------------------------------------

def assert_matches_golden(path: Path, golden_name: str):
    golden = GOLDEN / golden_name
    if path.suffix == ".svg":
        assert path.read_bytes() == golden.read_bytes()
        return
    got = np.asarray(Image.open(path).convert("RGBA"))
    want = np.asarray(Image.open(golden).convert("RGBA"))
    assert got.shape == want.shape
    assert np.array_equal(got, want)


@pytest.mark.parametrize("spec_name,stem", [
    ("timeseries.yaml", "tardigrade_negativity"),
    ("scatter.yaml", "tardigrade_noise_scatter"),
])
def test_golden_images(sample_dir, spec_name, stem):
    written = render(load_spec(sample_dir / spec_name))
    assert [Path(w).suffix for w in written] == [".png", ".svg"]
    for w in written:
        assert_matches_golden(Path(w), Path(w).name)


def test_render_is_deterministic(sample_dir):
    first = [Path(p).read_bytes() for p in render(load_spec(sample_dir / "scatter.yaml"))]
    second = [Path(p).read_bytes() for p in render(load_spec(sample_dir / "scatter.yaml"))]
    assert first == second


def test_missing_column_named_in_error(tmp_path):
    write_csv(tmp_path / "d.csv", "# units: t=fs\nt,a\n0,1\n1,2\n")
    spec = tmp_path / "f.yaml"
    spec.write_text("kind: timeseries\ninput: d.csv\nseries: [ghost]\noutput: out")
    with pytest.raises(DataError, match="ghost"):
        render(load_spec(spec))
    assert not (tmp_path / "out.png").exists()


def test_no_figure_from_empty_data(tmp_path):
    write_csv(tmp_path / "d.csv", "# units: t=fs\nt,a\n")
    spec = tmp_path / "f.yaml"
    spec.write_text("kind: timeseries\ninput: d.csv\nseries: [a]\noutput: out")
    with pytest.raises(DataError):
        render(load_spec(spec))
    assert not (tmp_path / "out.png").exists()


# -- CLI -------------------------------------------------------------------

def test_cli_exit_codes(sample_dir, tmp_path, capsys):
    assert cli_main([str(sample_dir / "timeseries.yaml")]) == 0
    out = capsys.readouterr().out
    assert "tardigrade_negativity.png" in out
    assert cli_main([str(tmp_path / "missing.yaml")]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("kind: timeseries\ninput: missing.csv\nseries: [a]\noutput: out")
    assert cli_main([str(bad)]) == 1
    capsys.readouterr()
