"""Figure-spec loading and validation.

A figure spec is a small YAML mapping naming the input CSV, the kind of
figure, the columns to draw, and the output path stem. Rendering never
recomputes physics: the CSV is the single source of numbers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

KINDS = ("timeseries", "scatter")


class SpecError(ValueError):
    """Malformed figure spec; message names the bad field."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input: str
    series: tuple[str, ...]
    output: str
    x: str = "t"
    negate_x: bool = False  # scatter only: label the axis -x (noise exponent -i)
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"kind: expected one of {KINDS}, got {self.kind!r}")
        if not self.series:
            raise SpecError("series: must name at least one column")
        if not self.output:
            raise SpecError("output: required")
        if self.negate_x and self.kind != "scatter":
            raise SpecError("negate_x: only valid for scatter figures")


def load_spec(path) -> FigureSpec:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise SpecError(f"spec file not found: {path}")
    except yaml.YAMLError as exc:
        raise SpecError(f"invalid YAML in {path}: {exc}")
    if not isinstance(doc, dict):
        raise SpecError(f"{path}: spec root must be a mapping")
    known = {"kind", "input", "series", "output", "x", "negate_x",
             "title", "xlabel", "ylabel"}
    unknown = set(doc) - known
    if unknown:
        raise SpecError(f"{path}: unknown fields {sorted(unknown)}")
    for key in ("kind", "input", "series", "output"):
        if key not in doc:
            raise SpecError(f"{path}: missing required field {key!r}")
    series = doc["series"]
    if isinstance(series, str):
        series = [series]
    # input and output are resolved relative to the spec file
    return FigureSpec(
        kind=doc["kind"],
        input=str((path.parent / doc["input"]).resolve()),
        series=tuple(str(s) for s in series),
        output=str((path.parent / doc["output"]).resolve()),
        x=str(doc.get("x", "t")),
        negate_x=bool(doc.get("negate_x", False)),
        title=str(doc.get("title", "")),
        xlabel=str(doc.get("xlabel", "")),
        ylabel=str(doc.get("ylabel", "")),
    )
