"""Figure scripts for the simulator's CSV outputs.

All numerics come from the CSVs produced by the probesim package; this
package only renders them (time series and steady-state scatter plots).
"""
from .csvio import DataError, Table, read_table
from .render import plot_scatter, plot_timeseries, render
from .spec import FigureSpec, SpecError, load_spec

__all__ = [
    "DataError",
    "FigureSpec",
    "SpecError",
    "Table",
    "load_spec",
    "plot_scatter",
    "plot_timeseries",
    "read_table",
    "render",
]

__version__ = "0.1.0"
