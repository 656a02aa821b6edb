"""mmdfigs: figures from crossmmd experiment CSV artifacts.

Consumes only the CSV/JSON files the experiment harness writes; never
imports or recomputes anything from the testing toolkit itself.
"""

__version__ = "0.1.0"

from .plotdata import (BenchData, FigureDataError, FigureSpec, HistData,
                       PowerData, RocData, build, build_bench_data,
                       build_hist_data, build_power_data, build_roc_data,
                       load_rows)
from .render import render

__all__ = [
    "__version__",
    "BenchData", "FigureDataError", "FigureSpec", "HistData", "PowerData",
    "RocData", "build", "build_bench_data", "build_hist_data",
    "build_power_data", "build_roc_data", "load_rows", "render",
]
