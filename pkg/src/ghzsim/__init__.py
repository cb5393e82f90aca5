"""Desk-scale simulator of a three-spin NMR demonstration of GHZ correlations."""

from ._kernels import BACKEND
from .ghz import SETTINGS, lhv_enumerate, run_experiment, timing_report
from .spinsys import SpinSystem, alanine

__all__ = ["BACKEND", "SETTINGS", "SpinSystem", "alanine", "lhv_enumerate", "run_experiment", "timing_report"]
__version__ = "0.1.0"
