"""Offline figure rendering for the boost CLI's CSV output."""

from .loader import DataError, load_table, load_columns, load_qfunc, \
    load_almost_periods
from .render import FIGURES, render

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "load_table",
    "load_columns",
    "load_qfunc",
    "load_almost_periods",
    "FIGURES",
    "render",
]
