"""Batch renderer for risnoma outage CSV files."""
from .render import (EXPECTED_COLUMNS, FigureSpec, RenderResult,
                     SchemaMismatchError, load_rows, render)

__all__ = ["EXPECTED_COLUMNS", "FigureSpec", "RenderResult",
           "SchemaMismatchError", "load_rows", "render"]

__version__ = "0.1.0"
