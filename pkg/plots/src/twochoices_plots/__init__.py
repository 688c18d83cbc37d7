"""Figures from consensus-time experiment CSV files."""

from .figure import (
    EXACT_COLUMNS,
    OVERLAY_KINDS,
    SIMULATE_COLUMNS,
    CsvSchemaError,
    EmptyCsvError,
    FigureSpec,
    OverlayFit,
    Series,
    fit_overlay,
    load_series,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "EXACT_COLUMNS",
    "OVERLAY_KINDS",
    "SIMULATE_COLUMNS",
    "CsvSchemaError",
    "EmptyCsvError",
    "FigureSpec",
    "OverlayFit",
    "Series",
    "fit_overlay",
    "load_series",
    "render",
    "__version__",
]
