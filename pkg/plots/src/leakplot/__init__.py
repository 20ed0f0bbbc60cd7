"""Figure rendering for logical-error-rate sweep CSV files."""

from .figures import (
    ARCH_LINESTYLES,
    CSV_COLUMNS,
    FALLBACK_COLORS,
    FIGURE_KINDS,
    SIGMA_COLORS,
    FigureSpec,
    SweepRow,
    fitted_slope,
    read_sweep_rows,
    render,
)

__all__ = [
    "ARCH_LINESTYLES",
    "CSV_COLUMNS",
    "FALLBACK_COLORS",
    "FIGURE_KINDS",
    "SIGMA_COLORS",
    "FigureSpec",
    "SweepRow",
    "fitted_slope",
    "read_sweep_rows",
    "render",
]

__version__ = "0.1.0"
