from library.processing import (
    parallelization,
    pore_metrics,
    sequential,
    statistics,
)

__all__ = (
    "parallelization",
    "pore_metrics",
    "sequential",
    "statistics",
)
