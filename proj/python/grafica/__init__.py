"""Attributed-graph clustering with data-optimal polynomial graph filters.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._grafica import (
    AttributedGraph,
    GraficaError,
    ari,
    baseline,
    cluster,
    filter_response,
    generate_sbm,
    load_content_cites,
    load_csv_dataset,
    nmi,
)

__all__ = [
    "AttributedGraph",
    "GraficaError",
    "ari",
    "baseline",
    "cluster",
    "filter_response",
    "generate_sbm",
    "load_content_cites",
    "load_csv_dataset",
    "nmi",
]
