"""Directional word-relatedness toolkit.

Estimates conditional probabilities between word pairs from three kinds of
resources (free-association norms, static embeddings, masked language
models), and compares the resources through log-asymmetry metrics.
"""

__version__ = "0.1.0"

from .errors import AsymGaugeError
from .evocation_data import (
    ConditionalTable,
    EvocationDataset,
    clean_pair_filter,
    conditionals,
    ingest_evocation,
)
from .metrics import alar, cam, directional_accuracy, lar, lar_map, spearman

__all__ = [
    "__version__",
    "AsymGaugeError",
    "ConditionalTable",
    "EvocationDataset",
    "clean_pair_filter",
    "conditionals",
    "ingest_evocation",
    "lar",
    "lar_map",
    "alar",
    "cam",
    "spearman",
    "directional_accuracy",
]
