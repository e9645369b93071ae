"""Offline helpers for ffbandit: corpus export in the runner's text formats
and regret-curve plots from its summary CSVs."""

from .corpus import CorpusExport, prepare_corpus, SourceMissing
from .formats import FormatError
from .plot import SchemaError, plot_regret

__all__ = [
    "CorpusExport",
    "FormatError",
    "SchemaError",
    "SourceMissing",
    "plot_regret",
    "prepare_corpus",
]
