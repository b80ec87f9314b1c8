"""hatelab: threshold-based dual-annotator labeling, classical text
classifiers built from first principles, a small manually-differentiated
transformer with low-rank adapters, and a Table-style evaluation grid.
"""

from . import annotation, classifiers, datasets, evaluation, features, microformer
from ._base import NotFittedError
from .corpus import (
    CorpusError,
    LabeledCorpus,
    Post,
    export_corpus,
    export_jsonl,
    load_corpus,
    load_jsonl,
    normalize,
    split_stratified,
)
from .evaluation import ConfusionMatrix, EvalReport, confusion, emit_report, metrics, run_grid

__version__ = "0.1.0"

__all__ = [
    "annotation",
    "classifiers",
    "datasets",
    "evaluation",
    "features",
    "microformer",
    "CorpusError",
    "NotFittedError",
    "LabeledCorpus",
    "Post",
    "ConfusionMatrix",
    "EvalReport",
    "confusion",
    "emit_report",
    "export_corpus",
    "export_jsonl",
    "load_corpus",
    "load_jsonl",
    "metrics",
    "normalize",
    "run_grid",
    "split_stratified",
    "__version__",
]
