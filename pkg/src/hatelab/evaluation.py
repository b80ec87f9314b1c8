"""Metrics, the model-by-embedding evaluation grid, and report emission.

The grid runs every requested (model, embedding) pair against one shared
stratified split.  Vectorizers and tokenizers are fitted on the training
half only.  Pairs that cannot run (multinomial NB over features with
negative values, token models paired with vector embeddings) are recorded
as skipped rows with a reason instead of failing the whole grid.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .classifiers import (
    KNNClassifier,
    LinearSVMClassifier,
    LogisticRegressionClassifier,
    NaiveBayesClassifier,
    RandomForestClassifier,
)
from .corpus import LabeledCorpus, split_stratified
from .features import (
    CountVectorizer,
    EmbeddingTable,
    EmbeddingVectorizer,
    HashingVectorizer,
    TfidfVectorizer,
)
from . import microformer

__all__ = [
    "ConfusionMatrix",
    "EvalRow",
    "EvalReport",
    "GridError",
    "confusion",
    "metrics",
    "run_grid",
    "emit_report",
    "MODEL_NAMES",
    "VECTOR_EMBEDDINGS",
    "TOKEN_EMBEDDING",
]


class GridError(ValueError):
    """Raised when a grid request cannot be satisfied at all."""


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "fn", "tn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(predictions: Sequence[bool], truth: Sequence[bool]) -> ConfusionMatrix:
    """Counts with the positive class meaning anti-Semitic (label True)."""
    if len(predictions) != len(truth):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions vs {len(truth)} labels"
        )
    if len(truth) == 0:
        raise ValueError("cannot build a confusion matrix from zero examples")
    pred = np.asarray(predictions, dtype=bool)
    true = np.asarray(truth, dtype=bool)
    return ConfusionMatrix(
        tp=int(np.sum(pred & true)),
        fp=int(np.sum(pred & ~true)),
        fn=int(np.sum(~pred & true)),
        tn=int(np.sum(~pred & ~true)),
    )


def metrics(cm: ConfusionMatrix) -> dict[str, float]:
    """Accuracy, precision, recall, F1.  Any 0/0 resolves to 0.0, which is
    what makes an all-negative predictor print as a row of zeros."""
    total = cm.total
    if total == 0:
        raise ValueError("confusion matrix is empty")
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0.0
        else 0.0
    )
    return {
        "accuracy": (cm.tp + cm.tn) / total,
        "precision": precision,
        "recall": recall,
        "f1": f1,
    }


@dataclass
class EvalRow:
    model: str
    embedding: str
    values: dict[str, float] | None = None
    reason: str = ""

    @property
    def skipped(self) -> bool:
        return self.values is None


@dataclass
class EvalReport:
    rows: list[EvalRow]
    seed: int
    corpus_id: str
    test_fraction: float
    fitted_vectorizers: dict[int, object] = field(default_factory=dict)


MODEL_NAMES = ("nb", "lr", "svm", "knn", "rf", "transformer", "transformer-lora")
VECTOR_EMBEDDINGS = ("count", "tfidf", "hashing")
TOKEN_EMBEDDING = "tokens"

_TOKEN_MODELS = ("transformer", "transformer-lora")

_DISPLAY_MODEL = {
    "nb": "NB",
    "lr": "LR",
    "svm": "SVM",
    "knn": "k-NN",
    "rf": "RF",
    "transformer": "Transformer",
    "transformer-lora": "Transformer-LoRA",
}
_DISPLAY_EMBEDDING = {
    "count": "Count",
    "tfidf": "Tfidf",
    "hashing": "Hashing",
    "tokens": "Tokens",
}


def _has_negatives(table: EmbeddingTable) -> bool:
    return any(bool((vec < 0).any()) for vec in table.vectors.values())


def corpus_digest(corpus: LabeledCorpus) -> str:
    hasher = hashlib.sha256()
    for post, label in zip(corpus.posts, corpus.labels):
        hasher.update(f"{post.id}\t{int(label)}\n".encode("utf-8"))
    return hasher.hexdigest()[:12]


def _make_classifier(name: str, seed: int, params: dict):
    if name == "nb":
        return NaiveBayesClassifier(**params)
    if name == "lr":
        return LogisticRegressionClassifier(**{"seed": seed, **params})
    if name == "svm":
        return LinearSVMClassifier(**{"seed": seed, **params})
    if name == "knn":
        return KNNClassifier(**params)
    if name == "rf":
        return RandomForestClassifier(**{"seed": seed, **params})
    raise GridError(f"unknown model {name!r}; valid: {', '.join(MODEL_NAMES)}")


def _make_vectorizer(name: str, tables: Mapping[str, EmbeddingTable]):
    if name == "count":
        return CountVectorizer()
    if name == "tfidf":
        return TfidfVectorizer()
    if name == "hashing":
        return HashingVectorizer()
    if name in tables:
        return EmbeddingVectorizer(tables[name])
    valid = list(VECTOR_EMBEDDINGS) + [TOKEN_EMBEDDING] + sorted(tables)
    raise GridError(f"unknown embedding {name!r}; valid: {', '.join(valid)}")


def _run_token_cell(
    model_name: str,
    train: LabeledCorpus,
    test: LabeledCorpus,
    seed: int,
    params: dict,
) -> np.ndarray:
    params = dict(params)
    epochs = params.pop("epochs", 10)
    lr = params.pop("lr", 0.1)
    batch_size = params.pop("batch_size", 32)
    max_terms = params.pop("max_terms", 8192)
    lora_r = params.pop("lora_r", 8)
    lora_alpha = params.pop("lora_alpha", 16.0)
    config_fields = dict(params)

    tokenizer = microformer.WordTokenizer.fit(
        (post.tokens for post in train.posts), max_terms=max_terms
    )
    config = microformer.ModelConfig(vocab_size=tokenizer.vocab_size, **config_fields)
    encode = lambda corpus: [
        tokenizer.encode(post.tokens, config.max_seq_len) for post in corpus.posts
    ]
    train_ids = encode(train)
    model = microformer.init_model(config, seed=seed)
    if model_name == "transformer-lora":
        model = microformer.attach_lora(model, r=lora_r, alpha=lora_alpha, seed=seed)
        mode = "lora"
    else:
        mode = "full"
    microformer.train(
        model,
        train_ids,
        train.labels,
        epochs=epochs,
        lr=lr,
        batch_size=batch_size,
        seed=seed,
        mode=mode,
        track_accuracy=False,
    )
    return microformer.predict(model, encode(test))


def run_grid(
    corpus: LabeledCorpus,
    grid: Sequence[tuple[str, str]],
    test_fraction: float = 0.2,
    seed: int = 42,
    embedding_tables: Mapping[str, EmbeddingTable] | None = None,
    model_params: Mapping[str, dict] | None = None,
    keep_fitted: bool = False,
) -> EvalReport:
    """Evaluates each (model, embedding) pair on one shared split.

    model_params maps a model name to constructor overrides; for the two
    token models it also carries training and config overrides.
    """
    if not grid:
        raise GridError("empty grid")
    counts = corpus.class_counts()
    if counts[0] == 0 or counts[1] == 0:
        raise GridError("corpus must contain both classes")
    tables = dict(embedding_tables or {})
    overrides = dict(model_params or {})

    # Validate every name up front so a typo fails before any training.
    for model_name, embedding_name in grid:
        if model_name not in MODEL_NAMES:
            raise GridError(
                f"unknown model {model_name!r}; valid: {', '.join(MODEL_NAMES)}"
            )
        if (
            embedding_name not in VECTOR_EMBEDDINGS
            and embedding_name != TOKEN_EMBEDDING
            and embedding_name not in tables
        ):
            valid = list(VECTOR_EMBEDDINGS) + [TOKEN_EMBEDDING] + sorted(tables)
            raise GridError(
                f"unknown embedding {embedding_name!r}; valid: {', '.join(valid)}"
            )

    train, test = split_stratified(corpus, test_fraction, seed)
    truth = np.asarray(test.labels, dtype=bool)
    report = EvalReport(
        rows=[],
        seed=seed,
        corpus_id=corpus_digest(corpus),
        test_fraction=test_fraction,
    )

    for index, (model_name, embedding_name) in enumerate(grid):
        params = dict(overrides.get(model_name, {}))
        row = EvalRow(model=model_name, embedding=embedding_name)

        if model_name in _TOKEN_MODELS and embedding_name != TOKEN_EMBEDDING:
            row.reason = "token input only"
        elif model_name not in _TOKEN_MODELS and embedding_name == TOKEN_EMBEDDING:
            row.reason = "needs vector embedding"
        elif model_name == "nb" and embedding_name in tables and _has_negatives(
            tables[embedding_name]
        ):
            row.reason = "negative features"

        if row.reason:
            report.rows.append(row)
            continue

        if model_name in _TOKEN_MODELS:
            predictions = _run_token_cell(model_name, train, test, seed, params)
        else:
            vectorizer = _make_vectorizer(embedding_name, tables)
            train_docs = [post.tokens for post in train.posts]
            test_docs = [post.tokens for post in test.posts]
            x_train = vectorizer.fit_transform(train_docs)
            x_test = vectorizer.transform(test_docs)
            classifier = _make_classifier(model_name, seed, params)
            classifier.fit(x_train, np.asarray(train.labels, dtype=bool))
            predictions = classifier.predict(x_test)
            if keep_fitted:
                report.fitted_vectorizers[index] = vectorizer

        row.values = metrics(confusion(predictions, truth))
        report.rows.append(row)
    return report


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def emit_report(report: EvalReport, format: str = "csv") -> str:
    """CSV (canonical names, trailing reason column) or a markdown table
    with the familiar Model/Accuracy/Precision/Recall/F1-score/Embedding
    layout.  Rows keep grid order in both formats."""
    if format == "csv":
        lines = ["model,accuracy,precision,recall,f1,embedding,reason"]
        for row in report.rows:
            if row.skipped:
                cells = [row.model, "", "", "", "", row.embedding, row.reason]
            else:
                v = row.values
                cells = [
                    row.model,
                    _fmt(v["accuracy"]),
                    _fmt(v["precision"]),
                    _fmt(v["recall"]),
                    _fmt(v["f1"]),
                    row.embedding,
                    "",
                ]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    if format in ("md", "markdown", "markdown-table"):
        lines = [
            "| Model | Accuracy | Precision | Recall | F1-score | Embedding |",
            "| --- | --- | --- | --- | --- | --- |",
        ]
        notes = []
        for row in report.rows:
            model = _DISPLAY_MODEL.get(row.model, row.model)
            embedding = _DISPLAY_EMBEDDING.get(row.embedding, row.embedding)
            if row.skipped:
                cells = [model, "-", "-", "-", "-", embedding]
                notes.append(f"skipped: {model} with {embedding} ({row.reason})")
            else:
                v = row.values
                cells = [
                    model,
                    _fmt(v["accuracy"]),
                    _fmt(v["precision"]),
                    _fmt(v["recall"]),
                    _fmt(v["f1"]),
                    embedding,
                ]
            lines.append("| " + " | ".join(cells) + " |")
        body = "\n".join(lines) + "\n"
        if notes:
            body += "\n" + "\n".join(notes) + "\n"
        return body

    raise ValueError(f"unknown report format {format!r}; use 'csv' or 'md'")
