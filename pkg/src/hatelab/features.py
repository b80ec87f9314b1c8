"""Vectorizers: token counts, TF-IDF, the hashing trick, and mean-pooled
pretrained embeddings.

All vectorizers take documents as lists of token strings (the corpus module's
``normalize`` output) and follow fit/transform conventions. Sparse outputs are
:class:`SparseVector`; the embedding vectorizer produces dense rows.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._base import BaseEstimator, check_fitted

TokenDoc = list[str]


@dataclass
class SparseVector:
    """Sorted, zero-free sparse vector of a fixed dimension."""

    dim: int
    indices: np.ndarray  # strictly increasing int64, all < dim
    values: np.ndarray  # float64, no explicit zeros

    @classmethod
    def from_counts(cls, counts: dict[int, float], dim: int) -> "SparseVector":
        items = sorted((i, v) for i, v in counts.items() if v != 0.0)
        indices = np.fromiter((i for i, _ in items), dtype=np.int64, count=len(items))
        values = np.fromiter((v for _, v in items), dtype=np.float64, count=len(items))
        return cls(dim=dim, indices=indices, values=values)

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim, dtype=np.float64)
        dense[self.indices] = self.values
        return dense

    def l2_norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))

    def scaled(self, factor: float) -> "SparseVector":
        return SparseVector(self.dim, self.indices, self.values * factor)

    def dot_dense(self, dense: np.ndarray) -> float:
        return float(np.dot(self.values, dense[self.indices]))

    def dot(self, other: "SparseVector") -> float:
        """Sparse-sparse dot by merging index lists; O(nnz_a + nnz_b)."""
        common, ia, ib = np.intersect1d(
            self.indices, other.indices, assume_unique=True, return_indices=True
        )
        if common.size == 0:
            return 0.0
        return float(np.dot(self.values[ia], other.values[ib]))


@dataclass
class Vocabulary:
    """Term-to-index map with document frequencies over the fitting corpus."""

    term_to_index: dict[str, int]
    doc_freq: dict[str, int]
    n_docs: int

    def __len__(self) -> int:
        return len(self.term_to_index)

    def save(self, path: str | Path) -> None:
        """Line-delimited ``term index df`` with an N header line."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"N {self.n_docs}\n")
            for term, index in sorted(self.term_to_index.items(), key=lambda kv: kv[1]):
                fh.write(f"{term} {index} {self.doc_freq[term]}\n")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        term_to_index: dict[str, int] = {}
        doc_freq: dict[str, int] = {}
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2 or header[0] != "N":
                raise ValueError(f"{path}: expected 'N <n_docs>' header")
            n_docs = int(header[1])
            for line in fh:
                term, index, df = line.split()
                term_to_index[term] = int(index)
                doc_freq[term] = int(df)
        return cls(term_to_index=term_to_index, doc_freq=doc_freq, n_docs=n_docs)


def fit_vocabulary(docs: list[TokenDoc]) -> Vocabulary:
    """Indices in first-seen order; doc_freq counts documents, not occurrences."""
    if not docs:
        raise ValueError("cannot fit a vocabulary on an empty corpus")
    term_to_index: dict[str, int] = {}
    doc_freq: dict[str, int] = {}
    for doc in docs:
        for term in doc:
            if term not in term_to_index:
                term_to_index[term] = len(term_to_index)
        for term in set(doc):
            doc_freq[term] = doc_freq.get(term, 0) + 1
    return Vocabulary(term_to_index=term_to_index, doc_freq=doc_freq, n_docs=len(docs))


class CountVectorizer(BaseEstimator):
    """Token occurrence counts over a fitted vocabulary; unknown tokens drop."""

    def __init__(self):
        self.vocabulary_: Vocabulary | None = None

    def fit(self, docs: list[TokenDoc]) -> "CountVectorizer":
        self.vocabulary_ = fit_vocabulary(docs)
        return self

    def transform_one(self, doc: TokenDoc) -> SparseVector:
        check_fitted(self, "vocabulary_")
        vocab = self.vocabulary_
        counts: dict[int, float] = {}
        for term in doc:
            index = vocab.term_to_index.get(term)
            if index is not None:
                counts[index] = counts.get(index, 0.0) + 1.0
        return SparseVector.from_counts(counts, dim=len(vocab))

    def transform(self, docs: list[TokenDoc]) -> list[SparseVector]:
        return [self.transform_one(doc) for doc in docs]

    def fit_transform(self, docs: list[TokenDoc]) -> list[SparseVector]:
        return self.fit(docs).transform(docs)


def idf_weight(n_docs: int, df: int) -> float:
    """Smoothed inverse document frequency, ln((1+N)/(1+df)) + 1."""
    return math.log((1.0 + n_docs) / (1.0 + df)) + 1.0


class TfidfVectorizer(CountVectorizer):
    """Counts weighted by smoothed idf, then L2-normalized.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1. A document with no known tokens
    stays the zero vector.
    """

    def __init__(self):
        super().__init__()
        self.idf_: np.ndarray | None = None

    def fit(self, docs: list[TokenDoc]) -> "TfidfVectorizer":
        super().fit(docs)
        vocab = self.vocabulary_
        idf = np.empty(len(vocab), dtype=np.float64)
        for term, index in vocab.term_to_index.items():
            idf[index] = idf_weight(vocab.n_docs, vocab.doc_freq[term])
        self.idf_ = idf
        return self

    def transform_one(self, doc: TokenDoc) -> SparseVector:
        counted = super().transform_one(doc)
        if counted.nnz == 0:
            return counted
        values = counted.values * self.idf_[counted.indices]
        norm = float(np.sqrt(np.dot(values, values)))
        if norm > 0.0:
            values = values / norm
        return SparseVector(dim=counted.dim, indices=counted.indices, values=values)


_FNV_OFFSET = 0x811C9DC5
_FNV_PRIME = 0x01000193


def fnv1a_32(data: bytes) -> int:
    """32-bit FNV-1a hash."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFF
    return h


_VALID_HASH_DIMS = {2**k for k in range(8, 25)}
DEFAULT_HASH_DIM = 2**18


class HashingVectorizer(BaseEstimator):
    """Stateless vectorizer: bucket = FNV-1a-32(utf8(token)) mod dim.

    Values are raw counts accumulated per bucket, so collisions add and every
    output stays non-negative. No fitting state; dim must be 2^k, 8 <= k <= 24.
    """

    def __init__(self, dim: int = DEFAULT_HASH_DIM):
        self.dim = dim

    def _check_dim(self) -> None:
        if self.dim not in _VALID_HASH_DIMS:
            raise ValueError(f"dim must be a power of two in [2^8, 2^24], got {self.dim}")

    def fit(self, docs: list[TokenDoc] | None = None) -> "HashingVectorizer":
        self._check_dim()
        return self

    def transform_one(self, doc: TokenDoc) -> SparseVector:
        self._check_dim()
        counts: dict[int, float] = {}
        for term in doc:
            bucket = fnv1a_32(term.encode("utf-8")) % self.dim
            counts[bucket] = counts.get(bucket, 0.0) + 1.0
        return SparseVector.from_counts(counts, dim=self.dim)

    def transform(self, docs: list[TokenDoc]) -> list[SparseVector]:
        return [self.transform_one(doc) for doc in docs]

    def fit_transform(self, docs: list[TokenDoc]) -> list[SparseVector]:
        return self.fit(docs).transform(docs)


@dataclass
class EmbeddingTable:
    """word -> vector map; all vectors share dimension ``dim``."""

    vectors: dict[str, np.ndarray]
    dim: int

    def __len__(self) -> int:
        return len(self.vectors)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Read a GloVe-style text file: ``word v1 ... vd`` per line.

    The dimension is inferred from the first line; a line with a different
    dimension is an error naming its line number.
    """
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            word, raw = parts[0], parts[1:]
            if dim is None:
                dim = len(raw)
                if dim == 0:
                    raise ValueError(f"{path}: no vector components on line {lineno}")
            elif len(raw) != dim:
                raise ValueError(
                    f"{path}: inconsistent dimension on line {lineno} "
                    f"(expected {dim}, got {len(raw)})"
                )
            try:
                vectors[word] = np.asarray([float(v) for v in raw], dtype=np.float64)
            except ValueError as exc:
                raise ValueError(f"{path}: bad vector component on line {lineno}") from exc
    if dim is None or not vectors:
        raise ValueError(f"{path}: no vectors")
    return EmbeddingTable(vectors=vectors, dim=dim)


def embed_mean(table: EmbeddingTable, doc: TokenDoc) -> np.ndarray:
    """Arithmetic mean of in-table token vectors; zero vector if none match."""
    found = [table.vectors[t] for t in doc if t in table.vectors]
    if not found:
        return np.zeros(table.dim, dtype=np.float64)
    return np.mean(found, axis=0)


class EmbeddingVectorizer(BaseEstimator):
    """Mean-pooled dense document vectors from a pretrained embedding table."""

    def __init__(self, table: EmbeddingTable):
        self.table = table

    def fit(self, docs: list[TokenDoc] | None = None) -> "EmbeddingVectorizer":
        return self

    def transform_one(self, doc: TokenDoc) -> np.ndarray:
        return embed_mean(self.table, doc)

    def transform(self, docs: list[TokenDoc]) -> np.ndarray:
        return np.stack([self.transform_one(doc) for doc in docs]) if docs else np.zeros(
            (0, self.table.dim)
        )

    def fit_transform(self, docs: list[TokenDoc]) -> np.ndarray:
        return self.transform(docs)
