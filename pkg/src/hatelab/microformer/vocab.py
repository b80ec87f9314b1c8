"""Word-level tokenizer mapping normalized tokens to integer ids."""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

__all__ = ["WordTokenizer"]


class WordTokenizer:
    """Ids 0 and 1 are reserved for padding and unknown words; real terms
    start at 2 and are ranked by frequency (first appearance breaks ties)."""

    PAD = 0
    UNK = 1

    def __init__(self, terms: Sequence[str]):
        self.terms = list(terms)
        self.term_to_id = {term: i + 2 for i, term in enumerate(self.terms)}
        if len(self.term_to_id) != len(self.terms):
            raise ValueError("duplicate term in tokenizer vocabulary")

    @property
    def vocab_size(self) -> int:
        return len(self.terms) + 2

    @classmethod
    def fit(
        cls, token_lists: Iterable[Sequence[str]], max_terms: int = 8192
    ) -> "WordTokenizer":
        counts: Counter[str] = Counter()
        first_seen: dict[str, int] = {}
        for tokens in token_lists:
            for token in tokens:
                counts[token] += 1
                if token not in first_seen:
                    first_seen[token] = len(first_seen)
        ranked = sorted(counts, key=lambda t: (-counts[t], first_seen[t]))
        return cls(ranked[:max_terms])

    def encode(self, tokens: Sequence[str], max_len: int) -> list[int]:
        """Truncates to max_len; an empty token list encodes as [UNK] so
        every document keeps at least one position."""
        ids = [self.term_to_id.get(t, self.UNK) for t in tokens[:max_len]]
        return ids if ids else [self.UNK]

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(f"V {len(self.terms)}\n")
            for term in self.terms:
                handle.write(term + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "WordTokenizer":
        with open(path, "r", encoding="utf-8") as handle:
            header = handle.readline()
            if not header.startswith("V "):
                raise ValueError(f"bad tokenizer file header: {header!r}")
            count = int(header.split()[1])
            terms = [handle.readline().rstrip("\n") for _ in range(count)]
        if len(terms) != count or any(not t for t in terms):
            raise ValueError("tokenizer file is truncated")
        return cls(terms)
