"""Post ingestion, text normalization, and deterministic stratified splits.

Raw collections arrive as UTF-8 JSON Lines files with at least ``id`` and
``text`` per record, optionally ``label`` (0/1) and a string-valued ``meta``
map. The same format is used for export, so a corpus round-trips through
files unchanged.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from pathlib import Path


class CorpusError(ValueError):
    """Malformed input file or violated corpus invariant."""


# One pass over the lowercased text. Sentinels are matched first so that
# normalize is idempotent on its own space-joined output; URLs swallow
# everything up to the next whitespace; '#' falls through as a separator,
# which strips it from hashtags. Word runs are Unicode alphanumerics
# (underscore excluded).
_TOKEN_RE = re.compile(
    r"(?P<sentinel><url>|<user>)"
    r"|(?P<url>[a-z][a-z0-9+.\-]*://\S+)"
    r"|(?P<user>@\w+)"
    r"|(?P<word>[^\W_]+)"
)

URL_TOKEN = "<url>"
USER_TOKEN = "<user>"


def normalize(text: str) -> list[str]:
    """Normalize raw text into tokens.

    Lowercases, replaces URLs and @-mentions with the ``<url>`` / ``<user>``
    sentinels, strips ``#`` from hashtags, and splits the rest on runs of
    non-alphanumeric characters. Total: never raises.
    """
    tokens: list[str] = []
    for m in _TOKEN_RE.finditer(text.lower()):
        if m.lastgroup == "url":
            tokens.append(URL_TOKEN)
        elif m.lastgroup == "user":
            tokens.append(USER_TOKEN)
        else:  # sentinel or word: keep matched text as-is
            tokens.append(m.group())
    return tokens


@dataclass
class Post:
    """A single ingested document.

    ``tokens`` is always the deterministic output of :func:`normalize` on
    ``text``; it is filled in automatically when omitted.
    """

    id: str
    text: str
    tokens: list[str] = field(default_factory=list)
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("post id must be nonempty")
        if not self.tokens:
            self.tokens = normalize(self.text)


@dataclass
class LabeledCorpus:
    """Posts plus per-post binary labels (True = positive class)."""

    posts: list[Post]
    labels: list[bool]
    split_seed: int = 0

    def __post_init__(self) -> None:
        if len(self.posts) != len(self.labels):
            raise CorpusError(
                f"labels.len ({len(self.labels)}) != posts.len ({len(self.posts)})"
            )

    def __len__(self) -> int:
        return len(self.posts)

    def class_counts(self) -> tuple[int, int]:
        """(negatives, positives)."""
        pos = sum(1 for y in self.labels if y)
        return len(self.labels) - pos, pos


def _parse_line(line: str, lineno: int) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed record (line {lineno}): {exc.msg}") from exc
    if not isinstance(record, dict):
        raise CorpusError(f"malformed record (line {lineno}): not an object")
    for key in ("id", "text"):
        if key not in record:
            raise CorpusError(f"malformed record (line {lineno}): missing field '{key}'")
    if not isinstance(record["id"], str) or not isinstance(record["text"], str):
        raise CorpusError(f"malformed record (line {lineno}): id and text must be strings")
    return record


def load_jsonl(path: str | Path) -> list[Post]:
    """Read one Post per line, preserving order. Duplicate ids are rejected."""
    posts: list[Post] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = _parse_line(line, lineno)
            pid = record["id"]
            if pid in seen:
                raise CorpusError(f"duplicate id: {pid} (line {lineno})")
            seen.add(pid)
            meta = record.get("meta") or {}
            if not isinstance(meta, dict):
                raise CorpusError(f"malformed record (line {lineno}): meta must be an object")
            posts.append(Post(id=pid, text=record["text"], meta=dict(meta)))
    return posts


def load_corpus(path: str | Path) -> LabeledCorpus:
    """Like :func:`load_jsonl` but every record must carry a 0/1 ``label``."""
    posts: list[Post] = []
    labels: list[bool] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = _parse_line(line, lineno)
            pid = record["id"]
            if pid in seen:
                raise CorpusError(f"duplicate id: {pid} (line {lineno})")
            seen.add(pid)
            if "label" not in record:
                raise CorpusError(f"malformed record (line {lineno}): missing field 'label'")
            label = record["label"]
            if label not in (0, 1, True, False):
                raise CorpusError(f"malformed record (line {lineno}): label must be 0 or 1")
            meta = record.get("meta") or {}
            posts.append(Post(id=pid, text=record["text"], meta=dict(meta)))
            labels.append(bool(label))
    return LabeledCorpus(posts=posts, labels=labels)


def export_jsonl(path: str | Path, posts: list[Post], labels: list[bool] | None = None) -> None:
    """Write posts (and labels, when given) back out in the ingestion format."""
    if labels is not None and len(labels) != len(posts):
        raise CorpusError("labels.len != posts.len")
    with open(path, "w", encoding="utf-8") as fh:
        for i, post in enumerate(posts):
            record: dict = {"id": post.id, "text": post.text}
            if labels is not None:
                record["label"] = int(labels[i])
            if post.meta:
                record["meta"] = post.meta
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def export_corpus(path: str | Path, corpus: LabeledCorpus) -> None:
    export_jsonl(path, corpus.posts, corpus.labels)


def split_stratified(
    corpus: LabeledCorpus, test_fraction: float = 0.2, seed: int = 42
) -> tuple[LabeledCorpus, LabeledCorpus]:
    """Deterministic per-class split into (train, test).

    Per-class test counts are round(class_count * test_fraction), half
    rounded up. Identical (corpus, fraction, seed) always produce the
    identical split; both halves preserve ingestion order.
    """
    if not 0.0 < test_fraction < 1.0:
        raise CorpusError(f"test_fraction must be in (0,1), got {test_fraction}")
    if len(corpus) == 0:
        raise CorpusError("cannot split an empty corpus")

    rng = random.Random(seed)
    test_idx: set[int] = set()
    for cls in (False, True):
        members = [i for i, y in enumerate(corpus.labels) if y == cls]
        if not members:
            continue
        n_test = int(math.floor(len(members) * test_fraction + 0.5))
        rng.shuffle(members)
        test_idx.update(members[:n_test])

    def take(indices: list[int]) -> LabeledCorpus:
        return LabeledCorpus(
            posts=[corpus.posts[i] for i in indices],
            labels=[corpus.labels[i] for i in indices],
            split_seed=seed,
        )

    train = take([i for i in range(len(corpus)) if i not in test_idx])
    test = take([i for i in range(len(corpus)) if i in test_idx])
    return train, test
