"""Threshold-based dual-annotator labeling with dispute resolution.

Two primary annotators independently score each post 0-10; a score maps to a
binary label via ``score >= theta``. Agreement resolves the post by consensus;
disagreement escalates it to a third reviewer whose thresholded score becomes
final. The store keeps an append-only event log of accepted submissions and
derives all record state from it, so persistence is replay.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from ..corpus import LabeledCorpus, Post


class AnnotationError(Exception):
    """Base class for rejected submissions and invalid annotation state."""


class UnknownPostError(AnnotationError):
    pass


class InvalidScoreError(AnnotationError):
    pass


class DuplicateSubmissionError(AnnotationError):
    pass


class WrongStateError(AnnotationError):
    """Third-reviewer score on a record that is not disputed."""


class EventLogError(AnnotationError):
    """Corrupt or inconsistent persisted event log."""


class Role(str, Enum):
    PRIMARY1 = "Primary1"
    PRIMARY2 = "Primary2"
    THIRD = "ThirdReviewer"


class RecordState(str, Enum):
    PENDING_FIRST = "PendingFirst"
    PENDING_SECOND = "PendingSecond"
    DISPUTED = "Disputed"
    RESOLVED = "Resolved"


class Resolution(str, Enum):
    CONSENSUS = "Consensus"
    THIRD_REVIEWER = "ThirdReviewer"
    NONE = "None"


@dataclass(frozen=True)
class AnnotationConfig:
    """Scoring threshold and score bounds. A score s labels True iff s >= theta."""

    theta: int = 6
    score_min: int = 0
    score_max: int = 10

    def __post_init__(self) -> None:
        if not self.score_min <= self.theta <= self.score_max:
            raise AnnotationError(
                f"theta must lie in [{self.score_min},{self.score_max}], got {self.theta}"
            )

    def label(self, score: int) -> bool:
        return score >= self.theta

    def check_score(self, score: int) -> None:
        if not isinstance(score, int) or isinstance(score, bool):
            raise InvalidScoreError(f"score must be an integer, got {score!r}")
        if not self.score_min <= score <= self.score_max:
            raise InvalidScoreError(
                f"score must lie in [{self.score_min},{self.score_max}], got {score}"
            )


@dataclass
class AnnotationRecord:
    """Per-post scoring state.

    ``label1``/``label2`` are present exactly when the matching score is, and
    always equal ``score >= theta``. ``final_label`` is present exactly in the
    Resolved state.
    """

    post_id: str
    score1: int | None = None
    score2: int | None = None
    score3: int | None = None
    label1: bool | None = None
    label2: bool | None = None
    final_label: bool | None = None
    state: RecordState = RecordState.PENDING_FIRST
    resolved_by: Resolution = Resolution.NONE

    def to_dict(self) -> dict:
        return {
            "post_id": self.post_id,
            "score1": self.score1,
            "score2": self.score2,
            "score3": self.score3,
            "label1": self.label1,
            "label2": self.label2,
            "final_label": self.final_label,
            "state": self.state.value,
            "resolved_by": self.resolved_by.value,
        }


# State transitions never regress along this partial order.
_STATE_RANK = {
    RecordState.PENDING_FIRST: 0,
    RecordState.PENDING_SECOND: 1,
    RecordState.DISPUTED: 2,
    RecordState.RESOLVED: 3,
}


class AnnotationStore:
    """In-memory record store backed by an optional append-only event log.

    Every accepted score submission is one event ``{post_id, role, score, seq}``
    appended (and flushed) before the call returns. Reconstructing a store is
    replaying its log. All mutations and snapshot reads are serialized by a
    single lock, which gives per-post linearization.
    """

    def __init__(
        self,
        posts: list[Post],
        config: AnnotationConfig | None = None,
        log_path: str | Path | None = None,
    ) -> None:
        self.config = config or AnnotationConfig()
        self._lock = threading.Lock()
        self._posts: dict[str, Post] = {}
        self._order: list[str] = []
        for post in posts:
            if post.id in self._posts:
                raise AnnotationError(f"duplicate post id: {post.id}")
            self._posts[post.id] = post
            self._order.append(post.id)
        self._records = {pid: AnnotationRecord(post_id=pid) for pid in self._order}
        self._seq = 0
        self._log_path = Path(log_path) if log_path is not None else None
        self._log_fh = None
        if self._log_path is not None:
            self._replay_log()
            self._log_fh = open(self._log_path, "a", encoding="utf-8")

    # -- persistence ---------------------------------------------------

    def _replay_log(self) -> None:
        if not self._log_path.exists():
            return
        with open(self._log_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    event = json.loads(line)
                    post_id = event["post_id"]
                    role = Role(event["role"])
                    score = event["score"]
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    raise EventLogError(f"corrupt event at line {lineno}: {line.strip()!r}") from exc
                try:
                    self._apply(post_id, role, score)
                except AnnotationError as exc:
                    raise EventLogError(f"inconsistent event at line {lineno}: {exc}") from exc
                self._seq += 1

    def _append_event(self, post_id: str, role: Role, score: int) -> None:
        if self._log_fh is None:
            return
        event = {"post_id": post_id, "role": role.value, "score": score, "seq": self._seq}
        self._log_fh.write(json.dumps(event) + "\n")
        self._log_fh.flush()

    def close(self) -> None:
        if self._log_fh is not None:
            self._log_fh.close()
            self._log_fh = None

    # -- state machine -------------------------------------------------

    def _apply(self, post_id: str, role: Role, score: int) -> AnnotationRecord:
        """Validate and apply one submission. Caller holds the lock."""
        if post_id not in self._records:
            raise UnknownPostError(f"unknown post: {post_id}")
        self.config.check_score(score)
        rec = self._records[post_id]
        label = self.config.label(score)

        if role in (Role.PRIMARY1, Role.PRIMARY2):
            slot = "score1" if role == Role.PRIMARY1 else "score2"
            if getattr(rec, slot) is not None:
                raise DuplicateSubmissionError(f"{role.value} already scored {post_id}")
            setattr(rec, slot, score)
            setattr(rec, "label1" if role == Role.PRIMARY1 else "label2", label)
            if rec.score1 is None or rec.score2 is None:
                rec.state = RecordState.PENDING_SECOND
            elif rec.label1 == rec.label2:
                rec.state = RecordState.RESOLVED
                rec.final_label = rec.label1
                rec.resolved_by = Resolution.CONSENSUS
            else:
                rec.state = RecordState.DISPUTED
        else:
            if rec.state != RecordState.DISPUTED:
                raise WrongStateError(
                    f"third-reviewer score on {post_id} in state {rec.state.value}"
                )
            if rec.score3 is not None:  # unreachable while Disputed, kept as a guard
                raise DuplicateSubmissionError(f"{role.value} already scored {post_id}")
            rec.score3 = score
            rec.final_label = label
            rec.state = RecordState.RESOLVED
            rec.resolved_by = Resolution.THIRD_REVIEWER
        return rec

    # -- public API ----------------------------------------------------

    def submit_score(self, post_id: str, role: Role | str, score: int) -> AnnotationRecord:
        """Apply one score; persists the event before acknowledging."""
        role = Role(role)
        with self._lock:
            rec = self._apply(post_id, role, score)
            self._append_event(post_id, role, score)
            self._seq += 1
            return replace(rec)

    def record(self, post_id: str) -> AnnotationRecord:
        with self._lock:
            if post_id not in self._records:
                raise UnknownPostError(f"unknown post: {post_id}")
            return replace(self._records[post_id])

    def post(self, post_id: str) -> Post:
        with self._lock:
            if post_id not in self._posts:
                raise UnknownPostError(f"unknown post: {post_id}")
            return self._posts[post_id]

    def pending_queue(self, role: Role | str) -> list[str]:
        """Post ids this role may currently score, in ingestion order."""
        role = Role(role)
        with self._lock:
            out = []
            for pid in self._order:
                rec = self._records[pid]
                if role == Role.PRIMARY1 and rec.score1 is None:
                    out.append(pid)
                elif role == Role.PRIMARY2 and rec.score2 is None:
                    out.append(pid)
                elif role == Role.THIRD and rec.state == RecordState.DISPUTED:
                    out.append(pid)
            return out

    def export_labels(self) -> LabeledCorpus:
        """Exactly the resolved records with their final labels, in ingestion order."""
        with self._lock:
            posts, labels = [], []
            for pid in self._order:
                rec = self._records[pid]
                if rec.state == RecordState.RESOLVED:
                    posts.append(self._posts[pid])
                    labels.append(bool(rec.final_label))
            return LabeledCorpus(posts=posts, labels=labels)

    def records(self) -> list[AnnotationRecord]:
        with self._lock:
            return [replace(self._records[pid]) for pid in self._order]

    def state_counts(self) -> dict[str, int]:
        with self._lock:
            counts = {s.value: 0 for s in RecordState}
            for rec in self._records.values():
                counts[rec.state.value] += 1
            return counts


def annotate_labels_batch(
    scores: list[tuple[int, int, int | None]],
    config: AnnotationConfig | None = None,
) -> list[bool | None]:
    """Pure-function form of the labeling loop, no storage.

    Each entry is (score1, score2, optional score3). Consensus yields the
    shared label; a dispute with a third score yields the third reviewer's
    label; a dispute without one yields None.
    """
    config = config or AnnotationConfig()
    out: list[bool | None] = []
    for score1, score2, score3 in scores:
        config.check_score(score1)
        config.check_score(score2)
        label1, label2 = config.label(score1), config.label(score2)
        if label1 == label2:
            out.append(label1)
        elif score3 is None:
            out.append(None)
        else:
            config.check_score(score3)
            out.append(config.label(score3))
    return out


def state_rank(state: RecordState) -> int:
    """Position in the no-regression partial order."""
    return _STATE_RANK[state]
