from .engine import (
    AnnotationConfig,
    AnnotationError,
    AnnotationRecord,
    AnnotationStore,
    DuplicateSubmissionError,
    EventLogError,
    InvalidScoreError,
    RecordState,
    Resolution,
    Role,
    UnknownPostError,
    WrongStateError,
    annotate_labels_batch,
    state_rank,
)
from .service import AnnotationServer, serve, start_background

__all__ = [
    "AnnotationConfig",
    "AnnotationError",
    "AnnotationRecord",
    "AnnotationServer",
    "AnnotationStore",
    "DuplicateSubmissionError",
    "EventLogError",
    "InvalidScoreError",
    "RecordState",
    "Resolution",
    "Role",
    "UnknownPostError",
    "WrongStateError",
    "annotate_labels_batch",
    "serve",
    "start_background",
    "state_rank",
]
