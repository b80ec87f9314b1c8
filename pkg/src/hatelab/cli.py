"""Command-line entry point.

Subcommands: ``ingest`` normalizes a raw JSONL collection, ``synth``
generates the bundled-style synthetic corpus, ``annotate-serve`` runs the
scoring HTTP service over a corpus, and ``train-eval`` runs a model grid
and writes CSV + markdown reports.

Exit codes are a stable contract: 0 success, 1 usage or domain error,
2 I/O error (missing files, unwritable paths, ports in use).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

from .annotation import AnnotationConfig, AnnotationError, AnnotationStore, serve
from .corpus import (
    CorpusError,
    load_corpus,
    load_jsonl,
)
from .datasets import make_synthetic_corpus
from .evaluation import (
    MODEL_NAMES,
    VECTOR_EMBEDDINGS,
    emit_report,
    run_grid,
)
from .features import load_embeddings

__all__ = ["main", "build_parser", "UsageError"]

STATE_DIR_ENV = "HATELAB_STATE_DIR"
_DEFAULT_STATE_DIR = "hatelab-state"
_CLASSICAL_MODELS = ("nb", "lr", "svm", "knn", "rf")


class UsageError(Exception):
    """Bad flags or arguments; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we want 1
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hatelab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate and normalize a raw JSONL file")
    p_ingest.add_argument("--input", required=True, help="raw JSONL posts")
    p_ingest.add_argument("--output", required=True, help="normalized corpus path")
    p_ingest.set_defaults(func=cmd_ingest)

    p_synth = sub.add_parser("synth", help="generate the synthetic fixture corpus")
    p_synth.add_argument("--output", required=True)
    p_synth.add_argument("--n", type=int, default=2000)
    p_synth.add_argument("--positive-fraction", type=float, default=0.2)
    p_synth.add_argument("--seed", type=int, default=42)
    p_synth.set_defaults(func=cmd_synth)

    p_serve = sub.add_parser("annotate-serve", help="run the annotation HTTP service")
    p_serve.add_argument("--input", required=True, help="corpus JSONL to annotate")
    p_serve.add_argument(
        "--output",
        help=f"event-log path (default: ${STATE_DIR_ENV}/events.jsonl)",
    )
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--theta", type=int, default=6)
    p_serve.set_defaults(func=cmd_annotate_serve)

    p_train = sub.add_parser("train-eval", help="run a model/embedding grid")
    p_train.add_argument("--input", required=True, help="labeled corpus JSONL")
    p_train.add_argument("--output", help="report path prefix (writes .csv and .md)")
    p_train.add_argument("--grid", help="file with one 'model,embedding' pair per line")
    p_train.add_argument("--format", choices=("csv", "md"), default="csv")
    p_train.add_argument("--seed", type=int, default=42)
    p_train.add_argument("--test-fraction", type=float, default=0.2)
    p_train.add_argument(
        "--embeddings",
        action="append",
        default=[],
        metavar="NAME=PATH",
        help="dense embedding table, repeatable",
    )
    p_train.set_defaults(func=cmd_train_eval)
    return parser


# -- subcommands ---------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    with open(args.input, encoding="utf-8") as fh:
        first = next((line for line in fh if line.strip()), "")
    try:
        labeled = bool(first) and "label" in json.loads(first)
    except json.JSONDecodeError:
        labeled = False  # the loader reports the malformed line properly
    if labeled:
        corpus = load_corpus(args.input)
        posts, labels = corpus.posts, corpus.labels
    else:
        posts, labels = load_jsonl(args.input), None

    with open(args.output, "w", encoding="utf-8") as fh:
        for i, post in enumerate(posts):
            record: dict = {"id": post.id, "text": post.text, "tokens": post.tokens}
            if labels is not None:
                record["label"] = int(labels[i])
            if post.meta:
                record["meta"] = post.meta
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"ingested {len(posts)} posts -> {args.output}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    corpus = make_synthetic_corpus(
        n_posts=args.n, positive_fraction=args.positive_fraction, seed=args.seed
    )
    from .corpus import export_corpus

    export_corpus(args.output, corpus)
    negatives, positives = corpus.class_counts()
    print(f"wrote {len(corpus)} posts ({positives} positive) -> {args.output}")
    return 0


def _state_path(args: argparse.Namespace) -> Path:
    if args.output:
        return Path(args.output)
    state_dir = Path(os.environ.get(STATE_DIR_ENV, _DEFAULT_STATE_DIR))
    state_dir.mkdir(parents=True, exist_ok=True)
    return state_dir / "events.jsonl"


def cmd_annotate_serve(args: argparse.Namespace) -> int:
    posts = load_jsonl(args.input)
    config = AnnotationConfig(theta=args.theta)
    store = AnnotationStore(posts, config, log_path=_state_path(args))
    try:
        serve(store, host=args.host, port=args.port)
    except KeyboardInterrupt:
        pass
    finally:
        store.close()
    return 0


def _parse_grid_file(path: str) -> list[tuple[str, str]]:
    grid: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = [p.strip() for p in body.split(",")]
            if len(parts) != 2 or not all(parts):
                raise UsageError(
                    f"{path}:{lineno}: expected 'model,embedding', got {body!r}"
                )
            grid.append((parts[0], parts[1]))
    if not grid:
        raise UsageError(f"{path}: grid file is empty")
    return grid


def _default_grid(dense_names: list[str]) -> list[tuple[str, str]]:
    embeddings = list(VECTOR_EMBEDDINGS) + dense_names
    return [(m, e) for m in _CLASSICAL_MODELS for e in embeddings]


def cmd_train_eval(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.input)
    tables = {}
    for item in args.embeddings:
        if "=" not in item:
            raise UsageError(f"--embeddings expects NAME=PATH, got {item!r}")
        name, path = item.split("=", 1)
        if name in VECTOR_EMBEDDINGS or name == "tokens":
            raise UsageError(f"embedding name {name!r} is reserved")
        tables[name] = load_embeddings(path)

    grid = (
        _parse_grid_file(args.grid) if args.grid else _default_grid(sorted(tables))
    )
    report = run_grid(
        corpus,
        grid,
        test_fraction=args.test_fraction,
        seed=args.seed,
        embedding_tables=tables,
    )
    csv_text = emit_report(report, "csv")
    md_text = emit_report(report, "md")
    if args.output:
        prefix = re.sub(r"\.(csv|md)$", "", args.output)
        Path(prefix + ".csv").write_text(csv_text, encoding="utf-8")
        Path(prefix + ".md").write_text(md_text, encoding="utf-8")
    sys.stdout.write(csv_text if args.format == "csv" else md_text)
    return 0


# -- driver --------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        missing = exc.filename if exc.filename else str(exc)
        print(f"error: not found: {missing}", file=sys.stderr)
        return 2
    except (CorpusError, AnnotationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
