"""Small HTTP API over an :class:`AnnotationStore` for the browser UI.

Endpoints (JSON request/response bodies, UTF-8):

    GET  /queue?role=Primary1      -> {"role": ..., "post_ids": [...]}
    POST /score                    -> full record; body {post_id, role, score}
    GET  /record/{post_id}         -> full record
    GET  /posts/{post_id}          -> {"id": ..., "text": ...}
    GET  /export                   -> {"records": [{post_id, final_label, resolved_by}]}

Status codes: 400 invalid score or bad request, 404 unknown post, 409 double
submission or a third-reviewer score on a non-disputed record. CORS headers
are sent on every response so the UI can be served from anywhere.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .engine import (
    AnnotationStore,
    DuplicateSubmissionError,
    InvalidScoreError,
    RecordState,
    UnknownPostError,
    WrongStateError,
)


class _Handler(BaseHTTPRequestHandler):
    server: "AnnotationServer"

    def log_message(self, format: str, *args) -> None:  # keep test output quiet
        pass

    def _send(self, status: int, payload: dict | list) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str) -> None:
        self._send(status, {"error": message})

    def do_OPTIONS(self) -> None:  # CORS preflight
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self) -> None:
        store = self.server.store
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if url.path == "/queue":
                role = parse_qs(url.query).get("role", [""])[0]
                try:
                    post_ids = store.pending_queue(role)
                except ValueError:
                    self._error(400, f"unknown role: {role!r}")
                    return
                self._send(200, {"role": role, "post_ids": post_ids})
            elif len(parts) == 2 and parts[0] == "record":
                self._send(200, store.record(parts[1]).to_dict())
            elif len(parts) == 2 and parts[0] == "posts":
                post = store.post(parts[1])
                self._send(200, {"id": post.id, "text": post.text})
            elif url.path == "/export":
                records = [
                    {
                        "post_id": rec.post_id,
                        "final_label": rec.final_label,
                        "resolved_by": rec.resolved_by.value,
                    }
                    for rec in store.records()
                    if rec.state == RecordState.RESOLVED
                ]
                self._send(200, {"records": records})
            else:
                self._error(404, f"no such endpoint: {url.path}")
        except UnknownPostError as exc:
            self._error(404, str(exc))

    def do_POST(self) -> None:
        store = self.server.store
        if urlparse(self.path).path != "/score":
            self._error(404, f"no such endpoint: {self.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length).decode("utf-8"))
            post_id, role, score = body["post_id"], body["role"], body["score"]
        except (json.JSONDecodeError, KeyError, ValueError, UnicodeDecodeError):
            self._error(400, "body must be JSON with post_id, role, and score")
            return
        try:
            record = store.submit_score(post_id, role, score)
        except UnknownPostError as exc:
            self._error(404, str(exc))
        except InvalidScoreError as exc:
            self._error(400, str(exc))
        except (DuplicateSubmissionError, WrongStateError) as exc:
            self._error(409, str(exc))
        except ValueError as exc:  # unknown role string
            self._error(400, str(exc))
        else:
            self._send(200, record.to_dict())


class AnnotationServer(ThreadingHTTPServer):
    """ThreadingHTTPServer bound to a store; pass port 0 for an ephemeral port."""

    daemon_threads = True

    def __init__(self, store: AnnotationStore, host: str = "127.0.0.1", port: int = 8765):
        self.store = store
        super().__init__((host, port), _Handler)

    @property
    def port(self) -> int:
        return self.server_address[1]


def serve(store: AnnotationStore, host: str = "127.0.0.1", port: int = 8765) -> None:
    """Run the API until interrupted. Used by the CLI serve subcommand."""
    server = AnnotationServer(store, host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        store.close()


def start_background(store: AnnotationStore, host: str = "127.0.0.1", port: int = 0) -> AnnotationServer:
    """Start the server on a daemon thread and return it (tests, tooling)."""
    server = AnnotationServer(store, host, port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server
