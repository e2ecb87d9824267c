"""Interactive synthesis service: sessions, event logs, HTTP layer.

A session binds a listener kind to a target stimulus. Clients post one
(cell, symbol) example at a time and get back the listener's current guess;
undo rolls the example sequence back one step. Every state-mutating call
appends one event to the session's JSONL log, and replaying a log
reconstructs the session exactly.

The meaning matrix and canonical space are shared immutably across sessions;
each session's mutable state is serialized under its own lock.
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .errors import InconsistentSpecError
from .griddsl import (GRID, SYMBOL_NAMES, CanonicalSpace, example_id,
                      pattern_from_text, pattern_to_text)
from .pragmatics import l0_posterior, l1_posterior, lp_posterior
from .refgame import ConsistentSetCache, MeaningMatrix, consistent_set

LISTENER_KINDS = ("l0", "l1", "lp")
TOP_K = 5


class ServiceError(Exception):
    """Error with an HTTP status attached."""

    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class Stimulus:
    id: int
    pattern: np.ndarray  # (GRID, GRID)
    program_text: str


def parse_symbol(value) -> int:
    """Accept symbol codes (0..6) or names ("pig_red", ...)."""
    if isinstance(value, bool):
        raise ServiceError(422, "symbol must be a code 0..6 or a symbol name")
    if isinstance(value, int):
        if not 0 <= value < len(SYMBOL_NAMES):
            raise ServiceError(422, f"symbol code {value} out of range 0..6")
        return value
    if isinstance(value, str) and value in SYMBOL_NAMES:
        return SYMBOL_NAMES.index(value)
    raise ServiceError(422, f"unknown symbol {value!r}")


class SynthSession:
    """One interactive synthesis episode against a fixed stimulus."""

    def __init__(self, session_id: str, listener: str, stimulus: Stimulus,
                 matrix: MeaningMatrix, space: CanonicalSpace,
                 scores: np.ndarray, log_path: Path | None):
        self.id = session_id
        self.listener = listener
        self.stimulus = stimulus
        self.matrix = matrix
        self.space = space
        self.scores = scores
        self.examples: list[int] = []
        self.placed: dict[tuple[int, int], int] = {}
        self.cache = ConsistentSetCache(matrix)
        self.lock = threading.Lock()
        self.log_path = log_path

    def _posterior(self):
        if self.listener == "l0":
            return l0_posterior(self.matrix, self.examples, self.cache)
        if self.listener == "l1":
            return l1_posterior(self.matrix, self.examples, self.cache)
        return lp_posterior(self.matrix, self.examples, self.scores, self.cache)

    def payload(self) -> dict:
        posterior = self._posterior()
        top = posterior.top_k(TOP_K)
        top1_id = top[0][0]
        top1_pattern = self.space.pattern(top1_id)
        return {
            "session_id": self.id,
            "listener": self.listener,
            "stimulus_id": self.stimulus.id,
            "n_examples": len(self.examples),
            "n_consistent": posterior.n_consistent,
            "top1": pattern_to_text(top1_pattern),
            "top_k": [
                {"pattern": pattern_to_text(self.space.pattern(h)), "prob": prob}
                for h, prob in top
            ],
            "solved": bool(np.array_equal(top1_pattern, self.stimulus.pattern)),
        }

    def _log(self, event: dict) -> None:
        if self.log_path is not None:
            with open(self.log_path, "a") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")

    def post_example(self, x, y, symbol) -> dict:
        if not (isinstance(x, int) and isinstance(y, int)) or isinstance(x, bool) or isinstance(y, bool):
            raise ServiceError(422, "x and y must be integers")
        if not (0 <= x < GRID and 0 <= y < GRID):
            raise ServiceError(422, f"cell ({x},{y}) out of range 0..{GRID - 1}")
        code = parse_symbol(symbol)
        if (x, y) in self.placed:
            bound = self.placed[(x, y)]
            detail = "same symbol already placed" if bound == code else \
                f"cell already bound to {SYMBOL_NAMES[bound]}"
            raise ServiceError(409, f"cell ({x},{y}): {detail}")
        uid = example_id(x, y, code)
        attempt = self.examples + [uid]
        if consistent_set(self.matrix, attempt, self.cache) == 0:
            raise ServiceError(422, "no program matches these examples (0 consistent)")
        self.examples.append(uid)
        self.placed[(x, y)] = code
        self._log({"op": "example", "x": x, "y": y, "symbol": code})
        return self.payload()

    def undo(self) -> dict:
        if not self.examples:
            raise ServiceError(409, "nothing to undo")
        uid = self.examples.pop()
        cell = uid // len(SYMBOL_NAMES)
        del self.placed[(cell // GRID, cell % GRID)]
        self._log({"op": "undo"})
        return self.payload()


class SynthService:
    """Session registry over a shared game."""

    def __init__(self, matrix: MeaningMatrix, space: CanonicalSpace,
                 scores: np.ndarray, stimuli: list[Stimulus],
                 log_dir: str | Path | None = None):
        self.matrix = matrix
        self.space = space
        self.scores = scores
        self.stimuli = stimuli
        self.log_dir = Path(log_dir) if log_dir is not None else None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, SynthSession] = {}
        self._lock = threading.Lock()
        for stim in stimuli:
            self.space.index_of(stim.pattern)  # fail fast on drifted fixtures

    def create_session(self, listener, stimulus_id) -> dict:
        if listener not in LISTENER_KINDS:
            raise ServiceError(422, f"listener must be one of {LISTENER_KINDS}")
        if not isinstance(stimulus_id, int) or isinstance(stimulus_id, bool) \
                or not 0 <= stimulus_id < len(self.stimuli):
            raise ServiceError(404, f"unknown stimulus {stimulus_id!r}")
        sid = uuid.uuid4().hex
        log_path = self.log_dir / f"{sid}.jsonl" if self.log_dir is not None else None
        session = SynthSession(sid, listener, self.stimuli[stimulus_id],
                               self.matrix, self.space, self.scores, log_path)
        with self._lock:
            self.sessions[sid] = session
        session._log({"op": "create", "listener": listener, "stimulus_id": stimulus_id})
        payload = session.payload()
        payload["stimulus"] = pattern_to_text(session.stimulus.pattern)
        return payload

    def get_session(self, sid: str) -> SynthSession:
        with self._lock:
            session = self.sessions.get(sid)
        if session is None:
            raise ServiceError(404, f"unknown session {sid}")
        return session

    def stimuli_payload(self) -> dict:
        return {"stimuli": [
            {"id": s.id, "pattern": pattern_to_text(s.pattern), "program": s.program_text}
            for s in self.stimuli
        ]}

    def replay_log(self, path) -> SynthSession:
        """Rebuild a session from its event log (without re-logging)."""
        with open(path) as fh:
            events = [json.loads(line) for line in fh if line.strip()]
        if not events or events[0].get("op") != "create":
            raise ValueError(f"{path}: log does not start with a create event")
        head = events[0]
        session = SynthSession("replay", head["listener"],
                               self.stimuli[head["stimulus_id"]],
                               self.matrix, self.space, self.scores, None)
        for event in events[1:]:
            if event["op"] == "example":
                session.post_example(event["x"], event["y"], event["symbol"])
            elif event["op"] == "undo":
                session.undo()
            else:
                raise ValueError(f"{path}: unknown event {event!r}")
        return session


def load_stimuli(path=None) -> list[Stimulus]:
    """Load the stimulus fixture (packaged default when no path is given)."""
    if path is None:
        path = Path(__file__).parent / "data" / "stimuli_v1.json"
    with open(path) as fh:
        raw = json.load(fh)
    stimuli = []
    for i, entry in enumerate(raw["stimuli"]):
        stimuli.append(Stimulus(id=i, pattern=pattern_from_text(entry["pattern"]),
                                program_text=entry["program"]))
    return stimuli


_SESSION_EXAMPLES = re.compile(r"^/api/sessions/([0-9a-f]{32})/examples$")
_SESSION_UNDO = re.compile(r"^/api/sessions/([0-9a-f]{32})/undo$")

_CONTENT_TYPES = {".html": "text/html", ".js": "text/javascript",
                  ".css": "text/css", ".json": "application/json",
                  ".svg": "image/svg+xml", ".png": "image/png",
                  ".map": "application/json"}


def make_request_handler(service: SynthService, static_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):  # keep test output quiet
            pass

        def _send_json(self, status: int, payload: dict) -> None:
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            try:
                parsed = json.loads(self.rfile.read(length))
            except json.JSONDecodeError:
                raise ServiceError(400, "request body is not valid JSON") from None
            if not isinstance(parsed, dict):
                raise ServiceError(400, "request body must be a JSON object")
            return parsed

        def do_GET(self):
            try:
                if self.path == "/api/health":
                    self._send_json(200, {"status": "ok",
                                          "n_hypotheses": service.matrix.n_hypotheses,
                                          "n_utterances": service.matrix.n_utterances})
                elif self.path == "/api/stimuli":
                    self._send_json(200, service.stimuli_payload())
                elif self.path.startswith("/api/"):
                    self._send_json(404, {"error": "not found"})
                else:
                    self._serve_static()
            except ServiceError as err:
                self._send_json(err.status, {"error": str(err)})

        def do_POST(self):
            try:
                body = self._read_body()
                if self.path == "/api/sessions":
                    payload = service.create_session(body.get("listener"),
                                                     body.get("stimulus_id"))
                    self._send_json(200, payload)
                    return
                match = _SESSION_EXAMPLES.match(self.path)
                if match:
                    session = service.get_session(match.group(1))
                    with session.lock:
                        payload = session.post_example(body.get("x"), body.get("y"),
                                                       body.get("symbol"))
                    self._send_json(200, payload)
                    return
                match = _SESSION_UNDO.match(self.path)
                if match:
                    session = service.get_session(match.group(1))
                    with session.lock:
                        payload = session.undo()
                    self._send_json(200, payload)
                    return
                self._send_json(404, {"error": "not found"})
            except ServiceError as err:
                self._send_json(err.status, {"error": str(err)})
            except InconsistentSpecError as err:
                self._send_json(422, {"error": str(err)})

        def _serve_static(self):
            if static_dir is None:
                self._send_json(404, {"error": "no static assets configured"})
                return
            rel = self.path.lstrip("/") or "index.html"
            target = (static_dir / rel).resolve()
            if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
                self._send_json(404, {"error": "not found"})
                return
            body = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type",
                             _CONTENT_TYPES.get(target.suffix, "application/octet-stream"))
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler


def make_server(service: SynthService, host: str = "127.0.0.1", port: int = 8765,
                static_dir=None) -> ThreadingHTTPServer:
    handler = make_request_handler(service, Path(static_dir) if static_dir else None)
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server
