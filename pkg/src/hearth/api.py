"""Loopback HTTP API over a running engine.

Record-oriented: list endpoints stream NDJSON (one JSON object per line);
singletons return one JSON object.  The server binds 127.0.0.1 by default;
nothing here authenticates because nothing here leaves the machine.

    POST /utterance        {"speaker": hint, "text": ..., "marker": "respond"}
    POST /segments         {"segments": [{"t_start","t_end","vector"|"truth","noise"}]}
    POST /sensors          {"kind","room","value","alert"}
    POST /clock            {"timestamp": iso}
    GET  /actions?cursor=N incremental NDJSON action feed
    GET  /transcripts?session=&speaker=
    GET  /memory/search?q=&k=
    GET  /summary?session=&role=
    GET  /stats
    GET  /config
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

import numpy as np

from . import timeutil, vectors
from .diarization import Role, SegmentEmbedding
from .dialogue import Marker, PermissionDenied, UnknownSession
from .engine import Engine
from .errors import HearthError
from .fusion import SensorKind


class PortInUse(HearthError):
    pass


def _handler_for(engine: Engine):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        # -- plumbing ------------------------------------------------------

        def _send(self, status: int, body: bytes, content_type: str) -> None:
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.end_headers()
            self.wfile.write(body)

        def _json(self, status: int, payload: dict) -> None:
            self._send(status, (json.dumps(payload) + "\n").encode("utf-8"), "application/json")

        def _ndjson(self, rows: list[dict]) -> None:
            body = "".join(json.dumps(r) + "\n" for r in rows).encode("utf-8")
            self._send(200, body, "application/x-ndjson")

        def _error(self, status: int, message: str) -> None:
            self._json(status, {"error": message})

        def _body(self) -> dict:
            length = int(self.headers.get("Content-Length", "0"))
            if length == 0:
                return {}
            raw = self.rfile.read(length)
            try:
                return json.loads(raw.decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError) as e:
                raise HearthError(f"request body is not valid JSON: {e}")

        def do_OPTIONS(self) -> None:
            self._send(204, b"", "text/plain")

        # -- GET -------------------------------------------------------------

        def do_GET(self) -> None:
            url = urlparse(self.path)
            params = {k: v[0] for k, v in parse_qs(url.query).items()}
            try:
                if url.path == "/actions":
                    cursor = int(params.get("cursor", "0"))
                    with engine.lock:
                        rows = [dict(r) for r in engine.action_records[cursor:]]
                    self._ndjson(rows)
                elif url.path == "/transcripts":
                    with engine.lock:
                        turns = engine.store.transcripts.query_turns(
                            session=params.get("session"), speaker=params.get("speaker")
                        )
                    self._ndjson(
                        [
                            {
                                "session": t.session_id,
                                "speaker": t.speaker,
                                "t_start": t.t_start,
                                "t_end": t.t_end,
                                "text": t.text,
                                "tags": sorted(t.tags),
                            }
                            for t in turns
                        ]
                    )
                elif url.path == "/memory/search":
                    query = params.get("q", "")
                    if not query:
                        self._error(400, "missing query parameter q")
                        return
                    k = int(params.get("k", "5"))
                    hits = engine.memory_search(query, k)
                    self._ndjson(
                        [
                            {
                                "rank": i + 1,
                                "item_id": item.item_id,
                                "similarity": sim,
                                "source": item.source.value,
                                "text": item.text,
                            }
                            for i, (item, sim) in enumerate(hits)
                        ]
                    )
                elif url.path == "/summary":
                    session = params.get("session", "")
                    role_text = params.get("role", "")
                    try:
                        role = Role(role_text)
                    except ValueError:
                        self._error(400, f"unknown role {role_text!r}")
                        return
                    try:
                        text = engine.summarize(session, role)
                        self._json(200, {"session": session, "role": role.value, "summary": text})
                    except PermissionDenied as e:
                        self._error(403, "permission_denied")
                    except UnknownSession:
                        self._error(404, f"unknown session {session!r}")
                elif url.path == "/stats":
                    self._json(200, engine.stats())
                elif url.path == "/config":
                    self._json(200, engine.config.to_dict())
                else:
                    self._error(404, f"no such endpoint {url.path}")
            except HearthError as e:
                self._error(400, str(e))

        # -- POST ------------------------------------------------------------

        def do_POST(self) -> None:
            url = urlparse(self.path)
            try:
                body = self._body()
                if url.path == "/utterance":
                    speaker = body.get("speaker", "")
                    text = body.get("text", "")
                    if not speaker or not text:
                        self._error(400, "utterance requires speaker and text")
                        return
                    marker = Marker(body.get("marker", "respond"))
                    new_records = engine.handle_utterance(speaker, marker, text)
                    self._json(200, {"ok": True, "actions": len(new_records),
                                     "cursor": len(engine.action_records)})
                elif url.path == "/segments":
                    segments = body.get("segments", [])
                    results = []
                    for seg in segments:
                        if "truth" in seg:
                            a = engine.synth_segment(
                                seg["truth"], float(seg["t_start"]), float(seg["t_end"]),
                                float(seg.get("noise", 0.2)),
                            )
                        else:
                            vec = seg["vector"]
                            arr = (
                                vectors.decode_vector(vec)
                                if isinstance(vec, str)
                                else np.asarray(vec, dtype=float)
                            )
                            a = engine.handle_segment(
                                SegmentEmbedding(
                                    arr, float(seg["t_start"]), float(seg["t_end"]),
                                    engine.session_id,
                                )
                            )
                        results.append({"kind": a.kind.value, "id": a.id,
                                        "similarity": a.similarity})
                    self._json(200, {"ok": True, "assignments": results})
                elif url.path == "/sensors":
                    kind = SensorKind(body.get("kind", ""))
                    value = body.get("value", 0.0)
                    if isinstance(value, list):
                        value = tuple(float(v) for v in value)
                    else:
                        value = float(value)
                    engine.handle_sensor(
                        kind, body.get("room") or None, value,
                        alert=bool(body.get("alert", False)),
                    )
                    self._json(200, {"ok": True, "cursor": len(engine.action_records)})
                elif url.path == "/clock":
                    ts = timeutil.parse_timestamp(body.get("timestamp", ""))
                    engine.advance_clock(ts)
                    self._json(200, {"ok": True, "clock": timeutil.fmt_timestamp(ts)})
                elif url.path == "/session":
                    session_id = body.get("session", "")
                    if not session_id:
                        self._error(400, "session requires a session id")
                        return
                    engine.open_session(session_id)
                    self._json(200, {"ok": True, "session": session_id})
                else:
                    self._error(404, f"no such endpoint {url.path}")
            except (HearthError, ValueError) as e:
                self._error(400, str(e))

    return Handler


def serve(engine: Engine, host: str | None = None, port: int | None = None) -> ThreadingHTTPServer:
    """Bind and return the server (caller decides whether to block)."""
    host = host if host is not None else engine.config.host
    port = port if port is not None else engine.config.port
    try:
        server = ThreadingHTTPServer((host, port), _handler_for(engine))
    except OSError as e:
        raise PortInUse(f"cannot bind {host}:{port}: {e}")
    return server


def serve_forever(engine: Engine, host: str | None = None, port: int | None = None) -> None:
    server = serve(engine, host, port)
    try:
        server.serve_forever()
    finally:
        server.server_close()
