"""Replay server answering feed requests from a directory of XML files.

Corpus layout mirrors request paths::

    <root>/feeds/api/channelstandardfeeds/most_subscribed/start-1.xml
    <root>/feeds/api/users/<name>/uploads/start-51.xml
    <root>/feeds/api/users/<name>/index.xml          # profile entry

A request carrying ``start-index=N`` is served from ``start-N.xml`` in the
directory named by its path; past the last page of an existing directory an
empty feed is returned. Requests without ``start-index`` get ``index.xml``.
Anything else is a 404. Required query parameters are checked so that
client URL drift shows up as a 400.
"""

from __future__ import annotations

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, unquote, urlsplit

from .feed import ATOM_NS, YT_NS

EMPTY_FEED = (
    f'<?xml version="1.0" encoding="UTF-8"?>\n'
    f'<feed xmlns="{ATOM_NS}" xmlns:yt="{YT_NS}"></feed>\n'
).encode("utf-8")

_REQUIRED = {
    "channelstandardfeeds": {"time": "all_time", "v": "2"},
    "uploads": {"orderby": "viewCount", "racy": "include"},
}


class ReplayServer:
    """Threaded HTTP server over a fixture corpus, recording every request.

    Use as a context manager; ``base_url`` is valid inside the block.
    ``failures`` maps a request path to a list of status codes returned (and
    consumed) before the real answer, for exercising retries.
    """

    def __init__(self, root, host: str = "127.0.0.1", port: int = 0, page_size: int = 50):
        self.root = Path(root).resolve()
        self.page_size = page_size
        self.requests: list[tuple[str, dict[str, str]]] = []
        self.failures: dict[str, list[int]] = {}
        self._lock = threading.Lock()
        self._httpd = ThreadingHTTPServer((host, port), self._handler_class())
        self._thread: Optional[threading.Thread] = None

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "ReplayServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join()

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    def paths(self, prefix: str = "") -> list[str]:
        with self._lock:
            return [p for p, _ in self.requests if p.startswith(prefix)]

    def start_indices(self, path: str) -> list[int]:
        with self._lock:
            return [int(q["start-index"]) for p, q in self.requests if p == path and "start-index" in q]

    def resolve(self, path: str, query: dict[str, str]) -> tuple[int, bytes]:
        with self._lock:
            self.requests.append((path, query))
            pending = self.failures.get(path)
            if pending:
                return pending.pop(0), b""
        parts = [p for p in unquote(path).split("/") if p]
        if any(p in (".", "..") for p in parts):
            return 400, b"bad path"
        for marker, required in _REQUIRED.items():
            if marker in parts:
                for key, value in required.items():
                    if query.get(key) != value:
                        return 400, f"missing or wrong query parameter {key}".encode()
                if query.get("max-results") != str(self.page_size):
                    return 400, b"unsupported max-results"
        target = self.root.joinpath(*parts)
        if "start-index" in query:
            page = target / f"start-{query['start-index']}.xml"
            if page.is_file():
                return 200, page.read_bytes()
            if target.is_dir():
                return 200, EMPTY_FEED
            return 404, b"not found"
        index = target / "index.xml"
        if index.is_file():
            return 200, index.read_bytes()
        return 404, b"not found"

    def _handler_class(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                url = urlsplit(self.path)
                query = {k: v[-1] for k, v in parse_qs(url.query).items()}
                status, body = server.resolve(url.path, query)
                self.send_response(status)
                ctype = "application/atom+xml; charset=UTF-8" if status == 200 else "text/plain"
                self.send_header("Content-Type", ctype)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, format, *args):
                pass

        return Handler
