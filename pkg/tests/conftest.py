import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from asrnoise.generator.fallback import fallback_corrupt  # noqa: E402
from asrnoise.generator.prompt import extract_query  # noqa: E402
from asrnoise.tagging import parse_tagged  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


class StubLLM:
    """Behaviour of the stub chat endpoint; tests swap ``mode`` per case."""

    def __init__(self):
        self.mode = "corrupt"
        self.requests: list[dict] = []
        self.headers: list[dict] = []

    def reply(self, body: dict) -> tuple[int, dict]:
        self.requests.append(body)
        if self.mode == "http-error":
            return 500, {"error": "boom"}
        if self.mode == "garbage":
            return 200, {"choices": [{"message": {"content": "a {b"}}]}
        query = extract_query(body["messages"][-1]["content"])
        text = fallback_corrupt(parse_tagged(query), len(self.requests))
        return 200, {"choices": [{"message": {"role": "assistant", "content": text}}]}


@pytest.fixture
def stub_server():
    """Local HTTP chat endpoint that corrupts the tagged query like the fallback does."""
    llm = StubLLM()

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            body = json.loads(self.rfile.read(length))
            llm.headers.append(dict(self.headers))
            status, payload = llm.reply(body)
            data = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    llm.url = f"http://127.0.0.1:{server.server_address[1]}/v1/chat/completions"
    yield llm
    server.shutdown()
    server.server_close()
