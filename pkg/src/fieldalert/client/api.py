"""HTTP client for the alert server, plus weak-network machinery.

The lossy link lives client-side so tests can run fully deterministic:
a seeded RNG decides per attempt whether the request dies before the
server sees it or after (response lost). Submissions ride an
idempotency key, so retried attempts collapse to one report either way.
"""

from __future__ import annotations

import json
import random
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterator

from .. import errors
from ..errors import FieldAlertError, LinkDropped, TransportError, Unreachable
from ..model import Actor, DisasterReport
from ..server.events import PushMessage

BACKOFF_BASE_MS = 250
BACKOFF_FACTOR = 2
BACKOFF_CAP_MS = 8_000


def backoff_delays_ms(attempts: int) -> list[int]:
    """Sleep schedule between attempts: 250, 500, ... capped at 8000."""
    return [min(BACKOFF_CAP_MS, BACKOFF_BASE_MS * BACKOFF_FACTOR ** i)
            for i in range(max(attempts - 1, 0))]


@dataclass(frozen=True)
class LinkProfile:
    """Simulated network quality.

    drop_probability is the chance one attempt fails; a failed attempt
    is lost before the server sees it or after it answered, with equal
    probability, so duplicate server-side effects are actually exercised.
    """

    drop_probability: float = 0.0
    latency_ms: int = 0
    jitter_ms: int = 0

    def __post_init__(self):
        if not 0.0 <= self.drop_probability <= 1.0:
            raise ValueError("drop_probability must be within [0, 1]")
        if self.latency_ms < 0 or self.jitter_ms < 0:
            raise ValueError("latency and jitter must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "LinkProfile":
        """Parse the CLI form 'drop:latency:jitter', e.g. '0.3:120:40'."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("profile must look like drop:latency_ms:jitter_ms")
        return cls(float(parts[0]), int(parts[1]), int(parts[2]))


def _raise_for_error(status: int, body: bytes) -> None:
    try:
        data = json.loads(body)
    except (ValueError, UnicodeDecodeError):
        data = {}
    name = data.get("error", "")
    message = data.get("message", f"server returned HTTP {status}")
    klass = getattr(errors, name, None)
    if klass is errors.ValidationFailed:
        raise errors.ValidationFailed(data.get("violations") or [message])
    if isinstance(klass, type) and issubclass(klass, FieldAlertError):
        raise klass(message)
    raise FieldAlertError(f"HTTP {status}: {message}")


class ServerClient:
    """Blocking JSON client; raises the same error types the server does."""

    def __init__(self, base_url: str, timeout_s: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s

    def _request(self, method: str, path: str, body: bytes | None = None,
                 content_type: str = "application/json",
                 headers: dict[str, str] | None = None,
                 timeout_s: float | None = None) -> bytes:
        request = urllib.request.Request(
            self.base_url + path, data=body, method=method)
        if body is not None:
            request.add_header("Content-Type", content_type)
        for name, value in (headers or {}).items():
            request.add_header(name, value)
        try:
            with urllib.request.urlopen(
                    request, timeout=timeout_s or self.timeout_s) as response:
                return response.read()
        except urllib.error.HTTPError as exc:
            _raise_for_error(exc.code, exc.read())
        except urllib.error.URLError as exc:
            raise TransportError(f"cannot reach server: {exc.reason}") from exc
        except TimeoutError as exc:
            raise TransportError("request timed out") from exc
        raise AssertionError("unreachable")

    def _json(self, method: str, path: str, payload: dict | None = None,
              timeout_s: float | None = None) -> dict[str, Any]:
        body = None
        if payload is not None:
            body = json.dumps(payload).encode("utf-8")
        return json.loads(self._request(method, path, body, timeout_s=timeout_s))

    # ----------------------------------------------------------- endpoints

    def health(self) -> dict[str, Any]:
        return self._json("GET", "/health")

    def submit(self, report: DisasterReport, idempotency_key: str = "") -> str:
        data = self._json("POST", "/reports", {
            "report": report.to_dict(),
            "idempotency_key": idempotency_key,
        })
        return data["id"]

    def get_view(self, report_id: str) -> dict[str, Any]:
        return self._json("GET", f"/reports/{report_id}")

    def get_report(self, report_id: str) -> DisasterReport:
        return DisasterReport.from_dict(self.get_view(report_id)["report"])

    def list_reports(self, **filters: str) -> list[DisasterReport]:
        query = "&".join(f"{k}={v}" for k, v in filters.items() if v)
        path = "/reports" + (f"?{query}" if query else "")
        return [DisasterReport.from_dict(d)
                for d in self._json("GET", path)["reports"]]

    def action(self, report_id: str, actor: str, action: str,
               params: dict | None = None) -> dict[str, Any]:
        return self._json("POST", f"/reports/{report_id}/actions", {
            "actor": actor, "action": action, "params": params or {},
        })

    def verify(self, report_id: str, actor: str, note: str = "") -> dict[str, Any]:
        return self._json("POST", f"/reports/{report_id}/verify",
                          {"actor": actor, "note": note})

    def reliability(self, report_id: str) -> dict[str, Any]:
        return self._json("GET", f"/reports/{report_id}/reliability")

    def subscribe(self, subscriber: str, topics: list[str]) -> dict[str, Any]:
        return self._json("POST", "/subscriptions",
                          {"subscriber": subscriber, "topics": topics})

    def poll(self, subscriber: str, cursors: dict[str, int] | None = None,
             timeout_ms: int = 0,
             topics: list[str] | None = None) -> list[PushMessage]:
        data = self._json("POST", "/poll", {
            "subscriber": subscriber,
            "cursors": cursors or {},
            "timeout_ms": timeout_ms,
            "topics": topics or [],
        }, timeout_s=self.timeout_s + timeout_ms / 1000.0)
        return [PushMessage.from_dict(d) for d in data["messages"]]

    def export_cap(self, report_id: str) -> bytes:
        return self._request("GET", f"/reports/{report_id}/cap")

    def import_cap(self, xml: bytes, idempotency_key: str = "") -> str:
        data = self._request("POST", "/cap", xml,
                             content_type="application/xml",
                             headers={"Idempotency-Key": idempotency_key})
        return json.loads(data)["id"]

    def directory(self) -> list[Actor]:
        return [Actor.from_dict(d)
                for d in self._json("GET", "/directory")["actors"]]

    def locate(self, lat: float, lon: float) -> dict[str, Any]:
        return self._json("GET", f"/locate?lat={lat}&lon={lon}")

    def legality(self) -> dict[str, Any]:
        return self._json("GET", "/legality")["matrix"]


class LossyLink:
    """Wraps calls in the simulated drop/latency behavior of a LinkProfile."""

    def __init__(self, profile: LinkProfile, rng: random.Random | None = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.profile = profile
        self.rng = rng or random.Random()
        self.sleep = sleep

    def call(self, fn: Callable[..., Any], *args: Any, **kwargs: Any) -> Any:
        if self.profile.latency_ms or self.profile.jitter_ms:
            jitter = self.rng.uniform(0, self.profile.jitter_ms)
            self.sleep((self.profile.latency_ms + jitter) / 1000.0)
        if self.rng.random() < self.profile.drop_probability:
            if self.rng.random() < 0.5:
                raise LinkDropped("request lost before reaching the server")
            fn(*args, **kwargs)
            raise LinkDropped("response lost on the way back")
        return fn(*args, **kwargs)


def submit_with_retry(client: ServerClient, report: DisasterReport,
                      idempotency_key: str, link: LossyLink | None = None,
                      max_attempts: int = 8,
                      sleep: Callable[[float], None] = time.sleep) -> str:
    """Submit until the server's answer arrives, reusing one key throughout."""
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")
    delays = backoff_delays_ms(max_attempts)
    for attempt in range(max_attempts):
        try:
            if link is None:
                return client.submit(report, idempotency_key)
            return link.call(client.submit, report, idempotency_key)
        except TransportError:
            if attempt == max_attempts - 1:
                break
            sleep(delays[attempt] / 1000.0)
    raise Unreachable(f"submission failed after {max_attempts} attempts")


def load_cursors(path: str | Path) -> dict[str, int]:
    try:
        with open(path, encoding="utf-8") as fh:
            return {k: int(v) for k, v in json.load(fh).items()}
    except FileNotFoundError:
        return {}


def save_cursors(path: str | Path, cursors: dict[str, int]) -> None:
    Path(path).write_text(json.dumps(cursors, sort_keys=True), encoding="utf-8")


def watch(client: ServerClient, subscriber: str, topics: list[str],
          cursor_path: str | Path, poll_timeout_ms: int = 10_000,
          link: LossyLink | None = None, max_rounds: int | None = None,
          sleep: Callable[[float], None] = time.sleep) -> Iterator[PushMessage]:
    """Yield push messages in per-topic order, resuming across restarts.

    The cursor file advances after the consumer finishes with a message,
    so a restart re-fetches nothing already handled and skips nothing.
    Transport failures retry forever with capped backoff.
    """
    cursors = load_cursors(cursor_path)
    rounds = 0
    failures = 0
    while max_rounds is None or rounds < max_rounds:
        rounds += 1
        try:
            if link is None:
                messages = client.poll(subscriber, cursors=cursors,
                                       topics=topics, timeout_ms=poll_timeout_ms)
            else:
                messages = link.call(client.poll, subscriber, cursors=cursors,
                                     topics=topics, timeout_ms=poll_timeout_ms)
        except TransportError:
            delay = min(BACKOFF_CAP_MS, BACKOFF_BASE_MS * BACKOFF_FACTOR ** failures)
            failures += 1
            sleep(delay / 1000.0)
            continue
        failures = 0
        for message in messages:
            yield message
            cursors[message.topic] = max(cursors.get(message.topic, 0),
                                         message.seq)
            save_cursors(cursor_path, cursors)
