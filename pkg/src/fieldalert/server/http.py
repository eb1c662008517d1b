"""HTTP front door for the alert server.

Thin translation layer: JSON in, JSON out, domain errors mapped to
stable status codes. All behavior lives in core.AlertServer; handlers
never touch server state directly.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any
from urllib.parse import parse_qs, urlparse

from ..errors import (
    CapError,
    DuplicateVerification,
    FieldAlertError,
    Forbidden,
    IllegalTransition,
    MalformedXml,
    MergeCycle,
    MissingLocation,
    OutOfCoverage,
    ReportClosed,
    SchemaViolation,
    UnknownActor,
    UnknownRegion,
    UnknownReport,
    UnknownSubscriber,
    ValidationFailed,
)
from ..model import GeoPoint, DisasterReport, legality_matrix
from .core import AlertServer

_STATUS_BY_ERROR: list[tuple[type[Exception], int]] = [
    (ValidationFailed, 422),
    (Forbidden, 403),
    (UnknownReport, 404),
    (UnknownActor, 404),
    (UnknownRegion, 404),
    (UnknownSubscriber, 404),
    (OutOfCoverage, 404),
    (IllegalTransition, 409),
    (DuplicateVerification, 409),
    (ReportClosed, 409),
    (MergeCycle, 409),
    (MalformedXml, 400),
    (SchemaViolation, 400),
    (MissingLocation, 400),
    (CapError, 400),
]


def _status_for(exc: Exception) -> int:
    for klass, status in _STATUS_BY_ERROR:
        if isinstance(exc, klass):
            return status
    return 400 if isinstance(exc, (ValueError, KeyError, TypeError)) else 500


def _error_body(exc: Exception) -> dict[str, Any]:
    body: dict[str, Any] = {
        "error": type(exc).__name__,
        "message": str(exc),
    }
    if isinstance(exc, ValidationFailed):
        body["violations"] = exc.violations
    return body


def _report_view(server: AlertServer, report: DisasterReport) -> dict[str, Any]:
    official, user, score = server.reliability(report.id)
    return {
        "report": report.to_dict(),
        "responsible": server.responsible_for(report.id),
        "topics": list(server.topics_for(report.id)),
        "reliability": {"official": official, "user": user, "score": score},
    }


class _Handler(BaseHTTPRequestHandler):
    server_version = "fieldalert"
    alert_server: AlertServer  # set by make_http_server

    # ------------------------------------------------------------- plumbing

    def log_message(self, format: str, *args: Any) -> None:
        pass  # request logging is the audit log's job, not stderr's

    def _send(self, status: int, body: bytes,
              content_type: str = "application/json") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers",
                         "Content-Type, Idempotency-Key")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload: Any) -> None:
        self._send(status, json.dumps(payload).encode("utf-8"))

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _read_json(self) -> dict[str, Any]:
        raw = self._read_body()
        if not raw:
            return {}
        data = json.loads(raw)
        if not isinstance(data, dict):
            raise ValueError("request body must be a JSON object")
        return data

    def do_OPTIONS(self) -> None:  # CORS preflight
        self._send(204, b"")

    # --------------------------------------------------------------- routes

    def do_GET(self) -> None:
        try:
            url = urlparse(self.path)
            query = {k: v[0] for k, v in parse_qs(url.query).items()}
            parts = [p for p in url.path.split("/") if p]
            self._route_get(parts, query)
        except Exception as exc:
            self._send_json(_status_for(exc), _error_body(exc))

    def do_POST(self) -> None:
        try:
            url = urlparse(self.path)
            query = {k: v[0] for k, v in parse_qs(url.query).items()}
            parts = [p for p in url.path.split("/") if p]
            self._route_post(parts, query)
        except Exception as exc:
            self._send_json(_status_for(exc), _error_body(exc))

    def _route_get(self, parts: list[str], query: dict[str, str]) -> None:
        server = self.alert_server

        if parts == ["health"]:
            self._send_json(200, {"status": "ok",
                                  "reports": server.report_count()})
        elif parts == ["reports"]:
            bbox = None
            if "bbox" in query:
                values = [float(x) for x in query["bbox"].split(",")]
                if len(values) != 4:
                    raise ValueError("bbox needs min_lat,min_lon,max_lat,max_lon")
                bbox = (values[0], values[1], values[2], values[3])
            reports = server.list_reports(
                kind=query.get("kind"), state=query.get("state"),
                severity=query.get("severity"), province=query.get("province"),
                district=query.get("district"), bbox=bbox)
            self._send_json(200, {"reports": [r.to_dict() for r in reports]})
        elif len(parts) == 2 and parts[0] == "reports":
            report = server.get_report(parts[1])
            self._send_json(200, _report_view(server, report))
        elif len(parts) == 3 and parts[0] == "reports" and parts[2] == "cap":
            xml = server.export_cap(parts[1], sender_id=query.get("sender", ""))
            self._send(200, xml, content_type="application/xml")
        elif len(parts) == 3 and parts[0] == "reports" and parts[2] == "reliability":
            official, user, score = server.reliability(parts[1])
            self._send_json(200, {"official": official, "user": user,
                                  "score": score})
        elif parts == ["directory"]:
            self._send_json(200, {"actors": server.directory.to_list()})
        elif parts == ["legality"]:
            self._send_json(200, {"matrix": legality_matrix()})
        elif parts == ["locate"]:
            point = GeoPoint(float(query["lat"]), float(query["lon"]))
            located = server.hierarchy.locate(point)
            self._send_json(200, {"province_id": located.province_id,
                                  "district_id": located.district_id,
                                  "kumban_id": located.kumban_id})
        elif parts == ["audit"]:
            after = int(query.get("after", 0))
            events = [e.to_dict() for e in server.audit_events()
                      if e.seq > after]
            self._send_json(200, {"events": events})
        else:
            self._send_json(404, {"error": "NoSuchRoute",
                                  "message": f"no route for {self.path}"})

    def _route_post(self, parts: list[str], query: dict[str, str]) -> None:
        server = self.alert_server

        if parts == ["reports"]:
            body = self._read_json()
            report = DisasterReport.from_dict(body["report"])
            key = body.get("idempotency_key", "")
            rid = server.submit_report(report, key)
            self._send_json(201, {"id": rid})
        elif len(parts) == 3 and parts[0] == "reports" and parts[2] == "actions":
            body = self._read_json()
            actor = body["actor"]
            action = body["action"]
            params = body.get("params") or {}
            if action == "Verify":
                server.verify(parts[1], actor, note=params.get("note", ""))
                report = server.get_report(parts[1])
            else:
                report = server.process_report(parts[1], actor, action, params)
            self._send_json(200, _report_view(server, report))
        elif len(parts) == 3 and parts[0] == "reports" and parts[2] == "verify":
            body = self._read_json()
            record = server.verify(parts[1], body["actor"],
                                   note=body.get("note", ""))
            report = server.get_report(parts[1])
            view = _report_view(server, report)
            view["record"] = record.to_dict()
            self._send_json(200, view)
        elif parts == ["poll"]:
            body = self._read_json()
            messages = server.poll(
                body["subscriber"],
                cursors=body.get("cursors"),
                timeout_ms=int(body.get("timeout_ms", 0)),
                topics=body.get("topics"),
            )
            self._send_json(200, {"messages": [m.to_dict() for m in messages]})
        elif parts == ["subscriptions"]:
            body = self._read_json()
            sub = server.register_subscription(body["subscriber"],
                                               body.get("topics") or [])
            self._send_json(200, {"subscriber": sub.subscriber,
                                  "topics": sorted(sub.topics)})
        elif parts == ["cap"]:
            xml = self._read_body()
            key = (self.headers.get("Idempotency-Key")
                   or query.get("idempotency_key", ""))
            rid = server.import_cap(xml, key)
            self._send_json(201, {"id": rid})
        else:
            self._send_json(404, {"error": "NoSuchRoute",
                                  "message": f"no route for {self.path}"})


def make_http_server(alert_server: AlertServer, host: str = "127.0.0.1",
                     port: int = 0) -> ThreadingHTTPServer:
    """Bind an HTTP server; port 0 picks a free port (see server_address)."""

    class Handler(_Handler):
        pass

    Handler.alert_server = alert_server
    httpd = ThreadingHTTPServer((host, port), Handler)
    httpd.daemon_threads = True
    return httpd
