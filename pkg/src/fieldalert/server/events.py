"""Audit events and push messages: the server's only forms of output.

The audit log is the source of truth. Every record lands on disk as one
line, sequence number first, so a partial write is detectable and the
file is greppable. Push summaries are size-capped JSON so they stay
cheap on narrow mobile links.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Iterator

from ..errors import CorruptLog
from ..model import DisasterReport, parse_timestamp

#: Hard ceiling for an encoded alert summary.
MAX_SUMMARY_BYTES = 512

#: Actor id recorded on events the server emits on its own behalf.
SYSTEM_ACTOR = "server"


class AuditAction(str, Enum):
    SUBMIT = "Submit"
    DISTRIBUTE = "Distribute"
    REVIEW = "Review"
    VERIFY = "Verify"
    ASSIGN = "Assign"
    MERGE = "Merge"
    RESOLVE = "Resolve"
    UPDATE = "Update"
    ATTACH_DOCUMENT = "AttachDocument"
    NOTIFY = "Notify"


#: Actions a GAU takes through process_report (Verify has its own path,
#: Submit/Distribute/Notify belong to the submission pipeline).
PROCESS_AUDIT_ACTIONS = frozenset({
    AuditAction.REVIEW, AuditAction.ASSIGN, AuditAction.MERGE,
    AuditAction.RESOLVE, AuditAction.UPDATE, AuditAction.ATTACH_DOCUMENT,
})


@dataclass(frozen=True)
class AuditEvent:
    seq: int
    actor: str
    action: AuditAction
    report_id: str
    timestamp: datetime
    payload: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "actor": self.actor,
            "action": self.action.value,
            "report_id": self.report_id,
            "timestamp": self.timestamp.isoformat(),
            "payload": self.payload,
        }

    def to_line(self) -> str:
        body = {
            "actor": self.actor,
            "action": self.action.value,
            "report_id": self.report_id,
            "timestamp": self.timestamp.isoformat(),
            "payload": self.payload,
        }
        return f"{self.seq}\t" + json.dumps(body, separators=(",", ":"),
                                            ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_line(cls, line: str) -> "AuditEvent":
        try:
            seq_text, body_text = line.split("\t", 1)
            body = json.loads(body_text)
            return cls(
                seq=int(seq_text),
                actor=body["actor"],
                action=AuditAction(body["action"]),
                report_id=body["report_id"],
                timestamp=parse_timestamp(body["timestamp"]),
                payload=body.get("payload", {}),
            )
        except (ValueError, KeyError, TypeError) as exc:
            raise CorruptLog(f"undecodable log record: {line[:120]!r}") from exc


def read_log(path: str | Path) -> Iterator[AuditEvent]:
    """Yield events from a log file, skipping blank lines."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line:
                yield AuditEvent.from_line(line)


@dataclass(frozen=True)
class PushMessage:
    """One entry on a topic's append-only log."""

    topic: str
    seq: int
    alert_summary: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"topic": self.topic, "seq": self.seq,
                "alert_summary": self.alert_summary}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PushMessage":
        return cls(topic=d["topic"], seq=int(d["seq"]),
                   alert_summary=d["alert_summary"])

    def encoded(self) -> bytes:
        return _dump(self.alert_summary).encode("utf-8")


def _dump(summary: dict[str, Any]) -> str:
    return json.dumps(summary, separators=(",", ":"), ensure_ascii=False,
                      sort_keys=True)


def encode_summary(report: DisasterReport,
                   extra: dict[str, Any] | None = None) -> dict[str, Any]:
    """Compact alert summary, clamped to MAX_SUMMARY_BYTES encoded.

    The headline gives way first, then attachment refs, then any extra
    keys; the identifying core (id, kind, severity, location, state) is
    never touched.
    """
    headline = report.description.splitlines()[0] if report.description else ""
    summary: dict[str, Any] = {
        "id": report.id,
        "kind": report.kind.value,
        "severity": report.severity.value,
        "state": report.state.value,
        "lat": report.location.lat,
        "lon": report.location.lon,
        "headline": headline[:160],
    }
    if report.attachments:
        summary["docs"] = list(report.attachments)
    if extra:
        summary.update(extra)

    while len(_dump(summary).encode("utf-8")) > MAX_SUMMARY_BYTES:
        if summary["headline"]:
            summary["headline"] = summary["headline"][:len(summary["headline"]) // 2]
        elif "docs" in summary:
            del summary["docs"]
        elif extra and any(k in summary for k in extra):
            for k in extra:
                summary.pop(k, None)
        else:
            raise ValueError("summary core exceeds the size cap")
    return summary
