"""Event-sourced alert server.

Every mutation is recorded as an AuditEvent and all state changes happen
inside ``_apply``, the single interpreter those events pass through,
live or replayed. Replaying a log therefore reconstructs the exact
report store, verification ledger, and per-topic push logs that emitted
it; ``snapshot`` returns canonical bytes for comparing the two.

Concurrency: one lock guards all state; a condition variable wakes
long-polls. No operation holds the lock across a network wait (polls
wait on the condition, which releases it).
"""

from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Iterable

from ..cap import cap_to_report, parse_cap, report_to_cap, serialize_cap
from ..errors import (
    CorruptLog,
    DuplicateVerification,
    Forbidden,
    IllegalTransition,
    MergeCycle,
    ReportClosed,
    UnknownRegion,
    UnknownReport,
    UnknownSubscriber,
    ValidationFailed,
)
from ..geo import AdminHierarchy
from ..model import (
    ACTION_VERIFY,
    GAU_ROLES,
    LEGAL_TRANSITIONS,
    OFFICIAL_ROLES,
    PROCESS_ACTIONS,
    TERMINAL_STATES,
    Actor,
    DisasterReport,
    LifecycleState,
    Role,
    Severity,
    details_from_dict,
    legal_actions,
    transition,
    validate_report,
)
from ..routing import ActorDirectory, notification_set
from ..verification import VerificationLedger, VerificationRecord
from .config import ServerConfig
from .events import (
    SYSTEM_ACTOR,
    AuditAction,
    AuditEvent,
    PushMessage,
    encode_summary,
    read_log,
)

_SERVER_ID_RE = re.compile(r"r-(\d+)")

#: Update may touch these report fields and nothing else.
_UPDATABLE_FIELDS = frozenset({"description", "severity", "reporter_phone", "details"})


@dataclass
class Subscription:
    subscriber: str
    topics: set[str]
    cursor: dict[str, int] = field(default_factory=dict)


class AlertServer:
    def __init__(self, hierarchy: AdminHierarchy, directory: ActorDirectory,
                 config: ServerConfig | None = None, log_path: str | Path | None = None,
                 clock: Callable[[], datetime] | None = None):
        self.hierarchy = hierarchy
        self.directory = directory
        self.config = config or ServerConfig()
        self._clock = clock or (lambda: datetime.now(timezone.utc))
        self._lock = threading.RLock()
        self._cond = threading.Condition(self._lock)

        self._reports: dict[str, DisasterReport] = {}
        self._ledger = VerificationLedger(self.config.official_weight,
                                          self.config.user_weight)
        self._topic_logs: dict[str, list[PushMessage]] = {}
        self._events: list[AuditEvent] = []
        self._seq = 0
        self._idempotency: dict[str, str] = {}
        self._responsible: dict[str, str] = {}
        self._report_topics: dict[str, tuple[str, ...]] = {}
        self._notified_reports: set[str] = set()
        self._subscriptions: dict[str, Subscription] = {}
        self._next_id = 1

        self._log_fh = None
        if log_path:
            self._log_fh = open(log_path, "a", encoding="utf-8")

    # ------------------------------------------------------------ lifecycle

    def close(self) -> None:
        with self._lock:
            if self._log_fh:
                self._log_fh.close()
                self._log_fh = None

    def bind_log(self, path: str | Path) -> None:
        """Start appending events to a log file (used after replay)."""
        with self._lock:
            if self._log_fh:
                self._log_fh.close()
            self._log_fh = open(path, "a", encoding="utf-8")

    def __enter__(self) -> "AlertServer":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # ------------------------------------------------------- event plumbing

    def _emit(self, actor: str, action: AuditAction, report_id: str,
              payload: dict[str, Any]) -> AuditEvent:
        # Caller holds the lock. Apply first: a failed apply records nothing.
        event = AuditEvent(self._seq + 1, actor, action, report_id,
                           self._clock(), payload)
        self._apply(event)
        self._seq = event.seq
        self._events.append(event)
        if self._log_fh:
            self._log_fh.write(event.to_line() + "\n")
            self._log_fh.flush()
        return event

    def _apply(self, event: AuditEvent) -> None:
        """Interpret one event. The only place server state mutates."""
        action = event.action
        rid = event.report_id

        if action is AuditAction.SUBMIT:
            report = DisasterReport.from_dict(event.payload["report"])
            self._reports[report.id] = report
            self._ledger.track(report.id)
            key = event.payload.get("idempotency_key")
            if key:
                self._idempotency[key] = report.id
            m = _SERVER_ID_RE.fullmatch(report.id)
            if m:
                self._next_id = max(self._next_id, int(m.group(1)) + 1)

        elif action is AuditAction.DISTRIBUTE:
            self._reports[rid] = transition(self._reports[rid],
                                             LifecycleState.DISTRIBUTED)
            self._responsible[rid] = event.payload["routing"]["responsible"]
            self._report_topics[rid] = tuple(event.payload["topics"])
            self._push_report(rid)

        elif action is AuditAction.REVIEW:
            self._reports[rid] = transition(self._reports[rid],
                                             LifecycleState.UNDER_REVIEW)
            self._push_report(rid)

        elif action is AuditAction.VERIFY:
            role = Role(event.payload["role"])
            verifier = Actor(actor_id=event.actor, role=role, unit_id="")
            self._ledger.add(rid, verifier, note=event.payload.get("note", ""),
                             timestamp=event.timestamp)
            report = self._reports[rid]
            if role in OFFICIAL_ROLES and report.state in (
                    LifecycleState.DISTRIBUTED, LifecycleState.UNDER_REVIEW):
                if report.state is LifecycleState.DISTRIBUTED:
                    report = transition(report, LifecycleState.UNDER_REVIEW)
                self._reports[rid] = transition(report, LifecycleState.VERIFIED)
                self._push_report(rid)

        elif action is AuditAction.ASSIGN:
            target = event.payload["target"]
            self._responsible[rid] = target
            topics = self._report_topics.get(rid, ())
            if target not in topics:
                self._report_topics[rid] = topics + (target,)
            self._push_report(rid)

        elif action is AuditAction.MERGE:
            winner_id = event.payload["into"]
            self._reports[rid] = transition(self._reports[rid],
                                             LifecycleState.MERGED,
                                             merged_into=winner_id)
            self._ledger.merge_into(rid, winner_id)
            self._push_report(rid)

        elif action is AuditAction.RESOLVE:
            self._reports[rid] = transition(self._reports[rid],
                                             LifecycleState.RESOLVED)
            self._push_report(rid)

        elif action is AuditAction.UPDATE:
            changes: dict[str, Any] = {}
            fields = event.payload.get("fields", {})
            if "description" in fields:
                changes["description"] = str(fields["description"])
            if "reporter_phone" in fields:
                changes["reporter_phone"] = str(fields["reporter_phone"])
            if "severity" in fields:
                changes["severity"] = Severity(fields["severity"])
            if "details" in fields:
                changes["details"] = details_from_dict(fields["details"])
            if changes:
                self._reports[rid] = replace(self._reports[rid], **changes)
            self._push_report(rid)

        elif action is AuditAction.ATTACH_DOCUMENT:
            report = self._reports[rid]
            self._reports[rid] = replace(
                report, attachments=report.attachments + (event.payload["ref"],))
            self._push_report(rid)

        elif action is AuditAction.NOTIFY:
            self._notified_reports.add(rid)
            summary = encode_summary(self._reports[rid],
                                     extra={"notice": "processed"})
            self._publish(event.payload["topic"], summary)

        else:  # pragma: no cover - enum is closed
            raise CorruptLog(f"unknown action {action!r}")

    def _publish(self, topic: str, summary: dict[str, Any]) -> None:
        log = self._topic_logs.setdefault(topic, [])
        log.append(PushMessage(topic=topic, seq=len(log) + 1, alert_summary=summary))

    def _push_report(self, rid: str, extra: dict[str, Any] | None = None) -> None:
        summary = encode_summary(self._reports[rid], extra)
        for topic in self._report_topics.get(rid, ()):
            self._publish(topic, summary)

    # ------------------------------------------------------------ queries

    def _get(self, report_id: str) -> DisasterReport:
        try:
            return self._reports[report_id]
        except KeyError:
            raise UnknownReport(f"no report '{report_id}'") from None

    def get_report(self, report_id: str) -> DisasterReport:
        with self._lock:
            return self._get(report_id)

    def report_count(self) -> int:
        with self._lock:
            return len(self._reports)

    def list_reports(self, kind: str | None = None, state: str | None = None,
                     severity: str | None = None, province: str | None = None,
                     district: str | None = None,
                     bbox: tuple[float, float, float, float] | None = None,
                     ) -> list[DisasterReport]:
        with self._lock:
            out = []
            for rid in sorted(self._reports):
                r = self._reports[rid]
                if kind and r.kind.value != kind:
                    continue
                if state and r.state.value != state:
                    continue
                if severity and r.severity.value != severity:
                    continue
                if province and r.province_id != province:
                    continue
                if district and r.district_id != district:
                    continue
                if bbox:
                    min_lat, min_lon, max_lat, max_lon = bbox
                    if not (min_lat <= r.location.lat <= max_lat
                            and min_lon <= r.location.lon <= max_lon):
                        continue
                out.append(r)
            return out

    def responsible_for(self, report_id: str) -> str:
        with self._lock:
            self._get(report_id)
            return self._responsible.get(report_id, "")

    def topics_for(self, report_id: str) -> tuple[str, ...]:
        with self._lock:
            self._get(report_id)
            return self._report_topics.get(report_id, ())

    def audit_events(self) -> list[AuditEvent]:
        with self._lock:
            return list(self._events)

    def topic_log(self, topic: str) -> list[PushMessage]:
        with self._lock:
            return list(self._topic_logs.get(topic, []))

    # --------------------------------------------------------- submission

    def submit_report(self, report: DisasterReport, idempotency_key: str = "") -> str:
        with self._cond:
            if idempotency_key and idempotency_key in self._idempotency:
                return self._idempotency[idempotency_key]

            prepared = replace(report, state=LifecycleState.SUBMITTED,
                               merged_into=None)
            result = validate_report(prepared, self.hierarchy)
            if not result.ok:
                raise ValidationFailed(result.violations)

            if prepared.id and prepared.id not in self._reports:
                rid = prepared.id
            else:
                rid = f"r-{self._next_id:06d}"
            prepared = replace(prepared, id=rid)

            routing = notification_set(prepared, self.hierarchy, self.directory,
                                       self.config.neighbor_radius_m)
            # Units first, then villages; INGOs listen on the province topic.
            topics = list(dict.fromkeys(
                list(routing.notified_units) + list(routing.neighbor_villages)))

            self._emit(prepared.reporter, AuditAction.SUBMIT, rid, {
                "report": prepared.to_dict(),
                "idempotency_key": idempotency_key,
            })
            self._emit(SYSTEM_ACTOR, AuditAction.DISTRIBUTE, rid, {
                "routing": routing.to_dict(),
                "topics": topics,
            })
            self._cond.notify_all()
            return rid

    # ------------------------------------------------------- verification

    def verify(self, report_id: str, verifier_id: str,
               note: str = "") -> VerificationRecord:
        with self._cond:
            actor = self.directory.get(verifier_id)
            report = self._get(report_id)
            if report.state in TERMINAL_STATES:
                raise ReportClosed(
                    f"report '{report_id}' is {report.state.value}")
            if any(r.verifier == verifier_id
                   for r in self._ledger.records(report_id)):
                raise DuplicateVerification(
                    f"'{verifier_id}' already verified report '{report_id}'")
            self._emit(verifier_id, AuditAction.VERIFY, report_id,
                       {"role": actor.role.value, "note": note})
            self._cond.notify_all()
            return self._ledger.records(report_id)[-1]

    def reliability(self, report_id: str) -> tuple[int, int, float]:
        with self._lock:
            self._get(report_id)
            return self._ledger.reliability(report_id)

    def verification_records(self, report_id: str) -> tuple[VerificationRecord, ...]:
        with self._lock:
            self._get(report_id)
            return self._ledger.records(report_id)

    def auto_distribution_eligible(self, report_id: str,
                                   threshold: float | None = None) -> bool:
        with self._lock:
            self._get(report_id)
            limit = self.config.auto_threshold if threshold is None else threshold
            return self._ledger.eligible(report_id, limit)

    # --------------------------------------------------- admin processing

    def process_report(self, report_id: str, actor_id: str, action: str,
                       params: dict[str, Any] | None = None) -> DisasterReport:
        params = params or {}
        with self._cond:
            actor = self.directory.get(actor_id)
            report = self._get(report_id)
            if actor.role not in GAU_ROLES:
                raise Forbidden(
                    f"role {actor.role.value} may not perform admin actions")
            if action == ACTION_VERIFY or action not in PROCESS_ACTIONS:
                raise ValueError(f"not an admin action: '{action}'")
            if action not in legal_actions(actor.role, report.state):
                raise IllegalTransition(
                    f"action {action} is not legal in state {report.state.value}")

            audit_action = AuditAction(action)
            event_report_id = report_id
            payload: dict[str, Any] = {}

            if audit_action is AuditAction.ASSIGN:
                target = params.get("target")
                if not target:
                    raise ValidationFailed(["assign requires a target unit"])
                if not self.hierarchy.knows_unit(target):
                    raise UnknownRegion(f"no unit '{target}' in the hierarchy")
                payload = {"target": target}

            elif audit_action is AuditAction.MERGE:
                event_report_id, payload = self._prepare_merge(report_id, params)

            elif audit_action is AuditAction.UPDATE:
                payload = self._prepare_update(report, params)

            elif audit_action is AuditAction.ATTACH_DOCUMENT:
                ref = params.get("ref")
                if not ref:
                    raise ValidationFailed(["attach requires a document ref"])
                payload = {"ref": str(ref)}

            first_action = event_report_id not in self._notified_reports
            acted = self._reports[event_report_id]
            self._emit(actor_id, audit_action, event_report_id, payload)
            if first_action:
                self._emit(SYSTEM_ACTOR, AuditAction.NOTIFY, event_report_id,
                           {"topic": acted.reporter})
            self._cond.notify_all()
            return self._reports[report_id]

    def _prepare_merge(self, report_id: str,
                       params: dict[str, Any]) -> tuple[str, dict[str, Any]]:
        # "into": the acted report loses. "with": direction by age, older wins.
        report = self._reports[report_id]
        if "into" in params:
            loser_id, winner_id = report_id, str(params["into"])
        elif "with" in params:
            other_id = str(params["with"])
            other = self._get(other_id)
            if (other.created_at, other.id) <= (report.created_at, report.id):
                loser_id, winner_id = report_id, other_id
            else:
                loser_id, winner_id = other_id, report_id
        else:
            raise ValidationFailed(["merge requires 'into' or 'with'"])

        if loser_id == winner_id:
            raise MergeCycle("cannot merge a report into itself")
        winner = self._get(winner_id)
        if winner.state is LifecycleState.MERGED:
            raise MergeCycle(
                f"report '{winner_id}' is already merged into '{winner.merged_into}'")
        loser = self._get(loser_id)
        if LifecycleState.MERGED not in LEGAL_TRANSITIONS[loser.state]:
            raise IllegalTransition(
                f"merge is not legal in state {loser.state.value}")
        return loser_id, {"into": winner_id}

    def _prepare_update(self, report: DisasterReport,
                        params: dict[str, Any]) -> dict[str, Any]:
        fields = dict(params.get("fields", {}))
        note = params.get("note", "")
        unknown = set(fields) - _UPDATABLE_FIELDS
        if unknown:
            raise ValidationFailed(
                [f"update may not change '{k}'" for k in sorted(unknown)])

        candidate_changes: dict[str, Any] = {}
        violations: list[str] = []
        if "severity" in fields:
            try:
                candidate_changes["severity"] = Severity(fields["severity"])
            except ValueError:
                violations.append(f"unknown severity '{fields['severity']}'")
        if "details" in fields:
            try:
                details = details_from_dict(fields["details"])
            except (KeyError, ValueError, TypeError):
                violations.append("malformed details payload")
            else:
                if details.kind is not report.kind:
                    violations.append("update may not change the report kind")
                else:
                    candidate_changes["details"] = details
        if "description" in fields:
            candidate_changes["description"] = str(fields["description"])
        if "reporter_phone" in fields:
            candidate_changes["reporter_phone"] = str(fields["reporter_phone"])
        if violations:
            raise ValidationFailed(violations)

        candidate = replace(report, **candidate_changes)
        result = validate_report(candidate, self.hierarchy)
        if not result.ok:
            raise ValidationFailed(result.violations)
        payload: dict[str, Any] = {"fields": fields}
        if note:
            payload["note"] = str(note)
        return payload

    # ---------------------------------------------------------- push/poll

    def register_subscription(self, subscriber_id: str,
                              topics: Iterable[str]) -> Subscription:
        with self._lock:
            sub = self._subscriptions.get(subscriber_id)
            if sub is None:
                sub = Subscription(subscriber_id, set(topics))
                self._subscriptions[subscriber_id] = sub
            else:
                sub.topics |= set(topics)
            return sub

    def poll(self, subscriber_id: str, cursors: dict[str, int] | None = None,
             timeout_ms: int = 0,
             topics: Iterable[str] | None = None) -> list[PushMessage]:
        deadline = time.monotonic() + max(timeout_ms, 0) / 1000.0
        with self._cond:
            sub = self._subscriptions.get(subscriber_id)
            if sub is None:
                actor = self.directory.maybe(subscriber_id)
                if actor is None:
                    raise UnknownSubscriber(
                        f"'{subscriber_id}' has no subscription and is not "
                        "in the directory")
                # Directory actors implicitly follow their unit and own id.
                sub = Subscription(subscriber_id,
                                   {actor.unit_id, actor.actor_id})
                self._subscriptions[subscriber_id] = sub
            if topics:
                sub.topics |= set(topics)

            effective = dict(sub.cursor)
            if cursors:
                effective.update({t: int(s) for t, s in cursors.items()})

            while True:
                messages = self._collect(sub.topics, effective)
                if messages:
                    break
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                self._cond.wait(remaining)

            for message in messages:
                current = sub.cursor.get(message.topic, 0)
                sub.cursor[message.topic] = max(current, message.seq)
            return messages

    def _collect(self, topics: set[str],
                 cursors: dict[str, int]) -> list[PushMessage]:
        out: list[PushMessage] = []
        for topic in sorted(topics):
            log = self._topic_logs.get(topic)
            if not log:
                continue
            cursor = cursors.get(topic, 0)
            if cursor < len(log):
                out.extend(log[cursor:])
        return out

    # ------------------------------------------------------------ CAP I/O

    def export_cap(self, report_id: str, sender_id: str = "") -> bytes:
        with self._lock:
            report = self._get(report_id)
        source = ""
        if sender_id:
            actor = self.directory.maybe(sender_id)
            if actor is not None:
                source = f"{actor.name}; {actor.phone}; {actor.unit_id}"
            else:
                source = sender_id
        return serialize_cap(report_to_cap(report, sender=sender_id, source=source))

    def import_cap(self, xml: bytes | str, idempotency_key: str = "") -> str:
        alert = parse_cap(xml)
        report = cap_to_report(alert, self.hierarchy)
        return self.submit_report(report, idempotency_key)

    # -------------------------------------------------- replay & snapshot

    @classmethod
    def replay(cls, events: Iterable[AuditEvent], hierarchy: AdminHierarchy,
               directory: ActorDirectory,
               config: ServerConfig | None = None) -> "AlertServer":
        server = cls(hierarchy, directory, config)
        expected = 0
        for event in events:
            expected += 1
            if event.seq != expected:
                raise CorruptLog(
                    f"sequence gap: expected {expected}, found {event.seq}")
            server._apply(event)
            server._events.append(event)
            server._seq = event.seq
        return server

    @classmethod
    def replay_file(cls, path: str | Path, hierarchy: AdminHierarchy,
                    directory: ActorDirectory,
                    config: ServerConfig | None = None) -> "AlertServer":
        return cls.replay(read_log(path), hierarchy, directory, config)

    def snapshot(self) -> bytes:
        """Canonical encoding of all replay-derived state."""
        with self._lock:
            state = {
                "seq": self._seq,
                "next_id": self._next_id,
                "reports": {rid: r.to_dict()
                            for rid, r in sorted(self._reports.items())},
                "responsible": dict(sorted(self._responsible.items())),
                "report_topics": {rid: list(t) for rid, t
                                  in sorted(self._report_topics.items())},
                "ledger": self._ledger.to_dict(),
                "topics": {t: [m.to_dict() for m in log]
                           for t, log in sorted(self._topic_logs.items())},
                "idempotency": dict(sorted(self._idempotency.items())),
                "notified": sorted(self._notified_reports),
            }
            return json.dumps(state, sort_keys=True,
                              ensure_ascii=False).encode("utf-8")
