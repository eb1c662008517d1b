"""Append-only record of who vouched for which report.

Office and INGO verifications count as official stamps; villager
verifications count as crowd support. The reliability score is a
weighted sum of both, recomputed from raw records on every read so the
counts can never drift from the stored truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any

from .errors import DuplicateVerification, UnknownReport
from .model import OFFICIAL_ROLES, Actor, Role

DEFAULT_OFFICIAL_WEIGHT = 3
DEFAULT_USER_WEIGHT = 1


@dataclass(frozen=True)
class VerificationRecord:
    report_id: str
    verifier: str
    verifier_role: Role
    timestamp: datetime
    note: str = ""

    @property
    def official(self) -> bool:
        return self.verifier_role in OFFICIAL_ROLES

    def to_dict(self) -> dict[str, Any]:
        return {
            "report_id": self.report_id,
            "verifier": self.verifier,
            "verifier_role": self.verifier_role.value,
            "timestamp": self.timestamp.isoformat(),
            "note": self.note,
        }


class VerificationLedger:
    """Per-report verification records; appends only, never mutates."""

    def __init__(self, official_weight: float = DEFAULT_OFFICIAL_WEIGHT,
                 user_weight: float = DEFAULT_USER_WEIGHT):
        self.official_weight = official_weight
        self.user_weight = user_weight
        self._records: dict[str, list[VerificationRecord]] = {}

    def track(self, report_id: str) -> None:
        """Register a report so later lookups can tell unknown from empty."""
        self._records.setdefault(report_id, [])

    def knows(self, report_id: str) -> bool:
        return report_id in self._records

    def _bucket(self, report_id: str) -> list[VerificationRecord]:
        try:
            return self._records[report_id]
        except KeyError:
            raise UnknownReport(f"no report '{report_id}'") from None

    def add(self, report_id: str, verifier: Actor, note: str = "",
            timestamp: datetime | None = None) -> VerificationRecord:
        bucket = self._bucket(report_id)
        if any(r.verifier == verifier.actor_id for r in bucket):
            raise DuplicateVerification(
                f"'{verifier.actor_id}' already verified report '{report_id}'")
        record = VerificationRecord(
            report_id=report_id,
            verifier=verifier.actor_id,
            verifier_role=verifier.role,
            timestamp=timestamp or datetime.now(timezone.utc),
            note=note,
        )
        bucket.append(record)
        return record

    def records(self, report_id: str) -> tuple[VerificationRecord, ...]:
        return tuple(self._bucket(report_id))

    def counts(self, report_id: str) -> tuple[int, int]:
        """(official_count, user_count), counted fresh from records."""
        official = 0
        user = 0
        for record in self._bucket(report_id):
            if record.official:
                official += 1
            elif record.verifier_role is Role.VILLAGER:
                user += 1
        return official, user

    def score(self, report_id: str) -> float:
        official, user = self.counts(report_id)
        return self.official_weight * official + self.user_weight * user

    def reliability(self, report_id: str) -> tuple[int, int, float]:
        official, user = self.counts(report_id)
        return official, user, self.official_weight * official + self.user_weight * user

    def eligible(self, report_id: str, threshold: float) -> bool:
        """Auto-distribution hook: score at or above threshold qualifies."""
        return self.score(report_id) >= threshold

    def merge_into(self, loser_id: str, winner_id: str) -> list[VerificationRecord]:
        """Copy the loser's records onto the winner, one per verifier.

        Verifiers already present on the winner are skipped. The loser's
        bucket is left untouched (the ledger never un-writes).
        """
        src = self._bucket(loser_id)
        dst = self._bucket(winner_id)
        present = {r.verifier for r in dst}
        copied = []
        for record in src:
            if record.verifier in present:
                continue
            moved = VerificationRecord(
                report_id=winner_id,
                verifier=record.verifier,
                verifier_role=record.verifier_role,
                timestamp=record.timestamp,
                note=record.note,
            )
            dst.append(moved)
            present.add(record.verifier)
            copied.append(moved)
        return copied

    def to_dict(self) -> dict[str, list[dict[str, Any]]]:
        return {
            rid: [r.to_dict() for r in bucket]
            for rid, bucket in sorted(self._records.items())
        }
