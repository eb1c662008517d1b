from __future__ import annotations

import random
from datetime import datetime, timezone

import pytest

import oracles
from fieldalert.errors import DuplicateVerification, UnknownReport
from fieldalert.model import Actor, Role
from fieldalert.verification import VerificationLedger


def actor(n: int, role: Role) -> Actor:
    return Actor(f"{role.value.lower()}-{n}", role, unit_id=f"u-{n}")


@pytest.fixture
def ledger() -> VerificationLedger:
    led = VerificationLedger()
    led.track("r-000001")
    led.track("r-000002")
    return led


class TestRecords:
    def test_unknown_report_raises(self, ledger):
        with pytest.raises(UnknownReport):
            ledger.records("r-999999")
        with pytest.raises(UnknownReport):
            ledger.add("r-999999", actor(1, Role.VILLAGER))

    def test_track_makes_report_known_and_empty(self, ledger):
        assert ledger.knows("r-000001")
        assert ledger.records("r-000001") == ()
        assert ledger.reliability("r-000001") == (0, 0, 0)

    def test_add_returns_record(self, ledger):
        when = datetime(2013, 9, 25, 8, 0, tzinfo=timezone.utc)
        record = ledger.add("r-000001", actor(1, Role.INGO),
                            note="seen it too", timestamp=when)
        assert record.report_id == "r-000001"
        assert record.verifier == "ingo-1"
        assert record.timestamp == when
        assert record.note == "seen it too"
        assert ledger.records("r-000001") == (record,)

    def test_duplicate_verifier_rejected(self, ledger):
        ledger.add("r-000001", actor(1, Role.VILLAGER))
        with pytest.raises(DuplicateVerification):
            ledger.add("r-000001", actor(1, Role.VILLAGER))
        # Same verifier on another report is fine.
        ledger.add("r-000002", actor(1, Role.VILLAGER))

    def test_official_flag_per_role(self, ledger):
        officials = (Role.MINISTRY, Role.PROVINCE_OFFICE,
                     Role.DISTRICT_OFFICE, Role.INGO)
        for n, role in enumerate(officials):
            assert ledger.add("r-000001", actor(n, role)).official
        assert not ledger.add("r-000001", actor(9, Role.VILLAGER)).official


class TestScoring:
    def test_default_weights(self, ledger):
        ledger.add("r-000001", actor(1, Role.DISTRICT_OFFICE))
        ledger.add("r-000001", actor(2, Role.VILLAGER))
        ledger.add("r-000001", actor(3, Role.VILLAGER))
        assert ledger.counts("r-000001") == (1, 2)
        assert ledger.score("r-000001") == 5
        assert ledger.reliability("r-000001") == (1, 2, 5)

    def test_ingo_counts_as_official(self, ledger):
        ledger.add("r-000001", actor(1, Role.INGO))
        assert ledger.counts("r-000001") == (1, 0)
        assert ledger.score("r-000001") == 3

    def test_custom_weights(self):
        led = VerificationLedger(official_weight=10, user_weight=2)
        led.track("r")
        led.add("r", actor(1, Role.MINISTRY))
        led.add("r", actor(2, Role.VILLAGER))
        assert led.score("r") == 12

    def test_eligibility_threshold(self, ledger):
        ledger.add("r-000001", actor(1, Role.PROVINCE_OFFICE))
        ledger.add("r-000001", actor(2, Role.VILLAGER))
        assert ledger.eligible("r-000001", 4)
        assert ledger.eligible("r-000001", 4.0)
        assert not ledger.eligible("r-000001", 4.5)

    def test_score_matches_oracle_on_random_mixes(self):
        rng = random.Random(61)
        roles = list(Role)
        for _ in range(100):
            led = VerificationLedger()
            led.track("r")
            picked = [rng.choice(roles) for _ in range(rng.randint(0, 12))]
            for n, role in enumerate(picked):
                led.add("r", actor(n, role))
            want = oracles.oracle_score([r.value for r in picked])
            assert led.reliability("r") == want


class TestMerge:
    def test_records_copy_to_winner(self, ledger):
        ledger.add("r-000001", actor(1, Role.VILLAGER))
        ledger.add("r-000001", actor(2, Role.INGO))
        ledger.add("r-000002", actor(3, Role.VILLAGER))
        copied = ledger.merge_into("r-000001", "r-000002")
        assert [r.verifier for r in copied] == ["villager-1", "ingo-2"]
        assert all(r.report_id == "r-000002" for r in copied)
        assert ledger.counts("r-000002") == (1, 2)
        # The loser's records stay readable; nothing is un-written.
        assert len(ledger.records("r-000001")) == 2

    def test_shared_verifiers_not_double_counted(self, ledger):
        ledger.add("r-000001", actor(1, Role.VILLAGER))
        ledger.add("r-000002", actor(1, Role.VILLAGER))
        ledger.add("r-000002", actor(2, Role.VILLAGER))
        copied = ledger.merge_into("r-000001", "r-000002")
        assert copied == []
        assert ledger.counts("r-000002") == (0, 2)

    def test_to_dict_sorted_and_json_shaped(self, ledger):
        ledger.add("r-000002", actor(1, Role.VILLAGER))
        ledger.add("r-000001", actor(2, Role.MINISTRY))
        d = ledger.to_dict()
        assert list(d) == ["r-000001", "r-000002"]
        assert d["r-000001"][0]["verifier_role"] == "Ministry"
