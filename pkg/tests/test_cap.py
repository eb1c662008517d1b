from __future__ import annotations

import random
import xml.etree.ElementTree as ET
from datetime import datetime, timezone

import pytest

import synth
from conftest import make_report
from fieldalert.cap import (
    CAP_NS,
    CapAlert,
    CapInfo,
    cap_to_report,
    parse_cap,
    report_to_cap,
    serialize_cap,
)
from fieldalert.errors import (
    InvariantViolation,
    MalformedXml,
    MissingLocation,
    SchemaViolation,
)
from fieldalert.model import DisasterKind, LifecycleState, Severity


def normalized_values(xml_bytes: bytes) -> list[tuple[str, str]]:
    """(tag, whitespace-normalized text) for every element, document order."""
    root = ET.fromstring(xml_bytes)
    out = []
    for el in root.iter():
        tag = el.tag.split("}", 1)[-1]
        out.append((tag, " ".join((el.text or "").split())))
    return out


class TestParseFixture:
    def test_header_fields(self, sample_alert_bytes):
        alert = parse_cap(sample_alert_bytes)
        assert alert.identifier == "7"
        assert alert.sender == "89"
        assert alert.sent == "2013-09-25T07:05:02.917-05:00"
        assert alert.status == "Actual"
        assert alert.msg_type == "Alert"
        assert alert.scope == "Public"
        assert alert.source == "MAF office; +856 1234567; MAF"

    def test_info_fields(self, sample_alert_bytes):
        info = parse_cap(sample_alert_bytes).info
        assert info.language == "en-US"
        assert info.category == "Health"
        assert info.response_type == "None"
        assert info.urgency == "Future"
        assert info.severity == "Extreme"
        assert info.certainty == "Possible"
        # The element wraps across lines; only the edges are formatting.
        assert info.effective == "2013-09-24T19:00:00-05:00"
        assert info.event.startswith("I have seen the same thing")
        assert info.event.endswith("village nearby last year")

    def test_parameters_in_document_order(self, sample_alert_bytes):
        info = parse_cap(sample_alert_bytes).info
        assert [name for name, _ in info.parameters] == [
            "location", "disasterType", "province", "district", "kumban"]
        assert info.parameter("location") == "19.845519,102.078652"
        assert info.parameter("disasterType") == "PlantDiseaseInfo"
        assert info.parameter("province") == "Louangphabang"
        assert info.parameter("district") == "Louangprabang"
        assert info.parameter("kumban") == "Sangkalok"

    def test_reserialization_preserves_values(self, sample_alert_bytes):
        alert = parse_cap(sample_alert_bytes)
        again = serialize_cap(alert)
        assert normalized_values(again) == normalized_values(sample_alert_bytes)
        assert parse_cap(again) == alert


class TestParseErrors:
    def test_malformed_xml(self):
        with pytest.raises(MalformedXml):
            parse_cap(b"<alert><identifier>7</alert>")

    def test_wrong_root(self):
        with pytest.raises(SchemaViolation):
            parse_cap(f'<warning xmlns="{CAP_NS}"/>'.encode())

    def test_root_outside_namespace(self):
        with pytest.raises(SchemaViolation):
            parse_cap(b"<alert><identifier>7</identifier></alert>")

    def test_missing_info(self):
        doc = (f'<alert xmlns="{CAP_NS}"><identifier>1</identifier>'
               f'<sender>s</sender><sent>t</sent><status>Actual</status>'
               f'<msgType>Alert</msgType><scope>Public</scope></alert>')
        with pytest.raises(SchemaViolation) as err:
            parse_cap(doc)
        assert err.value.element == "info"

    def test_two_info_blocks(self, sample_alert_bytes):
        root = ET.fromstring(sample_alert_bytes)
        root.append(root.find(f"{{{CAP_NS}}}info"))
        with pytest.raises(SchemaViolation):
            parse_cap(ET.tostring(root))

    def test_missing_required_element(self, sample_alert_bytes):
        root = ET.fromstring(sample_alert_bytes)
        root.remove(root.find(f"{{{CAP_NS}}}sender"))
        with pytest.raises(SchemaViolation) as err:
            parse_cap(ET.tostring(root))
        assert err.value.element == "sender"

    def test_illegal_status_value(self, sample_alert_bytes):
        text = sample_alert_bytes.decode().replace(
            "<status>Actual</status>", "<status>Urgent</status>")
        with pytest.raises(SchemaViolation) as err:
            parse_cap(text)
        assert err.value.element == "status"

    def test_parameter_without_name(self, sample_alert_bytes):
        text = sample_alert_bytes.decode().replace(
            "<valueName>kumban</valueName>", "<valueName></valueName>")
        with pytest.raises(SchemaViolation):
            parse_cap(text)


class TestSerializeInvariants:
    def test_rejects_illegal_enum(self, sample_alert_bytes):
        from dataclasses import replace
        alert = parse_cap(sample_alert_bytes)
        with pytest.raises(InvariantViolation):
            serialize_cap(replace(alert, status="Urgent"))

    def test_output_is_namespaced_utf8(self, sample_alert_bytes):
        out = serialize_cap(parse_cap(sample_alert_bytes))
        assert out.startswith(b"<?xml")
        assert b"urn:oasis:names:tc:emergency:cap:1.1" in out
        assert b"ns0:" not in out

    def test_foreign_parameters_survive_in_order(self):
        rng = random.Random(77)
        for _ in range(50):
            alert = synth.random_cap_alert(rng)
            assert parse_cap(serialize_cap(alert)) == alert


class TestReportExport:
    def test_fixture_shaped_report(self):
        report = make_report(id="7", reporter="89",
                             reporter_phone="", description="")
        alert = report_to_cap(report)
        assert alert.identifier == "7"
        assert alert.sender == "89"
        assert alert.info.category == "Health"
        assert alert.info.parameter("location") == "19.845519,102.078652"
        assert alert.info.parameter("disasterType") == "PlantDiseaseInfo"
        assert alert.info.parameter("province") == "Louangphabang"
        assert alert.info.parameter("district") == "Louangprabang"
        assert alert.info.parameter("kumban") == "Sangkalok"
        assert alert.info.severity == "Extreme"

    def test_urgency_tracks_severity(self):
        calm = report_to_cap(make_report(severity=Severity.MODERATE))
        assert calm.info.urgency == "Expected"
        urgent = report_to_cap(make_report(severity=Severity.SEVERE))
        assert urgent.info.urgency == "Immediate"

    def test_category_by_kind(self):
        from fieldalert.model import FloodDetails
        flood = make_report(kind=DisasterKind.FLOOD, details=FloodDetails(120))
        assert report_to_cap(flood).info.category == "Met"
        assert report_to_cap(flood).info.parameter("waterLevelCm") == "120"

    def test_state_and_attachments_ride_parameters(self):
        report = make_report(state=LifecycleState.VERIFIED,
                             attachments=("doc-1.pdf", "doc-2.pdf"))
        info = report_to_cap(report).info
        assert info.parameter("lifecycleState") == "Verified"
        assert info.parameters_named("attachment") == ["doc-1.pdf", "doc-2.pdf"]


class TestReportImport:
    def test_fixture_alert_becomes_report(self, sample_alert_bytes):
        report = cap_to_report(parse_cap(sample_alert_bytes))
        assert report.kind is DisasterKind.PLANT_DISEASE
        assert report.kumban_id == "Sangkalok"
        assert report.province_id == "Louangphabang"
        assert report.district_id == "Louangprabang"
        assert report.location.lat == 19.845519
        assert report.location.lon == 102.078652
        assert report.severity is Severity.EXTREME
        assert report.state is LifecycleState.SUBMITTED
        # effective is -05:00 local; stored time must be the UTC instant.
        assert report.created_at == datetime(2013, 9, 25, 0, 0,
                                             tzinfo=timezone.utc)

    def test_missing_location_raises(self, sample_alert_bytes):
        text = sample_alert_bytes.decode().replace(
            "<valueName>location</valueName>", "<valueName>spot</valueName>")
        with pytest.raises(MissingLocation):
            cap_to_report(parse_cap(text))

    def test_unknown_disaster_type_raises(self, sample_alert_bytes):
        text = sample_alert_bytes.decode().replace(
            "PlantDiseaseInfo", "MeteorStrikeInfo")
        with pytest.raises(SchemaViolation):
            cap_to_report(parse_cap(text))

    def test_foreign_alert_infers_kind_from_category(self, hierarchy):
        def foreign(category: str) -> CapAlert:
            return CapAlert(
                identifier="x-1", sender="ext", sent="2013-09-25T07:00:00+07:00",
                status="Actual", msg_type="Alert", scope="Public",
                info=CapInfo(
                    category=category, event="imported", urgency="Expected",
                    severity="Moderate", certainty="Likely",
                    parameters=(("location", "19.845519,102.078652"),),
                ),
            )
        assert cap_to_report(foreign("Health"), hierarchy).kind \
            is DisasterKind.HUMAN_DISEASE
        assert cap_to_report(foreign("Fire"), hierarchy).kind \
            is DisasterKind.BUSH_FIRE
        assert cap_to_report(foreign("Geo"), hierarchy).kind \
            is DisasterKind.INFRASTRUCTURE

    def test_regions_fall_back_to_registry_lookup(self, hierarchy):
        alert = CapAlert(
            identifier="x-2", sender="ext", sent="2013-09-25T07:00:00+07:00",
            status="Actual", msg_type="Alert", scope="Public",
            info=CapInfo(
                category="Health", event="", urgency="Expected",
                severity="Minor", certainty="Likely",
                parameters=(("location", "19.845519,102.078652"),),
            ),
        )
        report = cap_to_report(alert, hierarchy)
        assert report.province_id == "Louangphabang"
        assert report.district_id == "Louangprabang"
        assert report.kumban_id == "Sangkalok"

    def test_bad_coordinate_pair_raises(self, sample_alert_bytes):
        text = sample_alert_bytes.decode().replace(
            "19.845519,102.078652", "somewhere north")
        with pytest.raises(SchemaViolation):
            cap_to_report(parse_cap(text))


class TestRoundTrips:
    def test_report_survives_export_import(self):
        rng = random.Random(99)
        region = synth.make_grid_region_data(3, 3, rng=rng)
        for _ in range(100):
            report = synth.random_report(rng, region, any_state=True)
            assert cap_to_report(report_to_cap(report)) == report

    def test_alert_survives_parse_serialize_parse(self):
        rng = random.Random(98)
        for _ in range(100):
            alert = synth.random_cap_alert(rng)
            wire = serialize_cap(alert)
            assert parse_cap(serialize_cap(parse_cap(wire))) == alert
