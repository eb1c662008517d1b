"""CAP 1.1 codec: lossless interchange with other alerting systems.

Alerts serialize into the urn:oasis:names:tc:emergency:cap:1.1 namespace
with platform-specific fields carried as <parameter> entries, so nothing
a report knows is dropped on export. Foreign documents keep their
parameters verbatim through a parse/serialize cycle.

Timestamps inside a CapAlert stay as recorded text (offsets and all);
conversion to UTC happens only when a report is built from an alert.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Any

from .errors import InvariantViolation, MalformedXml, MissingLocation, SchemaViolation
from .model import (
    BushFireDetails,
    DisasterKind,
    DisasterReport,
    DiseaseDetails,
    FloodDetails,
    GeoPoint,
    InfrastructureDetails,
    KindDetails,
    LifecycleState,
    Severity,
    default_details,
    details_from_dict,
    parse_timestamp,
)

CAP_NS = "urn:oasis:names:tc:emergency:cap:1.1"

STATUS_VALUES = frozenset({"Actual", "Exercise", "System", "Test", "Draft"})
MSG_TYPE_VALUES = frozenset({"Alert", "Update", "Cancel", "Ack", "Error"})
SCOPE_VALUES = frozenset({"Public", "Restricted", "Private"})
URGENCY_VALUES = frozenset({"Immediate", "Expected", "Future", "Past", "Unknown"})
CERTAINTY_VALUES = frozenset({"Observed", "Likely", "Possible", "Unlikely", "Unknown"})

#: info/category value per disaster kind.
CATEGORY_BY_KIND = {
    DisasterKind.FLOOD: "Met",
    DisasterKind.BUSH_FIRE: "Fire",
    DisasterKind.INFRASTRUCTURE: "Infra",
    DisasterKind.HUMAN_DISEASE: "Health",
    DisasterKind.ANIMAL_DISEASE: "Health",
    DisasterKind.PLANT_DISEASE: "Health",
}

#: disasterType wire names follow the kind + "Info" convention.
KIND_SUFFIX = "Info"


@dataclass(frozen=True)
class CapInfo:
    category: str
    event: str
    urgency: str
    severity: str
    certainty: str
    language: str = ""
    response_type: str = ""
    effective: str = ""
    parameters: tuple[tuple[str, str], ...] = ()

    def parameter(self, name: str) -> str | None:
        for value_name, value in self.parameters:
            if value_name == name:
                return value
        return None

    def parameters_named(self, name: str) -> list[str]:
        return [value for value_name, value in self.parameters if value_name == name]


@dataclass(frozen=True)
class CapAlert:
    identifier: str
    sender: str
    sent: str
    status: str
    msg_type: str
    scope: str
    info: CapInfo
    source: str = ""


_ENUM_CHECKS = (
    ("status", lambda a: a.status, STATUS_VALUES),
    ("msgType", lambda a: a.msg_type, MSG_TYPE_VALUES),
    ("scope", lambda a: a.scope, SCOPE_VALUES),
    ("urgency", lambda a: a.info.urgency, URGENCY_VALUES),
    ("certainty", lambda a: a.info.certainty, CERTAINTY_VALUES),
)


def _check_enums(alert: CapAlert, *, parsing: bool) -> None:
    for name, getter, allowed in _ENUM_CHECKS:
        value = getter(alert)
        if value not in allowed:
            message = f"illegal {name} value '{value}'"
            if parsing:
                raise SchemaViolation(name, message)
            raise InvariantViolation(message)


# --------------------------------------------------------------------------
# XML <-> CapAlert
# --------------------------------------------------------------------------

def _text(el: ET.Element | None) -> str:
    if el is None or el.text is None:
        return ""
    # Values keep internal whitespace; only the edges are formatting.
    return el.text.strip()


def _require(parent: ET.Element, name: str) -> str:
    el = parent.find(f"{{{CAP_NS}}}{name}")
    if el is None:
        raise SchemaViolation(name, f"missing required element <{name}>")
    return _text(el)


def _optional(parent: ET.Element, name: str) -> str:
    return _text(parent.find(f"{{{CAP_NS}}}{name}"))


def parse_cap(xml_text: bytes | str) -> CapAlert:
    """Decode a CAP 1.1 document; unknown parameters survive in order."""
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise MalformedXml(f"not well-formed XML: {exc}") from exc

    if root.tag != f"{{{CAP_NS}}}alert":
        raise SchemaViolation(
            "alert", "root element must be <alert> in the CAP 1.1 namespace")

    infos = root.findall(f"{{{CAP_NS}}}info")
    if len(infos) != 1:
        raise SchemaViolation(
            "info", f"expected exactly one <info> element, found {len(infos)}")
    info_el = infos[0]

    parameters: list[tuple[str, str]] = []
    for param in info_el.findall(f"{{{CAP_NS}}}parameter"):
        name_el = param.find(f"{{{CAP_NS}}}valueName")
        value_el = param.find(f"{{{CAP_NS}}}value")
        if name_el is None or not _text(name_el):
            raise SchemaViolation("parameter", "<parameter> without <valueName>")
        parameters.append((_text(name_el), _text(value_el)))

    alert = CapAlert(
        identifier=_require(root, "identifier"),
        sender=_require(root, "sender"),
        sent=_require(root, "sent"),
        status=_require(root, "status"),
        msg_type=_require(root, "msgType"),
        source=_optional(root, "source"),
        scope=_require(root, "scope"),
        info=CapInfo(
            language=_optional(info_el, "language"),
            category=_require(info_el, "category"),
            event=_require(info_el, "event"),
            response_type=_optional(info_el, "responseType"),
            urgency=_require(info_el, "urgency"),
            severity=_require(info_el, "severity"),
            certainty=_require(info_el, "certainty"),
            effective=_optional(info_el, "effective"),
            parameters=tuple(parameters),
        ),
    )
    _check_enums(alert, parsing=True)
    return alert


def serialize_cap(alert: CapAlert) -> bytes:
    """Encode as UTF-8 XML, element order as in incoming documents."""
    _check_enums(alert, parsing=False)

    # A literal xmlns attribute gives a clean default-namespace document
    # instead of ElementTree's ns0: prefixes.
    root = ET.Element("alert", {"xmlns": CAP_NS})

    def sub(parent: ET.Element, name: str, text: str) -> None:
        el = ET.SubElement(parent, name)
        el.text = text

    sub(root, "identifier", alert.identifier)
    sub(root, "sender", alert.sender)
    sub(root, "sent", alert.sent)
    sub(root, "status", alert.status)
    sub(root, "msgType", alert.msg_type)
    if alert.source:
        sub(root, "source", alert.source)
    sub(root, "scope", alert.scope)

    info = ET.SubElement(root, "info")
    if alert.info.language:
        sub(info, "language", alert.info.language)
    sub(info, "category", alert.info.category)
    sub(info, "event", alert.info.event)
    if alert.info.response_type:
        sub(info, "responseType", alert.info.response_type)
    sub(info, "urgency", alert.info.urgency)
    sub(info, "severity", alert.info.severity)
    sub(info, "certainty", alert.info.certainty)
    if alert.info.effective:
        sub(info, "effective", alert.info.effective)
    for value_name, value in alert.info.parameters:
        param = ET.SubElement(info, "parameter")
        sub(param, "valueName", value_name)
        sub(param, "value", value)

    ET.indent(root, space="   ")
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


# --------------------------------------------------------------------------
# DisasterReport <-> CapAlert
# --------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    return repr(x)


def _fmt_point(p: GeoPoint) -> str:
    return f"{_fmt_float(p.lat)},{_fmt_float(p.lon)}"


def _parse_point(text: str, context: str) -> GeoPoint:
    try:
        lat_s, lon_s = text.split(",")
        return GeoPoint(float(lat_s), float(lon_s))
    except ValueError as exc:
        raise SchemaViolation(
            "parameter", f"bad coordinate pair in {context}: '{text}'") from exc


def _detail_parameters(details: KindDetails) -> list[tuple[str, str]]:
    if isinstance(details, FloodDetails):
        return [("waterLevelCm", str(details.water_level_cm))]
    if isinstance(details, BushFireDetails):
        if details.area_estimate_m2 is None:
            return []
        return [("areaEstimateM2", str(details.area_estimate_m2))]
    if isinstance(details, InfrastructureDetails):
        return [("facility", details.facility)]
    assert isinstance(details, DiseaseDetails)
    return [("diseaseName", details.disease_name),
            ("affectedCount", str(details.affected_count))]


def report_to_cap(report: DisasterReport, sender: str = "",
                  msg_type: str = "Alert", source: str = "") -> CapAlert:
    """Export a report as a CAP alert.

    ``sender`` names the exporting actor and only feeds the display
    <source>; the alert's sender field carries the reporter so imports
    keep attribution. Everything without a native CAP slot rides in the
    parameter list.
    """
    params: list[tuple[str, str]] = [
        ("location", _fmt_point(report.location)),
        ("disasterType", report.kind.value + KIND_SUFFIX),
        ("province", report.province_id),
        ("district", report.district_id),
    ]
    if report.kumban_id is not None:
        params.append(("kumban", report.kumban_id))
    params.extend(_detail_parameters(report.details))
    if report.reporter_phone:
        params.append(("reporterPhone", report.reporter_phone))
    params.append(("lifecycleState", report.state.value))
    if report.merged_into is not None:
        params.append(("mergedInto", report.merged_into))
    for ref in report.attachments:
        params.append(("attachment", ref))
    if report.geometry is not None:
        params.append(("geometry", " ".join(_fmt_point(p) for p in report.geometry)))

    sent = report.created_at.isoformat()
    urgency = "Immediate" if report.severity >= Severity.SEVERE else "Expected"
    return CapAlert(
        identifier=report.id,
        sender=report.reporter,
        sent=sent,
        status="Actual",
        msg_type=msg_type,
        source=source or sender,
        scope="Public",
        info=CapInfo(
            language="en-US",
            category=CATEGORY_BY_KIND[report.kind],
            event=report.description,
            response_type="None",
            urgency=urgency,
            severity=report.severity.value,
            certainty="Observed",
            effective=sent,
            parameters=tuple(params),
        ),
    )


def _kind_from_alert(info: CapInfo) -> DisasterKind:
    disaster_type = info.parameter("disasterType")
    if disaster_type is not None:
        name = disaster_type.removesuffix(KIND_SUFFIX)
        try:
            return DisasterKind(name)
        except ValueError:
            raise SchemaViolation(
                "parameter", f"unknown disasterType '{disaster_type}'") from None
    # Foreign alert: infer from category.
    if info.category == "Health":
        return DisasterKind.HUMAN_DISEASE
    if info.category == "Fire":
        return DisasterKind.BUSH_FIRE
    return DisasterKind.INFRASTRUCTURE


def _details_from_alert(kind: DisasterKind, info: CapInfo) -> KindDetails:
    d: dict[str, Any] = {"kind": kind.value}
    if kind is DisasterKind.FLOOD:
        d["water_level_cm"] = int(info.parameter("waterLevelCm") or 0)
    elif kind is DisasterKind.BUSH_FIRE:
        area = info.parameter("areaEstimateM2")
        d["area_estimate_m2"] = None if area is None else int(area)
    elif kind is DisasterKind.INFRASTRUCTURE:
        facility = info.parameter("facility")
        if facility is None:
            return default_details(kind)
        d["facility"] = facility
    else:
        name = info.parameter("diseaseName")
        if name is None:
            return default_details(kind)
        d["disease_name"] = name
        d["affected_count"] = int(info.parameter("affectedCount") or 0)
    return details_from_dict(d)


def cap_to_report(alert: CapAlert, hierarchy=None) -> DisasterReport:
    """Build a report from an alert; inverse of report_to_cap on its image.

    Alerts without region parameters fall back to a registry lookup from
    the location point when a hierarchy is supplied.
    """
    info = alert.info
    location_text = info.parameter("location")
    if location_text is None:
        raise MissingLocation("alert carries no location parameter")
    location = _parse_point(location_text, "location")

    kind = _kind_from_alert(info)
    details = _details_from_alert(kind, info)

    province = info.parameter("province")
    district = info.parameter("district")
    kumban = info.parameter("kumban")
    if (province is None or district is None) and hierarchy is not None:
        located = hierarchy.locate(location)
        province = province or located.province_id
        district = district or located.district_id
        kumban = kumban if kumban is not None else located.kumban_id

    try:
        severity = Severity(info.severity)
    except ValueError:
        severity = Severity.MINOR

    state_text = info.parameter("lifecycleState")
    state = LifecycleState(state_text) if state_text else LifecycleState.SUBMITTED

    geometry_text = info.parameter("geometry")
    geometry = None
    if geometry_text:
        geometry = tuple(_parse_point(chunk, "geometry")
                         for chunk in geometry_text.split())

    return DisasterReport(
        id=alert.identifier,
        kind=kind,
        details=details,
        location=location,
        geometry=geometry,
        province_id=province or "",
        district_id=district or "",
        kumban_id=kumban,
        reporter=alert.sender,
        reporter_phone=info.parameter("reporterPhone") or "",
        description=info.event,
        created_at=parse_timestamp(info.effective or alert.sent),
        state=state,
        severity=severity,
        merged_into=info.parameter("mergedInto"),
        attachments=tuple(info.parameters_named("attachment")),
    )
