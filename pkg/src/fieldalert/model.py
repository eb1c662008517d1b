"""Domain types shared by every other module.

Value objects are plain frozen dataclasses. Constructors do not raise on
bad field values; ``validate_report`` is the gate and reports violations
as data so a malformed submission can be answered with a violation list
instead of a stack trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from .errors import IllegalTransition, OutOfCoverage

WATER_LEVEL_MAX_CM = 10_000


class DisasterKind(str, Enum):
    FLOOD = "Flood"
    BUSH_FIRE = "BushFire"
    INFRASTRUCTURE = "Infrastructure"
    HUMAN_DISEASE = "HumanDisease"
    ANIMAL_DISEASE = "AnimalDisease"
    PLANT_DISEASE = "PlantDisease"


DISEASE_KINDS = frozenset({
    DisasterKind.HUMAN_DISEASE,
    DisasterKind.ANIMAL_DISEASE,
    DisasterKind.PLANT_DISEASE,
})


class Severity(str, Enum):
    """Four-level severity scale, totally ordered Minor < ... < Extreme."""

    MINOR = "Minor"
    MODERATE = "Moderate"
    SEVERE = "Severe"
    EXTREME = "Extreme"

    @property
    def rank(self) -> int:
        return _SEVERITY_RANK[self]

    # str mixin would compare lexicographically; order by rank instead.
    def __lt__(self, other):
        if isinstance(other, Severity):
            return self.rank < other.rank
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, Severity):
            return self.rank <= other.rank
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, Severity):
            return self.rank > other.rank
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, Severity):
            return self.rank >= other.rank
        return NotImplemented


_SEVERITY_RANK = {
    Severity.MINOR: 0,
    Severity.MODERATE: 1,
    Severity.SEVERE: 2,
    Severity.EXTREME: 3,
}


class LifecycleState(str, Enum):
    SUBMITTED = "Submitted"
    DISTRIBUTED = "Distributed"
    UNDER_REVIEW = "UnderReview"
    VERIFIED = "Verified"
    RESOLVED = "Resolved"
    MERGED = "Merged"


#: Legal lifecycle edges. Merged and Resolved are terminal.
LEGAL_TRANSITIONS: dict[LifecycleState, frozenset[LifecycleState]] = {
    LifecycleState.SUBMITTED: frozenset({LifecycleState.DISTRIBUTED}),
    LifecycleState.DISTRIBUTED: frozenset({LifecycleState.UNDER_REVIEW}),
    LifecycleState.UNDER_REVIEW: frozenset({
        LifecycleState.VERIFIED, LifecycleState.RESOLVED, LifecycleState.MERGED,
    }),
    LifecycleState.VERIFIED: frozenset({LifecycleState.RESOLVED, LifecycleState.MERGED}),
    LifecycleState.RESOLVED: frozenset(),
    LifecycleState.MERGED: frozenset(),
}

TERMINAL_STATES = frozenset({LifecycleState.RESOLVED, LifecycleState.MERGED})


class Role(str, Enum):
    MINISTRY = "Ministry"
    PROVINCE_OFFICE = "ProvinceOffice"
    DISTRICT_OFFICE = "DistrictOffice"
    INGO = "INGO"
    VILLAGER = "Villager"


#: Roles allowed to perform administrative processing actions.
GAU_ROLES = frozenset({Role.MINISTRY, Role.PROVINCE_OFFICE, Role.DISTRICT_OFFICE})

#: Roles whose verification counts as an official stamp.
OFFICIAL_ROLES = GAU_ROLES | {Role.INGO}


@dataclass(frozen=True)
class GeoPoint:
    """WGS84 coordinate; lat in [-90, 90], lon in [-180, 180]."""

    lat: float
    lon: float

    def to_pair(self) -> list[float]:
        return [self.lat, self.lon]


@dataclass(frozen=True)
class Actor:
    """A participant: administrative office account, INGO, or villager.

    Office roles carry the id of the unit they administer; Villager
    carries a village id.
    """

    actor_id: str
    role: Role
    unit_id: str
    phone: str = ""
    name: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "actor_id": self.actor_id,
            "role": self.role.value,
            "unit_id": self.unit_id,
            "phone": self.phone,
            "name": self.name,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Actor":
        return cls(
            actor_id=d["actor_id"],
            role=Role(d["role"]),
            unit_id=d["unit_id"],
            phone=d.get("phone", ""),
            name=d.get("name", ""),
        )


# --------------------------------------------------------------------------
# Kind-specific detail payloads (tagged union keyed by DisasterKind)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FloodDetails:
    water_level_cm: int

    @property
    def kind(self) -> DisasterKind:
        return DisasterKind.FLOOD


@dataclass(frozen=True)
class BushFireDetails:
    area_estimate_m2: int | None = None

    @property
    def kind(self) -> DisasterKind:
        return DisasterKind.BUSH_FIRE


@dataclass(frozen=True)
class InfrastructureDetails:
    facility: str

    @property
    def kind(self) -> DisasterKind:
        return DisasterKind.INFRASTRUCTURE


@dataclass(frozen=True)
class DiseaseDetails:
    """Shared payload for human, animal, and plant disease reports."""

    disease_kind: DisasterKind
    disease_name: str
    affected_count: int

    def __post_init__(self):
        if self.disease_kind not in DISEASE_KINDS:
            raise ValueError(f"not a disease kind: {self.disease_kind}")

    @property
    def kind(self) -> DisasterKind:
        return self.disease_kind


KindDetails = FloodDetails | BushFireDetails | InfrastructureDetails | DiseaseDetails


def details_to_dict(details: KindDetails) -> dict[str, Any]:
    d: dict[str, Any] = {"kind": details.kind.value}
    if isinstance(details, FloodDetails):
        d["water_level_cm"] = details.water_level_cm
    elif isinstance(details, BushFireDetails):
        d["area_estimate_m2"] = details.area_estimate_m2
    elif isinstance(details, InfrastructureDetails):
        d["facility"] = details.facility
    else:
        d["disease_name"] = details.disease_name
        d["affected_count"] = details.affected_count
    return d


def details_from_dict(d: dict[str, Any]) -> KindDetails:
    kind = DisasterKind(d["kind"])
    if kind is DisasterKind.FLOOD:
        return FloodDetails(water_level_cm=int(d["water_level_cm"]))
    if kind is DisasterKind.BUSH_FIRE:
        area = d.get("area_estimate_m2")
        return BushFireDetails(area_estimate_m2=None if area is None else int(area))
    if kind is DisasterKind.INFRASTRUCTURE:
        return InfrastructureDetails(facility=d["facility"])
    return DiseaseDetails(
        disease_kind=kind,
        disease_name=d["disease_name"],
        affected_count=int(d["affected_count"]),
    )


def default_details(kind: DisasterKind) -> KindDetails:
    """Neutral payload for imports that carry no detail parameters."""
    if kind is DisasterKind.FLOOD:
        return FloodDetails(water_level_cm=0)
    if kind is DisasterKind.BUSH_FIRE:
        return BushFireDetails()
    if kind is DisasterKind.INFRASTRUCTURE:
        return InfrastructureDetails(facility="unspecified")
    return DiseaseDetails(disease_kind=kind, disease_name="unspecified", affected_count=0)


# --------------------------------------------------------------------------
# Disaster report
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DisasterReport:
    """One reported incident.

    ``geometry`` is an optional polygon (list of >= 3 points, closing edge
    implicit). Region ids must agree with ``location`` per the registry
    lookup; ``merged_into`` is set iff state is Merged.
    """

    id: str
    kind: DisasterKind
    details: KindDetails
    location: GeoPoint
    province_id: str
    district_id: str
    reporter: str
    reporter_phone: str = ""
    description: str = ""
    kumban_id: str | None = None
    geometry: tuple[GeoPoint, ...] | None = None
    created_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc))
    state: LifecycleState = LifecycleState.SUBMITTED
    severity: Severity = Severity.MINOR
    merged_into: str | None = None
    attachments: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "details": details_to_dict(self.details),
            "location": {"lat": self.location.lat, "lon": self.location.lon},
            "geometry": [p.to_pair() for p in self.geometry] if self.geometry else None,
            "province_id": self.province_id,
            "district_id": self.district_id,
            "kumban_id": self.kumban_id,
            "reporter": self.reporter,
            "reporter_phone": self.reporter_phone,
            "description": self.description,
            "created_at": self.created_at.isoformat(),
            "state": self.state.value,
            "severity": self.severity.value,
            "merged_into": self.merged_into,
            "attachments": list(self.attachments),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DisasterReport":
        geometry = d.get("geometry")
        return cls(
            id=d.get("id", ""),
            kind=DisasterKind(d["kind"]),
            details=details_from_dict(d["details"]),
            location=GeoPoint(float(d["location"]["lat"]), float(d["location"]["lon"])),
            geometry=tuple(GeoPoint(float(p[0]), float(p[1])) for p in geometry)
            if geometry else None,
            province_id=d["province_id"],
            district_id=d["district_id"],
            kumban_id=d.get("kumban_id"),
            reporter=d["reporter"],
            reporter_phone=d.get("reporter_phone", ""),
            description=d.get("description", ""),
            created_at=parse_timestamp(d["created_at"]),
            state=LifecycleState(d.get("state", "Submitted")),
            severity=Severity(d.get("severity", "Minor")),
            merged_into=d.get("merged_into"),
            attachments=tuple(d.get("attachments") or ()),
        )


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO timestamp to an aware UTC datetime."""
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


# --------------------------------------------------------------------------
# Validation
# --------------------------------------------------------------------------

@dataclass
class ValidationResult:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_report(report: DisasterReport, hierarchy) -> ValidationResult:
    """Check ranges, the details union tag, and region consistency.

    Never mutates and never raises: violations come back as data.
    ``hierarchy`` must provide ``locate(point)``.
    """
    v: list[str] = []

    if not -90.0 <= report.location.lat <= 90.0:
        v.append(f"latitude out of range: {report.location.lat}")
    if not -180.0 <= report.location.lon <= 180.0:
        v.append(f"longitude out of range: {report.location.lon}")

    if report.details.kind is not report.kind:
        v.append(
            f"details tag mismatch: report kind {report.kind.value}, "
            f"details for {report.details.kind.value}")
    else:
        v.extend(_detail_violations(report.details))

    if report.geometry is not None and len(report.geometry) < 3:
        v.append("geometry ring has fewer than 3 points")

    if (report.merged_into is not None) != (report.state is LifecycleState.MERGED):
        v.append("merged_into must be set exactly when state is Merged")

    if not v or not any("out of range" in s for s in v[:2]):
        # Region check only makes sense for an in-range location.
        if -90.0 <= report.location.lat <= 90.0 and -180.0 <= report.location.lon <= 180.0:
            try:
                located = hierarchy.locate(report.location)
            except OutOfCoverage:
                v.append("region inconsistency: location outside coverage")
            else:
                if located.province_id != report.province_id:
                    v.append(
                        f"region inconsistency: location lies in province "
                        f"'{located.province_id}', report says '{report.province_id}'")
                if located.district_id != report.district_id:
                    v.append(
                        f"region inconsistency: location lies in district "
                        f"'{located.district_id}', report says '{report.district_id}'")
                if located.kumban_id != report.kumban_id:
                    v.append(
                        f"region inconsistency: location lies in kumban "
                        f"'{located.kumban_id}', report says '{report.kumban_id}'")

    return ValidationResult(v)


def _detail_violations(details: KindDetails) -> list[str]:
    v: list[str] = []
    if isinstance(details, FloodDetails):
        if details.water_level_cm < 0:
            v.append("water level must be non-negative")
        elif details.water_level_cm > WATER_LEVEL_MAX_CM:
            v.append(f"water level out of range (max {WATER_LEVEL_MAX_CM} cm)")
    elif isinstance(details, BushFireDetails):
        if details.area_estimate_m2 is not None and details.area_estimate_m2 < 0:
            v.append("area estimate must be non-negative")
    elif isinstance(details, DiseaseDetails):
        if details.affected_count < 0:
            v.append("affected count must be non-negative")
    return v


# --------------------------------------------------------------------------
# Lifecycle transitions
# --------------------------------------------------------------------------

def transition(report: DisasterReport, target: LifecycleState, *,
               merged_into: str | None = None) -> DisasterReport:
    """Return a copy in the target state; raise on an illegal edge.

    Transitioning to Merged requires merged_into, either as the keyword
    argument or already present on the report.
    """
    if target not in LEGAL_TRANSITIONS[report.state]:
        raise IllegalTransition(
            f"{report.state.value} -> {target.value} is not a legal transition")
    if target is LifecycleState.MERGED:
        winner = merged_into if merged_into is not None else report.merged_into
        if not winner:
            raise IllegalTransition("transition to Merged requires merged_into")
        return replace(report, state=target, merged_into=winner)
    return replace(report, state=target)


# --------------------------------------------------------------------------
# Role/state action legality (shared by server enforcement and the web UI)
# --------------------------------------------------------------------------

ACTION_REVIEW = "Review"
ACTION_VERIFY = "Verify"
ACTION_ASSIGN = "Assign"
ACTION_MERGE = "Merge"
ACTION_RESOLVE = "Resolve"
ACTION_UPDATE = "Update"
ACTION_ATTACH = "AttachDocument"

#: Admin actions (Verify is separate: any role may verify, only GAUs process).
PROCESS_ACTIONS = (
    ACTION_REVIEW, ACTION_ASSIGN, ACTION_MERGE, ACTION_RESOLVE,
    ACTION_UPDATE, ACTION_ATTACH,
)

_STATE_ACTIONS: dict[LifecycleState, tuple[str, ...]] = {
    LifecycleState.SUBMITTED: (ACTION_VERIFY,),
    LifecycleState.DISTRIBUTED: (
        ACTION_REVIEW, ACTION_VERIFY, ACTION_ASSIGN, ACTION_UPDATE, ACTION_ATTACH),
    LifecycleState.UNDER_REVIEW: (
        ACTION_VERIFY, ACTION_ASSIGN, ACTION_MERGE, ACTION_RESOLVE,
        ACTION_UPDATE, ACTION_ATTACH),
    LifecycleState.VERIFIED: (
        ACTION_VERIFY, ACTION_ASSIGN, ACTION_MERGE, ACTION_RESOLVE,
        ACTION_UPDATE, ACTION_ATTACH),
    LifecycleState.RESOLVED: (),
    LifecycleState.MERGED: (),
}


def legal_actions(role: Role, state: LifecycleState) -> tuple[str, ...]:
    """Actions the given role may take on a report in the given state."""
    actions = _STATE_ACTIONS[state]
    if role in GAU_ROLES:
        return actions
    # INGOs and villagers may only verify.
    return tuple(a for a in actions if a == ACTION_VERIFY)


def legality_matrix() -> dict[str, dict[str, list[str]]]:
    """Full role x state action matrix, JSON-shaped."""
    return {
        role.value: {
            state.value: list(legal_actions(role, state))
            for state in LifecycleState
        }
        for role in Role
    }
