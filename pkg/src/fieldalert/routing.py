"""Responsibility assignment and notification fan-out.

Pure functions over an immutable hierarchy and actor directory: given a
report, decide which unit must act, which actors get a copy, and which
villages fall inside the neighbor radius.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

from .errors import UnknownActor, UnknownRegion
from .geo import DEFAULT_NEIGHBOR_RADIUS_M, AdminHierarchy
from .model import DISEASE_KINDS, Actor, DisasterKind, DisasterReport, Role, Severity


@dataclass(frozen=True)
class RoutingDecision:
    """Outcome of routing one report.

    ``notified`` holds actor ids; ``notified_units`` holds the unit ids
    those actors sit on, which double as push topics. INGO recipients
    subscribe per province, so they ride the province topic.
    """

    responsible: str
    notified: frozenset[str]
    notified_units: tuple[str, ...]
    neighbor_villages: tuple[str, ...]
    requires_review: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {
            "responsible": self.responsible,
            "notified": sorted(self.notified),
            "notified_units": list(self.notified_units),
            "neighbor_villages": list(self.neighbor_villages),
            "requires_review": self.requires_review,
        }


class ActorDirectory:
    """Registered actors, indexed by id and by (role, unit)."""

    def __init__(self, actors: Iterable[Actor]):
        self._by_id: dict[str, Actor] = {}
        self._by_role_unit: dict[tuple[Role, str], list[Actor]] = {}
        for actor in actors:
            if actor.actor_id in self._by_id:
                raise ValueError(f"duplicate actor id '{actor.actor_id}'")
            self._by_id[actor.actor_id] = actor
            self._by_role_unit.setdefault((actor.role, actor.unit_id), []).append(actor)

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self):
        return iter(self._by_id.values())

    def get(self, actor_id: str) -> Actor:
        try:
            return self._by_id[actor_id]
        except KeyError:
            raise UnknownActor(f"no actor '{actor_id}' in the directory") from None

    def maybe(self, actor_id: str) -> Actor | None:
        return self._by_id.get(actor_id)

    def for_unit(self, role: Role, unit_id: str) -> list[Actor]:
        return list(self._by_role_unit.get((role, unit_id), []))

    def with_role(self, role: Role) -> list[Actor]:
        return [a for a in self._by_id.values() if a.role is role]

    def ingos_for_province(self, province_id: str) -> list[Actor]:
        return self.for_unit(Role.INGO, province_id)

    def to_list(self) -> list[dict[str, Any]]:
        return [a.to_dict() for a in self._by_id.values()]


def load_directory_data(data: dict) -> ActorDirectory:
    return ActorDirectory(Actor.from_dict(d) for d in data.get("actors", []))


def load_directory_file(path: str | Path) -> ActorDirectory:
    with open(path, encoding="utf-8") as fh:
        return load_directory_data(json.load(fh))


def responsible_unit(report: DisasterReport, hierarchy: AdminHierarchy) -> str:
    """Unit that must act on the report.

    Escalation table: infrastructure stays on district level; disease
    outbreaks at Severe or worse go to the province, milder ones to the
    district; floods and bush fires go to the ministry when Extreme and
    to the province otherwise.
    """
    _check_regions(report, hierarchy)
    if report.kind is DisasterKind.INFRASTRUCTURE:
        return report.district_id
    if report.kind in DISEASE_KINDS:
        if report.severity >= Severity.SEVERE:
            return report.province_id
        return report.district_id
    # Flood and BushFire.
    if report.severity is Severity.EXTREME:
        return hierarchy.ministry_id
    return report.province_id


def notification_set(report: DisasterReport, hierarchy: AdminHierarchy,
                     directory: ActorDirectory,
                     radius_m: float = DEFAULT_NEIGHBOR_RADIUS_M) -> RoutingDecision:
    """Full fan-out for a report: responsible unit, actor set, villages."""
    responsible = responsible_unit(report, hierarchy)
    recipients: set[str] = set()
    for actor in directory.with_role(Role.MINISTRY):
        recipients.add(actor.actor_id)
    for actor in directory.for_unit(Role.PROVINCE_OFFICE, report.province_id):
        recipients.add(actor.actor_id)
    for actor in directory.for_unit(Role.DISTRICT_OFFICE, report.district_id):
        recipients.add(actor.actor_id)
    for actor in directory.ingos_for_province(report.province_id):
        recipients.add(actor.actor_id)

    units = [hierarchy.ministry_id, report.province_id, report.district_id]
    neighbor_villages = tuple(
        v.id for v in hierarchy.neighbors(report.location, radius_m))
    return RoutingDecision(
        responsible=responsible,
        notified=frozenset(recipients),
        notified_units=tuple(units),
        neighbor_villages=neighbor_villages,
    )


def _check_regions(report: DisasterReport, hierarchy: AdminHierarchy) -> None:
    if report.province_id not in hierarchy.province_by_id:
        raise UnknownRegion(f"province '{report.province_id}' is not in the hierarchy")
    if report.district_id not in hierarchy.district_by_id:
        raise UnknownRegion(f"district '{report.district_id}' is not in the hierarchy")
    if report.kumban_id is not None and report.kumban_id not in hierarchy.kumban_by_id:
        raise UnknownRegion(f"kumban '{report.kumban_id}' is not in the hierarchy")
