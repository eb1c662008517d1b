"""Stepwise report assembly.

The same steps run in two modes: from an answers document (tests,
scripting) where a bad value fails immediately naming its step, and
interactively where bad values re-prompt. Region ids are filled by a
resolver callback, normally the server's locate endpoint, unless the
answers name them explicitly.
"""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Any, Callable

from ..errors import AbortedByUser, AnswerError
from ..model import (
    DISEASE_KINDS,
    WATER_LEVEL_MAX_CM,
    BushFireDetails,
    DisasterKind,
    DisasterReport,
    DiseaseDetails,
    FloodDetails,
    GeoPoint,
    InfrastructureDetails,
    KindDetails,
    Severity,
)

Resolver = Callable[[float, float], dict[str, Any]]


def _parse_kind(raw: str) -> DisasterKind:
    try:
        return DisasterKind(raw)
    except ValueError:
        choices = ", ".join(k.value for k in DisasterKind)
        raise ValueError(f"expected one of {choices}") from None


def _parse_severity(raw: str) -> Severity:
    try:
        return Severity(raw)
    except ValueError:
        choices = ", ".join(s.value for s in Severity)
        raise ValueError(f"expected one of {choices}") from None


def _parse_water_level(raw: str) -> int:
    value = int(raw)
    if not 0 <= value <= WATER_LEVEL_MAX_CM:
        raise ValueError(f"water level must be 0..{WATER_LEVEL_MAX_CM} cm")
    return value


def _parse_non_negative(raw: str) -> int:
    value = int(raw)
    if value < 0:
        raise ValueError("must be non-negative")
    return value


def _parse_lat(raw: str) -> float:
    value = float(raw)
    if not -90.0 <= value <= 90.0:
        raise ValueError("latitude must be within [-90, 90]")
    return value


def _parse_lon(raw: str) -> float:
    value = float(raw)
    if not -180.0 <= value <= 180.0:
        raise ValueError("longitude must be within [-180, 180]")
    return value


def _parse_text(raw: str) -> str:
    if not raw:
        raise ValueError("must not be empty")
    return raw


class _AnswerSource:
    """Non-interactive: every step answered by the answers document."""

    def __init__(self, answers: dict[str, Any]):
        self.answers = answers

    def ask(self, step: str, parse: Callable[[str], Any], *,
            required: bool = True, default: Any = None) -> Any:
        if step not in self.answers or self.answers[step] is None:
            if required:
                raise AnswerError(step)
            return default
        try:
            return parse(str(self.answers[step]))
        except ValueError as exc:
            raise AnswerError(step, f"invalid answer for '{step}': {exc}") from exc


class _PromptSource:
    """Interactive: invalid input re-prompts, EOF or 'abort' cancels."""

    def __init__(self, prompt: Callable[[str], str], echo: Callable[[str], None]):
        self.prompt = prompt
        self.echo = echo

    def ask(self, step: str, parse: Callable[[str], Any], *,
            required: bool = True, default: Any = None) -> Any:
        label = step if required else f"{step} (optional)"
        while True:
            try:
                raw = self.prompt(f"{label}: ").strip()
            except (EOFError, KeyboardInterrupt):
                raise AbortedByUser("input closed") from None
            if raw.lower() == "abort":
                raise AbortedByUser("cancelled at step " + step)
            if not raw:
                if not required:
                    return default
                self.echo("a value is required (or type 'abort')")
                continue
            try:
                return parse(raw)
            except ValueError as exc:
                self.echo(f"invalid: {exc}")


def _details_steps(kind: DisasterKind, source) -> KindDetails:
    if kind is DisasterKind.FLOOD:
        return FloodDetails(water_level_cm=source.ask(
            "water_level_cm", _parse_water_level))
    if kind is DisasterKind.BUSH_FIRE:
        return BushFireDetails(area_estimate_m2=source.ask(
            "area_estimate_m2", _parse_non_negative, required=False))
    if kind is DisasterKind.INFRASTRUCTURE:
        return InfrastructureDetails(facility=source.ask("facility", _parse_text))
    assert kind in DISEASE_KINDS
    return DiseaseDetails(
        disease_kind=kind,
        disease_name=source.ask("disease_name", _parse_text),
        affected_count=source.ask("affected_count", _parse_non_negative),
    )


def build_report(answers: dict[str, Any] | None = None, *,
                 resolver: Resolver,
                 prompt: Callable[[str], str] = input,
                 echo: Callable[[str], None] = print) -> DisasterReport:
    """Walk the reporting steps and return an unsubmitted report.

    With ``answers`` the walk is non-interactive; without, the user is
    prompted step by step. ``resolver`` maps (lat, lon) to region ids
    when the answers do not name them.
    """
    source = _AnswerSource(answers) if answers is not None \
        else _PromptSource(prompt, echo)

    kind = source.ask("kind", _parse_kind)
    details = _details_steps(kind, source)
    lat = source.ask("lat", _parse_lat)
    lon = source.ask("lon", _parse_lon)
    description = source.ask("description", str, required=False, default="")
    severity = source.ask("severity", _parse_severity,
                          required=False, default=Severity.MINOR)
    reporter = source.ask("reporter", _parse_text,
                          required=False, default="anonymous")
    phone = source.ask("reporter_phone", str, required=False, default="")

    explicit = answers or {}
    if explicit.get("province_id") and explicit.get("district_id"):
        province = str(explicit["province_id"])
        district = str(explicit["district_id"])
        kumban = explicit.get("kumban_id")
        kumban = str(kumban) if kumban else None
    else:
        located = resolver(lat, lon)
        province = located["province_id"]
        district = located["district_id"]
        kumban = located.get("kumban_id")

    return DisasterReport(
        id="",
        kind=kind,
        details=details,
        location=GeoPoint(lat, lon),
        province_id=province,
        district_id=district,
        kumban_id=kumban,
        reporter=reporter,
        reporter_phone=phone,
        description=description,
        severity=severity,
        created_at=datetime.now(timezone.utc),
    )
