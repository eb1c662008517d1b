"""Exception taxonomy shared across the package.

Lookup failures, protocol violations, and workflow refusals each get a
distinct class so the HTTP layer can map them to stable status codes.
"""

from __future__ import annotations


class FieldAlertError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------- lifecycle

class IllegalTransition(FieldAlertError):
    """Requested lifecycle transition is not a legal edge."""


# ------------------------------------------------------------------ lookups

class UnknownReport(FieldAlertError):
    pass


class UnknownActor(FieldAlertError):
    pass


class UnknownRegion(FieldAlertError):
    pass


class UnknownSubscriber(FieldAlertError):
    pass


# ---------------------------------------------------------------------- geo

class OutOfCoverage(FieldAlertError):
    """Point lies in no known province."""


class DegenerateRing(FieldAlertError):
    """Polygon ring has fewer than 3 points or zero area."""


class RegionFileError(FieldAlertError):
    """Region file violates a structural invariant."""


# -------------------------------------------------------------- verification

class DuplicateVerification(FieldAlertError):
    pass


class ReportClosed(FieldAlertError):
    """Verification attempted on a merged or resolved report."""


# ------------------------------------------------------------------- server

class ValidationFailed(FieldAlertError):
    """Report failed validation; carries the violation list."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class Forbidden(FieldAlertError):
    """Actor's role does not permit the action."""


class MergeCycle(FieldAlertError):
    """Merge into self or into an already-merged report."""


class CorruptLog(FieldAlertError):
    """Event log has a sequence gap or an undecodable record."""


# ---------------------------------------------------------------- CAP codec

class CapError(FieldAlertError):
    pass


class MalformedXml(CapError):
    pass


class SchemaViolation(CapError):
    """Missing required CAP element or illegal enumeration value."""

    def __init__(self, element: str, message: str = ""):
        super().__init__(message or f"schema violation at element '{element}'")
        self.element = element


class InvariantViolation(CapError):
    """Alert model violates a CAP invariant; cannot be serialized."""


class MissingLocation(CapError):
    """Imported alert carries no usable location."""


# ------------------------------------------------------------------- client

class TransportError(FieldAlertError):
    """Request did not complete (connection failure or simulated drop)."""


class LinkDropped(TransportError):
    """Simulated lossy link swallowed the request or the response."""


class Unreachable(FieldAlertError):
    """Retries exhausted without a successful round-trip."""


class AnswerError(FieldAlertError):
    """Answer file is missing or has an invalid value for a prompt step."""

    def __init__(self, step: str, message: str = ""):
        super().__init__(message or f"missing or invalid answer for step '{step}'")
        self.step = step


class AbortedByUser(FieldAlertError):
    """Interactive report assembly was cancelled."""
