"""Bi-directional disaster alerting: structured field reports in,
routed push alerts out, lossless CAP 1.1 interchange at the edges."""

from .model import (
    Actor,
    DisasterKind,
    DisasterReport,
    GeoPoint,
    LifecycleState,
    Role,
    Severity,
    legal_actions,
    validate_report,
)

__version__ = "0.1.0"

__all__ = [
    "Actor",
    "DisasterKind",
    "DisasterReport",
    "GeoPoint",
    "LifecycleState",
    "Role",
    "Severity",
    "legal_actions",
    "validate_report",
    "__version__",
]
