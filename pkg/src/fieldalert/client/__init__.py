from .api import (
    LinkProfile,
    LossyLink,
    ServerClient,
    backoff_delays_ms,
    submit_with_retry,
    watch,
)
from .builder import build_report

__all__ = [
    "LinkProfile",
    "LossyLink",
    "ServerClient",
    "backoff_delays_ms",
    "build_report",
    "submit_with_retry",
    "watch",
]
