from .config import ServerConfig, load_config
from .core import AlertServer, Subscription
from .events import AuditAction, AuditEvent, PushMessage, encode_summary
from .http import make_http_server

__all__ = [
    "AlertServer",
    "AuditAction",
    "AuditEvent",
    "PushMessage",
    "ServerConfig",
    "Subscription",
    "encode_summary",
    "load_config",
    "make_http_server",
]
