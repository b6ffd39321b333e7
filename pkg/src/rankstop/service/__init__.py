from .config import ServiceConfig, parse_config
from .server import create_app, ledger_from_records, scoreboard_from_records
from .store import SessionStore

__all__ = [
    "ServiceConfig",
    "SessionStore",
    "create_app",
    "ledger_from_records",
    "parse_config",
    "scoreboard_from_records",
]
