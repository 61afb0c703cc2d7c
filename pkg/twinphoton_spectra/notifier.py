import asyncio
import sys
import time
from datetime import datetime
from typing import Optional

from .config import get_logs_dir
from .errors import (
    CheckFailed,
    ConfigError,
    ExportError,
    ValidationError,
    is_numerical,
)

try:
    from desktop_notifier import DesktopNotifier
except Exception:  # pragma: no cover
    DesktopNotifier = None  # type: ignore

_APP_NAME = "twinphoton"
_LAST_SENT: dict[str, float] = {}


def _details(exc: Exception, context: str = "") -> str:
    base = f"{type(exc).__name__}: {exc}"
    if context:
        return f"{context} | {base}"
    return base


def _now_stamp() -> str:
    return datetime.now().strftime("%Y-%m-%d %H:%M:%S")


def _append_app_log(line: str) -> None:
    try:
        logs_dir = get_logs_dir()
        with open(f"{logs_dir}/app.log", "a", encoding="utf-8") as lf:
            lf.write(line + "\n")
    except Exception:
        pass


def _throttled(key: str, cooldown_sec: int = 900) -> bool:
    now = time.time()
    last = _LAST_SENT.get(key, 0.0)
    if (now - last) < cooldown_sec:
        return True
    _LAST_SENT[key] = now
    return False


def log_event(message: str, echo: bool = False) -> str:
    """Append a stamped line to app.log; print it too when echo is set."""
    line = f"[{_now_stamp()}] {message}"
    _append_app_log(line)
    if echo:
        print(line)
    return line


def _failure_payload(exc: Exception) -> tuple[str, str, str]:
    if isinstance(exc, ValidationError):
        count = len(exc.issues)
        return (
            "TwinPhoton: Invalid Parameters",
            f"{count} validation issue{'s' if count != 1 else ''}",
            "validation-failure",
        )
    if isinstance(exc, ConfigError):
        return (
            "TwinPhoton: Config Error",
            f"bad or missing key {exc.key}",
            "config-failure",
        )
    if isinstance(exc, CheckFailed):
        return (
            "TwinPhoton: Check Failed",
            "numerical self-check did not pass",
            "check-failure",
        )
    if is_numerical(exc):
        return (
            "TwinPhoton: Numerical Error",
            type(exc).__name__,
            "numerical-failure",
        )
    if isinstance(exc, (ExportError, OSError)):
        return (
            "TwinPhoton: Export Failed",
            "could not write output files",
            "io-failure",
        )
    return (
        "TwinPhoton: Failure",
        "A run failed",
        "generic-failure",
    )


def send_notification(title: str, message: str, key: Optional[str] = None) -> None:
    """Send a desktop notification if supported; never raise on failure."""
    if DesktopNotifier is None:
        return
    dedupe_key = key or title
    if _throttled(dedupe_key):
        return

    try:
        notifier = DesktopNotifier(app_name=_APP_NAME)
        coro = notifier.send(title=title, message=message)
        try:
            loop = asyncio.get_running_loop()
        except RuntimeError:
            asyncio.run(coro)
        else:
            loop.create_task(coro)
    except Exception:
        pass


def report_failure(
    exc: Exception,
    context: str = "",
    *,
    cli: bool = True,
    desktop: bool = False,
) -> str:
    """Log, print and optionally notify about a failed run; returns the failure key."""
    title, message, key = _failure_payload(exc)
    stamp = _now_stamp()
    details = _details(exc, context)
    _append_app_log(f"[{stamp}] {title}: {message} | {details}")
    if cli:
        print(f"[{stamp}] {title}: {message}", file=sys.stderr)
        print(f"Error Details: {details}", file=sys.stderr)
        if isinstance(exc, ValidationError):
            for issue in exc.issues:
                where = f" ({issue.key})" if issue.key else ""
                print(f"  - {type(issue).__name__}{where}: {issue}", file=sys.stderr)
    if desktop:
        send_notification(title=title, message=f"{stamp}: {message}", key=key)
    return key
