"""Terminal Output Formatting Package"""

import os
import sys
from typing import Sequence


class Colors:
    """ANSI escape codes for terminal colors."""
    RESET = '\033[0m'
    BOLD = '\033[1m'
    DIM = '\033[2m'
    RED = '\033[31m'
    GREEN = '\033[32m'
    YELLOW = '\033[33m'
    CYAN = '\033[36m'


def _supports_color() -> bool:
    if os.environ.get('NO_COLOR'):
        return False
    if os.environ.get('FORCE_COLOR'):
        return True
    if not hasattr(sys.stdout, 'isatty') or not sys.stdout.isatty():
        return False
    if sys.platform == 'win32':
        try:
            import ctypes
            kernel32 = ctypes.windll.kernel32
            kernel32.SetConsoleMode(kernel32.GetStdHandle(-11), 7)
            return True
        except Exception:
            return False
    return True


def _supports_unicode() -> bool:
    try:
        '✓─'.encode(sys.stdout.encoding or 'utf-8')
        return True
    except (UnicodeEncodeError, LookupError):
        return False


COLORS_ENABLED = _supports_color()
UNICODE_ENABLED = _supports_unicode()

CHECK = '✓' if UNICODE_ENABLED else '[OK]'
CROSS = '✗' if UNICODE_ENABLED else '[X]'
ARROW = '→' if UNICODE_ENABLED else '->'
WARN = '⚠' if UNICODE_ENABLED else '[!]'
RULE = '─' if UNICODE_ENABLED else '-'


def _colorize(text: str, *codes: str) -> str:
    if not COLORS_ENABLED:
        return text
    return f"{''.join(codes)}{text}{Colors.RESET}"


def success(text: str) -> str:
    return _colorize(text, Colors.GREEN)


def error(text: str) -> str:
    return _colorize(text, Colors.RED)


def warning(text: str) -> str:
    return _colorize(text, Colors.YELLOW)


def info(text: str) -> str:
    return _colorize(text, Colors.CYAN)


def dim(text: str) -> str:
    return _colorize(text, Colors.DIM)


def bold(text: str) -> str:
    return _colorize(text, Colors.BOLD)


def print_success(message: str) -> None:
    print(f"{success(CHECK)} {message}")


def print_step(message: str) -> None:
    print(f"{info(ARROW)} {message}")


def print_error(message: str) -> None:
    print(f"{error(CROSS)} {error(message)}", file=sys.stderr)


def print_warning(message: str) -> None:
    print(f"{warning(WARN)} {warning(message)}", file=sys.stderr)


def format_percent(value: float) -> str:
    return f"{100.0 * value:6.2f}%"


def format_table(rows: Sequence[tuple[str, str]], headers: tuple[str, str] = ("run", "MAP")) -> str:
    """Two-column left/right aligned table with a rule under the header."""
    left = max(len(headers[0]), *(len(r[0]) for r in rows)) if rows else len(headers[0])
    right = max(len(headers[1]), *(len(r[1]) for r in rows)) if rows else len(headers[1])
    lines = [
        f"{bold(headers[0].ljust(left))}  {bold(headers[1].rjust(right))}",
        dim(RULE * (left + 2 + right)),
    ]
    lines += [f"{name.ljust(left)}  {value.rjust(right)}" for name, value in rows]
    return "\n".join(lines)


def map_rows(report) -> list[tuple[str, str]]:
    """Table rows of a MetricsReport: single modalities, concatenation baselines, parts, fused."""
    rows = [(f"{name} only", format_percent(value)) for name, value in report.modalities.items()]
    rows += [(f"{name} concat", format_percent(value)) for name, value in report.baselines.items()]
    rows += [(f"Part {name}", format_percent(value)) for name, value in sorted(report.parts.items())]
    rows.append(("fused", format_percent(report.map)))
    return rows


def print_map_summary(report) -> None:
    print(format_table(map_rows(report), headers=(f"MAP@{report.cut}", f"{report.n_labels} IDs")))


__all__ = [
    "Colors", "COLORS_ENABLED", "UNICODE_ENABLED",
    "CHECK", "CROSS", "ARROW", "WARN", "RULE",
    "success", "error", "warning", "info", "dim", "bold",
    "print_success", "print_step", "print_error", "print_warning",
    "format_percent", "format_table", "map_rows", "print_map_summary",
]
