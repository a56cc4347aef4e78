"""Coloured console messages for humans.

Messages are prefixed by their kind:
    '>>> ' progress
    '!!! ' error
    '--- ' note
    '*** ' important
    '  - ' list item
"""
import sys

import blessed

PREFIX_COLORS = (
    ("!!! ", "orangered2"),
    (">>> ", "aquamarine3"),
    ("--- ", "darkolivegreen3"),
    ("*** ", "gold"),
    ("  - ", "wheat"),
)

_term = None


def _terminal():
    global _term
    if _term is None:
        _term = blessed.Terminal()
    return _term


def format_message(message: str, styled: bool = True) -> str:
    if not styled:
        return message
    term = _terminal()
    for prefix, color in PREFIX_COLORS:
        if message.startswith(prefix):
            paint = getattr(term, color)
            return f"{paint(prefix)}{message[len(prefix):]}"
    return message


def echo(message: str):
    """Print message, prefixes are coloured on a terminal."""
    stream = sys.stdout
    styled = bool(sys.__stdout__) and stream.isatty()
    print(format_message(message, styled), file=stream)


def echo_table(rows, columns):
    """Print rows of dicts as aligned table of list items."""
    widths = {
        column: max(
            [len(column)] + [len(_cell(row.get(column))) for row in rows]
        )
        for column in columns
    }
    echo("  - " + "  ".join(column.ljust(widths[column])
                            for column in columns))
    for row in rows:
        echo("  - " + "  ".join(
            _cell(row.get(column)).ljust(widths[column]) for column in columns
        ))


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)
