"""Report and CSV formatting shared by the commands."""

import csv
from collections.abc import Iterable, Sequence
from typing import TextIO

Value = float | bool | str | None

UNDEFINED = "undefined"


def format_value(value: Value) -> str:
    """Shortest round-trip decimal for floats; ``inf``/``nan`` tokens; ``true``/``false``."""
    if value is None:
        return UNDEFINED
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(float(value))


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Value]]) -> None:
    """Comma-separated rows with ``\\n`` line endings and a mandatory header."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value) for value in row])


def write_report(stream: TextIO, items: Iterable[tuple[str, Value]]) -> None:
    """``name value`` lines of a text report."""
    for name, value in items:
        stream.write(f"{name} {format_value(value)}\n")
