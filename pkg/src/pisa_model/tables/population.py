"""Table population files.

One entry per line::

    <kind> <key/value>/<mask|len> <priority> <action> <data-hex>

``kind`` is ``exact``, ``ternary`` or ``lpm``.  Exact keys may omit the
``/<len>`` suffix (when present it must equal the key width).  Ternary
entries give ``value/mask``; LPM entries give ``value/prefix_length``.
Dotted-quad values are accepted for 32-bit keys.  ``-`` stands for a
zero priority or empty action data.  ``#`` starts a comment.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass

from ..bits import mask as bitmask
from ..bits import parse_int

KINDS = ("exact", "ternary", "lpm")


class PopulationError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class TableEntry:
    """A single population record, independent of the backing structure."""

    kind: str
    value: int
    mask: int | None = None
    length: int | None = None
    priority: int = 0
    action: str = ""
    data: int = 0

    def format(self, key_width: int) -> str:
        digits = (key_width + 3) // 4
        val = f"0x{self.value:0{digits}x}"
        if self.kind == "exact":
            match = val
        elif self.kind == "ternary":
            match = f"{val}/0x{self.mask:0{digits}x}"
        else:
            match = f"{val}/{self.length}"
        data = f"0x{self.data:x}" if self.data else "-"
        return f"{self.kind} {match} {self.priority} {self.action} {data}"


def _value(text: str, key_width: int) -> int:
    if text.count(".") == 3 and key_width == 32:
        return int(ipaddress.IPv4Address(text))
    return parse_int(text)


def parse_entry(line: str, key_width: int, lineno: int | None = None) -> TableEntry:
    parts = line.split()
    if len(parts) != 5:
        raise PopulationError(f"expected 5 columns, got {len(parts)}", lineno)
    kind, match, prio, action, data = parts
    if kind not in KINDS:
        raise PopulationError(f"unknown entry kind {kind!r}", lineno)
    try:
        value_text, _, suffix = match.partition("/")
        value = _value(value_text, key_width)
        priority = 0 if prio == "-" else parse_int(prio)
        data_val = 0 if data == "-" else parse_int(data)
        m = length = None
        if kind == "exact":
            if suffix and parse_int(suffix) != key_width:
                raise PopulationError(f"exact key length {suffix} != key width {key_width}", lineno)
        elif not suffix:
            raise PopulationError(f"{kind} entry needs a /mask or /length", lineno)
        elif kind == "ternary":
            m = parse_int(suffix)
        else:
            length = int(suffix, 10)
    except ValueError as exc:
        if isinstance(exc, PopulationError):
            raise
        raise PopulationError(str(exc), lineno) from None
    if value < 0 or value > bitmask(key_width):
        raise PopulationError(f"value wider than {key_width} bits", lineno)
    if priority < 0 or data_val < 0:
        raise PopulationError("negative priority or data", lineno)
    return TableEntry(kind, value, m, length, priority, action, data_val)


def parse_entries(lines, key_width: int) -> list[TableEntry]:
    if isinstance(lines, str):
        lines = lines.splitlines()
    out = []
    for n, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].strip()
        if text:
            out.append(parse_entry(text, key_width, n))
    return out
