"""Deparser: emit valid headers in declared order, then the payload."""

from __future__ import annotations

from typing import Iterable

from .packet import ParsedPacket


def deparse(pp: ParsedPacket, sequence: Iterable[str]) -> bytes:
    out = bytearray()
    for name in sequence:
        if pp.is_valid(name):
            out += pp.header_bytes(name)
    out += pp.payload
    return bytes(out)
