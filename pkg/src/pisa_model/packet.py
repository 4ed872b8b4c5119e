"""Packets, parsed packets and the per-packet drop outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .bits import mask
from .spec import FieldRef, HeaderType


class PacketDrop(Exception):
    """A per-packet outcome that removes the packet from the pipeline."""

    reason = "drop"


class Truncated(PacketDrop):
    reason = "truncated"


class NoTransition(PacketDrop):
    reason = "no_transition"


class InvalidHeaderRef(PacketDrop):
    reason = "invalid_header"


class InvalidFieldAccess(PacketDrop):
    reason = "invalid_field_access"


@dataclass(frozen=True)
class Packet:
    data: bytes
    arrival_seq: int = 0
    ingress_port: int = 0

    def __post_init__(self):
        if len(self.data) < 1:
            raise ValueError("packet must hold at least one byte")


@dataclass
class ParsedPacket:
    """Header bit-vectors and validity for one packet.

    ``header_values`` holds one int per header that has ever been valid; the
    int is the header's bit-vector, first field in the most significant bits.
    """

    layouts: Mapping[str, HeaderType]
    header_values: dict[str, int] = field(default_factory=dict)
    validity: dict[str, bool] = field(default_factory=dict)
    payload: bytes = b""
    origin: Packet | None = None

    def copy(self) -> "ParsedPacket":
        return ParsedPacket(self.layouts, dict(self.header_values), dict(self.validity),
                            self.payload, self.origin)

    def is_valid(self, header: str) -> bool:
        return self.validity.get(header, False)

    def valid_headers(self) -> list[str]:
        return [h for h, v in self.validity.items() if v]

    def get(self, ref: FieldRef) -> int:
        if not self.is_valid(ref.header):
            raise InvalidFieldAccess(f"read of {ref} in invalid header")
        shift, width = self.layouts[ref.header].layout[ref.field]
        return (self.header_values[ref.header] >> shift) & mask(width)

    def set(self, ref: FieldRef, value: int) -> None:
        if not self.is_valid(ref.header):
            raise InvalidFieldAccess(f"write of {ref} in invalid header")
        shift, width = self.layouts[ref.header].layout[ref.field]
        m = mask(width) << shift
        self.header_values[ref.header] = (self.header_values[ref.header] & ~m) | ((value & mask(width)) << shift)

    def header_bytes(self, header: str) -> bytes:
        return self.header_values[header].to_bytes(self.layouts[header].byte_len, "big")

    @property
    def meta(self) -> dict[str, int]:
        h = self.layouts["meta"]
        return {name: self.get(FieldRef("meta", name)) for name, _ in h.fields}
