"""Hex-per-line packet traces, plus a reader for classic pcap files.

Each record is a ``#`` comment line carrying ``key=value`` attributes
followed by one line of hex bytes::

    # pisa-trace v1
    # seq=0 port=1
    ffffffffffff0000...
    # seq=0 arrival=4 port=1 dir=out disposition=forwarded
    ffffffffffff0000...

Input records need ``seq`` and ``port``.  Output records also carry the
packet's ``arrival`` sequence number and its disposition; ``seq`` on output
counts emitted records.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

from .packet import Packet

HEADER_LINE = "# pisa-trace v1"


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class TraceRecord:
    direction: str
    seq: int
    port: int
    data: bytes
    arrival_seq: int | None = None
    disposition: str = "forwarded"

    @property
    def hex(self) -> str:
        return self.data.hex()

    def packet(self) -> Packet:
        return Packet(self.data, self.seq if self.arrival_seq is None else self.arrival_seq, self.port)


def _attrs(line: str, lineno: int) -> dict[str, str]:
    out = {}
    for tok in line.lstrip("#").split():
        key, sep, value = tok.partition("=")
        if not sep:
            raise TraceError(f"line {lineno}: expected key=value, got {tok!r}")
        out[key] = value
    return out


def parse_trace(text: str) -> list[TraceRecord]:
    records: list[TraceRecord] = []
    pending: tuple[dict, int] | None = None
    last: dict[str, int] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "=" not in line:
                continue
            if pending is not None:
                raise TraceError(f"line {n}: record header without packet bytes (line {pending[1]})")
            pending = (_attrs(line, n), n)
            continue
        if pending is None:
            raise TraceError(f"line {n}: packet bytes without a '# seq=.. port=..' header")
        attrs, hn = pending
        pending = None
        if len(line) % 2:
            raise TraceError(f"line {n}: odd number of hex digits")
        try:
            data = bytes.fromhex(line)
            seq, port = int(attrs["seq"]), int(attrs["port"])
            arrival = int(attrs["arrival"]) if "arrival" in attrs else None
        except KeyError as exc:
            raise TraceError(f"line {hn}: missing attribute {exc.args[0]!r}") from None
        except ValueError as exc:
            raise TraceError(f"line {n}: {exc}") from None
        if not data:
            raise TraceError(f"line {n}: empty packet")
        direction = attrs.get("dir", "in")
        if direction not in ("in", "out"):
            raise TraceError(f"line {hn}: dir must be 'in' or 'out'")
        if direction in last and seq <= last[direction]:
            raise TraceError(f"line {hn}: seq {seq} not increasing")
        last[direction] = seq
        records.append(TraceRecord(direction, seq, port, data, arrival, attrs.get("disposition", "forwarded")))
    if pending is not None:
        raise TraceError(f"line {pending[1]}: record header without packet bytes")
    return records


def read_trace(path: str | Path) -> list[TraceRecord]:
    return parse_trace(Path(path).read_text(encoding="utf-8"))


def format_trace(records) -> str:
    lines = [HEADER_LINE]
    for r in records:
        if r.direction == "in":
            lines.append(f"# seq={r.seq} port={r.port}")
        else:
            lines.append(f"# seq={r.seq} arrival={r.arrival_seq} port={r.port} dir=out "
                         f"disposition={r.disposition}")
        lines.append(r.hex)
    return "\n".join(lines) + "\n"


def read_pcap(source: str | Path | bytes, port: int = 0) -> list[TraceRecord]:
    """Input records from a classic libpcap capture (micro- or nanosecond, either byte order)."""
    data = source if isinstance(source, bytes) else Path(source).read_bytes()
    if len(data) < 24:
        raise TraceError("pcap file shorter than its global header")
    magic = data[:4]
    if magic in (b"\xd4\xc3\xb2\xa1", b"\x4d\x3c\xb2\xa1"):
        endian = "<"
    elif magic in (b"\xa1\xb2\xc3\xd4", b"\xa1\xb2\x3c\x4d"):
        endian = ">"
    else:
        raise TraceError("not a classic pcap file")
    off = 24
    records = []
    while off < len(data):
        if off + 16 > len(data):
            raise TraceError("truncated pcap record header")
        _, _, incl, _ = struct.unpack(endian + "IIII", data[off:off + 16])
        off += 16
        if off + incl > len(data):
            raise TraceError("truncated pcap record")
        records.append(TraceRecord("in", len(records), port, data[off:off + incl]))
        off += incl
    return records
