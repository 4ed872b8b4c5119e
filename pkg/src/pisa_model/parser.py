"""Parse-graph walker: raw bytes in, extracted header vectors out."""

from __future__ import annotations

from typing import Iterable, Mapping

from .packet import InvalidHeaderRef, NoTransition, Packet, ParsedPacket, Truncated
from .spec import ACCEPT, META, FieldRef, HeaderType, ParseGraph


def _as_map(headers) -> Mapping[str, HeaderType]:
    if isinstance(headers, Mapping):
        return headers
    return {h.name: h for h in headers}


def parse(pkt: Packet, graph: ParseGraph, headers: Iterable[HeaderType] | Mapping[str, HeaderType]) -> ParsedPacket:
    """Walk ``graph`` from its start node over ``pkt.data``.

    Raises Truncated when a header runs past the end of the packet and
    NoTransition when a selector value has no edge and the node has no
    default.  A header type named ``meta`` is initialised to zero and valid.
    """
    layouts = _as_map(headers)
    pp = ParsedPacket(layouts, origin=pkt)
    if META in layouts:
        pp.header_values[META] = 0
        pp.validity[META] = True
    data = pkt.data
    cursor = 0
    node = graph.start
    while node != ACCEPT:
        if node in pp.validity:
            raise ValueError(f"parse graph revisits {node}; graph is not a DAG")
        h = layouts[node]
        end = cursor + h.byte_len
        if end > len(data):
            raise Truncated(f"{len(data)}-byte packet too short for {node} at offset {cursor}")
        pp.header_values[node] = int.from_bytes(data[cursor:end], "big")
        pp.validity[node] = True
        cursor = end
        state = graph.state(node)
        if state.select is None:
            node = state.default or ACCEPT
            continue
        value = pp.get(FieldRef(node, state.select))
        for t in state.transitions:
            if t.value == value:
                node = t.next
                break
        else:
            if state.default is None:
                raise NoTransition(f"{node}.{state.select}={value:#x} has no transition")
            node = state.default
    pp.payload = data[cursor:]
    return pp


def extract_key(pp: ParsedPacket, key_fields: Iterable[FieldRef], width: int) -> int:
    """Concatenate key fields, first field most significant."""
    key = 0
    total = 0
    for ref in key_fields:
        if not pp.is_valid(ref.header):
            raise InvalidHeaderRef(f"key field {ref} belongs to an invalid header")
        w = pp.layouts[ref.header].field_width(ref.field)
        key = (key << w) | pp.get(ref)
        total += w
    if total != width:
        raise ValueError(f"key fields span {total} bits, expected {width}")
    return key
