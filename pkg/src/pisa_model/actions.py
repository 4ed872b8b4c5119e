"""Action interpreter for the primitive operation set.

Arithmetic wraps modulo the destination width, comparisons are unsigned,
shift amounts are constants.  There is no division and no variable shift.
"""

from __future__ import annotations

import operator

from .bits import mask
from .packet import InvalidFieldAccess, ParsedPacket
from .spec import ActionProgram, Const, DataRef, FieldRef, PrimitiveOp

_RELATIONS = {
    "==": operator.eq, "!=": operator.ne, "<": operator.lt,
    ">": operator.gt, "<=": operator.le, ">=": operator.ge,
}
_BINARY = {
    "add": operator.add, "sub": operator.sub, "and": operator.and_,
    "or": operator.or_, "xor": operator.xor,
}


def ipv4_checksum(header: bytes) -> int:
    """Internet checksum of a 20-byte IPv4 header (checksum field zeroed)."""
    if len(header) != 20:
        raise ValueError(f"IPv4 header must be 20 bytes, got {len(header)}")
    total = sum(int.from_bytes(header[i:i + 2], "big") for i in range(0, 20, 2))
    while total >> 16:
        total = (total & 0xFFFF) + (total >> 16)
    return ~total & 0xFFFF


def _read(op, pp: ParsedPacket, data: dict[str, int]) -> int:
    if isinstance(op, Const):
        return op.value
    if isinstance(op, DataRef):
        return data[op.param]
    return pp.get(op)


def _unpack_data(prog: ActionProgram, action_data: int) -> dict[str, int]:
    return {name: (action_data >> shift) & mask(width)
            for name, (shift, width) in prog.param_layout().items()}


def _step(s: PrimitiveOp, pp: ParsedPacket, data: dict[str, int]) -> None:
    op = s.opcode
    if op == "set_valid":
        if not pp.is_valid(s.dst):
            pp.header_values.setdefault(s.dst, 0)
            pp.validity[s.dst] = True
        return
    if op == "set_invalid":
        pp.validity[s.dst] = False
        return
    if not pp.is_valid(s.dst.header):
        raise InvalidFieldAccess(f"write of {s.dst} in invalid header")
    if op == "checksum_ipv4":
        hdr = s.args[0]
        pp.set(s.dst, 0)
        pp.set(s.dst, ipv4_checksum(pp.header_bytes(hdr)))
        return
    if op == "select":
        c = s.cond
        taken = _RELATIONS[c.relation](_read(c.lhs, pp, data), _read(c.rhs, pp, data))
        value = _read(s.args[0] if taken else s.args[1], pp, data)
    elif op in _BINARY:
        value = _BINARY[op](_read(s.args[0], pp, data), _read(s.args[1], pp, data))
    elif op == "not":
        value = ~_read(s.args[0], pp, data)
    elif op == "shl_const":
        value = _read(s.args[0], pp, data) << s.args[1].value
    elif op == "shr_const":
        value = _read(s.args[0], pp, data) >> s.args[1].value
    elif op == "set_field":
        value = _read(s.args[0], pp, data)
    else:
        raise ValueError(f"unknown opcode {op!r}")
    pp.set(s.dst, value)  # set() masks to the field width


def execute(prog: ActionProgram, pp: ParsedPacket, action_data: int = 0) -> ParsedPacket:
    """Run ``prog`` on a copy of ``pp``; each step sees its predecessors' writes."""
    out = pp.copy()
    data = _unpack_data(prog, action_data)
    for s in prog.steps:
        _step(s, out, data)
    return out
