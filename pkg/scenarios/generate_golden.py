#!/usr/bin/env python3
"""Regenerate the scenario traces, table population files and expected outputs.

This script deliberately imports nothing from ``pisa_model``.  Packets are
assembled field by field with ``struct`` and the expected outputs come from a
separate reference model that edits bytes at offsets known from
construction, recomputes IPv4 checksums with its own routine and replays the
scheduler with plain sorting.  The committed ``*.expected.trace`` files are
therefore an independent check on the pipeline, not a snapshot of it.

    python scenarios/generate_golden.py
"""

from __future__ import annotations

import ipaddress
import random
import struct
from collections import deque
from pathlib import Path

HERE = Path(__file__).resolve().parent
TRACES = HERE / "traces"
N_PACKETS = 100


def ip(s: str) -> int:
    return int(ipaddress.IPv4Address(s))


def internet_checksum(data: bytes) -> int:
    s = 0
    for i in range(0, len(data), 2):
        s += (data[i] << 8) | data[i + 1]
    s = (s & 0xFFFF) + (s >> 16)
    s = (s & 0xFFFF) + (s >> 16)
    return (~s) & 0xFFFF


def eth(dst: int, src: int, ethertype: int) -> bytes:
    return dst.to_bytes(6, "big") + src.to_bytes(6, "big") + struct.pack("!H", ethertype)


def vlan(vid: int, ethertype: int, pcp: int = 0) -> bytes:
    return struct.pack("!HH", (pcp << 13) | vid, ethertype)


def ipv4(dscp, ident, ttl, proto, src, dst, total_len) -> bytes:
    hdr = struct.pack("!BBHHHBBHII", 0x45, dscp, total_len, ident, 0x4000, ttl, proto, 0, src, dst)
    return hdr[:10] + struct.pack("!H", internet_checksum(hdr)) + hdr[12:]


def ipv6(next_hdr, hop, payload_len, src: int, dst: int) -> bytes:
    return struct.pack("!IHBB", 6 << 28, payload_len, next_hdr, hop) + src.to_bytes(16, "big") + dst.to_bytes(16, "big")


def udp(sport, dport, length) -> bytes:
    return struct.pack("!HHHH", sport, dport, length, 0)


def tcp(sport, dport) -> bytes:
    return struct.pack("!HHIIBBHHH", sport, dport, 1, 0, 0x50, 0x10, 1024, 0, 0)


def vxlan(vni: int) -> bytes:
    return struct.pack("!II", 0x08000000, vni << 8)


class Pkt:
    """Packet bytes plus what the builder knows about them."""

    def __init__(self, data: bytes, kind: str, ip_off=None, flow=None):
        self.data = bytearray(data)
        self.kind = kind
        self.ip_off = ip_off  # outer IPv4 header offset
        self.flow = flow      # (src, dst, sport, dport, ident, proto, dscp) when IPv4+UDP


def simple_udp(rng, src, dst, sport, dport, ident, dscp, ttl) -> Pkt:
    payload = bytes(rng.randrange(256) for _ in range(32))
    l4 = udp(sport, dport, 8 + len(payload))
    data = eth(0x0200000000AA, 0x0200000000BB, 0x0800) + ipv4(dscp, ident, ttl, 17, src, dst, 20 + len(l4) + 32) + l4 + payload
    assert len(data) == 74
    return Pkt(data, "udp", 14, (src, dst, sport, dport, ident, 17, dscp))


def vxlan_stack(rng, src, dst, sport, ident, dscp, ttl) -> Pkt:
    """Eth/VLAN/VLAN/IPv4/UDP/VXLAN/Eth/IPv4 with a 24-byte payload: 116 bytes."""
    payload = bytes(rng.randrange(256) for _ in range(24))
    inner = eth(0x0200000000CC, 0x0200000000DD, 0x0800) + ipv4(0, rng.randrange(1, 65536), 64, 6,
                                                               ip("192.0.2.10"), ip("192.0.2.20"), 20 + 24)
    l4_len = 8 + 8 + len(inner) + len(payload)
    outer = (eth(0x0200000000AA, 0x0200000000BB, 0x8100) + vlan(rng.randrange(1, 4095), 0x8100)
             + vlan(rng.randrange(1, 4095), 0x0800) + ipv4(dscp, ident, ttl, 17, src, dst, 20 + l4_len)
             + udp(sport, 4789, l4_len) + vxlan(rng.randrange(1 << 24)))
    data = outer + inner + payload
    assert len(data) == 116
    return Pkt(data, "udp", 22, (src, dst, sport, 4789, ident, 17, dscp))


def v6_tcp(rng) -> Pkt:
    payload = bytes(rng.randrange(256) for _ in range(16))
    data = (eth(0x0200000000AA, 0x0200000000BB, 0x8100) + vlan(7, 0x86DD)
            + ipv6(6, 64, 20 + len(payload), rng.getrandbits(128), rng.getrandbits(128))
            + tcp(rng.randrange(1024, 65536), 443) + payload)
    return Pkt(data, "v6")


def unknown_ethertype(rng) -> Pkt:
    return Pkt(eth(0x0200000000AA, 0x0200000000BB, 0x88B5) + bytes(46), "no_transition")


def truncated(rng) -> Pkt:
    return Pkt(bytes(rng.randrange(256) for _ in range(10)), "truncated")


# -- scenario packet mixes ---------------------------------------------------

SRC_POOL = ["192.168.1.7", "192.168.1.200", "172.16.0.5", "10.9.8.7", "198.51.100.3"]
DST_POOL = ["10.1.2.3", "10.200.0.9", "172.20.1.1", "203.0.113.40"]


def random_l3(rng, ttl=None, ident=None, dscp=None, dport=None, mix="full"):
    """One packet of the multi-protocol mix used by T1..T5."""
    src, dst = ip(rng.choice(SRC_POOL)), ip(rng.choice(DST_POOL))
    ttl = rng.randrange(2, 65) if ttl is None else ttl
    ident = rng.randrange(65536) if ident is None else ident
    dscp = rng.choice([0, 0x28, 0x48, 0xB8, 0x10]) if dscp is None else dscp
    r = rng.random()
    if mix == "t0" or r < 0.40:
        dport = rng.choice([53, 80, 443, rng.randrange(1024, 65536)]) if dport is None else dport
        return simple_udp(rng, src, dst, rng.randrange(1024, 65536), dport, ident, dscp, ttl)
    if r < 0.85:
        return vxlan_stack(rng, src, dst, rng.randrange(1024, 65536), ident, dscp, ttl)
    if r < 0.93:
        return v6_tcp(rng)
    if r < 0.97:
        return unknown_ethertype(rng)
    return truncated(rng)


# -- reference model ---------------------------------------------------------

def flow_key(flow) -> int:
    src, dst, sport, dport, ident, proto, dscp = flow
    return (src << 96) | (dst << 64) | (sport << 48) | (dport << 32) | (ident << 16) | (proto << 8) | dscp


def ref_ttl(p: Pkt):
    """Decrement TTL, drop at zero, rewrite the checksum."""
    o = p.ip_off
    ttl = (p.data[o + 8] - 1) & 0xFF
    if ttl == 0:
        return "action"
    p.data[o + 8] = ttl
    p.data[o + 10:o + 12] = b"\0\0"
    p.data[o + 10:o + 12] = struct.pack("!H", internet_checksum(bytes(p.data[o:o + 20])))
    return None


def ref_common(p: Pkt):
    if p.kind in ("no_transition", "truncated"):
        return p.kind
    return None


def make_process(name, em=None, acl=None):
    def process(p: Pkt):
        reason = ref_common(p)
        if reason:
            return reason, 0
        rank = 0
        if name in ("t0", "t1"):
            return None, 0
        if p.flow is not None:
            if name == "t3":
                hit = em.get(flow_key(p.flow))
                if hit is not None:
                    p.data[0:6] = hit.to_bytes(6, "big")
            elif name == "t4":
                key = flow_key(p.flow)
                best = None
                for i, (v, m, prio, dscp) in enumerate(acl):
                    if key & m == v and (best is None or prio > acl[best][2]):
                        best = i
                if best is None:
                    return "miss", 0
                p.data[p.ip_off + 1] = acl[best][3]
            elif name == "t5":
                _, _, _, dport, ident, _, dscp = p.flow
                ttl = p.data[p.ip_off + 8]
                rank = 100 if dscp >= 32 else 200
                rank = rank if dport == 4789 else 300
                rank = 50 if ttl < 16 else rank
                rank = rank if ident != 0 else 1000
        if p.ip_off is not None:
            reason = ref_ttl(p)
            if reason:
                return reason, 0
        return None, rank
    return process


def replay(packets, process, kind="fifo", capacity=64, interval=1):
    """Scheduler replay; returns output records (seq, arrival, port, bytes, disposition)."""
    out = []
    queue = []  # (rank, arrival, port, bytes)
    fifo = deque()

    def emit(arr, port, data, disp):
        out.append((len(out), arr, port, bytes(data), disp))

    def service():
        if kind == "pifo":
            if not queue:
                return False
            queue.sort()
            rank, arr, port, data = queue.pop(0)
        else:
            if not fifo:
                return False
            arr, port, data = fifo.popleft()
        emit(arr, port, data, "forwarded")
        return True

    for n, (seq, port, p) in enumerate(packets, 1):
        original = bytes(p.data)
        reason, rank = process(p)
        if reason:
            emit(seq, port, original, f"dropped({reason})")
        elif len(queue) + len(fifo) >= capacity:
            emit(seq, port, original, "dropped(queue_full)")
        elif kind == "pifo":
            queue.append((rank, seq, port, bytes(p.data)))
        else:
            fifo.append((seq, port, bytes(p.data)))
        if n % interval == 0:
            service()
    while service():
        pass
    return out


def write_in(path: Path, packets) -> None:
    lines = ["# pisa-trace v1"]
    for seq, port, p in packets:
        lines += [f"# seq={seq} port={port}", bytes(p.data).hex()]
    path.write_text("\n".join(lines) + "\n")


def write_out(path: Path, records) -> None:
    lines = ["# pisa-trace v1"]
    for seq, arr, port, data, disp in records:
        lines += [f"# seq={seq} arrival={arr} port={port} dir=out disposition={disp}", data.hex()]
    path.write_text("\n".join(lines) + "\n")


def build(name, make_packet, process, **sched):
    rng = random.Random(f"golden-{name}")
    packets = [(seq, rng.randrange(12), make_packet(rng)) for seq in range(N_PACKETS)]
    write_in(TRACES / f"{name}.in.trace", packets)
    snapshot = [(s, port, Pkt(bytes(p.data), p.kind, p.ip_off, p.flow)) for s, port, p in packets]
    write_out(TRACES / f"{name}.expected.trace", replay(snapshot, process, **sched))


def t3_flows():
    rng = random.Random("t3-flows")
    flows = []
    for i in range(40):
        dport = 4789 if i % 2 else rng.choice([53, 80, 443])
        flows.append((ip(rng.choice(SRC_POOL)), ip(rng.choice(DST_POOL)), rng.randrange(1024, 65536),
                      dport, rng.randrange(65536), 17, rng.choice([0, 0x28, 0xB8])))
    table = {flow_key(f): 0x020000001000 + i for i, f in enumerate(flows[:25])}
    lines = ["# flow_em population: key = src dst sport dport ident proto diffserv"]
    lines += [f"exact 0x{k:032x} 0 set_dmac 0x{v:012x}" for k, v in table.items()]
    (HERE / "t3_flows.tbl").write_text("\n".join(lines) + "\n")
    return flows, table


def t4_rules():
    F = dict(src=(96, 32), dst=(64, 32), sport=(48, 16), dport=(32, 16), ident=(16, 16), proto=(8, 8), dscp=(0, 8))

    def rule(prio, dscp_out, **fields):
        v = m = 0
        for k, (val, bits) in fields.items():
            shift, width = F[k]
            fm = ((1 << width) - 1) ^ ((1 << (width - bits)) - 1) if bits else 0
            v |= (val & fm) << shift
            m |= fm << shift
        return v, m, prio, dscp_out

    rules = [
        rule(10, 0x2E, dst=(ip("10.0.0.0"), 8), proto=(17, 8)),
        rule(20, 0x0A, src=(ip("192.168.1.0"), 24)),
        rule(5, 0x12, dport=(4789, 16)),
        rule(100, 0x00, src=(ip("10.9.8.7"), 32), dst=(ip("10.1.2.3"), 32), dport=(53, 16), proto=(17, 8)),
        rule(1, 0xB8, dscp=(0xB8, 8)),
    ]
    lines = ["# acl population: key = src dst sport dport ident proto diffserv"]
    lines += [f"ternary 0x{v:032x}/0x{m:032x} {p} set_dscp 0x{d:02x}" for v, m, p, d in rules]
    (HERE / "t4_acl.tbl").write_text("\n".join(lines) + "\n")
    return rules


def main():
    TRACES.mkdir(exist_ok=True)
    build("t0", lambda r: random_l3(r, mix="t0"), make_process("t0"))
    build("t1", random_l3, make_process("t1"))
    build("t2", lambda r: random_l3(r, ttl=1 if r.random() < 0.15 else None), make_process("t2"))

    flows, table = t3_flows()

    def t3_packet(r):
        p = random_l3(r)
        if p.flow is None:
            return p
        src, dst, sport, dport, ident, proto, dscp = r.choice([f for f in flows if (f[3] == 4789) == (p.flow[3] == 4789)])
        if dport == 4789:
            return vxlan_stack(r, src, dst, sport, ident, dscp, r.randrange(2, 65))
        return simple_udp(r, src, dst, sport, dport, ident, dscp, r.randrange(2, 65))

    build("t3", t3_packet, make_process("t3", em=table))
    acl = t4_rules()

    def t4_packet(r):
        # non-VXLAN UDP so that the dport rule does not catch everything
        src, dst = ip(r.choice(SRC_POOL)), ip(r.choice(DST_POOL))
        if r.random() < 0.8:
            return simple_udp(r, src, dst, r.randrange(1024, 65536), r.choice([53, 80, 443]),
                              r.randrange(65536), r.choice([0, 0x28, 0xB8]), r.randrange(2, 65))
        return random_l3(r)

    build("t4", t4_packet, make_process("t4", acl=acl), kind="fifo", capacity=32)
    build("t5", lambda r: random_l3(r, ttl=r.randrange(2, 40), ident=0 if r.random() < 0.1 else None),
          make_process("t5"), kind="pifo", capacity=32, interval=2)


if __name__ == "__main__":
    main()
