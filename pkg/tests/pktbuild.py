"""Hand-built packets for the unit tests (struct only, no package code)."""

import struct


def csum(hdr: bytes) -> int:
    s = sum(struct.unpack(f"!{len(hdr) // 2}H", hdr))
    while s >> 16:
        s = (s & 0xFFFF) + (s >> 16)
    return ~s & 0xFFFF


def eth(ethertype=0x0800, dst=0x0200000000AA, src=0x0200000000BB) -> bytes:
    return dst.to_bytes(6, "big") + src.to_bytes(6, "big") + struct.pack("!H", ethertype)


def vlan(vid=10, ethertype=0x0800) -> bytes:
    return struct.pack("!HH", vid, ethertype)


def ipv4(proto=17, ttl=64, src=0xC0A80001, dst=0xC0000201, ident=0x1234, dscp=0, total=60) -> bytes:
    h = struct.pack("!BBHHHBBHII", 0x45, dscp, total, ident, 0, ttl, proto, 0, src, dst)
    return h[:10] + struct.pack("!H", csum(h)) + h[12:]


def udp(sport=1000, dport=53, length=40) -> bytes:
    return struct.pack("!HHHH", sport, dport, length, 0)


def t0_packet(payload=bytes(range(32)), **ip) -> bytes:
    """Eth/IPv4/UDP with a 32-byte payload: 74 bytes."""
    return eth() + ipv4(**ip) + udp() + payload
