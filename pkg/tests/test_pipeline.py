import struct
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pisa_model import Packet, Pipeline, ipv4_checksum, load_pipeline_spec_file
from pisa_model.trace import TraceError, TraceRecord, format_trace, parse_trace, read_pcap, read_trace

import pktbuild as pb
from conftest import SCENARIOS


def spec(name):
    return load_pipeline_spec_file(SCENARIOS / f"{name}.json")


def packets(datas):
    return [Packet(d, i, i % 4) for i, d in enumerate(datas)]


def test_t0_identity():
    datas = [pb.t0_packet(ident=i) for i in range(100)]
    res = Pipeline(spec("t0")).run(packets(datas))
    assert res.stats["forwarded"] == 100 and res.stats["dropped"] == {}
    assert [r.data for r in res.outputs] == datas
    assert [r.arrival_seq for r in res.outputs] == list(range(100))


def test_t2_ttl_and_checksum():
    p = Pipeline(spec("t2"))
    out = p.process(Packet(pb.t0_packet(ttl=64)))
    assert out[22] == 63 and ipv4_checksum(out[14:34]) == 0
    res = p.run(packets([pb.t0_packet(ttl=1), pb.t0_packet(ttl=2)]))
    assert res.stats["dropped"] == {"action": 1}
    assert res.outputs[0].disposition == "dropped(action)" and res.outputs[0].data == pb.t0_packet(ttl=1)


def test_t4_without_rules_drops_every_ip_udp_packet():
    s = spec("t4")
    s = replace(s, tables=(replace(s.tables[0], entries=()),))
    res = Pipeline(s).run(packets([pb.t0_packet(ident=i) for i in range(20)]))
    assert res.stats["dropped"] == {"miss": 20} and res.stats["tables"]["acl"]["misses"] == 20
    assert all(r.disposition == "dropped(miss)" for r in res.outputs)


def test_t3_hit_rewrites_dmac():
    s = spec("t3")
    entry = s.tables[0].entries[0]
    key = entry.value
    src, dst = key >> 96, (key >> 64) & 0xFFFFFFFF
    sport, dport = (key >> 48) & 0xFFFF, (key >> 32) & 0xFFFF
    ident, proto, dscp = (key >> 16) & 0xFFFF, (key >> 8) & 0xFF, key & 0xFF
    data = pb.eth() + pb.ipv4(src=src, dst=dst, ident=ident, proto=proto, dscp=dscp) + pb.udp(sport, dport)
    if dport == 4789:
        data += bytes(8) + pb.eth(0x9999)
    out = Pipeline(s).process(Packet(data))
    assert int.from_bytes(out[:6], "big") == entry.data


def test_parse_failures_are_drops():
    res = Pipeline(spec("t1")).run(packets([bytes(10), pb.eth(0x1234) + bytes(40), pb.t0_packet()]))
    assert res.stats["dropped"] == {"no_transition": 1, "truncated": 1}
    assert res.stats["packets_in"] == 3 and res.stats["forwarded"] == 1


def test_queue_full_and_buffer_full():
    s = spec("t5")
    tight = replace(s, scheduler=replace(s.scheduler, capacity_entries=2, service_interval=10))
    res = Pipeline(tight).run(packets([pb.t0_packet(ident=i + 1) for i in range(5)]))
    assert res.stats["dropped"] == {"queue_full": 3} and res.stats["queue_high_water"] == 2
    small = replace(s, scheduler=replace(s.scheduler, buffer_bytes=150, service_interval=10))
    res = Pipeline(small).run(packets([pb.t0_packet(ident=i + 1) for i in range(3)]))
    assert res.stats["dropped"] == {"buffer_full": 1} and res.stats["buffer_high_water_bytes"] == 148


def test_pifo_orders_by_rank():
    s = spec("t5")
    s = replace(s, scheduler=replace(s.scheduler, service_interval=100))
    datas = [pb.t0_packet(ident=0), pb.t0_packet(ident=5, ttl=10), pb.t0_packet(ident=5, dscp=40)]
    res = Pipeline(s).run(packets(datas))
    assert [r.arrival_seq for r in res.outputs] == [1, 2, 0]  # ranks 50, 300, 1000


def test_systolic_matches_pifo_in_pipeline():
    s = spec("t5")
    trace = read_trace(SCENARIOS / "traces" / "t5.in.trace")
    a = Pipeline(s).run(trace)
    b = Pipeline(replace(s, scheduler=replace(s.scheduler, kind="systolic"))).run(trace)
    assert format_trace(a.outputs) == format_trace(b.outputs)


@pytest.mark.parametrize("name", [f"t{i}" for i in range(6)])
def test_conservation_and_determinism(name):
    s = spec(name)
    trace = read_trace(SCENARIOS / "traces" / f"{name}.in.trace")
    a, b = Pipeline(s).run(trace), Pipeline(s).run(trace)
    assert a.outputs == b.outputs and a.stats == b.stats
    st_ = a.stats
    assert st_["packets_in"] == st_["forwarded"] + sum(st_["dropped"].values()) == len(trace)
    assert sorted(r.arrival_seq for r in a.outputs) == list(range(len(trace)))


def test_seed_override_does_not_change_results():
    s = spec("t3")
    trace = read_trace(SCENARIOS / "traces" / "t3.in.trace")
    assert Pipeline(s).run(trace).outputs == Pipeline(s, seed=12345).run(trace).outputs


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 255), min_size=1, max_size=30))
def test_t2_random_ttls(ttls):
    res = Pipeline(spec("t2")).run(packets([pb.t0_packet(ttl=t) for t in ttls]))
    assert res.stats["dropped"].get("action", 0) == ttls.count(1)
    for r in res.forwarded:
        assert ipv4_checksum(r.data[14:34]) == 0


# -- traces --------------------------------------------------------------------------

def test_trace_round_trip():
    recs = [TraceRecord("in", 0, 3, b"\x01\x02"), TraceRecord("in", 1, 0, b"\xff")]
    assert parse_trace(format_trace(recs)) == recs


def test_trace_errors():
    for text in ("# seq=0 port=0\nabc\n", "0102\n", "# seq=1 port=0\n01\n# seq=1 port=0\n02\n",
                 "# seq=0 port=0\nzz\n"):
        with pytest.raises(TraceError):
            parse_trace(text)


def _pcap(frames, magic=0xA1B2C3D4, endian="<"):
    out = struct.pack(endian + "IHHiIII", magic, 2, 4, 0, 0, 65535, 1)
    for f in frames:
        out += struct.pack(endian + "IIII", 0, 0, len(f), len(f)) + f
    return out


def test_read_pcap_both_byte_orders():
    frames = [pb.t0_packet(), bytes(60)]
    for endian in "<>":
        recs = read_pcap(_pcap(frames, endian=endian), port=2)
        assert [r.data for r in recs] == frames and {r.port for r in recs} == {2}
    with pytest.raises(TraceError):
        read_pcap(b"\x00" * 30)
    with pytest.raises(TraceError):
        read_pcap(_pcap(frames)[:-5])
