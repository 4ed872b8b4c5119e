import pytest
from hypothesis import given
from hypothesis import strategies as st

from pisa_model import (InvalidHeaderRef, NoTransition, Packet, Truncated, deparse, extract_key,
                        load_pipeline_spec_file, parse)
from pisa_model.spec import FieldRef

import pktbuild as pb
from conftest import SCENARIOS

T0 = load_pipeline_spec_file(SCENARIOS / "t0.json")
T1 = load_pipeline_spec_file(SCENARIOS / "t1.json")


def run_parse(spec, data):
    return parse(Packet(data), spec.parse_graph, spec.header_map)


def test_t0_packet_three_headers():
    data = pb.t0_packet()
    assert len(data) == 74
    pp = run_parse(T0, data)
    assert [h for h in pp.valid_headers() if h != "meta"] == ["ethernet", "ipv4", "udp"]
    assert pp.payload == bytes(range(32))
    assert pp.get(FieldRef("ipv4", "dst_addr")) == 0xC0000201
    assert pp.get(FieldRef("udp", "dst_port")) == 53


def test_truncated_at_ethernet():
    with pytest.raises(Truncated, match="ethernet"):
        run_parse(T0, bytes(10))


def test_unknown_ethertype_has_no_transition():
    with pytest.raises(NoTransition) as err:
        run_parse(T0, pb.eth(0x88B5) + bytes(50))
    assert err.value.reason == "no_transition"


def test_default_edge_accepts():
    data = pb.eth() + pb.ipv4(proto=6) + bytes(20)
    pp = run_parse(T0, data)
    assert not pp.is_valid("udp") and len(pp.payload) == 20


def test_extract_key_examples():
    pp = run_parse(T0, pb.t0_packet())
    assert extract_key(pp, [FieldRef("ipv4", "dst_addr")], 32) == 0xC0000201
    assert extract_key(pp, [FieldRef("ethernet", "ethertype"), FieldRef("ipv4", "protocol")], 24) == 0x080011


def test_extract_key_invalid_header():
    pp = run_parse(T1, pb.t0_packet())
    with pytest.raises(InvalidHeaderRef):
        extract_key(pp, [FieldRef("vlan_outer", "vid")], 12)


def test_vlan_stack_and_node_bound():
    data = pb.eth(0x8100) + pb.vlan(5, 0x8100) + pb.vlan(6, 0x0800) + pb.t0_packet()[14:]
    pp = run_parse(T1, data)
    hdrs = [h for h in pp.valid_headers() if h != "meta"]
    assert hdrs == ["ethernet", "vlan_outer", "vlan_inner", "ipv4", "udp"]
    assert len(hdrs) <= len(T1.parse_graph.states)


def test_parse_is_deterministic():
    data = pb.t0_packet()
    a, b = run_parse(T1, data), run_parse(T1, data)
    assert a.header_values == b.header_values and a.payload == b.payload


@given(st.binary(min_size=0, max_size=64), st.integers(1, 64), st.integers(0, 255))
def test_round_trip_any_payload(payload, ttl, dscp):
    data = pb.eth() + pb.ipv4(ttl=ttl, dscp=dscp) + pb.udp() + payload
    for spec in (T0, T1):
        assert deparse(run_parse(spec, data), spec.deparse_sequence) == data


def test_deparse_drops_invalidated_vlan():
    inner = pb.t0_packet()[14:]
    data = pb.eth(0x8100) + pb.vlan(5, 0x0800) + inner
    pp = run_parse(T1, data)
    pp.validity["vlan_outer"] = False
    out = deparse(pp, T1.deparse_sequence)
    assert out == data[:14] + data[18:]
    assert len(out) == len(data) - 4


def test_deparse_all_invalid_payload_only():
    pp = run_parse(T0, pb.t0_packet())
    for h in list(pp.validity):
        pp.validity[h] = False
    assert deparse(pp, T0.deparse_sequence) == bytes(range(32))


def test_deparse_length_order_and_idempotence():
    pp = run_parse(T1, pb.t0_packet())
    seq = T1.deparse_sequence
    out = deparse(pp, seq)
    assert out == deparse(pp, seq)
    valid = [h for h in seq if pp.is_valid(h)]
    assert len(out) == sum(T1.header_map[h].byte_len for h in valid) + len(pp.payload)


def test_deparse_uses_sequence_order_not_parse_order():
    pp = run_parse(T0, pb.t0_packet())
    swapped = deparse(pp, ["udp", "ipv4", "ethernet"])
    assert swapped[:8] == pp.header_bytes("udp")
