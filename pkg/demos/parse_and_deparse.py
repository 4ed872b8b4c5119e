"""
Parsing a packet and putting it back together
=============================================

"""

from pathlib import Path

from pisa_model import Packet, deparse, load_pipeline_spec_file, parse

scenarios = Path(__file__).resolve().parents[1] / "scenarios"
spec = load_pipeline_spec_file(scenarios / "t1.json")

# a VXLAN frame from the T1 input trace: two VLAN tags, outer IPv4/UDP, inner Ethernet/IPv4
lines = (scenarios / "traces" / "t1.in.trace").read_text().splitlines()
frames = [bytes.fromhex(l) for l in lines if l and not l.startswith("#")]
data = next(f for f in frames if len(f) == 116)

pp = parse(Packet(data), spec.parse_graph, spec.header_map)
for h in pp.valid_headers():
    print(f"{h:15s} {pp.header_bytes(h).hex()}")
print("payload", len(pp.payload), "bytes")

# with the validity set untouched the deparser gives back the original bytes
assert deparse(pp, spec.deparse_sequence) == data

# dropping the outer VLAN tag removes 4 bytes and keeps everything else in order
pp.validity["vlan_outer"] = False
out = deparse(pp, spec.deparse_sequence)
print(len(data), "->", len(out), "bytes")
