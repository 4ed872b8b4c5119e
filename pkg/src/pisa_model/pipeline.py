"""End-to-end pipeline: parse, match-action stages, scheduler, deparse.

Packets run to completion one at a time up to the scheduler.  After every
``service_interval`` arrivals the scheduler releases one packet; whatever is
still queued at the end of the trace is drained in scheduler order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .actions import execute
from .deparser import deparse
from .packet import InvalidHeaderRef, Packet, PacketDrop, ParsedPacket
from .parser import extract_key, parse
from .scheduler import PacketBuffer, PushResult, RankedEntry, SystolicQueue, make_queue
from .spec import FieldRef, PipelineSpec
from .tables import build_table
from .trace import TraceRecord

DROP_FLAG = FieldRef("meta", "drop")
RANK = FieldRef("meta", "rank")


class Dropped(PacketDrop):
    def __init__(self, reason: str, message: str = ""):
        super().__init__(message or reason)
        self.reason = reason


@dataclass
class RunResult:
    outputs: list[TraceRecord]
    stats: dict = field(default_factory=dict)

    @property
    def forwarded(self) -> list[TraceRecord]:
        return [r for r in self.outputs if r.disposition == "forwarded"]


class Pipeline:
    def __init__(self, spec: PipelineSpec, seed: int | None = None):
        self.spec = spec
        self.seed = spec.seed if seed is None else seed
        self.tables = {t.name: build_table(t, self.seed) for t in spec.tables}
        self.table_stats = {t.name: Counter(hits=0, misses=0) for t in spec.tables}

    def _apply_table(self, name: str, pp: ParsedPacket) -> ParsedPacket:
        decl = self.spec.table_map[name]
        try:
            key = extract_key(pp, decl.key_fields, decl.key_width)
            hit = self.tables[name].lookup(key)
        except InvalidHeaderRef:
            hit = None
        if hit is not None:
            self.table_stats[name]["hits"] += 1
            action, data = hit
        else:
            self.table_stats[name]["misses"] += 1
            if decl.on_miss == "drop":
                raise Dropped("miss", f"table {name} missed")
            if decl.default_action is None:
                return pp
            action, data = decl.default_action, decl.default_data
        return execute(self.spec.action_map[action], pp, data)

    def ingress(self, pkt: Packet) -> ParsedPacket:
        """Parse and run the control stages; raises a PacketDrop subclass to drop."""
        pp = parse(pkt, self.spec.parse_graph, self.spec.header_map)
        for stage in self.spec.control:
            if not all(pp.is_valid(h) for h in stage.when_valid):
                continue
            if stage.table is not None:
                pp = self._apply_table(stage.table, pp)
            else:
                pp = execute(self.spec.action_map[stage.action], pp, stage.data)
            if pp.get(DROP_FLAG):
                raise Dropped("action", "packet marked for drop")
        return pp

    def process(self, pkt: Packet) -> bytes:
        """Single packet through ingress and deparser, bypassing the scheduler."""
        return deparse(self.ingress(pkt), self.spec.deparse_sequence)

    def run(self, packets) -> RunResult:
        sched = self.spec.scheduler
        queue = make_queue(sched.kind, sched.capacity_entries, sched.rank_bits)
        systolic = isinstance(queue, SystolicQueue)
        buf = PacketBuffer(sched.buffer_bytes)
        outputs: list[TraceRecord] = []
        drops: Counter = Counter()
        n_in = 0
        queue_high = 0

        def emit(pkt: Packet, data: bytes, disposition: str) -> None:
            outputs.append(TraceRecord("out", len(outputs), pkt.ingress_port, data,
                                       pkt.arrival_seq, disposition))

        def drop(pkt: Packet, reason: str) -> None:
            drops[reason] += 1
            emit(pkt, pkt.data, f"dropped({reason})")

        def service() -> bool:
            entry = queue.pop()
            if entry is None:
                return False
            if systolic:
                queue.step()
            out = buf.release(entry.pkt)
            emit(out, out.data, "forwarded")
            return True

        for item in packets:
            pkt = item.packet() if isinstance(item, TraceRecord) else item
            n_in += 1
            try:
                pp = self.ingress(pkt)
            except PacketDrop as exc:
                drop(pkt, exc.reason)
            else:
                data = deparse(pp, self.spec.deparse_sequence)
                if not data:
                    drop(pkt, "empty")
                    data = None
                handle = None if data is None else buf.admit(Packet(data, pkt.arrival_seq, pkt.ingress_port))
                if data is None:
                    pass
                elif handle is None:
                    drop(pkt, "buffer_full")
                elif queue.push(RankedEntry(pp.get(RANK), pkt.arrival_seq, handle)) is PushResult.FULL:
                    buf.release(handle)
                    drop(pkt, "queue_full")
                elif systolic:
                    queue.step()
                queue_high = max(queue_high, len(queue))
            if n_in % sched.service_interval == 0:
                service()
        while service():
            pass

        stats = {
            "packets_in": n_in,
            "forwarded": sum(1 for r in outputs if r.disposition == "forwarded"),
            "dropped": dict(sorted(drops.items())),
            "tables": {k: dict(v) for k, v in self.table_stats.items()},
            "buffer_high_water_bytes": buf.high_water,
            "queue_high_water": queue_high,
        }
        return RunResult(outputs, stats)
