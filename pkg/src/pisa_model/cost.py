"""Analytical cost model for mapping the pipeline onto an FPGA.

Covers streaming throughput (bus width x bus frequency), transposed-memory
TCAM overhead, scheduler buffer sizing from RTT and from pipeline
replication, hard vs soft TCAM transistor counts and PIFO range-CAM size.
:func:`pipeline_report` drives all of them from a PipelineSpec.

Byte figures are SI (1 MB = 10**6 bytes).  Frequencies are inputs taken
from the platform table; nothing here predicts what a synthesis run would
achieve.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .spec import PipelineSpec, PlatformConfig, SpecError, validate_spec
from .tables import BinaryTrie, Prefix
from .tables.ternary import transposed_memory_bits

TARGET_FREQ_HZ = 500e6
FREQ_KNEE_BITS = 1280
PEAK_WIDTH_BITS = 2048
PEAK_THROUGHPUT_BPS = 786e9
PEAK_FREQ_HZ = PEAK_THROUGHPUT_BPS / PEAK_WIDTH_BITS  # 383,789,062.5 Hz

EXACT_MATCH_EFFICIENCY = Fraction(4, 5)
QUOTED_PRACTICAL_OVERHEAD = (8.4, 65.0)
HARD_TCAM_CELL_TRANSISTORS = 16
SRAM_CELL_TRANSISTORS = 6
SOFT_TCAM_MEMORY_OVERHEAD = 10
FF_RANGE_CAM_OVERHEAD = 20
FF_OVERESTIMATE_FACTOR = 3
REFERENCE_TCAM = (48, 128)
BUS_WIDTHS = tuple(range(64, 2049, 64))


# -- throughput ----------------------------------------------------------------

def throughput(width_bits: float, freq_hz: float) -> float:
    return width_bits * freq_hz


def default_freq_table() -> dict[int, float]:
    """500 MHz up to the 1280-bit knee, then linear down to the frequency that
    gives 786 Gb/s at 2048 bits."""
    out = {}
    for w in BUS_WIDTHS:
        if w <= FREQ_KNEE_BITS:
            out[w] = TARGET_FREQ_HZ
        else:
            t = (w - FREQ_KNEE_BITS) / (PEAK_WIDTH_BITS - FREQ_KNEE_BITS)
            out[w] = TARGET_FREQ_HZ + t * (PEAK_FREQ_HZ - TARGET_FREQ_HZ)
    out[PEAK_WIDTH_BITS] = PEAK_FREQ_HZ
    return out


def check_freq_table(table: dict[int, float]) -> None:
    tail = [table[w] for w in sorted(table) if w >= FREQ_KNEE_BITS]
    if any(b > a for a, b in zip(tail, tail[1:])):
        raise ValueError("frequency table increases beyond the 1280-bit knee")


_DEFAULT_FREQ = default_freq_table()
check_freq_table(_DEFAULT_FREQ)


def bus_frequency(platform: PlatformConfig, width: int | None = None) -> tuple[float, str]:
    """(frequency in Hz, provenance label) for ``width`` on ``platform``.

    Labels: ``target`` (default table, flat 500 MHz region), ``anchor`` (the
    786 Gb/s calibration point), ``interpolated`` (linear between anchors),
    ``configured`` (taken verbatim from a user table).
    """
    width = platform.bus_width_bits if width is None else width
    if platform.freq_table is None:
        table = _DEFAULT_FREQ
        if width in table:
            if width == PEAK_WIDTH_BITS:
                return table[width], "anchor"
            return table[width], "target" if width <= FREQ_KNEE_BITS else "interpolated"
        label = "interpolated"
    else:
        table = dict(platform.freq_table)
        if width in table:
            return table[width], "configured"
        label = "interpolated"
    widths = sorted(table)
    if width <= widths[0]:
        return table[widths[0]], "extrapolated"
    if width >= widths[-1]:
        return table[widths[-1]], "extrapolated"
    hi = next(w for w in widths if w > width)
    lo = max(w for w in widths if w < width)
    t = (width - lo) / (hi - lo)
    return table[lo] + t * (table[hi] - table[lo]), label


# -- match memories ------------------------------------------------------------

def tcam_overhead_formula(w: int) -> float:
    """Memory overhead 2^w / w of a transposed-memory TCAM with w-bit chunks."""
    if w < 1:
        raise ValueError("w must be >= 1")
    return (1 << w) / w


def tcam_overhead_practical(key_width: int, capacity: int, primitive_depth: int) -> float:
    """Overhead when chunk width is forced by the memory primitive depth."""
    w = primitive_depth.bit_length() - 1
    if primitive_depth < 2 or 1 << w != primitive_depth:
        raise ValueError("primitive depth must be a power of two >= 2")
    bits = transposed_memory_bits(key_width, capacity, w)
    return bits / (capacity * key_width)


def exact_match_bits(capacity: int, key_width: int, data_bits: int) -> int:
    return math.ceil(Fraction(capacity * (key_width + data_bits)) / EXACT_MATCH_EFFICIENCY)


def lpm_node_bits(node_count: int, data_bits: int) -> int:
    """Two child pointers, a valid flag and the action data per trie node."""
    ptr = max(1, math.ceil(math.log2(max(2, node_count))))
    return 2 * ptr + 1 + data_bits


# -- buffers -------------------------------------------------------------------

def _exact(x: float) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def rtt_buffer_bytes(rtt_s: float, rate_bps: float, n_interfaces: int = 1) -> int:
    """Bytes in flight over one RTT on ``n_interfaces`` links, rounded up."""
    return math.ceil(n_interfaces * _exact(rtt_s) * _exact(rate_bps) / 8)


def replication_buffers(ports: int, pipes: int, max_pkt_bytes: int) -> tuple[int, int]:
    """(per-port buffer, total buffer) for a dispatcher feeding ``pipes`` pipelines."""
    if pipes < 1 or ports < pipes:
        raise ValueError("need pipes >= 1 and ports >= pipes")
    per_port = -(-ports // pipes) * max_pkt_bytes
    return per_port, 2 * ports * per_port


# -- silicon -------------------------------------------------------------------

def tcam_transistors(depth: int, width: int) -> tuple[int, int, float]:
    """(hard TCAM, SRAM soft TCAM, soft/hard) transistor counts; priority encoder excluded."""
    bits = depth * width
    hard = bits * HARD_TCAM_CELL_TRANSISTORS
    soft = bits * SOFT_TCAM_MEMORY_OVERHEAD * SRAM_CELL_TRANSISTORS
    return hard, soft, soft / hard


def pifo_cam_bits(flows: int, rank_bits: int) -> int:
    """Range-search CAM size: one (lo, hi) rank pair per flow."""
    return flows * rank_bits * 2


def effective_range_cam_overhead() -> float:
    return FF_RANGE_CAM_OVERHEAD / FF_OVERESTIMATE_FACTOR


# -- report ----------------------------------------------------------------------

@dataclass
class TableCost:
    name: str
    kind: str
    key_width: int
    capacity: int
    data_bits: int
    memory_bits: int
    overhead_ratio: float
    details: dict = field(default_factory=dict)


@dataclass
class CostReport:
    spec_name: str
    bus_width_bits: int
    frequency_hz: float
    frequency_source: str
    pipes: int
    throughput_per_pipe_bps: float
    throughput_aggregate_bps: float
    tables: list[TableCost]
    total_table_bits: int
    buffers: dict
    transistors: dict
    pifo_cam: dict
    notes: list[str]

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _table_cost(spec: PipelineSpec, t) -> TableCost:
    data_bits = max((spec.action_map[a].data_width for a in t.actions), default=0)
    nominal = t.capacity * t.key_width
    details: dict = {}
    if t.kind == "exact":
        bits = exact_match_bits(t.capacity, t.key_width, data_bits)
        details["efficiency_divisor"] = float(EXACT_MATCH_EFFICIENCY)
    elif t.kind == "ternary":
        w = t.chunk_width
        bits = transposed_memory_bits(t.key_width, t.capacity, w)
        hard, soft, ratio = tcam_transistors(t.capacity, t.key_width)
        details = {
            "chunk_width": w,
            "chunks": t.chunks,
            "overhead_formula": tcam_overhead_formula(w),
            "overhead_lutram": tcam_overhead_practical(t.key_width, t.capacity, spec.platform.lutram_depth),
            "overhead_bram": tcam_overhead_practical(t.key_width, t.capacity, spec.platform.bram_depth),
            "quoted_practical_range": list(QUOTED_PRACTICAL_OVERHEAD),
            "transistors_hard": hard,
            "transistors_soft": soft,
            "transistor_ratio": ratio,
        }
    else:
        trie = BinaryTrie(t.key_width)
        for e in t.entries:
            trie.insert(Prefix(e.value, e.length, e.action, e.data))
        node_bits = lpm_node_bits(trie.node_count, data_bits)
        bits = trie.node_count * node_bits
        details = {"nodes": trie.node_count, "node_bits": node_bits, "entries": len(t.entries)}
    return TableCost(t.name, t.kind, t.key_width, t.capacity, data_bits, bits, bits / nominal, details)


def pipeline_report(spec: PipelineSpec) -> CostReport:
    violations = validate_spec(spec)
    if violations:
        raise SpecError("invalid spec", [str(v) for v in violations])
    p = spec.platform
    freq, source = bus_frequency(p)
    per_pipe = throughput(p.bus_width_bits, freq)
    tables = [_table_cost(spec, t) for t in spec.tables]

    per_port, total = replication_buffers(p.ports, p.pipes, p.max_pkt_bytes)
    rtt_one = rtt_buffer_bytes(p.rtt_seconds, p.port_rate_bps, 1)
    rtt_all = rtt_buffer_bytes(p.rtt_seconds, p.port_rate_bps, p.ports)
    buffers = {
        "rtt_bytes_per_interface": rtt_one,
        "rtt_bytes_all_interfaces": rtt_all,
        "rtt_quoted_bytes": {"1x100G": 1_200_000, "12x100G": 12_000_000},
        "replication_per_port_bytes": per_port,
        "replication_total_bytes": total,
        "scheduler_buffer_bytes": spec.scheduler.buffer_bytes,
    }
    hard, soft, ratio = tcam_transistors(*REFERENCE_TCAM)
    transistors = {
        "reference_tcam": f"{REFERENCE_TCAM[0]}x{REFERENCE_TCAM[1]}",
        "hard": hard,
        "soft": soft,
        "ratio": ratio,
        "quoted": {"hard": 98_000, "soft": 368_000, "ratio": 3.8},
    }
    cam_bits = pifo_cam_bits(spec.scheduler.capacity_entries, spec.scheduler.rank_bits)
    pifo_cam = {
        "flows": spec.scheduler.capacity_entries,
        "rank_bits": spec.scheduler.rank_bits,
        "bits": cam_bits,
        "reference_bits_1024x16": pifo_cam_bits(1024, 16),
        "flip_flop_overhead_reported": FF_RANGE_CAM_OVERHEAD,
        "effective_sram_relative_overhead": effective_range_cam_overhead(),
    }

    notes = [
        "Functional results ignore bus segmentation; width and frequency affect only this report.",
        "Logic resources are modeled as linear in bus width (resource proxy = width / 64).",
        "Synthesis results such as LUT counts and clock periods are not modeled, nor is the deparser's resource share.",
        "RTT buffer formula gives 1.25 MB per 100G interface; the quoted figures are 1.2 MB and 12 MB for 12 interfaces.",
        "Transposed TCAM overhead formula 2^w/w gives 6.4 (w=5) and 56.9 (w=9); the quoted practical range is 8.4x to 65x.",
    ]
    if source != "configured":
        origin = "the default calibration" if p.freq_table is None else "the configured table"
        notes.append(f"Bus frequency {freq / 1e6:.3f} MHz at {p.bus_width_bits} bits is a '{source}' value "
                     f"from {origin}, not a measurement.")
    return CostReport(
        spec_name=spec.name,
        bus_width_bits=p.bus_width_bits,
        frequency_hz=freq,
        frequency_source=source,
        pipes=p.pipes,
        throughput_per_pipe_bps=per_pipe,
        throughput_aggregate_bps=p.pipes * per_pipe,
        tables=tables,
        total_table_bits=sum(t.memory_bits for t in tables),
        buffers=buffers,
        transistors=transistors,
        pifo_cam=pifo_cam,
        notes=notes,
    )


def render_text(report: CostReport) -> str:
    rows = [
        ("spec", report.spec_name),
        ("bus width", f"{report.bus_width_bits} bits"),
        ("bus frequency", f"{report.frequency_hz / 1e6:.3f} MHz ({report.frequency_source})"),
        ("throughput / pipe", f"{report.throughput_per_pipe_bps / 1e9:.3f} Gb/s"),
        ("pipes", str(report.pipes)),
        ("throughput total", f"{report.throughput_aggregate_bps / 1e9:.3f} Gb/s"),
    ]
    for t in report.tables:
        rows.append((f"table {t.name}", f"{t.kind} {t.capacity}x{t.key_width}: {t.memory_bits:,} bits "
                                          f"(overhead {t.overhead_ratio:.3f})"))
        if t.kind == "ternary":
            d = t.details
            rows.append(("  overhead 2^w/w", f"{d['overhead_formula']:.3f} (w={d['chunk_width']})"))
            rows.append(("  overhead LUTRAM/BRAM", f"{d['overhead_lutram']:.3f} / {d['overhead_bram']:.3f}"))
            lo, hi = d["quoted_practical_range"]
            rows.append(("  quoted practical range", f"{lo}x to {hi}x"))
    rows.append(("table memory total", f"{report.total_table_bits:,} bits"))
    b = report.buffers
    rows += [
        ("RTT buffer / interface", f"{b['rtt_bytes_per_interface']:,} B"),
        ("RTT buffer all ports", f"{b['rtt_bytes_all_interfaces']:,} B"),
        ("replication / port", f"{b['replication_per_port_bytes']:,} B"),
        ("replication total", f"{b['replication_total_bytes']:,} B"),
    ]
    tr = report.transistors
    rows += [
        (f"hard TCAM {tr['reference_tcam']}", f"{tr['hard']:,} transistors"),
        (f"soft TCAM {tr['reference_tcam']}", f"{tr['soft']:,} transistors"),
        ("soft / hard", f"{tr['ratio']:.2f}x"),
        ("PIFO range CAM", f"{report.pifo_cam['bits']:,} bits "
                           f"({report.pifo_cam['flows']} x ({report.pifo_cam['rank_bits']} x 2))"),
        ("range CAM overhead", f"{report.pifo_cam['effective_sram_relative_overhead']:.2f}x vs SRAM"),
    ]
    width = max(len(k) for k, _ in rows)
    lines = [f"{k:<{width}}  {v}" for k, v in rows]
    lines.append("")
    lines += [f"note: {n}" for n in report.notes]
    return "\n".join(lines) + "\n"


def bus_sweep(platform: PlatformConfig, widths=BUS_WIDTHS) -> list[dict]:
    rows = []
    for w in widths:
        f, src = bus_frequency(platform, w)
        rows.append({
            "bus_width_bits": w,
            "frequency_hz": f,
            "frequency_source": src,
            "throughput_bps": throughput(w, f),
            "resource_proxy": w / 64,
        })
    return rows


def sweep_csv(platform: PlatformConfig, widths=BUS_WIDTHS) -> str:
    buf = io.StringIO()
    rows = bus_sweep(platform, widths)
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
