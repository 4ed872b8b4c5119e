"""Pipeline specification: data model, JSON loader/serializer and validator.

A pipeline spec is a single JSON document (``"format_version": 1``) that
declares headers, the parse graph, actions, match tables, the control flow
over them, the deparse order, the scheduler and the target platform.  The
format is described in ``docs/spec-format.md``.

Loading resolves every cross reference and then runs :func:`validate_spec`;
any violation aborts the load with a :class:`SpecError` naming the
offending elements.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Union

from .bits import mask, parse_int
from .tables.population import PopulationError, TableEntry, parse_entries

FORMAT_VERSION = 1
MAX_FIELD_BITS = 128
META = "meta"
START = "start"
ACCEPT = "accept"
RESERVED = {META, START, ACCEPT, "data"}

TABLE_KINDS = ("exact", "ternary", "lpm")
SCHEDULER_KINDS = ("pifo", "systolic", "fifo")
MISS_POLICIES = ("continue", "drop")
RELATIONS = ("==", "!=", "<", ">", "<=", ">=")
BINARY_OPS = ("add", "sub", "and", "or", "xor")
SHIFT_OPS = ("shl_const", "shr_const")
OPCODES = BINARY_OPS + SHIFT_OPS + (
    "not", "set_field", "set_valid", "set_invalid", "select", "checksum_ipv4",
)


class SpecError(ValueError):
    """Raised when a spec document cannot be turned into a valid PipelineSpec."""

    def __init__(self, message: str, diagnostics: list[str] | None = None):
        self.diagnostics = diagnostics or [message]
        super().__init__(message)


@dataclass(frozen=True)
class Violation:
    element: str
    message: str

    def __str__(self) -> str:
        return f"{self.element}: {self.message}"


# -- headers -----------------------------------------------------------------

@dataclass(frozen=True)
class HeaderType:
    name: str
    fields: tuple[tuple[str, int], ...]

    @property
    def total_bits(self) -> int:
        return sum(w for _, w in self.fields)

    @property
    def byte_len(self) -> int:
        return self.total_bits // 8

    @cached_property
    def layout(self) -> dict[str, tuple[int, int]]:
        """field name -> (shift from LSB, width)"""
        out = {}
        pos = self.total_bits
        for name, width in self.fields:
            pos -= width
            out[name] = (pos, width)
        return out

    def has_field(self, name: str) -> bool:
        return name in self.layout

    def field_width(self, name: str) -> int:
        return self.layout[name][1]


@dataclass(frozen=True)
class FieldRef:
    header: str
    field: str

    def __str__(self) -> str:
        return f"{self.header}.{self.field}"


@dataclass(frozen=True)
class DataRef:
    param: str

    def __str__(self) -> str:
        return f"data.{self.param}"


@dataclass(frozen=True)
class Const:
    value: int

    def __str__(self) -> str:
        return hex(self.value)


Operand = Union[FieldRef, DataRef, Const]


# -- parse graph ---------------------------------------------------------------

@dataclass(frozen=True)
class Transition:
    value: int
    next: str


@dataclass(frozen=True)
class ParseState:
    """One DAG node.  A node without a selector follows ``default`` (or accepts
    when there is none); a node with a selector and no default has no
    fall-through edge, so an unmatched value is a NoTransition drop."""

    header: str
    select: str | None = None
    transitions: tuple[Transition, ...] = ()
    default: str | None = None


@dataclass(frozen=True)
class ParseGraph:
    start: str
    states: tuple[ParseState, ...]

    @cached_property
    def by_header(self) -> dict[str, ParseState]:
        return {s.header: s for s in self.states}

    def state(self, header: str) -> ParseState:
        return self.by_header.get(header) or ParseState(header)

    def edges(self) -> list[tuple[str, str | None, int | None, str]]:
        """(from, selector, value, to); default edges carry value None."""
        out: list[tuple[str, str | None, int | None, str]] = [(START, None, None, self.start)]
        for s in self.states:
            for t in s.transitions:
                out.append((s.header, s.select, t.value, t.next))
            if s.default is not None:
                out.append((s.header, s.select, None, s.default))
        return out

    def topological_order(self) -> list[str] | None:
        """Kahn's algorithm over the graph; None when a cycle exists."""
        succ: dict[str, set[str]] = {}
        indeg: dict[str, int] = {}
        for src, _, _, dst in self.edges():
            for n in (src, dst):
                succ.setdefault(n, set())
                indeg.setdefault(n, 0)
            if dst not in succ[src]:
                succ[src].add(dst)
                indeg[dst] += 1
        ready = sorted(n for n, d in indeg.items() if d == 0)
        order = []
        while ready:
            n = ready.pop()
            order.append(n)
            for m in sorted(succ[n]):
                indeg[m] -= 1
                if indeg[m] == 0:
                    ready.append(m)
        return order if len(order) == len(indeg) else None


# -- actions -----------------------------------------------------------------

@dataclass(frozen=True)
class Condition:
    lhs: Operand
    relation: str
    rhs: Operand


@dataclass(frozen=True)
class PrimitiveOp:
    opcode: str
    dst: FieldRef | str  # header name for set_valid / set_invalid
    args: tuple[Any, ...] = ()  # Operands; checksum_ipv4 takes a header name
    cond: Condition | None = None


@dataclass(frozen=True)
class ActionProgram:
    name: str
    steps: tuple[PrimitiveOp, ...]
    params: tuple[tuple[str, int], ...] = ()

    @property
    def data_width(self) -> int:
        return sum(w for _, w in self.params)

    def param_layout(self) -> dict[str, tuple[int, int]]:
        out = {}
        pos = self.data_width
        for name, width in self.params:
            pos -= width
            out[name] = (pos, width)
        return out


# -- tables and control ------------------------------------------------------

@dataclass(frozen=True)
class TableDecl:
    name: str
    kind: str
    key_fields: tuple[FieldRef, ...]
    key_width: int
    capacity: int
    actions: tuple[str, ...]
    chunk_width: int | None = None
    on_miss: str = "continue"
    default_action: str | None = None
    default_data: int = 0
    entries: tuple[TableEntry, ...] = ()

    @property
    def chunks(self) -> int | None:
        if self.chunk_width is None:
            return None
        return math.ceil(self.key_width / self.chunk_width)


@dataclass(frozen=True)
class Stage:
    """One control step: apply a table or run an action unconditionally.
    ``when_valid`` skips the stage unless all listed headers are valid."""

    table: str | None = None
    action: str | None = None
    data: int = 0
    when_valid: tuple[str, ...] = ()


@dataclass(frozen=True)
class SchedulerConfig:
    kind: str = "fifo"
    capacity_entries: int = 64
    rank_bits: int = 16
    buffer_bytes: int = 1_250_000
    service_interval: int = 1


@dataclass(frozen=True)
class PlatformConfig:
    bus_width_bits: int = 2048
    freq_table: tuple[tuple[int, float], ...] | None = None  # None: default calibration
    lutram_depth: int = 32
    bram_depth: int = 512
    ports: int = 12
    port_rate_bps: float = 100e9
    pipes: int = 2
    max_pkt_bytes: int = 1518
    rtt_seconds: float = 100e-6


@dataclass(frozen=True)
class PipelineSpec:
    name: str
    headers: tuple[HeaderType, ...]
    metadata: HeaderType
    parse_graph: ParseGraph
    actions: tuple[ActionProgram, ...]
    tables: tuple[TableDecl, ...]
    control: tuple[Stage, ...]
    deparse_sequence: tuple[str, ...]
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    platform: PlatformConfig = field(default_factory=PlatformConfig)
    seed: int = 0

    @cached_property
    def header_map(self) -> dict[str, HeaderType]:
        out = {h.name: h for h in self.headers}
        out[META] = self.metadata
        return out

    @cached_property
    def action_map(self) -> dict[str, ActionProgram]:
        return {a.name: a for a in self.actions}

    @cached_property
    def table_map(self) -> dict[str, TableDecl]:
        return {t.name: t for t in self.tables}

    def field_width(self, ref: FieldRef) -> int:
        return self.header_map[ref.header].field_width(ref.field)


# -- loading -----------------------------------------------------------------

def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise SpecError(f"{where}: missing key {key!r}")
    return obj[key]


def _int(value, where: str) -> int:
    try:
        return parse_int(value)
    except (ValueError, TypeError):
        raise SpecError(f"{where}: expected an integer, got {value!r}") from None


def _fields(raw, where: str) -> tuple[tuple[str, int], ...]:
    if not isinstance(raw, list):
        raise SpecError(f"{where}: fields must be a list of [name, width] pairs")
    out = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], str)):
            raise SpecError(f"{where}: bad field entry {item!r}")
        out.append((item[0], _int(item[1], f"{where}.{item[0]}")))
    return tuple(out)


def _field_ref(text, where: str) -> FieldRef:
    if not isinstance(text, str) or "." not in text:
        raise SpecError(f"{where}: expected header.field reference, got {text!r}")
    h, f = text.split(".", 1)
    return FieldRef(h, f)


def _operand(raw, where: str) -> Operand:
    if isinstance(raw, int) and not isinstance(raw, bool):
        return Const(raw)
    if isinstance(raw, str):
        if raw[:1].isdigit():
            return Const(_int(raw, where))
        ref = _field_ref(raw, where)
        if ref.header == "data":
            return DataRef(ref.field)
        return ref
    raise SpecError(f"{where}: bad operand {raw!r}")


def _step(raw: dict, where: str) -> PrimitiveOp:
    if not isinstance(raw, dict):
        raise SpecError(f"{where}: step must be an object")
    op = _need(raw, "op", where)
    dst_raw = _need(raw, "dst", where)
    if op in ("set_valid", "set_invalid"):
        return PrimitiveOp(op, dst_raw)
    dst = _field_ref(dst_raw, where)
    args_raw = raw.get("args", [])
    if not isinstance(args_raw, list):
        raise SpecError(f"{where}: args must be a list")
    if op == "checksum_ipv4":
        return PrimitiveOp(op, dst, tuple(args_raw))
    args = tuple(_operand(a, where) for a in args_raw)
    cond = None
    if op == "select":
        c = _need(raw, "cond", where)
        if not (isinstance(c, list) and len(c) == 3):
            raise SpecError(f"{where}: cond must be [lhs, relation, rhs]")
        cond = Condition(_operand(c[0], where), c[1], _operand(c[2], where))
    return PrimitiveOp(op, dst, args, cond)


def _unique(names, what: str) -> None:
    seen = set()
    for n in names:
        if n in seen:
            raise SpecError(f"duplicate {what} name {n!r}")
        seen.add(n)


def _table(raw: dict, base_dir: Path | None) -> TableDecl:
    name = _need(raw, "name", "table")
    where = f"table {name}"
    width = _int(_need(raw, "key_width", where), where)
    if "entries_file" in raw:
        if base_dir is None:
            raise SpecError(f"{where}: entries_file needs a base directory")
        path = base_dir / raw["entries_file"]
        try:
            lines = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise SpecError(f"{where}: cannot read entries file {path}: {exc.strerror}") from None
    else:
        lines = raw.get("entries", [])
    try:
        entries = tuple(parse_entries(lines, width))
    except PopulationError as exc:
        raise SpecError(f"{where}: entries: {exc}") from None
    chunk = raw.get("chunk_width")
    default = raw.get("default_action")
    return TableDecl(
        name=name,
        kind=_need(raw, "kind", where),
        key_fields=tuple(_field_ref(k, where) for k in _need(raw, "key", where)),
        key_width=width,
        capacity=_int(_need(raw, "capacity", where), where),
        actions=tuple(_need(raw, "actions", where)),
        chunk_width=None if chunk is None else _int(chunk, where),
        on_miss=raw.get("on_miss", "continue"),
        default_action=None if default is None else default,
        default_data=_int(raw.get("default_data", 0), where),
        entries=entries,
    )


def _platform(raw: dict) -> PlatformConfig:
    d = PlatformConfig()
    ft = raw.get("freq_table")
    table = None
    if ft is not None:
        table = tuple(sorted((_int(k, "freq_table"), float(v)) for k, v in ft.items()))
    return PlatformConfig(
        bus_width_bits=_int(raw.get("bus_width_bits", d.bus_width_bits), "platform"),
        freq_table=table,
        lutram_depth=_int(raw.get("lutram_depth", d.lutram_depth), "platform"),
        bram_depth=_int(raw.get("bram_depth", d.bram_depth), "platform"),
        ports=_int(raw.get("ports", d.ports), "platform"),
        port_rate_bps=float(raw.get("port_rate_bps", d.port_rate_bps)),
        pipes=_int(raw.get("pipes", d.pipes), "platform"),
        max_pkt_bytes=_int(raw.get("max_pkt_bytes", d.max_pkt_bytes), "platform"),
        rtt_seconds=float(raw.get("rtt_seconds", d.rtt_seconds)),
    )


def spec_from_dict(doc: dict, base_dir: Path | None = None) -> PipelineSpec:
    """Build a PipelineSpec from decoded JSON without validating invariants."""
    if not isinstance(doc, dict):
        raise SpecError("spec document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise SpecError(f"unsupported format_version {version!r} (expected {FORMAT_VERSION})")

    headers = []
    for h in _need(doc, "headers", "spec"):
        name = _need(h, "name", "header")
        headers.append(HeaderType(name, _fields(_need(h, "fields", f"header {name}"), f"header {name}")))
    _unique([h.name for h in headers], "header")

    sched_raw = doc.get("scheduler", {})
    d = SchedulerConfig()
    scheduler = SchedulerConfig(
        kind=sched_raw.get("kind", d.kind),
        capacity_entries=_int(sched_raw.get("capacity_entries", d.capacity_entries), "scheduler"),
        rank_bits=_int(sched_raw.get("rank_bits", d.rank_bits), "scheduler"),
        buffer_bytes=_int(sched_raw.get("buffer_bytes", d.buffer_bytes), "scheduler"),
        service_interval=_int(sched_raw.get("service_interval", d.service_interval), "scheduler"),
    )

    meta_fields = list(_fields(doc.get("metadata", []), "metadata"))
    _unique([n for n, _ in meta_fields], "metadata field")
    declared = {n for n, _ in meta_fields}
    if "drop" not in declared:
        meta_fields.append(("drop", 1))
    if "rank" not in declared:
        meta_fields.append(("rank", scheduler.rank_bits))
    metadata = HeaderType(META, tuple(meta_fields))

    pg = _need(doc, "parse_graph", "spec")
    states = []
    for s in pg.get("states", []):
        hname = _need(s, "header", "parse state")
        where = f"parse state {hname}"
        trans = []
        for t in s.get("transitions", []):
            trans.append(Transition(_int(_need(t, "value", where), where), _need(t, "next", where)))
        states.append(ParseState(hname, s.get("select"), tuple(trans), s.get("default")))
    _unique([s.header for s in states], "parse state")
    graph = ParseGraph(_need(pg, "start", "parse_graph"), tuple(states))

    actions = []
    for a in doc.get("actions", []):
        aname = _need(a, "name", "action")
        where = f"action {aname}"
        steps_raw = _need(a, "steps", where)
        if not isinstance(steps_raw, list):
            raise SpecError(f"{where}: steps must be a list")
        steps = tuple(_step(s, f"{where} step {i}") for i, s in enumerate(steps_raw))
        actions.append(ActionProgram(aname, steps, _fields(a.get("params", []), where)))
    _unique([a.name for a in actions], "action")

    tables = [_table(t, base_dir) for t in doc.get("tables", [])]
    _unique([t.name for t in tables], "table")

    if "control" in doc:
        control = []
        for c in doc["control"]:
            if not isinstance(c, dict) or ("table" in c) == ("action" in c):
                raise SpecError(f"control stage {c!r}: needs exactly one of 'table' or 'action'")
            control.append(Stage(c.get("table"), c.get("action"), _int(c.get("data", 0), "control"),
                                 tuple(c.get("when_valid", ()))))
    else:
        control = [Stage(table=t.name) for t in tables]

    return PipelineSpec(
        name=doc.get("name", "pipeline"),
        headers=tuple(headers),
        metadata=metadata,
        parse_graph=graph,
        actions=tuple(actions),
        tables=tuple(tables),
        control=tuple(control),
        deparse_sequence=tuple(_need(doc, "deparse", "spec")),
        scheduler=scheduler,
        platform=_platform(doc.get("platform", {})),
        seed=_int(doc.get("seed", 0), "seed"),
    )


def load_pipeline_spec(document: str, base_dir: str | Path | None = None) -> PipelineSpec:
    """Decode a spec document and validate the result."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SpecError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        spec = spec_from_dict(doc, Path(base_dir) if base_dir is not None else None)
    except (TypeError, AttributeError) as exc:
        raise SpecError(f"malformed spec structure: {exc}") from None
    report = validate_spec(spec)
    if report:
        lines = [str(v) for v in report]
        raise SpecError("invalid spec:\n  " + "\n  ".join(lines), lines)
    return spec


def load_pipeline_spec_file(path: str | Path) -> PipelineSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    return load_pipeline_spec(text, path.parent)


# -- serialization -----------------------------------------------------------

def _operand_json(op) -> Any:
    if isinstance(op, Const):
        return op.value
    return str(op)


def spec_to_dict(spec: PipelineSpec) -> dict:
    actions = []
    for a in spec.actions:
        steps_json = []
        for s in a.steps:
            d: dict[str, Any] = {"op": s.opcode, "dst": str(s.dst)}
            if s.opcode == "checksum_ipv4":
                d["args"] = list(s.args)
            elif s.args:
                d["args"] = [_operand_json(x) for x in s.args]
            if s.cond is not None:
                d["cond"] = [_operand_json(s.cond.lhs), s.cond.relation, _operand_json(s.cond.rhs)]
            steps_json.append(d)
        actions.append({"name": a.name, "params": [list(p) for p in a.params], "steps": steps_json})
    tables = []
    for t in spec.tables:
        d = {
            "name": t.name, "kind": t.kind, "key": [str(k) for k in t.key_fields],
            "key_width": t.key_width, "capacity": t.capacity, "actions": list(t.actions),
            "on_miss": t.on_miss, "entries": [e.format(t.key_width) for e in t.entries],
        }
        if t.chunk_width is not None:
            d["chunk_width"] = t.chunk_width
        if t.default_action is not None:
            d["default_action"] = t.default_action
            d["default_data"] = t.default_data
        tables.append(d)
    control = []
    for c in spec.control:
        d = {"table": c.table} if c.table is not None else {"action": c.action, "data": c.data}
        if c.when_valid:
            d["when_valid"] = list(c.when_valid)
        control.append(d)
    p = spec.platform
    platform = {
        "bus_width_bits": p.bus_width_bits, "lutram_depth": p.lutram_depth,
        "bram_depth": p.bram_depth, "ports": p.ports, "port_rate_bps": p.port_rate_bps,
        "pipes": p.pipes, "max_pkt_bytes": p.max_pkt_bytes, "rtt_seconds": p.rtt_seconds,
    }
    if p.freq_table is not None:
        platform["freq_table"] = {str(w): f for w, f in p.freq_table}
    s = spec.scheduler
    return {
        "format_version": FORMAT_VERSION,
        "name": spec.name,
        "seed": spec.seed,
        "headers": [{"name": h.name, "fields": [list(f) for f in h.fields]} for h in spec.headers],
        "metadata": [list(f) for f in spec.metadata.fields],
        "parse_graph": {
            "start": spec.parse_graph.start,
            "states": [
                {"header": st.header, "select": st.select,
                 "transitions": [{"value": t.value, "next": t.next} for t in st.transitions],
                 "default": st.default}
                for st in spec.parse_graph.states
            ],
        },
        "actions": actions,
        "tables": tables,
        "control": control,
        "deparse": list(spec.deparse_sequence),
        "scheduler": {
            "kind": s.kind, "capacity_entries": s.capacity_entries, "rank_bits": s.rank_bits,
            "buffer_bytes": s.buffer_bytes, "service_interval": s.service_interval,
        },
        "platform": platform,
    }


def dump_pipeline_spec(spec: PipelineSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2) + "\n"


# -- validation --------------------------------------------------------------

def _check_headers(spec: PipelineSpec, out: list[Violation]) -> None:
    for h in spec.headers:
        el = f"header {h.name}"
        if h.name in RESERVED:
            out.append(Violation(el, "reserved header name"))
        if not h.fields:
            out.append(Violation(el, "empty header"))
            continue
        names = [n for n, _ in h.fields]
        if len(set(names)) != len(names):
            out.append(Violation(el, "duplicate field name"))
        for n, w in h.fields:
            if not 1 <= w <= MAX_FIELD_BITS:
                out.append(Violation(f"{el}.{n}", f"width {w} outside 1..{MAX_FIELD_BITS}"))
        if h.total_bits % 8:
            out.append(Violation(el, f"total width {h.total_bits} bits is not byte aligned"))
    for n, w in spec.metadata.fields:
        if not 1 <= w <= MAX_FIELD_BITS:
            out.append(Violation(f"meta.{n}", f"width {w} outside 1..{MAX_FIELD_BITS}"))
    if spec.metadata.has_field("rank") and spec.metadata.field_width("rank") != spec.scheduler.rank_bits:
        out.append(Violation("meta.rank", "width must equal scheduler rank_bits"))


def _check_graph(spec: PipelineSpec, out: list[Violation]) -> None:
    g = spec.parse_graph
    declared = {h.name for h in spec.headers}
    if g.start not in declared:
        out.append(Violation("parse_graph", f"start header {g.start!r} not declared"))
    for s in g.states:
        el = f"parse state {s.header}"
        if s.header not in declared:
            out.append(Violation(el, "unresolved header"))
            continue
        h = spec.header_map[s.header]
        if s.select is not None and not h.has_field(s.select):
            out.append(Violation(el, f"selector field {s.select!r} not in header"))
        if s.transitions and s.select is None:
            out.append(Violation(el, "transitions without a selector field"))
        values = [t.value for t in s.transitions]
        if len(set(values)) != len(values):
            out.append(Violation(el, "more than one edge for the same match value"))
        for t in s.transitions:
            if s.select is not None and h.has_field(s.select) and not 0 <= t.value <= mask(h.field_width(s.select)):
                out.append(Violation(el, f"match value {t.value:#x} wider than selector"))
        for target in [t.next for t in s.transitions] + ([s.default] if s.default else []):
            if target == START:
                out.append(Violation(el, "edge into the start node"))
            elif target != ACCEPT and target not in declared:
                out.append(Violation(el, f"unresolved transition target {target!r}"))
    if g.topological_order() is None:
        out.append(Violation("parse_graph", "parse graph not acyclic"))


def _operand_width(spec: PipelineSpec, op, action: ActionProgram, el: str, out: list[Violation]) -> int | None:
    if isinstance(op, Const):
        if op.value < 0:
            out.append(Violation(el, "negative constant"))
        return op.value.bit_length()
    if isinstance(op, DataRef):
        params = dict(action.params)
        if op.param not in params:
            out.append(Violation(el, f"unresolved action parameter {op.param!r}"))
            return None
        return params[op.param]
    h = spec.header_map.get(op.header)
    if h is None or not h.has_field(op.field):
        out.append(Violation(el, f"unresolved field reference {op}"))
        return None
    return h.field_width(op.field)


def _check_actions(spec: PipelineSpec, out: list[Violation]) -> None:
    for a in spec.actions:
        el_a = f"action {a.name}"
        if not a.steps:
            out.append(Violation(el_a, "empty step list"))
        for n, w in a.params:
            if not 1 <= w <= MAX_FIELD_BITS:
                out.append(Violation(f"{el_a} param {n}", f"width {w} outside 1..{MAX_FIELD_BITS}"))
        for i, s in enumerate(a.steps):
            el = f"{el_a} step {i} ({s.opcode})"
            if s.opcode not in OPCODES:
                out.append(Violation(el, "unknown opcode"))
                continue
            if s.opcode in ("set_valid", "set_invalid"):
                if s.dst not in {h.name for h in spec.headers}:
                    out.append(Violation(el, f"unresolved header {s.dst!r}"))
                continue
            dst_w = _operand_width(spec, s.dst, a, el, out)
            if s.opcode == "checksum_ipv4":
                if len(s.args) != 1 or s.args[0] not in spec.header_map:
                    out.append(Violation(el, "checksum_ipv4 takes one declared header name"))
                elif spec.header_map[s.args[0]].total_bits != 160:
                    out.append(Violation(el, "checksum_ipv4 needs a 20-byte header"))
                elif s.dst.header != s.args[0] or dst_w != 16:
                    out.append(Violation(el, "checksum destination must be a 16-bit field of the summed header"))
                continue
            arity = {"not": 1, "set_field": 1, "select": 2}.get(s.opcode, 2)
            if len(s.args) != arity:
                out.append(Violation(el, f"expected {arity} operands, got {len(s.args)}"))
                continue
            sources = list(s.args)
            if s.opcode in SHIFT_OPS:
                if not isinstance(s.args[1], Const):
                    out.append(Violation(el, "shift amount must be a compile-time constant"))
                sources = sources[:1]
            for src in sources:
                w = _operand_width(spec, src, a, el, out)
                if w is not None and dst_w is not None and w > dst_w:
                    out.append(Violation(el, f"operand {src} wider than destination"))
            if s.opcode == "select":
                if s.cond is None or s.cond.relation not in RELATIONS:
                    out.append(Violation(el, "select needs a comparison with a known relation"))
                else:
                    _operand_width(spec, s.cond.lhs, a, el, out)
                    _operand_width(spec, s.cond.rhs, a, el, out)


def _check_tables(spec: PipelineSpec, out: list[Violation]) -> None:
    for t in spec.tables:
        el = f"table {t.name}"
        if t.kind not in TABLE_KINDS:
            out.append(Violation(el, f"unknown kind {t.kind!r}"))
        width = 0
        for k in t.key_fields:
            h = spec.header_map.get(k.header)
            if h is None or not h.has_field(k.field):
                out.append(Violation(el, f"unresolved key field {k}"))
            else:
                width += h.field_width(k.field)
        if width != t.key_width:
            out.append(Violation(el, f"key width {t.key_width} != sum of key field widths {width}"))
        if t.capacity < 1:
            out.append(Violation(el, "capacity must be >= 1"))
        if t.kind == "ternary":
            if t.chunk_width is None or not 1 <= t.chunk_width <= t.key_width:
                out.append(Violation(el, "ternary table needs 1 <= chunk_width <= key_width"))
        if t.on_miss not in MISS_POLICIES:
            out.append(Violation(el, f"on_miss must be one of {MISS_POLICIES}"))
        for a in t.actions:
            if a not in spec.action_map:
                out.append(Violation(el, f"unresolved action {a!r}"))
        if t.default_action is not None and t.default_action not in t.actions:
            out.append(Violation(el, f"default action {t.default_action!r} not in action set"))
        if len(t.entries) > t.capacity:
            out.append(Violation(el, f"{len(t.entries)} entries exceed capacity {t.capacity}"))
        seen = set()
        for i, e in enumerate(t.entries):
            eel = f"{el} entry {i}"
            if e.kind != t.kind:
                out.append(Violation(eel, f"{e.kind} entry in {t.kind} table"))
                continue
            if e.action not in t.actions:
                out.append(Violation(eel, f"action {e.action!r} not in table action set"))
            elif e.action in spec.action_map and e.data > mask(spec.action_map[e.action].data_width):
                out.append(Violation(eel, "action data wider than the action's parameters"))
            if e.kind == "ternary":
                if e.mask > mask(t.key_width) or e.value & ~e.mask:
                    out.append(Violation(eel, "ternary value has bits outside its mask"))
                ident = (e.value, e.mask, e.priority)
            elif e.kind == "lpm":
                if not 0 <= e.length <= t.key_width:
                    out.append(Violation(eel, "prefix length outside 0..key_width"))
                elif e.value & mask(t.key_width - e.length):
                    out.append(Violation(eel, "prefix has bits set beyond its length"))
                ident = (e.value, e.length)
            else:
                ident = e.value
            if ident in seen:
                out.append(Violation(eel, "duplicate entry key"))
            seen.add(ident)


def _check_control(spec: PipelineSpec, out: list[Violation]) -> None:
    for i, c in enumerate(spec.control):
        el = f"control stage {i}"
        if c.table is not None and c.table not in spec.table_map:
            out.append(Violation(el, f"unresolved table {c.table!r}"))
        if c.action is not None:
            a = spec.action_map.get(c.action)
            if a is None:
                out.append(Violation(el, f"unresolved action {c.action!r}"))
            elif c.data > mask(a.data_width):
                out.append(Violation(el, "action data wider than the action's parameters"))
        for h in c.when_valid:
            if h not in spec.header_map:
                out.append(Violation(el, f"unresolved header {h!r}"))


def _check_deparse(spec: PipelineSpec, out: list[Violation]) -> None:
    declared = {h.name for h in spec.headers}
    for h in spec.deparse_sequence:
        if h not in declared:
            out.append(Violation("deparse", f"undeclared header {h!r}"))
    if len(set(spec.deparse_sequence)) != len(spec.deparse_sequence):
        out.append(Violation("deparse", "header emitted more than once"))


def _check_scheduler(spec: PipelineSpec, out: list[Violation]) -> None:
    s = spec.scheduler
    if s.kind not in SCHEDULER_KINDS:
        out.append(Violation("scheduler", f"kind must be one of {SCHEDULER_KINDS}"))
    if s.capacity_entries < 1:
        out.append(Violation("scheduler", "capacity_entries must be >= 1"))
    if not 1 <= s.rank_bits <= 64:
        out.append(Violation("scheduler", "rank_bits outside 1..64"))
    if s.buffer_bytes < 0:
        out.append(Violation("scheduler", "buffer_bytes must be >= 0"))
    if s.service_interval < 1:
        out.append(Violation("scheduler", "service_interval must be >= 1"))


def _check_platform(spec: PipelineSpec, out: list[Violation]) -> None:
    p = spec.platform
    w = p.bus_width_bits
    if not (64 <= w <= 2048 and w % 64 == 0 and (w // 64) & (w // 64 - 1) == 0):
        out.append(Violation("platform", f"bus width {w} must be a power-of-two multiple of 64 in 64..2048"))
    for name in ("lutram_depth", "bram_depth", "ports", "port_rate_bps", "pipes", "max_pkt_bytes", "rtt_seconds"):
        if getattr(p, name) <= 0:
            out.append(Violation("platform", f"{name} must be positive"))
    if p.ports < p.pipes:
        out.append(Violation("platform", "ports must be >= pipes"))
    if p.freq_table is not None:
        if any(f <= 0 for _, f in p.freq_table):
            out.append(Violation("platform", "freq_table frequencies must be positive"))
        tail = [f for width, f in p.freq_table if width >= 1280]
        if any(b > a for a, b in zip(tail, tail[1:])):
            out.append(Violation("platform", "freq_table must be non-increasing beyond 1280 bits"))


def validate_spec(spec: PipelineSpec) -> list[Violation]:
    """Every invariant violation in ``spec``; an empty list means valid."""
    out: list[Violation] = []
    _check_headers(spec, out)
    _check_graph(spec, out)
    _check_actions(spec, out)
    _check_tables(spec, out)
    _check_control(spec, out)
    _check_deparse(spec, out)
    _check_scheduler(spec, out)
    _check_platform(spec, out)
    return out


__all__ = [
    "ACCEPT", "META", "START", "ActionProgram", "Condition", "Const", "DataRef", "FieldRef",
    "HeaderType", "ParseGraph", "ParseState", "PipelineSpec", "PlatformConfig", "PrimitiveOp",
    "SchedulerConfig", "SpecError", "Stage", "TableDecl", "TableEntry", "Transition", "Violation",
    "dump_pipeline_spec", "load_pipeline_spec", "load_pipeline_spec_file",
    "spec_from_dict", "spec_to_dict", "validate_spec",
]
