"""Match tables: exact (cuckoo), ternary (transposed memory) and LPM (binary trie)."""

from __future__ import annotations

from .exact import CuckooTable, ExactEntry, InsertResult, hash_key, splitmix64
from .lpm import BinaryTrie, Prefix
from .oracles import oracle_lpm, oracle_lpm_batch, oracle_ternary, oracle_ternary_batch
from .population import PopulationError, TableEntry, parse_entries, parse_entry
from .ternary import TernaryRule, TransposedTcam, transposed_memory_bits


def lpm_as_ternary(p: Prefix, width: int) -> TernaryRule:
    """Encode a prefix as a ternary rule whose priority is its length."""
    m = ((1 << p.length) - 1) << (width - p.length)
    return TernaryRule(p.bits, m, p.length, p.action, p.data)


class MatchTable:
    """Uniform lookup front-end over one of the three structures."""

    def __init__(self, kind: str, key_width: int, capacity: int,
                 chunk_width: int | None = None, seed: int = 0):
        self.kind = kind
        self.key_width = key_width
        if kind == "exact":
            self.impl = CuckooTable(key_width, capacity, seed=seed)
        elif kind == "ternary":
            self.impl = TransposedTcam(key_width, capacity, chunk_width)
        elif kind == "lpm":
            self.impl = BinaryTrie(key_width)
        else:
            raise ValueError(f"unknown table kind {kind!r}")

    def add(self, e: TableEntry) -> InsertResult:
        if self.kind == "exact":
            return self.impl.insert(ExactEntry(e.value, e.action, e.data))
        if self.kind == "ternary":
            return self.impl.insert(TernaryRule(e.value, e.mask, e.priority, e.action, e.data))
        return self.impl.insert(Prefix(e.value, e.length, e.action, e.data))

    def lookup(self, key: int) -> tuple[str, int] | None:
        hit = self.impl.lookup(key)
        if hit is None:
            return None
        return hit if self.kind == "exact" else (hit[1], hit[2])


def build_table(decl, seed: int = 0) -> MatchTable:
    """Instantiate and populate the structure for a TableDecl."""
    t = MatchTable(decl.kind, decl.key_width, decl.capacity, decl.chunk_width, seed)
    for e in decl.entries:
        if t.add(e) is InsertResult.FULL:
            raise ValueError(f"table {decl.name}: structure full while loading entries")
    return t


__all__ = [
    "BinaryTrie", "CuckooTable", "ExactEntry", "InsertResult", "MatchTable", "PopulationError",
    "Prefix", "TableEntry", "TernaryRule", "TransposedTcam", "build_table", "hash_key",
    "lpm_as_ternary", "oracle_lpm", "oracle_lpm_batch", "oracle_ternary", "oracle_ternary_batch",
    "parse_entries", "parse_entry", "splitmix64", "transposed_memory_bits",
]
