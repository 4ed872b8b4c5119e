"""Ternary match emulated on transposed memories.

A W-bit key is cut into P = ceil(W/w) chunks.  Chunk i owns a memory of
2^w words, each word an N-bit bitmap: bit ``s`` of word ``a`` is set when
rule slot ``s`` accepts the chunk value ``a``.  A lookup reads one word per
chunk using the key chunk as address, ANDs the P bitmaps and hands the
survivors to a priority encoder.

Chunk 0 holds the most significant bits.  If w does not divide W the last
chunk is narrower and only addresses below 2^(W mod w) are ever used; the
memory primitive is still allocated 2^w deep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bits import chunk_widths, mask, split_chunks
from .exact import InsertResult


@dataclass(frozen=True)
class TernaryRule:
    value: int
    mask: int  # 1 = care bit
    priority: int = 0  # larger wins
    action: str = ""
    data: int = 0

    def __post_init__(self):
        if self.value & ~self.mask:
            raise ValueError("ternary rule stores a 1 in a don't-care position")
        if self.priority < 0:
            raise ValueError("priority must be unsigned")

    def matches(self, key: int) -> bool:
        return (key & self.mask) == self.value


def transposed_memory_bits(key_width: int, capacity: int, chunk_width: int) -> int:
    return -(-key_width // chunk_width) * (1 << chunk_width) * capacity


class TransposedTcam:
    def __init__(self, key_width: int, capacity: int, chunk_width: int):
        if not 1 <= chunk_width <= key_width:
            raise ValueError("need 1 <= chunk_width <= key_width")
        if chunk_width > 20:
            raise ValueError("chunk_width above 20 bits is not practical")
        self.key_width = key_width
        self.capacity = capacity
        self.chunk_width = chunk_width
        self.widths = chunk_widths(key_width, chunk_width)
        self.n_chunks = len(self.widths)
        self.memory = np.zeros((self.n_chunks, 1 << chunk_width, capacity), dtype=bool)
        self.occupied = np.zeros(capacity, dtype=bool)
        self.priority = np.zeros(capacity, dtype=np.int64)
        self.rules: list[TernaryRule | None] = [None] * capacity
        self._addr = np.arange(1 << chunk_width)

    def __len__(self) -> int:
        return int(self.occupied.sum())

    @property
    def memory_bits(self) -> int:
        return int(self.memory.size)

    def _check(self, key: int) -> None:
        if not 0 <= key <= mask(self.key_width):
            raise ValueError(f"key wider than {self.key_width} bits")

    def insert(self, rule: TernaryRule) -> InsertResult:
        self._check(rule.mask)
        free = np.flatnonzero(~self.occupied)
        if free.size == 0:
            return InsertResult.FULL
        slot = int(free[0])
        values = split_chunks(rule.value, self.key_width, self.chunk_width)
        masks = split_chunks(rule.mask, self.key_width, self.chunk_width)
        for i, (v, m, w) in enumerate(zip(values, masks, self.widths)):
            col = (self._addr & m) == v
            col[1 << w:] = False
            self.memory[i, :, slot] = col
        self.occupied[slot] = True
        self.priority[slot] = rule.priority
        self.rules[slot] = rule
        return InsertResult.INSERTED

    def delete(self, slot: int) -> bool:
        if not self.occupied[slot]:
            return False
        self.memory[:, :, slot] = False
        self.occupied[slot] = False
        self.priority[slot] = 0
        self.rules[slot] = None
        return True

    def slot_of(self, rule: TernaryRule) -> int | None:
        for s, r in enumerate(self.rules):
            if r == rule:
                return s
        return None

    def word(self, chunk: int, address: int) -> int:
        """Bitmap stored at ``address`` of chunk memory ``chunk`` as an int (bit s = slot s)."""
        bits = np.flatnonzero(self.memory[chunk, address])
        return sum(1 << int(b) for b in bits)

    def match_vector(self, key: int) -> np.ndarray:
        self._check(key)
        addrs = split_chunks(key, self.key_width, self.chunk_width)
        return self.memory[np.arange(self.n_chunks), addrs].all(axis=0) & self.occupied

    def _encode(self, hits: np.ndarray) -> int | None:
        idx = np.flatnonzero(hits)
        if idx.size == 0:
            return None
        return int(idx[np.argmax(self.priority[idx])])  # argmax keeps the lowest slot on ties

    def lookup(self, key: int) -> tuple[int, str, int] | None:
        slot = self._encode(self.match_vector(key))
        if slot is None:
            return None
        r = self.rules[slot]
        return slot, r.action, r.data

    def lookup_many(self, keys) -> list[tuple[int, str, int] | None]:
        keys = list(keys)
        if not keys:
            return []
        addrs = np.array([split_chunks(k, self.key_width, self.chunk_width) for k in keys])
        out = []
        step = max(1, 4_000_000 // max(1, self.n_chunks * self.capacity))
        chunk_idx = np.arange(self.n_chunks)
        prio = np.where(self.occupied, self.priority, -1)
        for lo in range(0, len(keys), step):
            a = addrs[lo:lo + step]
            hits = self.memory[chunk_idx[None, :], a].all(axis=1) & self.occupied
            score = np.where(hits, prio[None, :], -1)
            best = score.argmax(axis=1)
            for row, slot in enumerate(best):
                if score[row, slot] < 0:
                    out.append(None)
                else:
                    r = self.rules[slot]
                    out.append((int(slot), r.action, r.data))
        return out
