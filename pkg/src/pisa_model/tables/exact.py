"""Exact match on a bucketized cuckoo hash table.

Two hash functions pick two candidate buckets of four slots each.  When
both are full, a random-walk eviction moves residents to their alternate
bucket until a free slot appears or the kick budget runs out; in the latter
case every move is undone so no resident entry is ever lost.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from ..bits import mask

M64 = mask(64)


class InsertResult(enum.Enum):
    INSERTED = "inserted"
    REPLACED = "replaced"
    FULL = "full"


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer (Steele, Lea & Flood), a 64-bit bijective mixer."""
    x = (x + 0x9E3779B97F4A7C15) & M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & M64
    return x ^ (x >> 31)


def hash_key(key: int, width: int, seed: int) -> int:
    h = splitmix64(seed ^ width)
    for shift in range(0, max(width, 1), 64):
        h = splitmix64(h ^ ((key >> shift) & M64))
    return h


@dataclass(frozen=True)
class ExactEntry:
    key: int
    action: str
    data: int = 0


class CuckooTable:
    def __init__(self, key_width: int, capacity: int, seed: int = 0,
                 bucket_size: int = 4, max_kicks: int = 500):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.key_width = key_width
        self.capacity = capacity
        self.bucket_size = bucket_size
        self.max_kicks = max_kicks
        self.n_buckets = -(-capacity // bucket_size)
        s1 = splitmix64(seed)
        self.seeds = (s1, splitmix64(s1))
        self._rng = random.Random(seed)
        self.buckets: list[list[ExactEntry | None]] = [
            [None] * bucket_size for _ in range(self.n_buckets)
        ]
        self.count = 0
        self.last_probes = 0

    def __len__(self) -> int:
        return self.count

    @property
    def load_factor(self) -> float:
        return self.count / self.capacity

    def candidates(self, key: int) -> tuple[int, int]:
        return tuple(hash_key(key, self.key_width, s) % self.n_buckets for s in self.seeds)

    def _check(self, key: int) -> None:
        if not 0 <= key <= mask(self.key_width):
            raise ValueError(f"key wider than {self.key_width} bits")

    def _find(self, key: int):
        probes = 0
        for b in dict.fromkeys(self.candidates(key)):
            probes += 1
            for i, e in enumerate(self.buckets[b]):
                if e is not None and e.key == key:
                    self.last_probes = probes
                    return b, i
        self.last_probes = probes
        return None

    def _free_slot(self, b: int) -> int | None:
        for i, e in enumerate(self.buckets[b]):
            if e is None:
                return i
        return None

    def insert(self, entry: ExactEntry) -> InsertResult:
        self._check(entry.key)
        hit = self._find(entry.key)
        if hit is not None:
            b, i = hit
            self.buckets[b][i] = entry
            return InsertResult.REPLACED
        if self.count >= self.capacity:
            return InsertResult.FULL
        b1, b2 = self.candidates(entry.key)
        for b in (b1, b2):
            i = self._free_slot(b)
            if i is not None:
                self.buckets[b][i] = entry
                self.count += 1
                return InsertResult.INSERTED

        path = []
        cur = entry
        b = self._rng.choice((b1, b2))
        for _ in range(self.max_kicks):
            i = self._rng.randrange(self.bucket_size)
            cur, self.buckets[b][i] = self.buckets[b][i], cur
            path.append((b, i))
            c1, c2 = self.candidates(cur.key)
            b = c2 if b == c1 else c1
            j = self._free_slot(b)
            if j is not None:
                self.buckets[b][j] = cur
                self.count += 1
                return InsertResult.INSERTED
        for b, i in reversed(path):
            cur, self.buckets[b][i] = self.buckets[b][i], cur
        assert cur is entry
        return InsertResult.FULL

    def lookup(self, key: int) -> tuple[str, int] | None:
        self._check(key)
        hit = self._find(key)
        if hit is None:
            return None
        e = self.buckets[hit[0]][hit[1]]
        return e.action, e.data

    def delete(self, key: int) -> bool:
        hit = self._find(key)
        if hit is None:
            return False
        self.buckets[hit[0]][hit[1]] = None
        self.count -= 1
        return True

    def entries(self):
        for bucket in self.buckets:
            for e in bucket:
                if e is not None:
                    yield e

    def memory_bits(self, data_width: int) -> int:
        slots = self.n_buckets * self.bucket_size
        return slots * (self.key_width + data_width + 1)
