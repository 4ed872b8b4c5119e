"""Packet scheduling: PIFO and FIFO queues, a systolic priority queue model,
comparison CAM primitives with a range-search CAM built from two of them,
and a byte-accounted packet buffer."""

from __future__ import annotations

import bisect
import enum
import hashlib
from collections import deque
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .bits import mask


class PushResult(enum.Enum):
    OK = "ok"
    FULL = "full"


@dataclass(frozen=True, order=True)
class RankedEntry:
    rank: int
    seq: int
    pkt: Any = field(default=None, compare=False)

    @property
    def key(self) -> tuple[int, int]:
        return self.rank, self.seq


class _Queue:
    def __init__(self, capacity: int, rank_bits: int = 16):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.rank_bits = rank_bits
        self.dropped = 0
        self._last_seq: int | None = None

    def _admit(self, e: RankedEntry) -> bool:
        if not 0 <= e.rank <= mask(self.rank_bits):
            raise ValueError(f"rank {e.rank} does not fit {self.rank_bits} bits")
        if self._last_seq is not None and e.seq <= self._last_seq:
            raise ValueError("sequence numbers must increase")
        if len(self) >= self.capacity:
            self.dropped += 1
            return False
        self._last_seq = e.seq
        return True


class PifoQueue(_Queue):
    """Push-in first-out: entries sit in (rank, seq) order; pop takes the head."""

    def __init__(self, capacity: int, rank_bits: int = 16):
        super().__init__(capacity, rank_bits)
        self._items: list[RankedEntry] = []

    def __len__(self) -> int:
        return len(self._items)

    def push(self, e: RankedEntry) -> PushResult:
        if not self._admit(e):
            return PushResult.FULL
        bisect.insort(self._items, e)
        return PushResult.OK

    def pop(self) -> RankedEntry | None:
        return self._items.pop(0) if self._items else None

    def peek(self) -> RankedEntry | None:
        return self._items[0] if self._items else None


class FifoQueue(_Queue):
    """Arrival-order queue; ranks are carried but ignored."""

    def __init__(self, capacity: int, rank_bits: int = 16):
        super().__init__(capacity, rank_bits)
        self._items: deque[RankedEntry] = deque()

    def __len__(self) -> int:
        return len(self._items)

    def push(self, e: RankedEntry) -> PushResult:
        if not self._admit(e):
            return PushResult.FULL
        self._items.append(e)
        return PushResult.OK

    def pop(self) -> RankedEntry | None:
        return self._items.popleft() if self._items else None


class SystolicQueue(_Queue):
    """Cycle-stepped systolic priority queue.

    Cells form a shift register: push shifts every cell one place toward the
    tail and writes the new entry into the head cell, pop reads the head and
    shifts toward the head.  Each :meth:`step` is one parallel wave of
    compare-swaps on adjacent pairs, even pairs (0,1),(2,3).. and odd pairs
    (1,2),(3,4).. alternating.  A push or pop re-arms the wave so the next
    step starts with the even pairs; with at least one step between
    operations the head then always holds the minimum (rank, seq).
    """

    def __init__(self, capacity: int, rank_bits: int = 16):
        super().__init__(capacity, rank_bits)
        self.cells: list[RankedEntry | None] = [None] * capacity
        self.phase = 0
        self.cycles = 0

    def __len__(self) -> int:
        return sum(c is not None for c in self.cells)

    def push(self, e: RankedEntry) -> PushResult:
        if not self._admit(e):
            return PushResult.FULL
        self.cells = [e] + self.cells[:-1]
        self.phase = 0
        return PushResult.OK

    def pop(self) -> RankedEntry | None:
        head = self.cells[0]
        if head is None:
            return None
        self.cells = self.cells[1:] + [None]
        self.phase = 0
        return head

    def peek(self) -> RankedEntry | None:
        return self.cells[0]

    @staticmethod
    def _out_of_order(a: RankedEntry | None, b: RankedEntry | None) -> bool:
        if a is None:
            return b is not None
        return b is not None and b.key < a.key

    def _wave(self, parity: int, apply: bool) -> int:
        swaps = 0
        c = self.cells
        for i in range(parity, len(c) - 1, 2):
            if self._out_of_order(c[i], c[i + 1]):
                swaps += 1
                if apply:
                    c[i], c[i + 1] = c[i + 1], c[i]
        return swaps

    def step(self) -> int:
        swaps = self._wave(self.phase, apply=True)
        self.phase ^= 1
        self.cycles += 1
        return swaps

    def quiescent(self) -> bool:
        return self._wave(0, False) == 0 and self._wave(1, False) == 0

    def settle(self, max_steps: int | None = None) -> int:
        """Step until quiescent; returns the number of steps taken."""
        limit = max_steps if max_steps is not None else 2 * len(self.cells) + 2
        n = 0
        while not self.quiescent() and n < limit:
            self.step()
            n += 1
        return n


def make_queue(kind: str, capacity: int, rank_bits: int = 16):
    return {"pifo": PifoQueue, "fifo": FifoQueue, "systolic": SystolicQueue}[kind](capacity, rank_bits)


# -- CAM primitives ------------------------------------------------------------

_CAM_OPS = {
    "=": np.equal,
    "<": np.less,
    ">": np.greater,
}


class CamPrimitive:
    """N entries of k bits; entry i matches a key when ``stored[i] <op> key``."""

    def __init__(self, op: str, key_bits: int, n_entries: int):
        if op not in _CAM_OPS:
            raise ValueError(f"CAM op must be one of {sorted(_CAM_OPS)}")
        if not 1 <= key_bits <= 64:
            raise ValueError("key_bits outside 1..64")
        self.op = op
        self.key_bits = key_bits
        self.values = np.zeros(n_entries, dtype=np.uint64)
        self.occupied = np.zeros(n_entries, dtype=bool)

    def __len__(self) -> int:
        return len(self.values)

    def write(self, index: int, value: int) -> None:
        if not 0 <= value <= mask(self.key_bits):
            raise ValueError(f"value wider than {self.key_bits} bits")
        self.values[index] = value
        self.occupied[index] = True

    def clear(self, index: int) -> None:
        self.occupied[index] = False

    def match_array(self, key: int) -> np.ndarray:
        if not 0 <= key <= mask(self.key_bits):
            raise ValueError(f"key wider than {self.key_bits} bits")
        return _CAM_OPS[self.op](self.values, np.uint64(key)) & self.occupied

    def match(self, key: int) -> int:
        """Match vector as an int, bit i for entry i."""
        return sum(1 << int(i) for i in np.flatnonzero(self.match_array(key)))


class RangeCam:
    """Range-search CAM from two primitives plus glue.

    The ``lo`` primitive compares with '>' and the ``hi`` primitive with '<';
    entry i encloses the key when neither fires: not(lo_i > k) and
    not(hi_i < k), i.e. lo_i <= k <= hi_i.
    """

    def __init__(self, key_bits: int, n_entries: int):
        self.lo = CamPrimitive(">", key_bits, n_entries)
        self.hi = CamPrimitive("<", key_bits, n_entries)

    def __len__(self) -> int:
        return len(self.lo)

    def write(self, index: int, lo: int, hi: int) -> None:
        self.lo.write(index, lo)
        self.hi.write(index, hi)

    def clear(self, index: int) -> None:
        self.lo.clear(index)
        self.hi.clear(index)

    def match_array(self, key: int) -> np.ndarray:
        below = self.lo.match_array(key)
        above = self.hi.match_array(key)
        return self.lo.occupied & ~below & ~above

    def lookup(self, key: int) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.match_array(key))]


# -- packet buffer -------------------------------------------------------------

class PacketBuffer:
    """Byte-accounted store for packets waiting in the scheduler."""

    def __init__(self, capacity_bytes: int, max_pkt_bytes: int | None = None):
        self.capacity_bytes = capacity_bytes
        self.max_pkt_bytes = max_pkt_bytes
        self.occupancy = 0
        self.high_water = 0
        self.dropped = 0
        self._next = 0
        self._store: dict[int, tuple[Any, bytes, bytes]] = {}

    def __len__(self) -> int:
        return len(self._store)

    @staticmethod
    def _bytes(pkt) -> bytes:
        return pkt if isinstance(pkt, (bytes, bytearray)) else pkt.data

    def admit(self, pkt) -> int | None:
        """Store ``pkt`` and return its handle, or None when it does not fit."""
        data = bytes(self._bytes(pkt))
        if self.max_pkt_bytes is not None and len(data) > self.max_pkt_bytes:
            raise ValueError(f"{len(data)}-byte packet exceeds max packet size {self.max_pkt_bytes}")
        if self.occupancy + len(data) > self.capacity_bytes:
            self.dropped += 1
            return None
        handle = self._next
        self._next += 1
        self._store[handle] = (pkt, data, hashlib.sha256(data).digest())
        self.occupancy += len(data)
        self.high_water = max(self.high_water, self.occupancy)
        return handle

    def release(self, handle: int):
        pkt, data, digest = self._store.pop(handle)  # KeyError on an unknown handle
        if hashlib.sha256(bytes(self._bytes(pkt))).digest() != digest:
            raise RuntimeError(f"buffered packet {handle} was corrupted")
        self.occupancy -= len(data)
        return pkt
