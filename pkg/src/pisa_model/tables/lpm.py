"""Longest prefix match on a binary trie (one node per prefix bit)."""

from __future__ import annotations

from dataclasses import dataclass

from ..bits import mask
from .exact import InsertResult


@dataclass(frozen=True)
class Prefix:
    bits: int  # full key width, bits beyond ``length`` zero
    length: int
    action: str = ""
    data: int = 0


class _Node:
    __slots__ = ("child", "entry")

    def __init__(self):
        self.child: list[_Node | None] = [None, None]
        self.entry: Prefix | None = None


class BinaryTrie:
    def __init__(self, width: int):
        self.width = width
        self.root = _Node()
        self.node_count = 1
        self.count = 0

    def __len__(self) -> int:
        return self.count

    def _check(self, p: Prefix) -> None:
        if not 0 <= p.length <= self.width:
            raise ValueError(f"prefix length {p.length} outside 0..{self.width}")
        if p.bits & ~(mask(p.length) << (self.width - p.length)) or p.bits >> self.width:
            raise ValueError("prefix has bits set beyond its length")

    def _bit(self, key: int, depth: int) -> int:
        return (key >> (self.width - 1 - depth)) & 1

    def insert(self, p: Prefix) -> InsertResult:
        self._check(p)
        node = self.root
        for depth in range(p.length):
            b = self._bit(p.bits, depth)
            if node.child[b] is None:
                node.child[b] = _Node()
                self.node_count += 1
            node = node.child[b]
        replaced = node.entry is not None
        node.entry = p
        if not replaced:
            self.count += 1
        return InsertResult.REPLACED if replaced else InsertResult.INSERTED

    def lookup(self, key: int) -> tuple[Prefix, str, int] | None:
        if not 0 <= key <= mask(self.width):
            raise ValueError(f"key wider than {self.width} bits")
        node = self.root
        best = node.entry
        for depth in range(self.width):
            node = node.child[self._bit(key, depth)]
            if node is None:
                break
            if node.entry is not None:
                best = node.entry
        if best is None:
            return None
        return best, best.action, best.data

    def delete(self, bits: int, length: int) -> bool:
        path = [self.root]
        for depth in range(length):
            nxt = path[-1].child[self._bit(bits, depth)]
            if nxt is None:
                return False
            path.append(nxt)
        if path[-1].entry is None:
            return False
        path[-1].entry = None
        self.count -= 1
        for depth in range(length, 0, -1):
            node = path[depth]
            if node.entry is not None or node.child[0] or node.child[1]:
                break
            path[depth - 1].child[self._bit(bits, depth - 1)] = None
            self.node_count -= 1
        return True

    def count_nodes(self) -> int:
        """Node count by traversal, independent of the running counter."""
        n, stack = 0, [self.root]
        while stack:
            node = stack.pop()
            n += 1
            stack.extend(c for c in node.child if c is not None)
        return n
