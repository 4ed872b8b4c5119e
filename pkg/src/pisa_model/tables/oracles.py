"""Linear-scan reference lookups used to check the emulated structures.

The scalar functions apply the ternary/prefix definitions literally.  The
``*_batch`` variants do the same scan with numpy over 64-bit limbs so that
large randomized workloads stay fast; they share no code with the tables.
"""

from __future__ import annotations

import numpy as np

from ..bits import mask
from .lpm import Prefix
from .ternary import TernaryRule


def oracle_ternary(rules: list[TernaryRule], key: int) -> tuple[int, str, int] | None:
    best = None
    for i, r in enumerate(rules):
        if (key & r.mask) == r.value and (best is None or r.priority > rules[best].priority):
            best = i
    if best is None:
        return None
    return best, rules[best].action, rules[best].data


def prefix_mask(length: int, width: int) -> int:
    return mask(length) << (width - length)


def oracle_lpm(prefixes: list[Prefix], key: int, width: int) -> tuple[Prefix, str, int] | None:
    best = None
    for p in prefixes:
        if (key & prefix_mask(p.length, width)) == p.bits and (best is None or p.length >= best.length):
            best = p
    if best is None:
        return None
    return best, best.action, best.data


def _limbs(values, width: int) -> np.ndarray:
    n = max(1, -(-width // 64))
    out = np.zeros((len(values), n), dtype=np.uint64)
    m = mask(64)
    for row, v in enumerate(values):
        for j in range(n):
            out[row, j] = (v >> (64 * j)) & m
    return out


def _scan(values, masks, scores, keys, width: int, block: int = 256) -> list[int | None]:
    """Index of the best-scoring entry matching each key (first index on ties)."""
    if not len(values):
        return [None] * len(keys)
    v, m = _limbs(values, width), _limbs(masks, width)
    k = _limbs(keys, width)
    scores = np.asarray(scores, dtype=np.int64)
    out: list[int | None] = []
    for lo in range(0, len(keys), block):
        kb = k[lo:lo + block]
        hit = np.ones((len(kb), len(values)), dtype=bool)
        for j in range(v.shape[1]):
            hit &= (kb[:, None, j] & m[None, :, j]) == v[None, :, j]
        s = np.where(hit, scores[None, :], -1)
        best = s.argmax(axis=1)
        out.extend(int(b) if s[r, b] >= 0 else None for r, b in enumerate(best))
    return out


def oracle_ternary_batch(rules: list[TernaryRule], keys: list[int], width: int):
    idx = _scan([r.value for r in rules], [r.mask for r in rules],
                [r.priority for r in rules], keys, width)
    return [None if i is None else (i, rules[i].action, rules[i].data) for i in idx]


def oracle_lpm_batch(prefixes: list[Prefix], keys: list[int], width: int):
    # later duplicates win, like a replace-on-insert trie: score ties go to the first
    # index, so scan the list reversed and map back
    rev = prefixes[::-1]
    idx = _scan([p.bits for p in rev], [prefix_mask(p.length, width) for p in rev],
                [p.length for p in rev], keys, width)
    out = []
    for i in idx:
        if i is None:
            out.append(None)
        else:
            p = rev[i]
            out.append((p, p.action, p.data))
    return out
