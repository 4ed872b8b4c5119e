import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pisa_model.tables import (BinaryTrie, CuckooTable, ExactEntry, InsertResult, MatchTable, Prefix,
                               TableEntry, TernaryRule, TransposedTcam, lpm_as_ternary, oracle_lpm,
                               oracle_ternary, oracle_ternary_batch, oracle_lpm_batch)
from pisa_model.tables.ternary import transposed_memory_bits


def ip(s):
    a, b, c, d = map(int, s.split("."))
    return a << 24 | b << 16 | c << 8 | d


# -- exact ----------------------------------------------------------------------

def test_cuckoo_basic():
    t = CuckooTable(64, 1024)
    for k in (1, 2, 3):
        assert t.insert(ExactEntry(k, "a", k)) is InsertResult.INSERTED
    assert t.load_factor == 3 / 1024
    assert t.lookup(2) == ("a", 2)
    assert CuckooTable(64, 1024).lookup(99) is None


def test_cuckoo_replace_and_delete():
    t = CuckooTable(64, 16)
    t.insert(ExactEntry(7, "a", 1))
    assert t.insert(ExactEntry(7, "b", 2)) is InsertResult.REPLACED
    assert t.lookup(7) == ("b", 2) and len(t) == 1
    assert t.delete(7) and t.lookup(7) is None and not t.delete(7)


def test_cuckoo_failure_rolls_back():
    rng = random.Random(3)
    t = CuckooTable(64, 256, seed=3)
    keys = []
    while True:
        k = rng.getrandbits(64)
        before = sorted((e.key for e in t.entries()))
        if t.insert(ExactEntry(k, "a", 0)) is InsertResult.FULL:
            assert sorted(e.key for e in t.entries()) == before
            break
        keys.append(k)
    assert all(t.lookup(k) == ("a", 0) for k in keys)
    assert t.load_factor >= 0.8


def test_cuckoo_seed_changes_placement_not_contents():
    keys = list(range(100, 400))
    a, b = CuckooTable(64, 512, seed=1), CuckooTable(64, 512, seed=2)
    for k in keys:
        a.insert(ExactEntry(k, "x", k))
        b.insert(ExactEntry(k, "x", k))
    assert a.candidates(100) != b.candidates(100)
    assert all(a.lookup(k) == b.lookup(k) for k in keys)


def test_cuckoo_rejects_wide_key():
    with pytest.raises(ValueError):
        CuckooTable(8, 4).insert(ExactEntry(256, "a", 0))


# -- ternary ----------------------------------------------------------------------

def test_tcam_word_layout():
    t = TransposedTcam(4, 4, 2)
    t.insert(TernaryRule(0b1010, 0b1111, 1, "a", 0))
    for chunk in range(2):
        for addr in range(4):
            assert t.word(chunk, addr) == (1 if addr == 0b10 else 0)
    assert t.lookup(0b1010) == (0, "a", 0)
    assert t.lookup(0b1011) is None


def test_tcam_match_all_sets_every_word():
    t = TransposedTcam(4, 4, 2)
    t.insert(TernaryRule(0, 0, 0, "all", 0))
    assert all(t.word(c, a) == 1 for c in range(2) for a in range(4))
    assert all(t.lookup(k) == (0, "all", 0) for k in range(16))


def test_tcam_full_and_empty():
    t = TransposedTcam(8, 2, 4)
    assert t.lookup(5) is None
    t.insert(TernaryRule(0, 0, 0, "a", 0))
    t.insert(TernaryRule(1, 0xFF, 0, "b", 0))
    assert t.insert(TernaryRule(2, 0xFF, 0, "c", 0)) is InsertResult.FULL


def test_tcam_priority_and_tie_break():
    t = TransposedTcam(8, 4, 3)
    t.insert(TernaryRule(0x00, 0x00, 1, "low", 0))
    t.insert(TernaryRule(0x10, 0xF0, 5, "first", 0))
    t.insert(TernaryRule(0x12, 0xFF, 5, "second", 0))
    assert t.lookup(0x12)[1] == "first"
    assert t.lookup(0x22)[1] == "low"


def test_tcam_delete_then_miss_and_slot_reuse():
    t = TransposedTcam(8, 2, 4)
    r = TernaryRule(0x12, 0xFF, 1, "a", 0)
    t.insert(r)
    assert t.delete(t.slot_of(r))
    assert t.lookup(0x12) is None and not t.memory.any()
    t.insert(TernaryRule(0x34, 0xFF, 1, "b", 0))
    assert t.lookup(0x34)[0] == 0


def test_tcam_rejects_value_outside_mask():
    with pytest.raises(ValueError):
        TernaryRule(0b11, 0b01, 0, "a", 0)


def test_tcam_memory_examples():
    assert transposed_memory_bits(128, 4096, 5) == 26 * 32 * 4096 == 3_407_872
    assert transposed_memory_bits(126, 512, 9) == 14 * 512 * 512
    assert TransposedTcam(128, 64, 5).memory_bits == transposed_memory_bits(128, 64, 5)


rules_12 = st.lists(
    st.tuples(st.integers(0, 4095), st.integers(0, 4095), st.integers(0, 5)),
    min_size=0, max_size=12)


@settings(max_examples=40, deadline=None)
@given(rules_12, st.integers(1, 6))
def test_tcam_exhaustive_w12(raw, w):
    rules = [TernaryRule(v & m, m, p, f"r{i}", i) for i, (v, m, p) in enumerate(raw)]
    t = TransposedTcam(12, max(1, len(rules)), w)
    for r in rules:
        t.insert(r)
    keys = list(range(4096))
    want = [oracle_ternary(rules, k) for k in keys]
    assert t.lookup_many(keys) == want
    assert oracle_ternary_batch(rules, keys, 12) == want


# -- LPM ----------------------------------------------------------------------------

def test_trie_examples():
    t = BinaryTrie(32)
    assert t.insert(Prefix(0, 0, "default", 0)) is InsertResult.INSERTED
    assert t.node_count == 1
    t.insert(Prefix(ip("10.0.0.0"), 8, "a", 1))
    assert t.insert(Prefix(ip("10.0.0.0"), 8, "a", 2)) is InsertResult.REPLACED
    t.insert(Prefix(ip("10.1.0.0"), 16, "b", 3))
    assert t.lookup(ip("10.1.2.3"))[1:] == ("b", 3)
    assert t.lookup(ip("10.2.0.1"))[1:] == ("a", 2)
    assert t.lookup(ip("11.0.0.0"))[1:] == ("default", 0)


def test_trie_miss_and_delete():
    t = BinaryTrie(32)
    assert t.lookup(ip("11.0.0.0")) is None
    t.insert(Prefix(ip("10.0.0.0"), 8, "a", 1))
    t.insert(Prefix(ip("10.1.0.0"), 16, "b", 3))
    assert t.lookup(ip("11.0.0.0")) is None
    assert t.delete(ip("10.1.0.0"), 16)
    assert t.lookup(ip("10.1.2.3"))[1] == "a"
    assert t.delete(ip("10.0.0.0"), 8) and t.lookup(ip("10.1.2.3")) is None
    assert t.node_count == t.count_nodes() == 1


def test_trie_node_bound():
    rng = random.Random(9)
    t = BinaryTrie(32)
    total = 0
    for _ in range(1000):
        n = rng.randint(0, 32)
        bits = rng.getrandbits(32) & (((1 << n) - 1) << (32 - n)) if n else 0
        if t.insert(Prefix(bits, n, "a", 0)) is InsertResult.INSERTED:
            total += n
    assert t.count_nodes() == t.node_count <= 1 + total


prefixes_12 = st.lists(st.tuples(st.integers(0, 12), st.integers(0, 4095)), max_size=20)


@settings(max_examples=40, deadline=None)
@given(prefixes_12)
def test_lpm_exhaustive_w12(raw):
    ps = []
    for i, (n, b) in enumerate(raw):
        m = ((1 << n) - 1) << (12 - n)
        ps.append(Prefix(b & m, n, f"p{i}", i))
    t = BinaryTrie(12)
    for p in ps:
        t.insert(p)
    keys = list(range(4096))
    want = [oracle_lpm(ps, k, 12) for k in keys]
    assert [t.lookup(k) for k in keys] == want
    assert oracle_lpm_batch(ps, keys, 12) == want
    last = {(p.bits, p.length): p for p in ps}
    tc = TransposedTcam(12, max(1, len(last)), 4)
    for p in last.values():
        tc.insert(lpm_as_ternary(p, 12))
    got = tc.lookup_many(keys)
    assert [None if g is None else g[1:] for g in got] == [None if e is None else e[1:] for e in want]


# -- front-end ----------------------------------------------------------------------

@pytest.mark.parametrize("kind,entry,key", [
    ("exact", TableEntry("exact", 5, action="a", data=1), 5),
    ("ternary", TableEntry("ternary", 0x10, mask=0xF0, priority=1, action="a", data=1), 0x1F),
    ("lpm", TableEntry("lpm", 0x80, length=1, action="a", data=1), 0xFF),
])
def test_match_table_front_end(kind, entry, key):
    t = MatchTable(kind, 8, 4, chunk_width=4)
    t.add(entry)
    assert t.lookup(key) == ("a", 1)
    assert t.lookup(0) is None
