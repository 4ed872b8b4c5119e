import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pisa_model.scheduler import (CamPrimitive, FifoQueue, PacketBuffer, PifoQueue, PushResult,
                                  RangeCam, RankedEntry, SystolicQueue, make_queue)


def pops(q, n):
    return [q.pop() for _ in range(n)]


def test_pifo_sorts():
    q = PifoQueue(8)
    for seq, r in enumerate((5, 2, 9)):
        q.push(RankedEntry(r, seq))
    assert [e.rank for e in pops(q, 3)] == [2, 5, 9]
    assert q.pop() is None


def test_pifo_ties_by_arrival():
    q = PifoQueue(8)
    q.push(RankedEntry(7, 1, "a"))
    q.push(RankedEntry(7, 2, "b"))
    assert q.pop().pkt == "a"


def test_single_entry_and_full():
    q = PifoQueue(1)
    assert q.push(RankedEntry(1, 0)) is PushResult.OK
    assert q.push(RankedEntry(0, 1)) is PushResult.FULL and q.dropped == 1
    assert q.pop().seq == 0 and len(q) == 0


def test_rank_and_seq_checks():
    q = PifoQueue(4, rank_bits=4)
    with pytest.raises(ValueError):
        q.push(RankedEntry(16, 0))
    q.push(RankedEntry(1, 5))
    with pytest.raises(ValueError):
        q.push(RankedEntry(1, 5))


def test_fifo_ignores_rank():
    q = FifoQueue(4)
    for seq, r in enumerate((5, 2, 9)):
        q.push(RankedEntry(r, seq))
    assert [e.seq for e in pops(q, 3)] == [0, 1, 2]


def test_make_queue_kinds():
    assert isinstance(make_queue("systolic", 4), SystolicQueue)
    with pytest.raises(KeyError):
        make_queue("lifo", 4)


def test_systolic_single_swap():
    q = SystolicQueue(4)
    q.push(RankedEntry(9, 0))
    q.push(RankedEntry(3, 1))
    assert q.peek().rank == 3  # shift-in puts the newest at the head
    q2 = SystolicQueue(4)
    q2.push(RankedEntry(3, 0))
    q2.push(RankedEntry(9, 1))
    assert q2.peek().rank == 9
    assert q2.step() == 1 and q2.peek().rank == 3


def test_systolic_quiescent_zero_swaps():
    q = SystolicQueue(8)
    for seq, r in enumerate((4, 1, 3)):
        q.push(RankedEntry(r, seq))
        q.step()
    q.settle()
    assert q.quiescent() and q.step() == 0
    assert [e.rank for e in pops(q, 3)] == [1, 3, 4]


ops_strategy = st.lists(st.one_of(st.integers(0, 15), st.none()), max_size=200)


@settings(max_examples=200, deadline=None)
@given(ops_strategy, st.integers(0, 2**32))
def test_systolic_equals_pifo(ops, seed):
    rng = random.Random(seed)
    a, b = PifoQueue(8, 4), SystolicQueue(8, 4)
    seq = 0
    for op in ops:
        if op is None:
            ea, eb = a.pop(), b.pop()
            assert (ea and ea.key) == (eb and eb.key)
        else:
            assert a.push(RankedEntry(op, seq)) == b.push(RankedEntry(op, seq))
            seq += 1
        for _ in range(rng.randint(1, 3)):
            b.step()


@settings(max_examples=100, deadline=None)
@given(ops_strategy)
def test_pifo_equals_stable_sort(ops):
    q = PifoQueue(1000, 4)
    pending = []
    seq = 0
    for op in ops:
        if op is None:
            e = q.pop()
            if pending:
                want = sorted(pending, key=lambda x: x[0])[0]  # sorted() is stable
                pending.remove(want)
                assert e.key == want
            else:
                assert e is None
        else:
            q.push(RankedEntry(op, seq))
            pending.append((op, seq))
            seq += 1


# -- CAM ----------------------------------------------------------------------------

def test_cam_less_than_example():
    cam = CamPrimitive("<", 8, 2)
    cam.write(0, 3)
    cam.write(1, 8)
    assert cam.match(5) == 0b01


def test_cam_eq_gt_and_occupancy():
    eq, gt = CamPrimitive("=", 8, 3), CamPrimitive(">", 8, 3)
    for i, v in enumerate((1, 5, 9)):
        eq.write(i, v)
        gt.write(i, v)
    assert eq.match(5) == 0b010 and gt.match(5) == 0b100
    gt.clear(2)
    assert gt.match(5) == 0
    with pytest.raises(ValueError):
        CamPrimitive("!=", 8, 1)
    with pytest.raises(ValueError):
        eq.write(0, 256)


def test_range_cam_example():
    rc = RangeCam(16, 2)
    rc.write(0, 10, 20)
    assert rc.lookup(15) == [0] and rc.lookup(21) == [] and rc.lookup(10) == [0] and rc.lookup(20) == [0]


def test_range_cam_is_two_primitives():
    rc = RangeCam(16, 64)
    assert isinstance(rc.lo, CamPrimitive) and isinstance(rc.hi, CamPrimitive)
    assert (rc.lo.op, rc.hi.op) == (">", "<")
    rng = np.random.default_rng(0)
    for i in range(64):
        lo = int(rng.integers(0, 60000))
        rc.write(i, lo, lo + int(rng.integers(0, 5000)))
    for k in rng.integers(0, 1 << 16, 200):
        k = int(k)
        composed = rc.lo.occupied & ~rc.lo.match_array(k) & ~rc.hi.match_array(k)
        assert np.array_equal(composed, rc.match_array(k))


# -- buffer -------------------------------------------------------------------------

def test_buffer_rtt_sized_example():
    buf = PacketBuffer(1_250_000, 1518)
    handles = [buf.admit(bytes(1518)) for _ in range(820)]
    assert None not in handles and buf.occupancy == 1_244_760
    for _ in range(3):
        assert buf.admit(bytes(1518)) is not None
    assert buf.admit(bytes(1518)) is None and buf.dropped == 1


def test_buffer_round_trip():
    buf = PacketBuffer(100)
    h = buf.admit(b"abcdef")
    assert buf.release(h) == b"abcdef" and buf.occupancy == 0
    with pytest.raises(KeyError):
        buf.release(h)


def test_buffer_zero_capacity():
    buf = PacketBuffer(0)
    assert all(buf.admit(b"x") is None for _ in range(5)) and buf.dropped == 5


def test_buffer_detects_corruption():
    buf = PacketBuffer(100)
    pkt = bytearray(b"hello")
    h = buf.admit(pkt)
    pkt[0] = 0
    with pytest.raises(RuntimeError):
        buf.release(h)


@given(st.lists(st.one_of(st.binary(min_size=1, max_size=50), st.none()), max_size=60))
def test_buffer_occupancy_invariant(ops):
    buf = PacketBuffer(400)
    held = {}
    for op in ops:
        if op is None and held:
            h = next(iter(held))
            assert buf.release(h) == held.pop(h)
        elif op is not None:
            h = buf.admit(op)
            if h is not None:
                held[h] = op
        assert buf.occupancy == sum(map(len, held.values())) <= 400
