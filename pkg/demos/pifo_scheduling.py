"""
PIFO order and the systolic queue
=================================

"""

import random

from pisa_model.scheduler import PifoQueue, RangeCam, RankedEntry, SystolicQueue

pifo, sq = PifoQueue(16), SystolicQueue(16)
rng = random.Random(1)
for seq in range(10):
    e = RankedEntry(rng.randrange(5), seq)
    pifo.push(e)
    sq.push(e)
    sq.step()  # one compare-swap wave between operations is enough

# the systolic array has not fully sorted, but its head is always right
print([c.rank if c else None for c in sq.cells])
a = [pifo.pop().key for _ in range(10)]
b = []
for _ in range(10):
    b.append(sq.pop().key)
    sq.step()
print(a)
print("same order:", a == b)

# rank ranges per flow live in a range CAM built from a '>' and a '<' primitive
cam = RangeCam(16, 4)
for i, (lo, hi) in enumerate([(0, 99), (100, 199), (150, 400), (1000, 2000)]):
    cam.write(i, lo, hi)
print("rank 160 is in ranges", cam.lookup(160))
