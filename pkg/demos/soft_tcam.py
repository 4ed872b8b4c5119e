"""
Ternary matching out of plain memory
====================================

A transposed-memory TCAM splits the key into w-bit chunks.  Each chunk
addresses a small memory whose word is a bitmap of the rules that accept
that chunk value, so one lookup is P reads and an AND.
"""

import random

import numpy as np

from pisa_model.cost import tcam_overhead_formula, tcam_overhead_practical
from pisa_model.tables import TernaryRule, TransposedTcam, oracle_ternary

# one rule, 4-bit key, 2-bit chunks: only address 0b10 is set in each chunk
t = TransposedTcam(4, 4, 2)
t.insert(TernaryRule(0b1010, 0b1111, 1, "hit", 0))
print(t.memory[:, :, 0].astype(int))

# memory cost relative to an ideal W x N CAM, as a function of chunk width
w = np.arange(1, 13)
overhead = [tcam_overhead_formula(int(k)) for k in w]
for k, o in zip(w, overhead):
    print(f"w={k:2d}  2^w/w = {o:7.2f}")

# the primitive depth fixes w on an FPGA: 32-deep LUT RAM and 512-deep BRAM
print("LUTRAM", tcam_overhead_practical(128, 4096, 32), "BRAM", tcam_overhead_practical(128, 4096, 512))

# check a random rule set against a linear scan
rng = random.Random(0)
rules = []
for i in range(64):
    m = rng.getrandbits(16) & rng.getrandbits(16)
    rules.append(TernaryRule(rng.getrandbits(16) & m, m, rng.randrange(8), f"r{i}", i))
t = TransposedTcam(16, 64, 4)
for r in rules:
    t.insert(r)
keys = [rng.getrandbits(16) for _ in range(2000)]
print("mismatches:", sum(t.lookup(k) != oracle_ternary(rules, k) for k in keys))
