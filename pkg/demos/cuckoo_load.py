"""
How full does a cuckoo table get?
=================================

"""

import random
import statistics

from pisa_model.tables import CuckooTable, ExactEntry, InsertResult

loads = []
for seed in range(20):
    rng = random.Random(seed)
    t = CuckooTable(64, 4096, seed=seed)
    while t.insert(ExactEntry(rng.getrandbits(64), "a", 0)) is not InsertResult.FULL:
        pass
    loads.append(t.load_factor)

# two hashes and 4-slot buckets keep the first failure well above 80% occupancy
print(f"median {statistics.median(loads):.3f}  min {min(loads):.3f}  max {max(loads):.3f}")
