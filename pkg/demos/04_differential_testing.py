"""
Differential testing against a reference queue
==============================================

The same workload drives the pairing heap and a sorted-list reference.
Every delete-min must agree, and the minimum is compared after every step.
"""

import time

from pairaudit import Forest, Strategy
from pairaudit.oracle import run_both
from pairaudit.workload import GENERATORS, WorkloadSpec, generate

for generator in GENERATORS:
    for strategy in Strategy:
        wl = generate(WorkloadSpec(generator=generator, size=5000, seed=1, drain_tail=True))
        t0 = time.perf_counter()
        rep = run_both(wl, strategy, validate_every=500)
        print(f"{generator:<13}{strategy.value:<10}{len(wl):>7} ops  {rep}  "
              f"({time.perf_counter() - t0:.2f}s)")


# A heap that forgets decrease-keys is caught at the first affected step.
class Forgetful(Forest):
    def decrease_key(self, h, item, key):
        pass


wl = generate(WorkloadSpec(generator="dijkstra", size=200, seed=0))
print(run_both(wl, forest=Forgetful()))
