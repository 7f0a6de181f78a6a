"""
Recording a trace and classifying its links
===========================================

Attach a recorder to a forest and every link and cut is logged.  The
classifier then labels each link after the fact.
"""

import io

from pairaudit import Forest, TraceRecorder, tracing
from pairaudit.classify import classify

rec = TraceRecorder({"strategy": "twopass"})
forest = Forest(rec)

h = forest.make_heap()
root = forest.insert(h, 0)
for key in (6, 1, 8, 3, 5):
    forest.insert(h, key)

# one deletion: five cuts, then two pairing links and two assembly links
forest.delete_min(h)
event = rec.trace.events[-1]
print("cuts:", len(event.cuts))
for ln in event.links:
    print(f"  link {ln.link_id}: {forest.key(ln.winner)} beats {forest.key(ln.loser)}"
          f" ({ln.context.value}, {ln.orientation.value})")

# drain two of the five survivors so some nodes end up permanent
forest.delete_min(h)
forest.delete_min(h)

cl = classify(rec.trace)
for a in cl.links:
    kind = "real" if a.real else "phantom"
    print(f"link {a.link_id:2d} {a.context.value:<10} fate={a.fate.value} {kind}")
print("temporary nodes:", sorted(x for x, f in cl.fates.items() if f.value == "temporary"))

# traces are JSON Lines; one header line, then one line per operation
buf = io.StringIO()
tracing.dump(rec.trace, buf)
print(buf.getvalue().splitlines()[0])
assert tracing.deserialize(buf.getvalue()).events == rec.trace.events
