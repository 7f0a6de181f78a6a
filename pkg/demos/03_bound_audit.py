"""
Auditing link counts against the amortized bounds
=================================================

Sorting with a pairing heap: insert a shuffled range, then delete-min until
empty.  The audit compares exact link counts with each bound.
"""

from pairaudit.audit import audit
from pairaudit.workbench import run
from pairaudit.workload import WorkloadSpec, generate

workload = generate(WorkloadSpec(generator="sorting", size=1024, seed=0))
trace = run(workload)
report = audit(trace)

print(f"{'check':<22}{'lhs':>10}{'rhs':>14}{'slack':>14}  status")
for c in report.checks:
    print(f"{c.name:<22}{c.lhs:>10}{c.rhs:>14.2f}{c.slack:>14.2f}  {c.status}")

# links broken down by context, fate and reality
for key, count in report.counts.items():
    print(f"{key:<28}{count:>8}")

# the total-link bound is loose by a wide margin on this workload
t4 = report.check("theorem4")
print(f"total links {t4.lhs} use {t4.lhs / t4.rhs:.1%} of the bound")
