"""
Damaged traces do not pass
==========================

Insert one fake link, or drop one cut, and the audit notices.
"""

from pairaudit.audit import audit
from pairaudit.rng import SplitMix64
from pairaudit.workbench import PERTURBATIONS, perturb, run
from pairaudit.workload import WorkloadSpec, generate

trace = run(generate(WorkloadSpec(generator="random_mixed", size=3000, seed=5,
                                  drain_tail=True)))
print("clean trace passes:", audit(trace).overall_pass)

rng = SplitMix64(11)
for mode in PERTURBATIONS:
    report = audit(perturb(trace, rng, mode))
    print(f"{mode}: pass={report.overall_pass}")
    for c in report.failures():
        print(f"    {c.name}: lhs={c.lhs} rhs={c.rhs:g}")
    for msg in report.consistency[:3]:
        print("    ", msg)
