"""Numeric audits of link counts against the amortized bounds.

Each check compares an exact integer count taken from the annotated trace
(``lhs``) with a bound evaluated in double precision (``rhs``).  Bounds that
depend on the heap size use ``n = max(n_raw, 4)`` where ``n_raw`` is the
number of temporary nodes in the heap(s) at the start of the operation; the
check is flagged ``clamped`` whenever that substitution changed some term.

A ``delete`` contributes one decrease-key term and one deletion term.  A
``delete_min`` on an empty heap removes nothing and contributes no term.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field

from .classify import Classification, LinkFate, OpContext, classify
from .tracing import CutCause, LinkContext, OpKind, Orientation, Trace, check_consistency

TOLERANCE = 1e-6
LG_E = 1.4426950408889634

LEMMA_2_FAMILY = ("lemma2", "lemma2_per_deletion",
                  "theorem1", "theorem2", "theorem3", "theorem4", "theorem5")


def lg(x: float) -> float:
    return math.log2(x)


@dataclass
class BoundCheck:
    name: str
    lhs: int
    rhs: float
    tolerance: float = TOLERANCE
    applicable: bool = True
    clamped: bool = False
    rhs_raw: float | None = None
    note: str = ""

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + self.tolerance

    @property
    def status(self) -> str:
        if not self.applicable:
            return "n/a"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["slack"] = self.slack
        d["pass"] = self.passed
        d["status"] = self.status
        return d


@dataclass(frozen=True)
class DeletionCheck:
    op_index: int
    children: int
    pairing: int
    assembly: int
    multipass: bool = False

    @property
    def lemma2_ok(self) -> bool:
        return self.assembly <= self.pairing

    @property
    def exact_ok(self) -> bool:
        c = self.children
        if self.multipass:
            return self.assembly == 0 and self.pairing == max(c - 1, 0)
        return self.pairing == c // 2 and self.assembly == max((c + 1) // 2 - 1, 0)


# ------------------------------------------------------------ operation terms

def _terms(contexts: list[OpContext], trace: Trace):
    """Split operations into inserts, melds, decrease-key terms, deletion terms."""
    ins, melds, dks, dels = [], [], [], []
    for ctx, ev in zip(contexts, trace.events):
        k = ev.kind
        if k is OpKind.INSERT:
            ins.append(ctx)
        elif k is OpKind.MELD:
            melds.append(ctx)
        elif k is OpKind.DECREASE_KEY:
            dks.append(ctx)
        elif k is OpKind.DELETE:
            dks.append(ctx)
            dels.append(ctx)
        elif k is OpKind.DELETE_MIN and ev.item is not None:
            dels.append(ctx)
    return ins, melds, dks, dels


def _bound(name, lhs, groups, tolerance=TOLERANCE):
    """``groups`` is a list of (contexts, term(n)) pairs summed into the rhs."""
    rhs = rhs_raw = 0.0
    clamped = False
    for ctxs, term in groups:
        for c in ctxs:
            rhs += term(c.n_clamped)
            rhs_raw += term(max(c.n_raw, 1))
            if c.n_raw < 4:
                clamped = True
    return BoundCheck(name, lhs, rhs, tolerance, clamped=clamped, rhs_raw=rhs_raw)


def _count(annotations, pred) -> int:
    return sum(1 for a in annotations if pred(a))


def _op_count(trace: Trace, kind: OpKind) -> int:
    return sum(1 for ev in trace.events if ev.kind is kind)


def _deletion_count(trace: Trace) -> int:
    return sum(1 for ev in trace.events
               if (ev.kind is OpKind.DELETE_MIN and ev.item is not None)
               or ev.kind is OpKind.DELETE)


# ------------------------------------------------------------------ lemmas

def check_lemma1(annotations, trace: Trace) -> BoundCheck:
    lhs = _count(annotations, lambda a: a.context in (LinkContext.INSERTION, LinkContext.MELD))
    return BoundCheck("lemma1", lhs, float(_op_count(trace, OpKind.INSERT)), tolerance=0.0)


def deletion_checks(annotations, trace: Trace) -> list[DeletionCheck]:
    multipass = trace.strategy == "multipass"
    out = []
    for ev in trace.events:
        if ev.kind not in (OpKind.DELETE_MIN, OpKind.DELETE) or ev.item is None:
            continue
        c = sum(1 for cut in ev.cuts if cut.cause is CutCause.DELETION)
        p = sum(1 for ln in ev.links if ln.context is LinkContext.PAIRING)
        a = sum(1 for ln in ev.links if ln.context is LinkContext.ASSEMBLY)
        out.append(DeletionCheck(ev.op_index, c, p, a, multipass))
    return out


def check_lemma2(annotations, trace: Trace) -> tuple[BoundCheck, list[DeletionCheck]]:
    dels = deletion_checks(annotations, trace)
    pairing = _count(annotations, lambda a: a.context is LinkContext.PAIRING)
    assembly = _count(annotations, lambda a: a.context is LinkContext.ASSEMBLY)
    check = BoundCheck("lemma2", assembly, float(pairing), tolerance=0.0)
    if trace.strategy == "multipass":
        check.applicable = False
        check.note = "multipass deletions do no assembly pass"
    return check, dels


def check_lemma3(annotations, trace: Trace) -> BoundCheck:
    flinks = _count(annotations, lambda a: a.fate is LinkFate.F_LINK)
    return BoundCheck("lemma3", flinks + _deletion_count(trace),
                      float(_op_count(trace, OpKind.INSERT)), tolerance=0.0)


# ---------------------------------------------------------------- theorems

def _real_right_assembly(a):
    return (a.real and a.context is LinkContext.ASSEMBLY
            and a.orientation is Orientation.LOSER_RIGHT)


def _real_pairing(a):
    return a.real and a.context is LinkContext.PAIRING


def check_theorem1(annotations, trace: Trace, contexts: list[OpContext]) -> BoundCheck:
    ins, _, dks, _ = _terms(contexts, trace)
    lhs = _count(annotations, lambda a: a.context is LinkContext.PAIRING)
    rhs = (4 * len(ins) + 3 * len(dks)
           + 2 * _count(annotations, _real_right_assembly)
           + 2 * _count(annotations, _real_pairing))
    return BoundCheck("theorem1", lhs, float(rhs))


def check_theorem2(annotations, trace: Trace, contexts: list[OpContext]) -> BoundCheck:
    _, _, dks, dels = _terms(contexts, trace)
    return _bound("theorem2", _count(annotations, _real_right_assembly),
                  [(dks, lambda n: lg(n) / 2), (dels, lg)])


def check_theorem3(annotations, trace: Trace, contexts: list[OpContext]) -> BoundCheck:
    _, _, dks, dels = _terms(contexts, trace)
    return _bound("theorem3", _count(annotations, _real_pairing),
                  [(dks, lg), (dels, lambda n: 1.5 * lg(n) + LG_E / 2)])


def check_theorem4(annotations, trace: Trace, contexts: list[OpContext]) -> BoundCheck:
    ins, _, dks, dels = _terms(contexts, trace)
    return _bound("theorem4", len(annotations),
                  [(ins, lambda n: 9.0),
                   (dks, lambda n: 6 * lg(n) + 7),
                   (dels, lambda n: 10 * lg(n) + 2 * LG_E)])


def check_theorem5(annotations, trace: Trace, contexts: list[OpContext]) -> BoundCheck:
    ins, melds, dks, dels = _terms(contexts, trace)
    return _bound("theorem5", len(annotations),
                  [(ins, lambda n: lg(n) + 1),
                   (melds, lg),
                   (dks, lambda n: lg(n) + 3),
                   (dels, lambda n: 2 * lg(n))])


def check_log_inequality(a: float, b: float, tol: float = 1e-12) -> bool:
    """Whether ``2 lg(a + b) >= lg a + lg b + 2`` (to ``tol``)."""
    return 2 * lg(a + b) - (lg(a) + lg(b) + 2) >= -tol


# ------------------------------------------------------- structural checks

def check_size_monotonicity(sizes) -> BoundCheck:
    last: dict[int, int] = {}
    bad = 0
    for r in sizes:
        if r.size < 1 or r.size < last.get(r.item, 0):
            bad += 1
        last[r.item] = r.size
    return BoundCheck("size_monotonicity", bad, 0.0, tolerance=0.0,
                      note=f"{len(sizes)} size records")


def check_mass_equivalence(masses) -> BoundCheck:
    bad = sum(1 for m in masses if m.parent_size != m.sibling_sum)
    return BoundCheck("mass_equivalence", bad, 0.0, tolerance=0.0,
                      note=f"{len(masses)} mass records")


# ------------------------------------------------------------------ report

@dataclass
class AuditReport:
    strategy: str
    checks: list[BoundCheck]
    deletions: list[DeletionCheck] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)
    consistency: list[str] = field(default_factory=list)

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks if c.applicable)

    def check(self, name: str) -> BoundCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if c.applicable and not c.passed]

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "overall_pass": self.overall_pass,
            "checks": [c.to_dict() for c in self.checks],
            "deletions": {
                "count": len(self.deletions),
                "lemma2_violations": sum(1 for d in self.deletions if not d.lemma2_ok),
                "exact_count_violations": sum(1 for d in self.deletions if not d.exact_ok),
            },
            "counts": self.counts,
            "consistency_errors": self.consistency,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def to_csv(self) -> str:
        return checks_to_csv(self.to_dict()["checks"])


def checks_to_csv(checks: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "lhs", "rhs", "slack", "pass"])
    for c in checks:
        w.writerow([c["name"], c["lhs"], repr(float(c["rhs"])), repr(float(c["slack"])),
                    c["status"]])
    return buf.getvalue()


def audit(trace_or_classification: Trace | Classification) -> AuditReport:
    """Classify (if needed) and run every check on one trace."""
    cl = trace_or_classification
    if isinstance(cl, Trace):
        cl = classify(cl)
    trace, ann, ctx = cl.trace, cl.links, cl.contexts
    consistency = check_consistency(trace)
    lemma2, dels = check_lemma2(ann, trace)
    exact_bad = sum(1 for d in dels if not d.exact_ok)
    lemma2_bad = sum(1 for d in dels if not d.lemma2_ok)
    checks = [
        BoundCheck("trace_consistency", len(consistency), 0.0, tolerance=0.0),
        BoundCheck("deletion_link_counts", exact_bad, 0.0, tolerance=0.0,
                   note=f"{len(dels)} deletions"),
        check_lemma1(ann, trace),
        lemma2,
        BoundCheck("lemma2_per_deletion", lemma2_bad, 0.0, tolerance=0.0,
                   note=f"deletions with more assembly than pairing links, of {len(dels)}"),
        check_lemma3(ann, trace),
        check_theorem1(ann, trace, ctx),
        check_theorem2(ann, trace, ctx),
        check_theorem3(ann, trace, ctx),
        check_theorem4(ann, trace, ctx),
        check_theorem5(ann, trace, ctx),
        check_size_monotonicity(cl.sizes),
        check_mass_equivalence(cl.masses),
    ]
    if trace.strategy == "multipass":
        for c in checks:
            if c.name in LEMMA_2_FAMILY:
                c.applicable = False
                c.note = c.note or "bound is specific to two-pass deletions"
    counts = {"/".join(k): v for k, v in sorted(cl.counts().items())}
    return AuditReport(trace.strategy, checks, dels, counts, consistency)


def recount(annotations, trace: Trace, contexts: list[OpContext]) -> dict[str, int]:
    """Second, deliberately naive pass over the annotations for every lhs."""
    c = Counter()
    for a in annotations:
        c["total"] += 1
        ctx = a.context.value
        if ctx == "insertion" or ctx == "meld":
            c["lemma1"] += 1
        if ctx == "pairing":
            c["theorem1"] += 1
            if a.real:
                c["theorem3"] += 1
        if ctx == "assembly":
            c["lemma2"] += 1
            if a.real and a.orientation.value == "right":
                c["theorem2"] += 1
        if a.fate.value == "f":
            c["flinks"] += 1
    deletions = 0
    for ev in trace.events:
        if ev.kind.value == "delete":
            deletions += 1
        elif ev.kind.value == "delete_min" and ev.item is not None:
            deletions += 1
    return {
        "lemma1": c["lemma1"],
        "lemma2": c["lemma2"],
        "lemma3": c["flinks"] + deletions,
        "theorem1": c["theorem1"],
        "theorem2": c["theorem2"],
        "theorem3": c["theorem3"],
        "theorem4": c["total"],
        "theorem5": c["total"],
    }
