"""Glue between workloads, traced runs, classification and audits."""

from __future__ import annotations

import os
import tempfile

from . import tracing
from .audit import AuditReport, BoundCheck, audit
from .heap import Forest, HeapError, Strategy
from .rng import SplitMix64
from .tracing import LinkContext, LinkEvent, OpKind, Orientation, Trace, TraceRecorder
from .workload import Op, Workload, WorkloadError, apply_op


def run(workload: Workload, strategy: Strategy | str = Strategy.TWO_PASS) -> Trace:
    """Execute ``workload`` on a traced :class:`Forest` and return the trace."""
    strategy = Strategy(strategy)
    meta = {"strategy": strategy.value}
    for k in ("generator", "size", "seed", "drain_tail"):
        if k in workload.meta:
            meta[k] = workload.meta[k]
    rec = TraceRecorder(meta)
    forest = Forest(rec)
    for i, op in enumerate(workload.ops):
        try:
            apply_op(forest, op, strategy)
        except HeapError as exc:
            raise WorkloadError(str(exc), op_index=i) from exc
    return rec.trace


def operations(trace: Trace) -> Workload:
    """Recover the operation sequence recorded in ``trace``."""
    ops = []
    for ev in trace.events:
        k = ev.kind
        if k is OpKind.MAKE_HEAP:
            ops.append(Op(k))
        elif k is OpKind.INSERT:
            ops.append(Op(k, heap=ev.heap, key=ev.key))
        elif k is OpKind.MELD:
            ops.append(Op(k, heap=ev.heap, heap2=ev.heap2))
        elif k is OpKind.DECREASE_KEY:
            ops.append(Op(k, heap=ev.heap, item=ev.item, key=ev.key))
        elif k is OpKind.DELETE:
            ops.append(Op(k, heap=ev.heap, item=ev.item))
        else:
            ops.append(Op(k, heap=ev.heap))
    return Workload(ops, dict(trace.meta))


def replay(trace: Trace) -> Trace:
    """Re-run the trace's operations; the result should equal ``trace``."""
    return run(operations(trace), trace.strategy)


def replay_matches(trace: Trace) -> bool:
    try:
        again = replay(trace)
    except (WorkloadError, KeyError, TypeError, ValueError):
        return False
    return again.events == trace.events


def full_audit(trace: Trace, check_replay: bool = True) -> AuditReport:
    """Audit plus, optionally, a replay through the heap as one more check."""
    report = audit(trace)
    if check_replay:
        ok = replay_matches(trace)
        report.checks.insert(1, BoundCheck("replay_identity", 0 if ok else 1, 0.0,
                                           tolerance=0.0))
    return report


# ------------------------------------------------------------ perturbation

def _renumber(trace: Trace) -> None:
    """Make link ids dense again, rewriting cut references to match."""
    mapping = {}
    nxt = 0
    for ev in trace.events:
        for ln in ev.links:
            mapping[ln.link_id] = nxt
            ln.link_id = nxt
            nxt += 1
    for ev in trace.events:
        for c in ev.cuts:
            c.cut_link_id = mapping.get(c.cut_link_id, c.cut_link_id)


def _copy(trace: Trace) -> Trace:
    return tracing.deserialize(tracing.serialize(trace))


def perturb(trace: Trace, rng: SplitMix64, mode: str) -> Trace:
    """Return a damaged copy of ``trace``.

    ``spurious_link`` adds one plausible-looking link (between two inserted
    items, with a context matching the operation) and renumbers link ids so
    the file stays syntactically valid.  ``drop_cut`` removes one cut.
    """
    t = _copy(trace)
    if mode == "drop_cut":
        where = [(i, j) for i, ev in enumerate(t.events) for j in range(len(ev.cuts))]
        if not where:
            raise ValueError("trace has no cuts to drop")
        i, j = where[rng.below(len(where))]
        del t.events[i].cuts[j]
        return t
    if mode != "spurious_link":
        raise ValueError(f"unknown perturbation {mode!r}")
    items = [ev.item for ev in t.events if ev.kind is OpKind.INSERT]
    if len(items) < 2:
        raise ValueError("trace has too few items to fake a link")
    i = rng.below(len(t.events))
    ev = t.events[i]
    ctx = {
        OpKind.INSERT: LinkContext.INSERTION,
        OpKind.MELD: LinkContext.MELD,
        OpKind.DECREASE_KEY: LinkContext.DECREASE_KEY,
    }.get(ev.kind, LinkContext.PAIRING)
    orient = (Orientation.LOSER_RIGHT if ctx is LinkContext.PAIRING
              else Orientation.NOT_APPLICABLE)
    w = items[rng.below(len(items))]
    lo = w
    while lo == w:
        lo = items[rng.below(len(items))]
    ev.links.append(LinkEvent(-1, w, lo, ctx, orient, ev.op_index))
    _renumber(t)
    return t


PERTURBATIONS = ("spurious_link", "drop_cut")


# ------------------------------------------------------------------ files

def atomic_write(path: str, data: str | bytes) -> None:
    """Write via a temporary file in the same directory and rename."""
    mode = "wb" if isinstance(data, bytes) else "w"
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode) as fp:
            fp.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
