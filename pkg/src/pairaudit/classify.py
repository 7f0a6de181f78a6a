"""Post-hoc classification of a complete trace.

Everything here is a pure function of a :class:`~pairaudit.tracing.Trace`.
"Eventually" is read relative to the end of the trace: a node is temporary
if some delete-min or delete in the trace removes it, and a link that is
still uncut when the trace ends is a final link.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .tracing import (CutCause, CutEvent, LinkContext, LinkEvent, OpKind, Orientation,
                      Trace, TraceEvent, _event_to_obj, header)

MIN_N = 4


class NodeFate(str, Enum):
    TEMPORARY = "temporary"
    PERMANENT = "permanent"


class LinkFate(str, Enum):
    D_LINK = "d"
    K_LINK = "k"
    F_LINK = "f"


@dataclass(slots=True)
class LinkAnnotation:
    link_id: int
    winner: int
    loser: int
    context: LinkContext
    orientation: Orientation
    fate: LinkFate
    real: bool
    op_index: int


@dataclass(slots=True)
class OpContext:
    op_index: int
    kind: OpKind
    n_raw: int

    @property
    def n_clamped(self) -> int:
        return max(self.n_raw, MIN_N)


@dataclass(slots=True)
class SizeRecord:
    item: int
    op_index: int
    link_id: int | None   # None for the birth record and for cut records
    size: int


@dataclass(slots=True)
class MassRecord:
    item: int
    parent: int
    link_id: int
    op_index: int
    parent_size: int      # size of the parent just after the link
    sibling_sum: int      # 1 + own size + sizes of real right siblings


def deleted_item(ev: TraceEvent) -> int | None:
    if ev.kind in (OpKind.DELETE_MIN, OpKind.DELETE):
        return ev.item
    return None


def node_fates(trace: Trace) -> dict[int, NodeFate]:
    fates = {}
    for ev in trace.events:
        if ev.kind is OpKind.INSERT:
            fates[ev.item] = NodeFate.PERMANENT
    for ev in trace.events:
        x = deleted_item(ev)
        if x is not None:
            fates[x] = NodeFate.TEMPORARY
    return fates


def annotate_links(trace: Trace, fates: dict[int, NodeFate]) -> list[LinkAnnotation]:
    cause = {c.cut_link_id: c.cause for c in trace.cuts()}
    temp = NodeFate.TEMPORARY
    out = []
    for ln in trace.links():
        c = cause.get(ln.link_id)
        if c is CutCause.DELETION:
            fate = LinkFate.D_LINK
        elif c is CutCause.DECREASE_KEY:
            fate = LinkFate.K_LINK
        else:
            fate = LinkFate.F_LINK
        real = (fates.get(ln.winner) is temp and fates.get(ln.loser) is temp
                and fate is not LinkFate.K_LINK)
        out.append(LinkAnnotation(ln.link_id, ln.winner, ln.loser, ln.context,
                                  ln.orientation, fate, real, ln.op_index))
    return out


def op_contexts(trace: Trace, fates: dict[int, NodeFate]) -> list[OpContext]:
    """Temporary-node count of the heap(s) each operation acts on, at its start."""
    temps: dict[int, int] = {}
    out = []
    for ev in trace.events:
        k = ev.kind
        if k is OpKind.MAKE_HEAP:
            temps[ev.heap] = 0
            out.append(OpContext(ev.op_index, k, 0))
            continue
        if k is OpKind.MELD:
            n = temps.pop(ev.heap, 0) + temps.pop(ev.heap2, 0)
            temps[ev.result] = n
            out.append(OpContext(ev.op_index, k, n))
            continue
        n = temps.get(ev.heap, 0)
        out.append(OpContext(ev.op_index, k, n))
        if k is OpKind.INSERT and fates.get(ev.item) is NodeFate.TEMPORARY:
            temps[ev.heap] = n + 1
        elif deleted_item(ev) is not None:
            temps[ev.heap] = n - 1
    return out


class _Replay:
    """Rebuild the tree structure from links and cuts and track real sizes.

    Sizes are maintained generically: a real link adds the loser's size to
    the winner and to every real ancestor of the winner, and cutting a real
    link subtracts it again.  Nothing here assumes that links join roots or
    that real links are cut only by their winner's deletion, so a trace that
    breaks either property shows up as a size decrease.

    The new loser of a link is always its parent's leftmost child, so its
    real right siblings are all of the parent's other real children.  Their
    summed size is kept per parent and updated level by level, which makes
    the sibling formulation of mass O(1) per link.  ``literal=True`` walks
    the sibling list instead; tests use it to cross-check the running sums.
    """

    def __init__(self, trace: Trace, fates, annotations, literal: bool = False):
        self.literal = literal
        self.child_sum: dict[int, int] = {}
        self.trace = trace
        self.temp = {x for x, f in fates.items() if f is NodeFate.TEMPORARY}
        self.real = {a.link_id for a in annotations if a.real}
        self.links: dict[int, LinkEvent] = {ln.link_id: ln for ln in trace.links()}
        self.parent: dict[int, int] = {}
        self.parent_link: dict[int, int] = {}
        self.child: dict[int, int] = {}
        self.right: dict[int, int] = {}
        self.left: dict[int, int] = {}
        self.size: dict[int, int] = {}
        self.alive: set[int] = set()
        self.size_records: list[SizeRecord] = []
        self.mass_records: list[MassRecord] = []

    def run(self):
        for ev in self.trace.events:
            op = ev.op_index
            if ev.kind is OpKind.INSERT and ev.item in self.temp:
                self.size[ev.item] = 1
                self.alive.add(ev.item)
                self.size_records.append(SizeRecord(ev.item, op, None, 1))
            doomed = deleted_item(ev)
            for step in ev.steps():
                if isinstance(step, LinkEvent):
                    self._link(step, op)
                else:
                    if step.cause is CutCause.DELETION:
                        self.alive.discard(doomed)
                    self._cut(step, op)
            if doomed is not None:
                self.alive.discard(doomed)
        return self

    def _real_ancestors(self, x):
        while x in self.parent_link and self.parent_link[x] in self.real:
            x = self.parent[x]
            yield x

    def _bump(self, x, delta, op, link_id):
        chain = [x, *self._real_ancestors(x)]
        for a in chain:
            self.size[a] += delta
            if a in self.alive:
                self.size_records.append(SizeRecord(a, op, link_id, self.size[a]))
        for a in chain[1:]:
            self.child_sum[a] += delta

    def _link(self, ln: LinkEvent, op):
        w, lo = ln.winner, ln.loser
        if lo in self.parent:
            self._detach(lo, op)  # inconsistent trace; reported by check_consistency
        self.size.setdefault(w, 1)
        self.size.setdefault(lo, 1)
        old = self.child.get(w)
        if old is not None:
            self.right[lo] = old
            self.left[old] = lo
        self.child[w] = lo
        self.parent[lo] = w
        self.parent_link[lo] = ln.link_id
        if ln.link_id not in self.real:
            return
        if self.literal:
            siblings = 0
            s = self.right.get(lo)
            while s is not None:
                if self.parent_link[s] in self.real:
                    siblings += self.size[s]
                s = self.right.get(s)
        else:
            siblings = self.child_sum.get(w, 0)
        self.child_sum[w] = self.child_sum.get(w, 0) + self.size[lo]
        self._bump(w, self.size[lo], op, ln.link_id)
        total = 1 + self.size[lo] + siblings
        self.mass_records.append(MassRecord(lo, w, ln.link_id, op, self.size[w], total))

    def _cut(self, c: CutEvent, op):
        ln = self.links.get(c.cut_link_id)
        if ln is None:
            return
        y = ln.loser
        if self.parent_link.get(y) != c.cut_link_id:
            return  # inconsistent trace; reported by check_consistency
        self._detach(y, op)

    def _detach(self, y, op):
        p = self.parent[y]
        lft = self.left.pop(y, None)
        rgt = self.right.pop(y, None)
        if lft is None:
            if rgt is None:
                self.child.pop(p, None)
            else:
                self.child[p] = rgt
        else:
            if rgt is None:
                self.right.pop(lft, None)
            else:
                self.right[lft] = rgt
        if rgt is not None:
            if lft is None:
                self.left.pop(rgt, None)
            else:
                self.left[rgt] = lft
        if self.parent_link[y] in self.real:
            self.child_sum[p] -= self.size[y]
            self._bump(p, -self.size[y], op, None)
        del self.parent[y]
        del self.parent_link[y]


def size_timeline(trace: Trace, fates, annotations) -> list[SizeRecord]:
    return _Replay(trace, fates, annotations).run().size_records


def mass_records(trace: Trace, fates, annotations, literal: bool = False) -> list[MassRecord]:
    return _Replay(trace, fates, annotations, literal).run().mass_records


@dataclass
class Classification:
    """All post-hoc annotations of one trace."""
    trace: Trace
    fates: dict[int, NodeFate]
    links: list[LinkAnnotation]
    contexts: list[OpContext]
    sizes: list[SizeRecord] = field(default_factory=list)
    masses: list[MassRecord] = field(default_factory=list)

    def counts(self) -> Counter:
        """Links by (context, fate, reality)."""
        return Counter((a.context.value, a.fate.value, "real" if a.real else "phantom")
                       for a in self.links)


def classify(trace: Trace) -> Classification:
    fates = node_fates(trace)
    links = annotate_links(trace, fates)
    contexts = op_contexts(trace, fates)
    replay = _Replay(trace, fates, links).run()
    return Classification(trace, fates, links, contexts,
                          replay.size_records, replay.mass_records)


def annotated_lines(trace: Trace, annotations: list[LinkAnnotation]):
    """JSON Lines export: the trace with ``fate`` and ``real`` on every link."""
    by_id = {a.link_id: a for a in annotations}
    yield json.dumps(header({**trace.meta, "annotated": True}), separators=(",", ":"))
    for ev in trace.events:
        obj = _event_to_obj(ev)
        for ln in obj["links"]:
            a = by_id[ln["id"]]
            ln["fate"] = a.fate.value
            ln["real"] = a.real
        yield json.dumps(obj, separators=(",", ":"))
