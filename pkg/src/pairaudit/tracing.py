"""Operation traces: every heap operation with the links and cuts it performed.

A trace is written as JSON Lines.  The first line is a metadata object, each
following line is one operation::

    {"trace":"pairing-heap","version":1,"strategy":"twopass",...}
    {"op":0,"kind":"make_heap","heap":0,"heap2":null,"item":null,"key":null,"links":[],"cuts":[]}
    {"op":1,"kind":"insert","heap":0,"heap2":null,"item":0,"key":5,"links":[],"cuts":[]}

Link entries are ``{"id","winner","loser","ctx","orient"}`` and cut entries
``{"cutLink","cause"}``.  Meld lines carry an extra ``"result"`` field naming
the heap that replaces both inputs.

Within one operation the execution order of links and cuts is fixed by the
heap procedures and is recovered by :meth:`TraceEvent.steps`: decrease-key
cuts, then decrease-key links, then deletion cuts, then all other links.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Iterator

FORMAT_NAME = "pairing-heap"
FORMAT_VERSION = 1


class OpKind(str, Enum):
    MAKE_HEAP = "make_heap"
    INSERT = "insert"
    MELD = "meld"
    DECREASE_KEY = "decrease_key"
    DELETE_MIN = "delete_min"
    DELETE = "delete"
    FIND_MIN = "find_min"


class LinkContext(str, Enum):
    INSERTION = "insertion"
    MELD = "meld"
    DECREASE_KEY = "decrease_key"
    PAIRING = "pairing"
    ASSEMBLY = "assembly"


class Orientation(str, Enum):
    LOSER_LEFT = "left"
    LOSER_RIGHT = "right"
    NOT_APPLICABLE = "na"


class CutCause(str, Enum):
    DELETION = "deletion"
    DECREASE_KEY = "decrease_key"


# contexts whose links are done during a deletion and so have an orientation
DELETION_CONTEXTS = frozenset({LinkContext.PAIRING, LinkContext.ASSEMBLY})


@dataclass(slots=True)
class LinkEvent:
    link_id: int
    winner: int
    loser: int
    context: LinkContext
    orientation: Orientation
    op_index: int


@dataclass(slots=True)
class CutEvent:
    cut_link_id: int
    cause: CutCause
    op_index: int


@dataclass(slots=True)
class TraceEvent:
    op_index: int
    kind: OpKind
    heap: int | None = None
    heap2: int | None = None
    item: int | None = None
    key: int | None = None
    result: int | None = None
    links: list[LinkEvent] = field(default_factory=list)
    cuts: list[CutEvent] = field(default_factory=list)

    def steps(self) -> Iterator[LinkEvent | CutEvent]:
        """Yield this operation's links and cuts in execution order."""
        for c in self.cuts:
            if c.cause is CutCause.DECREASE_KEY:
                yield c
        for ln in self.links:
            if ln.context is LinkContext.DECREASE_KEY:
                yield ln
        for c in self.cuts:
            if c.cause is CutCause.DELETION:
                yield c
        for ln in self.links:
            if ln.context is not LinkContext.DECREASE_KEY:
                yield ln


@dataclass
class Trace:
    events: list[TraceEvent] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def strategy(self) -> str:
        return self.meta.get("strategy", "twopass")

    def links(self) -> Iterator[LinkEvent]:
        for ev in self.events:
            yield from ev.links

    def cuts(self) -> Iterator[CutEvent]:
        for ev in self.events:
            yield from ev.cuts


class TraceFormatError(ValueError):
    """Malformed trace stream; ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TraceRecorder:
    """Append-only sink that a :class:`~pairaudit.heap.Forest` writes into.

    The forest opens an operation with :meth:`begin`, reports links and cuts
    as they happen, and closes it with :meth:`end`.  Complete events built
    elsewhere can be appended with :meth:`record`.
    """

    def __init__(self, meta: dict | None = None):
        self.trace = Trace(meta=dict(meta or {}))
        self._open: TraceEvent | None = None
        self._last_link = -1

    def begin(self, kind: OpKind, heap=None, heap2=None, item=None, key=None) -> TraceEvent:
        if self._open is not None:
            raise RuntimeError("operation already open")
        ev = TraceEvent(len(self.trace.events), kind, heap, heap2, item, key)
        self._open = ev
        return ev

    def link(self, link_id: int, winner: int, loser: int, context: LinkContext,
             orientation: Orientation) -> None:
        ev = self._open
        ev.links.append(LinkEvent(link_id, winner, loser, context, orientation, ev.op_index))

    def cut(self, link_id: int, cause: CutCause) -> None:
        ev = self._open
        ev.cuts.append(CutEvent(link_id, cause, ev.op_index))

    def end(self) -> TraceEvent:
        ev, self._open = self._open, None
        self._check_and_append(ev)
        return ev

    def abort(self) -> None:
        """Drop an operation that raised before changing anything."""
        self._open = None

    def record(self, event: TraceEvent) -> None:
        """Append a complete event; its op index is reassigned to stay dense."""
        if self._open is not None:
            raise RuntimeError("operation already open")
        event.op_index = len(self.trace.events)
        for ln in event.links:
            ln.op_index = event.op_index
        for c in event.cuts:
            c.op_index = event.op_index
        self._check_and_append(event)

    def _check_and_append(self, ev: TraceEvent) -> None:
        for ln in ev.links:
            if ln.link_id <= self._last_link:
                raise ValueError(f"link id {ln.link_id} not increasing")
            self._last_link = ln.link_id
        self.trace.events.append(ev)


# ---------------------------------------------------------------- JSON Lines

def _event_to_obj(ev: TraceEvent) -> dict:
    obj = {
        "op": ev.op_index,
        "kind": ev.kind.value,
        "heap": ev.heap,
        "heap2": ev.heap2,
        "item": ev.item,
        "key": ev.key,
    }
    if ev.kind is OpKind.MELD:
        obj["result"] = ev.result
    obj["links"] = [
        {"id": ln.link_id, "winner": ln.winner, "loser": ln.loser,
         "ctx": ln.context.value, "orient": ln.orientation.value}
        for ln in ev.links
    ]
    obj["cuts"] = [{"cutLink": c.cut_link_id, "cause": c.cause.value} for c in ev.cuts]
    return obj


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def header(meta: dict) -> dict:
    return {"trace": FORMAT_NAME, "version": FORMAT_VERSION, **meta}


def iter_lines(trace: Trace) -> Iterator[str]:
    yield _dumps(header(trace.meta))
    for ev in trace.events:
        yield _dumps(_event_to_obj(ev))


def serialize(trace: Trace) -> bytes:
    return "".join(line + "\n" for line in iter_lines(trace)).encode("utf-8")


def dump(trace: Trace, fp: IO[str]) -> None:
    for line in iter_lines(trace):
        fp.write(line)
        fp.write("\n")


def _opt_int(obj, name, lineno):
    v = obj.get(name)
    if v is not None and (not isinstance(v, int) or isinstance(v, bool)):
        raise TraceFormatError(lineno, f"field {name!r} must be an integer or null")
    return v


def _req(obj, name, lineno):
    if name not in obj:
        raise TraceFormatError(lineno, f"missing field {name!r}")
    return obj[name]


def _parse_event(obj, lineno: int) -> TraceEvent:
    if not isinstance(obj, dict):
        raise TraceFormatError(lineno, "expected a JSON object")
    op = _req(obj, "op", lineno)
    if not isinstance(op, int) or isinstance(op, bool):
        raise TraceFormatError(lineno, "field 'op' must be an integer")
    try:
        kind = OpKind(_req(obj, "kind", lineno))
    except ValueError:
        raise TraceFormatError(lineno, f"unknown kind {obj['kind']!r}") from None
    ev = TraceEvent(
        op, kind,
        heap=_opt_int(obj, "heap", lineno),
        heap2=_opt_int(obj, "heap2", lineno),
        item=_opt_int(obj, "item", lineno),
        key=_opt_int(obj, "key", lineno),
        result=_opt_int(obj, "result", lineno),
    )
    links = _req(obj, "links", lineno)
    cuts = _req(obj, "cuts", lineno)
    if not isinstance(links, list) or not isinstance(cuts, list):
        raise TraceFormatError(lineno, "'links' and 'cuts' must be arrays")
    try:
        for ln in links:
            ev.links.append(LinkEvent(
                int(ln["id"]), int(ln["winner"]), int(ln["loser"]),
                LinkContext(ln["ctx"]), Orientation(ln["orient"]), op))
        for c in cuts:
            ev.cuts.append(CutEvent(int(c["cutLink"]), CutCause(c["cause"]), op))
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceFormatError(lineno, f"bad link/cut entry: {exc}") from None
    return ev


def parse_lines(lines: Iterable[str]) -> Trace:
    trace: Trace | None = None
    lineno = 0
    for lineno, raw in enumerate(lines, start=1):
        if not raw.endswith("\n"):
            raise TraceFormatError(lineno, "truncated line (no newline terminator)")
        text = raw.strip()
        if not text:
            raise TraceFormatError(lineno, "blank line")
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(lineno, f"invalid JSON: {exc.msg}") from None
        if trace is None:
            if not isinstance(obj, dict) or obj.get("trace") != FORMAT_NAME:
                raise TraceFormatError(lineno, "missing trace metadata header")
            if obj.get("version") != FORMAT_VERSION:
                raise TraceFormatError(lineno, f"unsupported version {obj.get('version')!r}")
            meta = {k: v for k, v in obj.items() if k not in ("trace", "version")}
            trace = Trace(meta=meta)
            continue
        ev = _parse_event(obj, lineno)
        if ev.op_index != len(trace.events):
            raise TraceFormatError(lineno, f"expected op {len(trace.events)}, got {ev.op_index}")
        trace.events.append(ev)
    if trace is None:
        raise TraceFormatError(lineno + 1, "empty stream")
    return trace


def deserialize(data: bytes | str) -> Trace:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return parse_lines(data.splitlines(keepends=True))


def load(fp: IO[str]) -> Trace:
    return parse_lines(fp)


# ------------------------------------------------------------ consistency

def check_consistency(trace: Trace, limit: int = 20) -> list[str]:
    """Rebuild the forest from links and cuts alone and report contradictions.

    Independent of the heap implementation: keys come from the operation
    payloads, structure from the recorded links and cuts.  Checks that link
    ids are dense, links join two distinct roots in heap order, cuts sever a
    live link, each operation's link/cut shape fits its kind, and every heap
    ends each operation with the root the links imply.  Returns at most
    ``limit`` messages; an empty list means consistent.
    """
    errors: list[str] = []

    def err(op, msg):
        if len(errors) < limit:
            errors.append(f"op {op}: {msg}")

    key: dict[int, object] = {}
    parent: dict[int, int] = {}          # loser -> winner, for live links
    parent_link: dict[int, int] = {}     # loser -> link id
    nchildren: dict[int, int] = {}
    links_by_id: dict[int, LinkEvent] = {}
    cut_done: set[int] = set()
    heap_root: dict[int, int | None] = {}
    live_heaps: set[int] = set()
    next_item = 0
    next_heap = 0
    next_link = 0
    NEG = _NegInf()

    def lt(a, b):
        return (a is NEG and b is not NEG) or (a is not NEG and b is not NEG and a < b)

    for ev in trace.events:
        op = ev.op_index
        kind = ev.kind
        involved = [h for h in (ev.heap, ev.heap2) if h is not None]
        if kind is not OpKind.MAKE_HEAP:
            for h in involved:
                if h not in live_heaps:
                    err(op, f"heap {h} is not live")
        if kind is OpKind.MAKE_HEAP:
            if ev.heap != next_heap:
                err(op, f"make_heap id {ev.heap}, expected {next_heap}")
            live_heaps.add(ev.heap)
            heap_root[ev.heap] = None
            next_heap = max(next_heap, (ev.heap or 0)) + 1
        elif kind is OpKind.INSERT:
            if ev.item != next_item:
                err(op, f"insert item {ev.item}, expected {next_item}")
            next_item = max(next_item, (ev.item or 0)) + 1
            key[ev.item] = ev.key
        elif kind is OpKind.DECREASE_KEY:
            if ev.item not in key:
                err(op, f"unknown item {ev.item}")
            elif ev.key is not None and lt(key[ev.item], ev.key):
                err(op, f"decrease_key raises key of {ev.item}")
            key[ev.item] = ev.key
        elif kind is OpKind.DELETE:
            key[ev.item] = NEG

        # shape of the operation's structural changes
        ctxs = [ln.context for ln in ev.links]
        causes = [c.cause for c in ev.cuts]
        if kind in (OpKind.MAKE_HEAP, OpKind.FIND_MIN) and (ev.links or ev.cuts):
            err(op, f"{kind.value} must not link or cut")
        elif kind is OpKind.INSERT and (ev.cuts or len(ev.links) > 1
                                        or any(c is not LinkContext.INSERTION for c in ctxs)):
            err(op, "insert does at most one insertion link and no cuts")
        elif kind is OpKind.MELD and (ev.cuts or len(ev.links) > 1
                                      or any(c is not LinkContext.MELD for c in ctxs)):
            err(op, "meld does at most one meld link and no cuts")
        elif kind is OpKind.DECREASE_KEY and not (
                (not ev.links and not ev.cuts)
                or (ctxs == [LinkContext.DECREASE_KEY] and causes == [CutCause.DECREASE_KEY])):
            err(op, "decrease_key does nothing or one cut plus one link")
        elif kind in (OpKind.DELETE_MIN, OpKind.DELETE):
            ndk_cut = causes.count(CutCause.DECREASE_KEY)
            ndk_link = ctxs.count(LinkContext.DECREASE_KEY)
            if ndk_cut != ndk_link or ndk_cut > (1 if kind is OpKind.DELETE else 0):
                err(op, "unexpected decrease-key link/cut in deletion")
            ndel = causes.count(CutCause.DELETION)
            nrest = len(ctxs) - ndk_link
            if nrest != max(ndel - 1, 0):
                err(op, f"deletion cut {ndel} children but did {nrest} links")
            if any(c in (LinkContext.INSERTION, LinkContext.MELD) for c in ctxs):
                err(op, "insertion/meld link inside a deletion")

        # replay structure
        for step in ev.steps():
            if isinstance(step, LinkEvent):
                ln = step
                if ln.link_id != next_link:
                    err(op, f"link id {ln.link_id}, expected {next_link}")
                next_link = max(next_link, ln.link_id) + 1
                links_by_id[ln.link_id] = ln
                w, lo = ln.winner, ln.loser
                if w == lo:
                    err(op, f"link {ln.link_id} joins {w} to itself")
                    continue
                if w not in key or lo not in key:
                    err(op, f"link {ln.link_id} names an unknown item")
                    continue
                if w in parent or lo in parent:
                    err(op, f"link {ln.link_id} between non-roots {w},{lo}")
                if lt(key[lo], key[w]):
                    err(op, f"link {ln.link_id} violates heap order")
                deletion_ctx = ln.context in DELETION_CONTEXTS
                if deletion_ctx == (ln.orientation is Orientation.NOT_APPLICABLE):
                    err(op, f"link {ln.link_id} orientation {ln.orientation.value} "
                            f"wrong for {ln.context.value}")
                parent[lo] = w
                parent_link[lo] = ln.link_id
                nchildren[w] = nchildren.get(w, 0) + 1
            else:
                c = step
                ln = links_by_id.get(c.cut_link_id)
                if ln is None:
                    err(op, f"cut of unknown link {c.cut_link_id}")
                    continue
                if c.cut_link_id in cut_done:
                    err(op, f"link {c.cut_link_id} cut twice")
                    continue
                cut_done.add(c.cut_link_id)
                if parent_link.get(ln.loser) != c.cut_link_id:
                    err(op, f"cut link {c.cut_link_id} is not the live parent link of {ln.loser}")
                    continue
                del parent[ln.loser]
                del parent_link[ln.loser]
                nchildren[ln.winner] -= 1
                if c.cause is CutCause.DELETION and ln.winner != ev.item:
                    err(op, f"deletion cut link {c.cut_link_id} not won by deleted item {ev.item}")
                if c.cause is CutCause.DECREASE_KEY and ln.loser != ev.item:
                    err(op, f"decrease-key cut detaches {ln.loser}, not {ev.item}")

        # heap roots after the operation
        last_winner = ev.links[-1].winner if ev.links else None
        if kind is OpKind.INSERT and ev.heap in heap_root:
            old = heap_root[ev.heap]
            heap_root[ev.heap] = last_winner if old is not None else ev.item
            if old is not None and not ev.links:
                err(op, "insert into non-empty heap did no link")
            if old is None and ev.links:
                err(op, "insert into empty heap linked")
        elif kind is OpKind.MELD:
            r1 = heap_root.get(ev.heap)
            r2 = heap_root.get(ev.heap2)
            both = r1 is not None and r2 is not None
            if both != bool(ev.links):
                err(op, "meld must link iff both heaps are non-empty")
            if ev.result != next_heap:
                err(op, f"meld result {ev.result}, expected {next_heap}")
            next_heap = max(next_heap, (ev.result or 0)) + 1
            live_heaps.discard(ev.heap)
            live_heaps.discard(ev.heap2)
            heap_root.pop(ev.heap, None)
            heap_root.pop(ev.heap2, None)
            live_heaps.add(ev.result)
            heap_root[ev.result] = last_winner if both else (r1 if r1 is not None else r2)
        elif kind is OpKind.DECREASE_KEY and ev.links:
            heap_root[ev.heap] = last_winner
        elif kind in (OpKind.DELETE_MIN, OpKind.DELETE) and ev.heap in heap_root:
            root = heap_root[ev.heap]
            if kind is OpKind.DELETE and any(
                    ln.context is LinkContext.DECREASE_KEY for ln in ev.links):
                root = next(ln.winner for ln in ev.links
                            if ln.context is LinkContext.DECREASE_KEY)
            if ev.item is None:
                if root is not None:
                    err(op, "delete_min on non-empty heap returned nothing")
            else:
                if ev.item != root:
                    err(op, f"deleted item {ev.item} is not the root {root}")
                if ev.item in parent or nchildren.get(ev.item, 0):
                    err(op, f"deleted item {ev.item} still attached")
                key.pop(ev.item, None)
                ndel = sum(1 for c in ev.cuts if c.cause is CutCause.DELETION)
                rest = [ln for ln in ev.links if ln.context is not LinkContext.DECREASE_KEY]
                if rest:
                    heap_root[ev.heap] = rest[-1].winner
                elif ndel == 1:
                    only = links_by_id[next(c.cut_link_id for c in ev.cuts
                                            if c.cause is CutCause.DELETION)]
                    heap_root[ev.heap] = only.loser
                else:
                    heap_root[ev.heap] = None
        elif kind is OpKind.FIND_MIN and ev.heap in heap_root:
            if ev.item != heap_root[ev.heap]:
                err(op, f"find_min returned {ev.item}, root is {heap_root[ev.heap]}")

        for h in (ev.result if kind is OpKind.MELD else ev.heap,):
            r = heap_root.get(h)
            if r is not None and r in parent:
                err(op, f"heap {h} root {r} has a parent")
    return errors


class _NegInf:
    """Stand-in for the minus-infinity key inside the consistency replay."""
