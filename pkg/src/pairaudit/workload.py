"""Seeded workload generators and the workload file format.

A workload is a list of abstract operations that refer to items by birth
order and heaps by creation order (``make_heap`` and ``meld`` both create a
heap).  Because :class:`~pairaudit.heap.Forest` hands out ids in exactly that
order, the indices double as the ids the heap will assign.

Generators simulate the heap contents with :class:`~pairaudit.oracle.RefHeap`
so every reference is valid when it is issued.  All generators except
``dijkstra`` draw globally distinct keys; ``dijkstra`` encodes the vertex in
the low bits of the key, which makes its keys distinct too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable

from .heap import Strategy
from .oracle import RefHeap
from .rng import SplitMix64
from .tracing import OpKind

GENERATORS = ("sorting", "random_mixed", "dijkstra", "meld_heavy")

DEFAULT_MIX = {
    "insert": 0.35,
    "delete_min": 0.20,
    "decrease_key": 0.20,
    "delete": 0.05,
    "meld": 0.05,
    "make_heap": 0.05,
    "find_min": 0.10,
}

FORMAT_NAME = "pairing-heap-workload"
FORMAT_VERSION = 1


class WorkloadError(ValueError):
    """Invalid workload spec, or an operation that failed while running."""

    def __init__(self, message, op_index=None):
        if op_index is not None:
            message = f"op {op_index}: {message}"
        super().__init__(message)
        self.op_index = op_index


@dataclass(frozen=True, slots=True)
class Op:
    kind: OpKind
    heap: int | None = None
    heap2: int | None = None
    item: int | None = None
    key: int | None = None

    def to_obj(self) -> dict:
        obj = {"kind": self.kind.value}
        for name in ("heap", "heap2", "item", "key"):
            v = getattr(self, name)
            if v is not None:
                obj[name] = v
        return obj

    @classmethod
    def from_obj(cls, obj) -> "Op":
        return cls(OpKind(obj["kind"]), obj.get("heap"), obj.get("heap2"),
                   obj.get("item"), obj.get("key"))


@dataclass
class WorkloadSpec:
    generator: str = "random_mixed"
    size: int = 1000
    seed: int = 0
    strategy: Strategy = Strategy.TWO_PASS
    drain_tail: bool = False
    mix: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_MIX))

    def validate(self) -> None:
        if self.generator not in GENERATORS:
            raise WorkloadError(f"unknown generator {self.generator!r}; "
                                f"choose from {', '.join(GENERATORS)}")
        if self.size <= 0:
            raise WorkloadError("size must be positive")
        unknown = set(self.mix) - set(DEFAULT_MIX)
        if unknown:
            raise WorkloadError(f"unknown operations in mix: {sorted(unknown)}")
        if any(p < 0 for p in self.mix.values()):
            raise WorkloadError("mix probabilities must be non-negative")
        if abs(sum(self.mix.values()) - 1.0) > 1e-9:
            raise WorkloadError(f"mix probabilities sum to {sum(self.mix.values())}, not 1")

    def meta(self) -> dict:
        meta = {"generator": self.generator, "size": self.size, "seed": self.seed,
                "drain_tail": self.drain_tail}
        if self.generator == "random_mixed":
            meta["mix"] = dict(self.mix)
        return meta


@dataclass
class Workload:
    ops: list[Op] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.ops)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for op in self.ops:
            out[op.kind.value] = out.get(op.kind.value, 0) + 1
        return out


def apply_op(target, op: Op, strategy=Strategy.TWO_PASS):
    """Perform ``op`` on a Forest or RefHeap and return its result."""
    k = op.kind
    if k is OpKind.INSERT:
        return target.insert(op.heap, op.key)
    if k is OpKind.DELETE_MIN:
        return target.delete_min(op.heap)
    if k is OpKind.DECREASE_KEY:
        return target.decrease_key(op.heap, op.item, op.key)
    if k is OpKind.FIND_MIN:
        return target.find_min(op.heap)
    if k is OpKind.MELD:
        return target.meld(op.heap, op.heap2)
    if k is OpKind.DELETE:
        return target.delete(op.heap, op.item)
    if k is OpKind.MAKE_HEAP:
        return target.make_heap(strategy)
    raise WorkloadError(f"unknown operation {k!r}")


# ---------------------------------------------------------------- builders

class _Builder:
    """Emits operations while mirroring their effect on a reference heap."""

    KEY_SPAN = 1 << 40

    def __init__(self, rng: SplitMix64):
        self.rng = rng
        self.ref = RefHeap()
        self.ops: list[Op] = []
        self.used_keys: set[int] = set()
        self.live: list[int] = []          # live items, for uniform choice
        self.pos: dict[int, int] = {}

    def _emit(self, op):
        self.ops.append(op)
        return apply_op(self.ref, op)

    def _forget(self, item):
        i = self.pos.pop(item)
        last = self.live.pop()
        if last != item:
            self.live[i] = last
            self.pos[last] = i

    def fresh_key(self, below: int | None = None) -> int:
        rng = self.rng
        while True:
            if below is None:
                k = rng.below(self.KEY_SPAN)
            else:
                k = below - 1 - rng.below(1 << 20)
            if k not in self.used_keys:
                self.used_keys.add(k)
                return k

    def make_heap(self):
        return self._emit(Op(OpKind.MAKE_HEAP))

    def insert(self, h, key=None):
        if key is None:
            key = self.fresh_key()
        it = self._emit(Op(OpKind.INSERT, heap=h, key=key))
        self.pos[it] = len(self.live)
        self.live.append(it)
        return it

    def delete_min(self, h):
        it = self._emit(Op(OpKind.DELETE_MIN, heap=h))
        if it is not None:
            self._forget(it)
        return it

    def decrease_key(self, item, key=None):
        h = self.ref.heap_of(item)
        if key is None:
            key = self.fresh_key(below=self.ref.key(item))
        self._emit(Op(OpKind.DECREASE_KEY, heap=h, item=item, key=key))

    def delete(self, item):
        h = self.ref.heap_of(item)
        self._emit(Op(OpKind.DELETE, heap=h, item=item))
        self._forget(item)

    def meld(self, h1, h2):
        return self._emit(Op(OpKind.MELD, heap=h1, heap2=h2))

    def find_min(self, h):
        return self._emit(Op(OpKind.FIND_MIN, heap=h))

    def drain(self):
        for h in sorted(self.ref.heaps()):
            for _ in range(self.ref.size(h)):
                self.delete_min(h)


def _sorting(b: _Builder, n: int):
    h = b.make_heap()
    keys = list(range(n))
    b.rng.shuffle(keys)
    for k in keys:
        b.used_keys.add(k)
        b.insert(h, k)
    for _ in range(n):
        b.delete_min(h)


def _random_mixed(b: _Builder, n: int, mix: dict[str, float]):
    rng = b.rng
    names = [k for k in DEFAULT_MIX if mix.get(k, 0) > 0]
    cumulative = []
    acc = 0.0
    for k in names:
        acc += mix[k]
        cumulative.append(acc)
    heaps = [b.make_heap()]
    while len(b.ops) < n:
        u = rng.random() * acc
        kind = names[-1]
        for name, c in zip(names, cumulative):
            if u < c:
                kind = name
                break
        if kind in ("decrease_key", "delete") and not b.live:
            kind = "insert"
        if kind == "meld" and len(heaps) < 2:
            kind = "insert"
        if kind == "make_heap":
            heaps.append(b.make_heap())
        elif kind == "insert":
            b.insert(rng.choice(heaps))
        elif kind == "delete_min":
            b.delete_min(rng.choice(heaps))
        elif kind == "find_min":
            b.find_min(rng.choice(heaps))
        elif kind == "decrease_key":
            b.decrease_key(rng.choice(b.live))
        elif kind == "delete":
            b.delete(rng.choice(b.live))
        else:
            i = rng.below(len(heaps))
            j = rng.below(len(heaps) - 1)
            if j >= i:
                j += 1
            h1, h2 = heaps[i], heaps[j]
            for x in sorted((i, j), reverse=True):
                heaps.pop(x)
            heaps.append(b.meld(h1, h2))


def _dijkstra(b: _Builder, n: int, degree: int = 4, max_weight: int = 100):
    """Point-to-point Dijkstra from vertex 0 to vertex n - 1 on a random graph.

    Every vertex gets ``degree`` random out-edges plus a heavy edge to its
    successor so the target is reachable.  The search stops as soon as the
    target is removed, leaving the rest of the frontier in the heap.
    """
    rng = b.rng
    adj = [[] for _ in range(n)]
    for u in range(n):
        for _ in range(degree):
            adj[u].append((rng.below(n), rng.randint(1, max_weight)))
        if u + 1 < n:
            adj[u].append((u + 1, max_weight * n))
    shift = max(n - 1, 1).bit_length()
    dist = {0: 0}
    item_of = {}
    vertex_of = {}
    done = set()
    h = b.make_heap()
    it = b.insert(h, 0)
    item_of[0], vertex_of[it] = it, 0
    target = n - 1
    while True:
        it = b.delete_min(h)
        if it is None:
            break
        u = vertex_of[it]
        done.add(u)
        if u == target:
            break
        du = dist[u]
        for v, w in adj[u]:
            if v in done:
                continue
            nd = du + w
            if v not in dist:
                dist[v] = nd
                it2 = b.insert(h, (nd << shift) | v)
                item_of[v], vertex_of[it2] = it2, v
            elif nd < dist[v]:
                dist[v] = nd
                b.decrease_key(item_of[v], (nd << shift) | v)


def _meld_heavy(b: _Builder, n: int):
    rng = b.rng
    heaps = []
    inserted = 0
    while inserted < n:
        h = b.make_heap()
        heaps.append(h)
        for _ in range(min(1 + rng.below(3), n - inserted)):
            b.insert(h)
            inserted += 1
    while len(heaps) > 1:
        i = rng.below(len(heaps))
        j = rng.below(len(heaps) - 1)
        if j >= i:
            j += 1
        h1, h2 = heaps[i], heaps[j]
        for x in sorted((i, j), reverse=True):
            heaps.pop(x)
        h = b.meld(h1, h2)
        heaps.append(h)
        u = rng.random()
        if u < 0.25:
            b.delete_min(h)
        elif u < 0.5:
            b.insert(h)
        elif u < 0.6 and b.ref.size(h):
            b.decrease_key(rng.choice(b.ref.items(h)))


def generate(spec: WorkloadSpec) -> Workload:
    """Build the deterministic workload named by ``spec``."""
    spec.validate()
    b = _Builder(SplitMix64(spec.seed))
    if spec.generator == "sorting":
        _sorting(b, spec.size)
    elif spec.generator == "random_mixed":
        _random_mixed(b, spec.size, spec.mix)
    elif spec.generator == "dijkstra":
        _dijkstra(b, spec.size)
    else:
        _meld_heavy(b, spec.size)
    if spec.drain_tail:
        b.drain()
    return Workload(b.ops, spec.meta())


def drain_tail(workload: Workload) -> Workload:
    """Append delete-mins until every live heap of ``workload`` is empty."""
    ref = RefHeap()
    for op in workload.ops:
        apply_op(ref, op)
    ops = list(workload.ops)
    for h in sorted(ref.heaps()):
        ops.extend(Op(OpKind.DELETE_MIN, heap=h) for _ in range(ref.size(h)))
    return Workload(ops, {**workload.meta, "drain_tail": True})


# ------------------------------------------------------------------ file io

def dump_workload(workload: Workload, fp: IO[str]) -> None:
    fp.write(json.dumps({"workload": FORMAT_NAME, "version": FORMAT_VERSION,
                         **workload.meta}, separators=(",", ":")) + "\n")
    for op in workload.ops:
        fp.write(json.dumps(op.to_obj(), separators=(",", ":")) + "\n")


def load_workload(lines: Iterable[str]) -> Workload:
    wl = None
    lineno = 0
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise WorkloadError(f"line {lineno}: invalid JSON: {exc.msg}") from None
        if wl is None:
            if not isinstance(obj, dict) or obj.get("workload") != FORMAT_NAME:
                raise WorkloadError(f"line {lineno}: missing workload header")
            wl = Workload(meta={k: v for k, v in obj.items()
                                if k not in ("workload", "version")})
            continue
        try:
            wl.ops.append(Op.from_obj(obj))
        except (KeyError, ValueError, TypeError) as exc:
            raise WorkloadError(f"line {lineno}: bad operation: {exc}") from None
    if wl is None:
        raise WorkloadError("empty workload stream")
    return wl
