"""Reference priority queue and differential runs against the pairing heap.

:class:`RefHeap` keeps each heap as a sorted list of ``(key, item)`` pairs.
It exposes the same operations, with the same id assignment, as
:class:`~pairaudit.heap.Forest`, so one workload drives both.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from dataclasses import dataclass

from .heap import DeadHeapError, Forest, HeapError, InvalidKeyError, ItemNotInHeapError, Strategy


class RefHeap:
    """Sorted-list heaps.  Ties on key go to the smallest item id."""

    def __init__(self):
        self._heaps: dict[int, list[tuple[int, int]]] = {}
        self._key: dict[int, int] = {}
        self._heap_of: dict[int, int] = {}
        self._next_heap = 0
        self._next_item = 0

    def _get(self, h):
        try:
            return self._heaps[h]
        except KeyError:
            raise DeadHeapError(f"heap {h} is not live") from None

    def _check_item(self, h, item):
        if self._heap_of.get(item) != h:
            raise ItemNotInHeapError(f"item {item} is not in heap {h}")

    def is_live(self, h):
        return h in self._heaps

    def heaps(self):
        return list(self._heaps)

    def size(self, h):
        return len(self._get(h))

    def key(self, item):
        return self._key[item]

    def heap_of(self, item):
        return self._heap_of.get(item)

    def items(self, h):
        return [it for _, it in self._get(h)]

    def make_heap(self, strategy=None):
        h = self._next_heap
        self._next_heap += 1
        self._heaps[h] = []
        return h

    def find_min(self, h):
        lst = self._get(h)
        if not lst:
            return None
        k, it = lst[0]
        return it, k

    def min_is_unique(self, h) -> bool:
        lst = self._get(h)
        return len(lst) < 2 or lst[0][0] != lst[1][0]

    def insert(self, h, key):
        lst = self._get(h)
        it = self._next_item
        self._next_item += 1
        self._key[it] = key
        self._heap_of[it] = h
        insort(lst, (key, it))
        return it

    def meld(self, h1, h2):
        if h1 == h2:
            raise HeapError(f"cannot meld heap {h1} with itself")
        a = self._get(h1)
        b = self._get(h2)
        h = self._next_heap
        self._next_heap += 1
        del self._heaps[h1], self._heaps[h2]
        merged = sorted(a + b)
        for _, it in merged:
            self._heap_of[it] = h
        self._heaps[h] = merged
        return h

    def _remove(self, lst, item):
        i = bisect_left(lst, (self._key[item], item))
        del lst[i]

    def decrease_key(self, h, item, key):
        lst = self._get(h)
        self._check_item(h, item)
        if key > self._key[item]:
            raise InvalidKeyError(f"new key {key} exceeds current key {self._key[item]}")
        self._remove(lst, item)
        self._key[item] = key
        insort(lst, (key, item))

    def delete_min(self, h):
        lst = self._get(h)
        if not lst:
            return None
        _, it = lst.pop(0)
        del self._heap_of[it]
        return it

    def delete(self, h, item):
        lst = self._get(h)
        self._check_item(h, item)
        self._remove(lst, item)
        del self._heap_of[item]


@dataclass
class DivergenceReport:
    ok: bool
    ops: int
    op_index: int | None = None
    expected: object = None
    actual: object = None
    message: str = ""

    def __str__(self):
        if self.ok:
            return f"clean: {self.ops} operations agree"
        return (f"divergence at op {self.op_index}: {self.message} "
                f"(expected {self.expected!r}, got {self.actual!r})")


def _peek(forest: Forest, h):
    # find_min without emitting a trace event
    if not forest.is_live(h):
        return None
    r = forest.root(h)
    return None if r is None else (r, forest.key(r))


def run_both(workload, strategy: Strategy | str = Strategy.TWO_PASS,
             forest: Forest | None = None, validate_every: int = 0) -> DivergenceReport:
    """Drive a :class:`Forest` and a :class:`RefHeap` with the same workload.

    After every operation the minimum of the affected heap is compared by
    key, and by item whenever the reference minimum key is unique; every
    delete-min must remove an item of the same key (same item if unique).
    On a tie the reference removes whichever tied item the heap removed.
    An operation that both sides reject raises
    :class:`~pairaudit.workload.WorkloadError`.
    ``validate_every`` > 0 also runs the heap's structural validation every
    that many operations.
    """
    from .workload import WorkloadError, apply_op

    def rejected(i, op, exc):
        # an operation both sides refuse is a bad workload, not a divergence
        try:
            apply_op(ref, op, strategy)
        except HeapError:
            return WorkloadError(str(exc), op_index=i)
        return None

    strategy = Strategy(strategy)
    heap = forest if forest is not None else Forest()
    ref = RefHeap()
    n = 0
    for i, op in enumerate(workload.ops):
        n = i + 1
        kind = op.kind
        if kind == "delete_min":
            unique = ref.is_live(op.heap) and ref.min_is_unique(op.heap)
            exp = ref.find_min(op.heap) if ref.is_live(op.heap) else None
            try:
                got_item = apply_op(heap, op, strategy)
            except HeapError as exc:
                if (err := rejected(i, op, exc)) is not None:
                    raise err from exc
                return DivergenceReport(False, n, i, None, repr(exc), "heap raised")
            got = None if got_item is None else heap.key(got_item)
            want = None if exp is None else exp[1]
            if got != want:
                return DivergenceReport(False, n, i, want, got, "delete_min removed wrong key")
            if unique or got_item is None or ref.heap_of(got_item) != op.heap:
                ref_item = apply_op(ref, op, strategy)
            else:
                # any item of the minimum key is a correct answer; follow the
                # heap's choice so later item comparisons stay meaningful
                ref.delete(op.heap, got_item)
                ref_item = got_item
            if got_item != ref_item:
                return DivergenceReport(False, n, i, ref_item, got_item,
                                        "delete_min removed wrong item")
            h = op.heap
        else:
            try:
                res = apply_op(heap, op, strategy)
            except HeapError as exc:
                if (err := rejected(i, op, exc)) is not None:
                    raise err from exc
                return DivergenceReport(False, n, i, None, repr(exc), "heap raised")
            ref_res = apply_op(ref, op, strategy)
            if kind in ("make_heap", "meld", "insert") and res != ref_res:
                return DivergenceReport(False, n, i, ref_res, res, f"{kind} returned a different id")
            h = res if kind in ("make_heap", "meld") else op.heap
        if validate_every and n % validate_every == 0:
            heap.validate(h)
        want = ref.find_min(h)
        got = _peek(heap, h)
        if (want is None) != (got is None) or (want is not None and want[1] != got[1]):
            return DivergenceReport(False, n, i, want and want[1], got and got[1],
                                    "find_min key differs")
        if want is not None and ref.min_is_unique(h) and want[0] != got[0]:
            return DivergenceReport(False, n, i, want[0], got[0], "find_min item differs")
    return DivergenceReport(True, n)
