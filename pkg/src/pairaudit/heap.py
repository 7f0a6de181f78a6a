"""Pairing heaps over a shared node arena, with every link and cut traced.

Nodes live in parallel lists indexed by item id.  Each node carries the three
structural references of the endogenous representation:

``child``
    leftmost child, or ``None`` if the node has no children
``right``
    right sibling, or ``None`` for a rightmost child or a root
``left_parent``
    left sibling, or the parent when the node is a leftmost child, or
    ``None`` for a root

Children are ordered by link time, latest leftmost.  All structural changes
go through :meth:`Forest._link` and :meth:`Forest._cut`.

>>> f = Forest()
>>> h = f.make_heap()
>>> a = f.insert(h, 7); b = f.insert(h, 3); c = f.insert(h, 9)
>>> f.find_min(h)
(1, 3)
>>> f.delete_min(h)
1
>>> f.find_min(h)
(0, 7)
"""

from __future__ import annotations

from enum import Enum
from typing import NamedTuple

from .tracing import CutCause, LinkContext, OpKind, Orientation, TraceRecorder

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1


class _MinusInfinity:
    """Key below every integer.  Only the internal delete path assigns it."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return other is not self

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return other is self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("-inf")

    def __repr__(self):
        return "MINUS_INFINITY"


MINUS_INFINITY = _MinusInfinity()


class Strategy(str, Enum):
    TWO_PASS = "twopass"
    MULTIPASS = "multipass"


class HeapError(Exception):
    """Base class for misuse of the heap API."""


class DeadHeapError(HeapError):
    """The heap id is unknown or was consumed by a meld."""


class ItemNotInHeapError(HeapError):
    pass


class InvalidKeyError(HeapError, ValueError):
    pass


class StructureError(HeapError):
    """A node invariant is broken; ``path`` lists item ids from the root."""

    def __init__(self, message, path=()):
        super().__init__(f"{message} (path {list(path)})")
        self.path = list(path)


class Node(NamedTuple):
    """Read-only snapshot of one node's fields."""
    item: int
    key: object
    child: int | None
    right: int | None
    left_parent: int | None


def _check_user_key(key) -> int:
    if isinstance(key, bool) or not isinstance(key, int):
        raise InvalidKeyError(f"key must be an int, got {key!r}")
    if not INT64_MIN <= key <= INT64_MAX:
        raise InvalidKeyError(f"key {key} outside the 64-bit signed range")
    return key


class Forest:
    """A collection of pairing heaps sharing one item id space.

    Parameters
    ----------
    recorder : TraceRecorder, optional
        Receives one event per public operation.  ``None`` disables tracing.
    """

    def __init__(self, recorder: TraceRecorder | None = None):
        self.recorder = recorder
        self._key: list = []
        self._child: list = []
        self._right: list = []
        self._lp: list = []
        self._heap_of: list = []       # heap id at insert time, None once deleted
        self._merged_into: dict[int, int] = {}
        self._parent_link: list = []   # id of the link the node lost
        self._roots: dict[int, int | None] = {}
        self._strategy: dict[int, Strategy] = {}
        self._sizes: dict[int, int] = {}
        self._next_heap = 0
        self._next_link = 0

    # ------------------------------------------------------------- queries

    def is_live(self, h: int) -> bool:
        return h in self._roots

    def heaps(self) -> list[int]:
        return list(self._roots)

    def __len__(self):
        return sum(self._sizes.values())

    def size(self, h: int) -> int:
        self._require(h)
        return self._sizes[h]

    def heap_of(self, item: int) -> int | None:
        if 0 <= item < len(self._heap_of) and self._heap_of[item] is not None:
            return self._resolve(self._heap_of[item])
        return None

    def key(self, item: int):
        return self._key[item]

    def node(self, item: int) -> Node:
        return Node(item, self._key[item], self._child[item], self._right[item], self._lp[item])

    def root(self, h: int) -> int | None:
        self._require(h)
        return self._roots[h]

    def strategy(self, h: int) -> Strategy:
        self._require(h)
        return self._strategy[h]

    def children(self, item: int) -> list[int]:
        out = []
        c = self._child[item]
        while c is not None:
            out.append(c)
            c = self._right[c]
        return out

    # ---------------------------------------------------------- operations

    def make_heap(self, strategy: Strategy | str = Strategy.TWO_PASS) -> int:
        strategy = Strategy(strategy)
        h = self._next_heap
        self._next_heap += 1
        self._roots[h] = None
        self._strategy[h] = strategy
        self._sizes[h] = 0
        rec = self.recorder
        if rec is not None:
            rec.begin(OpKind.MAKE_HEAP, heap=h)
            rec.end()
        return h

    def find_min(self, h: int) -> tuple[int, int] | None:
        self._require(h)
        r = self._roots[h]
        rec = self.recorder
        if rec is not None:
            rec.begin(OpKind.FIND_MIN, heap=h,
                      item=r, key=None if r is None else self._key[r])
            rec.end()
        if r is None:
            return None
        return r, self._key[r]

    def insert(self, h: int, key: int) -> int:
        self._require(h)
        _check_user_key(key)
        x = len(self._key)
        self._key.append(key)
        self._child.append(None)
        self._right.append(None)
        self._lp.append(None)
        self._heap_of.append(h)
        self._parent_link.append(None)
        self._sizes[h] += 1
        rec = self.recorder
        if rec is not None:
            rec.begin(OpKind.INSERT, heap=h, item=x, key=key)
        r = self._roots[h]
        if r is None:
            self._roots[h] = x
        else:
            self._roots[h] = self._link(r, x, LinkContext.INSERTION)
        if rec is not None:
            rec.end()
        return x

    def meld(self, h1: int, h2: int) -> int:
        """Return a fresh heap holding both inputs' items; ``h1`` and ``h2`` die."""
        self._require(h1)
        self._require(h2)
        if h1 == h2:
            raise HeapError(f"cannot meld heap {h1} with itself")
        h = self._next_heap
        self._next_heap += 1
        rec = self.recorder
        if rec is not None:
            ev = rec.begin(OpKind.MELD, heap=h1, heap2=h2)
            ev.result = h
        r1 = self._roots.pop(h1)
        r2 = self._roots.pop(h2)
        strategy = self._strategy.pop(h1)
        del self._strategy[h2]
        size = self._sizes.pop(h1) + self._sizes.pop(h2)
        if r1 is None:
            r = r2
        elif r2 is None:
            r = r1
        else:
            r = self._link(r1, r2, LinkContext.MELD)
        self._roots[h] = r
        self._strategy[h] = strategy
        self._sizes[h] = size
        self._merged_into[h1] = h
        self._merged_into[h2] = h
        if rec is not None:
            rec.end()
        return h

    def decrease_key(self, h: int, item: int, key: int) -> None:
        self._require(h)
        self._require_item(h, item)
        _check_user_key(key)
        if key > self._key[item]:
            raise InvalidKeyError(f"new key {key} exceeds current key {self._key[item]}")
        rec = self.recorder
        if rec is not None:
            rec.begin(OpKind.DECREASE_KEY, heap=h, item=item, key=key)
        self._decrease(h, item, key)
        if rec is not None:
            rec.end()

    def delete_min(self, h: int) -> int | None:
        self._require(h)
        rec = self.recorder
        r = self._roots[h]
        if rec is not None:
            rec.begin(OpKind.DELETE_MIN, heap=h, item=r,
                      key=None if r is None else self._key[r])
        if r is not None:
            self._remove_root(h)
        if rec is not None:
            rec.end()
        return r

    def delete(self, h: int, item: int) -> None:
        """Remove ``item``: decrease its key to minus infinity, then delete-min."""
        self._require(h)
        self._require_item(h, item)
        rec = self.recorder
        if rec is not None:
            rec.begin(OpKind.DELETE, heap=h, item=item, key=self._key[item])
        self._decrease(h, item, MINUS_INFINITY)
        self._remove_root(h)
        if rec is not None:
            rec.end()

    # ----------------------------------------------------------- internals

    def _require(self, h):
        if h not in self._roots:
            raise DeadHeapError(f"heap {h} is not live")

    def _require_item(self, h, item):
        if self.heap_of(item) != h:
            raise ItemNotInHeapError(f"item {item} is not in heap {h}")

    def _resolve(self, h):
        # follow meld forwarding with path compression
        fwd = self._merged_into
        top = h
        while top in fwd:
            top = fwd[top]
        while h in fwd and fwd[h] != top:
            fwd[h], h = top, fwd[h]
        return top

    def _decrease(self, h, item, key):
        self._key[item] = key
        r = self._roots[h]
        if item != r:
            self._cut(item, CutCause.DECREASE_KEY)
            self._roots[h] = self._link(r, item, LinkContext.DECREASE_KEY)

    def _link(self, x: int, y: int, context: LinkContext,
              orientation: Orientation = Orientation.NOT_APPLICABLE) -> int:
        """Link roots ``x`` and ``y``; ``x`` wins ties.  Returns the winner.

        ``orientation`` describes ``y`` relative to ``x`` on the root list
        (``LOSER_RIGHT`` means ``y`` is right of ``x``) and is flipped when
        ``y`` wins.
        """
        key = self._key
        if key[y] < key[x]:
            w, lo = y, x
            if orientation is Orientation.LOSER_RIGHT:
                orientation = Orientation.LOSER_LEFT
        else:
            w, lo = x, y
        child = self._child
        old = child[w]
        self._right[lo] = old
        if old is not None:
            self._lp[old] = lo
        self._lp[lo] = w
        child[w] = lo
        lid = self._next_link
        self._next_link = lid + 1
        self._parent_link[lo] = lid
        if self.recorder is not None:
            self.recorder.link(lid, w, lo, context, orientation)
        return w

    def _cut(self, y: int, cause: CutCause) -> None:
        lp = self._lp
        right = self._right
        p = lp[y]
        r = right[y]
        if self._child[p] == y:
            self._child[p] = r
        else:
            right[p] = r
        if r is not None:
            lp[r] = p
        lp[y] = None
        right[y] = None
        if self.recorder is not None:
            self.recorder.cut(self._parent_link[y], cause)
        self._parent_link[y] = None

    def _remove_root(self, h):
        x = self._roots[h]
        child = self._child
        right = self._right
        lp = self._lp
        rec = self.recorder
        plink = self._parent_link
        roots = []
        c = child[x]
        while c is not None:
            nxt = right[c]
            lp[c] = None
            right[c] = None
            if rec is not None:
                rec.cut(plink[c], CutCause.DELETION)
            plink[c] = None
            roots.append(c)
            c = nxt
        child[x] = None
        self._heap_of[x] = None
        self._sizes[h] -= 1
        if not roots:
            self._roots[h] = None
        elif self._strategy[h] is Strategy.TWO_PASS:
            self._roots[h] = self._two_pass(roots)
        else:
            self._roots[h] = self._multipass(roots)

    def _two_pass(self, roots):
        link = self._link
        pairing = LinkContext.PAIRING
        loser_right = Orientation.LOSER_RIGHT
        n = len(roots)
        paired = [link(roots[i], roots[i + 1], pairing, loser_right)
                  for i in range(0, n - 1, 2)]
        if n % 2:
            paired.append(roots[-1])
        cur = paired[-1]
        assembly = LinkContext.ASSEMBLY
        for j in range(len(paired) - 2, -1, -1):
            cur = link(paired[j], cur, assembly, loser_right)
        return cur

    def _multipass(self, roots):
        link = self._link
        pairing = LinkContext.PAIRING
        loser_right = Orientation.LOSER_RIGHT
        while len(roots) > 1:
            n = len(roots)
            nxt = [link(roots[i], roots[i + 1], pairing, loser_right)
                   for i in range(0, n - 1, 2)]
            if n % 2:
                nxt.append(roots[-1])
            roots = nxt
        return roots[0]

    # ---------------------------------------------------------- validation

    def validate(self, h: int) -> None:
        """Walk heap ``h`` and raise :class:`StructureError` on the first
        broken invariant (heap order, reference consistency, membership)."""
        self._require(h)
        r = self._roots[h]
        if r is None:
            if self._sizes[h]:
                raise StructureError(f"empty heap {h} reports size {self._sizes[h]}")
            return
        key, child, right, lp = self._key, self._child, self._right, self._lp
        if lp[r] is not None or right[r] is not None:
            raise StructureError("root has a left/parent or right reference", [r])
        count = 0
        seen = set()
        stack = [(r, (r,))]
        while stack:
            x, path = stack.pop()
            if x in seen:
                raise StructureError("node reached twice", path)
            seen.add(x)
            count += 1
            if self.heap_of(x) != h:
                raise StructureError(f"node belongs to heap {self.heap_of(x)}, not {h}", path)
            prev = x
            c = child[x]
            while c is not None:
                cpath = path + (c,)
                if lp[c] != prev:
                    raise StructureError("left/parent reference does not point back", cpath)
                if key[c] < key[x]:
                    raise StructureError("heap order violated", cpath)
                stack.append((c, cpath))
                prev = c
                c = right[c]
                if c in seen or len(seen) + len(stack) > len(key):
                    raise StructureError("sibling list has a cycle", cpath)
        if count != self._sizes[h]:
            raise StructureError(f"heap {h} holds {count} nodes, expected {self._sizes[h]}", [r])
