import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pairaudit import (MINUS_INFINITY, DeadHeapError, Forest, HeapError, InvalidKeyError,
                       ItemNotInHeapError, LinkContext, Orientation, Strategy, StructureError,
                       TraceRecorder)
from pairaudit.tracing import CutCause


def traced():
    return Forest(TraceRecorder())


def last_event(f):
    return f.recorder.trace.events[-1]


def heap_with_children(f, keys, root_key=0):
    """Root ``root_key`` whose children, left to right, have ``keys``."""
    h = f.make_heap()
    r = f.insert(h, root_key)
    for k in reversed(keys):
        f.insert(h, k)
    assert [f.key(c) for c in f.children(r)] == list(keys)
    return h, r


# ---------------------------------------------------------------- keys

def test_minus_infinity_below_everything():
    for k in (-(2 ** 63), -1, 0, 2 ** 63 - 1):
        assert MINUS_INFINITY < k
        assert k > MINUS_INFINITY
        assert not MINUS_INFINITY > k
    assert not MINUS_INFINITY < MINUS_INFINITY


@pytest.mark.parametrize("bad", [MINUS_INFINITY, 1.5, "3", True, 2 ** 63, -(2 ** 63) - 1])
def test_public_operations_reject_non_int64_keys(bad):
    f = Forest()
    h = f.make_heap()
    with pytest.raises(InvalidKeyError):
        f.insert(h, bad)
    x = f.insert(h, 10)
    f.insert(h, 20)
    with pytest.raises(InvalidKeyError):
        f.decrease_key(h, x, bad)


# ----------------------------------------------------------- make/find

def test_make_heap_is_empty_and_fresh():
    f = Forest()
    h0, h1 = f.make_heap(), f.make_heap()
    assert h0 != h1
    assert f.find_min(h0) is None


def test_find_min_single_and_set():
    f = Forest()
    h = f.make_heap()
    x = f.insert(h, 5)
    assert f.find_min(h) == (x, 5)
    f.insert(h, 7)
    f.insert(h, 3)
    f.insert(h, 9)
    assert f.find_min(h)[1] == 3


def test_find_min_after_delete_min():
    f = Forest()
    h = f.make_heap()
    for k in (7, 3, 9):
        f.insert(h, k)
    f.delete_min(h)
    # roots [9, 7] after the cut, one pairing link, 7 wins
    assert f.find_min(h)[1] == 7


def test_find_min_emits_no_links():
    f = traced()
    h = f.make_heap()
    f.insert(h, 1)
    f.insert(h, 2)
    f.find_min(h)
    ev = last_event(f)
    assert ev.links == [] and ev.cuts == []


# -------------------------------------------------------------- insert

def test_insert_into_empty_links_nothing():
    f = traced()
    h = f.make_heap()
    f.insert(h, 5)
    assert last_event(f).links == []


def test_insert_loses_to_smaller_root():
    f = traced()
    h = f.make_heap()
    r = f.insert(h, 3)
    x = f.insert(h, 5)
    (ln,) = last_event(f).links
    assert (ln.winner, ln.loser, ln.context) == (r, x, LinkContext.INSERTION)
    assert ln.orientation is Orientation.NOT_APPLICABLE
    assert f.node(r).child == x


def test_insert_tie_keeps_incumbent_root():
    f = traced()
    h = f.make_heap()
    r = f.insert(h, 3)
    x = f.insert(h, 3)
    (ln,) = last_event(f).links
    assert ln.winner == r and ln.loser == x
    assert f.root(h) == r


# ---------------------------------------------------------------- meld

def test_meld_empty_empty():
    f = traced()
    h = f.meld(f.make_heap(), f.make_heap())
    assert f.find_min(h) is None
    assert f.recorder.trace.events[2].links == []


def test_meld_two_roots():
    f = traced()
    a, b = f.make_heap(), f.make_heap()
    x = f.insert(a, 2)
    y = f.insert(b, 8)
    h = f.meld(a, b)
    (ln,) = last_event(f).links
    assert (ln.winner, ln.loser, ln.context) == (x, y, LinkContext.MELD)
    assert f.find_min(h) == (x, 2)
    assert f.node(x).child == y


def test_meld_with_empty_returns_other_contents():
    f = traced()
    a, b = f.make_heap(), f.make_heap()
    y = f.insert(b, 4)
    h = f.meld(a, b)
    assert last_event(f).links == []
    assert f.find_min(h) == (y, 4)


def test_meld_kills_inputs():
    f = Forest()
    a, b = f.make_heap(), f.make_heap()
    x = f.insert(a, 1)
    h = f.meld(a, b)
    assert h not in (a, b)
    for dead in (a, b):
        with pytest.raises(DeadHeapError):
            f.insert(dead, 1)
        with pytest.raises(DeadHeapError):
            f.find_min(dead)
        with pytest.raises(DeadHeapError):
            f.decrease_key(dead, x, 0)
    f.decrease_key(h, x, 0)


def test_meld_with_itself_rejected():
    f = Forest()
    a = f.make_heap()
    with pytest.raises(HeapError):
        f.meld(a, a)


# -------------------------------------------------------- decrease_key

def test_decrease_root_key_is_structural_noop():
    f = traced()
    h = f.make_heap()
    r = f.insert(h, 5)
    f.insert(h, 9)
    f.decrease_key(h, r, 1)
    ev = last_event(f)
    assert ev.links == [] and ev.cuts == []
    assert f.find_min(h) == (r, 1)


def test_decrease_key_cuts_and_relinks():
    # tree 1 -> (5 -> (9)); decrease 9 to 0
    f = traced()
    h = f.make_heap()
    five = f.insert(h, 5)
    nine = f.insert(h, 9)
    one = f.insert(h, 1)
    assert f.children(one) == [five] and f.children(five) == [nine]
    f.decrease_key(h, nine, 0)
    ev = last_event(f)
    (cut,) = ev.cuts
    (ln,) = ev.links
    assert cut.cause is CutCause.DECREASE_KEY
    assert f.recorder.trace.events[2].links[0].link_id == cut.cut_link_id  # the 5-9 link
    assert (ln.winner, ln.loser, ln.context) == (nine, one, LinkContext.DECREASE_KEY)
    assert f.root(h) == nine and f.children(nine) == [one]
    assert f.children(five) == []
    f.validate(h)


def test_decrease_to_same_key_still_relinks():
    f = traced()
    h = f.make_heap()
    r = f.insert(h, 1)
    x = f.insert(h, 5)
    f.decrease_key(h, x, 5)
    ev = last_event(f)
    assert len(ev.cuts) == 1 and len(ev.links) == 1
    assert ev.links[0].winner == r


def test_decrease_key_errors():
    f = Forest()
    h, g = f.make_heap(), f.make_heap()
    x = f.insert(h, 5)
    with pytest.raises(InvalidKeyError):
        f.decrease_key(h, x, 6)
    with pytest.raises(ItemNotInHeapError):
        f.decrease_key(g, x, 1)
    with pytest.raises(ItemNotInHeapError):
        f.decrease_key(h, 99, 1)


# ---------------------------------------------------------- delete_min

def test_delete_min_single_node():
    f = traced()
    h = f.make_heap()
    x = f.insert(h, 4)
    assert f.delete_min(h) == x
    assert f.find_min(h) is None
    assert f.recorder.trace.events[-2].links == []


def test_delete_min_empty_returns_none():
    f = Forest()
    h = f.make_heap()
    assert f.delete_min(h) is None


def test_delete_min_two_pass_hand_example():
    f = traced()
    h, r = heap_with_children(f, [5, 3, 8, 1, 6])
    assert f.delete_min(h) == r
    ev = last_event(f)
    assert len(ev.cuts) == 5 and all(c.cause is CutCause.DELETION for c in ev.cuts)
    key = f.key
    got = [(key(ln.winner), key(ln.loser), ln.context.value, ln.orientation.value)
           for ln in ev.links]
    assert got == [
        (3, 5, "pairing", "left"),
        (1, 8, "pairing", "left"),
        (1, 6, "assembly", "right"),
        (1, 3, "assembly", "left"),
    ]
    assert f.find_min(h)[1] == 1
    f.validate(h)


def test_delete_min_multipass_hand_example():
    f = traced()
    h = f.make_heap(Strategy.MULTIPASS)
    r = f.insert(h, 0)
    for k in reversed([5, 3, 8, 1, 6]):
        f.insert(h, k)
    f.delete_min(h)
    ev = last_event(f)
    key = f.key
    got = [(key(ln.winner), key(ln.loser), ln.context.value) for ln in ev.links]
    # pass 1: (5,3)->3 (8,1)->1, 6 carried; pass 2: (3,1)->1, 6 carried; pass 3: (1,6)->1
    assert got == [(3, 5, "pairing"), (1, 8, "pairing"), (1, 3, "pairing"), (1, 6, "pairing")]
    f.validate(h)
    assert r not in [ln.winner for ln in ev.links]


def _pairing_assembly_oracle(c):
    """Count links by direct simulation on an abstract list of c roots."""
    roots = list(range(c))
    pairing = 0
    paired = []
    i = 0
    while i + 1 < len(roots):
        paired.append(roots[i])
        pairing += 1
        i += 2
    if i < len(roots):
        paired.append(roots[i])
    assembly = 0
    while len(paired) > 1:
        paired.pop()
        assembly += 1
    return pairing, assembly


@pytest.mark.parametrize("c", range(0, 11))
def test_two_pass_link_counts(c):
    p_expected, a_expected = _pairing_assembly_oracle(c)
    assert p_expected == c // 2
    assert a_expected == max(math.ceil(c / 2) - 1, 0)
    f = traced()
    h, r = heap_with_children(f, list(range(100, 100 + c)))
    f.delete_min(h)
    ev = last_event(f)
    ctxs = [ln.context for ln in ev.links]
    assert len(ev.cuts) == c
    assert ctxs.count(LinkContext.PAIRING) == p_expected
    assert ctxs.count(LinkContext.ASSEMBLY) == a_expected
    assert len(ev.links) == max(c - 1, 0)


@pytest.mark.parametrize("c", range(0, 11))
def test_multipass_link_counts(c):
    f = traced()
    h = f.make_heap(Strategy.MULTIPASS)
    f.insert(h, 0)
    for k in range(c):
        f.insert(h, 100 + k)
    f.delete_min(h)
    ev = last_event(f)
    assert len(ev.links) == max(c - 1, 0)
    assert all(ln.context is LinkContext.PAIRING for ln in ev.links)


# --------------------------------------------------------------- delete

def test_delete_root_behaves_as_delete_min():
    f = traced()
    h = f.make_heap()
    r = f.insert(h, 1)
    f.insert(h, 5)
    f.insert(h, 3)
    f.delete(h, r)
    ev = last_event(f)
    assert all(c.cause is CutCause.DELETION for c in ev.cuts)
    assert not any(ln.context is LinkContext.DECREASE_KEY for ln in ev.links)
    assert f.find_min(h)[1] == 3


def test_delete_leaf_in_chain():
    f = traced()
    h = f.make_heap()
    c = f.insert(h, 9)
    b = f.insert(h, 5)
    a = f.insert(h, 1)   # chain 1 -> 5 -> 9
    f.delete(h, c)
    ev = last_event(f)
    dk_cuts = [x for x in ev.cuts if x.cause is CutCause.DECREASE_KEY]
    dk_links = [x for x in ev.links if x.context is LinkContext.DECREASE_KEY]
    del_cuts = [x for x in ev.cuts if x.cause is CutCause.DELETION]
    assert len(dk_cuts) == 1 and len(dk_links) == 1
    assert dk_links[0].winner == c
    assert len(del_cuts) == 1           # c's only child is the old root
    assert [ln.context for ln in ev.links] == [LinkContext.DECREASE_KEY]
    assert f.find_min(h) == (a, 1)
    assert f.children(a) == [b]
    f.validate(h)


def test_delete_sole_node():
    f = Forest()
    h = f.make_heap()
    x = f.insert(h, 3)
    f.delete(h, x)
    assert f.find_min(h) is None
    with pytest.raises(ItemNotInHeapError):
        f.delete(h, x)


# ------------------------------------------------------------- link/cut

def test_link_winner_rules():
    f = Forest()
    h1, h2 = f.make_heap(), f.make_heap()
    a = f.insert(h1, 2)
    b = f.insert(h2, 7)
    assert f._link(a, b, LinkContext.MELD) == a
    f2 = Forest()
    h1, h2 = f2.make_heap(), f2.make_heap()
    a = f2.insert(h1, 7)
    b = f2.insert(h2, 2)
    assert f2._link(a, b, LinkContext.MELD) == b
    f3 = Forest()
    h1, h2 = f3.make_heap(), f3.make_heap()
    a = f3.insert(h1, 4)
    b = f3.insert(h2, 4)
    assert f3._link(a, b, LinkContext.MELD) == a


def test_cut_positions():
    f = Forest()
    h, r = heap_with_children(f, [10, 20, 30])
    left, mid, right = f.children(r)
    f._cut(left, CutCause.DECREASE_KEY)
    assert f.node(r).child == mid and f.node(mid).left_parent == r
    f._cut(right, CutCause.DECREASE_KEY)
    assert f.children(r) == [mid] and f.node(mid).right is None

    f = Forest()
    h, r = heap_with_children(f, [10, 20, 30])
    left, mid, right = f.children(r)
    f._cut(mid, CutCause.DECREASE_KEY)
    assert f.children(r) == [left, right]
    assert f.node(right).left_parent == left and f.node(left).right == right
    f._cut(left, CutCause.DECREASE_KEY)
    f._cut(right, CutCause.DECREASE_KEY)
    assert f.node(r).child is None


# ------------------------------------------------------------- validate

def test_validate_empty_and_built():
    f = Forest()
    h = f.make_heap()
    f.validate(h)
    for k in (5, 2, 8, 1):
        f.insert(h, k)
    f.delete_min(h)
    f.validate(h)


def test_validate_reports_corrupt_left_parent():
    f = Forest()
    h, r = heap_with_children(f, [10, 20, 30])
    mid = f.children(r)[1]
    f._lp[mid] = r
    with pytest.raises(StructureError) as exc:
        f.validate(h)
    assert exc.value.path[-1] == mid


def test_validate_reports_heap_order():
    f = Forest()
    h, r = heap_with_children(f, [10, 20])
    f._key[f.children(r)[0]] = -5
    with pytest.raises(StructureError, match="heap order"):
        f.validate(h)


# ------------------------------------------------------------ properties

ops = st.lists(
    st.one_of(
        st.tuples(st.just("insert"), st.integers(-50, 50)),
        st.tuples(st.just("delete_min"), st.just(0)),
        st.tuples(st.just("decrease"), st.integers(0, 10 ** 6)),
        st.tuples(st.just("delete"), st.integers(0, 10 ** 6)),
    ),
    max_size=120,
)


@settings(max_examples=150, deadline=None)
@given(ops, st.sampled_from(list(Strategy)))
def test_random_ops_keep_invariants(seq, strategy):
    f = traced()
    h = f.make_heap(strategy)
    live: dict[int, int] = {}
    for name, arg in seq:
        if name == "insert":
            live[f.insert(h, arg)] = arg
        elif name == "delete_min":
            x = f.delete_min(h)
            if x is not None:
                assert live.pop(x) == min([f.key(x), *live.values()])
        elif live:
            x = sorted(live)[arg % len(live)]
            if name == "decrease":
                live[x] -= arg % 7
                f.decrease_key(h, x, live[x])
            else:
                f.delete(h, x)
                del live[x]
        ev = f.recorder.trace.events[-1]
        if ev.kind.value not in ("delete_min", "delete"):
            assert len(ev.links) <= 1
        f.validate(h)
        # children of every node in strictly decreasing link order
        for x in live:
            ids = [f._parent_link[c] for c in f.children(x)]
            assert ids == sorted(ids, reverse=True)
    drained = []
    while (x := f.delete_min(h)) is not None:
        drained.append(f.key(x))
    assert drained == sorted(live.values())
