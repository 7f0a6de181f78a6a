from collections import defaultdict

import pytest

from pairaudit import Forest, OpKind, Trace, TraceRecorder
from pairaudit.classify import (LinkFate, NodeFate, annotate_links, annotated_lines, classify,
                                mass_records, node_fates, op_contexts, size_timeline)
from pairaudit.workbench import run
from pairaudit.workload import GENERATORS, WorkloadSpec, apply_op, generate


def record(build):
    rec = TraceRecorder({"strategy": "twopass"})
    out = build(Forest(rec))
    return rec.trace, out


def drain(f, *heaps):
    for h in heaps:
        while f.delete_min(h) is not None:
            pass


# ------------------------------------------------------------------- fates

def test_both_deleted_are_temporary():
    def build(f):
        h = f.make_heap()
        a, b = f.insert(h, 1), f.insert(h, 2)
        f.delete_min(h)
        f.delete_min(h)
        return a, b
    t, (a, b) = record(build)
    assert node_fates(t) == {a: NodeFate.TEMPORARY, b: NodeFate.TEMPORARY}


def test_survivor_is_permanent():
    def build(f):
        h = f.make_heap()
        a, b = f.insert(h, 1), f.insert(h, 2)
        f.delete_min(h)
        return a, b
    t, (a, b) = record(build)
    assert node_fates(t) == {a: NodeFate.TEMPORARY, b: NodeFate.PERMANENT}


def test_empty_trace_has_no_fates():
    assert node_fates(Trace()) == {}


def test_delete_makes_a_node_temporary():
    def build(f):
        h = f.make_heap()
        f.insert(h, 1)
        b = f.insert(h, 2)
        f.delete(h, b)
        return b
    t, b = record(build)
    assert node_fates(t)[b] is NodeFate.TEMPORARY


# ------------------------------------------------------------- annotations

def _only_link(t):
    ann = annotate_links(t, node_fates(t))
    assert len(ann) >= 1
    return ann[0]


def test_insertion_link_cut_by_deletion_is_real_d_link():
    def build(f):
        h = f.make_heap()
        f.insert(h, 3)
        f.insert(h, 5)
        drain(f, h)
    a = _only_link(record(build)[0])
    assert a.fate is LinkFate.D_LINK and a.real


def test_link_cut_by_decrease_key_is_phantom_k_link():
    def build(f):
        h = f.make_heap()
        f.insert(h, 3)
        b = f.insert(h, 5)
        f.decrease_key(h, b, 1)
    a = _only_link(record(build)[0])
    assert a.fate is LinkFate.K_LINK and not a.real


def test_k_link_stays_phantom_even_between_temporaries():
    def build(f):
        h = f.make_heap()
        f.insert(h, 3)
        b = f.insert(h, 5)
        f.decrease_key(h, b, 1)
        drain(f, h)
    t, _ = record(build)
    a = annotate_links(t, node_fates(t))[0]
    assert a.fate is LinkFate.K_LINK and not a.real


def test_uncut_link_between_permanents_is_phantom_f_link():
    def build(f):
        h = f.make_heap()
        f.insert(h, 3)
        f.insert(h, 5)
    a = _only_link(record(build)[0])
    assert a.fate is LinkFate.F_LINK and not a.real


# ---------------------------------------------------------------- contexts

def test_meld_context_counts_temporaries_of_both_inputs():
    def build(f):
        a, b = f.make_heap(), f.make_heap()
        for k in (1, 2, 3):
            f.insert(a, k)
        for k in (4, 5):
            f.insert(b, k)
        h = f.meld(a, b)
        drain(f, h)
    t, _ = record(build)
    ctx = op_contexts(t, node_fates(t))
    meld = next(c for c in ctx if c.kind is OpKind.MELD)
    assert meld.n_raw == 5 and meld.n_clamped == 5


def test_context_clamps_small_heaps():
    def build(f):
        h = f.make_heap()
        f.insert(h, 1)
        f.find_min(h)
        f.delete_min(h)
    t, _ = record(build)
    fm = op_contexts(t, node_fates(t))[2]
    assert (fm.n_raw, fm.n_clamped) == (1, 4)


def test_context_of_all_permanent_heap_is_zero():
    def build(f):
        h = f.make_heap()
        f.insert(h, 1)
        f.insert(h, 2)
        f.find_min(h)
    t, _ = record(build)
    fm = op_contexts(t, node_fates(t))[-1]
    assert (fm.n_raw, fm.n_clamped) == (0, 4)


def test_context_is_taken_before_the_operation():
    def build(f):
        h = f.make_heap()
        for k in range(6):
            f.insert(h, k)
        drain(f, h)
    t, _ = record(build)
    ctx = op_contexts(t, node_fates(t))
    assert [c.n_raw for c in ctx if c.kind is OpKind.INSERT] == [0, 1, 2, 3, 4, 5]
    assert [c.n_raw for c in ctx if c.kind is OpKind.DELETE_MIN] == [6, 5, 4, 3, 2, 1, 0]


# ------------------------------------------------------------------- sizes

def _sizes_of(cl, item):
    return [r.size for r in cl.sizes if r.item == item]


def test_fresh_temporary_has_size_one():
    def build(f):
        h = f.make_heap()
        x = f.insert(h, 1)
        f.delete_min(h)
        return x
    t, x = record(build)
    assert _sizes_of(classify(t), x) == [1]


def test_winning_a_real_link_adds_the_loser_size():
    def build(f):
        a, b = f.make_heap(), f.make_heap()
        y = f.insert(b, 1)
        f.insert(b, 2)
        f.insert(b, 3)
        x = f.insert(a, 0)
        h = f.meld(a, b)
        drain(f, h)
        return x, y
    t, (x, y) = record(build)
    cl = classify(t)
    assert _sizes_of(cl, y)[:3] == [1, 2, 3]
    assert _sizes_of(cl, x)[:2] == [1, 4]


def test_phantom_win_leaves_size_unchanged():
    def build(f):
        h = f.make_heap()
        x = f.insert(h, 0)
        f.insert(h, 5)          # never deleted, so the link is phantom
        f.delete_min(h)
        return x
    t, x = record(build)
    assert _sizes_of(classify(t), x) == [1]


# ------------------------------------------------------------------- masses

def test_mass_of_lone_real_child():
    def build(f):
        a, b = f.make_heap(), f.make_heap()
        y = f.insert(b, 1)
        for k in (2, 3, 4):
            f.insert(b, k)
        x = f.insert(a, 0)
        h = f.meld(a, b)
        drain(f, h)
        return x, y
    t, (x, y) = record(build)
    cl = classify(t)
    m = next(m for m in cl.masses if m.item == y and m.parent == x)
    assert m.sibling_sum == 5 and m.parent_size == 5


def test_mass_equals_parent_size_with_real_siblings():
    def build(f):
        a, b = f.make_heap(), f.make_heap()
        p = f.insert(a, 0)
        for k in (10, 11, 12, 13):
            f.insert(a, k)
        x = f.insert(b, 1)
        f.insert(b, 2)
        h = f.meld(a, b)
        drain(f, h)
        return p, x
    t, (p, x) = record(build)
    m = next(m for m in classify(t).masses if m.item == x and m.parent == p)
    assert m.parent_size == 7 and m.sibling_sum == 7


def test_phantom_child_has_no_mass():
    def build(f):
        h = f.make_heap()
        f.insert(h, 0)
        y = f.insert(h, 5)
        f.delete_min(h)
        return y
    t, y = record(build)
    assert [m for m in classify(t).masses if m.item == y] == []


# ------------------------------------------------- independent size oracle

def _dfs_sizes(forest, real, temp):
    """Real-subtree sizes of every temporary node, by explicit traversal."""
    memo = {}

    def size(x):
        if x not in memo:
            memo[x] = 1 + sum(size(c) for c in forest.children(x)
                              if forest._parent_link[c] in real)
        return memo[x]

    out = {}
    for h in forest.heaps():
        stack = [forest.root(h)] if forest.root(h) is not None else []
        while stack:
            x = stack.pop()
            stack.extend(forest.children(x))
            if x in temp:
                out[x] = size(x)
    return out


@pytest.mark.parametrize("generator", GENERATORS)
@pytest.mark.parametrize("strategy", ["twopass", "multipass"])
def test_size_timeline_matches_traversal(generator, strategy):
    wl = generate(WorkloadSpec(generator=generator, size=150, seed=3, drain_tail=True))
    cl = classify(run(wl, strategy))
    real = {a.link_id for a in cl.links if a.real}
    temp = {x for x, fate in cl.fates.items() if fate is NodeFate.TEMPORARY}
    by_op = defaultdict(list)
    for r in cl.sizes:
        by_op[r.op_index].append(r)
    current = {}
    f = Forest()
    deleted = set()
    for i, op in enumerate(wl.ops):
        res = apply_op(f, op, strategy)
        if op.kind is OpKind.DELETE_MIN and res is not None:
            deleted.add(res)
        if op.kind is OpKind.DELETE:
            deleted.add(op.item)
        for r in by_op[i]:
            current[r.item] = r.size
        expected = _dfs_sizes(f, real, temp)
        got = {x: s for x, s in current.items() if x not in deleted}
        assert got == expected, f"op {i}"


def test_annotated_export_adds_fate_and_reality():
    import json
    t = run(generate(WorkloadSpec(size=60, drain_tail=True)))
    cl = classify(t)
    lines = list(annotated_lines(t, cl.links))
    assert json.loads(lines[0])["annotated"] is True
    links = [ln for line in lines[1:] for ln in json.loads(line)["links"]]
    assert len(links) == len(cl.links)
    assert all(ln["fate"] in "dkf" and isinstance(ln["real"], bool) for ln in links)


def test_counts_cover_every_link():
    cl = classify(run(generate(WorkloadSpec(size=200, seed=2))))
    assert sum(cl.counts().values()) == len(cl.links)


@pytest.mark.parametrize("generator", GENERATORS)
@pytest.mark.parametrize("perturbed", [False, True])
def test_running_sibling_sums_match_literal_walk(generator, perturbed):
    from pairaudit.classify import mass_records
    from pairaudit.rng import SplitMix64
    from pairaudit.workbench import perturb
    t = run(generate(WorkloadSpec(generator=generator, size=300, seed=6, drain_tail=True)))
    if perturbed:
        t = perturb(t, SplitMix64(2), "drop_cut")
    fates = node_fates(t)
    ann = annotate_links(t, fates)
    assert mass_records(t, fates, ann) == mass_records(t, fates, ann, literal=True)
