import random

import pytest

from cyclograph.affine import AffineMap, procreation_numbers
from cyclograph.trees import (TreeDescriptionList, canonical_key,
                              coset_cycle_trees, coset_heights, expand_edges,
                              expand_height, expand_size, insert_tree,
                              rigid_tree, synchronize, tree_graft, tree_sum)
from oracles import affine_succ, ahu_keys


def brute_tree_key(succ, root, periodic):
    keys, _ = ahu_keys(succ)
    return keys[root]


def test_list_basics():
    lst = TreeDescriptionList()
    assert len(lst) == 1
    assert expand_size(lst, 0) == 1 and expand_height(lst, 0) == 0
    i1 = insert_tree(lst, [(0, 2)])
    assert insert_tree(lst, [(0, 2)]) == i1
    i2 = insert_tree(lst, [(0, 3)])
    assert i2 != i1
    assert insert_tree(lst, [(0, 1), (0, 2)]) == i2  # merged multiplicities
    assert insert_tree(lst, [(0, 0)]) == 0           # zero pairs dropped
    with pytest.raises(IndexError):
        insert_tree(lst, [(99, 1)])


def test_opening_figure_size():
    # root with a weight-2 leaf edge and a weight-1 edge to a node carrying
    # a weight-3 leaf edge: 1 + 2 + (1 + 3) = 7 vertices, height 2
    lst = TreeDescriptionList()
    mid = insert_tree(lst, [(0, 3)])
    fig = insert_tree(lst, [(0, 2), (mid, 1)])
    assert expand_size(lst, fig) == 7
    assert expand_height(lst, fig) == 2


def test_canonical_key():
    lst = TreeDescriptionList()
    a = insert_tree(lst, [(0, 2)])
    b = insert_tree(lst, [(0, 3)])
    x = insert_tree(lst, [(a, 1), (b, 2)])
    y = insert_tree(lst, [(b, 2), (a, 1)])
    assert x == y and canonical_key(lst, x) == canonical_key(lst, y)
    assert canonical_key(lst, 0) != canonical_key(lst, a)
    # key agrees with the AHU oracle on an expanded tree
    edges = expand_edges(lst, x)
    succ = [0] * (len(edges) + 1)
    for child, parent in edges:
        succ[child] = parent
    succ[0] = 0  # root loop, removed by the periodic convention
    keys, periodic = ahu_keys(succ)
    assert keys[0] == canonical_key(lst, x)


def test_key_oracle_random():
    rng = random.Random(1)
    for _ in range(500):
        lst = TreeDescriptionList()
        for _ in range(rng.randrange(1, 8)):
            pairs = [(rng.randrange(len(lst)), rng.randrange(0, 3))
                     for _ in range(rng.randrange(0, 4))]
            insert_tree(lst, pairs)
        n = rng.randrange(len(lst))
        m = rng.randrange(len(lst))
        if expand_size(lst, n) > 5000 or expand_size(lst, m) > 5000:
            continue
        iso = _brute_iso_key(lst, n) == _brute_iso_key(lst, m)
        assert iso == (canonical_key(lst, n) == canonical_key(lst, m))


def _brute_iso_key(lst, n):
    edges = expand_edges(lst, n)
    succ = list(range(len(edges) + 1))
    for child, parent in edges:
        succ[child] = parent
    keys, _ = ahu_keys(succ)
    return keys[0]


def test_sum_and_graft():
    lst = TreeDescriptionList()
    assert tree_sum(lst, [(0, 5)]) == 0  # sums of trivial trees stay trivial
    g = tree_graft(lst, 0)
    assert expand_size(lst, g) == 2
    # weighted-sum figure: {2 leaves, 2x(node with 2 leaves)} +
    # {1 leaf, 1x(node with 3 leaves)} merges root children
    n2 = insert_tree(lst, [(0, 2)])
    n3 = insert_tree(lst, [(0, 3)])
    t1 = insert_tree(lst, [(0, 2), (n2, 2)])
    t2 = insert_tree(lst, [(0, 1), (n3, 1)])
    merged = tree_sum(lst, [(t1, 1), (t2, 1)])
    assert sorted(lst.entries[merged]) == sorted(((0, 3), (n2, 2), (n3, 1)))
    assert expand_size(lst, merged) == 1 + 3 + 2 * 3 + 4


def test_rigid_tree():
    lst = TreeDescriptionList()
    assert rigid_tree([1], lst) == 0
    r = rigid_tree([3, 1], lst)
    assert lst.entries[r] == ((0, 2),) and expand_size(lst, r) == 3
    r2 = rigid_tree([2, 2, 1], lst)
    assert expand_size(lst, r2) == 4  # matches mu_2 mod 4
    r3 = rigid_tree([2, 2, 2, 1], lst)
    assert expand_size(lst, r3) == 8  # matches mu_2 mod 8
    with pytest.raises(ValueError):
        rigid_tree([2, 0], lst)
    with pytest.raises(ValueError):
        rigid_tree([2, 3, 1], lst)


def test_rigid_tree_vs_brute():
    """All trees above periodic vertices of an affine graph are isomorphic
    to the procreation-number tree."""
    rng = random.Random(2)
    for _ in range(120):
        m = rng.randrange(2, 300)
        a, b = rng.randrange(m), rng.randrange(m)
        succ = affine_succ(m, a, b)
        keys, periodic = ahu_keys(succ)
        per_keys = {keys[v] for v in range(m) if periodic[v]}
        assert len(per_keys) == 1  # rigid procreation
        lst = TreeDescriptionList()
        idx = rigid_tree(procreation_numbers(AffineMap(m, a, b), m.bit_length() + 2),
                         lst)
        assert canonical_key(lst, idx) == per_keys.pop()


def test_coset_heights_and_trees():
    # the two-coset example with A_0 = id, A_1 = doubling over Z/6
    heights, H = coset_heights([1, 2], 6)
    assert heights == [2, 0] and H == 2
    lst = TreeDescriptionList()
    cct = coset_cycle_trees([1, 2], 6, lst)
    assert expand_size(lst, cct.index[(0, 2)]) == 3   # a 2-path
    assert expand_height(lst, cct.index[(0, 2)]) == 2
    assert cct.index[(1, 2)] == 0                      # trivial on C_1
    # single-coset case degenerates to rigid_tree
    lst2 = TreeDescriptionList()
    c2 = coset_cycle_trees([9], 51, lst2)
    assert c2.max_height == 1
    assert expand_size(lst2, c2.index[(0, 1)]) == 3
    # all-unit cycles have only trivial trees
    lst3 = TreeDescriptionList()
    c3 = coset_cycle_trees([5, 7], 12, lst3)
    assert c3.max_height == 0
    assert all(i == 0 for i in c3.index.values())


def test_coset_cycle_trees_vs_brute():
    """Periodic trees of the two-coset product system match brute force."""
    rng = random.Random(3)
    for _ in range(60):
        s = rng.randrange(2, 40)
        ell = rng.randrange(1, 4)
        alphas = [rng.randrange(s) for _ in range(ell)]
        betas = [rng.randrange(s) for _ in range(ell)]
        # explicit functional graph on ell copies of Z/s
        succ = []
        for t in range(ell):
            for z in range(s):
                z2 = (alphas[t] * z + betas[t]) % s
                succ.append(((t + 1) % ell) * s + z2)
        keys, periodic = ahu_keys(succ)
        lst = TreeDescriptionList()
        cct = coset_cycle_trees(alphas, s, lst)
        for t in range(ell):
            per_keys = {keys[t * s + z] for z in range(s) if periodic[t * s + z]}
            if not per_keys:
                continue
            assert len(per_keys) == 1
            got = canonical_key(lst, cct.index[(t, cct.max_height)])
            assert got == per_keys.pop(), (s, alphas, betas, t)


def test_synchronize():
    base = TreeDescriptionList()
    b1 = insert_tree(base, [(0, 2)])
    other = TreeDescriptionList()
    insert_tree(other, [(0, 3)])
    merged, tr = synchronize(base, other)
    assert tr == {0: 0, 1: 2}
    assert merged.entries[:2] == base.entries
    same, tr2 = synchronize(base, base)
    assert tr2 == {0: 0, 1: 1} and len(same) == len(base)
    trivial_only = TreeDescriptionList()
    _, tr3 = synchronize(base, trivial_only)
    assert tr3 == {0: 0}


def test_synchronize_random():
    rng = random.Random(4)
    for _ in range(100):
        lists = []
        for _ in range(2):
            lst = TreeDescriptionList()
            for _ in range(rng.randrange(0, 10)):
                pairs = [(rng.randrange(len(lst)), rng.randrange(0, 3))
                         for _ in range(rng.randrange(0, 4))]
                insert_tree(lst, pairs)
            lists.append(lst)
        a, b = lists
        merged, tr = synchronize(a, b)
        assert merged.entries[:len(a)] == a.entries
        for n in range(len(b)):
            assert canonical_key(merged, tr[n]) == canonical_key(b, n)
        covered = set(tr.values())
        assert all(k in covered for k in range(len(a), len(merged)))


def test_render():
    lst = TreeDescriptionList()
    a = insert_tree(lst, [(0, 2)])
    b = insert_tree(lst, [(0, 1), (a, 3)])
    assert lst.render(0) == "T0 = ."
    assert lst.render(b) == f"T{b} = 1*T0 + 3*T{a}"
