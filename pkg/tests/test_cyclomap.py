import random
from collections import Counter

import pytest

from cyclograph.affine import AffineMap
from cyclograph.cyclomap import (CyclotomicMapping, brute_graph,
                                 build_register, component_necklace,
                                 compute_H, crl_census, crl_list, dot_export,
                                 evaluate, field_for, induce, max_cycle_length,
                                 parse_mapping, parse_vertex, random_mapping,
                                 register_components, render_mapping,
                                 step_exponent, tree_of_vertex, vertex_name)
from cyclograph.errors import CapExceeded, MappingFormatError
from cyclograph.seqtools import least_rotation

GOLDEN = """
q=256
d=5
branch 0: a=w^5, r=9
branch 1: a=w^0, r=3
branch 2: a=w^0, r=17
branch 3: a=w^3, r=34
branch 4: a=w^4, r=9
"""


@pytest.fixture(scope="module")
def golden():
    return parse_mapping(GOLDEN)


@pytest.fixture(scope="module")
def golden_register(golden):
    return build_register(golden)


def test_parse_golden(golden):
    assert golden.q == 256 and golden.d == 5 and golden.s == 51
    assert golden.branches == ((5, 9), (0, 3), (0, 17), (3, 34), (4, 9))


def test_parse_rejects():
    with pytest.raises(MappingFormatError):
        parse_mapping("q=8\nd=3\nbranch 0: a=0, r=0\n")  # 3 does not divide 7
    with pytest.raises(MappingFormatError):
        parse_mapping("d=1\nbranch 0: a=0, r=0\n")  # missing q
    with pytest.raises(MappingFormatError):
        parse_mapping("q=12\nd=1\nbranch 0: a=0, r=0\n")  # not a prime power
    # d=1 constant-zero mapping is fine
    m = parse_mapping("q=8\nd=1\nbranch 0: a=0, r=0\n")
    assert m.branches == ((None, 0),)


def test_parse_field_element_coefficient():
    text = ("q=256\np=2 n=8 poly=x^8+x^4+x^3+x^2+1\nd=1\n"
            "branch 0: a=x^2, r=1\n")
    m = parse_mapping(text)
    # a = omega^2 since omega = x in this basis
    assert m.branches == ((2, 1),)


def test_parse_render_roundtrip(golden):
    m2 = parse_mapping(render_mapping(golden))
    assert m2.branches == golden.branches and m2.d == golden.d


def test_induce_golden(golden):
    ind = induce(golden)
    assert ind.fbar == (0, 3, 4, 0, 0, 5)
    assert ind.maps[0] == AffineMap(51, 9, 1)
    assert ind.maps[1] == AffineMap(51, 3, 0)
    assert ind.maps[2] == AffineMap(51, 17, 6)
    assert ind.maps[3] == AffineMap(51, 34, 21)
    assert ind.maps[4] == AffineMap(51, 9, 8)
    assert ind.fbar_cycles() == [[0]]
    assert sorted(ind.transient_indices()) == [1, 2, 3, 4]


def test_induce_zero_branch():
    m = parse_mapping("q=16\nd=3\nbranch 0: a=0, r=2\nbranch 1: a=w^1, r=1\n"
                      "branch 2: a=w^2, r=4\n")
    ind = induce(m)
    assert ind.fbar[0] == 3 and ind.maps[0] is None
    assert ind.zero_branches() == [0]


def test_evaluate(golden):
    ctx = golden.field
    assert evaluate(golden, ctx.zero()) == ctx.zero()
    # f(omega^110) = omega^(5 + 9*110 mod 255) = omega^230, i.e. A_0(22) = 46
    x = ctx.omega_pow(110)
    assert evaluate(golden, x) == ctx.omega_pow(230)
    assert (230 - 0) // 5 == 46
    # evaluate commutes with the induced affine maps
    rng = random.Random(0)
    ind = induce(golden)
    for _ in range(60):
        k = rng.randrange(255)
        got = evaluate(golden, ctx.omega_pow(k))
        kk = step_exponent(ind, k)
        assert got == (ctx.zero() if kk is None else ctx.omega_pow(kk))


def test_crl_golden(golden):
    crl = crl_list(golden)
    assert Counter(l for _, l in crl) == Counter({1: 2, 8: 2})
    labels = {vertex_name(r) for r, _ in crl}
    assert labels == {"0F", "w^95", "w^110", "w^185"}
    assert crl_census(golden) == Counter({1: 2, 8: 2})


def test_compute_H_golden(golden):
    ind = induce(golden)
    heights, H = compute_H(ind, [0])
    assert heights == [1] and H == 1
    assert max_cycle_length(golden) == 8


def test_register_golden_structure(golden, golden_register):
    reg = golden_register
    # P_3 = P(x=0 mod 3), P_4 = P(x=6 mod 17)
    assert [(c.modulus, c.residue)
            for c in reg.transient[3].partition.congruences] == [(3, 0)]
    assert [(c.modulus, c.residue)
            for c in reg.transient[4].partition.congruences] == [(17, 6)]
    # P_0: R_0 (4 congruences), lambda(R_0, A_0) (4), theta (1)
    P0 = reg.periodic[0].full_partition()
    assert [(c.modulus, c.residue) for c in P0.congruences] == \
        [(51, 21), (17, 4), (51, 11), (3, 2),
         (51, 37), (51, 37), (51, 49), (3, 1), (3, 1)]
    assert reg.periodic[0].H == 1
    # tree sizes: the paper's 6 / 23 / 91 / 57 with trivial zero tree
    sizes = {reg.trees.size(n) for n in range(len(reg.trees))}
    assert {1, 6, 23, 91, 57} <= sizes
    assert reg.trees.size(reg.zero_tree) == 1


def test_register_golden_vertex_trees(golden, golden_register):
    reg = golden_register
    bg = brute_graph(golden)
    for v in range(golden.q):
        lbl = None if v == bg.zero_id else v
        assert reg.tree_key(tree_of_vertex(reg, lbl)) == bg.tree_key[v]
    # iota_0(4) = omega^20 carries the size-23 tree
    assert reg.trees.size(tree_of_vertex(reg, 20)) == 23
    assert reg.trees.size(tree_of_vertex(reg, 5 * 37)) == 91
    assert reg.trees.size(tree_of_vertex(reg, 5 * 49)) == 57


def test_golden_components(golden, golden_register):
    reg = golden_register
    rc = register_components(reg)
    assert rc == brute_graph(golden).components()
    neck = component_necklace(reg, 185, 8)
    sizes = tuple(reg.trees.size(b) for b in neck.beads)
    assert least_rotation(sizes) == least_rotation((91, 6, 57, 6, 6, 6, 6, 23))
    assert component_necklace(reg, 110, 8).beads == \
        (tree_of_vertex(reg, 110),)
    assert component_necklace(reg, None, 1).beads == (reg.zero_tree,)
    with pytest.raises(ValueError):
        component_necklace(reg, 185, 4)
    # the dlog path agrees with plain enumeration
    neck2 = component_necklace(reg, 185, 8, enum_cap=1)
    assert neck2 == neck


def test_vertex_totals_golden(golden, golden_register):
    reg = golden_register
    total = 0
    for r, l in crl_list(golden):
        neck = component_necklace(reg, r, l)
        total += sum(reg.trees.size(b) for b in neck.beads) * (l // len(neck.beads))
    assert total == 256
    assert total - reg.trees.size(reg.zero_tree) == 255  # 14*6+23+91+57


def test_register_random_vs_oracle():
    rng = random.Random(6)
    checked = 0
    while checked < 50:
        m = random_mapping(rng, max_q=512)
        try:
            reg = build_register(m, sign_cap=64)
        except CapExceeded:
            continue
        bg = brute_graph(m)
        for v in range(m.q):
            lbl = None if v == bg.zero_id else v
            assert reg.tree_key(tree_of_vertex(reg, lbl)) == bg.tree_key[v], \
                render_mapping(m)
        assert register_components(reg) == bg.components(), render_mapping(m)
        checked += 1


def test_register_sign_cap():
    # q = 257 with d = 2 gives s = 128 and deep theta chains
    m = CyclotomicMapping(field_for(257), 2, ((1, 2), (0, 2)))
    with pytest.raises(CapExceeded):
        build_register(m, sign_cap=4)


def test_crl_validity_random():
    rng = random.Random(7)
    for _ in range(40):
        m = random_mapping(rng, max_q=512)
        bg = brute_graph(m)
        crl = crl_list(m)
        cyc_of = {}
        for k, cyc in enumerate(bg.cycles):
            for v in cyc:
                cyc_of[v] = k
        seen = set()
        for r, l in crl:
            vid = bg.zero_id if r is None else r
            assert cyc_of[vid] not in seen
            seen.add(cyc_of[vid])
            assert len(bg.cycles[cyc_of[vid]]) == l
        assert len(seen) == len(bg.cycles)


def test_special_shapes():
    f8 = field_for(8)
    ident = CyclotomicMapping(f8, 1, ((0, 1),))
    assert crl_census(ident) == Counter({1: 8})
    zero = CyclotomicMapping(f8, 1, ((None, 0),))
    reg = build_register(zero)
    assert crl_list(zero) == [(None, 1)]
    assert reg.trees.size(reg.zero_tree) == 8  # a root with 7 leaves... plus 0
    assert reg.trees.entries[reg.zero_tree] == ((0, 7),)
    # constant-d induced map: all branches zero
    f9 = field_for(9)
    allzero = CyclotomicMapping(f9, 2, ((None, 0), (None, 3)))
    regz = build_register(allzero)
    assert regz.trees.entries[regz.zero_tree] == ((0, 8),)
    assert register_components(regz) == brute_graph(allzero).components()


def test_dot_export(golden):
    text = dot_export(golden)
    lines = text.strip().splitlines()
    assert lines[0] == "digraph cyclomap {"
    assert text.count("->") == 256  # one arc per vertex
    assert len(lines) == 256 + 2
    assert dot_export(golden) == text  # deterministic
    small = CyclotomicMapping(field_for(2), 1, ((0, 0),))
    assert dot_export(small).count("->") == 2
    with pytest.raises(CapExceeded):
        dot_export(CyclotomicMapping(field_for(8192), 1, ((0, 1),)), cap=4096)


def test_vertex_names():
    assert vertex_name(None) == "0F"
    assert vertex_name(185) == "w^185"
    assert parse_vertex("0F", 256) is None
    assert parse_vertex("w^185", 256) == 185
    with pytest.raises(MappingFormatError):
        parse_vertex("x5", 256)


def test_register_block_bookkeeping():
    """Every recorded sign tuple has a nonempty block, and block sizes per
    coset sum to s."""
    from cyclograph.partition import block_size
    rng = random.Random(11)
    checked = 0
    while checked < 25:
        m = random_mapping(rng, max_q=512)
        try:
            reg = build_register(m, sign_cap=64)
        except CapExceeded:
            continue
        checked += 1
        s = m.s
        for i, data in reg.transient.items():
            total = 0
            for nu in data.blocks:
                sz = block_size(data.partition, nu)
                assert sz > 0
                total += sz
            assert total == s
        from cyclograph.partition import block_of
        for i, data in reg.periodic.items():
            P = data.full_partition()
            lengths = data.layer_lengths()
            nX = sum(lengths)
            covered = 0
            for z in range(s):
                signs = block_of(P, z)
                h = sum(signs[nX:])
                nu = signs[:sum(lengths[:h + 1])]
                assert nu in data.blocks[h]
                covered += 1
            assert covered == s


def test_h_value_consistency():
    """The U_i-block h-value equals the brute tree height in the periodic
    part (or H_i for periodic points)."""
    from cyclograph.cyclomap import vertex_h_value
    rng = random.Random(12)
    checked = 0
    while checked < 25:
        m = random_mapping(rng, max_q=512)
        ind = induce(m)
        per_cosets = {i for cyc in ind.fbar_cycles() for i in cyc}
        if not per_cosets:
            continue
        try:
            reg = build_register(m, sign_cap=64)
        except CapExceeded:
            continue
        checked += 1
        # brute heights inside Gamma_per (restriction to periodic cosets)
        s, d = m.s, m.d
        verts = {(i, z) for i in per_cosets for z in range(s)}
        idx = {v: k for k, v in enumerate(sorted(verts))}
        succ = [0] * len(idx)
        for (i, z), k in idx.items():
            A = ind.maps[i]
            succ[k] = idx[(ind.fbar[i], A(z))]
        from oracles import graph_structure
        periodic, preim, peel = graph_structure(succ)
        ht = [0] * len(idx)
        for v in peel:
            ht[v] = 1 + max((ht[u] for u in preim[v] if not periodic[u]),
                            default=-1)
        for (i, z), k in idx.items():
            x = i + d * z
            got = vertex_h_value(reg, x)
            H = reg.periodic[i].H
            if periodic[k]:
                assert got == H, (render_mapping(m), i, z)
            else:
                assert got == ht[k], (render_mapping(m), i, z)
