"""Coset-wise monomial maps of F_q end to end.

A mapping fixes 0 and acts as a_i x^{r_i} on the coset C_i of the index-d
subgroup of F_q*.  Vertices of the functional graph are named by their
omega-exponent (an int in [0, q-1)) or None for the zero field element.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from cyclograph import affine, numtheory, partition as parts, trees
from cyclograph.affine import AffineMap
from cyclograph.errors import CapExceeded, MappingFormatError
from cyclograph.finitefield import (Element, FieldContext, field_dlog,
                                    make_field, parse_poly, render_poly)
from cyclograph.partition import (ArithmeticPartition, SignTuple, block_of,
                                  distribution_number, lambda_push, lift,
                                  partition_of, sign_matrix, trivial_partition,
                                  wedge)
from cyclograph.seqtools import canonical_necklace
from cyclograph.trees import TreeDescriptionList

Vertex = Optional[int]  # omega-exponent, or None for the zero field element

DEFAULT_SIGN_CAP = 24
DEFAULT_ORACLE_CAP = 1 << 20
DEFAULT_CYCLE_CAP = 1 << 20
DEFAULT_ENUM_CAP = 1 << 16


@dataclass(frozen=True)
class CyclotomicMapping:
    """q, d and the per-coset pairs (coefficient exponent or None, power r)."""

    field: FieldContext
    d: int
    branches: tuple[tuple[Optional[int], int], ...]  # (e_i or None, r_i)

    def __post_init__(self):
        q = self.field.q
        if self.d < 1 or (q - 1) % self.d != 0:
            raise MappingFormatError(f"index {self.d} does not divide q-1 = {q - 1}")
        if len(self.branches) != self.d:
            raise MappingFormatError("need exactly d branches")
        for e, r in self.branches:
            if e is not None and not 0 <= e < q - 1:
                raise MappingFormatError(f"coefficient exponent {e} out of range")
            if not 0 <= r < q - 1:
                raise MappingFormatError(f"power {r} out of range")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def s(self) -> int:
        return (self.q - 1) // self.d


@dataclass(frozen=True)
class InducedStructure:
    """fbar on {0..d} plus the affine coset maps A_i of Z/sZ."""

    mapping: CyclotomicMapping
    fbar: tuple[int, ...]                     # length d+1, fbar[d] = d
    maps: tuple[Optional[AffineMap], ...]     # None exactly on zero branches

    @property
    def d(self) -> int:
        return self.mapping.d

    @property
    def s(self) -> int:
        return self.mapping.s

    def zero_branches(self) -> list[int]:
        return [i for i in range(self.d) if self.maps[i] is None]

    def fbar_cycles(self) -> list[list[int]]:
        """Cycles of fbar restricted to {0..d-1}, each rotated to start at
        its smallest member, sorted by that member."""
        d = self.d
        on_cycle = _periodic_indices(self.fbar, d)
        done: set[int] = set()
        cycles = []
        for i in range(d):
            if i in done or i not in on_cycle:
                continue
            cyc = [i]
            j = self.fbar[i]
            while j != i:
                cyc.append(j)
                j = self.fbar[j]
            done.update(cyc)
            cycles.append(cyc)
        return cycles

    def transient_indices(self) -> list[int]:
        on_cycle = _periodic_indices(self.fbar, self.d)
        return [i for i in range(self.d) if i not in on_cycle]


def _periodic_indices(fbar: Sequence[int], d: int) -> set[int]:
    cur = set(range(d + 1))
    while True:
        nxt = {fbar[i] for i in cur}
        if nxt == cur:
            return cur
        cur = nxt


def induce(mapping: CyclotomicMapping) -> InducedStructure:
    """fbar(i) = (e_i + r_i i) mod d (d on zero branches), and the affine
    maps A_i : x -> r_i x + (e_i + r_i i - fbar(i))/d of Z/sZ."""
    d, s = mapping.d, mapping.s
    fbar = []
    maps: list[Optional[AffineMap]] = []
    for i, (e, r) in enumerate(mapping.branches):
        if e is None:
            fbar.append(d)
            maps.append(None)
        else:
            fi = (e + r * i) % d
            fbar.append(fi)
            maps.append(AffineMap(s, r, (e + r * i - fi) // d))
    fbar.append(d)
    return InducedStructure(mapping, tuple(fbar), tuple(maps))


def evaluate(mapping: CyclotomicMapping, x: Element) -> Element:
    """f(x) by honest field arithmetic (branch chosen via the field dlog)."""
    ctx = mapping.field
    if x == ctx.zero():
        return x
    k = field_dlog(ctx, x)
    e, r = mapping.branches[k % mapping.d]
    if e is None:
        return ctx.zero()
    return ctx.mul(ctx.omega_pow(e), ctx.pow(x, r))


def step_exponent(ind: InducedStructure, k: int) -> Vertex:
    """Successor of omega^k as a vertex label."""
    e, r = ind.mapping.branches[k % ind.d]
    if e is None:
        return None
    return (e + r * k) % (ind.mapping.q - 1)


def coset_point(ind: InducedStructure, i: int, z: int) -> int:
    """Exponent of iota_i(z) = omega^(i + d z)."""
    return (i + ind.d * z) % (ind.mapping.q - 1)


def vertex_coset(ind: InducedStructure, k: int) -> tuple[int, int]:
    """(coset index i, coset coordinate z) of omega^k."""
    i = k % ind.d
    return i, (k - i) // ind.d


def cycle_maps(ind: InducedStructure, cycle: Sequence[int]) -> list[AffineMap]:
    """A_{i_t} for each position t of an fbar-cycle (all defined)."""
    out = []
    for i in cycle:
        A = ind.maps[i]
        assert A is not None, "periodic coset with a zero branch"
        out.append(A)
    return out


def cycle_return_map(ind: InducedStructure, cycle: Sequence[int], t: int = 0) -> AffineMap:
    """The return map of f^ell on C_{i_t}: A_{i_t} first, around the cycle."""
    ell = len(cycle)
    A = affine.identity(ind.s)
    for j in range(ell):
        A = affine.compose(A, ind.maps[cycle[(t + j) % ell]])
    return A


# ---------------------------------------------------------------------------
# CRL lists
# ---------------------------------------------------------------------------


def crl_list(mapping: CyclotomicMapping,
             max_cycles: Optional[int] = DEFAULT_CYCLE_CAP,
             ) -> list[tuple[Vertex, int]]:
    """A CRL list of f over F_q: {(0,1)} plus, per fbar-cycle, the lifted
    CRL list of the return map with lengths scaled by the cycle length."""
    ind = induce(mapping)
    out: list[tuple[Vertex, int]] = [(None, 1)]
    for cycle in ind.fbar_cycles():
        ell = len(cycle)
        A = cycle_return_map(ind, cycle)
        for r, l in affine.crl_affine(A.m, A.a, A.b, max_cycles=max_cycles):
            out.append((coset_point(ind, cycle[0], r), ell * l))
    return out


def crl_census(mapping: CyclotomicMapping) -> Counter:
    """Multiset {cycle length: count} without enumerating representatives."""
    ind = induce(mapping)
    census: Counter = Counter({1: 1})
    for cycle in ind.fbar_cycles():
        ell = len(cycle)
        A = cycle_return_map(ind, cycle)
        for l, e in affine.cycle_type(A):
            census[ell * l] += e
    return census


def compute_H(ind: InducedStructure, cycle: Sequence[int]) -> tuple[list[int], int]:
    """Per-coset periodic tree heights along an fbar-cycle, and their max."""
    alphas = [A.a for A in cycle_maps(ind, cycle)]
    return trees.coset_heights(alphas, ind.s)


def max_cycle_length(mapping: CyclotomicMapping) -> int:
    """Largest f-cycle length: max over fbar-cycles of ell * ord(return map)."""
    ind = induce(mapping)
    best = 1
    for cycle in ind.fbar_cycles():
        A = cycle_return_map(ind, cycle)
        best = max(best, len(cycle) * affine.affine_order_on_per(A))
    return best


# ---------------------------------------------------------------------------
# Partition-tree register
# ---------------------------------------------------------------------------


@dataclass
class TransientCosetData:
    partition: ArithmeticPartition
    blocks: dict[SignTuple, int]  # nonempty block sign tuple -> tree index


@dataclass
class PeriodicCosetData:
    cycle: tuple[int, ...]
    pos: int                       # this coset's position inside `cycle`
    H: int
    height: int                    # common periodic-tree height on this coset
    thetas: ArithmeticPartition    # U_i, spanned by theta_{i,1..H}
    layers: tuple[ArithmeticPartition, ...]  # X_{i,0..H}
    blocks: list[dict[SignTuple, int]]       # per h: X-prefix sign tuple -> tree

    def full_partition(self) -> ArithmeticPartition:
        """Spanning sequence X_{i,0} | ... | X_{i,H} | U_i of the coset partition."""
        return wedge(*self.layers, self.thetas)

    def layer_lengths(self) -> list[int]:
        return [len(p) for p in self.layers]


@dataclass
class PartitionTreeRegister:
    mapping: CyclotomicMapping
    induced: InducedStructure
    trees: TreeDescriptionList
    zero_tree: int
    transient: dict[int, TransientCosetData]
    periodic: dict[int, PeriodicCosetData]

    def tree_key(self, n: int) -> bytes:
        return self.trees.canonical_key(n)


def _theta_sign(u: int, h: int, H: int) -> bool:
    """Truth value of theta_{i,u} at a point of h-value h (H = periodic)."""
    return h == H or u <= h


def _xi(k: int, H: int) -> SignTuple:
    return tuple(u <= k for u in range(1, H + 1))


def _transient_tree_pairs(reg_blocks: dict[int, dict[SignTuple, int]],
                          preimages: list[int],
                          ind: InducedStructure,
                          partitions: dict[int, ArithmeticPartition],
                          outer_signs: SignTuple) -> list[tuple[int, int]]:
    """(tree index, count) pairs contributed by transient pre-image cosets.

    outer_signs concatenates one segment per pre-image coset j, each of
    length len(P_j) + 1, addressing the block of the lifted partition.
    """
    pairs: list[tuple[int, int]] = []
    off = 0
    for j in preimages:
        Pj = partitions[j]
        seg = outer_signs[off: off + len(Pj) + 1]
        off += len(Pj) + 1
        Aj = ind.maps[j]
        for nu, tree_idx in reg_blocks[j].items():
            c = distribution_number(Pj, Aj, nu, seg)
            if c:
                pairs.append((tree_idx, c))
    assert off == len(outer_signs)
    return pairs


def build_register(mapping: CyclotomicMapping,
                   sign_cap: int = DEFAULT_SIGN_CAP) -> PartitionTreeRegister:
    """Partition-tree register: per-coset arithmetic partitions plus the
    deduplicated tree list and block-to-tree sign maps.

    Transient cosets are lifted layer by layer; the zero tree uses the
    constant-zero map; periodic cosets recurse on the h-value with
    distribution numbers counting pre-images per block.  Raises
    CapExceeded when a sign tuple would need more than `sign_cap` bits.
    """
    ind = induce(mapping)
    d, s = ind.d, ind.s
    tl = TreeDescriptionList()
    fbar = ind.fbar
    transient_set = ind.transient_indices()

    # --- transient cosets, by height in the fbar tree --------------------
    preimages: dict[int, list[int]] = {i: [] for i in range(d + 1)}
    for i in range(d):
        preimages[fbar[i]].append(i)
    height: dict[int, int] = {}

    def t_height(i: int) -> int:
        if i not in height:
            height[i] = 1 + max((t_height(j) for j in preimages[i]), default=-1)
        return height[i]

    transient: dict[int, TransientCosetData] = {}
    t_parts: dict[int, ArithmeticPartition] = {}
    t_blocks: dict[int, dict[SignTuple, int]] = {}
    for i in sorted(transient_set, key=t_height):
        pres = preimages[i]
        if not pres:
            P = trivial_partition(s)
            blocks = {(): 0}
        else:
            P = wedge(*(lift(t_parts[j], ind.maps[j]) for j in pres))
            if len(P) > sign_cap:
                raise CapExceeded(
                    f"partition for coset {i} needs {len(P)} sign bits (cap {sign_cap})")
            blocks = {}
            for nu in parts.nonempty_blocks(P):
                pairs = _transient_tree_pairs(t_blocks, pres, ind, t_parts, nu)
                blocks[nu] = tl.insert(pairs)
        t_parts[i] = P
        t_blocks[i] = blocks
        transient[i] = TransientCosetData(P, blocks)

    # --- the zero vertex --------------------------------------------------
    zero_map = AffineMap(s, 0, 0)
    zero_pairs: Counter = Counter()
    for j in ind.zero_branches():
        Pj = t_parts[j]
        for nu, tree_idx in t_blocks[j].items():
            c = distribution_number(Pj, zero_map, nu, (True,) * (len(Pj) + 1))
            if c:
                zero_pairs[tree_idx] += c
    zero_tree = tl.insert(sorted(zero_pairs.items()))

    # --- periodic cosets ---------------------------------------------------
    periodic: dict[int, PeriodicCosetData] = {}
    for cycle in ind.fbar_cycles():
        ell = len(cycle)
        heights, H = compute_H(ind, cycle)
        amaps = cycle_maps(ind, cycle)

        # theta congruences per coset: compose going backward around the cycle
        thetas: list[list[parts.Congruence]] = [[] for _ in range(ell)]
        for t in range(ell):
            A = affine.identity(s)
            for u in range(1, H + 1):
                A = affine.compose(amaps[(t - u) % ell], A)
                thetas[t].append(parts.Congruence(math.gcd(A.a, s), A.b))
        U = [ArithmeticPartition(s, tuple(th)) for th in thetas]

        # R_i and the pushed layers X_{i,h}
        R: list[ArithmeticPartition] = []
        for t in range(ell):
            pres = [j for j in preimages[cycle[t]] if j in transient]
            R.append(wedge(*(lift(t_parts[j], ind.maps[j]) for j in pres))
                     if pres else trivial_partition(s))
        layers: list[list[ArithmeticPartition]] = [[R[t]] for t in range(ell)]
        for h in range(1, H + 1):
            for t in range(ell):
                prev = (t - 1) % ell
                layers[t].append(lambda_push(layers[prev][h - 1], amaps[prev]))

        for t in range(ell):
            total_bits = sum(len(p) for p in layers[t]) + H
            if total_bits > sign_cap:
                raise CapExceeded(
                    f"partition for coset {cycle[t]} needs {total_bits} sign bits "
                    f"(cap {sign_cap})")

        # nonempty blocks per (coset, h), via one scan of Z/sZ per coset
        seen: list[list[dict[SignTuple, None]]] = []
        for t in range(ell):
            Pfull = wedge(*layers[t], U[t])
            mat = sign_matrix(Pfull)
            nX = sum(len(p) for p in layers[t])
            lengths = [len(p) for p in layers[t]]
            per_h: list[dict[SignTuple, None]] = [dict() for _ in range(H + 1)]
            for row in mat:
                u_part = row[nX:]
                h = int(u_part.sum())
                assert all(bool(u_part[u]) == (u < h) for u in range(H)), \
                    "theta signs are not prefix-shaped"
                upto = sum(lengths[: h + 1])
                per_h[h].setdefault(tuple(bool(v) for v in row[:upto]))
            seen.append(per_h)

        blocks: list[list[dict[SignTuple, int]]] = [[{} for _ in range(H + 1)]
                                                    for _ in range(ell)]
        q_parts = [[wedge(*layers[t][: k + 1], U[t]) for k in range(H + 1)]
                   for t in range(ell)]
        for h in range(H + 1):
            theta_tail = (tuple(_theta_sign(u, h, H) for u in range(2, H + 2))
                          + (_theta_sign(1, h, H),))
            for t in range(ell):
                i = cycle[t]
                prev = (t - 1) % ell
                pres = [j for j in preimages[i] if j in transient]
                lengths = [len(p) for p in layers[t]]
                for nu in sorted(seen[t][h],
                                 key=lambda tt: tuple(0 if x else 1 for x in tt)):
                    o0 = nu[:lengths[0]]
                    pairs: Counter = Counter()
                    for n, c in _transient_tree_pairs(t_blocks, pres, ind,
                                                      t_parts, o0):
                        pairs[n] += c
                    # pre-images of h-value k in the previous coset
                    for k in range(h):
                        shifted = nu[lengths[0]: sum(lengths[: k + 2])]
                        nu_prime = shifted + theta_tail
                        for inner, tree_idx in blocks[prev][k].items():
                            c = distribution_number(
                                q_parts[prev][k], amaps[prev],
                                inner + _xi(k, H), nu_prime)
                            if c:
                                pairs[tree_idx] += c
                    blocks[t][h][nu] = tl.insert(sorted(pairs.items()))

        for t in range(ell):
            periodic[cycle[t]] = PeriodicCosetData(
                cycle=tuple(cycle), pos=t, H=H, height=heights[t],
                thetas=U[t], layers=tuple(layers[t]), blocks=blocks[t])

    return PartitionTreeRegister(mapping, ind, tl, zero_tree, transient, periodic)


def tree_of_vertex(reg: PartitionTreeRegister, x: Vertex) -> int:
    """Register tree index of Tree(x), via block lookup."""
    if x is None:
        return reg.zero_tree
    ind = reg.induced
    i, z = vertex_coset(ind, x)
    if i in reg.transient:
        data = reg.transient[i]
        return data.blocks[block_of(data.partition, z)]
    data = reg.periodic[i]
    u_signs = block_of(data.thetas, z)
    h = sum(u_signs)
    assert u_signs == _xi(h, data.H)
    lengths = data.layer_lengths()
    nu = ()
    for k in range(h + 1):
        nu += block_of(data.layers[k], z)
    return data.blocks[h][nu]


def vertex_h_value(reg: PartitionTreeRegister, x: int) -> int:
    """h-value of a nonzero vertex in a periodic coset (its U-block index)."""
    ind = reg.induced
    i, z = vertex_coset(ind, x)
    data = reg.periodic[i]
    return sum(block_of(data.thetas, z))


@dataclass(frozen=True)
class ComponentNecklace:
    """Cyclic tree-index sequence at minimal period and rotation."""

    beads: tuple[int, ...]
    length: int
    multiplicity: int = 1


def component_necklace(reg: PartitionTreeRegister, r: Vertex, l: int,
                       enum_cap: int = DEFAULT_ENUM_CAP) -> ComponentNecklace:
    """Necklace of the component containing the periodic vertex r.

    Short cycles are walked directly; long ones go through affine discrete
    logs per spanning congruence (constant congruences classified as
    always-false by the periodic-part residue, always-true, or
    unreachable; the rest contribute a congruence on the step count).
    """
    ind = reg.induced
    if r is None:
        if l != 1:
            raise ValueError("the zero vertex has cycle length 1")
        return ComponentNecklace((reg.zero_tree,), 1)
    if l <= enum_cap:
        seq = []
        x: Vertex = r
        for step in range(l):
            seq.append(tree_of_vertex(reg, x))
            x = step_exponent(ind, x)
            if x is None or (x == r and step != l - 1):
                raise ValueError("representative does not have exact cycle length l")
        if x != r:
            raise ValueError("wrong cycle length for representative")
        beads, _ = canonical_necklace(seq)
        return ComponentNecklace(beads, l)
    return _necklace_by_dlog(reg, r, l)


def _necklace_by_dlog(reg: PartitionTreeRegister, r: int, l: int) -> ComponentNecklace:
    ind = reg.induced
    s = ind.s
    i0, z0 = vertex_coset(ind, r)
    data0 = reg.periodic[i0]
    cycle, ell = data0.cycle, len(data0.cycle)
    if l % ell != 0:
        raise ValueError("cycle length must be a multiple of the coset cycle length")
    amaps = cycle_maps(ind, cycle)
    # per position t: the point of the cycle in that coset, and its return map
    zs = [0] * ell
    pos0 = data0.pos
    zs[pos0] = z0
    for j in range(1, ell):
        t = (pos0 + j) % ell
        zs[t] = amaps[(t - 1) % ell](zs[(t - 1) % ell])
    bead_fns = []
    for t in range(ell):
        A = cycle_return_map(ind, cycle, t)
        data = reg.periodic[cycle[t]]
        P = data.full_partition()
        s2 = 1  # stable part of s under powers of A.a
        for p, v in numtheory.factorize(s).factors:
            if A.a % p == 0:
                s2 *= p ** v
        fpt = affine.periodic_point_congruence(A)[0] if s2 > 1 else 0
        constant: dict[int, bool] = {}
        active: dict[int, tuple[int, int]] = {}  # j -> (step residue, step modulus)
        for j, c in enumerate(P.congruences):
            a2 = math.gcd(c.modulus, s2)
            a1 = c.modulus // a2
            if s2 > 1 and fpt % a2 != c.residue % a2:
                constant[j] = False          # type I: misses the periodic class
                continue
            if a1 == 1:
                constant[j] = True           # type II: pinned by the periodic class
                continue
            A1 = AffineMap(a1, A.a, A.b)
            lg = affine.affine_dlog(A1, zs[t] % a1, c.residue % a1)
            if lg is None:
                constant[j] = False          # type III: not on the reduced cycle
                continue
            active[j] = (lg, affine.affine_cycle_length(A1, zs[t] % a1))
        period = 1
        for _, cl in active.values():
            period = math.lcm(period, cl)
        lengths = data.layer_lengths()
        nX = sum(lengths)
        lookup = []
        for y in range(period):
            nu = tuple(
                constant[j] if j in constant else y % active[j][1] == active[j][0]
                for j in range(len(P.congruences)))
            h = sum(nu[nX:])
            nu_h = nu[: sum(lengths[: h + 1])]
            lookup.append(data.blocks[h][nu_h])
        bead_fns.append((period, lookup))
    # the bead sequence repeats with period ell * lcm(step periods) | l
    full_period = ell
    for period, _ in bead_fns:
        full_period = math.lcm(full_period, ell * period)
    assert l % full_period == 0
    seq = []
    for n in range(full_period):
        tt = (pos0 + n) % ell
        period, lookup = bead_fns[tt]
        seq.append(lookup[(n // ell) % period])
    beads, _ = canonical_necklace(seq)
    return ComponentNecklace(beads, l)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------


@dataclass
class BruteGraph:
    """Explicit functional graph with per-vertex canonical tree keys."""

    mapping: CyclotomicMapping
    succ: np.ndarray                 # vertex -> successor (zero element = q-1)
    periodic: np.ndarray             # bool per vertex
    tree_key: list[bytes]            # canonical rooted-tree key per vertex
    tree_size: list[int]
    cycles: list[list[int]]          # each cycle as a vertex list

    @property
    def zero_id(self) -> int:
        return self.mapping.q - 1

    def vertex_label(self, v: int) -> Vertex:
        return None if v == self.zero_id else v

    def crl(self) -> list[tuple[Vertex, int]]:
        return [(self.vertex_label(c[0]), len(c)) for c in self.cycles]

    def crl_census(self) -> Counter:
        return Counter(len(c) for c in self.cycles)

    def components(self) -> Counter:
        """Multiset of (canonical key-bead necklace, cycle length)."""
        out: Counter = Counter()
        for cyc in self.cycles:
            beads, length = canonical_necklace([self.tree_key[v] for v in cyc])
            out[(beads, length)] += 1
        return out


def brute_graph(mapping: CyclotomicMapping,
                oracle_cap: int = DEFAULT_ORACLE_CAP) -> BruteGraph:
    """Successor array over all q vertices plus reverse-BFS AHU tree keys."""
    q = mapping.q
    if q > oracle_cap:
        raise CapExceeded(f"oracle supports q <= {oracle_cap}, got {q}")
    ind = induce(mapping)
    d = mapping.d
    zid = q - 1
    ks = np.arange(q - 1, dtype=np.int64)
    succ = np.empty(q, dtype=np.int64)
    for i, (e, r) in enumerate(mapping.branches):
        sel = ks[ks % d == i]
        succ[sel] = zid if e is None else (e + r * sel) % (q - 1)
    succ[zid] = zid

    indeg = np.zeros(q, dtype=np.int64)
    np.add.at(indeg, succ, 1)
    order = deque(np.flatnonzero(indeg == 0).tolist())
    preim: list[list[int]] = [[] for _ in range(q)]
    for v in range(q):
        preim[succ[v]].append(v)
    periodic = np.ones(q, dtype=bool)
    peel: list[int] = []
    indeg_work = indeg.copy()
    while order:
        v = order.popleft()
        periodic[v] = False
        peel.append(v)
        w = succ[v]
        indeg_work[w] -= 1
        if indeg_work[w] == 0:
            order.append(int(w))

    tree_key: list[bytes] = [b""] * q
    tree_size = [1] * q
    for v in peel:
        tree_key[v], tree_size[v] = _ahu_key(
            [(tree_key[u], tree_size[u]) for u in preim[v] if not periodic[u]])
    for v in np.flatnonzero(periodic):
        tree_key[v], tree_size[v] = _ahu_key(
            [(tree_key[u], tree_size[u]) for u in preim[v] if not periodic[u]])

    visited = np.zeros(q, dtype=bool)
    cycles = []
    for v in range(q):
        if periodic[v] and not visited[v]:
            cyc = [v]
            visited[v] = True
            w = int(succ[v])
            while w != v:
                cyc.append(w)
                visited[w] = True
                w = int(succ[w])
            cycles.append(cyc)
    return BruteGraph(mapping, succ, periodic, tree_key, tree_size, cycles)


def _ahu_key(children: list[tuple[bytes, int]]) -> tuple[bytes, int]:
    """Canonical key from child (key, size) pairs, matching the compact
    tree-description key format."""
    if not children:
        return b"()", 1
    counts: dict[bytes, int] = {}
    size = 1
    for key, sz in children:
        counts[key] = counts.get(key, 0) + 1
        size += sz
    body = b"".join(key + b"x%d" % k for key, k in sorted(counts.items()))
    return b"(" + body + b")", size


def register_components(reg: PartitionTreeRegister,
                        max_cycles: Optional[int] = DEFAULT_CYCLE_CAP,
                        enum_cap: int = DEFAULT_ENUM_CAP) -> Counter:
    """Component census from the register pipeline, keyed like
    BruteGraph.components() (canonical tree keys as beads)."""
    out: Counter = Counter()
    for r, l in crl_list(reg.mapping, max_cycles=max_cycles):
        neck = component_necklace(reg, r, l, enum_cap=enum_cap)
        beads = tuple(reg.tree_key(n) for n in neck.beads)
        beads, _ = canonical_necklace(beads)
        out[(beads, l)] += 1
    return out


# ---------------------------------------------------------------------------
# Parsing and rendering
# ---------------------------------------------------------------------------


def parse_coefficient(text: str, ctx: FieldContext) -> Optional[int]:
    """'0' -> zero branch, 'w^k' -> exponent k, else a field-element literal."""
    text = text.strip()
    if text in ("0", "0F"):
        return None
    if text.startswith("w^"):
        try:
            return int(text[2:]) % (ctx.q - 1)
        except ValueError as exc:
            raise MappingFormatError(f"bad coefficient {text!r}") from exc
    if text == "w":
        return 1
    coeffs = parse_poly(text, ctx.p)
    if len(coeffs) > ctx.n:
        raise MappingFormatError(f"coefficient {text!r} has degree >= n")
    elem: Element = tuple(coeffs) + (0,) * (ctx.n - len(coeffs))
    if elem == ctx.zero():
        return None
    return field_dlog(ctx, elem)


def parse_mapping(text: str) -> CyclotomicMapping:
    """Parse the mapping spec format (q=, optional p=/n=/poly=, d=, branches)."""
    q = p = n = d = None
    poly = None
    branch_lines: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("q="):
                q = int(line[2:])
            elif line.startswith("p="):
                fields = dict(tok.split("=", 1) for tok in line.split())
                p = int(fields["p"])
                n = int(fields["n"])
                poly = fields.get("poly")
            elif line.startswith("d="):
                d = int(line[2:])
            elif line.startswith("branch"):
                head, rest = line.split(":", 1)
                idx = int(head.split()[1])
                branch_lines[idx] = rest.strip()
            else:
                raise MappingFormatError(f"unrecognized line: {raw!r}")
        except (ValueError, KeyError, IndexError) as exc:
            raise MappingFormatError(f"line {lineno}: cannot parse {raw!r}") from exc
    if q is None:
        raise MappingFormatError("missing q=")
    if d is None:
        raise MappingFormatError("missing d=")
    if p is None:
        fact = numtheory.factorize(q).factors
        if len(fact) != 1:
            raise MappingFormatError(f"q = {q} is not a prime power")
        p, n = fact[0]
    if p ** n != q:
        raise MappingFormatError(f"q = {q} is not {p}^{n}")
    ctx = make_field(p, n, parse_poly(poly, p) if poly else None)
    if (q - 1) % d != 0:
        raise MappingFormatError(f"index {d} does not divide q-1 = {q - 1}")
    branches = []
    for i in range(d):
        if i not in branch_lines:
            raise MappingFormatError(f"missing branch {i}")
        fields = [tok.strip() for tok in branch_lines[i].split(",")]
        spec = dict(tok.split("=", 1) for tok in fields)
        e = parse_coefficient(spec["a"], ctx)
        r = int(spec["r"]) % (q - 1)
        branches.append((e, r))
    return CyclotomicMapping(ctx, d, tuple(branches))


def render_mapping(mapping: CyclotomicMapping) -> str:
    ctx = mapping.field
    lines = [f"q={ctx.q}"]
    if ctx.n > 1:
        lines.append(f"p={ctx.p} n={ctx.n} poly={render_poly(ctx.modulus)}")
    lines.append(f"d={mapping.d}")
    for i, (e, r) in enumerate(mapping.branches):
        coeff = "0" if e is None else f"w^{e}"
        lines.append(f"branch {i}: a={coeff}, r={r}")
    return "\n".join(lines) + "\n"


def vertex_name(v: Vertex) -> str:
    return "0F" if v is None else f"w^{v}"


def parse_vertex(text: str, q: int) -> Vertex:
    text = text.strip()
    if text == "0F":
        return None
    if text.startswith("w^"):
        return int(text[2:]) % (q - 1)
    raise MappingFormatError(f"bad vertex {text!r} (want w^<k> or 0F)")


def dot_export(mapping: CyclotomicMapping, cap: int = 4096) -> str:
    """Deterministic DOT rendering of the functional graph."""
    if mapping.q > cap:
        raise CapExceeded(f"dot export supports q <= {cap}")
    ind = induce(mapping)
    lines = ["digraph cyclomap {"]
    for k in range(mapping.q - 1):
        lines.append(f'  "{vertex_name(k)}" -> "{vertex_name(step_exponent(ind, k))}";')
    lines.append('  "0F" -> "0F";')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Random mapping generation (for the oracle suites)
# ---------------------------------------------------------------------------


def prime_powers_upto(limit: int) -> list[int]:
    out = []
    for q in range(2, limit + 1):
        f = numtheory.factorize(q).factors
        if len(f) == 1:
            out.append(q)
    return out


_FIELD_CACHE: dict[int, FieldContext] = {}


def field_for(q: int) -> FieldContext:
    ctx = _FIELD_CACHE.get(q)
    if ctx is None:
        p, n = numtheory.factorize(q).factors[0]
        ctx = _FIELD_CACHE[q] = make_field(p, n)
    return ctx


def random_mapping(rng, max_q: int = 1024, max_d: int = 8,
                   zero_prob: float = 0.125,
                   qs: Optional[list[int]] = None) -> CyclotomicMapping:
    """Seeded random mapping: prime-power q, d | q-1 with d <= max_d,
    uniform coefficients/exponents, zero coefficients with zero_prob."""
    if qs is None:
        qs = [q for q in prime_powers_upto(max_q) if q > 2]
    q = rng.choice(qs)
    ds = [dd for dd in numtheory.divisors(q - 1) if dd <= max_d]
    d = rng.choice(ds)
    branches = []
    for _ in range(d):
        e = None if rng.random() < zero_prob else rng.randrange(q - 1)
        branches.append((e, rng.randrange(q - 1)))
    return CyclotomicMapping(field_for(q), d, tuple(branches))
