"""Graph-isomorphism decisions for the tractable special cases.

Index 1 reduces to affine maps of Z/(q-1)Z and Deng-style invariants;
maps whose trees only depend on the coset (all coset maps bijective, or
the induced map a permutation) get typed tree registers and necklace
lists; maps with short cycles get necklace lists through the refined
block partitions.  Everything else is answered 'undecided', with a brute
oracle fallback at small q.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from cyclograph import affine, cyclomap, numtheory, partition as parts, trees
from cyclograph.affine import AffineMap
from cyclograph.cyclomap import CyclotomicMapping, build_register, induce
from cyclograph.errors import CapExceeded
from cyclograph.seqtools import canonical_necklace, least_rotation, minperl
from cyclograph.trees import TreeDescriptionList, synchronize

# (necklace beads at minimal period & rotation, full cycle length) -> count
NecklaceEntry = tuple[tuple[int, ...], int, int]
TreeNecklaceList = list[NecklaceEntry]


# ---------------------------------------------------------------------------
# Index 1: Deng's criterion
# ---------------------------------------------------------------------------


def _deng_signature(A: AffineMap):
    """Invariant tuple characterizing the digraph type of an affine map."""
    m = A.m
    if m == 1:
        return ()
    a, b = A.a, A.b
    fixed_primes = []
    min_lengths = []
    for p, v in numtheory.factorize(m).factors:
        pk = p ** v
        if a % p == 0:
            continue
        if b % math.gcd(a - 1, pk) == 0:
            fixed_primes.append(p)
        min_lengths.append(min(l for _, l in
                               affine.crl_affine_primary(p, v, a % pk, b % pk)))
    l = math.lcm(*min_lengths) if min_lengths else 1
    al = pow(a, l, m)
    orders = tuple(sorted((p, numtheory.mult_order(al % p ** numtheory.nu_p(m, p),
                                                   p ** numtheory.nu_p(m, p)))
                          for p in fixed_primes))
    ord4 = None
    if 2 in fixed_primes and numtheory.nu_p(m, 2) > 1:
        ord4 = numtheory.mult_order(al % 4, 4)
    return (math.gcd(a, m), tuple(sorted(fixed_primes)), l, orders, ord4)


def iso_affine_graphs(A1: AffineMap, A2: AffineMap) -> bool:
    """Whether the functional graphs of two affine maps of Z/mZ are isomorphic."""
    if A1.m != A2.m:
        raise ValueError("common modulus required")
    return _deng_signature(A1) == _deng_signature(A2)


def iso_monomial(q: int, a1_exp: Optional[int], r1: int,
                 a2_exp: Optional[int], r2: int) -> bool:
    """Isomorphism of the graphs of the monomials a x^r (polynomial sense).

    Coefficients are given as omega-exponents (None = 0).  A constant map
    (a = 0 or r = 0) is isomorphic exactly to another constant map;
    otherwise logarithmize to affine maps of Z/(q-1)Z.
    """
    c1 = a1_exp is None or r1 == 0
    c2 = a2_exp is None or r2 == 0
    if c1 or c2:
        return c1 and c2
    return iso_affine_graphs(AffineMap(q - 1, r1, a1_exp),
                             AffineMap(q - 1, r2, a2_exp))


# ---------------------------------------------------------------------------
# Special types I and II
# ---------------------------------------------------------------------------


def is_special_type_I(mapping: CyclotomicMapping) -> bool:
    """Every nonzero branch maps its coset bijectively (gcd(r_i, s) = 1)."""
    ind = induce(mapping)
    return all(A is None or A.is_permutation() for A in ind.maps)


def is_special_type_II(mapping: CyclotomicMapping) -> bool:
    """The induced map permutes {0..d} (no zero branches, fbar injective)."""
    ind = induce(mapping)
    return sorted(ind.fbar) == list(range(mapping.d + 1))


@dataclass
class TypedTreeRegister:
    """Register for maps whose trees only depend on the coset.

    kind 'I': coset_tree[i] for i in 0..d (d = the zero vertex).
    kind 'II': per coset i < d, trees by h-value; periodic trees at h = H.
    """

    kind: str
    trees: TreeDescriptionList
    coset_tree: dict[int, int]                       # type I: i -> tree index
    trans_tree: dict[tuple[int, int], int]           # type II: (i, h) -> index
    per_tree: dict[int, int]                         # type II: i -> index
    zero_tree: int

    def s_sets(self) -> dict[int, tuple]:
        """S_n data per tree index, in the shape of the register kind."""
        out: dict[int, tuple] = {}
        if self.kind == "I":
            groups: dict[int, list[int]] = {}
            for i, n in sorted(self.coset_tree.items()):
                groups.setdefault(n, []).append(i)
            return {n: tuple(v) for n, v in groups.items()}
        for (i, h), n in sorted(self.trans_tree.items()):
            ht, tr, pe = out.get(n, (self.trees.height(n), (), ()))
            out[n] = (ht, tr + (i,), pe)
        for i, n in sorted(self.per_tree.items()):
            ht, tr, pe = out.get(n, (self.trees.height(n), (), ()))
            out[n] = (ht, tr, pe + (i,))
        return out


def tree_register_type_I(mapping: CyclotomicMapping) -> TypedTreeRegister:
    """Trees equal the induced-map trees; the zero tree sums s copies of the
    grafted zero-branch trees."""
    if not is_special_type_I(mapping):
        raise ValueError("mapping is not of special type I")
    ind = induce(mapping)
    d, s = ind.d, ind.s
    tl = TreeDescriptionList()
    periodic = cyclomap._periodic_indices(ind.fbar, d)
    preimages: dict[int, list[int]] = {i: [] for i in range(d + 1)}
    for i in range(d):
        preimages[ind.fbar[i]].append(i)
    height: dict[int, int] = {}

    def h_of(i: int) -> int:
        if i not in height:
            height[i] = 1 + max((h_of(j) for j in preimages[i]
                                 if j not in periodic), default=-1)
        return height[i]

    coset_tree: dict[int, int] = {}
    for i in sorted(range(d + 1), key=h_of):
        pairs: Counter = Counter()
        for j in preimages[i]:
            if j not in periodic:
                pairs[coset_tree[j]] += 1
        scale = s if i == d else 1
        coset_tree[i] = tl.insert([(n, c * scale)
                                   for n, c in sorted(pairs.items())])
    return TypedTreeRegister("I", tl, coset_tree, {}, {}, coset_tree[d])


def tree_register_type_II(mapping: CyclotomicMapping) -> TypedTreeRegister:
    """Coset-cycle trees per h-value across all fbar-cycles."""
    if not is_special_type_II(mapping):
        raise ValueError("mapping is not of special type II")
    ind = induce(mapping)
    tl = TreeDescriptionList()
    trans_tree: dict[tuple[int, int], int] = {}
    per_tree: dict[int, int] = {}
    for cycle in ind.fbar_cycles():
        alphas = [A.a for A in cyclomap.cycle_maps(ind, cycle)]
        cct = trees.coset_cycle_trees(alphas, ind.s, tl)
        for t, i in enumerate(cycle):
            for h in range(cct.max_height):
                trans_tree[(i, h)] = cct.index[(t, h)]
            per_tree[i] = cct.index[(t, cct.max_height)]
    return TypedTreeRegister("II", tl, {}, trans_tree, per_tree, 0)


def typed_register(mapping: CyclotomicMapping) -> TypedTreeRegister:
    if is_special_type_I(mapping):
        return tree_register_type_I(mapping)
    if is_special_type_II(mapping):
        return tree_register_type_II(mapping)
    raise ValueError("mapping is neither of special type I nor II")


def necklace_list_typed(mapping: CyclotomicMapping,
                        register: TypedTreeRegister) -> TreeNecklaceList:
    """Tree necklace list from a typed register.

    Per fbar-cycle, the coset index sequence of periodic trees is repeated
    along every cycle of the return map; the return map's cycle type gives
    the multiplicities.
    """
    ind = induce(mapping)
    entries: Counter = Counter()
    entries[((register.zero_tree,), 1)] += 1
    for cycle in ind.fbar_cycles():
        ell = len(cycle)
        A = cyclomap.cycle_return_map(ind, cycle)
        if register.kind == "I":
            beads_full = tuple(register.coset_tree[i] for i in cycle)
        else:
            beads_full = tuple(register.per_tree[i] for i in cycle)
        p = minperl(beads_full)
        beads = least_rotation(beads_full[:p])
        for l, e in affine.cycle_type(A):
            entries[(beads, ell * l)] += e
    return sorted((beads, l, mult) for (beads, l), mult in entries.items())


# ---------------------------------------------------------------------------
# Bounded cycle lengths
# ---------------------------------------------------------------------------


def max_cycle_length(mapping: CyclotomicMapping) -> int:
    return cyclomap.max_cycle_length(mapping)


def necklace_list_bounded(mapping: CyclotomicMapping, L: int,
                          sign_cap: int = cyclomap.DEFAULT_SIGN_CAP,
                          reg: Optional[cyclomap.PartitionTreeRegister] = None,
                          ) -> TreeNecklaceList:
    """Tree necklace list when every cycle length is at most L.

    Extends the register partitions to Q_{i,H+L-1}, derives the backward
    step functions u from distribution numbers, wedges in the cycle-length
    congruences, and reads one necklace per nonempty periodic block; block
    sizes divided by the points-per-component count give multiplicities.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if cyclomap.max_cycle_length(mapping) > L:
        raise ValueError("mapping has cycles longer than L")
    if reg is None:
        reg = build_register(mapping, sign_cap=sign_cap)
    ind = reg.induced
    s = ind.s
    entries: Counter = Counter()
    entries[((reg.zero_tree,), 1)] += 1
    for cycle in ind.fbar_cycles():
        ell = len(cycle)
        data0 = reg.periodic[cycle[0]]
        H = data0.H
        amaps = cyclomap.cycle_maps(ind, cycle)
        datas = [reg.periodic[i] for i in cycle]
        # layers extended to depth H+L-1 (layers[t][h] lives on coset t)
        ext: list[list[parts.ArithmeticPartition]] = [list(d.layers) for d in datas]
        for h in range(H + 1, H + L):
            for t in range(ell):
                prev = (t - 1) % ell
                ext[t].append(parts.lambda_push(ext[prev][h - 1], amaps[prev]))
        depth = H + L - 1
        for t in range(ell):
            bits = sum(len(p) for p in ext[t][: depth + 1]) + H
            if bits > sign_cap:
                raise CapExceeded(
                    f"bounded path needs {bits} sign bits (cap {sign_cap})")
        q_ext = [parts.wedge(*ext[t][: depth + 1], datas[t].thetas)
                 for t in range(ell)]
        # nonempty periodic blocks of Q_{i_t, H+L-1}, by scan
        xi_top = cyclomap._xi(H, H)
        o_sets: list[list[tuple]] = []
        for t in range(ell):
            mat = parts.sign_matrix(q_ext[t])
            nX = sum(len(p) for p in ext[t][: depth + 1])
            found: dict[tuple, None] = {}
            for row in mat:
                if tuple(bool(v) for v in row[nX:]) == xi_top:
                    found.setdefault(tuple(bool(v) for v in row[:nX]))
            o_sets.append(sorted(found, key=lambda tt: tuple(0 if x else 1 for x in tt)))
        # u maps: tuple at (t, remaining depth dep) -> tuple at (t-1, dep-1)
        theta_tail = (tuple(cyclomap._theta_sign(u, H, H) for u in range(2, H + 2))
                      + (True,))
        u_maps: list[dict[tuple, tuple]] = [dict() for _ in range(ell)]

        def u_apply(t: int, dep: int, tup: tuple) -> tuple:
            """Backward step: block of x (depth dep, coset t) to block of the
            unique periodic pre-image (depth dep-1, coset t-1)."""
            key = (dep, tup)
            hit = u_maps[t].get(key)
            if hit is not None:
                return hit
            prev = (t - 1) % ell
            shifted = tup[len(ext[t][0]):]
            nu_prime = shifted + theta_tail
            Qprev = parts.wedge(*ext[prev][: dep], datas[prev].thetas)
            # candidate target blocks are truncations of full-depth blocks
            cut = sum(len(p) for p in ext[prev][: dep])
            found_tup = None
            seenc: set[tuple] = set()
            for full in o_sets[prev]:
                cand = full[:cut]
                if cand in seenc:
                    continue
                seenc.add(cand)
                sigma = parts.distribution_number(
                    Qprev, amaps[prev], cand + xi_top, nu_prime)
                if sigma == 1:
                    found_tup = cand
                    break
                if sigma != 0:
                    raise AssertionError("backward step is not unique")
            assert found_tup is not None, "periodic pre-image block not found"
            u_maps[t][key] = found_tup
            return found_tup

        # cycle-length congruences on C_{i_0}
        A0 = cyclomap.cycle_return_map(ind, cycle)
        eta: list[tuple[int, parts.Congruence]] = []
        Al = affine.identity(s)
        for l in range(ell, L + 1, ell):
            Al = affine.compose(Al, A0)
            g = math.gcd(s, Al.a - 1)
            if Al.b % g == 0:
                mm = s // g
                res = 0 if mm == 1 else \
                    (-(Al.b // g) * pow((Al.a - 1) // g % mm, -1, mm)) % mm
                eta.append((l, parts.Congruence(mm, res)))
        W = parts.wedge(q_ext[0], parts.ArithmeticPartition(
            s, tuple(c for _, c in eta)))
        cycle_points: Counter = Counter()
        for tup in o_sets[0]:
            for l, _ in eta:
                # points of exact length l satisfy eta_{l'} iff l divides l'
                nu_eta = tuple(lc % l == 0 for lc, _ in eta)
                size = parts.distribution_number(
                    W, parts._zero_map(s),
                    tup + xi_top + nu_eta, (True,) * (len(W) + 1))
                if size == 0:
                    continue
                # backward tree sequence from this block
                beads_rev = []
                cur = tup
                for tback in range(l):
                    t = (-tback) % ell
                    dep = depth - tback
                    data = datas[t]
                    lengths = [len(p) for p in ext[t][: dep + 1]]
                    prefix = cur[: sum(lengths[: H + 1])]
                    beads_rev.append(data.blocks[H][prefix])
                    if tback < l - 1:
                        cur = u_apply(t, dep, cur)
                seq = beads_rev[::-1]  # trees of x^(-l+1) .. x^(0)
                beads, _ = canonical_necklace(seq)
                cycle_points[(beads, l)] += size
        # a component of cycle length l meets the representative coset in
        # l/ell points, so point totals overcount components by that factor
        for (beads, l), points in cycle_points.items():
            assert points * ell % l == 0
            entries[(beads, l)] += points * ell // l
    return sorted((beads, l, mult) for (beads, l), mult in entries.items())


# ---------------------------------------------------------------------------
# The decision procedure
# ---------------------------------------------------------------------------


def _necklace_key_list(lst: TreeNecklaceList, tl: TreeDescriptionList,
                       translation: Optional[dict[int, int]] = None):
    out = []
    for beads, l, mult in lst:
        if translation is not None:
            beads = least_rotation(tuple(translation[b] for b in beads))
        out.append((beads, l, mult))
    return sorted(out)


def mpe_table(K: int) -> tuple[int, float]:
    """(max, average) of mpe(2^v - 1) over 1 <= v <= K (runtime guard at 100)."""
    if not 1 <= K <= 100:
        raise ValueError("mpe_table supports 1 <= K <= 100")
    vals = [numtheory.mpe(2 ** v - 1) for v in range(1, K + 1)]
    return max(vals), sum(vals) / K


@dataclass(frozen=True)
class IsoVerdict:
    isomorphic: Optional[bool]  # None = undecided
    method: str

    def render(self) -> str:
        word = {True: "yes", False: "no", None: "undecided"}[self.isomorphic]
        return f"isomorphic: {word} (method: {self.method})"


def iso_decide(f1: CyclotomicMapping, f2: CyclotomicMapping,
               bounded_cap: int = 16, sign_cap: int = cyclomap.DEFAULT_SIGN_CAP,
               oracle_cap: int = cyclomap.DEFAULT_ORACLE_CAP) -> IsoVerdict:
    """Decide Gamma_{f1} iso Gamma_{f2} where one of the special cases applies."""
    if f1.q != f2.q:
        raise ValueError("mappings must live over the same field size")
    if f1.d == 1 and f2.d == 1:
        (e1, r1), (e2, r2) = f1.branches[0], f2.branches[0]
        # cyclotomic-form maps always fix 0; compare the logarithmized
        # affine maps (r = 0 is the non-unit linear part 0, handled by Deng)
        ok = iso_affine_graphs(AffineMap(f1.q - 1, r1, e1 if e1 is not None else 0),
                               AffineMap(f2.q - 1, r2, e2 if e2 is not None else 0)) \
            if e1 is not None and e2 is not None else (e1 is None) == (e2 is None)
        return IsoVerdict(ok, "monomial")
    types = []
    for f in (f1, f2):
        if is_special_type_I(f):
            types.append("I")
        elif is_special_type_II(f):
            types.append("II")
        else:
            types.append(None)
    if all(types):
        r1 = typed_register(f1)
        r2 = typed_register(f2)
        n1 = necklace_list_typed(f1, r1)
        n2 = necklace_list_typed(f2, r2)
        _, translation = synchronize(r1.trees, r2.trees)
        same = _necklace_key_list(n1, r1.trees) == \
            _necklace_key_list(n2, r2.trees, translation)
        method = "type-I" if types == ["I", "I"] else "type-II"
        return IsoVerdict(same, method)
    L1 = cyclomap.max_cycle_length(f1)
    L2 = cyclomap.max_cycle_length(f2)
    if min(L1, L2) <= bounded_cap:
        if L1 != L2:
            return IsoVerdict(False, f"bounded-{min(L1, L2)}")
        try:
            reg1 = build_register(f1, sign_cap=sign_cap)
            reg2 = build_register(f2, sign_cap=sign_cap)
            n1 = necklace_list_bounded(f1, L1, sign_cap=sign_cap, reg=reg1)
            n2 = necklace_list_bounded(f2, L2, sign_cap=sign_cap, reg=reg2)
            _, translation = synchronize(reg1.trees, reg2.trees)
        except CapExceeded:
            return _oracle_verdict(f1, f2, oracle_cap)
        same = _necklace_key_list(n1, reg1.trees) == \
            _necklace_key_list(n2, reg2.trees, translation)
        return IsoVerdict(same, f"bounded-{L1}")
    return _oracle_verdict(f1, f2, oracle_cap)


def _oracle_verdict(f1, f2, oracle_cap) -> IsoVerdict:
    if f1.q <= oracle_cap:
        same = cyclomap.brute_graph(f1).components() == \
            cyclomap.brute_graph(f2).components()
        return IsoVerdict(same, "oracle")
    return IsoVerdict(None, "undecided")
