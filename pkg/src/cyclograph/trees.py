"""Rooted-tree isomorphism types via recursive compact descriptions.

A description is a sorted tuple of (child index, multiplicity) pairs; the
indices point at strictly earlier entries of an append-only list whose
entries have pairwise distinct isomorphism types.  Expanding a
description attaches `multiplicity` copies of each child tree to a fresh
root, so sizes and heights follow a weighted recursion and are never
materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

TreeDescription = tuple[tuple[int, int], ...]

EXPAND_VERTEX_CAP = 10 ** 6


@dataclass
class TreeDescriptionList:
    """Append-only deduplicated list of tree descriptions; entry 0 is trivial.

    Mutation is single-writer; reads are safe concurrently with no writer.
    """

    entries: list[TreeDescription] = field(default_factory=list)
    _keys: list[bytes] = field(default_factory=list)
    _key_index: dict[bytes, int] = field(default_factory=dict)
    _sizes: list[int] = field(default_factory=list)
    _heights: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.entries:
            self._append(())

    def __len__(self) -> int:
        return len(self.entries)

    def _key_of(self, desc: TreeDescription) -> bytes:
        """Depth-first encoding with child keys sorted; injective per
        isomorphism type because stored entries are already deduplicated."""
        if not desc:
            return b"()"
        parts = sorted(((self._keys[m], k) for m, k in desc))
        return b"(" + b"".join(key + b"x%d" % k for key, k in parts) + b")"

    def _append(self, desc: TreeDescription) -> int:
        key = self._key_of(desc)
        if desc:
            size = 1 + sum(k * self._sizes[m] for m, k in desc)
            height = 1 + max(self._heights[m] for m, _ in desc)
        else:
            size, height = 1, 0
        idx = len(self.entries)
        self.entries.append(desc)
        self._keys.append(key)
        self._key_index[key] = idx
        self._sizes.append(size)
        self._heights.append(height)
        return idx

    def insert(self, raw: Sequence[tuple[int, int]]) -> int:
        """Normalize raw (index, multiplicity) pairs, dedupe, return the index."""
        merged: dict[int, int] = {}
        for m, k in raw:
            if not 0 <= m < len(self.entries):
                raise IndexError(f"child index {m} out of range")
            if k < 0:
                raise ValueError("negative multiplicity")
            if k:
                merged[m] = merged.get(m, 0) + k
        desc = tuple(sorted(merged.items()))
        hit = self._key_index.get(self._key_of(desc))
        if hit is not None:
            return hit
        return self._append(desc)

    # -- queries ------------------------------------------------------------

    def canonical_key(self, n: int) -> bytes:
        """Equal keys iff the expanded rooted trees are isomorphic."""
        return self._keys[n]

    def size(self, n: int) -> int:
        """|V(Expand(tree n))|, computed arithmetically (never materialized)."""
        return self._sizes[n]

    def height(self, n: int) -> int:
        return self._heights[n]

    def render(self, n: int) -> str:
        """`T<n> = k1*T<m1> + ...`, or `T<n> = .` for the trivial tree."""
        desc = self.entries[n]
        if not desc:
            return f"T{n} = ."
        body = " + ".join(f"{k}*T{m}" for m, k in desc)
        return f"T{n} = {body}"

    # -- constructions ------------------------------------------------------

    def tree_sum(self, parts: Sequence[tuple[int, int]]) -> int:
        """Glue multiples of existing trees at a common root... the roots of
        the parts are merged, so children multisets are added."""
        merged: dict[int, int] = {}
        for n, mult in parts:
            for m, k in self.entries[n]:
                merged[m] = merged.get(m, 0) + k * mult
        return self.insert(tuple(merged.items()))

    def graft(self, n: int) -> int:
        """The + operation: hang tree n below a new root."""
        return self.insert(((n, 1),))


def expand_size(lst: TreeDescriptionList, n: int) -> int:
    return lst.size(n)


def expand_height(lst: TreeDescriptionList, n: int) -> int:
    return lst.height(n)


def canonical_key(lst: TreeDescriptionList, n: int) -> bytes:
    return lst.canonical_key(n)


def insert_tree(lst: TreeDescriptionList, raw: Sequence[tuple[int, int]]) -> int:
    return lst.insert(raw)


def tree_sum(lst: TreeDescriptionList, parts: Sequence[tuple[int, int]]) -> int:
    return lst.tree_sum(parts)


def tree_graft(lst: TreeDescriptionList, n: int) -> int:
    return lst.graft(n)


def rigid_tree(procs: Sequence[int], lst: TreeDescriptionList) -> int:
    """Tree above a periodic vertex of a graph with rigid procreation.

    procs[k-1] is the k-th procreation number of a periodic vertex in the
    dual graph; the sequence must be non-increasing and reach 1.  Builds
    the ladder of weighted trees (transient levels weight the last child
    by proc_h, the periodic level by proc_H - 1) and returns the top.
    """
    procs = list(procs)
    if any(p < 1 for p in procs):
        raise ValueError("procreation numbers must be >= 1")
    if any(procs[i] < procs[i + 1] for i in range(len(procs) - 1)):
        raise ValueError("procreation numbers must be non-increasing")
    if not procs or procs[-1] != 1:
        procs.append(1)
    H = 0
    while H < len(procs) and procs[H] > 1:
        H += 1
    def proc(k: int) -> int:  # 1-based, constant 1 beyond the listed range
        return procs[k - 1] if k <= len(procs) else 1
    level = [0]  # level[h] = index of the transient-form tree at height h
    for h in range(1, H):
        pairs = [(level[k], proc(k + 1) - proc(k + 2)) for k in range(h - 1)]
        pairs.append((level[h - 1], proc(h)))
        level.append(lst.insert(pairs))
    pairs = [(level[k], proc(k + 1) - proc(k + 2)) for k in range(H)]
    return lst.insert(pairs)


@dataclass(frozen=True)
class CosetCycleTrees:
    """Per-coset tree data for the periodic part of a coset cycle."""

    heights: tuple[int, ...]            # common periodic-tree height per coset
    max_height: int                     # H = max over the cycle
    index: dict[tuple[int, int], int]   # (coset position t, h-value) -> tree index


def coset_procreation(alphas: Sequence[int], s: int, t: int, k: int) -> int:
    """k-th procreation number of a periodic vertex in coset t of the cycle.

    gcd of the product of the k linear coefficients feeding coset t with s,
    divided by the same gcd taken without the latest of those maps.
    """
    ell = len(alphas)
    prod_all = 1
    for j in range(1, k + 1):
        prod_all = prod_all * alphas[(t - j) % ell] % s if s > 1 else 0
    prod_early = 1
    for j in range(2, k + 1):
        prod_early = prod_early * alphas[(t - j) % ell] % s if s > 1 else 0
    if s == 1:
        return 1
    return math.gcd(prod_all, s) // math.gcd(prod_early, s)


def coset_heights(alphas: Sequence[int], s: int) -> tuple[list[int], int]:
    """Per-coset periodic tree heights and their maximum H."""
    ell = len(alphas)
    heights = []
    for t in range(ell):
        k = 1
        while coset_procreation(alphas, s, t, k) != 1:
            k += 1
        heights.append(k - 1)
    return heights, max(heights)


def coset_cycle_trees(alphas: Sequence[int], s: int,
                      lst: TreeDescriptionList) -> CosetCycleTrees:
    """Trees above vertices of the periodic coset union, by coset and h-value.

    For h < H the transient form attaches the previous coset's level-(h-1)
    tree with weight proc_h; at h = H the periodic form uses the
    difference weights throughout, at the coset's own height.
    """
    ell = len(alphas)
    heights, H = coset_heights(alphas, s)
    procs = {(t, k): coset_procreation(alphas, s, t, k)
             for t in range(ell) for k in range(1, H + 2)}
    index: dict[tuple[int, int], int] = {(t, 0): 0 for t in range(ell)}
    for h in range(1, H):
        for t in range(ell):
            prev = (t - 1) % ell
            pairs = [(index[(prev, k)], procs[(t, k + 1)] - procs[(t, k + 2)])
                     for k in range(h - 1)]
            pairs.append((index[(prev, h - 1)], procs[(t, h)]))
            index[(t, h)] = lst.insert(pairs)
    for t in range(ell):
        prev = (t - 1) % ell
        hc = heights[t]
        pairs = [(index[(prev, k)], procs[(t, k + 1)] - procs[(t, k + 2)])
                 for k in range(hc)]
        index[(t, H)] = lst.insert(pairs)
    return CosetCycleTrees(tuple(heights), H, index)


def synchronize(base: TreeDescriptionList, other: TreeDescriptionList,
                ) -> tuple[TreeDescriptionList, dict[int, int]]:
    """Merge `other` into a copy of `base`; returns (merged, index map).

    The merged list has `base` as an initial segment, and translation[n]
    is the merged index of other's tree n.
    """
    merged = TreeDescriptionList()
    for desc in base.entries[1:]:
        merged.insert(desc)
    assert merged.entries == base.entries
    translation: dict[int, int] = {}
    for n, desc in enumerate(other.entries):
        translated = tuple((translation[m], k) for m, k in desc)
        translation[n] = merged.insert(translated)
    return merged, translation


def expand_edges(lst: TreeDescriptionList, n: int,
                 cap: int = EXPAND_VERTEX_CAP) -> list[tuple[int, int]]:
    """Materialize Expand(tree n) as parent arcs (child -> parent), root = 0.

    Only used by tests and small renderings; refuses trees above the cap.
    """
    if lst.size(n) > cap:
        raise ValueError(f"tree of {lst.size(n)} vertices exceeds the cap {cap}")
    edges: list[tuple[int, int]] = []
    counter = [0]

    def build(idx: int, parent: Optional[int]) -> None:
        me = counter[0]
        counter[0] += 1
        if parent is not None:
            edges.append((me, parent))
        for m, k in lst.entries[idx]:
            for _ in range(k):
                build(m, me)

    build(n, None)
    return edges
