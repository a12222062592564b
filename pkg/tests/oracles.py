"""Brute-force oracles shared by the test modules.

These deliberately avoid the library's fast paths: cycles are found by
walking successor arrays, trees by bottom-up AHU hashing, necklaces by
rotating explicit sequences.
"""

from __future__ import annotations

from collections import Counter, deque


def affine_succ(m: int, a: int, b: int) -> list[int]:
    return [(a * x + b) % m for x in range(m)]


def graph_structure(succ: list[int]):
    """(periodic flags, preimage lists, peel order) of a functional graph."""
    n = len(succ)
    indeg = [0] * n
    preim: list[list[int]] = [[] for _ in range(n)]
    for x, y in enumerate(succ):
        indeg[y] += 1
        preim[y].append(x)
    queue = deque(x for x in range(n) if indeg[x] == 0)
    periodic = [True] * n
    peel: list[int] = []
    while queue:
        x = queue.popleft()
        periodic[x] = False
        peel.append(x)
        y = succ[x]
        indeg[y] -= 1
        if indeg[y] == 0:
            queue.append(y)
    return periodic, preim, peel


def ahu_keys(succ: list[int]) -> tuple[list[bytes], list[bool]]:
    """Canonical rooted-tree key per vertex, in the package's byte format."""
    periodic, preim, peel = graph_structure(succ)
    n = len(succ)
    key: list[bytes] = [b""] * n

    def mk(children: list[bytes]) -> bytes:
        counts = Counter(children)
        return b"(" + b"".join(k + b"x%d" % c for k, c in sorted(counts.items())) + b")"

    for v in peel:
        key[v] = mk([key[u] for u in preim[v] if not periodic[u]])
    for v in range(n):
        if periodic[v]:
            key[v] = mk([key[u] for u in preim[v] if not periodic[u]])
    return key, periodic


def cycles_of(succ: list[int]) -> list[list[int]]:
    periodic, _, _ = graph_structure(succ)
    out = []
    seen = [False] * len(succ)
    for v in range(len(succ)):
        if periodic[v] and not seen[v]:
            cyc = [v]
            seen[v] = True
            w = succ[v]
            while w != v:
                cyc.append(w)
                seen[w] = True
                w = succ[w]
            out.append(cyc)
    return out


def cycle_census(succ: list[int]) -> Counter:
    return Counter(len(c) for c in cycles_of(succ))


def cycle_ids(succ: list[int]) -> dict[int, int]:
    out = {}
    for k, cyc in enumerate(cycles_of(succ)):
        for v in cyc:
            out[v] = k
    return out


def min_rotation(seq):
    s = tuple(seq)
    return min(s[i:] + s[:i] for i in range(len(s))) if s else s


def brute_minperl(seq) -> int:
    n = len(seq)
    seq = tuple(seq)
    return min(m for m in range(1, n + 1) if n % m == 0 and seq == seq[:m] * (n // m))


def necklace_census(succ: list[int]) -> Counter:
    """Multiset of (canonical tree-key necklace, cycle length)."""
    key, _ = ahu_keys(succ)
    out: Counter = Counter()
    for cyc in cycles_of(succ):
        beads = [key[v] for v in cyc]
        p = brute_minperl(beads)
        out[(min_rotation(beads[:p]), len(cyc))] += 1
    return out


def crl_is_valid(succ: list[int], crl) -> bool:
    """Representatives on pairwise distinct cycles with exact lengths,
    covering every cycle."""
    n = len(succ)
    seen = bytearray(n)
    total = 0
    for r, l in crl:
        if seen[r]:
            return False
        seen[r] = 1
        x = succ[r]
        cnt = 1
        while x != r:
            if seen[x]:
                return False
            seen[x] = 1
            x = succ[x]
            cnt += 1
        if cnt != l:
            return False
        total += l
    periodic, _, _ = graph_structure(succ)
    return total == sum(periodic)
