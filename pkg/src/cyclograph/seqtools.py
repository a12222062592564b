"""Periods and canonical rotations of finite sequences."""

from __future__ import annotations

from typing import Sequence

from cyclograph import numtheory


def minperl(seq: Sequence) -> int:
    """Smallest divisor m of len(seq) with seq = its length-m prefix repeated.

    Per-prime binary descent on the factorization of the length: for each
    prime p of n, the exponent of p in the answer is the least one keeping
    the corresponding divisor a period.
    """
    n = len(seq)
    if n == 0:
        raise ValueError("minperl of an empty sequence")

    def is_period(m: int) -> bool:
        return all(seq[i] == seq[i % m] for i in range(m, n))

    out = n
    for p, v in numtheory.factorize(n).factors:
        while out % p == 0 and is_period(out // p):
            out //= p
    return out


def least_rotation(seq: Sequence) -> tuple:
    """Lexicographically minimal rotation (Booth's algorithm)."""
    s = tuple(seq)
    n = len(s)
    if n == 0:
        return s
    doubled = s + s
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = doubled[j]
        i = f[j - k - 1]
        while i != -1 and sj != doubled[k + i + 1]:
            if sj < doubled[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != doubled[k + i + 1]:
            if sj < doubled[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return doubled[k:k + n]


def canonical_necklace(seq: Sequence) -> tuple[tuple, int]:
    """(minimal rotation of the minimal period, full length)."""
    p = minperl(seq)
    return least_rotation(tuple(seq)[:p]), len(seq)
