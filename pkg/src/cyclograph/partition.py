"""Arithmetic partitions of Z/mZ and the distribution-number calculus.

A partition is carried by its ordered spanning sequence of m-congruences
x = b (mod a) with a | m; blocks are addressed by sign tuples (True for a
satisfied congruence, False for a negated one).  Spanning sequences are
never deduplicated, so sign-tuple lengths always match the standard
recursion lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from cyclograph.affine import AffineMap
from cyclograph.numtheory import crt_combine

SignTuple = tuple[bool, ...]  # True = plain congruence, False = negated


@dataclass(frozen=True)
class Congruence:
    """x = residue (mod modulus), with modulus dividing the ambient m."""

    modulus: int
    residue: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def holds(self, x: int) -> bool:
        return x % self.modulus == self.residue

    def render(self) -> str:
        return f"x={self.residue}({self.modulus})"


@dataclass(frozen=True)
class ArithmeticPartition:
    """Ambient modulus plus an ordered spanning congruence sequence."""

    m: int
    congruences: tuple[Congruence, ...]

    def __post_init__(self):
        for c in self.congruences:
            if self.m % c.modulus != 0:
                raise ValueError(f"congruence modulus {c.modulus} does not divide {self.m}")

    def __len__(self) -> int:
        return len(self.congruences)

    def render(self) -> str:
        body = " & ".join(c.render() for c in self.congruences)
        return f"P(mod {self.m}): {body}" if body else f"P(mod {self.m}):"


def trivial_partition(m: int) -> ArithmeticPartition:
    return ArithmeticPartition(m, ())


def partition_of(m: int, congs: Iterable[tuple[int, int]]) -> ArithmeticPartition:
    """Build from (modulus, residue) pairs."""
    return ArithmeticPartition(m, tuple(Congruence(a, b) for a, b in congs))


def block_of(P: ArithmeticPartition, x: int) -> SignTuple:
    """Sign tuple of the block containing x."""
    return tuple(c.holds(x % P.m) for c in P.congruences)


def wedge(*parts: ArithmeticPartition) -> ArithmeticPartition:
    """Infimum: concatenate spanning sequences (all over the same m)."""
    if not parts:
        raise ValueError("wedge needs at least one partition")
    m = parts[0].m
    if any(p.m != m for p in parts):
        raise ValueError("modulus mismatch in wedge")
    congs: tuple[Congruence, ...] = ()
    for p in parts:
        congs = congs + p.congruences
    return ArithmeticPartition(m, congs)


def lift(P: ArithmeticPartition, A: AffineMap) -> ArithmeticPartition:
    """The forward partition P'(P, A), spanning length len(P) + 1.

    Congruence j becomes x = a*b_j + b (mod gcd(a*a_j, m)); a final
    x = b (mod gcd(a, m)) records membership in the image of A.
    """
    if A.m != P.m:
        raise ValueError("modulus mismatch")
    m = P.m
    congs = [Congruence(math.gcd(A.a * c.modulus, m), A.a * c.residue + A.b)
             for c in P.congruences]
    congs.append(Congruence(math.gcd(A.a, m), A.b))
    return ArithmeticPartition(m, tuple(congs))


def lambda_push(P: ArithmeticPartition, A: AffineMap) -> ArithmeticPartition:
    """Like lift but without the final image congruence (length preserved)."""
    if A.m != P.m:
        raise ValueError("modulus mismatch")
    m = P.m
    return ArithmeticPartition(m, tuple(
        Congruence(math.gcd(A.a * c.modulus, m), A.a * c.residue + A.b)
        for c in P.congruences))


def system_solve(m: int, congs: Sequence[tuple[int, int]]) -> Optional[tuple[int, int]]:
    """Merge unsigned congruences (modulus, residue) into one, or None."""
    for a, _ in congs:
        if m % a != 0:
            raise ValueError(f"modulus {a} does not divide {m}")
    merged = crt_combine([(b, a) for a, b in congs])
    return merged


def system_consistent(m: int, signed: Sequence[tuple[bool, int, int]]) -> bool:
    """Whether a signed system (sign, modulus, residue) has a solution mod m."""
    P = partition_of(m, [(a, b) for _, a, b in signed])
    nu = tuple(sign for sign, _, _ in signed)
    return block_size(P, nu) > 0


def distribution_number(P: ArithmeticPartition, A: AffineMap,
                        nu: SignTuple, nu_prime: SignTuple) -> int:
    """sigma_{P,A}(nu, nu'): |A^{-1}(x) n B(P, nu)| for x in B(P'(P,A), nu').

    Inclusion-exclusion over subsets J of the negated indices of nu, with
    the three Kronecker deltas of the master formula.  Subsets are folded
    into merged-congruence states, which leaves the value unchanged (the
    pairwise-consistency condition is equivalent to joint mergeability).
    """
    K = len(P)
    if len(nu) != K or len(nu_prime) != K + 1:
        raise ValueError("sign tuple length mismatch")
    if not nu_prime[-1]:  # delta_{nu'_{K+1} = positive}
        return 0
    m = P.m
    # third delta: kappa vanishes whenever (J_+(nu) u J) meets J_-(nu')
    for j in range(K):
        if nu[j] and not nu_prime[j]:
            return 0
    # merge the positively signed congruences
    state = (0, 1)
    for j in range(K):
        if nu[j]:
            c = P.congruences[j]
            merged = crt_combine([(state[0], state[1]), (c.residue, c.modulus)])
            if merged is None:  # E fails for every J
                return 0
            state = merged
    allowed = [j for j in range(K) if not nu[j] and nu_prime[j]]
    # DP over merged congruence classes; coefficient tracks sum of (-1)^|J|
    states: dict[tuple[int, int], int] = {state: 1}
    for j in allowed:
        c = P.congruences[j]
        nxt: dict[tuple[int, int], int] = {}
        for st, coeff in states.items():
            nxt[st] = nxt.get(st, 0) + coeff
            merged = crt_combine([(st[0], st[1]), (c.residue, c.modulus)])
            if merged is not None:
                nxt[merged] = nxt.get(merged, 0) - coeff
        states = nxt
    base = m // math.gcd(A.a, m)  # modulus of the rewritten pre-image congruence
    total = 0
    for (_, mod), coeff in states.items():
        if coeff:
            total += coeff * (m // math.lcm(base, mod))
    return total


_ZERO_CACHE: dict[int, AffineMap] = {}


def _zero_map(m: int) -> AffineMap:
    A = _ZERO_CACHE.get(m)
    if A is None:
        A = _ZERO_CACHE[m] = AffineMap(m, 0, 0)
    return A


def block_size(P: ArithmeticPartition, nu: SignTuple) -> int:
    """|B(P, nu)| via the distribution number of P under the zero map.

    Every point is a pre-image of 0 under the zero map, and 0 satisfies
    all congruences of the lifted partition, hence the all-positive nu'.
    """
    return distribution_number(P, _zero_map(P.m), nu, (True,) * (len(nu) + 1))


def sign_matrix(P: ArithmeticPartition) -> np.ndarray:
    """Boolean matrix S with S[x, j] = (x satisfies congruence j), x in Z/m."""
    m = P.m
    xs = np.arange(m, dtype=np.int64)
    if not P.congruences:
        return np.zeros((m, 0), dtype=bool)
    cols = [xs % c.modulus == c.residue for c in P.congruences]
    return np.column_stack(cols)


def nonempty_blocks(P: ArithmeticPartition) -> list[SignTuple]:
    """All sign tuples with a nonempty block, lexicographically sorted
    (positive sign sorts before negated, matching tuple order on booleans
    reversed); realized blocks are found by a scan over Z/mZ."""
    mat = sign_matrix(P)
    seen = {tuple(bool(v) for v in row) for row in mat}
    return sorted(seen, key=lambda t: tuple(0 if s else 1 for s in t))
