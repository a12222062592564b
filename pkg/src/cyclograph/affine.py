"""Dynamics of affine maps x -> ax+b on Z/mZ.

Covers composition and powers, periodic-point classification, affine
discrete logs and cycle lengths, cycle representatives-and-lengths (CRL)
lists for automorphisms and affine maps of primary and general cyclic
groups, cycle types with the Wei-Xu product, and procreation numbers.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from cyclograph import numtheory
from cyclograph.errors import CapExceeded

CrlList = list[tuple[int, int]]          # (representative, exact cycle length)
CycleType = tuple[tuple[int, int], ...]  # (length, multiplicity), lengths increasing


@dataclass(frozen=True)
class AffineMap:
    """x -> a*x + b on Z/mZ, with a and b stored reduced."""

    m: int
    a: int
    b: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("modulus must be >= 1")
        object.__setattr__(self, "a", self.a % self.m)
        object.__setattr__(self, "b", self.b % self.m)

    def __call__(self, x: int) -> int:
        return (self.a * x + self.b) % self.m

    def is_permutation(self) -> bool:
        return math.gcd(self.a, self.m) == 1


def identity(m: int) -> AffineMap:
    return AffineMap(m, 1, 0)


def compose(first: AffineMap, second: AffineMap) -> AffineMap:
    """The map 'apply first, then second'."""
    if first.m != second.m:
        raise ValueError("modulus mismatch")
    m = first.m
    return AffineMap(m, first.a * second.a % m, (second.a * first.b + second.b) % m)


def power(A: AffineMap, n: int) -> AffineMap:
    """A^n for n >= 0 via the closed form (a^n, b*(a^n-1)/(a-1))."""
    if n < 0:
        raise ValueError("n must be >= 0")
    m = A.m
    an = pow(A.a, n, m)
    bn = A.b * _geometric_sum(A.a, n, m) % m
    return AffineMap(m, an, bn)


def _geometric_sum(a: int, n: int, m: int) -> int:
    """(1 + a + ... + a^(n-1)) mod m, exactly, without iterating n times."""
    if m == 1 or n == 0:
        return 0
    a %= m
    if a == 0:
        return 1
    if a == 1:
        return n % m
    # work modulo (a-1)m so the division by a-1 is exact
    big = (a - 1) * m
    num = (pow(a, n, big) - 1) % big
    return (num // (a - 1)) % m


def reduce_mod(A: AffineMap, m2: int) -> AffineMap:
    if A.m % m2 != 0:
        raise ValueError(f"{m2} does not divide the modulus {A.m}")
    return AffineMap(m2, A.a % m2, A.b % m2)


def evaluate(A: AffineMap, x: int) -> int:
    return A(x)


def fixed_point(A: AffineMap) -> Optional[int]:
    """The canonical solution of A(x) = x, or None when there is none.

    Solvable iff gcd(a-1, m) divides b; the value returned is the least
    nonnegative solution of the reduced congruence (the choice made for
    prime-power moduli in the CRL tables).
    """
    m = A.m
    if m == 1:
        return 0
    g = math.gcd(A.a - 1, m)
    if A.b % g != 0:
        return None
    mm = m // g
    if mm == 1:  # a = 1 and b = 0: the identity, pick 0
        return 0
    return (-(A.b // g) * pow((A.a - 1) // g % mm, -1, mm)) % mm


def periodic_point_congruence(A: AffineMap) -> tuple[int, int]:
    """(residue, g) with x periodic under A iff x = residue (mod g).

    g is the product of p^(nu_p(m)) over primes p dividing gcd(a, m); the
    residue is the unique periodic point modulo g, reached as A^L(0) with
    L = mpe(m).
    """
    m = A.m
    g = 1
    for p, v in numtheory.factorize(m).factors:
        if A.a % p == 0:
            g *= p ** v
    L = max(numtheory.mpe(m), 1)
    res = A.b * _geometric_sum(A.a, L, m) % m
    return res % g, g


def periodic_points(A: AffineMap) -> list[int]:
    res, g = periodic_point_congruence(A)
    return list(range(res, A.m, g))


def affine_dlog(A: AffineMap, x: int, y: int) -> Optional[int]:
    """Least k >= 0 with A^k(x) = y, or None.

    For a non-unit linear part, x must be periodic; the computation is
    then carried out in the bijective reduction modulo the part of m
    coprime to a (the m''-component of both points is pinned anyway).
    """
    m = A.m
    if not A.is_permutation():
        res, g = periodic_point_congruence(A)
        if x % g != res:
            raise ValueError("affine_dlog with non-unit a expects periodic x")
        if y % g != res:
            return None
        m1, _ = _unit_part_split(m, A.a)
        return affine_dlog(reduce_mod(A, m1), x % m1, y % m1)
    x %= m
    y %= m
    if m == 1 or x == y:
        return 0
    a, b = A.a, A.b
    if a == 1:
        g = math.gcd(b, m)
        if (y - x) % g != 0:
            return None
        mm = m // g
        return ((y - x) // g * pow(b // g % mm, -1, mm)) % mm
    big = (a - 1) * m
    dx = math.gcd((a - 1) * x + b, big)
    dy = math.gcd((a - 1) * y + b, big)
    if dx != dy:
        return None
    mod = big // dx
    z = ((a - 1) * y + b) // dx * pow(((a - 1) * x + b) // dx % mod, -1, mod) % mod
    return numtheory.discrete_log_mod(a % mod, z, mod)


def affine_cycle_length(A: AffineMap, x: int) -> int:
    """Exact cycle length of the periodic point x under A."""
    m = A.m
    if not A.is_permutation():
        res, g = periodic_point_congruence(A)
        if x % g != res:
            raise ValueError("affine_cycle_length expects a periodic point")
        m1, _ = _unit_part_split(m, A.a)
        return affine_cycle_length(reduce_mod(A, m1), x % m1)
    if m == 1:
        return 1
    a, b = A.a, A.b % m
    if a == 1:
        return m // math.gcd(b, m)
    big = (a - 1) * m
    d = math.gcd((a - 1) * (x % m) + b, big)
    return numtheory.mult_order(a % (big // d), big // d) if big // d > 1 else 1


# ---------------------------------------------------------------------------
# CRL lists of automorphisms and affine permutations of Z/p^v (tables)
# ---------------------------------------------------------------------------


def crl_automorphism_primary(p: int, v: int, a: int) -> CrlList:
    """CRL list of x -> ax on Z/p^v, p prime not dividing a."""
    return list(_crl_automorphism_primary(p, v, a % p ** v))


@lru_cache(maxsize=1 << 16)
def _crl_automorphism_primary(p: int, v: int, a: int) -> tuple[tuple[int, int], ...]:
    m = p ** v
    if a % p == 0:
        raise ValueError("a must be a unit")
    if v == 0:
        return ((0, 1),)
    if p > 2:
        r = numtheory.primitive_root(p, v)
        ord_a = numtheory.mult_order(a, m)
        quot = (m - m // p) // ord_a  # phi(p^v)/ord(a)
        out: list[tuple[int, int]] = []
        for t in range(v + 1):
            phi_t = _phi_pp(p, v - t)
            g = math.gcd(quot, phi_t)
            length = phi_t // g
            rj = 1
            for j in range(g):
                out.append((rj * p ** t % m, length))
                rj = rj * r % m
        return tuple(out)
    # p == 2
    if v == 1:
        return ((0, 1), (1, 1))
    if a % 4 == 1:
        out = [(0, 1), (m // 2, 1)]
        ord_a = numtheory.mult_order(a, m)
        quot = (m // 4) // ord_a  # 2^(v-2)/ord(a)
        for t in range(v - 1):
            half = 2 ** (v - t - 2)
            g = math.gcd(quot, half)
            length = half // g
            fj = 1
            for j in range(g):
                out.append((fj * 2 ** t % m, length))
                out.append((-fj * 2 ** t % m, length))
                fj = fj * 5 % m
        return tuple(out)
    # a = 3 (mod 4)
    out = [(0, 1), (m // 2, 1)]
    o = numtheory.mult_order((-a) % m, m)
    for j in range(1, m // 2 // o):
        out.append((j * o % m, 2))
    fives = m // 4 // o
    for t in range(o.bit_length() - 1):  # t = 0 .. log2(o)-1
        fj = 1
        for j in range(fives):
            out.append((fj * 2 ** t % m, o // 2 ** t))
            out.append((-fj * 2 ** t % m, o // 2 ** t))
            fj = fj * 5 % m
    return tuple(out)


def _phi_pp(p: int, k: int) -> int:
    return 1 if k == 0 else p ** k - p ** (k - 1)


def crl_affine_primary(p: int, v: int, a: int, b: int) -> CrlList:
    """CRL list of x -> ax+b on Z/p^v, p prime not dividing a (ten table rows)."""
    m = p ** v
    a %= m
    b %= m
    if a % p == 0:
        raise ValueError("a must be a unit")
    nu_b = numtheory.nu_p_capped(b, p, v)
    nu_a1 = numtheory.nu_p_capped(a - 1, p, v)
    if p > 2:
        if nu_b >= nu_a1:                                   # row 1
            f = _primary_fixed_point(p, v, a, b, nu_a1)
            return [((r + f) % m, l) for r, l in crl_automorphism_primary(p, v, a)]
        return [(j, p ** (v - nu_b)) for j in range(p ** nu_b)]  # row 2
    if v <= 2:
        if a == 1:                                          # row 3
            aord = m // math.gcd(b, m)
            return [(j, aord) for j in range(m // aord)]
        if b == 0:                                          # row 4 (m=4, a=3)
            return [(0, 1), (1, 2), (2, 1)]
        if b == 2:                                          # row 5
            return [(0, 2), (1, 1), (3, 1)]
        return [(0, 2), (2, 2)]                             # row 6
    if nu_b >= nu_a1:                                       # rows 7, 8
        f = _primary_fixed_point(p, v, a, b, nu_a1)
        return [((r + f) % m, l) for r, l in crl_automorphism_primary(p, v, a)]
    if a % 4 == 1:                                          # row 9
        return [(j, 2 ** (v - nu_b)) for j in range(2 ** nu_b)]
    o = numtheory.mult_order((-a) % m, m)                   # row 10
    reps = [0] + list(range(2, m // 2 // o + 1))
    return [(b * j % m, 2 * o) for j in reps]


def _primary_fixed_point(p: int, v: int, a: int, b: int, nu_a1: int) -> int:
    """The table's distinguished fixed point -b/p^nu * inv((a-1)/p^nu) mod p^(v-nu)."""
    m = p ** v
    mm = p ** (v - nu_a1)
    if mm == 1:
        return 0
    return (-(b // p ** nu_a1) * pow((a - 1) // p ** nu_a1 % mm, -1, mm)) % mm


# ---------------------------------------------------------------------------
# CRL lists for general moduli: CRT of primary lists + the Lambda lift
# ---------------------------------------------------------------------------


def _unit_part_split(m: int, a: int) -> tuple[int, int]:
    """(m', m'') with m' the product of p^nu_p(m) over p not dividing a."""
    m1 = 1
    for p, v in numtheory.factorize(m).factors:
        if a % p != 0:
            m1 *= p ** v
    return m1, m // m1


def crl_cycle_count(m: int, a: int, b: int) -> int:
    """Number of cycles of x -> ax+b on its periodic points, without enumerating."""
    a %= m
    b %= m
    m1, _ = _unit_part_split(m, a)
    if m1 == 1:
        return 1
    parts = []
    for p, v in numtheory.factorize(m1).factors:
        parts.append([l for _, l in crl_affine_primary(p, v, a % p ** v, b % p ** v)])
    total = 0
    for combo in itertools.product(*parts):
        prod = 1
        for l in combo:
            prod *= l
        total += prod // math.lcm(*combo)
    return total


def crl_affine(m: int, a: int, b: int, max_cycles: Optional[int] = None) -> CrlList:
    """A CRL list of x -> ax+b on Z/mZ; a need not be a unit.

    The bijective reduction modulo m' (the part of m coprime to a) is
    solved prime power by prime power, the primary lists are combined with
    admissible indexing functions and good tuples, and the result is
    lifted through the section Lambda determined by the unique periodic
    point modulo m''.
    """
    a %= m
    b %= m
    A = AffineMap(m, a, b)
    m1, m2 = _unit_part_split(m, a)
    if m1 == 1:
        res, g = periodic_point_congruence(A)
        assert g == m
        return [(res, 1)]
    if max_cycles is not None and crl_cycle_count(m, a, b) > max_cycles:
        raise CapExceeded(f"more than {max_cycles} cycles for x->{a}x+{b} mod {m}")
    # unique periodic point of the reduction mod m'' (trivial when m'' = 1)
    if m2 > 1:
        f2, g2 = periodic_point_congruence(reduce_mod(A, m2))
        assert g2 == m2
    else:
        f2 = 0
    prime_data = []
    for p, v in numtheory.factorize(m1).factors:
        pk = p ** v
        Ap = AffineMap(pk, a, b)
        prime_data.append((pk, Ap, crl_affine_primary(p, v, a % pk, b % pk)))
    out: CrlList = []
    for combo in itertools.product(*(pd[2] for pd in prime_data)):
        lengths = [l for _, l in combo]
        l_all = math.lcm(*lengths)
        # admissible indexing: per prime of l_all pick a component of maximal
        # valuation, then good tuples fix that component's exponent residue
        strides = []
        for j, lj in enumerate(lengths):
            mj = 1
            for pr, _ in numtheory.factorize(l_all).factors:
                vals = [numtheory.nu_p(lk, pr) for lk in lengths]
                best = max(vals)
                if vals.index(best) == j:
                    mj *= pr ** best
            strides.append(mj)
        ranges = [range(0, lj, mj) for lj, mj in zip(lengths, strides)]
        for ks in itertools.product(*ranges):
            parts = []
            for (pk, Ap, _), (r, _), k in zip(prime_data, combo, ks):
                parts.append((power(Ap, k)(r), pk))
            res1 = numtheory.crt_combine(parts)
            assert res1 is not None
            if m2 > 1:
                lifted = numtheory.crt_combine([res1, (f2, m2)])
                assert lifted is not None
                out.append((lifted[0], l_all))
            else:
                out.append((res1[0], l_all))
    return out


# ---------------------------------------------------------------------------
# Cycle types
# ---------------------------------------------------------------------------


def _ct_from_counter(c: Counter) -> CycleType:
    return tuple(sorted(c.items()))


def cycle_type(A: AffineMap) -> CycleType:
    """Cycle type of A restricted to its periodic points.

    Equals the cycle type of the bijective reduction A mod m', assembled
    from the primary CRL lists by the Wei-Xu tensor product.
    """
    m1, _ = _unit_part_split(A.m, A.a)
    ct: CycleType = ((1, 1),)
    for p, v in numtheory.factorize(m1).factors:
        pk = p ** v
        counts = Counter()
        for _, l in crl_affine_primary(p, v, A.a % pk, A.b % pk):
            counts[l] += 1
        ct = wei_xu(ct, _ct_from_counter(counts))
    return ct


def wei_xu(ct1: CycleType, ct2: CycleType) -> CycleType:
    """Tensor product of cycle types: x_n^e * x_n'^e' = x_lcm^(e e' gcd)."""
    counts: Counter = Counter()
    for n, e in ct1:
        for n2, e2 in ct2:
            counts[math.lcm(n, n2)] += e * e2 * math.gcd(n, n2)
    return _ct_from_counter(counts)


def blow_up(ct: CycleType, ell: int) -> CycleType:
    """Replace every x_n by x_(ell*n)."""
    return tuple((ell * n, e) for n, e in ct)


def ct_points(ct: CycleType) -> int:
    return sum(n * e for n, e in ct)


# ---------------------------------------------------------------------------
# Orders, maximal cycle lengths, procreation numbers
# ---------------------------------------------------------------------------


def affine_order_on_per(A: AffineMap) -> int:
    """Order of A as a permutation of per(A).

    Computed as ord(a mod s') times the additive order of the accumulated
    translation of A^ord(a), where s' is the part of m coprime to a.
    """
    s1, _ = _unit_part_split(A.m, A.a)
    if s1 == 1:
        return 1
    a1, b1 = A.a % s1, A.b % s1
    o = numtheory.mult_order(a1, s1)
    beta = b1 * _geometric_sum(a1, o, s1) % s1
    return o * (s1 // math.gcd(beta, s1))


def max_cycle_length(A: AffineMap) -> int:
    """Largest cycle length of A on per(A) (= affine_order_on_per here,
    because cycle lengths modulo each prime power form a divisibility chain)."""
    return affine_order_on_per(A)


def procreation_numbers(A: AffineMap, k_max: int) -> list[int]:
    """proc_k = gcd(a^k, m)/gcd(a^(k-1), m) for k = 1..k_max."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    m = A.m
    out = []
    prev = 1
    ak = 1
    for _ in range(k_max):
        ak = ak * A.a % m if m > 1 else 0
        cur = math.gcd(ak, m) if m > 1 else 1
        out.append(cur // prev)
        prev = cur
    return out
