"""Exact integer number theory: factoring, orders, discrete logs, CRT.

Everything here is deterministic for a given input.  Factoring is trial
division below 10^6 followed by Brent-cycle Pollard rho with fixed restart
parameters, which is plenty for desk-scale moduli and for the Mersenne
numbers 2^v-1 with v <= 1000.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

# Strong-pseudoprime bases making Miller-Rabin exact below this bound
# (Sorenson & Webster).
_MR_EXACT_BOUND = 3317044064679887385961981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_LIMIT = 1_000_000


@dataclass(frozen=True)
class Factorization:
    """n = prod(p**v) with primes strictly increasing and every v >= 1."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def value(self) -> int:
        out = 1
        for p, v in self.factors:
            out *= p ** v
        return out


def _miller_rabin(n: int, base: int) -> bool:
    if base % n == 0:
        return True
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


@lru_cache(maxsize=1 << 18)
def is_prime(n: int) -> bool:
    """Exact primality test (deterministic MR bases; sympy above their bound)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    if not all(_miller_rabin(n, b) for b in _MR_BASES):
        return False
    if n < _MR_EXACT_BOUND:
        return True
    # Beyond the proven MR bound, defer to sympy's BPSW-based isprime.
    import sympy

    return bool(sympy.isprime(n))


def _pollard_brent(n: int) -> int:
    """A nontrivial factor of composite odd n, via Brent's rho with fixed restarts."""
    if n % 2 == 0:
        return 2
    for c in range(1, 500):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"pollard rho failed on {n}")  # pragma: no cover


def _factor_into(n: int, acc: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        acc[n] = acc.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _factor_into(d, acc)
    _factor_into(n // d, acc)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Full prime factorization of n >= 1."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    acc: dict[int, int] = {}
    rest = n
    for p in (2, 3, 5):
        while rest % p == 0:
            rest //= p
            acc[p] = acc.get(p, 0) + 1
    # wheel over 6k+-1 up to the trial limit
    f = 7
    inc = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while f * f <= rest and f < _TRIAL_LIMIT:
        while rest % f == 0:
            rest //= f
            acc[f] = acc.get(f, 0) + 1
        f += inc[i]
        i = (i + 1) % 8
    if rest > 1:
        if rest < _TRIAL_LIMIT * _TRIAL_LIMIT:
            acc[rest] = acc.get(rest, 0) + 1
        else:
            _factor_into(rest, acc)
    return Factorization(n, tuple(sorted(acc.items())))


def nu_p(n: int, p: int) -> int:
    """p-adic valuation of n >= 1."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("nu_p expects n >= 1")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def nu_p_capped(n: int, p: int, cap: int) -> int:
    """min(cap, nu_p(n)), with n = 0 reported as the cap."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n == 0:
        return cap
    v = 0
    n = abs(n)
    while v < cap and n % p == 0:
        n //= p
        v += 1
    return v


def mpe(n: int) -> int:
    """Largest exponent in the prime factorization of n (0 for n = 1)."""
    f = factorize(n)
    return max((v for _, v in f.factors), default=0)


def tau(n: int) -> int:
    """Number of positive divisors of n."""
    out = 1
    for _, v in factorize(n).factors:
        out *= v + 1
    return out


def divisors(n: int) -> list[int]:
    """All positive divisors of n, sorted."""
    out = [1]
    for p, v in factorize(n).factors:
        out = [d * p ** e for d in out for e in range(v + 1)]
    return sorted(out)


def crt_combine(pairs: list[tuple[int, int]]) -> Optional[tuple[int, int]]:
    """Merge congruences x = b (mod a); moduli need not be coprime.

    Returns (residue, lcm of moduli), or None when some pair conflicts
    (gcd(a_j, a_k) must divide b_j - b_k).
    """
    res, mod = 0, 1
    for b, a in pairs:
        if a < 1:
            raise ValueError("modulus must be >= 1")
        b %= a
        g = math.gcd(mod, a)
        if (b - res) % g != 0:
            return None
        lcm = mod // g * a
        # res + mod*t = b (mod a)  =>  t = (b-res)/g * inv(mod/g) (mod a/g)
        if a // g > 1:
            t = ((b - res) // g * pow(mod // g, -1, a // g)) % (a // g)
        else:
            t = 0
        res = (res + mod * t) % lcm
        mod = lcm
    return res, mod


@lru_cache(maxsize=1 << 18)
def mult_order(x: int, m: int) -> int:
    """Least k >= 1 with x^k = 1 (mod m); requires gcd(x, m) = 1."""
    if m < 1:
        raise ValueError("modulus must be >= 1")
    if m == 1:
        return 1
    x %= m
    if math.gcd(x, m) != 1:
        raise ValueError(f"{x} is not a unit modulo {m}")
    order = 1
    for p, v in factorize(m).factors:
        pk = p ** v
        # group exponent of (Z/p^v)*; for p=2, v>=3 the unit group is not
        # cyclic but every element order still divides 2^(v-2)
        if p == 2 and v >= 3:
            lam = 2 ** (v - 2)
        else:
            lam = pk // p * (p - 1)
        o = lam
        for q, _ in factorize(lam).factors:
            while o % q == 0 and pow(x, o // q, pk) == 1:
                o //= q
        order = order * o // math.gcd(order, o)
    return order


def _bsgs(base: int, target: int, m: int, order: int) -> Optional[int]:
    """Least k in [0, order) with base^k = target (mod m), or None."""
    step = math.isqrt(order) + 1
    table: dict[int, int] = {}
    e = 1 % m
    for j in range(step):
        table.setdefault(e, j)
        e = e * base % m
    giant = pow(base, -step, m)
    g = target % m
    for i in range(step + 1):
        j = table.get(g)
        if j is not None:
            k = i * step + j
            if k < order:
                return k
        g = g * giant % m
    return None


def _dlog_cyclic(base: int, target: int, m: int, order: int,
                 order_fact: Factorization) -> Optional[int]:
    """Pohlig-Hellman inside the cyclic group <base> of known order mod m."""
    residues: list[tuple[int, int]] = []
    for p, v in order_fact.factors:
        pv = p ** v
        co = order // pv
        b = pow(base, co, m)
        t = pow(target, co, m)
        # lift digits of the exponent base p
        gamma = pow(b, pv // p, m)  # order p
        xk = 0
        for k in range(v):
            cur = pow(b, -xk, m) * t % m
            h = pow(cur, pv // p ** (k + 1), m)
            d = _bsgs(gamma, h, m, p)
            if d is None:
                return None
            xk += d * p ** k
        residues.append((xk, pv))
    merged = crt_combine(residues)
    if merged is None:
        return None
    k = merged[0] % order
    if pow(base, k, m) != target % m:
        return None
    return k


def discrete_log_mod(x: int, z: int, m: int) -> Optional[int]:
    """Least k >= 0 with x^k = z (mod m), or None when z is not a power of x.

    Works one prime-power factor of m at a time (Pohlig-Hellman with
    baby-step giant-step leaves) and merges the per-factor congruences by
    CRT, rejecting inconsistent systems.
    """
    if m < 1:
        raise ValueError("modulus must be >= 1")
    if m == 1:
        return 0
    x %= m
    z %= m
    if math.gcd(x, m) != 1 or math.gcd(z, m) != 1:
        raise ValueError("discrete_log_mod expects units")
    congruences: list[tuple[int, int]] = []
    for p, v in factorize(m).factors:
        pk = p ** v
        xb, zb = x % pk, z % pk
        o = mult_order(xb, pk)
        k = _dlog_cyclic(xb, zb, pk, o, factorize(o))
        if k is None:
            return None
        congruences.append((k, o))
    merged = crt_combine(congruences)
    if merged is None:
        return None
    k = merged[0]
    if pow(x, k, m) != z:  # pragma: no cover - CRT check is already exact
        return None
    return k


def primitive_root(p: int, k: int = 1) -> int:
    """Smallest primitive root modulo p, lifted to p^k (p an odd prime).

    Follows the classic lift: the smallest primitive root r modulo p is a
    primitive root modulo p^k unless r^(p-1) = 1 (mod p^2), in which case
    r + p is.
    """
    if p == 2 or not is_prime(p):
        raise ValueError("primitive_root expects an odd prime")
    if k < 1:
        raise ValueError("k must be >= 1")
    fact = factorize(p - 1)
    r = 2
    while True:
        if all(pow(r, (p - 1) // q, p) != 1 for q, _ in fact.factors):
            break
        r += 1
    if k == 1:
        return r
    if pow(r, p - 1, p * p) == 1:
        r += p
    return r
