"""Arithmetic in F_q = F_p[T]/(P(T)) with a designated primitive element.

Elements are dense coefficient tuples over F_p, least degree first,
always fully reduced.  The context fixes omega: for n = 1 the smallest
primitive root mod p, for n > 1 the class of T, which forces the modulus
polynomial to be primitive.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

from cyclograph import numtheory
from cyclograph.errors import MappingFormatError

Element = tuple[int, ...]


def _poly_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(u: list[int], v: list[int], p: int) -> list[int]:
    if not u or not v:
        return []
    out = [0] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                out[i + j] = (out[i + j] + a * b) % p
    return _poly_trim(out)


def _poly_mod(u: list[int], mod: list[int], p: int) -> list[int]:
    u = list(u)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], -1, p)
    while len(u) - 1 >= dm and u:
        k = len(u) - 1 - dm
        c = u[-1] * inv_lead % p
        for i, b in enumerate(mod):
            u[i + k] = (u[i + k] - c * b) % p
        _poly_trim(u)
    return u


def _poly_pow_mod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    b = _poly_mod(list(base), mod, p)
    while e > 0:
        if e & 1:
            result = _poly_mod(_poly_mul(result, b, p), mod, p)
        b = _poly_mod(_poly_mul(b, b, p), mod, p)
        e >>= 1
    return result


def _poly_gcd(u: list[int], v: list[int], p: int) -> list[int]:
    u, v = list(u), list(v)
    while v:
        u, v = v, _poly_mod(u, v, p)
        if v:
            inv = pow(v[-1], -1, p)
            v = [c * inv % p for c in v]
    return u


def _is_irreducible(mod: list[int], p: int) -> bool:
    """Rabin test for a monic polynomial of degree n >= 1 over F_p."""
    n = len(mod) - 1
    x = [0, 1]
    # T^(p^n) = T mod f
    t = x
    for _ in range(n):
        t = _poly_pow_mod(t, p, mod, p)
    diff = _poly_trim([(a - b) % p for a, b in
                       zip(t + [0] * len(x), x + [0] * len(t))])
    if diff:
        return False
    for r, _ in numtheory.factorize(n).factors:
        t = x
        for _ in range(n // r):
            t = _poly_pow_mod(t, p, mod, p)
        diff = _poly_trim([(a - b) % p for a, b in
                           zip(t + [0] * len(x), x + [0] * len(t))])
        g = _poly_gcd(mod, diff, p)
        if len(g) - 1 != 0:
            return False
    return True


@dataclass(frozen=True)
class FieldContext:
    """F_q with q = p^n, a fixed reduction modulus and primitive element omega."""

    p: int
    n: int
    modulus: Optional[tuple[int, ...]]  # monic, degree n, absent when n == 1
    omega: Element = field(compare=False)

    @property
    def q(self) -> int:
        return self.p ** self.n

    def zero(self) -> Element:
        return (0,) * self.n

    def one(self) -> Element:
        return (1,) + (0,) * (self.n - 1)

    def add(self, x: Element, y: Element) -> Element:
        p = self.p
        return tuple((a + b) % p for a, b in zip(x, y))

    def neg(self, x: Element) -> Element:
        p = self.p
        return tuple((-a) % p for a in x)

    def sub(self, x: Element, y: Element) -> Element:
        p = self.p
        return tuple((a - b) % p for a, b in zip(x, y))

    def mul(self, x: Element, y: Element) -> Element:
        if self.n == 1:
            return (x[0] * y[0] % self.p,)
        prod = _poly_mul(list(x), list(y), self.p)
        prod = _poly_mod(prod, list(self.modulus), self.p)
        return tuple(prod) + (0,) * (self.n - len(prod))

    def pow(self, x: Element, e: int) -> Element:
        if e < 0:
            return self.pow(self.inv(x), -e)
        out = self.one()
        b = x
        while e > 0:
            if e & 1:
                out = self.mul(out, b)
            b = self.mul(b, b)
            e >>= 1
        return out

    def inv(self, x: Element) -> Element:
        if x == self.zero():
            raise ZeroDivisionError("inversion of 0 in the field")
        return self.pow(x, self.q - 2)

    def from_int(self, c: int) -> Element:
        """The prime-subfield element c mod p."""
        return (c % self.p,) + (0,) * (self.n - 1)

    def omega_pow(self, e: int) -> Element:
        return self.pow(self.omega, e % (self.q - 1))

    def element_order(self, x: Element) -> int:
        """Multiplicative order of a nonzero element."""
        if x == self.zero():
            raise ZeroDivisionError("0 has no multiplicative order")
        o = self.q - 1
        for r, _ in numtheory.factorize(self.q - 1).factors:
            while o % r == 0 and self.pow(x, o // r) == self.one():
                o //= r
        return o


def _search_primitive_modulus(p: int, n: int) -> tuple[int, ...]:
    """Lexicographically smallest monic primitive polynomial of degree n.

    Candidates T^n + c_{n-1}T^{n-1} + ... + c_0 are ordered by the tuple
    (c_{n-1}, ..., c_0) read as a base-p number.
    """
    qm1 = p ** n - 1
    fact = numtheory.factorize(qm1)
    for code in range(p ** n):
        digits = []
        c = code
        for _ in range(n):
            digits.append(c % p)  # digits[0] = c_0; c_{n-1} is most significant
            c //= p
        mod = digits + [1]
        if mod[0] == 0:
            continue  # T divides it, reducible
        if not _is_irreducible(mod, p):
            continue
        # primitivity of T: order of T must be exactly q-1
        ok = True
        for r, _ in fact.factors:
            t = _poly_pow_mod([0, 1], qm1 // r, mod, p)
            if t == [1]:
                ok = False
                break
        if ok:
            return tuple(mod)
    raise ArithmeticError(f"no primitive polynomial of degree {n} over F_{p}")


def make_field(p: int, n: int, modulus: Optional[tuple[int, ...]] = None) -> FieldContext:
    """Build F_{p^n}; a supplied modulus must be monic, irreducible and primitive."""
    if not numtheory.is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("extension degree must be >= 1")
    if n == 1:
        if modulus is not None:
            raise ValueError("prime fields take no modulus polynomial")
        g = 1 if p == 2 else numtheory.primitive_root(p, 1)
        return FieldContext(p, 1, None, (g,))
    if modulus is None:
        modulus = _search_primitive_modulus(p, n)
    modulus = tuple(c % p for c in modulus)
    if len(modulus) != n + 1 or modulus[-1] != 1:
        raise ValueError("modulus must be monic of degree n")
    if not _is_irreducible(list(modulus), p):
        raise ValueError("modulus polynomial is reducible")
    ctx = FieldContext(p, n, modulus, (0, 1) + (0,) * (n - 2))
    if ctx.element_order(ctx.omega) != ctx.q - 1:
        raise ValueError("modulus polynomial is irreducible but not primitive")
    return ctx


def field_dlog(ctx: FieldContext, x: Element) -> int:
    """Least k with omega^k = x, for nonzero x (Pohlig-Hellman over q-1)."""
    if x == ctx.zero():
        raise ZeroDivisionError("0 has no discrete logarithm")
    qm1 = ctx.q - 1
    if qm1 == 1:
        return 0
    congruences: list[tuple[int, int]] = []
    for r, v in numtheory.factorize(qm1).factors:
        rv = r ** v
        co = qm1 // rv
        b = ctx.pow(ctx.omega, co)
        t = ctx.pow(x, co)
        gamma = ctx.pow(b, rv // r)
        xk = 0
        for k in range(v):
            cur = ctx.mul(ctx.pow(b, (-xk) % rv), t)
            h = ctx.pow(cur, rv // r ** (k + 1))
            d = _bsgs_field(ctx, gamma, h, r)
            if d is None:  # pragma: no cover - omega generates everything
                raise ArithmeticError("omega is not primitive")
            xk += d * r ** k
        congruences.append((xk, rv))
    merged = numtheory.crt_combine(congruences)
    assert merged is not None and merged[1] == qm1
    return merged[0]


def _bsgs_field(ctx: FieldContext, base: Element, target: Element,
                order: int) -> Optional[int]:
    step = math.isqrt(order) + 1
    table: dict[Element, int] = {}
    e = ctx.one()
    for j in range(step):
        table.setdefault(e, j)
        e = ctx.mul(e, base)
    giant = ctx.pow(base, (-step) % order) if order > 1 else ctx.one()
    g = target
    for i in range(step + 1):
        j = table.get(g)
        if j is not None and i * step + j < order:
            return i * step + j
        g = ctx.mul(g, giant)
    return None


_TERM_RE = re.compile(r"^([0-9]+)?(?:([A-Za-z])(?:\^([0-9]+))?)?$")


def parse_poly(text: str, p: int) -> tuple[int, ...]:
    """Parse e.g. 'x^8+x^4+x^3+x^2+1' into low-first coefficients mod p."""
    cleaned = text.replace(" ", "").replace("-", "+-")
    if not cleaned:
        raise MappingFormatError("empty polynomial")
    coeffs: dict[int, int] = {}
    var = None
    for term in cleaned.split("+"):
        if not term:
            continue
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        mt = _TERM_RE.match(term)
        if not mt or (mt.group(1) is None and mt.group(2) is None):
            raise MappingFormatError(f"bad polynomial term {term!r} in {text!r}")
        coef = int(mt.group(1)) if mt.group(1) else 1
        if neg:
            coef = -coef
        if mt.group(2):
            if var is None:
                var = mt.group(2)
            elif var != mt.group(2):
                raise MappingFormatError(f"mixed variables in {text!r}")
            exp = int(mt.group(3)) if mt.group(3) else 1
        else:
            exp = 0
        coeffs[exp] = (coeffs.get(exp, 0) + coef) % p
    deg = max(coeffs)
    return tuple(coeffs.get(i, 0) for i in range(deg + 1))


def render_poly(coeffs: tuple[int, ...], var: str = "x") -> str:
    """Inverse of parse_poly, highest power first."""
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append(f"{var}" if c == 1 else f"{c}{var}")
        else:
            terms.append(f"{var}^{i}" if c == 1 else f"{c}{var}^{i}")
    return "+".join(terms) if terms else "0"
