"""Dense univariate polynomials with coefficients in a tower.

Poly allows coefficients anywhere in F_{q^m}; PolyQ restricts them to the
base field F_q and is the carrier for factorization, the unit-count Phi,
and the divisor lattice of x^m - 1.  Coefficients are stored as handle
tuples, constant term first, trailing zeros stripped (the zero polynomial
has an empty tuple and degree -1).

Factoring runs squarefree decomposition, distinct-degree splitting, then
seeded Cantor-Zassenhaus.  Every emitted factor is re-checked irreducible,
so a PolyFactorization is trustworthy by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import reduce

from .errors import ContextMismatch, NotADivisor, PreconditionFailed, ZeroPolynomial
from .tower import DEFAULT_SEED, FFElement, TowerContext


class Poly:
    """Polynomial over the full extension field."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: TowerContext, coeffs):
        cs = [c.h if isinstance(c, FFElement) else int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.ctx = ctx
        self.coeffs = tuple(cs)

    # -- structure -----------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def leading(self) -> int:
        if not self.coeffs:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff_elements(self) -> list[FFElement]:
        return [FFElement(self.ctx, c) for c in self.coeffs]

    def in_subfield(self) -> bool:
        return all(int(self.ctx.frob[c]) == c for c in self.coeffs)

    def _check(self, other: "Poly"):
        if other.ctx is not self.ctx:
            raise ContextMismatch("polynomials over different towers")

    def __eq__(self, other):
        return isinstance(other, Poly) and self.ctx is other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.ctx), self.coeffs))

    def __repr__(self):
        return f"{type(self).__name__}({list(self.coeffs)})"

    def __bool__(self):
        return bool(self.coeffs)

    # -- arithmetic ----------------------------------------------------------

    def _make(self, coeffs) -> "Poly":
        return type(self)(self.ctx, coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b, ctx = self.coeffs, other.coeffs, self.ctx
        n = max(len(a), len(b))
        return self._make(
            [ctx.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)]
        )

    def __neg__(self) -> "Poly":
        return self._make([self.ctx.neg(c) for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b, ctx = self.coeffs, other.coeffs, self.ctx
        if not a or not b:
            return self._make([])
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] = ctx.add(out[i + j], ctx.mul(ai, bj))
        return self._make(out)

    def scale(self, c: int) -> "Poly":
        return self._make([self.ctx.mul(c, x) for x in self.coeffs])

    def __divmod__(self, other: "Poly"):
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        ctx = self.ctx
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return self._make([]), self._make(rem)
        quo = [0] * (dq + 1)
        inv_lead = ctx.inv(other.coeffs[-1])
        for k in range(dq, -1, -1):
            c = ctx.mul(rem[k + other.degree], inv_lead)
            quo[k] = c
            if c:
                for i, oi in enumerate(other.coeffs):
                    rem[k + i] = ctx.sub(rem[k + i], ctx.mul(c, oi))
        return self._make(quo), self._make(rem)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.ctx.inv(self.coeffs[-1]))

    def gcd(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def pow_mod(self, e: int, modulus: "Poly") -> "Poly":
        result = self._make([1])
        base = self % modulus
        while e:
            if e & 1:
                result = result * base % modulus
            base = base * base % modulus
            e >>= 1
        return result

    def eval(self, x) -> FFElement:
        h = x.h if isinstance(x, FFElement) else int(x)
        ctx, acc = self.ctx, 0
        for c in reversed(self.coeffs):
            acc = ctx.add(ctx.mul(acc, h), c)
        return FFElement(ctx, acc)

    def derivative(self) -> "Poly":
        ctx = self.ctx
        out = []
        for i in range(1, len(self.coeffs)):
            k = i % ctx.p
            out.append(ctx.mul(k, self.coeffs[i]) if k else 0)
        return self._make(out)

    def shift_x(self) -> "Poly":
        """Multiply by x."""
        return self._make((0,) + self.coeffs) if self.coeffs else self

    def divides(self, other: "Poly") -> bool:
        return (other % self).is_zero()


class PolyQ(Poly):
    """Polynomial whose coefficients all lie in the base field F_q."""

    def __init__(self, ctx, coeffs):
        super().__init__(ctx, coeffs)
        for c in self.coeffs:
            if int(ctx.frob[c]) != c:
                raise ValueError(f"coefficient handle {c} is not in the base field")


def poly_arith(f: Poly, g: Poly, op: str) -> Poly:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "divmod":
        return divmod(f, g)
    if op == "mod":
        return f % g
    if op == "gcd":
        return f.gcd(g)
    raise ValueError(f"unknown op {op!r}")


def x_poly(ctx: TowerContext) -> PolyQ:
    return PolyQ(ctx, [0, 1])


def xm1_poly(ctx: TowerContext, m: int | None = None) -> PolyQ:
    """x^m - 1 over F_q; defaults to the extension degree of the tower."""
    m = ctx.m if m is None else m
    coeffs = [ctx.neg(1)] + [0] * (m - 1) + [1]
    return PolyQ(ctx, coeffs)


def xm1_radical(ctx: TowerContext) -> PolyQ:
    """The radical of x^m - 1: strip the p-part of m, giving x^m0 - 1."""
    m0 = ctx.m
    while m0 % ctx.p == 0:
        m0 //= ctx.p
    return xm1_poly(ctx, m0)


def minimal_polynomial(a: FFElement) -> PolyQ:
    """Monic minimal polynomial of a over the base field F_q."""
    ctx = a.ctx
    orbit = [a.h]
    cur = int(ctx.frob[a.h])
    while cur != a.h:
        orbit.append(cur)
        cur = int(ctx.frob[cur])
    f = Poly(ctx, [1])
    for root in orbit:
        f = f * Poly(ctx, [ctx.neg(root), 1])
    return PolyQ(ctx, f.coeffs)


# -- factorization over F_q ---------------------------------------------------


def _pth_root(f: PolyQ) -> PolyQ:
    """Inverse of the p-power map on polynomials with every exponent in p*Z."""
    ctx = f.ctx
    e = ctx.p ** (ctx.s - 1)  # c -> c^(p^(s-1)) inverts c -> c^p on F_q
    out = [ctx.pow(f.coeffs[i], e) for i in range(0, len(f.coeffs), ctx.p)]
    return PolyQ(ctx, out)


def _squarefree_parts(f: PolyQ) -> list[tuple[PolyQ, int]]:
    """Pairs (g, multiplicity) with f = prod g^mult and each g squarefree."""
    ctx = f.ctx
    parts: dict[tuple, tuple[PolyQ, int]] = {}

    def put(g: PolyQ, mult: int):
        if g.degree < 1:
            return
        key = g.coeffs
        if key in parts:
            parts[key] = (g, parts[key][1] + mult)
        else:
            parts[key] = (g, mult)

    def rec(f: PolyQ, outer: int):
        if f.degree < 1:
            return
        d = f.derivative()
        if d.is_zero():
            rec(_pth_root(f), outer * ctx.p)
            return
        c = f.gcd(d)
        w = f // c
        i = 1
        while not w.is_one():
            y = w.gcd(c)
            z = w // y
            put(PolyQ(ctx, z.coeffs), i * outer)
            w = y
            c = c // y
            i += 1
        if not c.is_one():
            rec(_pth_root(PolyQ(ctx, c.coeffs)), outer * ctx.p)

    rec(PolyQ(f.ctx, f.monic().coeffs), 1)
    return sorted(parts.values(), key=lambda t: (t[1], t[0].degree, t[0].coeffs))


def _distinct_degree(f: PolyQ) -> list[tuple[PolyQ, int]]:
    """Split a squarefree monic f into products of same-degree irreducibles."""
    ctx = f.ctx
    out = []
    h = x_poly(ctx) % f
    rest = f
    d = 0
    while rest.degree > 0:
        d += 1
        if 2 * d > rest.degree:
            out.append((rest, rest.degree))
            break
        h = h.pow_mod(ctx.q, rest)
        g = (h - (x_poly(ctx) % rest)).gcd(rest)
        if g.degree > 0:
            out.append((PolyQ(ctx, g.coeffs), d))
            rest = PolyQ(ctx, (rest // g).coeffs)
            h = h % rest
    return out


def _equal_degree_split(f: PolyQ, d: int, rng: random.Random) -> list[PolyQ]:
    """Cantor-Zassenhaus: f squarefree monic, all factors of degree d."""
    ctx = f.ctx
    if f.degree == d:
        return [f]
    sub = [int(h) for h in ctx.subfield]
    while True:
        a = Poly(ctx, [rng.choice(sub) for _ in range(f.degree)])
        if a.degree < 1:
            continue
        if ctx.p == 2:
            # trace map over F_2 separates factors in even characteristic
            t = a % f
            acc = t
            for _ in range(d * ctx.s - 1):
                t = t.pow_mod(2, f)
                acc = acc + t
            g = acc.gcd(f)
        else:
            b = a.pow_mod((ctx.q**d - 1) // 2, f) - Poly(ctx, [1])
            g = b.gcd(f)
        if 0 < g.degree < f.degree:
            left = PolyQ(ctx, g.coeffs)
            right = PolyQ(ctx, (f // g).coeffs)
            return _equal_degree_split(left, d, rng) + _equal_degree_split(right, d, rng)


def is_irreducible_q(f: PolyQ) -> bool:
    """Rabin's criterion over F_q."""
    if f.degree < 1:
        return False
    if f.degree == 1:
        return True
    ctx = f.ctx
    from .intfuncs import factor_int

    n = f.degree
    x = x_poly(ctx) % f
    if not x.pow_mod(ctx.q**n, f) == x:
        return False
    for ell in {r for r, _ in factor_int(n).factors}:
        g = (x.pow_mod(ctx.q ** (n // ell), f) - x).gcd(f)
        if g.degree != 0:
            return False
    return True


@dataclass(frozen=True)
class PolyFactorization:
    """Monic irreducible factors of a PolyQ with multiplicities."""

    poly: PolyQ
    unit: int  # leading coefficient handle of the original polynomial
    factors: tuple[tuple[PolyQ, int], ...]

    def phi_units(self) -> int:
        """Order of the unit group of F_q[x]/(poly)."""
        q = self.poly.ctx.q
        out = 1
        for g, e in self.factors:
            d = g.degree
            out *= q ** (d * e) - q ** (d * (e - 1))
        return out

    def mu_prime(self) -> int:
        if any(e > 1 for _, e in self.factors):
            return 0
        return -1 if len(self.factors) % 2 else 1

    def w_count(self) -> int:
        """Number of monic squarefree divisors."""
        return 1 << len(self.factors)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def monic_divisors(self) -> list[PolyQ]:
        ctx = self.poly.ctx
        divs = [PolyQ(ctx, [1])]
        for g, e in self.factors:
            cur = list(divs)
            acc = g
            for _ in range(e):
                divs = divs + [PolyQ(ctx, (d * acc).coeffs) for d in cur]
                acc = PolyQ(ctx, (acc * g).coeffs)
        divs = {d.coeffs: d for d in divs}
        return sorted(divs.values(), key=lambda d: (d.degree, d.coeffs))

    def exponent_of(self, g: PolyQ) -> tuple[int, ...]:
        """Multiplicity vector of a monic divisor on the factor base."""
        vec = []
        for pi, e in self.factors:
            k = 0
            cur = g
            while k < e and pi.divides(cur):
                cur = PolyQ(cur.ctx, (cur // pi).coeffs)
                k += 1
            vec.append(k)
        return tuple(vec)


def factor_poly(f: PolyQ, seed: int = DEFAULT_SEED) -> PolyFactorization:
    """Full factorization into monic irreducibles, deterministic given seed."""
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    if not f.in_subfield():
        raise PreconditionFailed("factorization is only supported over the base field")
    unit = f.leading()
    rng = random.Random(f"poly:{seed}:{f.ctx.p}:{f.ctx.s}:{f.ctx.m}:{f.coeffs}")
    found: list[tuple[PolyQ, int]] = []
    for sqfree, mult in _squarefree_parts(f):
        for block, d in _distinct_degree(sqfree):
            for irr in _equal_degree_split(block, d, rng):
                if not is_irreducible_q(irr):
                    raise AssertionError("factor failed irreducibility recheck")
                found.append((irr, mult))
    found.sort(key=lambda t: (t[0].degree, t[0].coeffs))
    fact = PolyFactorization(f, unit, tuple(found))
    prod = Poly(f.ctx, [unit])
    for g, e in found:
        for _ in range(e):
            prod = prod * g
    if prod.coeffs != f.coeffs:
        raise AssertionError("factor product mismatch")
    return fact


class RationalFunc:
    """Quotient of two polynomials, kept in lowest terms with monic denominator.

    Evaluation distinguishes poles (value_at returns None) from honest zeros.
    The fraction degree is deg(num) - deg(den); the zero function has
    numerator 0 and denominator 1.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.ctx is not den.ctx:
            raise ContextMismatch("numerator and denominator from different towers")
        if num.is_zero():
            num, den = Poly(num.ctx, ()), Poly(num.ctx, (1,))
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num // g, den // g
            lc_inv = num.ctx.inv(den.leading())
            num, den = num.scale(lc_inv), den.scale(lc_inv)
        self.num = num
        self.den = den

    @property
    def ctx(self):
        return self.num.ctx

    @property
    def degree(self) -> int:
        """deg(num) - deg(den); -1 - deg(den) conventions collapse: zero gives -1."""
        if self.num.is_zero():
            return -1
        return self.num.degree - self.den.degree

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def value_at(self, x) -> FFElement | None:
        """Value as a field element, or None when x is a pole."""
        d = self.den.eval(x)
        if d.h == 0:
            return None
        return self.num.eval(x) / d

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RationalFunc)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalFunc({list(self.num.coeffs)!r}, {list(self.den.coeffs)!r})"


def coprime_part(f: Poly, away_from: Poly) -> Poly:
    """Largest divisor of f sharing no irreducible factor with away_from."""
    if f.is_zero():
        raise ZeroPolynomial("zero has no coprime part")
    u = f.monic()
    if away_from.is_zero():
        return Poly(f.ctx, (1,))
    g = u.gcd(away_from)
    while g.degree > 0:
        u = u // g
        g = u.gcd(away_from)
    return u
