"""Extension towers F_{q^m} over F_q realized inside one absolute extension.

The big field F_{p^(s*m)} is built as F_p[t]/(H) for a seeded-deterministic
irreducible H; an element's handle is the integer whose base-p digits are
its coefficients on the power basis 1, t, t^2, ...  The intermediate field
F_q with q = p^s is recovered as the fixed field of x -> x^q.  All
multiplicative structure runs through exp/log tables for a primitive root
gamma, chosen as the smallest handle that generates the unit group.

Construction is deterministic given (p, s, m, seed): the modulus is the
first irreducible hit along the seeded scan order, and gamma does not
depend on the seed at all.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from . import kernels
from .errors import ContextMismatch, NonPrime, SizeExceeded, ZeroElement
from .intfuncs import IntFactorization, factor_int, is_prime

DEFAULT_SEED = 1
DEFAULT_SIZE_CAP = 1 << 22


# ---------------------------------------------------------------------------
# scratch polynomial arithmetic over F_p, used only while bootstrapping a
# tower (modulus search, primitive root search).  Coefficient lists are
# constant-term first with no trailing zeros.


def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _pmod(a, h, p):
    a = list(a)
    dh = len(h) - 1
    inv_lead = pow(h[-1], -1, p)
    while len(a) - 1 >= dh and a:
        if a[-1]:
            f = a[-1] * inv_lead % p
            off = len(a) - 1 - dh
            for i, hi in enumerate(h):
                a[off + i] = (a[off + i] - f * hi) % p
        a.pop()
    return _ptrim(a)


def _ppowmod(a, e, h, p):
    result = [1]
    base = _pmod(a, h, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), h, p)
        base = _pmod(_pmul(base, base, p), h, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _frob_power(k, h, p):
    """x^(p^k) mod h by k successive p-th powers."""
    t = [0, 1]
    for _ in range(k):
        t = _ppowmod(t, p, h, p)
    return t


def _is_irreducible(h, p):
    """Rabin test for a monic polynomial over F_p of degree >= 1."""
    n = len(h) - 1
    if n == 1:
        return True
    if h[0] == 0:
        return False
    if _frob_power(n, h, p) != [0, 1]:
        return False
    for ell in {f for f, _ in factor_int(n).factors}:
        g = _frob_power(n // ell, h, p)
        g = list(g)
        if len(g) < 2:
            g = g + [0] * (2 - len(g))
        g[1] = (g[1] - 1) % p
        if len(_pgcd(_ptrim(g), h, p)) - 1 != 0:
            return False
    return True


def _find_modulus(p, n, seed):
    """First irreducible monic degree-n polynomial along the seeded scan."""
    rng = random.Random(seed)
    if n == 1:
        return [rng.randrange(p), 1]
    while True:
        cand = [rng.randrange(p) for _ in range(n)] + [1]
        if _is_irreducible(cand, p):
            return cand


def _handle_digits(h, p, n):
    out = []
    for _ in range(n):
        out.append(h % p)
        h //= p
    return out


def _digits_handle(digits, p):
    acc = 0
    for d in reversed(digits):
        acc = acc * p + d
    return acc


def _find_gamma(p, modulus, N_fact: IntFactorization):
    """Smallest handle whose residue class generates the unit group."""
    n = len(modulus) - 1
    cofs = [N_fact.n // r for r in N_fact.primes]
    h = 2
    while True:
        a = _ptrim(_handle_digits(h, p, n))
        if a and all(_ppowmod(a, c, modulus, p) != [1] for c in cofs):
            return h
        h += 1


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FFElement:
    """One element of a tower, identified by its handle."""

    ctx: "TowerContext"
    h: int

    def _peer(self, other) -> int:
        if isinstance(other, FFElement):
            if other.ctx is not self.ctx:
                raise ContextMismatch("elements from different towers")
            return other.h
        if isinstance(other, int):
            if not 0 <= other < self.ctx.p:
                raise ValueError("bare integers are only accepted as prime-field scalars")
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._peer(other)
        return o if o is NotImplemented else FFElement(self.ctx, self.ctx.add(self.h, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._peer(other)
        return o if o is NotImplemented else FFElement(self.ctx, self.ctx.sub(self.h, o))

    def __neg__(self):
        return FFElement(self.ctx, self.ctx.neg(self.h))

    def __mul__(self, other):
        o = self._peer(other)
        return o if o is NotImplemented else FFElement(self.ctx, self.ctx.mul(self.h, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._peer(other)
        return o if o is NotImplemented else FFElement(self.ctx, self.ctx.div(self.h, o))

    def __pow__(self, k: int):
        return FFElement(self.ctx, self.ctx.pow(self.h, k))

    def __bool__(self):
        return self.h != 0

    def __repr__(self):
        return f"FFElement({self.h} in GF({self.ctx.p}^{self.ctx.n}))"

    def frobenius(self, k: int = 1) -> "FFElement":
        """Image under the relative Frobenius x -> x^(q^k); k may be any int."""
        h = self.h
        for _ in range(k % self.ctx.m):
            h = int(self.ctx.frob[h])
        return FFElement(self.ctx, h)

    def trace_to_base(self) -> "FFElement":
        return FFElement(self.ctx, int(self.ctx.tr_q[self.h]))

    def absolute_trace(self) -> int:
        return int(self.ctx.tr_p[self.h])

    def log(self) -> int:
        if self.h == 0:
            raise ZeroElement("log of zero")
        return int(self.ctx.log[self.h])

    def mult_order(self) -> int:
        return self.ctx.mult_order(self.h)

    def is_extension_generator(self) -> bool:
        return self.ctx.is_extension_generator(self.h)

    def in_subfield(self) -> bool:
        return int(self.ctx.frob[self.h]) == self.h

    def digits(self) -> list[int]:
        return _handle_digits(self.h, self.ctx.p, self.ctx.n)


class TowerContext:
    """All tables for one realization of F_{q^m} over F_q.

    Heavy derived data (character tables, order tables, scan flags) is
    hosted by the modules that own it, stashed under string keys in
    self.cache so a context built once serves every layer.
    """

    def __init__(self, p: int, s: int, m: int, seed: int, size_cap: int):
        if not is_prime(p):
            raise NonPrime(f"characteristic {p} is not prime")
        if s < 1 or m < 2:
            raise ValueError("need s >= 1 and m >= 2")
        n = s * m
        Q = p**n
        if Q > size_cap:
            raise SizeExceeded(f"{p}^{n} = {Q} exceeds the size cap {size_cap}")
        self.p, self.s, self.m, self.n = p, s, m, n
        self.q = p**s
        self.Q = Q
        self.N = Q - 1
        self.seed = seed
        self.qm1_fact = factor_int(self.N)
        self.modulus = tuple(_find_modulus(p, n, seed))
        self.gamma = _find_gamma(p, list(self.modulus), self.qm1_fact)

        # multiplication-by-gamma as a digit matrix; column i is gamma*t^i
        gpoly = _ptrim(_handle_digits(self.gamma, p, n))
        mat = np.zeros((n, n), dtype=np.int64)
        col = gpoly
        for i in range(n):
            for j, c in enumerate(col):
                mat[j, i] = c
            col = _pmod([0] + list(col), list(self.modulus), p) if col else []
        self.exp = kernels.pow_table(p, self.N, mat)
        self.log = np.full(Q, -1, dtype=np.int64)
        self.log[self.exp] = np.arange(self.N, dtype=np.int64)
        if self.log[0] != -1 or (self.log[1:] < 0).any():
            raise AssertionError("exp table is not a bijection; gamma order wrong")

        lg = self.log[1:]
        self.frob = np.zeros(Q, dtype=np.int64)
        self.frob[1:] = self.exp[(lg * self.q) % self.N]
        fixed = np.nonzero(self.frob == np.arange(Q, dtype=np.int64))[0]
        if len(fixed) != self.q:
            raise AssertionError("subfield size mismatch")
        self.subfield = fixed  # sorted handles of F_q, subfield[0] == 0
        self.sub_index = np.full(Q, -1, dtype=np.int64)
        self.sub_index[fixed] = np.arange(self.q)

        # traces, via linearity over the power basis
        basis = [p**i for i in range(n)]
        tau = np.array([self._trace_scalar(b, p, n) for b in basis], dtype=np.int64)
        D = kernels.handles_to_digits(np.arange(Q, dtype=np.int64), p, n)
        self.tr_p = np.asarray((D @ tau) % p, dtype=np.int16)
        trq_mat = np.stack(
            [kernels.handles_to_digits(np.int64(self._trace_scalar(b, self.q, m)), p, n) for b in basis]
        )
        self.tr_q = kernels.digits_to_handles(D @ trq_mat % p, p)
        del D
        sub = self.subfield
        self.trqp = np.array([self._trace_scalar(int(y), p, s) for y in sub], dtype=np.int16)
        self.cache: dict = {}

    def _trace_scalar(self, a: int, base: int, terms: int) -> int:
        """Sum of a^(base^i) for i < terms, using the exp/log tables."""
        if a == 0:
            return 0
        acc, lg = a, int(self.log[a])
        for _ in range(terms - 1):
            lg = lg * base % self.N
            acc = self.add(acc, int(self.exp[lg]))
        return acc

    # -- scalar handle arithmetic ------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p, acc, w = self.p, 0, 1
        while a or b:
            acc += (a % p + b % p) % p * w
            a //= p
            b //= p
            w *= p
        return acc

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        p, acc, w = self.p, 0, 1
        while a:
            acc += (p - a % p) % p * w
            a //= p
            w *= p
        return acc

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(self.log[a] + self.log[b]) % self.N])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp[(self.N - self.log[a]) % self.N])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k == 0:
                return 1
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        return int(self.exp[(self.log[a] * k) % self.N])

    # -- vector handle arithmetic ------------------------------------------

    def vadd(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return A ^ B
        da = kernels.handles_to_digits(A, self.p, self.n)
        db = kernels.handles_to_digits(B, self.p, self.n)
        return kernels.digits_to_handles((da + db) % self.p, self.p)

    def vmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        out = np.zeros(np.broadcast(A, B).shape, dtype=np.int64)
        nz = (A != 0) & (B != 0)
        la = self.log[np.broadcast_to(A, out.shape)[nz]]
        lb = self.log[np.broadcast_to(B, out.shape)[nz]]
        out[nz] = self.exp[(la + lb) % self.N]
        return out

    # -- element factory and queries ---------------------------------------

    def element(self, h: int) -> FFElement:
        if not 0 <= h < self.Q:
            raise ValueError(f"handle {h} out of range for a field of size {self.Q}")
        return FFElement(self, h)

    def zero(self) -> FFElement:
        return FFElement(self, 0)

    def one(self) -> FFElement:
        return FFElement(self, 1)

    def gamma_element(self) -> FFElement:
        return FFElement(self, self.gamma)

    def mult_order(self, h: int) -> int:
        if h == 0:
            raise ZeroElement("order of zero is undefined")
        o, lg = self.N, int(self.log[h])
        for r, e in self.qm1_fact.factors:
            for _ in range(e):
                if o % r == 0 and lg * (o // r) % self.N == 0:
                    o //= r
                else:
                    break
        return o

    def is_extension_generator(self, h: int) -> bool:
        if h == 0:
            return False
        cur, d = int(self.frob[h]), 1
        while cur != h:
            cur = int(self.frob[cur])
            d += 1
        return d == self.m

    def generator_mask(self) -> np.ndarray:
        """Boolean mask over handles of the generators of F_{q^m} over F_q."""
        mask = self.cache.get("generator_mask")
        if mask is None:
            mask = np.ones(self.Q, dtype=bool)
            mask[0] = False
            lg = self.log[1:]
            for ell in {f for f, _ in factor_int(self.m).factors}:
                d = self.m // ell
                period = self.N // (self.q**d - 1)
                mask[1:] &= lg % period != 0
            self.cache["generator_mask"] = mask
        return mask

    def enumerate_extension_generators(self):
        for h in np.nonzero(self.generator_mask())[0]:
            yield FFElement(self, int(h))

    def subfield_elements(self) -> list[FFElement]:
        return [FFElement(self, int(h)) for h in self.subfield]

    def __repr__(self):
        return f"TowerContext(p={self.p}, s={self.s}, m={self.m}, seed={self.seed})"


def field_arith(a: FFElement, b: FFElement, op: str) -> FFElement:
    """Dispatch add/sub/mul/div on two elements of the same context."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


@lru_cache(maxsize=16)
def _build(p: int, s: int, m: int, seed: int, size_cap: int) -> TowerContext:
    return TowerContext(p, s, m, seed, size_cap)


def build_tower(p: int, s: int, m: int, seed: int = DEFAULT_SEED, size_cap: int = DEFAULT_SIZE_CAP) -> TowerContext:
    """Construct (or fetch from the in-process cache) a tower F_{q^m}/F_q."""
    return _build(p, s, m, seed, size_cap)
