"""Multiplicative and additive characters of the tower and its base field.

Values are double-precision complex numbers built from exact rational
angles: a character never evaluates through floating-point logarithms,
only through integer index arithmetic into a table of roots of unity.

Conventions.  The multiplicative character of index j sends gamma^k to
exp(2 pi i j k / (q^m - 1)); a nontrivial one is 0 at 0 while the trivial
one is 1 everywhere including 0.  The additive character of parameter c
sends a to zeta_p^Tr(c a) with Tr the absolute trace.  Base-field additive
characters use the base-field trace in the same way.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import NotADivisor, ZeroPolynomial
from .polyring import PolyQ, factor_poly, xm1_poly
from .tower import FFElement, TowerContext


def zroots(ctx: TowerContext) -> np.ndarray:
    """The q^m - 1 complex roots of unity indexed by discrete log."""
    tbl = ctx.cache.get("zroots")
    if tbl is None:
        tbl = np.exp(2j * np.pi * np.arange(ctx.N) / ctx.N)
        ctx.cache["zroots"] = tbl
    return tbl


def proots(ctx: TowerContext) -> np.ndarray:
    """The p complex p-th roots of unity indexed by trace value."""
    tbl = ctx.cache.get("proots")
    if tbl is None:
        tbl = np.exp(2j * np.pi * np.arange(ctx.p) / ctx.p)
        ctx.cache["proots"] = tbl
    return tbl


def xm1_factorization(ctx: TowerContext):
    fact = ctx.cache.get("xm1_fact")
    if fact is None:
        fact = factor_poly(xm1_poly(ctx), seed=ctx.seed)
        ctx.cache["xm1_fact"] = fact
    return fact


def xm1_divisors(ctx: TowerContext) -> list[PolyQ]:
    """Monic divisors of x^m - 1, ascending degree then lexicographic."""
    divs = ctx.cache.get("xm1_divisors")
    if divs is None:
        divs = xm1_factorization(ctx).monic_divisors()
        ctx.cache["xm1_divisors"] = divs
    return divs


def linearized_apply(g: PolyQ, a: FFElement | int) -> int:
    """Evaluate the q-linearized operator of g: sum of g_i * a^(q^i)."""
    ctx = g.ctx
    h = a.h if isinstance(a, FFElement) else int(a)
    acc = 0
    cur = h
    for c in g.coeffs:
        if c:
            acc = ctx.add(acc, ctx.mul(c, cur))
        cur = int(ctx.frob[cur])
    return acc


@dataclass(frozen=True)
class MultChar:
    """Multiplicative character gamma^k -> zeta_N^(j k)."""

    ctx: TowerContext
    j: int

    def __post_init__(self):
        object.__setattr__(self, "j", self.j % self.ctx.N)

    @property
    def order(self) -> int:
        return self.ctx.N // gcd(self.j, self.ctx.N)

    def is_trivial(self) -> bool:
        return self.j == 0

    def value(self, a: FFElement | int) -> complex:
        h = a.h if isinstance(a, FFElement) else int(a)
        if h == 0:
            return 1.0 + 0j if self.j == 0 else 0j
        return complex(zroots(self.ctx)[self.j * int(self.ctx.log[h]) % self.ctx.N])

    def values(self, handles: np.ndarray) -> np.ndarray:
        out = np.zeros(len(handles), dtype=np.complex128)
        hs = np.asarray(handles, dtype=np.int64)
        nz = hs != 0
        out[nz] = zroots(self.ctx)[self.j * self.ctx.log[hs[nz]] % self.ctx.N]
        if self.j == 0:
            out[~nz] = 1.0
        return out

    def conj(self) -> "MultChar":
        return MultChar(self.ctx, (-self.j) % self.ctx.N)

    def __call__(self, a):
        return self.value(a)


@dataclass(frozen=True)
class AddChar:
    """Additive character a -> zeta_p^Tr(c a) of the full field."""

    ctx: TowerContext
    c: int

    def is_trivial(self) -> bool:
        return self.c == 0

    def value(self, a: FFElement | int) -> complex:
        h = a.h if isinstance(a, FFElement) else int(a)
        t = int(self.ctx.tr_p[self.ctx.mul(self.c, h)])
        return complex(proots(self.ctx)[t])

    def values(self, handles: np.ndarray) -> np.ndarray:
        hs = np.asarray(handles, dtype=np.int64)
        prods = np.zeros(hs.shape, dtype=np.int64)
        if self.c:
            nz = hs != 0
            lc = int(self.ctx.log[self.c])
            prods[nz] = self.ctx.exp[(lc + self.ctx.log[hs[nz]]) % self.ctx.N]
        return proots(self.ctx)[self.ctx.tr_p[prods]]

    def restricted_to_base_is_trivial(self) -> bool:
        """Directly test psi(y) = 1 for every y in the base field."""
        return all(int(self.ctx.tr_p[self.ctx.mul(self.c, int(y))]) == 0 for y in self.ctx.subfield)

    def conj(self) -> "AddChar":
        return AddChar(self.ctx, self.ctx.neg(self.c))

    def __call__(self, a):
        return self.value(a)


@dataclass(frozen=True)
class AddCharQ:
    """Additive character of the base field F_q with parameter b in F_q."""

    ctx: TowerContext
    b: int

    def __post_init__(self):
        if int(self.ctx.frob[self.b]) != self.b:
            raise ValueError(f"parameter handle {self.b} is not in the base field")

    def is_trivial(self) -> bool:
        return self.b == 0

    def value(self, y: FFElement | int) -> complex:
        h = y.h if isinstance(y, FFElement) else int(y)
        prod = self.ctx.mul(self.b, h)
        idx = int(self.ctx.sub_index[prod])
        if idx < 0:
            raise ValueError("argument is not in the base field")
        return complex(proots(self.ctx)[int(self.ctx.trqp[idx])])

    def conj(self) -> "AddCharQ":
        return AddCharQ(self.ctx, self.ctx.neg(self.b))

    def __call__(self, y):
        return self.value(y)


def base_char_matrix(ctx: TowerContext) -> np.ndarray:
    """W2[b_idx, x_idx] = psi_b(x) over the sorted base field; row 0 trivial."""
    W2 = ctx.cache.get("W2")
    if W2 is None:
        q = ctx.q
        sub = ctx.subfield
        prods = np.zeros((q, q), dtype=np.int64)
        lg = ctx.log
        for i in range(q):
            b = int(sub[i])
            if b:
                lb = int(lg[b])
                nz = sub != 0
                prods[i, nz] = ctx.exp[(lb + lg[sub[nz]]) % ctx.N]
        W2 = proots(ctx)[ctx.trqp[ctx.sub_index[prods]]]
        ctx.cache["W2"] = W2
    return W2


def mult_chars_of_order(ctx: TowerContext, d: int) -> list[MultChar]:
    """All multiplicative characters of exact order d, ascending index."""
    if ctx.N % d != 0:
        raise NotADivisor(f"{d} does not divide {ctx.N}")
    step = ctx.N // d
    return [MultChar(ctx, step * k) for k in range(d) if gcd(k, d) == 1] if d > 1 else [MultChar(ctx, 0)]


def fq_order_of_add_char(psi: AddChar) -> PolyQ:
    """Minimal monic divisor g of x^m - 1 with psi trivial on the image of
    the linearized operator of g, found by direct divisor testing."""
    ctx = psi.ctx
    tbl = ord_psi_table(ctx)
    return xm1_divisors(ctx)[int(tbl[psi.c])]


def add_chars_of_fq_order(ctx: TowerContext, f: PolyQ) -> list[AddChar]:
    """All additive characters whose base-field order is exactly f."""
    if f.is_zero():
        raise ZeroPolynomial("order polynomial must be nonzero")
    divs = xm1_divisors(ctx)
    try:
        idx = next(i for i, d in enumerate(divs) if d.coeffs == f.coeffs)
    except StopIteration:
        raise NotADivisor("not a monic divisor of x^m - 1") from None
    tbl = ord_psi_table(ctx)
    return [AddChar(ctx, int(c)) for c in np.nonzero(tbl == idx)[0]]


def ord_psi_table(ctx: TowerContext) -> np.ndarray:
    """For every parameter c, the index into xm1_divisors of Ord(psi_c).

    The test for a divisor g is direct: psi_c must kill the image of the
    linearized operator of g, which by additivity reduces to the p-power
    basis.  Each divisor becomes one small F_p-linear system applied to all
    c at once.
    """
    tbl = ctx.cache.get("ord_psi")
    if tbl is None:
        from . import kernels

        p, n, Q = ctx.p, ctx.n, ctx.Q
        divs = xm1_divisors(ctx)
        tbl = np.full(Q, -1, dtype=np.int64)
        D = kernels.handles_to_digits(np.arange(Q, dtype=np.int64), p, n)
        basis = [p**i for i in range(n)]
        for di, g in enumerate(divs):
            images = [linearized_apply(g, b) for b in basis]
            images = [im for im in images if im]
            if not images:
                cond = np.ones(Q, dtype=bool)
            else:
                # row i of mat: traces tr_p(t^i * im_j); condition is
                # digits(c) @ mat == 0 for every column j
                mat = np.array(
                    [[int(ctx.tr_p[ctx.mul(b, im)]) for im in images] for b in basis],
                    dtype=np.int64,
                )
                cond = ~np.any(D @ mat % p, axis=1)
            newly = cond & (tbl < 0)
            tbl[newly] = di
        if (tbl < 0).any():
            raise AssertionError("some additive character matched no divisor")
        ctx.cache["ord_psi"] = tbl
    return tbl


def canonical_add_char(ctx: TowerContext) -> AddChar:
    return AddChar(ctx, 1)


def trivial_mult_char(ctx: TowerContext) -> MultChar:
    return MultChar(ctx, 0)
