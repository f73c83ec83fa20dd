"""Freeness characteristic functions for primitivity and normality sieves.

An element is e-free when no d-th root of it exists inside the field for
any divisor d > 1 of e, equivalently gcd(e, (q^m-1)/ord) = 1; it is g-free
for a divisor g of x^m - 1 when its q-order polynomial has cofactor prime
to g.  (q^m-1)-free means primitive; (x^m-1)-free means normal over F_q.

rho_e and kappa_g are the indicator-with-density expansions of those
properties as character sums.  Both the direct order tests and the
character formulas are implemented independently so either can audit the
other; vectorized tables back the bulk sweeps.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

from . import kernels
from .characters import (
    AddChar,
    MultChar,
    add_chars_of_fq_order,
    linearized_apply,
    ord_psi_table,
    proots,
    xm1_divisors,
    xm1_factorization,
    zroots,
)
from .errors import NotADivisor, PreconditionFailed, ZeroElement
from .intfuncs import factor_int
from .polyring import PolyQ, factor_poly, xm1_poly, xm1_radical
from .tower import FFElement, TowerContext


def epsilon_int(e: int) -> Fraction:
    """phi(e)/e, the density weight of e-freeness."""
    f = factor_int(e)
    return Fraction(f.phi(), e)


def epsilon_poly(g: PolyQ) -> Fraction:
    """Phi(g)/q^deg(g), the density weight of g-freeness."""
    if g.degree == 0:
        return Fraction(1)
    fact = factor_poly(g, seed=g.ctx.seed)
    return Fraction(fact.phi_units(), g.ctx.q**g.degree)


# -- element q-orders ---------------------------------------------------------


def ord_elem_table(ctx: TowerContext) -> np.ndarray:
    """Index into xm1_divisors of the q-order polynomial of every element.

    The q-order of a is the least monic divisor g of x^m - 1 whose
    linearized operator annihilates a; by F_p-linearity that is one digit
    matrix test per divisor, applied to all handles at once.
    """
    tbl = ctx.cache.get("ord_elem")
    if tbl is None:
        p, n, Q = ctx.p, ctx.n, ctx.Q
        divs = xm1_divisors(ctx)
        tbl = np.full(Q, -1, dtype=np.int64)
        D = kernels.handles_to_digits(np.arange(Q, dtype=np.int64), p, n)
        basis = [p**i for i in range(n)]
        for di, g in enumerate(divs):
            M = np.array(
                [kernels.handles_to_digits(np.int64(linearized_apply(g, b)), p, n) for b in basis],
                dtype=np.int64,
            )
            killed = ~np.any(D @ M % p, axis=1)
            newly = killed & (tbl < 0)
            tbl[newly] = di
        if (tbl < 0).any():
            raise AssertionError("some element matched no divisor of x^m - 1")
        ctx.cache["ord_elem"] = tbl
    return tbl


def fq_order_of_element(a: FFElement) -> PolyQ:
    """Least monic divisor of x^m - 1 annihilating a (the q-order of a)."""
    return xm1_divisors(a.ctx)[int(ord_elem_table(a.ctx)[a.h])]


def _divisor_index(ctx: TowerContext, g: PolyQ) -> int:
    for i, d in enumerate(xm1_divisors(ctx)):
        if d.coeffs == g.coeffs:
            return i
    raise NotADivisor("not a monic divisor of x^m - 1")


def _exponent_vectors(ctx: TowerContext) -> np.ndarray:
    """Factor-exponent vector of each monic divisor of x^m - 1."""
    vecs = ctx.cache.get("xm1_div_exps")
    if vecs is None:
        fact = xm1_factorization(ctx)
        vecs = np.array([fact.exponent_of(d) for d in xm1_divisors(ctx)], dtype=np.int64)
        ctx.cache["xm1_div_exps"] = vecs
    return vecs


# -- direct freeness tests ----------------------------------------------------


def is_efree(a: FFElement, e: int) -> bool:
    """e-freeness by the cofactor test gcd(e, (q^m-1)/ord(a)) = 1."""
    ctx = a.ctx
    if a.h == 0:
        raise ZeroElement("zero is not e-free for any e")
    if ctx.N % e != 0:
        raise NotADivisor(f"{e} does not divide {ctx.N}")
    return gcd(e, ctx.N // ctx.mult_order(a.h)) == 1

def is_primitive(a: FFElement) -> bool:
    return a.h != 0 and a.ctx.mult_order(a.h) == a.ctx.N


def is_gfree(a: FFElement, g: PolyQ) -> bool:
    """g-freeness by the cofactor test on q-order exponent vectors."""
    ctx = a.ctx
    gi = _divisor_index(ctx, g)
    vecs = _exponent_vectors(ctx)
    full = vecs[-1]
    oi = int(ord_elem_table(ctx)[a.h])
    cof = full - vecs[oi]
    return not np.any((vecs[gi] > 0) & (cof > 0))


def is_normal(a: FFElement) -> bool:
    """Normal over F_q, i.e. q-order exactly x^m - 1."""
    tbl = ord_elem_table(a.ctx)
    return int(tbl[a.h]) == len(xm1_divisors(a.ctx)) - 1


# -- character-sum sides --------------------------------------------------


def _mult_sum_table(ctx: TowerContext, d: int) -> np.ndarray:
    """T_d over all handles: the sum of all order-d multiplicative chars."""
    cache = ctx.cache.setdefault("Tmult", {})
    tbl = cache.get(d)
    if tbl is None:
        Z = zroots(ctx)
        tbl = np.zeros(ctx.Q, dtype=np.complex128)
        if d == 1:
            tbl[:] = 1.0
        else:
            lg = ctx.log[1:]
            step = ctx.N // d
            for k in range(d):
                if gcd(k, d) == 1:
                    tbl[1:] += Z[(step * k) * lg % ctx.N]
        cache[d] = tbl
    return tbl


def _add_sum_table(ctx: TowerContext, f_index: int) -> np.ndarray:
    """T_f over all handles: the sum of additive chars of base order f."""
    cache = ctx.cache.setdefault("Tadd", {})
    tbl = cache.get(f_index)
    if tbl is None:
        Zp = proots(ctx)
        ords = ord_psi_table(ctx)
        cs = np.nonzero(ords == f_index)[0]
        tbl = np.zeros(ctx.Q, dtype=np.complex128)
        lg = ctx.log
        prods = np.zeros(ctx.Q, dtype=np.int64)
        for c in cs:
            if c == 0:
                tbl += 1.0
                continue
            lc = int(lg[c])
            prods[1:] = ctx.exp[(lc + lg[1:]) % ctx.N]
            prods[0] = 0
            tbl += Zp[ctx.tr_p[prods]]
        cache[f_index] = tbl
    return tbl


def rho(a: FFElement, e: int) -> complex:
    """Character-sum form of the e-freeness indicator at a."""
    ctx = a.ctx
    if a.h == 0:
        raise ZeroElement("rho is defined on nonzero elements")
    if ctx.N % e != 0:
        raise NotADivisor(f"{e} does not divide {ctx.N}")
    eps = epsilon_int(e)
    acc = 0j
    for d in factor_int(e).squarefree_divisors():
        mu = factor_int(d).mu()
        phi = factor_int(d).phi()
        acc += Fraction(mu, phi) * _mult_sum_table(ctx, d)[a.h]
    return complex(eps * acc)


def rho_table(ctx: TowerContext, e: int) -> np.ndarray:
    """rho(., e) over every handle (index 0 is meaningless, set to 0)."""
    if ctx.N % e != 0:
        raise NotADivisor(f"{e} does not divide {ctx.N}")
    eps = float(epsilon_int(e))
    acc = np.zeros(ctx.Q, dtype=np.complex128)
    for d in factor_int(e).squarefree_divisors():
        f = factor_int(d)
        acc += (f.mu() / f.phi()) * _mult_sum_table(ctx, d)
    acc *= eps
    acc[0] = 0.0
    return acc


def kappa(a: FFElement, g: PolyQ) -> complex:
    """Character-sum form of the g-freeness indicator at a."""
    ctx = a.ctx
    gi = _divisor_index(ctx, g)
    return complex(kappa_table(ctx, gi)[a.h])


def kappa_table(ctx: TowerContext, g_index: int, squarefree_only_of: int | None = None) -> np.ndarray:
    """kappa(., g) over every handle for the g at g_index in xm1_divisors.

    With squarefree_only_of set, the sum is restricted to divisors f of
    that other divisor as well (used for the sieve's split into parts).
    """
    divs = xm1_divisors(ctx)
    vecs = _exponent_vectors(ctx)
    g = divs[g_index]
    eps = float(epsilon_poly(g))
    gvec = vecs[g_index]
    limit = vecs[squarefree_only_of] if squarefree_only_of is not None else None
    acc = np.zeros(ctx.Q, dtype=np.complex128)
    for fi, f in enumerate(divs):
        fvec = vecs[fi]
        if np.any(fvec > 1) or np.any(fvec > gvec):
            continue
        if limit is not None and np.any(fvec > limit):
            continue
        fact = factor_poly(f, seed=ctx.seed) if f.degree > 0 else None
        mu = 1 if f.degree == 0 else fact.mu_prime()
        if mu == 0:
            continue
        phi = 1 if f.degree == 0 else fact.phi_units()
        acc += (mu / phi) * _add_sum_table(ctx, fi)
    acc *= eps
    return acc


def kappa_radical_reduction(a: FFElement) -> tuple[complex, complex]:
    """kappa at x^m - 1 and at its radical x^m0 - 1; the two freeness tests
    agree elementwise even though the weights differ."""
    ctx = a.ctx
    full = is_gfree(a, xm1_poly(ctx))
    rad = is_gfree(a, xm1_radical(ctx))
    return full, rad


# -- masks for bulk scans -------------------------------------------------


def primitive_mask(ctx: TowerContext) -> np.ndarray:
    mask = ctx.cache.get("primitive_mask")
    if mask is None:
        mask = np.zeros(ctx.Q, dtype=bool)
        mask[1:] = np.gcd(ctx.log[1:], ctx.N) == 1
        ctx.cache["primitive_mask"] = mask
    return mask


def normal_mask(ctx: TowerContext) -> np.ndarray:
    mask = ctx.cache.get("normal_mask")
    if mask is None:
        tbl = ord_elem_table(ctx)
        mask = tbl == len(xm1_divisors(ctx)) - 1
        ctx.cache["normal_mask"] = mask
    return mask


def type_mask(ctx: TowerContext, kind: str) -> np.ndarray:
    if kind == "primitive":
        return primitive_mask(ctx)
    if kind == "normal":
        return normal_mask(ctx)
    if kind == "primitive-normal":
        return primitive_mask(ctx) & normal_mask(ctx)
    raise ValueError(f"unknown element type {kind!r}")


def type_flag_by_log(ctx: TowerContext, kind: str) -> np.ndarray:
    """uint8 flag over discrete logs (nonzero elements only)."""
    key = ("type_log", kind)
    flag = ctx.cache.get(key)
    if flag is None:
        mask = type_mask(ctx, kind)
        flag = mask[ctx.exp].astype(np.uint8)
        ctx.cache[key] = flag
    return flag


# -- the base-order / generator equivalence on prime-degree towers --------


def gfree_generator_equivalence(ctx: TowerContext) -> tuple[bool, list[int]]:
    """On towers with m prime and q primitive mod m, being free of
    (x^m-1)/(x-1) is the same as generating the extension.  Returns the
    exhaustive verdict and any counterexample handles."""
    m = ctx.m
    if len(factor_int(m).factors) != 1 or factor_int(m).factors[0][1] != 1:
        raise PreconditionFailed("m must be prime")
    o, t = 1, ctx.q % m
    while t != 1:
        t = t * ctx.q % m
        o += 1
    if o != m - 1:
        raise PreconditionFailed("q must be primitive modulo m")
    g0 = g0_poly(ctx)
    gi = _divisor_index(ctx, g0)
    vecs = _exponent_vectors(ctx)
    full, gvec = vecs[-1], vecs[gi]
    cof = full[None, :] - vecs[ord_elem_table(ctx)]
    free = ~np.any((gvec[None, :] > 0) & (cof > 0), axis=1)
    gens = ctx.generator_mask()
    bad = np.nonzero(free != gens)[0]
    return len(bad) == 0, [int(b) for b in bad]


def g0_poly(ctx: TowerContext) -> PolyQ:
    """(x^m - 1)/(x - 1), the modulus of additive characters trivial on F_q."""
    g0 = ctx.cache.get("g0")
    if g0 is None:
        num = xm1_poly(ctx)
        den = PolyQ(ctx, [ctx.neg(1), 1])
        g0 = PolyQ(ctx, (num // den).coeffs)
        ctx.cache["g0"] = g0
    return g0


def gfree_mask(ctx: TowerContext, g_index: int) -> np.ndarray:
    """Boolean g-freeness of every handle for the divisor at g_index."""
    vecs = _exponent_vectors(ctx)
    cof = vecs[-1][None, :] - vecs[ord_elem_table(ctx)]
    return ~np.any((vecs[g_index][None, :] > 0) & (cof > 0), axis=1)
