"""Primitive and normal elements on lines and translates.

A translate is theta + F_q for a generator theta; a line is alpha(theta +
F_q).  Because alpha(theta + x) = alphatheta + alpha x and F_q^* scaling
fixes both F_q and the set of generators, every line with alpha in F_q^*
IS a translate of another generator, and a general line is a direction
coset representative times a translate.  The scans exploit that: translate
classes of generators down the rows, direction shifts (as discrete-log
offsets) across the columns, and a flag array over logs for the element
type.  Witnesses that a scan reports are always re-verified by the scalar
counting path before they leave this module.

The lower-bound side evaluates the sieve decomposition of the primitive-
normal count over a qualifying line (alphatheta free of (x^m-1)/(x-1))
into a main term q/eps((x^m-1)/(x-1)) and two character-sum remainders,
each with its own degree-counted ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import (
    HypothesisFailed,
    NotAGenerator,
    PreconditionFailed,
    SizeExceeded,
    ZeroElement,
)
from .freeness import (
    epsilon_int,
    epsilon_poly,
    fq_order_of_element,
    g0_poly,
    is_gfree,
    kappa_table,
    rho_table,
    type_flag_by_log,
    type_mask,
)
from .characters import xm1_divisors, xm1_factorization
from .intfuncs import factor_int, is_prime, prime_power_split, prime_powers_up_to
from .polyring import factor_poly, xm1_poly
from .tower import DEFAULT_SEED, DEFAULT_SIZE_CAP, FFElement, TowerContext, build_tower

_SCOPES = ("translate", "weak", "full")


def canonical_type(name: str) -> str:
    t = name.strip().lower().replace("_", "-")
    if t in ("primitive", "normal", "primitive-normal"):
        return t
    if t == "pn":
        return "primitive-normal"
    raise ValueError(f"unknown element type {name!r}")


@dataclass(frozen=True)
class LineSpec:
    """One line alpha(theta + F_q), tagged with its quantifier scope."""

    theta: FFElement
    alpha: FFElement
    scope: str

    def __post_init__(self):
        if self.scope not in _SCOPES:
            raise PreconditionFailed(f"scope must be one of {_SCOPES}")
        if self.alpha.h == 0:
            raise ZeroElement("alpha must be nonzero")
        if not self.theta.is_extension_generator():
            raise NotAGenerator("theta must generate the extension")
        if self.scope == "translate" and self.alpha.h != 1:
            raise PreconditionFailed("translate scope requires alpha = 1")
        if self.scope == "weak" and not self.alpha.in_subfield():
            raise PreconditionFailed("weak scope requires alpha in F_q^*")

    @property
    def ctx(self) -> TowerContext:
        return self.theta.ctx

    def points(self) -> np.ndarray:
        """The q handles alpha(theta + x), x over F_q."""
        ctx = self.ctx
        return ctx.vmul(self.alpha.h, ctx.vadd(self.theta.h, ctx.subfield))

    def base_point(self) -> FFElement:
        """alpha * theta, the pivot the sieve hypothesis speaks about."""
        return self.alpha * self.theta


@dataclass
class QPropertyResult:
    q: int
    m: int
    property_name: str
    element_type: str
    passed: bool
    n_lines: int
    witness: LineSpec | None
    in_hypothesis: bool = True
    note: str = ""


@dataclass
class ScanReport:
    m: int
    property_name: str
    element_type: str
    q_list: list[int]
    entries: list[QPropertyResult]
    failures: list[tuple[int, LineSpec]]
    largest_failing_q: int | None
    scan_limit: int
    skipped: list[tuple[int, str]] = field(default_factory=list)


def count_on_line(line: LineSpec, element_type: str) -> int:
    """Exact number of points of the line with the required property.

    Deliberately scalar and order-based: multiplicative order against
    q^m - 1 for primitivity, the q-order polynomial against x^m - 1 for
    normality.  Scan verdicts are re-checked through this path.
    """
    element_type = canonical_type(element_type)
    ctx = line.ctx
    xm1 = xm1_poly(ctx)
    count = 0
    for h in line.points():
        h = int(h)
        if h == 0:
            continue
        ok = True
        if element_type in ("primitive", "primitive-normal"):
            ok = ctx.mult_order(h) == ctx.N
        if ok and element_type in ("normal", "primitive-normal"):
            ok = fq_order_of_element(ctx.element(h)).coeffs == xm1.coeffs
        count += ok
    return count


# -- translate classes and scan machinery ----------------------------------


def translate_class_reps(ctx: TowerContext) -> np.ndarray:
    """Smallest handle of each translate class of extension generators.

    theta + u generates the same extension for every u in F_q, so the
    generators split into whole translates; one representative stands for
    each.
    """
    reps = ctx.cache.get("translate_reps")
    if reps is None:
        gens = np.nonzero(ctx.generator_mask())[0]
        sub = ctx.subfield
        mins = np.empty(len(gens), dtype=np.int64)
        chunk = max(1, (1 << 22) // max(1, len(sub)))
        for lo in range(0, len(gens), chunk):
            hi = min(lo + chunk, len(gens))
            block = gens[lo:hi]
            if ctx.p == 2:
                pts = block[:, None] ^ sub[None, :]
            else:
                d1 = kernels.handles_to_digits(block, ctx.p, ctx.n)
                d2 = kernels.handles_to_digits(sub, ctx.p, ctx.n)
                pts = kernels.digits_to_handles(
                    (d1[:, None, :] + d2[None, :, :]) % ctx.p, ctx.p
                )
            mins[lo:hi] = pts.min(axis=1)
        reps = np.unique(mins)
        if len(reps) * ctx.q != len(gens):
            raise AssertionError("generator translates failed to partition evenly")
        ctx.cache["translate_reps"] = reps
    return reps


def _class_log_lines(ctx: TowerContext, reps: np.ndarray) -> np.ndarray:
    L = ctx.cache.get("translate_log_lines")
    if L is None:
        L = np.empty((len(reps), ctx.q), dtype=np.int64)
        for i, r in enumerate(reps):
            L[i] = ctx.log[ctx.vadd(int(r), ctx.subfield)]
        ctx.cache["translate_log_lines"] = L
    return L


def _direction_offsets(ctx: TowerContext, property_name: str) -> np.ndarray:
    """Log shifts covering the property's alpha quantifier, deduplicated."""
    q, N = ctx.q, ctx.N
    if property_name == "tp":
        return np.zeros(1, dtype=np.int64)
    if property_name == "wlp":
        return (N // (q - 1)) * np.arange(q - 1, dtype=np.int64)
    if property_name == "lp":
        return np.arange(N // (q - 1), dtype=np.int64)
    raise ValueError(f"unknown property {property_name!r}")


def is_primitive_residue(q: int, m: int) -> bool:
    """Does q generate the multiplicative group modulo m?"""
    if math.gcd(q, m) != 1:
        return False
    order, t = 1, q % m
    while t != 1:
        t = t * q % m
        order += 1
    target = factor_int(m).phi()
    return order == target


def _in_hypothesis(q: int, m: int, property_name: str, element_type: str) -> tuple[bool, str]:
    if element_type == "primitive-normal" and property_name in ("tp", "wlp") and is_prime(m):
        if is_primitive_residue(q, m):
            return True, ""
        return False, "outside hypothesis: q not primitive modulo m"
    return True, ""


def property_check(
    q: int,
    m: int,
    property_name: str,
    element_type: str,
    *,
    ctx: TowerContext | None = None,
    threads: int = 1,
    seed: int = DEFAULT_SEED,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> QPropertyResult:
    """Exhaustively decide one property for one field.

    Every line the property quantifies over is covered exactly once after
    the translate/direction deduplication; a failure comes back with the
    offending line, re-verified by scalar counting.
    """
    element_type = canonical_type(element_type)
    if ctx is None:
        p, s = prime_power_split(q)
        ctx = build_tower(p, s, m, seed=seed, size_cap=size_cap)
    if ctx.q != q or ctx.m != m:
        raise PreconditionFailed("context does not match the requested field")
    flag = type_flag_by_log(ctx, element_type)
    reps = translate_class_reps(ctx)
    L = _class_log_lines(ctx, reps)
    offsets = _direction_offsets(ctx, property_name)
    C = len(reps)

    if threads > 1 and C > 1:
        n_chunks = min(C, threads * 4)
        cuts = np.linspace(0, C, n_chunks + 1, dtype=int)
        spans = [(int(a), int(b)) for a, b in zip(cuts[:-1], cuts[1:]) if a < b]
        found = np.empty((len(offsets), C), dtype=np.uint8)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(lambda sp: kernels.scan_found(L[sp[0] : sp[1]], offsets, flag), spans)
            for sp, part in zip(spans, parts):
                found[:, sp[0] : sp[1]] = part
    else:
        found = kernels.scan_found(L, offsets, flag)

    in_hyp, note = _in_hypothesis(q, m, property_name, element_type)
    n_lines = len(offsets) * C
    misses = np.argwhere(found == 0)
    if len(misses) == 0:
        return QPropertyResult(q, m, property_name, element_type, True, n_lines, None, in_hyp, note)
    d, c = (int(v) for v in misses[np.lexsort((misses[:, 1], misses[:, 0]))[0]])
    scope = {"tp": "translate", "wlp": "weak", "lp": "full"}[property_name]
    witness = LineSpec(
        theta=ctx.element(int(reps[c])),
        alpha=ctx.element(int(ctx.exp[int(offsets[d])])),
        scope=scope,
    )
    if count_on_line(witness, element_type) != 0:
        raise AssertionError("scan reported a miss the scalar count contradicts")
    return QPropertyResult(q, m, property_name, element_type, False, n_lines, witness, in_hyp, note)


def scan_constants(
    m: int,
    q_max: int,
    property_name: str,
    element_type: str,
    *,
    require_primitive_residue: bool = False,
    threads: int = 1,
    seed: int = DEFAULT_SEED,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> ScanReport:
    """Scan all prime powers q <= q_max for the property, in increasing q.

    Results are exact per q; the report never claims more than the scanned
    range (largest failing q relative to scan_limit).  Out-of-hypothesis q
    are still checked and labeled unless require_primitive_residue skips
    them.
    """
    element_type = canonical_type(element_type)
    if property_name not in ("tp", "wlp", "lp"):
        raise ValueError(f"unknown property {property_name!r}")
    q_list: list[int] = []
    entries: list[QPropertyResult] = []
    failures: list[tuple[int, LineSpec]] = []
    skipped: list[tuple[int, str]] = []
    scan_limit = 0
    for q in prime_powers_up_to(q_max):
        if q**m > size_cap:
            skipped.append((q, f"q^m = {q**m} exceeds size cap {size_cap}"))
            continue
        in_hyp, _ = _in_hypothesis(q, m, property_name, element_type)
        if require_primitive_residue and not in_hyp:
            skipped.append((q, "q not primitive modulo m"))
            continue
        try:
            entry = property_check(
                q, m, property_name, element_type,
                threads=threads, seed=seed, size_cap=size_cap,
            )
        except SizeExceeded as exc:
            skipped.append((q, str(exc)))
            continue
        q_list.append(q)
        entries.append(entry)
        scan_limit = max(scan_limit, q)
        if not entry.passed and entry.in_hypothesis:
            failures.append((q, entry.witness))
    largest = max((q for q, _ in failures), default=None)
    return ScanReport(
        m=m,
        property_name=property_name,
        element_type=element_type,
        q_list=q_list,
        entries=entries,
        failures=failures,
        largest_failing_q=largest,
        scan_limit=scan_limit,
        skipped=skipped,
    )


# -- the sieve lower bound --------------------------------------------------


def _w_int(n: int) -> int:
    return factor_int(n).w_count()


def sieve_stats(ctx: TowerContext) -> dict:
    """Per-field constants of the sieve bound, exact where possible."""
    stats = ctx.cache.get("sieve_stats")
    if stats is None:
        xm1 = xm1_poly(ctx)
        g0 = g0_poly(ctx)
        xf = xm1_factorization(ctx)
        g0f = factor_poly(g0, seed=ctx.seed)
        w_xm1 = xf.w_count()
        if w_xm1 > 2**ctx.m:
            raise AssertionError("squarefree divisor count of x^m - 1 exceeds 2^m")
        stats = {
            "eps_N": epsilon_int(ctx.N),
            "eps_xm1": epsilon_poly(xm1),
            "eps_g0": epsilon_poly(g0),
            "W_N": _w_int(ctx.N),
            "W_xm1": w_xm1,
            "W_g0": g0f.w_count(),
        }
        ctx.cache["sieve_stats"] = stats
    return stats


def lower_bound_N(q: int, m: int, *, ctx: TowerContext | None = None,
                  seed: int = DEFAULT_SEED, size_cap: int = DEFAULT_SIZE_CAP) -> float:
    """Sieve lower bound for the primitive normal count on a qualifying line.

    eps(q^m-1) eps(x^m-1) [ q / eps((x^m-1)/(x-1)) - W(q^m-1) W(x^m-1) sqrt(q) ].
    Epsilons are exact rationals, the W's integers; only sqrt(q) floats.
    The value is frequently negative, which just means no information.
    """
    if ctx is None:
        p, s = prime_power_split(q)
        ctx = build_tower(p, s, m, seed=seed, size_cap=size_cap)
    st = sieve_stats(ctx)
    main = Fraction(q) / st["eps_g0"]
    defect = st["W_N"] * st["W_xm1"] * math.sqrt(q)
    return float(st["eps_N"] * st["eps_xm1"]) * (float(main) - defect)


def verify_lower_bound(line: LineSpec) -> dict:
    """Check count >= bound on one qualifying line.

    The hypothesis is that alpha lies in F_q^* and alpha*theta is
    (x^m-1)/(x-1)-free; lines that break it raise HypothesisFailed.
    """
    ctx = line.ctx
    if line.scope == "full" and not line.alpha.in_subfield():
        raise HypothesisFailed("the bound needs alpha in F_q^*")
    beta = line.base_point()
    if not is_gfree(beta, g0_poly(ctx)):
        raise HypothesisFailed("alpha*theta is not (x^m-1)/(x-1)-free")
    count = count_on_line(line, "primitive-normal")
    bound = lower_bound_N(ctx.q, ctx.m, ctx=ctx)
    return {"count": count, "bound": bound, "holds": count >= bound - 1e-9}


# -- sieve decomposition over a line ----------------------------------------


def _sieve_tables(ctx: TowerContext) -> dict:
    """Unscaled character-sum tables entering the three sieve portions."""
    tables = ctx.cache.get("sieve_tables")
    if tables is None:
        divs = xm1_divisors(ctx)
        i_full = len(divs) - 1
        g0 = g0_poly(ctx)
        i_g0 = next(i for i, d in enumerate(divs) if d.coeffs == g0.coeffs)
        st = sieve_stats(ctx)
        P = rho_table(ctx, ctx.N)
        K = kappa_table(ctx, i_full)
        K0 = kappa_table(ctx, i_full, squarefree_only_of=i_g0)
        tables = {
            "P": P,
            "K": K,
            "Pu": P / float(st["eps_N"]),
            "Ku": K / float(st["eps_xm1"]),
            "K0u": K0 / float(st["eps_xm1"]),
        }
        tables["Pu"][0] = 1.0  # rho_table blanks the zero handle; unused on lines
        ctx.cache["sieve_tables"] = tables
    return tables


def sieve_count_on_line(line: LineSpec) -> float:
    """The primitive-normal count evaluated purely through character sums."""
    t = _sieve_tables(line.ctx)
    pts = line.points()
    return float(np.sum(t["P"][pts] * t["K"][pts]).real)


def sieve_portions(line: LineSpec) -> dict:
    """Split the sieve count into main term and two remainders, with bounds.

    S1 collects the trivial chi with additive orders dividing
    (x^m-1)/(x-1); S2 the trivial chi with the remaining additive orders;
    S3 everything with nontrivial chi.  On a qualifying line S1 is exactly
    q/eps((x^m-1)/(x-1)) and S2, S3 obey degree-counted ceilings.
    """
    ctx = line.ctx
    if line.scope == "full" and not line.alpha.in_subfield():
        raise PreconditionFailed("sieve portions are defined for alpha in F_q^*")
    t = _sieve_tables(ctx)
    st = sieve_stats(ctx)
    pts = line.points()
    S1 = complex(np.sum(t["K0u"][pts]))
    S2 = complex(np.sum(t["Ku"][pts] - t["K0u"][pts]))
    S3 = complex(np.sum((t["Pu"][pts] - 1.0) * t["Ku"][pts]))
    total = float(st["eps_N"] * st["eps_xm1"]) * (S1 + S2 + S3)
    rq = math.sqrt(ctx.q)
    qualifies = is_gfree(line.base_point(), g0_poly(ctx))
    return {
        "S1": S1,
        "S2": S2,
        "S3": S3,
        "count_from_sieve": total.real,
        "s1_expected": Fraction(ctx.q) / st["eps_g0"],
        "s2_ceiling": (st["W_xm1"] - st["W_g0"]) * ctx.m * rq,
        "s3_ceiling": (st["W_N"] - 1) * st["W_xm1"] * ctx.m * rq,
        "qualifies": qualifies,
    }
