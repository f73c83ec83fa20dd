"""Incomplete mixed character sums over the base-field line through theta.

The central object is S = sum over x in F_q of chi(theta + x) psi(x) for a
generator theta of the extension, a multiplicative character chi of
F_{q^m}, and an additive character psi of the subfield.  Scalar evaluation
is term-exact (q unit-modulus terms); the bulk sweep rewrites the whole
character table of sums as one inverse FFT per additive character and only
keeps extremes, so all pairs get checked even on the largest desk fields.

mixed sums with psi nontrivial carry the m*sqrt(q) bound, psi trivial and
chi nontrivial the (m-1)*sqrt(q) one.  fuwan_sum evaluates the rational
function generalization and attaches its degree-based bound.
"""

from __future__ import annotations

import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .characters import (
    AddCharQ,
    MultChar,
    base_char_matrix,
    mult_chars_of_order,
    zroots,
)
from .errors import ContextMismatch, NotAGenerator, UndefinedEverywhere
from .polyring import RationalFunc, coprime_part
from .tower import FFElement, TowerContext

log = logging.getLogger(__name__)

BOUND_TOLERANCE = 1e-6

# Above this many (theta, chi, psi) triples a sweep keeps only per-theta
# extremes instead of one record per triple.
MATERIALIZE_CAP = 1 << 16


@dataclass(frozen=True)
class SumRecord:
    """One evaluated character sum with its applicable bound."""

    q: int
    m: int
    theta: FFElement
    chi_index: int
    psi_param: FFElement
    value: complex
    bound: float | None
    bound_kind: str
    modulus: float = field(init=False)
    slack: float | None = field(init=False)
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "modulus", abs(self.value))
        object.__setattr__(
            self, "slack", None if self.bound is None else self.bound - self.modulus
        )

    def within_bound(self, tolerance: float = BOUND_TOLERANCE) -> bool:
        return self.slack is None or self.slack >= -tolerance


def _bound_for(ctx: TowerContext, j: int, b: int) -> tuple[float | None, str]:
    rq = math.sqrt(ctx.q)
    if b != 0:
        return ctx.m * rq, "main"
    if j % ctx.N != 0:
        return (ctx.m - 1) * rq, "katz"
    return None, "none"


def mixed_sum(theta: FFElement, chi: MultChar, psi_base: AddCharQ) -> SumRecord:
    """S = sum over x in F_q of chi(theta + x) psi_base(x), with bound."""
    ctx = theta.ctx
    if chi.ctx is not ctx or psi_base.ctx is not ctx:
        raise ContextMismatch("characters and theta must share one tower")
    if not theta.is_extension_generator():
        raise NotAGenerator("theta must generate the extension over F_q")
    pts = ctx.vadd(theta.h, ctx.subfield)
    W2 = base_char_matrix(ctx)
    row = W2[ctx.sub_index[psi_base.b]]
    value = complex(np.sum(chi.values(pts) * row))
    bound, kind = _bound_for(ctx, chi.j, psi_base.b)
    return SumRecord(
        q=ctx.q,
        m=ctx.m,
        theta=theta,
        chi_index=chi.j,
        psi_param=ctx.element(psi_base.b),
        value=value,
        bound=bound,
        bound_kind=kind,
    )


def _theta_handles(ctx: TowerContext, selection, seed: int) -> np.ndarray:
    gens = np.nonzero(ctx.generator_mask())[0]
    if selection == "all" or selection is None:
        return gens
    if isinstance(selection, str) and selection.startswith("sample:"):
        k = int(selection.split(":", 1)[1])
    elif isinstance(selection, tuple) and selection[0] == "sample":
        k = int(selection[1])
    else:
        raise ValueError(f"unknown theta selection {selection!r}")
    if k <= 0:
        raise ValueError("sample size must be positive")
    if k >= len(gens):
        return gens
    rng = random.Random(f"sweep:{seed}:{ctx.p}:{ctx.s}:{ctx.m}")
    return np.array(sorted(rng.sample([int(g) for g in gens], k)), dtype=np.int64)


def _chi_indices(ctx: TowerContext, selection) -> np.ndarray | None:
    """None means all of 0..N-1 (the FFT path); otherwise a sorted index array."""
    if selection == "all" or selection is None:
        return None
    idx: set[int] = set()
    for d in selection:
        idx.update(c.j for c in mult_chars_of_order(ctx, int(d)))
    return np.array(sorted(idx), dtype=np.int64)


def _log_lines(ctx: TowerContext, thetas: np.ndarray) -> np.ndarray:
    L = np.empty((len(thetas), ctx.q), dtype=np.int64)
    for i, t in enumerate(thetas):
        L[i] = ctx.log[ctx.vadd(int(t), ctx.subfield)]
    return L


def verify_bounds_sweep(
    ctx: TowerContext,
    theta_selection="all",
    char_selection="all",
    *,
    seed: int | None = None,
    threads: int = 1,
    tolerance: float = BOUND_TOLERANCE,
    materialize_cap: int = MATERIALIZE_CAP,
) -> tuple[list[SumRecord], dict]:
    """Check the mixed-sum bounds over many (theta, chi, psi) triples.

    Every selected triple is evaluated.  The returned records are either
    all of them (small selections) or the per-theta worst cases; the
    summary's minimum slack always reflects the full selection.
    """
    if seed is None:
        seed = ctx.seed
    q, m, N = ctx.q, ctx.m, ctx.N
    rq = math.sqrt(q)
    thetas = _theta_handles(ctx, theta_selection, seed)
    jsel = _chi_indices(ctx, char_selection)
    W2 = base_char_matrix(ctx)
    Z = zroots(ctx)
    L = _log_lines(ctx, thetas)
    G = len(thetas)
    n_j = N if jsel is None else len(jsel)
    n_pairs = G * n_j * q
    materialize = n_pairs <= materialize_cap

    bound_main = m * rq
    bound_katz = (m - 1) * rq

    records: list[SumRecord] = []
    max_main = np.zeros(G)
    arg_main = np.zeros((G, 2), dtype=np.int64)  # (j, b_index)
    max_katz = np.full(G, -1.0)
    arg_katz = np.zeros(G, dtype=np.int64)

    def eval_block(lo: int, hi: int):
        if jsel is None and not materialize:
            mm, aj, ab, mk, ak = kernels.sweep_stats(L[lo:hi], W2, Z)
            max_main[lo:hi] = mm
            arg_main[lo:hi, 0] = aj
            arg_main[lo:hi, 1] = ab
            max_katz[lo:hi] = mk
            arg_katz[lo:hi] = ak
            return []
        block_records = []
        js = np.arange(N, dtype=np.int64) if jsel is None else jsel
        for i in range(lo, hi):
            V = Z[js[:, None] * L[i] % N]  # (n_j, q) values chi_j(theta+x)
            S = V @ W2.T  # (n_j, q) columns = additive param index
            mods = np.abs(S)
            nz = mods[:, 1:]
            fl = int(np.argmax(nz))
            max_main[i] = nz.flat[fl]
            arg_main[i] = (js[fl // (q - 1)], fl % (q - 1) + 1)
            kz = np.nonzero(js > 0)[0]
            if len(kz):
                kf = kz[int(np.argmax(mods[kz, 0]))]
                max_katz[i] = mods[kf, 0]
                arg_katz[i] = js[kf]
            if materialize:
                th = ctx.element(int(thetas[i]))
                for jj, jv in enumerate(js):
                    for bi in range(q):
                        b = int(ctx.subfield[bi])
                        bound, kind = _bound_for(ctx, int(jv), b)
                        block_records.append(
                            SumRecord(
                                q=q,
                                m=m,
                                theta=th,
                                chi_index=int(jv),
                                psi_param=ctx.element(b),
                                value=complex(S[jj, bi]),
                                bound=bound,
                                bound_kind=kind,
                            )
                        )
        return block_records

    n_chunks = max(1, min(G, threads * 4)) if threads > 1 else 1
    bounds_ix = np.linspace(0, G, n_chunks + 1, dtype=int)
    spans = [(int(a), int(b)) for a, b in zip(bounds_ix[:-1], bounds_ix[1:]) if a < b]
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(lambda sp: eval_block(*sp), spans):
                records.extend(part)
    else:
        for sp in spans:
            records.extend(eval_block(*sp))

    if not materialize:
        for i in range(G):
            th = ctx.element(int(thetas[i]))
            bw = int(ctx.subfield[arg_main[i, 1]])
            records.append(
                mixed_sum(th, MultChar(ctx, int(arg_main[i, 0])), AddCharQ(ctx, bw))
            )
            if max_katz[i] >= 0:
                records.append(
                    mixed_sum(th, MultChar(ctx, int(arg_katz[i])), AddCharQ(ctx, 0))
                )

    records.sort(key=lambda r: (r.theta.h, r.chi_index, r.psi_param.h))

    slack_main = bound_main - max_main
    have_katz = max_katz >= 0
    min_slack = float(slack_main.min()) if G else math.inf
    wi = int(np.argmin(slack_main)) if G else -1
    witness = None
    if G:
        witness = {
            "theta": int(thetas[wi]),
            "chi_index": int(arg_main[wi, 0]),
            "psi_param": int(ctx.subfield[int(arg_main[wi, 1])]),
            "bound_kind": "main",
            "modulus": float(max_main[wi]),
            "bound": bound_main,
        }
        if have_katz.any():
            ks = np.where(have_katz, bound_katz - max_katz, math.inf)
            ki = int(np.argmin(ks))
            if ks[ki] < min_slack:
                min_slack = float(ks[ki])
                witness = {
                    "theta": int(thetas[ki]),
                    "chi_index": int(arg_katz[ki]),
                    "psi_param": 0,
                    "bound_kind": "katz",
                    "modulus": float(max_katz[ki]),
                    "bound": bound_katz,
                }
    peak = max(
        float(max_main.max()) if G else 0.0,
        float(max_katz[have_katz].max()) if G and have_katz.any() else 0.0,
    )
    violations = [r for r in records if not r.within_bound(tolerance)]
    summary = {
        "q": q,
        "m": m,
        "impl": kernels.IMPL,
        "n_theta": G,
        "n_triples": n_pairs,
        "min_slack": min_slack,
        "witness": witness,
        "max_ratio_sqrtq": peak / rq,
        "bound_main": bound_main,
        "bound_katz": bound_katz,
        "tolerance": tolerance,
        "materialized": materialize,
        "n_records": len(records),
        "n_violations": len(violations),
        "passed": min_slack >= -tolerance,
    }
    return records, summary


def fuwan_sum(
    f: RationalFunc, g: RationalFunc, chi: MultChar, psi_base: AddCharQ
) -> SumRecord:
    """Rational-function mixed sum over F_q with its degree-based bound.

    S = sum of chi(f(t)) psi_base(Tr(g(t))) over t in F_q avoiding zeros
    and poles of f and poles of g.  The bound constant comes from the four
    degree statistics of the reduced fractions; a violation marks the
    record degenerate_or_bug instead of raising, since the degeneracy
    hypothesis is not decided here.
    """
    ctx = f.ctx
    if g.ctx is not ctx or chi.ctx is not ctx or psi_base.ctx is not ctx:
        raise ContextMismatch("all inputs must share one tower")
    q, m = ctx.q, ctx.m
    value = 0j
    domain = 0
    for y in ctx.subfield:
        t = ctx.element(int(y))
        if g.den.eval(t).h == 0:
            continue
        fv = f.value_at(t)
        if fv is None or fv.h == 0:
            continue
        domain += 1
        tg = ctx.tr_q[g.value_at(t).h]
        value += chi.value(fv.h) * psi_base.value(int(tg))
    if domain == 0:
        raise UndefinedEverywhere("no point of F_q survives the exclusions")

    d1 = max(f.num.degree, f.den.degree)
    d2 = max(g.degree, 0)
    d3 = g.den.degree
    d4 = coprime_part(g.den, f.num * f.den).degree if g.den.degree > 0 else 0
    chi_active = chi.j != 0 and not f.is_constant()
    psi_active = psi_base.b != 0 and not g.is_constant()
    if chi_active or psi_active:
        bound = (m * (d1 + d3 + d4) + d2 - 1) * math.sqrt(q)
        kind = "fuwan"
    else:
        bound, kind = None, "none"
    meta = {
        "D1": d1,
        "D2": d2,
        "D3": d3,
        "D4": d4,
        "domain_size": domain,
        "f": (tuple(f.num.coeffs), tuple(f.den.coeffs)),
        "g": (tuple(g.num.coeffs), tuple(g.den.coeffs)),
        "degenerate_or_bug": bound is not None and abs(value) > bound + BOUND_TOLERANCE,
    }
    log.debug(
        "fuwan_sum q=%d m=%d D=(%d,%d,%d,%d) domain=%d |S|=%.6f bound=%s",
        q, m, d1, d2, d3, d4, domain, abs(value), bound,
    )
    if meta["degenerate_or_bug"]:
        log.warning("fuwan bound exceeded (degenerate input or bug): |S|=%.6f > %.6f",
                    abs(value), bound)
    return SumRecord(
        q=q,
        m=m,
        theta=ctx.zero(),
        chi_index=chi.j,
        psi_param=ctx.element(psi_base.b),
        value=value,
        bound=bound,
        bound_kind=kind,
        meta=meta,
    )
