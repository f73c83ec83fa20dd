"""Command-line surface.

Every subcommand builds a report payload (a plain dict, possibly with a
``records`` list of sum records), renders it as JSON, CSV, or text, and
exits 0 when all verifications pass, 1 when a verification fails (the
failing witness stays in the report), or 2 on usage errors.  Reports are
byte-identical across runs with equal configuration and arguments.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import intfuncs
from .characters import AddCharQ, MultChar
from .charsum import fuwan_sum, verify_bounds_sweep
from .errors import CharfieldError, SearchExhausted
from .funcfield import (
    RayCharSpec,
    degree_one_sum,
    verify_nonsingularity,
    verify_ray_triviality,
)
from .lineprops import (
    LineSpec,
    canonical_type,
    count_on_line,
    lower_bound_N,
    scan_constants,
    sieve_stats,
    verify_lower_bound,
)
from .polyring import PolyQ, RationalFunc, factor_poly, xm1_poly
from .reporting import render
from .tower import DEFAULT_SEED, DEFAULT_SIZE_CAP, FFElement, TowerContext, build_tower

MAX_SIZE_CAP = 1 << 24


@dataclass(frozen=True)
class RunConfig:
    cache_dir: str | None = None
    seed: int = DEFAULT_SEED
    size_cap: int = DEFAULT_SIZE_CAP
    tolerance: float = 1e-6
    threads: int = 1
    output: str = "json"

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.size_cap <= MAX_SIZE_CAP:
            raise ValueError(f"size_cap must be in (0, 2^24], got {self.size_cap}")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.output not in ("json", "csv", "text"):
            raise ValueError(f"unknown output format {self.output!r}")


def _common_flags(sub: argparse.ArgumentParser):
    sub.add_argument("--cache-dir", default=None,
                     help="directory for the persistent integer factorization cache")
    sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP,
                     help="largest field size this run may materialize")
    sub.add_argument("--tolerance", type=float, default=1e-6)
    sub.add_argument("--threads", type=int, default=1)
    sub.add_argument("--output", choices=("json", "csv", "text"), default="json")
    sub.add_argument("--out", default=None, help="write the report to this path instead of stdout")
    sub.add_argument("--print-basis", action="store_true",
                     help="append base-p digit decodings for element handles in the report")


def _field_flags(sub: argparse.ArgumentParser):
    sub.add_argument("--p", type=int, required=True, help="characteristic")
    sub.add_argument("--s", type=int, required=True, help="base field is F_{p^s}")
    sub.add_argument("--m", type=int, required=True, help="extension degree over the base")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charfield",
        description="Exact incomplete mixed character sums over F_{q^m}/F_q, "
                    "bound verification, and primitive/normal line counts.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("field-info", help="context summary and factorizations")
    _field_flags(sp)
    _common_flags(sp)

    sp = subs.add_parser("verify-mixed-bound", help="sweep mixed sums against their bounds")
    _field_flags(sp)
    sp.add_argument("--theta", default="all",
                    help='"all" or "sample:K" for K seeded generators')
    sp.add_argument("--chi-orders", default=None,
                    help="comma-separated character orders to restrict the sweep")
    _common_flags(sp)

    sp = subs.add_parser("verify-fuwan", help="rational-function sum with degree-based bound")
    _field_flags(sp)
    sp.add_argument("--f", required=True, dest="f_frac",
                    help="rational function NUM/DEN, each a comma-separated "
                         "coefficient list, constant term first")
    sp.add_argument("--g", required=True, dest="g_frac", help="same syntax as --f")
    sp.add_argument("--chi", type=int, required=True, help="character index j")
    sp.add_argument("--psi", type=int, required=True, help="base additive parameter handle")
    _common_flags(sp)

    sp = subs.add_parser("count-line", help="count elements with a property on one line")
    _field_flags(sp)
    sp.add_argument("--theta", type=int, required=True, help="generator handle")
    sp.add_argument("--alpha", type=int, required=True, help="scaling handle")
    sp.add_argument("--type", required=True,
                    choices=("primitive", "normal", "primitive-normal"))
    _common_flags(sp)

    sp = subs.add_parser("lower-bound", help="sieve lower bound with intermediate quantities")
    _field_flags(sp)
    _common_flags(sp)

    sp = subs.add_parser("scan", help="property scan over prime powers q <= q-max")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--q-max", type=int, required=True)
    sp.add_argument("--property", required=True, choices=("tp", "wlp", "lp"))
    sp.add_argument("--type", required=True, choices=("primitive", "primitive-normal"))
    sp.add_argument("--require-primitive-residue", action="store_true",
                    help="only scan q that are primitive modulo m")
    _common_flags(sp)

    sp = subs.add_parser("ray-check", help="function-field character verification suites")
    _field_flags(sp)
    sp.add_argument("--theta", type=int, required=True)
    sp.add_argument("--chi", type=int, required=True)
    sp.add_argument("--psi", type=int, required=True)
    sp.add_argument("--samples", type=int, default=100)
    _common_flags(sp)

    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        cache_dir=args.cache_dir,
        seed=args.seed,
        size_cap=args.size_cap,
        tolerance=args.tolerance,
        threads=args.threads,
        output=args.output,
    )


def _tower(args, config: RunConfig) -> TowerContext:
    return build_tower(args.p, args.s, args.m, seed=config.seed, size_cap=config.size_cap)


def _parse_poly(ctx: TowerContext, text: str) -> PolyQ:
    try:
        coeffs = [int(c) for c in text.split(",")] if text.strip() else []
    except ValueError as exc:
        raise ValueError(f"bad coefficient list {text!r}") from exc
    return PolyQ(ctx, coeffs)

def _parse_rational(ctx: TowerContext, text: str) -> RationalFunc:
    num, _, den = text.partition("/")
    return RationalFunc(_parse_poly(ctx, num), _parse_poly(ctx, den) if den else PolyQ(ctx, (1,)))


def _element(ctx: TowerContext, handle: int) -> FFElement:
    if not 0 <= handle < ctx.Q:
        raise ValueError(f"handle {handle} outside [0, {ctx.Q})")
    return FFElement(ctx, handle)


def _basis_section(ctx: TowerContext, handles) -> dict:
    """Digit decodings (coefficients of 1, t, t^2, ... mod the tower modulus)."""
    return {
        "modulus_coeffs": list(ctx.modulus),
        "digits": {str(int(h)): FFElement(ctx, int(h)).digits() for h in sorted(set(int(h) for h in handles))},
    }


# -- subcommand handlers (each returns exit code, payload) --------------------

def _cmd_field_info(args, config: RunConfig):
    ctx = _tower(args, config)
    from .freeness import normal_mask, primitive_mask, type_mask

    xf = factor_poly(xm1_poly(ctx), seed=config.seed)
    payload = {
        "command": "field-info",
        "p": ctx.p, "s": ctx.s, "m": ctx.m,
        "q": ctx.q, "field_size": ctx.Q, "group_order": ctx.N,
        "modulus_coeffs": list(ctx.modulus),
        "primitive_root": int(ctx.exp[1]),
        "subfield_handles": [int(h) for h in ctx.subfield],
        "n_generators": int(ctx.generator_mask().sum()),
        "n_primitive": int(primitive_mask(ctx).sum()),
        "n_normal": int(normal_mask(ctx).sum()),
        "n_primitive_normal": int(type_mask(ctx, "primitive-normal").sum()),
        "group_order_factorization": {str(pr): e for pr, e in ctx.qm1_fact.factors},
        "xm1_factorization": [
            {"coeffs": list(g.coeffs), "multiplicity": e} for g, e in xf.factors
        ],
    }
    if args.print_basis:
        payload["basis"] = _basis_section(ctx, [ctx.exp[1], *ctx.subfield])
    return 0, payload


def _cmd_verify_mixed_bound(args, config: RunConfig):
    ctx = _tower(args, config)
    orders = None
    if args.chi_orders is not None:
        orders = [int(t) for t in args.chi_orders.split(",") if t.strip()]
    records, summary = verify_bounds_sweep(
        ctx,
        theta_selection=args.theta,
        char_selection=orders if orders is not None else "all",
        seed=config.seed,
        threads=config.threads,
        tolerance=config.tolerance,
    )
    payload = {"command": "verify-mixed-bound", "summary": summary, "records": records}
    return (0 if summary["passed"] else 1), payload


def _cmd_verify_fuwan(args, config: RunConfig):
    ctx = _tower(args, config)
    f = _parse_rational(ctx, args.f_frac)
    g = _parse_rational(ctx, args.g_frac)
    chi = MultChar(ctx, args.chi)
    psi = AddCharQ(ctx, _element(ctx, args.psi).h)
    rec = fuwan_sum(f, g, chi, psi)
    ok = rec.within_bound(config.tolerance) and not rec.meta.get("degenerate_or_bug")
    payload = {
        "command": "verify-fuwan",
        "passed": ok,
        "degrees": {k: rec.meta[k] for k in ("D1", "D2", "D3", "D4")},
        "domain_size": rec.meta["domain_size"],
        "degenerate_or_bug": bool(rec.meta.get("degenerate_or_bug", False)),
        "records": [rec],
    }
    if args.print_basis:
        payload["basis"] = _basis_section(ctx, [args.psi])
    return (0 if ok else 1), payload


def _cmd_count_line(args, config: RunConfig):
    ctx = _tower(args, config)
    kind = canonical_type(args.type)
    line = LineSpec(_element(ctx, args.theta), _element(ctx, args.alpha), "full")
    count = count_on_line(line, kind)
    payload = {
        "command": "count-line",
        "q": ctx.q, "m": ctx.m,
        "theta": args.theta, "alpha": args.alpha,
        "element_type": kind,
        "count": count,
        "line_size": ctx.q,
    }
    if kind == "primitive-normal" and line.alpha.in_subfield():
        try:
            payload["lower_bound_check"] = verify_lower_bound(line)
        except CharfieldError as exc:
            payload["lower_bound_check"] = {"applicable": False, "reason": str(exc)}
    if args.print_basis:
        payload["basis"] = _basis_section(ctx, [args.theta, args.alpha])
    return 0, payload


def _cmd_lower_bound(args, config: RunConfig):
    ctx = _tower(args, config)
    st = sieve_stats(ctx)
    payload = {
        "command": "lower-bound",
        "q": ctx.q, "m": ctx.m,
        "value": lower_bound_N(ctx.q, ctx.m, ctx=ctx),
        "eps_group": st["eps_N"],
        "eps_xm1": st["eps_xm1"],
        "eps_g0": st["eps_g0"],
        "W_group": st["W_N"],
        "W_xm1": st["W_xm1"],
        "W_g0": st["W_g0"],
        "positive": lower_bound_N(ctx.q, ctx.m, ctx=ctx) > 0,
    }
    return 0, payload


def _cmd_scan(args, config: RunConfig):
    report = scan_constants(
        args.m,
        args.q_max,
        args.property,
        canonical_type(args.type),
        require_primitive_residue=args.require_primitive_residue,
        threads=config.threads,
        seed=config.seed,
        size_cap=config.size_cap,
    )
    entries = [
        {
            "q": r.q,
            "passed": r.passed,
            "n_lines": r.n_lines,
            "in_hypothesis": r.in_hypothesis,
            "note": r.note,
            "witness": None if r.witness is None else {
                "theta": r.witness.theta.h, "alpha": r.witness.alpha.h,
            },
        }
        for r in report.entries
    ]
    payload = {
        "command": "scan",
        "m": report.m,
        "property": report.property_name,
        "element_type": report.element_type,
        "q_list": report.q_list,
        "scan_limit": report.scan_limit,
        "largest_failing_q": report.largest_failing_q,
        "n_failures": len(report.failures),
        "failing_q": sorted({q for q, _ in report.failures}),
        "skipped": [{"q": q, "reason": why} for q, why in report.skipped],
        "entries": entries,
    }
    # scan findings are data about the constants, not a verification failure
    return 0, payload


def _cmd_ray_check(args, config: RunConfig):
    ctx = _tower(args, config)
    spec = RayCharSpec(
        _element(ctx, args.theta), MultChar(ctx, args.chi), AddCharQ(ctx, _element(ctx, args.psi).h)
    )
    deg1 = degree_one_sum(spec)
    ray = verify_ray_triviality(spec, samples=args.samples, seed=config.seed)
    try:
        witness = verify_nonsingularity(spec)
        nonsing = {
            "found": True,
            "witness": repr(witness["witness"]),
            "value_re": witness["value"].real,
            "value_im": witness["value"].imag,
        }
    except SearchExhausted as exc:
        nonsing = {"found": False, "reason": str(exc)}
    ok = deg1["matches_mixed_sum"] and ray["ok"] and nonsing["found"]
    payload = {
        "command": "ray-check",
        "passed": ok,
        "degree_one_sum": {
            "re": deg1["sum"].real, "im": deg1["sum"].imag,
            "bound": deg1["bound"],
            "matches_mixed_sum": deg1["matches_mixed_sum"],
        },
        "ray_triviality": ray,
        "nonsingularity": nonsing,
        "records": [deg1["mixed_record"]],
    }
    if args.print_basis:
        payload["basis"] = _basis_section(ctx, [args.theta, args.psi])
    return (0 if ok else 1), payload


_HANDLERS = {
    "field-info": _cmd_field_info,
    "verify-mixed-bound": _cmd_verify_mixed_bound,
    "verify-fuwan": _cmd_verify_fuwan,
    "count-line": _cmd_count_line,
    "lower-bound": _cmd_lower_bound,
    "scan": _cmd_scan,
    "ray-check": _cmd_ray_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config(args)
    except ValueError as exc:
        parser.error(str(exc))  # exits 2
    if config.cache_dir is not None:
        intfuncs.set_cache_dir(config.cache_dir)
    try:
        code, payload = _HANDLERS[args.command](args, config)
    except SearchExhausted as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except (CharfieldError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    text = render(payload, config.output)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
