#!/usr/bin/env python3
"""Time the compiled kernels against the numpy fallback on real field data.

Each kernel is fed the same inputs the library itself would build: discrete
log tables from a tower context, log-lines of theta + F_q, direction offsets,
element flags, and the character tables used by the bound sweep.  Timings use
timeit's autorange calibration, so fast cells are looped until they register.

The sweep row is the interesting one.  The compiled sweep evaluates every
(chi, psi) pair directly at N*q*q work per theta; the fallback does one
length-N inverse FFT per additive row at N*log(N)*q.  The direct form wins
while q is small and loses badly once q grows, which is why the dispatcher
in charfield.kernels routes on q (see SWEEP_DIRECT_MAX_Q).  Run this script
to re-measure the crossover on your machine:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --fields 2,1,10 61,1,2 --max-lines 16
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from charfield import _kernels_py, kernels
from charfield.characters import base_char_matrix, zroots
from charfield.freeness import type_flag_by_log
from charfield.kernels import SWEEP_DIRECT_MAX_Q
from charfield.tower import build_tower

DEFAULT_FIELDS = [
    (2, 1, 10),  # q = 2,  Q = 1024
    (3, 1, 6),   # q = 3,  Q = 729
    (2, 3, 3),   # q = 8,  Q = 512
    (2, 4, 3),   # q = 16, Q = 4096
    (5, 2, 2),   # q = 25, Q = 625
    (61, 1, 2),  # q = 61, Q = 3721
    (2, 6, 2),   # q = 64, Q = 4096
]


def gamma_mul_matrix(ctx) -> np.ndarray:
    """Digit matrix of multiplication by the group generator, column i = gamma * t^i."""
    cols = [ctx.mul(int(ctx.gamma), ctx.p**i) for i in range(ctx.n)]
    arr = np.array(cols, dtype=np.int64)
    return kernels.handles_to_digits(arr, ctx.p, ctx.n).T.copy()


def build_inputs(p: int, s: int, m: int, max_lines: int):
    ctx = build_tower(p, s, m)
    flag = type_flag_by_log(ctx, "primitive")
    gen_handles = ctx.exp[np.nonzero(flag)[0]][:max_lines]
    L = np.empty((len(gen_handles), ctx.q), dtype=np.int64)
    for i, t in enumerate(gen_handles):
        L[i] = ctx.log[ctx.vadd(int(t), ctx.subfield)]
    offsets = np.arange(ctx.N // (ctx.q - 1), dtype=np.int64)
    return {
        "ctx": ctx,
        "mul_mat": gamma_mul_matrix(ctx),
        "L": L,
        "offsets": offsets,
        "flag": flag,
        "W2": base_char_matrix(ctx),
        "Z": zroots(ctx),
    }


def time_call(fn, *args) -> float:
    """Seconds per call, autorange-calibrated, best of three runs."""
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=3, number=number)) / number


def lane_functions(name: str):
    if name == "python":
        return _kernels_py
    return kernels._speedups


def bench_field(p: int, s: int, m: int, lanes: list[str], max_lines: int):
    data = build_inputs(p, s, m, max_lines)
    ctx = data["ctx"]
    cells = {
        "pow_table": (ctx.p, ctx.N, data["mul_mat"]),
        "scan_found": (data["L"], data["offsets"], data["flag"]),
        "line_counts": (data["L"], data["offsets"], data["flag"]),
        "sweep_stats": (data["L"], data["W2"], data["Z"]),
    }
    rows = []
    for kernel, args in cells.items():
        timings = {}
        for lane in lanes:
            timings[lane] = time_call(getattr(lane_functions(lane), kernel), *args)
        rows.append((kernel, timings))
    return ctx, rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--fields",
        nargs="+",
        metavar="P,S,M",
        help="fields to bench as comma triples, e.g. 2,1,10 (default: a spread of q)",
    )
    parser.add_argument(
        "--max-lines",
        type=int,
        default=24,
        help="cap on theta rows fed to the line kernels (default 24)",
    )
    args = parser.parse_args(argv)

    if args.fields:
        fields = []
        for spec in args.fields:
            try:
                p, s, m = (int(x) for x in spec.split(","))
            except ValueError:
                parser.error(f"bad field triple {spec!r}, expected P,S,M")
            fields.append((p, s, m))
    else:
        fields = DEFAULT_FIELDS

    lanes = ["python"]
    if kernels._speedups is not None:
        lanes.insert(0, "compiled")
    else:
        print("compiled extension not importable; timing the numpy lane only\n")

    header = f"{'field':>12} {'kernel':<12}"
    for lane in lanes:
        header += f" {lane + ' (ms)':>14}"
    if len(lanes) == 2:
        header += f" {'py/compiled':>12}"
    print(header)
    print("-" * len(header))

    crossings = []
    for p, s, m in fields:
        ctx, rows = bench_field(p, s, m, lanes, args.max_lines)
        label = f"{ctx.q}^{ctx.m}"
        for kernel, timings in rows:
            line = f"{label:>12} {kernel:<12}"
            for lane in lanes:
                line += f" {timings[lane] * 1e3:>14.3f}"
            if len(lanes) == 2:
                line += f" {timings['python'] / timings['compiled']:>12.2f}"
            print(line)
            if kernel == "sweep_stats" and len(lanes) == 2:
                crossings.append((ctx.q, timings["python"] / timings["compiled"]))
        print()

    if crossings:
        print(f"sweep dispatcher: direct compiled form used for q <= {SWEEP_DIRECT_MAX_Q}")
        for q, ratio in crossings:
            chosen = "compiled direct" if q <= SWEEP_DIRECT_MAX_Q else "numpy ifft"
            print(f"  q = {q:>3}: python/compiled = {ratio:6.2f}  -> dispatch picks {chosen}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
