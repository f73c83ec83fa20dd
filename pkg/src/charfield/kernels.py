"""Kernel dispatch: compiled extension when available, numpy fallback otherwise.

Set CHARFIELD_PURE=1 to force the fallback even when the extension built.
Both lanes expose the same four entry points with identical semantics;
tests/test_kernels.py asserts parity whenever both are importable.
"""

from __future__ import annotations

import os

from . import _kernels_py
from ._kernels_py import digits_to_handles, handles_to_digits  # noqa: F401

_speedups = None
if os.environ.get("CHARFIELD_PURE", "") != "1":
    try:
        from . import _speedups
    except ImportError:
        _speedups = None

# The compiled sweep evaluates pairs directly at N*q*q per theta; the numpy
# fallback runs one length-N inverse FFT per additive row at roughly
# N*log(N)*q.  The direct form wins on small base fields, the FFT on large
# ones, with the measured crossover near q = 12.
SWEEP_DIRECT_MAX_Q = 12

if _speedups is not None:
    IMPL = "compiled"
    pow_table = _speedups.pow_table
    scan_found = _speedups.scan_found
    line_counts = _speedups.line_counts

    def sweep_stats(L, W2, Z):
        if L.shape[1] <= SWEEP_DIRECT_MAX_Q:
            return _speedups.sweep_stats(L, W2, Z)
        return _kernels_py.sweep_stats(L, W2, Z)
else:
    IMPL = "python"
    pow_table = _kernels_py.pow_table
    scan_found = _kernels_py.scan_found
    line_counts = _kernels_py.line_counts
    sweep_stats = _kernels_py.sweep_stats
