"""Vectorized fallback implementations of the hot kernels.

These are the reference implementations: pure Python driving numpy, no
compiled extension required.  charfield._speedups provides drop-in C
versions of the same four entry points; charfield.kernels picks one set at
import time.  Integer-valued results are bit-identical between the two
lanes, floating results agree to rounding.
"""

from __future__ import annotations

import numpy as np

IMPL = "python"

_CHUNK_ROWS = 1 << 18


def handles_to_digits(handles: np.ndarray, p: int, n: int) -> np.ndarray:
    """Base-p digit matrix, least significant digit first, shape (len, n)."""
    h = np.asarray(handles, dtype=np.int64)
    out = np.empty(h.shape + (n,), dtype=np.int64)
    for i in range(n):
        out[..., i] = h % p
        h = h // p
    return out


def digits_to_handles(digits: np.ndarray, p: int) -> np.ndarray:
    n = digits.shape[-1]
    weights = p ** np.arange(n, dtype=np.int64)
    return digits @ weights


def _apply_linear(handles: np.ndarray, mat: np.ndarray, p: int) -> np.ndarray:
    """Apply an F_p-linear digit map (columns = images of the power basis)."""
    n = mat.shape[0]
    d = handles_to_digits(handles, p, n)
    return digits_to_handles(d @ mat.T % p, p)


def pow_table(p: int, N: int, mul_mat: np.ndarray) -> np.ndarray:
    """Successive powers 1, g, g^2, ..., g^(N-1) as handles.

    mul_mat is the n x n digit matrix of multiplication by g in the power
    basis.  Powers are grown by block doubling: once the first L powers are
    known, the next L come from one matrix application of g^L.
    """
    exp = np.empty(N, dtype=np.int64)
    exp[0] = 1
    have = 1
    cur = mul_mat.copy()  # digit matrix of multiplication by g^have
    while have < N:
        take = min(have, N - have)
        for lo in range(0, take, _CHUNK_ROWS):
            hi = min(lo + _CHUNK_ROWS, take)
            exp[have + lo : have + hi] = _apply_linear(exp[lo:hi], cur, p)
        have += take
        if have < N:
            cur = cur @ cur % p
    return exp


def scan_found(L: np.ndarray, offsets: np.ndarray, flag: np.ndarray) -> np.ndarray:
    """For each (offset, row of L): does any shifted log hit a flagged value?

    L holds logs of the points of each line, offsets are the log shifts of
    the scanned directions, flag is indexed by log modulo N = len(flag).
    """
    N = flag.shape[0]
    D, C = offsets.shape[0], L.shape[0]
    out = np.empty((D, C), dtype=np.uint8)
    step = max(1, _CHUNK_ROWS // max(1, L.size))
    for lo in range(0, D, step):
        hi = min(lo + step, D)
        idx = (offsets[lo:hi, None, None] + L[None, :, :]) % N
        out[lo:hi] = flag[idx].max(axis=2)
    return out


def line_counts(L: np.ndarray, offsets: np.ndarray, flag: np.ndarray) -> np.ndarray:
    """Number of flagged points per (offset, line)."""
    N = flag.shape[0]
    D, C = offsets.shape[0], L.shape[0]
    out = np.empty((D, C), dtype=np.int64)
    step = max(1, _CHUNK_ROWS // max(1, L.size))
    for lo in range(0, D, step):
        hi = min(lo + step, D)
        idx = (offsets[lo:hi, None, None] + L[None, :, :]) % N
        out[lo:hi] = flag[idx].astype(np.int64).sum(axis=2)
    return out


def sweep_stats(L: np.ndarray, W2: np.ndarray, Z: np.ndarray):
    """Largest character-sum modulus per theta, split by additive class.

    For each row of L (the logs of theta + x over the base field) this
    evaluates S[b, j] = sum_x W2[b, x] * Z[j * L[x] mod N] for every
    multiplicative index j and every base additive character b, via one
    length-N inverse FFT per b.  Row 0 of W2 must be the trivial additive
    character.  Returns five arrays over theta: the max modulus and argmax
    (j, b) over pairs with b nonzero, and the max modulus and argmax j over
    b = 0, j nonzero.
    """
    N = Z.shape[0]
    G, q = L.shape
    max_main = np.empty(G)
    arg_main_j = np.empty(G, dtype=np.int64)
    arg_main_b = np.empty(G, dtype=np.int64)
    max_katz = np.empty(G)
    arg_katz_j = np.empty(G, dtype=np.int64)
    U = np.zeros((q, N), dtype=np.complex128)
    for g in range(G):
        U[:, L[g]] = W2
        S = np.fft.ifft(U, axis=1)
        U[:, L[g]] = 0.0
        mods = np.abs(S)
        mods *= N
        flat = np.argmax(mods[1:, :])
        arg_main_b[g] = flat // N + 1
        arg_main_j[g] = flat % N
        max_main[g] = mods[1:, :].flat[flat]
        k = np.argmax(mods[0, 1:])
        arg_katz_j[g] = k + 1
        max_katz[g] = mods[0, k + 1]
    return max_main, arg_main_j, arg_main_b, max_katz, arg_katz_j
