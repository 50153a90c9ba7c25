"""Vectorised field kernels for small towers (at most 31 bits, i.e. l <= 2).

Numba-compiled loops are used when numba imports and ``DPHIST_NUMBA`` is not
set to ``0``; otherwise a pure-numpy version runs.  Both return identical
uint64 arrays.  Large fields stay on the exact Python-int path in
:mod:`dphist.gf2`.
"""

import os

import numpy as np

MAX_BITS = 31

try:
    if os.environ.get("DPHIST_NUMBA", "1") == "0":
        raise ImportError("disabled by DPHIST_NUMBA=0")
    from numba import njit
except ImportError:
    njit = None

BACKEND = "numba" if njit is not None else "numpy"


def _np_mul(a, b, bits, half):
    a = a.astype(np.uint64)
    b = b.astype(np.uint64)
    r = np.zeros(np.broadcast(a, b).shape, dtype=np.uint64)
    one = np.uint64(1)
    for i in range(bits):
        sel = (b >> np.uint64(i)) & one
        r ^= (a << np.uint64(i)) * sel
    mask = np.uint64((1 << bits) - 1)
    for _ in range(3):
        h = r >> np.uint64(bits)
        r = (r & mask) ^ (h << np.uint64(half)) ^ h
    return r


def _np_horner(coeffs, x, bits, half):
    coeffs = np.asarray(coeffs, dtype=np.uint64)
    x = np.asarray(x, dtype=np.uint64)
    acc = np.zeros(np.broadcast(coeffs[..., 0], x).shape, dtype=np.uint64)
    for j in range(coeffs.shape[-1] - 1, -1, -1):
        acc = _np_mul(acc, x, bits, half) ^ coeffs[..., j]
    return acc


if njit is not None:

    @njit(cache=True)
    def _nb_mul_scalar(a, b, bits, half):
        r = np.uint64(0)
        for i in range(bits):
            if (b >> np.uint64(i)) & np.uint64(1):
                r ^= a << np.uint64(i)
        mask = np.uint64((1 << bits) - 1)
        while r >> np.uint64(bits):
            h = r >> np.uint64(bits)
            r = (r & mask) ^ (h << np.uint64(half)) ^ h
        return r

    @njit(cache=True)
    def _nb_mul(a, b, bits, half):
        out = np.empty(a.shape[0], dtype=np.uint64)
        for i in range(a.shape[0]):
            out[i] = _nb_mul_scalar(a[i], b[i], bits, half)
        return out

    @njit(cache=True)
    def _nb_horner(coeffs, x, bits, half):
        rows, deg1 = coeffs.shape
        out = np.empty(rows, dtype=np.uint64)
        for i in range(rows):
            acc = np.uint64(0)
            for j in range(deg1 - 1, -1, -1):
                acc = _nb_mul_scalar(acc, x[i], bits, half) ^ coeffs[i, j]
            out[i] = acc
        return out


def _check(bits):
    if bits > MAX_BITS:
        raise ValueError(f"vector kernels support fields up to {MAX_BITS} bits, got {bits}")


def field_mul(a, b, bits, half, backend=None):
    """Elementwise product of two arrays of field elements."""
    _check(bits)
    backend = backend or BACKEND
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    if backend == "numba":
        a, b = np.broadcast_arrays(a, b)
        shape = a.shape
        return _nb_mul(np.ascontiguousarray(a).ravel(), np.ascontiguousarray(b).ravel(),
                       bits, half).reshape(shape)
    return _np_mul(a, b, bits, half)


def horner(coeffs, x, bits, half, backend=None):
    """Evaluate many polynomials: ``coeffs`` is (rows, n+1), degree 0 first.

    ``x`` is a scalar or one point per row."""
    _check(bits)
    backend = backend or BACKEND
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.uint64))
    x = np.broadcast_to(np.asarray(x, dtype=np.uint64), (coeffs.shape[0],))
    if backend == "numba":
        return _nb_horner(np.ascontiguousarray(coeffs), np.ascontiguousarray(x), bits, half)
    return _np_horner(coeffs, x, bits, half)
