"""Numba implementations of the per-frequency numeric kernels.

Same contracts as ``_kernels_np``; importing this module requires numba.
The loops are written per frequency point so the JIT can fuse the small
fixed-size matrix work instead of dispatching batched BLAS calls.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def cascade2(a, b):
    out = np.empty_like(a)
    for f in range(a.shape[0]):
        a00 = a[f, 0, 0]
        a01 = a[f, 0, 1]
        a10 = a[f, 1, 0]
        a11 = a[f, 1, 1]
        out[f, 0, 0] = a00 * b[f, 0, 0] + a01 * b[f, 1, 0]
        out[f, 0, 1] = a00 * b[f, 0, 1] + a01 * b[f, 1, 1]
        out[f, 1, 0] = a10 * b[f, 0, 0] + a11 * b[f, 1, 0]
        out[f, 1, 1] = a10 * b[f, 0, 1] + a11 * b[f, 1, 1]
    return out


@njit(cache=True)
def solve_small(a, b):
    npts = a.shape[0]
    n = a.shape[1]
    m = b.shape[2]
    x = np.zeros((npts, n, m), dtype=np.complex128)
    reldet = np.zeros(npts, dtype=np.float64)

    for f in range(npts):
        # Hadamard bound from the untouched rows
        bound = 1.0
        for i in range(n):
            s = 0.0
            for j in range(n):
                s += abs(a[f, i, j]) ** 2
            bound *= np.sqrt(s)

        lu = a[f].copy()
        rhs = b[f].copy()
        det = 1.0 + 0.0j
        singular = False
        for col in range(n):
            # partial pivoting on column magnitude
            piv = col
            pmag = abs(lu[col, col])
            for r in range(col + 1, n):
                if abs(lu[r, col]) > pmag:
                    pmag = abs(lu[r, col])
                    piv = r
            if pmag == 0.0:
                singular = True
                break
            if piv != col:
                for j in range(n):
                    tmp = lu[col, j]
                    lu[col, j] = lu[piv, j]
                    lu[piv, j] = tmp
                for j in range(m):
                    tmp = rhs[col, j]
                    rhs[col, j] = rhs[piv, j]
                    rhs[piv, j] = tmp
                det = -det
            det *= lu[col, col]
            for r in range(col + 1, n):
                fac = lu[r, col] / lu[col, col]
                lu[r, col] = 0.0
                for j in range(col + 1, n):
                    lu[r, j] -= fac * lu[col, j]
                for j in range(m):
                    rhs[r, j] -= fac * rhs[col, j]

        if singular or bound == 0.0:
            reldet[f] = 0.0
            continue
        reldet[f] = abs(det) / bound

        for col in range(m):
            for r in range(n - 1, -1, -1):
                acc = rhs[r, col]
                for j in range(r + 1, n):
                    acc -= lu[r, j] * x[f, j, col]
                x[f, r, col] = acc / lu[r, r]
    return x, reldet


@njit(cache=True)
def track_root_signs(phase, target0, ambig_threshold):
    two_pi = 2.0 * np.pi
    half_pi = 0.5 * np.pi
    npts = phase.shape[0]
    signs = np.empty(npts, dtype=np.float64)

    d0 = phase[0] - target0
    d0 -= two_pi * np.round(d0 / two_pi)
    signs[0] = 1.0 if abs(d0) <= half_pi else -1.0
    max_jump = min(abs(d0), np.pi - abs(d0))
    ambig_index = 0 if max_jump >= ambig_threshold else -1

    for k in range(1, npts):
        d = phase[k] - phase[k - 1]
        d -= two_pi * np.round(d / two_pi)
        signs[k] = signs[k - 1] * (-1.0 if abs(d) > half_pi else 1.0)
        jump = min(abs(d), np.pi - abs(d))
        if jump > max_jump:
            max_jump = jump
        if jump >= ambig_threshold and ambig_index < 0:
            ambig_index = k
    return signs, max_jump, ambig_index
