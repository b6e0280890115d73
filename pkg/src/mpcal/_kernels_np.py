"""Pure-numpy implementations of the per-frequency numeric kernels.

Reference path for the numba kernels in ``_kernels_nb``; selected with
``MPCAL_BACKEND=numpy``.  All kernels operate on frequency-batched arrays
(leading axis = frequency point).
"""

import numpy as np


def cascade2(a, b):
    """Batched 2x2 complex matrix product, (F,2,2) @ (F,2,2)."""
    return a @ b


def _relative_det(a):
    # |det| normalized by the Hadamard bound (product of row 2-norms),
    # so the result is scale-free in [0, 1].
    det = np.abs(np.linalg.det(a))
    rownorm = np.sqrt(np.sum(np.abs(a) ** 2, axis=2))
    bound = np.prod(rownorm, axis=1)
    out = np.zeros_like(det)
    ok = bound > 0.0
    out[ok] = det[ok] / bound[ok]
    return out


def solve_small(a, b):
    """Solve a (F,n,n) @ x = b (F,n,m) per frequency point.

    Returns (x, reldet) where reldet is |det a| relative to the Hadamard
    bound of a.  Slices with reldet == 0 yield zeros in x; callers are
    expected to inspect reldet and raise their own domain error.
    """
    reldet = _relative_det(a)
    singular = reldet < 1e-300
    if singular.any():
        a = a.copy()
        a[singular] = np.eye(a.shape[1], dtype=a.dtype)
    x = np.linalg.solve(a, b)
    if singular.any():
        x[singular] = 0.0
    return x, reldet


def track_root_signs(phase, target0, ambig_threshold):
    """Resolve the per-frequency sign of a square-root branch by phase continuity.

    phase : (F,) unwrapped-agnostic phase of the positive-root quantity, rad
    target0 : expected phase at the first point, rad
    ambig_threshold : chosen-jump magnitude (rad) at or above which the
        selection counts as ambiguous

    Returns (signs, max_jump, ambig_index): signs is (F,) of +-1.0; max_jump
    is the largest chosen phase step (first-point deviation included);
    ambig_index is the first offending point, or -1 when tracking is clean.
    """
    two_pi = 2.0 * np.pi
    half_pi = 0.5 * np.pi

    d0 = phase[0] - target0
    d0 -= two_pi * np.round(d0 / two_pi)
    first = 1.0 if abs(d0) <= half_pi else -1.0
    chosen0 = min(abs(d0), np.pi - abs(d0))

    d = np.diff(phase)
    d -= two_pi * np.round(d / two_pi)
    flips = np.where(np.abs(d) > half_pi, -1.0, 1.0)
    signs = np.empty_like(phase)
    signs[0] = first
    if len(phase) > 1:
        signs[1:] = first * np.cumprod(flips)

    jumps = np.minimum(np.abs(d), np.pi - np.abs(d))
    all_jumps = np.concatenate(([chosen0], jumps))
    max_jump = float(all_jumps.max())
    ambig = np.nonzero(all_jumps >= ambig_threshold)[0]
    ambig_index = int(ambig[0]) if ambig.size else -1
    return signs, max_jump, ambig_index
