"""Three-term one-port error model and 8-term two-port correction.

A one-port error box is fully described by three per-frequency terms:
directivity e00, DUT-side port match e11, and the reflection-tracking
product p = e10*e01.  Only the product is observable, so no e10/e01 split is
ever stored; wherever a two-port view of the box is needed the split
e10 = 1, e01 = p is used, which leaves every derived product unchanged.

Forward model and its inverse:

    Gm = e00 + p*G / (1 - e11*G)
    G  = (Gm - e00) / (e11*(Gm - e00) + p)

Two-port correction uses the 8-term model (no leakage terms).  With
normalized matrices

    N_A = [[-D_A, e00],[-e11, 1]]          (source side, D = e00*e11 - p)
    N_B = [[-D_B, e22],[-e33, 1]]          (receiver side, e33 directivity,
                                            e22 DUT-side match)

the device under test is T_dut = k * N_A^-1 * T_meas * N_B^-1 where k is the
pair's transmission-tracking product.  det(N_A) = p_A holds exactly, so the
inverses have the closed form (1/p)*[[1, -e00],[e11, -D]].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import (
    DegenerateStandards,
    ModelPole,
    StandardSeparationWarning,
    ZeroTracking,
)
from .net import (
    FrequencyGrid,
    NPortNetwork,
    TwoPortT,
    cascade,
    make_two_port,
    require_compatible,
    s_to_t,
    t_to_s,
)

_POLE_MIN = 1e-12
_TRACKING_MIN = 1e-12
_DEGENERATE_RELDET = 1e-8
_SEPARATION_WARN = 0.05


def _per_freq(grid: FrequencyGrid, value, name: str) -> np.ndarray:
    out = np.broadcast_to(np.asarray(value, dtype=np.complex128), (len(grid),))
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} must be finite")
    return np.ascontiguousarray(out)


@dataclass(frozen=True, eq=False)
class ErrorBox3:
    """Per-frequency (e00, e11, p) triple of a one-port error box."""

    grid: FrequencyGrid
    e00: np.ndarray
    e11: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        for name in ("e00", "e11", "p"):
            object.__setattr__(self, name,
                               _per_freq(self.grid, getattr(self, name), name))
        if np.any(self.p == 0.0):
            raise ZeroTracking("error box with p = 0 cannot be inverted")
        for name in ("e00", "e11", "p"):
            getattr(self, name).flags.writeable = False


@dataclass(frozen=True, eq=False)
class PairTracking:
    """Transmission-tracking product k = e10(i)*e32(j) for an ordered pair."""

    grid: FrequencyGrid
    k: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k", _per_freq(self.grid, self.k, "k"))
        if np.any(self.k == 0.0):
            raise ZeroTracking("pair tracking k = 0 cannot be inverted")
        self.k.flags.writeable = False


def identity_box(grid: FrequencyGrid) -> ErrorBox3:
    return ErrorBox3(grid, 0.0, 0.0, 1.0)


def _first_bad(grid: FrequencyGrid, mask: np.ndarray) -> float:
    return float(grid.points[np.nonzero(mask)[0][0]])


def embed_reflection(box: ErrorBox3, gamma) -> np.ndarray:
    """Reflection coefficient as measured through the error box."""
    g = _per_freq(box.grid, gamma, "gamma")
    den = 1.0 - box.e11 * g
    bad = np.abs(den) <= _POLE_MIN
    if bad.any():
        raise ModelPole(
            f"1 - e11*gamma vanishes at {_first_bad(box.grid, bad):.6g} Hz")
    return box.e00 + box.p * g / den


def correct_reflection(box: ErrorBox3, gamma_measured) -> np.ndarray:
    """Inverse of :func:`embed_reflection`."""
    gm = _per_freq(box.grid, gamma_measured, "gamma_measured")
    num = gm - box.e00
    den = box.e11 * num + box.p
    bad = np.abs(den) <= _POLE_MIN
    if bad.any():
        raise ModelPole(
            f"e11*(Gm - e00) + p vanishes at {_first_bad(box.grid, bad):.6g} Hz")
    return num / den


def solve_three_standards(
        grid: FrequencyGrid,
        standards: Sequence[tuple[object, object]]) -> ErrorBox3:
    """Solve the 3-term model from three (actual, measured) reflection pairs.

    Per frequency the model is linear in x = (e00, e11, D) with
    D = e00*e11 - p:  [1, Ga*Gm, -Ga] . x = Gm.  The 3x3 solve uses partial
    pivoting; p = e00*e11 - D afterwards.

    Raises DegenerateStandards when the system determinant falls below 1e-8
    of its row-norm (Hadamard) bound, and warns (StandardSeparationWarning)
    when any two actual standards come within 0.05 of each other.
    """
    if len(standards) != 3:
        raise ValueError(f"exactly 3 standards required, got {len(standards)}")
    npts = len(grid)
    ga = np.empty((npts, 3), dtype=np.complex128)
    gm = np.empty((npts, 3), dtype=np.complex128)
    for col, (actual, measured) in enumerate(standards):
        ga[:, col] = _per_freq(grid, actual, "gamma_actual")
        gm[:, col] = _per_freq(grid, measured, "gamma_measured")

    sep = np.inf
    for i in range(3):
        for j in range(i + 1, 3):
            sep = min(sep, float(np.min(np.abs(ga[:, i] - ga[:, j]))))
    if sep < _SEPARATION_WARN:
        warnings.warn(
            f"min standard separation {sep:.3g} < {_SEPARATION_WARN}; "
            "solution may lose precision", StandardSeparationWarning,
            stacklevel=2)

    a = np.empty((npts, 3, 3), dtype=np.complex128)
    a[:, :, 0] = 1.0
    a[:, :, 1] = ga * gm
    a[:, :, 2] = -ga
    x, reldet = kernels.solve_small(a, gm[:, :, None])
    bad = reldet < _DEGENERATE_RELDET
    if bad.any():
        raise DegenerateStandards(
            f"standards electrically indistinct at {_first_bad(grid, bad):.6g} Hz "
            f"(relative determinant {float(reldet[bad][0]):.3g})")
    e00 = x[:, 0, 0]
    e11 = x[:, 1, 0]
    delta = x[:, 2, 0]
    p = e00 * e11 - delta
    small = np.abs(p) < _TRACKING_MIN
    if small.any():
        raise ZeroTracking(
            f"recovered |p| < {_TRACKING_MIN} at {_first_bad(grid, small):.6g} Hz")
    return ErrorBox3(grid, e00, e11, p)


def box_to_two_port(box: ErrorBox3) -> NPortNetwork:
    """Two-port view of the box with the canonical split e10 = 1, e01 = p."""
    return make_two_port(box.grid, box.e00, box.p, 1.0, box.e11)


def shift_reference_plane(box: ErrorBox3, adapter: NPortNetwork) -> ErrorBox3:
    """Move the box's DUT-side plane through a known two-port adapter."""
    require_compatible(box.grid, adapter.grid, "box and adapter")
    shifted = t_to_s(cascade(s_to_t(box_to_two_port(box)), s_to_t(adapter)))
    s = shifted.s
    return ErrorBox3(box.grid, s[:, 0, 0], s[:, 1, 1], s[:, 0, 1] * s[:, 1, 0])


def _n_source(box: ErrorBox3) -> np.ndarray:
    """N_A of the source-side box, shape (F, 2, 2); det(N_A) = p."""
    npts = len(box.grid)
    n = np.empty((npts, 2, 2), dtype=np.complex128)
    delta = box.e00 * box.e11 - box.p
    n[:, 0, 0] = -delta
    n[:, 0, 1] = box.e00
    n[:, 1, 0] = -box.e11
    n[:, 1, 1] = 1.0
    return n


def _n_receiver(box: ErrorBox3) -> np.ndarray:
    """N_B of the receiver-side box, shape (F, 2, 2); det(N_B) = p.

    The receiver box sits DUT-first in the cascade, so relative to N_A its
    directivity (e33 = box.e00) and DUT-side match (e22 = box.e11) swap
    positions: N_B = [[-D, e22],[-e33, 1]].
    """
    npts = len(box.grid)
    n = np.empty((npts, 2, 2), dtype=np.complex128)
    delta = box.e00 * box.e11 - box.p
    n[:, 0, 0] = -delta
    n[:, 0, 1] = box.e11
    n[:, 1, 0] = -box.e00
    n[:, 1, 1] = 1.0
    return n


def _inv2_closed(n: np.ndarray, det: np.ndarray) -> np.ndarray:
    inv = np.empty_like(n)
    inv[:, 0, 0] = n[:, 1, 1]
    inv[:, 0, 1] = -n[:, 0, 1]
    inv[:, 1, 0] = -n[:, 1, 0]
    inv[:, 1, 1] = n[:, 0, 0]
    return inv / det[:, None, None]


def _n_source_inv(box: ErrorBox3) -> np.ndarray:
    """(1/p)[[1, -e00],[e11, -D]], using det(N_A) = p exactly."""
    return _inv2_closed(_n_source(box), box.p)


def _n_receiver_inv(box: ErrorBox3) -> np.ndarray:
    """(1/p)[[1, -e22],[e33, -D]], using det(N_B) = p exactly."""
    return _inv2_closed(_n_receiver(box), box.p)


def correct_two_port(box_i: ErrorBox3, box_j: ErrorBox3, k: PairTracking,
                     measured: NPortNetwork) -> NPortNetwork:
    """8-term correction of a raw pair measurement to the DUT planes.

    box_i sits between the source reference plane and DUT port 1 of the
    measurement; box_j between DUT port 2 and the receiver; k is the pair's
    transmission-tracking product.
    """
    require_compatible(box_i.grid, measured.grid, "error box and measurement")
    require_compatible(box_j.grid, measured.grid, "error box and measurement")
    require_compatible(k.grid, measured.grid, "pair tracking and measurement")
    t_meas = s_to_t(measured)
    t_dut = kernels.cascade2(kernels.cascade2(_n_source_inv(box_i), t_meas.t),
                             _n_receiver_inv(box_j))
    t_dut = t_dut * k.k[:, None, None]
    return t_to_s(TwoPortT(measured.grid, t_dut, measured.reference_impedance))
