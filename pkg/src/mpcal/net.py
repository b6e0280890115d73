"""Frequency-gridded S-parameter containers and two-port/N-port network algebra.

One cascade (T-matrix) convention is used everywhere in this package:

    T = (1/S21) * [[S12*S21 - S11*S22, S11],
                   [-S22,              1  ]]

so an ideal thru maps to the identity T and connecting networks left-to-right
multiplies their T-matrices in the same order.  det(T) = S12/S21.

All containers are immutable after construction and all operations are pure
functions, so networks can be shared freely across threads.  Frequency grids
must match exactly between operands; there is no interpolation.  S-parameters
are stored as linear complex values; dB/angle appear only at I/O boundaries.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import (
    GridMismatch,
    ReferenceImpedanceMismatch,
    SingularReduction,
    SingularT,
    ZeroTransmission,
)

_REDUCTION_RELDET_MIN = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Strictly increasing, positive frequency points in Hz."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 1:
            raise ValueError("frequency grid must be a non-empty 1-D array")
        if not np.all(np.isfinite(pts)) or pts[0] <= 0.0:
            raise ValueError("frequencies must be finite and > 0")
        if pts.size > 1 and not np.all(np.diff(pts) > 0.0):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "points", _frozen(pts))

    def __len__(self) -> int:
        return self.points.size

    def compatible(self, other: "FrequencyGrid") -> bool:
        """Grids are compatible iff element-wise identical."""
        return self.points.size == other.points.size and bool(
            np.all(self.points == other.points)
        )

    @property
    def max_step(self) -> float:
        if len(self) < 2:
            return 0.0
        return float(np.max(np.diff(self.points)))

    def digest(self) -> str:
        """SHA-256 over the full-precision decimal rendering of the points."""
        text = "\n".join(f"{f:.17e}" for f in self.points)
        return hashlib.sha256(text.encode("ascii")).hexdigest()


def require_compatible(a: FrequencyGrid, b: FrequencyGrid, what: str = "networks"):
    if not a.compatible(b):
        raise GridMismatch(f"frequency grids of {what} do not match")


@dataclass(frozen=True, eq=False)
class NPortNetwork:
    """N-port scattering parameters on a frequency grid.

    ``s`` has shape (F, n, n), entry [f, i, j] = S_ij at grid point f, in
    linear complex form.  Ports are numbered 0..n-1 throughout the package.
    """

    grid: FrequencyGrid
    s: np.ndarray
    reference_impedance: float = 50.0

    def __post_init__(self):
        s = np.asarray(self.s, dtype=np.complex128)
        if s.ndim != 3 or s.shape[1] != s.shape[2]:
            raise ValueError("s must have shape (F, n, n)")
        if s.shape[0] != len(self.grid):
            raise ValueError("s has a different number of frequency points than the grid")
        if not np.all(np.isfinite(s)):
            raise ValueError("S-parameters must be finite")
        if not (self.reference_impedance > 0):
            raise ValueError("reference impedance must be positive")
        object.__setattr__(self, "s", _frozen(s))

    @property
    def n_ports(self) -> int:
        return self.s.shape[1]


@dataclass(frozen=True, eq=False)
class TwoPortT:
    """Two-port transfer (cascade) matrices, shape (F, 2, 2)."""

    grid: FrequencyGrid
    t: np.ndarray
    reference_impedance: float = 50.0

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.complex128)
        if t.ndim != 3 or t.shape[1:] != (2, 2):
            raise ValueError("t must have shape (F, 2, 2)")
        if t.shape[0] != len(self.grid):
            raise ValueError("t has a different number of frequency points than the grid")
        if not np.all(np.isfinite(t)):
            raise ValueError("T-parameters must be finite")
        object.__setattr__(self, "t", _frozen(t))


def make_two_port(grid: FrequencyGrid, s11, s12, s21, s22,
                  reference_impedance: float = 50.0) -> NPortNetwork:
    """Assemble a two-port from per-frequency (or scalar) entries."""
    npts = len(grid)
    s = np.empty((npts, 2, 2), dtype=np.complex128)
    s[:, 0, 0] = s11
    s[:, 0, 1] = s12
    s[:, 1, 0] = s21
    s[:, 1, 1] = s22
    return NPortNetwork(grid, s, reference_impedance)


def flip_two_port(net: NPortNetwork) -> NPortNetwork:
    """Swap the two ports: S11<->S22, S12<->S21."""
    if net.n_ports != 2:
        raise ValueError("flip_two_port needs a two-port")
    return NPortNetwork(net.grid, net.s[:, ::-1, ::-1], net.reference_impedance)


def _first_true_freq(grid: FrequencyGrid, mask: np.ndarray) -> float:
    return float(grid.points[np.nonzero(mask)[0][0]])


def s_to_t(net: NPortNetwork) -> TwoPortT:
    """Convert a two-port S-matrix to the package cascade convention."""
    if net.n_ports != 2:
        raise ValueError("s_to_t needs a two-port")
    s = net.s
    s21 = s[:, 1, 0]
    zero = s21 == 0.0
    if zero.any():
        raise ZeroTransmission(
            f"S21 = 0 at {_first_true_freq(net.grid, zero):.6g} Hz; no cascade form"
        )
    t = np.empty_like(s)
    t[:, 0, 0] = (s[:, 0, 1] * s21 - s[:, 0, 0] * s[:, 1, 1]) / s21
    t[:, 0, 1] = s[:, 0, 0] / s21
    t[:, 1, 0] = -s[:, 1, 1] / s21
    t[:, 1, 1] = 1.0 / s21
    return TwoPortT(net.grid, t, net.reference_impedance)


def t_to_s(tp: TwoPortT) -> NPortNetwork:
    """Inverse of :func:`s_to_t`."""
    t = tp.t
    t22 = t[:, 1, 1]
    zero = t22 == 0.0
    if zero.any():
        raise SingularT(
            f"T22 = 0 at {_first_true_freq(tp.grid, zero):.6g} Hz; no S form"
        )
    s = np.empty_like(t)
    s[:, 0, 0] = t[:, 0, 1] / t22
    s[:, 0, 1] = (t[:, 0, 0] * t22 - t[:, 0, 1] * t[:, 1, 0]) / t22
    s[:, 1, 0] = 1.0 / t22
    s[:, 1, 1] = -t[:, 1, 0] / t22
    return NPortNetwork(tp.grid, s, tp.reference_impedance)


def identity_t(grid: FrequencyGrid, reference_impedance: float = 50.0) -> TwoPortT:
    t = np.broadcast_to(np.eye(2, dtype=np.complex128), (len(grid), 2, 2))
    return TwoPortT(grid, t.copy(), reference_impedance)


def cascade(a: TwoPortT, b: TwoPortT) -> TwoPortT:
    """Per-frequency matrix product a @ b (a's port 2 into b's port 1)."""
    require_compatible(a.grid, b.grid, "cascaded two-ports")
    if a.reference_impedance != b.reference_impedance:
        raise ReferenceImpedanceMismatch(
            f"{a.reference_impedance} ohm vs {b.reference_impedance} ohm"
        )
    return TwoPortT(a.grid, kernels.cascade2(a.t, b.t), a.reference_impedance)


def input_reflection(net: NPortNetwork, gamma_load) -> np.ndarray:
    """Reflection looking into port 1 of a two-port terminated by gamma_load.

    Gamma_in = S11 + S12*S21*G / (1 - S22*G), with gamma_load scalar or (F,).
    """
    if net.n_ports != 2:
        raise ValueError("input_reflection needs a two-port")
    s = net.s
    g = np.broadcast_to(np.asarray(gamma_load, dtype=np.complex128), (len(net.grid),))
    return s[:, 0, 0] + s[:, 0, 1] * s[:, 1, 0] * g / (1.0 - s[:, 1, 1] * g)


def reciprocity_deviation(net: NPortNetwork) -> float:
    """max over frequencies and (i, j) of |S_ij - S_ji|."""
    return float(np.max(np.abs(net.s - net.s.transpose(0, 2, 1))))


def reduce_ports(net: NPortNetwork, kept: Sequence[int],
                 terminations: Mapping[int, complex] | None = None) -> NPortNetwork:
    """Terminate a subset of ports and return the network seen at the rest.

    kept : ordered port subset that remains (defines the output port order)
    terminations : reflection coefficient per terminated port (scalar complex
        or per-frequency array); every port not in ``kept`` must appear.

    With partition p = kept, t = terminated and Gamma the diagonal of the
    termination coefficients:

        S_red = S_pp + S_pt (I - Gamma S_tt)^-1 Gamma S_tp

    All-zero terminations return exactly the S_pp submatrix.
    """
    n = net.n_ports
    kept = list(kept)
    if not kept:
        raise ValueError("kept must be non-empty")
    if len(set(kept)) != len(kept) or any(p < 0 or p >= n for p in kept):
        raise ValueError("kept ports must be unique and in range")
    terminated = sorted(set(range(n)) - set(kept))
    terminations = dict(terminations or {})
    if set(terminations) != set(terminated):
        raise ValueError(
            f"terminations must cover exactly the non-kept ports {terminated}"
        )

    s = net.s
    s_pp = s[:, kept, :][:, :, kept]
    if not terminated:
        return NPortNetwork(net.grid, s_pp, net.reference_impedance)

    npts = len(net.grid)
    gamma = np.empty((npts, len(terminated)), dtype=np.complex128)
    for col, port in enumerate(terminated):
        gamma[:, col] = terminations[port]
    if not gamma.any():
        return NPortNetwork(net.grid, s_pp, net.reference_impedance)

    s_tt = s[:, terminated, :][:, :, terminated]
    s_tp = s[:, terminated, :][:, :, kept]
    s_pt = s[:, kept, :][:, :, terminated]

    eye = np.eye(len(terminated), dtype=np.complex128)
    a = eye - gamma[:, :, None] * s_tt
    rhs = gamma[:, :, None] * s_tp
    x, reldet = kernels.solve_small(a, rhs)
    bad = reldet < _REDUCTION_RELDET_MIN
    if bad.any():
        raise SingularReduction(
            f"(I - Gamma*S_tt) singular at {_first_true_freq(net.grid, bad):.6g} Hz"
        )
    s_red = s_pp + s_pt @ x
    return NPortNetwork(net.grid, s_red, net.reference_impedance)
