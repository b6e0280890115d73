"""In-situ multiport calibration pipeline and calibration-set persistence.

The procedure has three stages, run in order by :func:`build_calibration`:

1. reference-port: a standard three-standard one-port solve at the port that
   carries the electronic calibration module, followed by de-embedding the
   module's known thru state, which lands the reference plane at the antenna
   connector.
2. transfer: the reference port's corrected reflections of three
   electrically distinct phantoms become known standards for every other
   port, so each port's error box is solved without any connector access.
3. unknown-thru: per antenna pair, reciprocity of the air coupling path
   (S12 = S21) pins the transmission-tracking product k up to sign; the sign
   is resolved from a user-supplied path-delay estimate at the first
   frequency and by phase continuity across the sweep.

Degenerate-standard policy (also applied to ECal states): hard error when
the minimum pairwise separation drops below 1e-3, warning below 0.05.
Transmission solves enforce a path-level floor (default -50 dB) and a
phase-tracking ambiguity band: any chosen jump within 10 degrees of the
90-degree decision boundary is a hard error.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Mapping

import numpy as np

from . import kernels
from .errormodel import (
    ErrorBox3,
    PairTracking,
    _n_receiver_inv,
    _n_source_inv,
    correct_reflection,
    correct_two_port,
    shift_reference_plane,
    solve_three_standards,
)
from .errors import (
    ChecksumMismatch,
    DegenerateStandards,
    FormatVersionMismatch,
    GridMismatch,
    IncompleteDataset,
    InsufficientSignal,
    MissingPair,
    MpcalError,
    PhaseTrackingAmbiguous,
    StandardSeparationWarning,
    ZeroTracking,
    ZeroTransmission,
)
from .net import FrequencyGrid, NPortNetwork, require_compatible, s_to_t

SEPARATION_ERROR = 1e-3
SEPARATION_WARN = 0.05
DEFAULT_SIGNAL_FLOOR_DB = -50.0
PHASE_AMBIG_DEG = 80.0  # within 10 degrees of the 90-degree boundary
_THRU_S21_MIN = 1e-6
_LEVEL_SLACK_DB = 1e-6
FORMAT_VERSION = "1"


def _per_freq(grid: FrequencyGrid, value, name: str) -> np.ndarray:
    out = np.ascontiguousarray(
        np.broadcast_to(np.asarray(value, dtype=np.complex128), (len(grid),)))
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} must be finite")
    return out


def min_pairwise_separation(gammas: list[np.ndarray]) -> np.ndarray:
    """Per-frequency minimum |Γ_i - Γ_j| over all pairs of standards."""
    out = None
    for i in range(len(gammas)):
        for j in range(i + 1, len(gammas)):
            d = np.abs(gammas[i] - gammas[j])
            out = d if out is None else np.minimum(out, d)
    return out


def _check_separation(gammas: list[np.ndarray], what: str) -> np.ndarray:
    sep = min_pairwise_separation(gammas)
    worst = float(np.min(sep))
    if worst < SEPARATION_ERROR:
        raise DegenerateStandards(
            f"{what} separated by {worst:.3g} < {SEPARATION_ERROR} "
            "(electrically indistinct)")
    if worst < SEPARATION_WARN:
        warnings.warn(
            f"{what} separated by {worst:.3g} < {SEPARATION_WARN}; "
            "calibration will lose precision", StandardSeparationWarning,
            stacklevel=3)
    return sep


def _quiet_solve(grid, standards):
    # separation policy already ran at this layer; keep the inner solver's
    # duplicate warning out of user logs
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StandardSeparationWarning)
        return solve_three_standards(grid, standards)


@dataclass(frozen=True, eq=False)
class ECalCharacterization:
    """Factory knowledge of the ECal: named reflect states and the thru.

    states maps state name to the known reflection coefficient at the
    module's connector plane; thru is the known two-port of the "thru"
    switch setting.  At least three states; they must stay electrically
    distinct over the whole grid (error below 1e-3 separation, warning
    below 0.05); the thru must carry signal (|S21| > 1e-6).
    """

    grid: FrequencyGrid
    states: Mapping[str, np.ndarray]
    thru: NPortNetwork

    def __post_init__(self):
        states = {str(k): _per_freq(self.grid, v, f"state {k}")
                  for k, v in self.states.items()}
        if len(states) < 3:
            raise ValueError(f"need >= 3 ECal states, got {len(states)}")
        object.__setattr__(self, "states", states)
        if self.thru.n_ports != 2:
            raise ValueError("ECal thru must be a two-port")
        require_compatible(self.grid, self.thru.grid, "ECal states and thru")
        low = np.abs(self.thru.s[:, 1, 0]) <= _THRU_S21_MIN
        if low.any():
            f = float(self.thru.grid.points[np.nonzero(low)[0][0]])
            raise ZeroTransmission(f"ECal thru |S21| <= {_THRU_S21_MIN} at {f:.6g} Hz")
        _check_separation(list(states.values()), "ECal states")

    @property
    def state_names(self) -> list[str]:
        return list(self.states.keys())


@dataclass(frozen=True, eq=False)
class PhantomMeasurementSet:
    """Raw phantom campaign: reflections for every port under exactly three
    phantoms, plus one raw two-port per antenna pair under ``thru_phantom``.

    reflection[port][phantom] is the uncorrected reflection at the VNA plane
    (the reference port measured with the ECal switched to thru).  Ports
    must be contiguous from 0; pairs are keyed (i, j) with i < j and must
    cover every pair.
    """

    grid: FrequencyGrid
    phantom_names: tuple[str, str, str]
    reflection: Mapping[int, Mapping[str, np.ndarray]]
    thru: Mapping[tuple[int, int], NPortNetwork]
    thru_phantom: str = ""

    def __post_init__(self):
        names = tuple(str(n) for n in self.phantom_names)
        if len(names) != 3 or len(set(names)) != 3:
            raise ValueError("exactly 3 distinct phantom names required")
        object.__setattr__(self, "phantom_names", names)
        if not self.thru_phantom:
            object.__setattr__(self, "thru_phantom", names[0])

        ports = sorted(self.reflection)
        n = len(ports)
        if n < 2 or ports != list(range(n)):
            raise ValueError("reflection ports must be contiguous from 0")
        refl: dict[int, dict[str, np.ndarray]] = {}
        for port in ports:
            per_port = {}
            for name in names:
                if name not in self.reflection[port]:
                    raise IncompleteDataset(
                        f"reflection of port {port} under phantom {name!r} missing")
                per_port[name] = _per_freq(self.grid, self.reflection[port][name],
                                           f"reflection[{port}][{name}]")
            refl[port] = per_port
        object.__setattr__(self, "reflection", refl)

        thru = dict(self.thru)
        for (i, j), net in thru.items():
            if not (0 <= i < j < n):
                raise ValueError(f"pair key {(i, j)} not canonical (i < j < n_ports)")
            if net.n_ports != 2:
                raise ValueError(f"pair {(i, j)} measurement must be a two-port")
            require_compatible(self.grid, net.grid, f"pair {(i, j)} measurement")
        for i in range(n):
            for j in range(i + 1, n):
                if (i, j) not in thru:
                    raise IncompleteDataset(
                        f"thru measurement for pair ({i}, {j}) missing")
        object.__setattr__(self, "thru", thru)

    @property
    def n_ports(self) -> int:
        return len(self.reflection)


@dataclass(frozen=True)
class ThruPhaseEstimate:
    """One-way group-delay estimate of the antenna-pair coupling paths,
    used only to select the square-root sign at the first frequency.
    ``per_pair`` overrides the common estimate for individual pairs."""

    tau_est: float
    per_pair: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if not (math.isfinite(self.tau_est) and self.tau_est >= 0.0):
            raise ValueError("tau_est must be finite and >= 0")
        for pair, tau in self.per_pair.items():
            if not (math.isfinite(tau) and tau >= 0.0):
                raise ValueError(f"per-pair tau for {pair} must be finite and >= 0")

    def tau_for(self, pair: tuple[int, int] | None) -> float:
        if pair is not None and pair in self.per_pair:
            return float(self.per_pair[pair])
        return float(self.tau_est)


@dataclass(frozen=True, eq=False)
class CalibrationSet:
    """Everything needed to correct raw multiport data: one error box per
    port and one transmission-tracking product per unordered pair."""

    grid: FrequencyGrid
    reference_port: int
    boxes: Mapping[int, ErrorBox3]
    k: Mapping[tuple[int, int], PairTracking]
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        boxes = dict(self.boxes)
        n = len(boxes)
        if sorted(boxes) != list(range(n)) or n < 2:
            raise ValueError("boxes must cover contiguous ports 0..n-1, n >= 2")
        if not (0 <= self.reference_port < n):
            raise ValueError("reference_port out of range")
        for port, box in boxes.items():
            require_compatible(self.grid, box.grid, f"box {port}")
        ks = dict(self.k)
        for i in range(n):
            for j in range(i + 1, n):
                if (i, j) not in ks:
                    raise ValueError(f"k for pair ({i}, {j}) missing")
        for pair, track in ks.items():
            i, j = pair
            if not (0 <= i < j < n):
                raise ValueError(f"pair key {pair} not canonical")
            require_compatible(self.grid, track.grid, f"k {pair}")
        object.__setattr__(self, "boxes", boxes)
        object.__setattr__(self, "k", ks)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def n_ports(self) -> int:
        return len(self.boxes)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.k)


def calibrate_reference_port(char: ECalCharacterization,
                             measured_states: Mapping[str, np.ndarray]) -> ErrorBox3:
    """Solve the reference-port error box from measured ECal states and
    de-embed the module's thru, putting the plane at the antenna connector.

    The first three characterized states present in measured_states are
    used; extra states are ignored.
    """
    names = [n for n in char.state_names if n in measured_states]
    if len(names) < 3:
        raise IncompleteDataset(
            f"measured ECal states cover {len(names)} of >=3 required "
            f"characterized states {char.state_names}")
    names = names[:3]
    standards = [(char.states[n],
                  _per_freq(char.grid, measured_states[n], f"measured {n}"))
                 for n in names]
    box = _quiet_solve(char.grid, standards)
    return shift_reference_plane(box, char.thru)


def transfer_calibration(ref_box: ErrorBox3,
                         ref_raw: Mapping[str, np.ndarray],
                         other_raw: Mapping[int, Mapping[str, np.ndarray]],
                         reference_port: int) -> dict[int, ErrorBox3]:
    """Spread the reference-port calibration to every other port.

    The reference port's corrected phantom reflections are the actual
    antenna-plane reflection of each phantom (identical antennas), so they
    serve as three known standards for solving every other port's box.
    Returns a box per port, the reference port's included unchanged.
    """
    names = list(ref_raw)
    if len(names) != 3:
        raise ValueError(f"exactly 3 phantoms required, got {len(names)}")
    if reference_port in other_raw:
        raise ValueError("other_raw must not contain the reference port")
    grid = ref_box.grid
    gamma_std = {name: correct_reflection(ref_box,
                                          _per_freq(grid, ref_raw[name], name))
                 for name in names}
    _check_separation(list(gamma_std.values()), "phantom standards")

    boxes = {reference_port: ref_box}
    for port in sorted(other_raw):
        per_port = other_raw[port]
        standards = []
        for name in names:
            if name not in per_port:
                raise IncompleteDataset(
                    f"reflection of port {port} under phantom {name!r} missing")
            standards.append((gamma_std[name],
                              _per_freq(grid, per_port[name], f"port {port} {name}")))
        boxes[port] = _quiet_solve(grid, standards)
    return boxes


def solve_unknown_thru(box_i: ErrorBox3, box_j: ErrorBox3,
                       measured_thru: NPortNetwork,
                       estimate: ThruPhaseEstimate,
                       signal_floor_db: float = DEFAULT_SIGNAL_FLOOR_DB,
                       pair: tuple[int, int] | None = None) -> PairTracking:
    """Recover the pair's transmission tracking k from a reciprocal path.

    Reciprocity of the unknown coupling network forces det(T_dut) = 1, so
    with G = N_A^-1 T_meas N_B^-1 the product satisfies k^2 = 1/det(G); the
    remaining sign is chosen at the first frequency from the delay estimate
    (corrected S21 phase within 90 degrees of -2*pi*f*tau) and afterwards by
    phase continuity.
    """
    grid = measured_thru.grid
    require_compatible(box_i.grid, grid, "box_i and thru measurement")
    require_compatible(box_j.grid, grid, "box_j and thru measurement")
    if measured_thru.n_ports != 2:
        raise ValueError("measured_thru must be a two-port")
    tau = estimate.tau_for(pair)
    label = f"pair {pair} " if pair is not None else ""

    # sign tracking needs adjacent points well under a quarter turn apart
    step_deg = math.degrees(2.0 * math.pi * grid.max_step * tau)
    if step_deg >= PHASE_AMBIG_DEG:
        raise PhaseTrackingAmbiguous(
            f"{label}expected per-step phase {step_deg:.1f} deg reaches the "
            f"ambiguity band (>= {PHASE_AMBIG_DEG:.0f} deg) for "
            f"tau_est = {tau:.3g} s; densify the grid or refine the estimate")

    zero12 = measured_thru.s[:, 0, 1] == 0.0
    if zero12.any():
        f = float(grid.points[np.nonzero(zero12)[0][0]])
        raise ZeroTransmission(f"{label}measured S12 = 0 at {f:.6g} Hz")
    t_meas = s_to_t(measured_thru)
    g = kernels.cascade2(kernels.cascade2(_n_source_inv(box_i), t_meas.t),
                         _n_receiver_inv(box_j))
    det_g = g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] * g[:, 1, 0]
    if np.any(det_g == 0.0):
        raise ZeroTracking(f"{label}det of normalized measurement vanished")
    k0 = np.sqrt(1.0 / det_g)

    s21_base = 1.0 / (k0 * g[:, 1, 1])
    level_db = 20.0 * np.log10(np.abs(s21_base))
    worst = float(np.min(level_db))
    if worst < signal_floor_db - _LEVEL_SLACK_DB:
        f = float(grid.points[int(np.argmin(level_db))])
        raise InsufficientSignal(
            f"{label}path level {worst:.2f} dB at {f:.6g} Hz is below the "
            f"{signal_floor_db:.2f} dB floor")

    target0 = -2.0 * math.pi * float(grid.points[0]) * tau
    signs, max_jump, ambig = kernels.track_root_signs(
        np.ascontiguousarray(np.angle(s21_base)), target0,
        math.radians(PHASE_AMBIG_DEG))
    if ambig >= 0:
        f = float(grid.points[ambig])
        raise PhaseTrackingAmbiguous(
            f"{label}chosen phase step {math.degrees(max_jump):.1f} deg at "
            f"{f:.6g} Hz is within 10 deg of the 90 deg boundary")
    return PairTracking(grid, k0 * signs)


def _staged(stage: str):
    class _Stage:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, MpcalError):
                exc.stage = stage
            return False

    return _Stage()


def build_calibration(char: ECalCharacterization,
                      ecal_measurements: Mapping[str, np.ndarray],
                      phantoms: PhantomMeasurementSet,
                      estimate: ThruPhaseEstimate,
                      signal_floor_db: float = DEFAULT_SIGNAL_FLOOR_DB,
                      reference_port: int = 0) -> CalibrationSet:
    """Run the full three-stage procedure and assemble a CalibrationSet.

    Any library error raised mid-pipeline is re-raised with ``stage`` set to
    the failing stage name ("reference-port", "transfer", "unknown-thru").
    """
    grid = phantoms.grid
    require_compatible(char.grid, grid, "ECal characterization and campaign")
    if not (0 <= reference_port < phantoms.n_ports):
        raise ValueError("reference_port out of range")

    with _staged("reference-port"):
        ref_box = calibrate_reference_port(char, ecal_measurements)

    with _staged("transfer"):
        ref_raw = phantoms.reflection[reference_port]
        other_raw = {p: r for p, r in phantoms.reflection.items()
                     if p != reference_port}
        boxes = transfer_calibration(ref_box, ref_raw, other_raw, reference_port)
        gamma_std = [correct_reflection(ref_box, ref_raw[n])
                     for n in phantoms.phantom_names]
        sep = min_pairwise_separation(gamma_std)

    ks: dict[tuple[int, int], PairTracking] = {}
    min_level = math.inf
    with _staged("unknown-thru"):
        for pair in sorted(phantoms.thru):
            i, j = pair
            ks[pair] = solve_unknown_thru(boxes[i], boxes[j], phantoms.thru[pair],
                                          estimate, signal_floor_db, pair)
            corr = correct_two_port(boxes[i], boxes[j], ks[pair], phantoms.thru[pair])
            min_level = min(min_level,
                            float(np.min(20.0 * np.log10(np.abs(corr.s[:, 1, 0])))))

    metadata = {
        "created": datetime.now(timezone.utc).isoformat(),
        "reference_port": reference_port,
        "phantom_names": list(phantoms.phantom_names),
        "thru_phantom": phantoms.thru_phantom,
        "tau_est_s": estimate.tau_est,
        "thresholds": {
            "separation_error": SEPARATION_ERROR,
            "separation_warn": SEPARATION_WARN,
            "signal_floor_db": signal_floor_db,
            "phase_ambiguity_deg": PHASE_AMBIG_DEG,
        },
        "diagnostics": {
            "standard_separation_per_freq": [float(v) for v in sep],
            "min_standard_separation": float(np.min(sep)),
            "min_path_level_db": min_level,
        },
    }
    return CalibrationSet(grid, reference_port, boxes, ks, metadata)


def apply_calibration(cal: CalibrationSet,
                      raw_pairwise: Mapping[tuple[int, int], NPortNetwork]
                      ) -> NPortNetwork:
    """Correct a full set of raw pairwise measurements into one N-port.

    Off-diagonal entries come from the single pair that measures them;
    every S_ii is the average of the corrected reflections from all pairs
    containing port i (identical in the noiseless case, averaging noise
    otherwise).
    """
    n = cal.n_ports
    for key in raw_pairwise:
        i, j = key
        if not (0 <= i < j < n):
            raise ValueError(f"pair key {key} not canonical for {n} ports")
    npts = len(cal.grid)
    s = np.zeros((npts, n, n), dtype=np.complex128)
    diag_count = np.zeros(n, dtype=np.int64)
    ref_z = None
    for i in range(n):
        for j in range(i + 1, n):
            raw = raw_pairwise.get((i, j))
            if raw is None:
                raise MissingPair(i, j)
            require_compatible(cal.grid, raw.grid, f"pair ({i}, {j}) measurement")
            ref_z = raw.reference_impedance if ref_z is None else ref_z
            corr = correct_two_port(cal.boxes[i], cal.boxes[j], cal.k[(i, j)], raw)
            s[:, i, i] += corr.s[:, 0, 0]
            s[:, j, j] += corr.s[:, 1, 1]
            s[:, i, j] = corr.s[:, 0, 1]
            s[:, j, i] = corr.s[:, 1, 0]
            diag_count[i] += 1
            diag_count[j] += 1
    s[:, range(n), range(n)] /= diag_count
    return NPortNetwork(cal.grid, s, ref_z if ref_z is not None else 50.0)


def _sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _csv_lines(header: list[str], columns: list[np.ndarray]) -> str:
    rows = [",".join(header)]
    for idx in range(columns[0].size):
        rows.append(",".join(f"{col[idx]:.17g}" for col in columns))
    return "\n".join(rows) + "\n"


def _box_csv(grid: FrequencyGrid, box: ErrorBox3) -> str:
    return _csv_lines(
        ["freq_hz", "e00_re", "e00_im", "e11_re", "e11_im", "p_re", "p_im"],
        [grid.points, box.e00.real, box.e00.imag,
         box.e11.real, box.e11.imag, box.p.real, box.p.imag])


def _k_csv(grid: FrequencyGrid, track: PairTracking) -> str:
    return _csv_lines(["freq_hz", "k_re", "k_im"],
                      [grid.points, track.k.real, track.k.imag])


def save_calibration(cal: CalibrationSet, out_dir) -> None:
    """Persist a CalibrationSet as a directory of CSV payloads + manifest.

    Floats are serialized with 17 significant digits, so load_calibration
    reproduces every value exactly.
    """
    os.makedirs(out_dir, exist_ok=True)
    payload: dict[str, str] = {}
    for port, box in cal.boxes.items():
        payload[f"box_{port}.csv"] = _box_csv(cal.grid, box)
    for (i, j), track in cal.k.items():
        payload[f"k_{i}_{j}.csv"] = _k_csv(cal.grid, track)
    hashes = {}
    for name, text in payload.items():
        with open(os.path.join(out_dir, name), "w", encoding="ascii") as fh:
            fh.write(text)
        hashes[name] = hashlib.sha256(text.encode("ascii")).hexdigest()
    manifest = {
        "format_version": FORMAT_VERSION,
        "kind": "mpcal-calibration-set",
        "n_ports": cal.n_ports,
        "reference_port": cal.reference_port,
        "n_freq": len(cal.grid),
        "grid_sha256": cal.grid.digest(),
        "metadata": cal.metadata,
        "files": hashes,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_csv(path, n_cols: int) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.float64, ndmin=2)
    if data.shape[1] != n_cols:
        raise FormatVersionMismatch(
            f"{path}: expected {n_cols} columns, found {data.shape[1]}")
    return data


def load_calibration(in_dir) -> CalibrationSet:
    """Inverse of :func:`save_calibration`, verifying version and checksums."""
    manifest_path = os.path.join(in_dir, "manifest.json")
    if not os.path.isfile(manifest_path):
        raise IncompleteDataset(f"{in_dir} has no manifest.json")
    with open(manifest_path, "r", encoding="ascii") as fh:
        manifest = json.load(fh)
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(
            f"calibration-set format {version!r}, supported {FORMAT_VERSION!r}")
    files = manifest["files"]
    for name, want in files.items():
        path = os.path.join(in_dir, name)
        if not os.path.isfile(path):
            raise IncompleteDataset(f"payload {name} missing from {in_dir}")
        got = _sha256_file(path)
        if got != want:
            raise ChecksumMismatch(f"{name}: sha256 {got} != manifest {want}")

    n = int(manifest["n_ports"])
    grid: FrequencyGrid | None = None
    boxes: dict[int, ErrorBox3] = {}
    for port in range(n):
        name = f"box_{port}.csv"
        if name not in files:
            raise IncompleteDataset(f"{name} not listed in manifest")
        data = _load_csv(os.path.join(in_dir, name), 7)
        g = FrequencyGrid(data[:, 0])
        if grid is None:
            grid = g
        elif not grid.compatible(g):
            raise GridMismatch(f"{name} grid differs from the set's grid")
        boxes[port] = ErrorBox3(g, data[:, 1] + 1j * data[:, 2],
                                data[:, 3] + 1j * data[:, 4],
                                data[:, 5] + 1j * data[:, 6])
    assert grid is not None
    if grid.digest() != manifest.get("grid_sha256"):
        raise ChecksumMismatch("frequency grid does not match manifest grid_sha256")
    ks: dict[tuple[int, int], PairTracking] = {}
    for i in range(n):
        for j in range(i + 1, n):
            name = f"k_{i}_{j}.csv"
            if name not in files:
                raise IncompleteDataset(f"{name} not listed in manifest")
            data = _load_csv(os.path.join(in_dir, name), 3)
            if not grid.compatible(FrequencyGrid(data[:, 0])):
                raise GridMismatch(f"{name} grid differs from the set's grid")
            ks[(i, j)] = PairTracking(grid, data[:, 1] + 1j * data[:, 2])
    return CalibrationSet(grid, int(manifest["reference_port"]), boxes, ks,
                          manifest.get("metadata", {}))
