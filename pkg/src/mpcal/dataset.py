"""Directory layout for a measurement campaign and its ground truth.

A dataset directory holds one manifest plus Touchstone/CSV payloads::

    manifest.json                       version, config echo, checksums
    ecal/state_<name>.s1p               characterized ECal reflect states
    ecal/thru.s2p                       characterized ECal thru
    ecal/measured_state_<name>.s1p      raw reflect-state measurements
    refl/port<i>_<phantom>.s1p          raw per-port reflections
    thru/pair<i>_<j>_<phantom>.s2p      raw pairwise two-ports (thru phantom)
    truth/true_<phantom>.s<N>p          oracle antenna-plane networks
    truth/box_<i>.csv, truth/k_<i>_<j>.csv   oracle error terms

Touchstone payloads are written HZ/RI so every complex value round-trips
exactly.  The manifest carries no timestamp and is dumped with sorted keys,
so a (config, seed) pair maps to byte-identical trees.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .calibration import (
    FORMAT_VERSION,
    ECalCharacterization,
    PhantomMeasurementSet,
    ThruPhaseEstimate,
    _box_csv,
    _k_csv,
    _load_csv,
    _sha256_file,
)
from .errormodel import ErrorBox3, PairTracking
from .errors import ChecksumMismatch, FormatVersionMismatch, GridMismatch, IncompleteDataset
from .net import FrequencyGrid, NPortNetwork
from .simulator import Campaign, GroundTruth, SystemConfig
from .touchstone import TouchstoneOptions, parse_touchstone, write_touchstone

_TS_OPTS = TouchstoneOptions(freq_unit="HZ", format="RI")


def _one_port(grid: FrequencyGrid, gamma: np.ndarray) -> NPortNetwork:
    return NPortNetwork(grid, np.asarray(gamma, dtype=np.complex128)[:, None, None])


def _pair_key(i: int, j: int) -> str:
    return f"{i}_{j}"


def write_dataset(out_dir, campaign: Campaign) -> dict:
    """Write a campaign (raw measurements + ground truth) to a directory.

    Returns the manifest dict that was written.
    """
    cfg = campaign.config
    grid = campaign.grid
    n = cfg.n_ports
    tp = cfg.thru_phantom

    payload: dict[str, str] = {}
    for name in campaign.char.state_names:
        payload[f"ecal/state_{name}.s1p"] = write_touchstone(
            _one_port(grid, campaign.char.states[name]), _TS_OPTS)
    payload["ecal/thru.s2p"] = write_touchstone(campaign.char.thru, _TS_OPTS)
    for name, raw in campaign.ecal_measured.items():
        payload[f"ecal/measured_state_{name}.s1p"] = write_touchstone(
            _one_port(grid, raw), _TS_OPTS)
    for port in range(n):
        for name in cfg.phantom_names:
            payload[f"refl/port{port}_{name}.s1p"] = write_touchstone(
                _one_port(grid, campaign.phantoms.reflection[port][name]), _TS_OPTS)
    for (i, j), net in campaign.phantoms.thru.items():
        payload[f"thru/pair{i}_{j}_{tp}.s2p"] = write_touchstone(net, _TS_OPTS)

    truth = campaign.truth
    for name, net in truth.true_network.items():
        payload[f"truth/true_{name}.s{n}p"] = write_touchstone(net, _TS_OPTS)
    for port, box in truth.boxes.items():
        payload[f"truth/box_{port}.csv"] = _box_csv(grid, box)
    for (i, j), track in truth.k.items():
        payload[f"truth/k_{i}_{j}.csv"] = _k_csv(grid, track)

    hashes = {}
    for rel, text in sorted(payload.items()):
        path = os.path.join(out_dir, *rel.split("/"))
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
        hashes[rel] = hashlib.sha256(text.encode("ascii")).hexdigest()

    manifest = {
        "format_version": FORMAT_VERSION,
        "kind": "mpcal-dataset",
        "config": cfg.to_dict(),
        "n_ports": n,
        "n_freq": len(grid),
        "grid_sha256": grid.digest(),
        "ecal_states": list(campaign.char.state_names),
        "phantoms": list(cfg.phantom_names),
        "thru_phantom": tp,
        "tau_hint_s": {_pair_key(i, j): tau
                       for (i, j), tau in sorted(truth.tau_hint_s.items())},
        "files": hashes,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


@dataclass(frozen=True, eq=False)
class DatasetBundle:
    """Everything the calibration stages consume, read back from disk."""

    manifest: dict
    config: SystemConfig
    grid: FrequencyGrid
    char: ECalCharacterization
    ecal_measured: Mapping[str, np.ndarray]
    phantoms: PhantomMeasurementSet
    tau_hint_s: Mapping[tuple[int, int], float]

    def thru_phase_estimate(self) -> ThruPhaseEstimate:
        """Sign-selection delay estimate built from the manifest hints."""
        taus = sorted(self.tau_hint_s.values())
        common = taus[len(taus) // 2] if taus else 0.0
        return ThruPhaseEstimate(common, dict(self.tau_hint_s))


def _load_manifest(in_dir, kind: str) -> dict:
    path = os.path.join(in_dir, "manifest.json")
    if not os.path.isfile(path):
        raise IncompleteDataset(f"{in_dir} has no manifest.json")
    with open(path, "r", encoding="ascii") as fh:
        manifest = json.load(fh)
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatVersionMismatch(
            f"dataset format {version!r}, supported {FORMAT_VERSION!r}")
    got_kind = manifest.get("kind")
    if got_kind != kind:
        raise FormatVersionMismatch(f"manifest kind {got_kind!r}, expected {kind!r}")
    for rel, want in manifest.get("files", {}).items():
        path = os.path.join(in_dir, *rel.split("/"))
        if not os.path.isfile(path):
            raise IncompleteDataset(f"payload {rel} missing from {in_dir}")
        got = _sha256_file(path)
        if got != want:
            raise ChecksumMismatch(f"{rel}: sha256 {got} != manifest {want}")
    return manifest


def _read_net(in_dir, rel: str, files: Mapping[str, str],
              expected_ports: int) -> NPortNetwork:
    if rel not in files:
        raise IncompleteDataset(f"{rel} not listed in manifest")
    with open(os.path.join(in_dir, *rel.split("/")), "r", encoding="ascii") as fh:
        return parse_touchstone(fh.read(), expected_ports=expected_ports)


def _check_grid(grid: FrequencyGrid, net: NPortNetwork, rel: str) -> None:
    if not grid.compatible(net.grid):
        raise GridMismatch(f"{rel} grid differs from the dataset grid")


def read_dataset(in_dir) -> DatasetBundle:
    """Load the calibration-facing half of a dataset directory.

    Verifies the format version and every payload checksum, then rebuilds
    the typed measurement containers on a single shared frequency grid.
    """
    manifest = _load_manifest(in_dir, "mpcal-dataset")
    files = manifest.get("files", {})
    config = SystemConfig.from_dict(manifest["config"])
    n = int(manifest["n_ports"])
    state_names = list(manifest["ecal_states"])
    phantom_names = list(manifest["phantoms"])
    tp = manifest["thru_phantom"]

    thru_net = _read_net(in_dir, "ecal/thru.s2p", files, 2)
    grid = thru_net.grid
    if grid.digest() != manifest.get("grid_sha256"):
        raise ChecksumMismatch("frequency grid does not match manifest grid_sha256")

    states = {}
    measured = {}
    for name in state_names:
        net = _read_net(in_dir, f"ecal/state_{name}.s1p", files, 1)
        _check_grid(grid, net, f"ecal/state_{name}.s1p")
        states[name] = net.s[:, 0, 0]
        net = _read_net(in_dir, f"ecal/measured_state_{name}.s1p", files, 1)
        _check_grid(grid, net, f"ecal/measured_state_{name}.s1p")
        measured[name] = net.s[:, 0, 0]
    char = ECalCharacterization(grid, states, thru_net)

    reflection: dict[int, dict[str, np.ndarray]] = {}
    for port in range(n):
        per_port = {}
        for name in phantom_names:
            rel = f"refl/port{port}_{name}.s1p"
            net = _read_net(in_dir, rel, files, 1)
            _check_grid(grid, net, rel)
            per_port[name] = net.s[:, 0, 0]
        reflection[port] = per_port

    thru: dict[tuple[int, int], NPortNetwork] = {}
    for i in range(n):
        for j in range(i + 1, n):
            rel = f"thru/pair{i}_{j}_{tp}.s2p"
            net = _read_net(in_dir, rel, files, 2)
            _check_grid(grid, net, rel)
            thru[(i, j)] = net

    phantoms = PhantomMeasurementSet(grid, tuple(phantom_names), reflection,
                                     thru, tp)
    hints = {}
    for key, tau in manifest.get("tau_hint_s", {}).items():
        i, j = key.split("_")
        hints[(int(i), int(j))] = float(tau)
    return DatasetBundle(manifest, config, grid, char, measured, phantoms, hints)


def read_truth(in_dir) -> GroundTruth:
    """Load the oracle half of a dataset directory."""
    manifest = _load_manifest(in_dir, "mpcal-dataset")
    files = manifest.get("files", {})
    n = int(manifest["n_ports"])
    phantom_names = list(manifest["phantoms"])

    nets = {}
    grid: FrequencyGrid | None = None
    for name in phantom_names:
        rel = f"truth/true_{name}.s{n}p"
        net = _read_net(in_dir, rel, files, n)
        if grid is None:
            grid = net.grid
        else:
            _check_grid(grid, net, rel)
        nets[name] = net
    assert grid is not None
    if grid.digest() != manifest.get("grid_sha256"):
        raise ChecksumMismatch("frequency grid does not match manifest grid_sha256")

    boxes = {}
    for port in range(n):
        rel = f"truth/box_{port}.csv"
        if rel not in files:
            raise IncompleteDataset(f"{rel} not listed in manifest")
        data = _load_csv(os.path.join(in_dir, *rel.split("/")), 7)
        if not grid.compatible(FrequencyGrid(data[:, 0])):
            raise GridMismatch(f"{rel} grid differs from the dataset grid")
        boxes[port] = ErrorBox3(grid, data[:, 1] + 1j * data[:, 2],
                                data[:, 3] + 1j * data[:, 4],
                                data[:, 5] + 1j * data[:, 6])

    ks = {}
    for i in range(n):
        for j in range(i + 1, n):
            rel = f"truth/k_{i}_{j}.csv"
            if rel not in files:
                raise IncompleteDataset(f"{rel} not listed in manifest")
            data = _load_csv(os.path.join(in_dir, *rel.split("/")), 3)
            if not grid.compatible(FrequencyGrid(data[:, 0])):
                raise GridMismatch(f"{rel} grid differs from the dataset grid")
            ks[(i, j)] = PairTracking(grid, data[:, 1] + 1j * data[:, 2])

    hints = {}
    for key, tau in manifest.get("tau_hint_s", {}).items():
        i, j = key.split("_")
        hints[(int(i), int(j))] = float(tau)
    return GroundTruth(grid, nets, boxes, ks, hints)


def simulate_measurements(cfg: SystemConfig, out_dir) -> Campaign:
    """Generate a campaign for cfg and write it to out_dir; returns the
    in-memory campaign (including ground truth)."""
    from .simulator import synth_campaign

    campaign = synth_campaign(cfg)
    write_dataset(out_dir, campaign)
    return campaign
