"""Campaign directory layout: determinism, integrity, round trips."""

import hashlib
import json
import os

import numpy as np
import pytest

from mpcal import (
    ChecksumMismatch,
    FormatVersionMismatch,
    IncompleteDataset,
    SystemConfig,
    read_dataset,
    read_truth,
    simulate_measurements,
    synth_campaign,
    write_dataset,
)


def small_cfg(**kw):
    base = dict(n_ports=3, f_start_hz=1e9, f_stop_hz=5e9, n_freq=11, seed=2)
    base.update(kw)
    return SystemConfig(**base)


def tree_digest(root):
    h = hashlib.sha256()
    for dirpath, dirnames, filenames in sorted(os.walk(root)):
        dirnames.sort()
        for name in sorted(filenames):
            path = os.path.join(dirpath, name)
            h.update(os.path.relpath(path, root).encode())
            with open(path, "rb") as fh:
                h.update(fh.read())
    return h.hexdigest()


class TestWrite:
    def test_layout_complete(self, tmp_path):
        cfg = small_cfg()
        simulate_measurements(cfg, tmp_path)
        assert (tmp_path / "manifest.json").is_file()
        for name in cfg.phantom_names:
            assert (tmp_path / "truth" / f"true_{name}.s3p").is_file()
            assert (tmp_path / "refl" / f"port0_{name}.s1p").is_file()
        for state in ("open", "short", "load"):
            assert (tmp_path / "ecal" / f"state_{state}.s1p").is_file()
            assert (tmp_path / "ecal" / f"measured_state_{state}.s1p").is_file()
        assert (tmp_path / "ecal" / "thru.s2p").is_file()
        assert (tmp_path / "thru" / "pair0_1_air.s2p").is_file()
        assert (tmp_path / "truth" / "box_2.csv").is_file()
        assert (tmp_path / "truth" / "k_1_2.csv").is_file()

    def test_byte_deterministic(self, tmp_path):
        cfg = small_cfg(noise_sigma=1e-4)
        simulate_measurements(cfg, tmp_path / "a")
        simulate_measurements(cfg, tmp_path / "b")
        assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")

    def test_manifest_checksums_match(self, tmp_path):
        manifest = write_dataset(tmp_path, synth_campaign(small_cfg()))
        for rel, want in manifest["files"].items():
            with open(tmp_path / rel, "rb") as fh:
                assert hashlib.sha256(fh.read()).hexdigest() == want


class TestRead:
    def test_round_trip_exact(self, tmp_path):
        cfg = small_cfg(noise_sigma=1e-4)
        camp = simulate_measurements(cfg, tmp_path)
        bundle = read_dataset(tmp_path)
        assert bundle.config == cfg
        assert np.array_equal(bundle.grid.points, camp.grid.points)
        for name in camp.ecal_measured:
            assert np.array_equal(bundle.ecal_measured[name],
                                  camp.ecal_measured[name])
            assert np.array_equal(bundle.char.states[name],
                                  camp.char.states[name])
        assert np.array_equal(bundle.char.thru.s, camp.char.thru.s)
        for port, per_port in camp.phantoms.reflection.items():
            for name, arr in per_port.items():
                assert np.array_equal(bundle.phantoms.reflection[port][name], arr)
        for pair, net in camp.phantoms.thru.items():
            assert np.array_equal(bundle.phantoms.thru[pair].s, net.s)
        assert bundle.tau_hint_s == dict(camp.truth.tau_hint_s)

    def test_truth_round_trip_exact(self, tmp_path):
        cfg = small_cfg()
        camp = simulate_measurements(cfg, tmp_path)
        truth = read_truth(tmp_path)
        for name, net in camp.truth.true_network.items():
            assert np.array_equal(truth.true_network[name].s, net.s)
        for port, box in camp.truth.boxes.items():
            assert np.array_equal(truth.boxes[port].e00, box.e00)
            assert np.array_equal(truth.boxes[port].e11, box.e11)
            assert np.array_equal(truth.boxes[port].p, box.p)
        for pair, track in camp.truth.k.items():
            assert np.array_equal(truth.k[pair].k, track.k)

    def test_thru_phase_estimate_covers_pairs(self, tmp_path):
        simulate_measurements(small_cfg(), tmp_path)
        est = read_dataset(tmp_path).thru_phase_estimate()
        assert est.tau_est > 0
        for pair in ((0, 1), (0, 2), (1, 2)):
            assert est.tau_for(pair) == est.tau_est

    def test_tampered_payload(self, tmp_path):
        simulate_measurements(small_cfg(), tmp_path)
        victim = tmp_path / "refl" / "port1_water.s1p"
        victim.write_text(victim.read_text() + "! tampered\n")
        with pytest.raises(ChecksumMismatch, match="port1_water"):
            read_dataset(tmp_path)

    def test_missing_payload(self, tmp_path):
        simulate_measurements(small_cfg(), tmp_path)
        os.remove(tmp_path / "thru" / "pair0_2_air.s2p")
        with pytest.raises(IncompleteDataset, match="pair0_2_air"):
            read_dataset(tmp_path)

    def test_unknown_version(self, tmp_path):
        simulate_measurements(small_cfg(), tmp_path)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        manifest["format_version"] = "7"
        (tmp_path / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(FormatVersionMismatch):
            read_dataset(tmp_path)

    def test_wrong_kind(self, tmp_path):
        simulate_measurements(small_cfg(), tmp_path)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        manifest["kind"] = "mpcal-calibration-set"
        (tmp_path / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(FormatVersionMismatch, match="kind"):
            read_dataset(tmp_path)

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(IncompleteDataset):
            read_dataset(tmp_path / "empty")

    def test_truth_checks_integrity_too(self, tmp_path):
        simulate_measurements(small_cfg(), tmp_path)
        victim = tmp_path / "truth" / "box_0.csv"
        victim.write_text(victim.read_text() + "\n")
        with pytest.raises(ChecksumMismatch):
            read_truth(tmp_path)
