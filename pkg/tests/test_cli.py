"""Command line interface: subcommands, JSON output, exit codes."""

import json
import subprocess
import sys

import pytest

from mpcal import SystemConfig, read_touchstone_file
from mpcal.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.strip() else None
    return code, payload, captured.err


def write_cfg(tmp_path, **kw):
    base = dict(n_ports=3, f_start_hz=1e9, f_stop_hz=5e9, n_freq=11, seed=3)
    base.update(kw)
    cfg = SystemConfig(**base)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    return path


class TestSimulate:
    def test_dump_config_round_trips(self, capsys):
        code, payload, _ = run_cli(capsys, "simulate", "--dump-config")
        assert code == 0
        assert SystemConfig.from_dict(payload["config"]) == SystemConfig()

    def test_writes_dataset(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path)
        out = tmp_path / "ds"
        code, payload, err = run_cli(capsys, "simulate", "-c", str(cfg),
                                     "-o", str(out))
        assert code == 0
        assert payload["n_ports"] == 3
        assert payload["pairs"] == 3
        assert (out / "manifest.json").is_file()
        assert "wrote campaign" in err

    def test_seed_override(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path)
        out = tmp_path / "ds"
        code, payload, _ = run_cli(capsys, "simulate", "-c", str(cfg),
                                   "-o", str(out), "--seed", "99")
        assert code == 0
        assert payload["seed"] == 99
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 99

    def test_missing_out(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path)
        code, payload, _ = run_cli(capsys, "simulate", "-c", str(cfg))
        assert code == 2
        assert "error" in payload

    def test_invalid_config_field(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n_ports": 1}))
        code, payload, err = run_cli(capsys, "simulate", "-c", str(path),
                                     "-o", str(tmp_path / "ds"))
        assert code == 2
        assert "n_ports" in payload["error"]

    def test_unparseable_config(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        code, payload, _ = run_cli(capsys, "simulate", "-c", str(path),
                                   "-o", str(tmp_path / "ds"))
        assert code == 2


@pytest.fixture()
def dataset(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "ds"
    assert main(["simulate", "-c", str(cfg), "-o", str(out)]) == 0
    capsys.readouterr()
    return out


class TestCalibrate:
    def test_builds_calset(self, dataset, tmp_path, capsys):
        out = tmp_path / "cs"
        code, payload, err = run_cli(capsys, "calibrate", str(dataset),
                                     "-o", str(out))
        assert code == 0
        assert (out / "manifest.json").is_file()
        assert payload["diagnostics"]["min_standard_separation"] > 0.05
        assert payload["reference_port"] == 0
        assert "calibrated 3 ports" in err

    def test_stage_failure_exit_code(self, dataset, tmp_path, capsys):
        code, payload, _ = run_cli(capsys, "calibrate", str(dataset),
                                   "-o", str(tmp_path / "cs"),
                                   "--signal-floor-db", "-20")
        assert code == 3
        assert payload["stage"] == "unknown-thru"

    def test_missing_dataset(self, tmp_path, capsys):
        code, payload, _ = run_cli(capsys, "calibrate", str(tmp_path / "nope"),
                                   "-o", str(tmp_path / "cs"))
        assert code == 2

    def test_explicit_tau_estimate(self, dataset, tmp_path, capsys):
        code, payload, _ = run_cli(capsys, "calibrate", str(dataset),
                                   "-o", str(tmp_path / "cs"),
                                   "--tau-est", "4.3e-10")
        assert code == 0
        assert payload["tau_est_s"] == 4.3e-10


class TestApplyVerify:
    @pytest.fixture()
    def calset(self, dataset, tmp_path, capsys):
        out = tmp_path / "cs"
        assert main(["calibrate", str(dataset), "-o", str(out)]) == 0
        capsys.readouterr()
        return out

    def test_full_loop_passes(self, dataset, calset, tmp_path, capsys):
        corrected = tmp_path / "corrected.s3p"
        code, payload, _ = run_cli(capsys, "apply", str(calset), str(dataset),
                                   "-o", str(corrected))
        assert code == 0
        assert payload == {"output": str(corrected), "n_ports": 3, "phantom": "air"}
        net = read_touchstone_file(corrected)
        assert net.n_ports == 3

        code, payload, err = run_cli(capsys, "verify", str(corrected),
                                     str(dataset), "--tol", "1e-9")
        assert code == 0
        assert payload["pass"] is True
        assert payload["max_abs_error"] < 1e-9
        assert "PASS" in err

    def test_verify_failure_is_exit_1(self, dataset, calset, tmp_path, capsys):
        corrected = tmp_path / "corrected.s3p"
        assert main(["apply", str(calset), str(dataset), "-o", str(corrected)]) == 0
        capsys.readouterr()
        code, payload, err = run_cli(capsys, "verify", str(corrected),
                                     str(dataset), "--tol", "1e-16")
        assert code == 1
        assert payload["pass"] is False
        assert "FAIL" in err

    def test_apply_unknown_phantom(self, dataset, calset, tmp_path, capsys):
        code, payload, _ = run_cli(capsys, "apply", str(calset), str(dataset),
                                   "-o", str(tmp_path / "c.s3p"),
                                   "--phantom", "water")
        assert code == 4
        assert "'water'" in payload["error"]

    def test_apply_extension_mismatch(self, dataset, calset, tmp_path, capsys):
        code, payload, _ = run_cli(capsys, "apply", str(calset), str(dataset),
                                   "-o", str(tmp_path / "c.s2p"))
        assert code == 4

    def test_verify_missing_corrected(self, dataset, capsys, tmp_path):
        code, payload, _ = run_cli(capsys, "verify", str(tmp_path / "no.s3p"),
                                   str(dataset))
        assert code == 5

    def test_verify_unknown_phantom(self, dataset, calset, tmp_path, capsys):
        corrected = tmp_path / "corrected.s3p"
        assert main(["apply", str(calset), str(dataset), "-o", str(corrected)]) == 0
        capsys.readouterr()
        code, payload, _ = run_cli(capsys, "verify", str(corrected),
                                   str(dataset), "--phantom", "cheese")
        assert code == 5

    def test_verify_noisy_data_fails_tight_tol(self, tmp_path, capsys):
        cfg = write_cfg(tmp_path, noise_sigma=1e-4)
        ds = tmp_path / "noisy"
        assert main(["simulate", "-c", str(cfg), "-o", str(ds)]) == 0
        cs = tmp_path / "noisy-cs"
        assert main(["calibrate", str(ds), "-o", str(cs)]) == 0
        corrected = tmp_path / "noisy.s3p"
        assert main(["apply", str(cs), str(ds), "-o", str(corrected)]) == 0
        capsys.readouterr()
        code, payload, _ = run_cli(capsys, "verify", str(corrected), str(ds),
                                   "--tol", "1e-9")
        assert code == 1
        assert payload["max_abs_error"] > 1e-9


class TestEntryPoints:
    def test_usage_error_is_exit_2(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2

    def test_module_entry_point(self, tmp_path):
        r = subprocess.run([sys.executable, "-m", "mpcal", "simulate",
                            "--dump-config"], capture_output=True, text=True)
        assert r.returncode == 0
        cfg = json.loads(r.stdout)["config"]
        assert cfg["n_ports"] == 8
