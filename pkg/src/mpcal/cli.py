"""``mpcal`` command line tool.

Four subcommands cover the full loop: ``simulate`` writes a synthetic
campaign directory, ``calibrate`` turns one into a calibration set,
``apply`` corrects the campaign's pairwise measurements into an N-port
Touchstone file, and ``verify`` compares a corrected file against the
campaign's ground truth.

Machine-readable JSON goes to stdout, human-readable status to stderr.
Exit codes: 0 success, 1 verification failed, 2 configuration or input
problem, 3 calibration-stage failure, 4 apply failure, 5 verify-input
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .calibration import (
    DEFAULT_SIGNAL_FLOOR_DB,
    ThruPhaseEstimate,
    apply_calibration,
    build_calibration,
    load_calibration,
    save_calibration,
)
from .dataset import read_dataset, read_truth, simulate_measurements
from .errors import MpcalError
from .simulator import SystemConfig
from .touchstone import TouchstoneOptions, read_touchstone_file, write_touchstone_file

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_CALIBRATE = 3
EXIT_APPLY = 4
EXIT_VERIFY_INPUT = 5

_TS_OPTS = TouchstoneOptions(freq_unit="HZ", format="RI")


class _Failure(Exception):
    def __init__(self, code: int, message: str, **extra):
        super().__init__(message)
        self.code = code
        self.extra = extra


def _load_config(path) -> SystemConfig:
    if path is None:
        return SystemConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as err:
        raise _Failure(EXIT_CONFIG, f"cannot read config: {err}") from None
    except json.JSONDecodeError as err:
        raise _Failure(EXIT_CONFIG, f"config is not valid JSON: {err}") from None
    return SystemConfig.from_dict(raw)


def _cmd_simulate(args) -> dict:
    try:
        cfg = _load_config(args.config)
        if args.seed is not None:
            cfg = SystemConfig.from_dict({**cfg.to_dict(), "seed": args.seed})
    except MpcalError as err:
        raise _Failure(EXIT_CONFIG, str(err)) from None
    if args.dump_config:
        return {"config": cfg.to_dict()}
    if args.out is None:
        raise _Failure(EXIT_CONFIG, "simulate: --out is required unless --dump-config")
    try:
        campaign = simulate_measurements(cfg, args.out)
    except (MpcalError, OSError) as err:
        raise _Failure(EXIT_CONFIG, str(err)) from None
    print(f"wrote campaign to {args.out} ({cfg.n_ports} ports, "
          f"{cfg.n_freq} points, seed {cfg.seed})", file=sys.stderr)
    return {
        "out": str(args.out),
        "n_ports": cfg.n_ports,
        "n_freq": cfg.n_freq,
        "seed": cfg.seed,
        "noise_sigma": cfg.noise_sigma,
        "phantoms": list(cfg.phantom_names),
        "pairs": len(campaign.truth.k),
    }


def _cmd_calibrate(args) -> dict:
    try:
        bundle = read_dataset(args.dataset)
    except (MpcalError, OSError) as err:
        raise _Failure(EXIT_CONFIG, f"cannot load dataset: {err}") from None
    if args.tau_est is not None:
        estimate = ThruPhaseEstimate(args.tau_est)
    else:
        estimate = bundle.thru_phase_estimate()
    reference = args.reference_port
    if reference is None:
        reference = bundle.config.reference_port
    try:
        cal = build_calibration(bundle.char, bundle.ecal_measured,
                                bundle.phantoms, estimate,
                                signal_floor_db=args.signal_floor_db,
                                reference_port=reference)
        save_calibration(cal, args.out)
    except MpcalError as err:
        raise _Failure(EXIT_CALIBRATE, str(err), stage=err.stage) from None
    except OSError as err:
        raise _Failure(EXIT_CALIBRATE, f"cannot write calibration set: {err}") from None
    diag = cal.metadata.get("diagnostics", {})
    print(f"calibrated {cal.n_ports} ports (reference {reference}); "
          f"min standard separation "
          f"{diag.get('min_standard_separation', float('nan')):.4f}, "
          f"min path level {diag.get('min_path_level_db', float('nan')):.1f} dB",
          file=sys.stderr)
    return {
        "calset": str(args.out),
        "n_ports": cal.n_ports,
        "reference_port": reference,
        "tau_est_s": estimate.tau_est,
        "signal_floor_db": args.signal_floor_db,
        "diagnostics": {
            "min_standard_separation": diag.get("min_standard_separation"),
            "min_path_level_db": diag.get("min_path_level_db"),
        },
    }


def _cmd_apply(args) -> dict:
    try:
        cal = load_calibration(args.calset)
        bundle = read_dataset(args.dataset)
        phantom = args.phantom or bundle.phantoms.thru_phantom
        if phantom != bundle.phantoms.thru_phantom:
            raise _Failure(
                EXIT_APPLY,
                f"dataset carries pairwise measurements under "
                f"{bundle.phantoms.thru_phantom!r} only, not {phantom!r}")
        net = apply_calibration(cal, bundle.phantoms.thru)
        write_touchstone_file(args.out, net, _TS_OPTS)
    except _Failure:
        raise
    except (MpcalError, OSError, ValueError) as err:
        raise _Failure(EXIT_APPLY, str(err)) from None
    print(f"wrote corrected {net.n_ports}-port network to {args.out} "
          f"(phantom {phantom!r})", file=sys.stderr)
    return {"output": str(args.out), "n_ports": net.n_ports, "phantom": phantom}


def _cmd_verify(args) -> dict:
    import numpy as np

    try:
        corrected = read_touchstone_file(args.corrected)
        truth = read_truth(args.dataset)
        if args.phantom is not None:
            phantom = args.phantom
        else:
            with open(os.path.join(args.dataset, "manifest.json"), "r",
                      encoding="ascii") as fh:
                phantom = json.load(fh)["thru_phantom"]
        want = truth.true_network.get(phantom)
        if want is None:
            raise _Failure(EXIT_VERIFY_INPUT,
                           f"no ground truth for phantom {phantom!r}")
        if want.n_ports != corrected.n_ports:
            raise _Failure(EXIT_VERIFY_INPUT,
                           f"port count mismatch: corrected {corrected.n_ports}, "
                           f"truth {want.n_ports}")
        if not want.grid.compatible(corrected.grid):
            raise _Failure(EXIT_VERIFY_INPUT,
                           "corrected file is not on the ground-truth grid")
    except _Failure:
        raise
    except (MpcalError, OSError, KeyError, json.JSONDecodeError, ValueError) as err:
        raise _Failure(EXIT_VERIFY_INPUT, str(err)) from None
    max_err = float(np.max(np.abs(corrected.s - want.s)))
    ok = max_err <= args.tol
    verdict = "PASS" if ok else "FAIL"
    print(f"{verdict}: max |S_corrected - S_true| = {max_err:.3e} "
          f"(tolerance {args.tol:.3e}, phantom {phantom!r})", file=sys.stderr)
    payload = {"pass": ok, "max_abs_error": max_err, "tol": args.tol,
               "phantom": phantom}
    if not ok:
        raise _Failure(EXIT_VERIFY_FAILED, "verification failed", **payload)
    return payload


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpcal",
        description="Multiport VNA calibration for switched-antenna arrays.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic campaign directory")
    p.add_argument("-c", "--config", help="JSON system configuration")
    p.add_argument("-o", "--out", help="output dataset directory")
    p.add_argument("--seed", type=int, help="override the configured seed")
    p.add_argument("--dump-config", action="store_true",
                   help="print the effective config as JSON and exit")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("calibrate", help="build a calibration set from a dataset")
    p.add_argument("dataset", help="dataset directory")
    p.add_argument("-o", "--out", required=True, help="output calibration-set directory")
    p.add_argument("--tau-est", type=float, default=None,
                   help="one-way path delay estimate in seconds "
                        "(default: manifest hints)")
    p.add_argument("--signal-floor-db", type=float, default=DEFAULT_SIGNAL_FLOOR_DB,
                   help="minimum acceptable corrected path level (default %(default)s)")
    p.add_argument("--reference-port", type=int, default=None,
                   help="override the dataset's reference port")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("apply", help="correct a dataset's pairwise measurements")
    p.add_argument("calset", help="calibration-set directory")
    p.add_argument("dataset", help="dataset directory")
    p.add_argument("-o", "--out", required=True,
                   help="output Touchstone path (.s<N>p)")
    p.add_argument("--phantom", default=None,
                   help="phantom name (default: the dataset's thru phantom)")
    p.set_defaults(func=_cmd_apply)

    p = sub.add_parser("verify", help="compare corrected data with ground truth")
    p.add_argument("corrected", help="corrected Touchstone file")
    p.add_argument("dataset", help="dataset directory holding ground truth")
    p.add_argument("--phantom", default=None,
                   help="phantom name (default: the dataset's thru phantom)")
    p.add_argument("--tol", type=float, default=1e-9,
                   help="max |S| deviation to pass (default %(default)s)")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload = args.func(args)
    except _Failure as err:
        body = {"error": str(err), **err.extra}
        print(json.dumps(body, indent=2, sort_keys=True))
        print(f"mpcal {args.command}: {err}", file=sys.stderr)
        return err.code
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
