"""Synthetic multiport imaging-system campaign generator.

Builds everything the calibration pipeline consumes, plus the ground truth
to judge it against:

* a true antenna-plane N-port per phantom: every port carries the same
  antenna two-port terminated by the phantom half-space (identical S_ii by
  construction), and port pairs couple through an attenuated delay line, so
  the network is exactly reciprocal;
* one random error adapter per port (smooth frequency response inside
  configured bounds), with the synthetic ECal cascaded into the reference
  port's chain;
* raw measurements: ECal reflect states seen through the reference adapter,
  per-port reflections and per-pair two-ports seen through the full chains,
  with inactive ports terminated by the configured reflection and optional
  additive complex Gaussian noise on every raw value.

Randomness is split into two child streams of the seed (adapter shapes,
measurement noise), so changing the noise level never changes the system
under test.  Identical (config, seed) reproduces the campaign bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .calibration import ECalCharacterization, PhantomMeasurementSet
from .errormodel import ErrorBox3, PairTracking
from .errors import ConfigInvalid
from .net import (
    FrequencyGrid,
    NPortNetwork,
    cascade,
    flip_two_port,
    input_reflection,
    make_two_port,
    reduce_ports,
    s_to_t,
    t_to_s,
)

C0 = 299792458.0
EPS0 = 8.8541878128e-12
_NAME_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-")


def _cfg_check(cond: bool, fieldname: str, message: str):
    if not cond:
        raise ConfigInvalid(fieldname, message)


@dataclass(frozen=True)
class PermittivityModel:
    """Complex relative permittivity versus frequency (Im <= 0 convention).

    kind "constant" uses eps_r as-is; kind "debye" evaluates
    eps_inf + (eps_s - eps_inf)/(1 + j*2*pi*f*tau) - j*sigma/(2*pi*f*eps0).
    """

    kind: str
    eps_r: complex = 1.0 + 0.0j
    eps_inf: float = 1.0
    eps_s: float = 1.0
    tau_s: float = 0.0
    sigma_s_m: float = 0.0

    def __post_init__(self):
        _cfg_check(self.kind in ("constant", "debye"), "phantom.kind",
                   f"must be constant or debye, got {self.kind!r}")
        if self.kind == "constant":
            eps = complex(self.eps_r)
            _cfg_check(eps.real >= 1.0 and eps.imag <= 0.0, "phantom.eps_r",
                       "need Re >= 1 and Im <= 0")
            object.__setattr__(self, "eps_r", eps)
        else:
            _cfg_check(self.eps_inf >= 1.0, "phantom.eps_inf", "must be >= 1")
            _cfg_check(self.eps_s >= self.eps_inf, "phantom.eps_s",
                       "must be >= eps_inf")
            _cfg_check(self.tau_s >= 0.0, "phantom.tau_s", "must be >= 0")
            _cfg_check(self.sigma_s_m >= 0.0, "phantom.sigma_s_m", "must be >= 0")

    @classmethod
    def constant(cls, eps_r) -> "PermittivityModel":
        return cls(kind="constant", eps_r=eps_r)

    @classmethod
    def debye(cls, eps_inf: float, eps_s: float, tau_s: float,
              sigma_s_m: float = 0.0) -> "PermittivityModel":
        return cls(kind="debye", eps_inf=eps_inf, eps_s=eps_s, tau_s=tau_s,
                   sigma_s_m=sigma_s_m)

    def evaluate(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=np.float64)
        if self.kind == "constant":
            return np.broadcast_to(np.complex128(self.eps_r), f.shape).copy()
        omega = 2.0 * np.pi * f
        eps = self.eps_inf + (self.eps_s - self.eps_inf) / (1.0 + 1j * omega * self.tau_s)
        if self.sigma_s_m > 0.0:
            eps = eps - 1j * self.sigma_s_m / (omega * EPS0)
        return eps

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant",
                    "eps_r": [self.eps_r.real, self.eps_r.imag]}
        return {"kind": "debye", "eps_inf": self.eps_inf, "eps_s": self.eps_s,
                "tau_s": self.tau_s, "sigma_s_m": self.sigma_s_m}

    @classmethod
    def from_dict(cls, d: Mapping) -> "PermittivityModel":
        kind = d.get("kind")
        if kind == "constant":
            eps = d.get("eps_r", [1.0, 0.0])
            if isinstance(eps, (int, float)):
                eps = [float(eps), 0.0]
            return cls.constant(complex(eps[0], eps[1]))
        if kind == "debye":
            return cls.debye(d.get("eps_inf", 1.0), d.get("eps_s", 1.0),
                             d.get("tau_s", 0.0), d.get("sigma_s_m", 0.0))
        raise ConfigInvalid("phantom.kind", f"must be constant or debye, got {kind!r}")


def phantom_gamma(model: PermittivityModel, f) -> np.ndarray:
    """Half-space reflection coefficient (1 - sqrt(eps))/(1 + sqrt(eps))."""
    root = np.sqrt(model.evaluate(f))
    return (1.0 - root) / (1.0 + root)


@dataclass(frozen=True)
class AntennaModel:
    """Common antenna two-port: flat loss, linear phase, real mismatch."""

    insertion_loss_db: float = 0.0
    delay_s: float = 50e-12
    mismatch: float = 0.1

    def __post_init__(self):
        _cfg_check(self.insertion_loss_db >= 0.0, "antenna.insertion_loss_db",
                   "must be >= 0")
        _cfg_check(self.delay_s >= 0.0, "antenna.delay_s", "must be >= 0")
        _cfg_check(0.0 <= self.mismatch < 1.0, "antenna.mismatch",
                   "must be in [0, 1)")

    def to_dict(self) -> dict:
        return {"insertion_loss_db": self.insertion_loss_db,
                "delay_s": self.delay_s, "mismatch": self.mismatch}


@dataclass(frozen=True)
class AdapterBounds:
    """Generation bounds for per-port random error adapters."""

    e00_max: float = 0.3
    e11_max: float = 0.3
    p_min: float = 0.5
    p_max: float = 2.0

    def __post_init__(self):
        _cfg_check(0.0 <= self.e00_max < 1.0, "adapters.e00_max", "must be in [0, 1)")
        _cfg_check(0.0 <= self.e11_max < 1.0, "adapters.e11_max", "must be in [0, 1)")
        _cfg_check(self.p_min > 0.0, "adapters.p_min", "must be > 0")
        _cfg_check(self.p_max >= self.p_min, "adapters.p_max", "must be >= p_min")
        if self.p_max > self.p_min:
            # the sampler keeps a 1.15x margin on each side of the |p| range
            _cfg_check(self.p_max >= self.p_min * 1.35, "adapters.p_max",
                       "range must be degenerate (== p_min) or >= 1.35x p_min")

    def to_dict(self) -> dict:
        return {"e00_max": self.e00_max, "e11_max": self.e11_max,
                "p_min": self.p_min, "p_max": self.p_max}


def _default_phantoms() -> dict[str, PermittivityModel]:
    return {
        "air": PermittivityModel.constant(1.0),
        "water": PermittivityModel.debye(5.2, 78.4, 8.1e-12, 0.05),
        "alcohol": PermittivityModel.debye(4.4, 25.1, 1.6e-10, 0.02),
    }


@dataclass(frozen=True)
class SystemConfig:
    """Complete description of one synthetic measurement campaign."""

    n_ports: int = 8
    f_start_hz: float = 1e9
    f_stop_hz: float = 9e9
    n_freq: int = 201
    reference_port: int = 0
    antenna: AntennaModel = field(default_factory=AntennaModel)
    adapters: AdapterBounds = field(default_factory=AdapterBounds)
    coupling_db: float = -45.0
    distance_m: float = 0.1
    termination_gamma: complex = 0.0 + 0.0j
    noise_sigma: float = 0.0
    seed: int = 0
    reflection_delta: Mapping[int, float] = field(default_factory=dict)
    phantoms: Mapping[str, PermittivityModel] = field(default_factory=_default_phantoms)
    thru_phantom: str = "air"

    def __post_init__(self):
        _cfg_check(self.n_ports >= 2, "n_ports", "must be >= 2")
        _cfg_check(self.f_start_hz > 0.0, "f_start_hz", "must be > 0")
        _cfg_check(self.f_stop_hz > self.f_start_hz, "f_stop_hz",
                   "must be > f_start_hz")
        _cfg_check(self.n_freq >= 2, "n_freq", "must be >= 2")
        _cfg_check(0 <= self.reference_port < self.n_ports, "reference_port",
                   f"must be in [0, {self.n_ports})")
        _cfg_check(self.coupling_db <= 0.0, "coupling_db", "must be <= 0")
        _cfg_check(self.distance_m > 0.0, "distance_m", "must be > 0")
        term = complex(self.termination_gamma)
        _cfg_check(abs(term) < 1.0, "termination_gamma", "need |gamma| < 1")
        object.__setattr__(self, "termination_gamma", term)
        _cfg_check(self.noise_sigma >= 0.0, "noise_sigma", "must be >= 0")
        deltas = {int(k): float(v) for k, v in self.reflection_delta.items()}
        for port, delta in deltas.items():
            _cfg_check(0 <= port < self.n_ports, "reflection_delta",
                       f"port {port} out of range")
            _cfg_check(abs(delta) + self.antenna.mismatch < 1.0, "reflection_delta",
                       f"|delta| + mismatch must stay < 1 at port {port}")
        object.__setattr__(self, "reflection_delta", deltas)
        phantoms = dict(self.phantoms)
        _cfg_check(len(phantoms) == 3, "phantoms", "exactly 3 phantom models required")
        for name in phantoms:
            _cfg_check(bool(name) and set(name) <= _NAME_OK, "phantoms",
                       f"name {name!r} must be [A-Za-z0-9_-]+")
        object.__setattr__(self, "phantoms", phantoms)
        _cfg_check(self.thru_phantom in phantoms, "thru_phantom",
                   f"{self.thru_phantom!r} is not one of {sorted(phantoms)}")

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(np.linspace(self.f_start_hz, self.f_stop_hz, self.n_freq))

    @property
    def phantom_names(self) -> tuple[str, str, str]:
        return tuple(self.phantoms)

    def to_dict(self) -> dict:
        return {
            "n_ports": self.n_ports,
            "f_start_hz": self.f_start_hz,
            "f_stop_hz": self.f_stop_hz,
            "n_freq": self.n_freq,
            "reference_port": self.reference_port,
            "antenna": self.antenna.to_dict(),
            "adapters": self.adapters.to_dict(),
            "coupling_db": self.coupling_db,
            "distance_m": self.distance_m,
            "termination_gamma": [self.termination_gamma.real,
                                  self.termination_gamma.imag],
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
            "reflection_delta": {str(k): v for k, v in self.reflection_delta.items()},
            "phantoms": {name: m.to_dict() for name, m in self.phantoms.items()},
            "thru_phantom": self.thru_phantom,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SystemConfig":
        known = {"n_ports", "f_start_hz", "f_stop_hz", "n_freq", "reference_port",
                 "antenna", "adapters", "coupling_db", "distance_m",
                 "termination_gamma", "noise_sigma", "seed", "reflection_delta",
                 "phantoms", "thru_phantom"}
        for key in d:
            _cfg_check(key in known, key, "unknown configuration field")
        kwargs = dict(d)
        if "antenna" in kwargs:
            kwargs["antenna"] = AntennaModel(**kwargs["antenna"])
        if "adapters" in kwargs:
            kwargs["adapters"] = AdapterBounds(**kwargs["adapters"])
        if "termination_gamma" in kwargs:
            t = kwargs["termination_gamma"]
            if isinstance(t, (list, tuple)):
                t = complex(t[0], t[1])
            kwargs["termination_gamma"] = complex(t)
        if "phantoms" in kwargs:
            kwargs["phantoms"] = {name: PermittivityModel.from_dict(m)
                                  for name, m in kwargs["phantoms"].items()}
        try:
            return cls(**kwargs)
        except TypeError as err:
            raise ConfigInvalid("config", str(err)) from None


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Oracle values for one campaign."""

    grid: FrequencyGrid
    true_network: Mapping[str, NPortNetwork]
    boxes: Mapping[int, ErrorBox3]
    k: Mapping[tuple[int, int], PairTracking]
    tau_hint_s: Mapping[tuple[int, int], float]


@dataclass(frozen=True, eq=False)
class Campaign:
    """Everything one simulator run produces, in memory."""

    config: SystemConfig
    grid: FrequencyGrid
    char: ECalCharacterization
    ecal_measured: Mapping[str, np.ndarray]
    phantoms: PhantomMeasurementSet
    truth: GroundTruth


def antenna_two_port(grid: FrequencyGrid, antenna: AntennaModel,
                     reflection_delta: float = 0.0) -> NPortNetwork:
    """Antenna as a two-port from connector (port 1) to aperture (port 2)."""
    f = grid.points
    s21 = 10.0 ** (-antenna.insertion_loss_db / 20.0) \
        * np.exp(-2j * np.pi * f * antenna.delay_s)
    return make_two_port(grid, antenna.mismatch + reflection_delta, s21, s21,
                         antenna.mismatch)


def _coupling(cfg: SystemConfig, model: PermittivityModel, f: np.ndarray) -> np.ndarray:
    beta = 2.0 * np.pi * f * np.sqrt(np.maximum(model.evaluate(f).real, 1.0)) / C0
    return 10.0 ** (cfg.coupling_db / 20.0) * np.exp(-1j * beta * cfg.distance_m)


def synth_true_network(cfg: SystemConfig, model: PermittivityModel) -> NPortNetwork:
    """True antenna-plane N-port for one phantom: common-antenna reflection
    on the diagonal, attenuated delay-line coupling off it.  Exactly
    reciprocal; S_ii identical across ports unless a reflection_delta is set.
    """
    grid = cfg.grid
    f = grid.points
    n = cfg.n_ports
    gamma_mat = phantom_gamma(model, f)
    ants = [antenna_two_port(grid, cfg.antenna, cfg.reflection_delta.get(p, 0.0))
            for p in range(n)]
    c = _coupling(cfg, model, f)
    s = np.zeros((len(grid), n, n), dtype=np.complex128)
    for p in range(n):
        s[:, p, p] = input_reflection(ants[p], gamma_mat)
    for i in range(n):
        for j in range(i + 1, n):
            # aperture-to-aperture line embedded through both antennas;
            # identical value both ways keeps reciprocity exact
            sij = ants[i].s[:, 0, 1] * c * ants[j].s[:, 1, 0]
            s[:, i, j] = sij
            s[:, j, i] = sij
    return NPortNetwork(grid, s)


def _smooth_reflection(rng: np.random.Generator, f: np.ndarray,
                       max_mag: float) -> np.ndarray:
    if max_mag == 0.0:
        return np.zeros(f.size, dtype=np.complex128)
    a = 0.45 * max_mag * np.exp(2j * np.pi * rng.uniform())
    b = 0.45 * max_mag * np.exp(2j * np.pi * rng.uniform())
    tau = rng.uniform(20e-12, 200e-12)
    return a + b * np.exp(-2j * np.pi * f * tau)


def _smooth_path(rng: np.random.Generator, f: np.ndarray, lo: float,
                 hi: float) -> tuple[np.ndarray, np.ndarray]:
    if lo == hi:
        flat = np.full(f.size, math.sqrt(lo), dtype=np.complex128)
        return flat, flat.copy()
    p0 = math.exp(rng.uniform(math.log(lo * 1.15), math.log(hi / 1.15)))
    rho = math.exp(rng.uniform(math.log(0.8), math.log(1.25)))
    ripple = 0.03 * rng.uniform()
    wobble = 1.0 + ripple * np.sin(2 * np.pi * f * rng.uniform(50e-12, 150e-12)
                                   + 2 * np.pi * rng.uniform())
    s21 = math.sqrt(p0 * rho) * wobble * np.exp(
        1j * (2 * np.pi * rng.uniform() - 2 * np.pi * f * rng.uniform(20e-12, 120e-12)))
    s12 = math.sqrt(p0 / rho) * wobble * np.exp(
        1j * (2 * np.pi * rng.uniform() - 2 * np.pi * f * rng.uniform(20e-12, 120e-12)))
    return s21, s12


def synth_error_adapters(cfg: SystemConfig) -> dict[int, NPortNetwork]:
    """Per-port random error adapters, deterministic in cfg.seed.

    Drawn from the adapter-shape child stream of the seed; |S11| <= e00_max,
    |S22| <= e11_max, |S21*S12| within [p_min, p_max], smooth in frequency.
    """
    grid = cfg.grid
    f = grid.points
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(2)[0])
    bounds = cfg.adapters
    out = {}
    for port in range(cfg.n_ports):
        e00 = _smooth_reflection(rng, f, bounds.e00_max)
        e11 = _smooth_reflection(rng, f, bounds.e11_max)
        s21, s12 = _smooth_path(rng, f, bounds.p_min, bounds.p_max)
        net = make_two_port(grid, e00, s12, s21, e11)
        p_mag = np.abs(net.s[:, 1, 0] * net.s[:, 0, 1])
        if (np.any(np.abs(net.s[:, 0, 0]) > bounds.e00_max)
                or np.any(np.abs(net.s[:, 1, 1]) > bounds.e11_max)
                or np.any(p_mag < bounds.p_min) or np.any(p_mag > bounds.p_max)):
            raise ConfigInvalid("adapters", f"sampled adapter {port} violates bounds")
        out[port] = net
    return out


def synth_ecal(grid: FrequencyGrid) -> ECalCharacterization:
    """Synthetic ECal: near-open / near-short / load states and a lossy
    delayed thru.  Exact values are carried by the characterization, so
    they only need to be plausible and well separated."""
    f = grid.points
    states = {
        "open": 0.98 * np.exp(-2j * np.pi * f * 35e-12),
        "short": -0.98 * np.exp(-2j * np.pi * f * 28e-12),
        "load": np.full(f.size, 0.02 + 0.0j),
    }
    s21 = 10.0 ** (-0.2 / 20.0) * np.exp(-2j * np.pi * f * 50e-12)
    thru = make_two_port(grid, 0.0, s21, s21, 0.0)
    return ECalCharacterization(grid, states, thru)


def _box_of(net: NPortNetwork) -> ErrorBox3:
    s = net.s
    return ErrorBox3(net.grid, s[:, 0, 0], s[:, 1, 1], s[:, 0, 1] * s[:, 1, 0])


def _noise(rng: np.random.Generator, sigma: float, shape) -> np.ndarray:
    scale = sigma / math.sqrt(2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def synth_campaign(cfg: SystemConfig) -> Campaign:
    """Generate a full campaign in memory (see module docstring).

    Noise stream order is fixed: ECal states (characterization order), then
    reflections (port-major, phantom order), then pair thrus (pairs sorted),
    so identical (config, seed) always yields identical values.
    """
    grid = cfg.grid
    n = cfg.n_ports
    ref = cfg.reference_port
    sigma = cfg.noise_sigma
    noise_rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(2)[1])

    char = synth_ecal(grid)
    adapters = synth_error_adapters(cfg)
    chains = dict(adapters)
    chains[ref] = t_to_s(cascade(s_to_t(adapters[ref]), s_to_t(char.thru)))

    boxes = {p: _box_of(chains[p]) for p in range(n)}
    true_k = {}
    for i in range(n):
        for j in range(i + 1, n):
            true_k[(i, j)] = PairTracking(
                grid, chains[i].s[:, 1, 0] * chains[j].s[:, 0, 1])

    true_nets = {name: synth_true_network(cfg, model)
                 for name, model in cfg.phantoms.items()}

    # one-way path delay per pair, the calibration-side sign-selection hint
    eps_mid = cfg.phantoms[cfg.thru_phantom].evaluate(
        np.array([grid.points[len(grid) // 2]]))[0]
    tau_path = 2.0 * cfg.antenna.delay_s \
        + cfg.distance_m * math.sqrt(max(eps_mid.real, 1.0)) / C0
    tau_hints = {pair: tau_path for pair in true_k}

    ecal_measured = {}
    for name in char.state_names:
        raw = input_reflection(adapters[ref], char.states[name])
        if sigma > 0.0:
            raw = raw + _noise(noise_rng, sigma, raw.shape)
        ecal_measured[name] = raw

    def terminations(kept):
        return {p: cfg.termination_gamma for p in range(n) if p not in kept}

    reflection: dict[int, dict[str, np.ndarray]] = {}
    for port in range(n):
        per_port = {}
        for name in cfg.phantom_names:
            seen = reduce_ports(true_nets[name], [port],
                                terminations((port,))).s[:, 0, 0]
            raw = input_reflection(chains[port], seen)
            if sigma > 0.0:
                raw = raw + _noise(noise_rng, sigma, raw.shape)
            per_port[name] = raw
        reflection[port] = per_port

    thru_raw: dict[tuple[int, int], NPortNetwork] = {}
    tp_net = true_nets[cfg.thru_phantom]
    for pair in sorted(true_k):
        i, j = pair
        dut = reduce_ports(tp_net, [i, j], terminations(pair))
        t = cascade(s_to_t(chains[i]),
                    cascade(s_to_t(dut), s_to_t(flip_two_port(chains[j]))))
        raw = t_to_s(t).s
        if sigma > 0.0:
            raw = raw + _noise(noise_rng, sigma, raw.shape)
        thru_raw[pair] = NPortNetwork(grid, raw)

    phantoms = PhantomMeasurementSet(grid, cfg.phantom_names, reflection,
                                     thru_raw, cfg.thru_phantom)
    truth = GroundTruth(grid, true_nets, boxes, true_k, tau_hints)
    return Campaign(cfg, grid, char, ecal_measured, phantoms, truth)
