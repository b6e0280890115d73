"""Touchstone version 1 (.sNp) reader and writer.

Only version 1 documents are handled (no v2 keyword blocks) and only
S-parameters; Y/Z/G/H files are rejected.  The v1 two-port column order
(S11 S21 S12 S22, i.e. transposed relative to row-major) is honored on both
read and write.  Three and more ports are row-major, wrapped at four
complex pairs per line with each matrix row starting a fresh line.

The writer prints 17 significant digits, which round-trips IEEE doubles
exactly in RI format, and emits byte-identical output for identical inputs
so golden-file comparisons are stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    CountMismatch,
    NonMonotonicFrequency,
    TouchstoneSyntaxError,
    UnsupportedParameter,
)
from .net import FrequencyGrid, NPortNetwork

_UNIT_HZ = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
_FORMATS = ("RI", "MA", "DB")
_PARAMETERS = ("S", "Y", "Z", "G", "H")
# magnitude 0 has no dB form; v1 writers conventionally clamp deep in the noise
_DB_FLOOR = -400.0


@dataclass(frozen=True)
class TouchstoneOptions:
    """Option-line settings.  Defaults follow the v1 convention for a
    document with no ``#`` line at all: GHz, S-parameters, MA, 50 ohm."""

    freq_unit: str = "GHZ"
    parameter: str = "S"
    format: str = "MA"
    reference_impedance: float = 50.0

    def __post_init__(self):
        if self.freq_unit not in _UNIT_HZ:
            raise ValueError(f"freq_unit must be one of {sorted(_UNIT_HZ)}")
        if self.parameter not in _PARAMETERS:
            raise ValueError(f"parameter must be one of {_PARAMETERS}")
        if self.format not in _FORMATS:
            raise ValueError(f"format must be one of {_FORMATS}")
        if not (self.reference_impedance > 0):
            raise ValueError("reference_impedance must be positive")


def ports_from_path(path) -> int | None:
    """Port count from a .sNp extension, or None when the name has none."""
    m = re.search(r"\.s(\d+)p$", str(path), re.IGNORECASE)
    if not m:
        return None
    n = int(m.group(1))
    return n if n >= 1 else None


def _parse_option_line(tokens: list[str], line_no: int) -> TouchstoneOptions:
    unit = param = fmt = None
    resistance = None
    i = 0
    while i < len(tokens):
        tok = tokens[i].upper()
        if tok in _UNIT_HZ and unit is None:
            unit = tok
        elif tok in _PARAMETERS and param is None:
            param = tok
        elif tok in _FORMATS and fmt is None:
            fmt = tok
        elif tok == "R":
            if resistance is not None or i + 1 >= len(tokens):
                raise TouchstoneSyntaxError("malformed R entry in option line", line_no)
            try:
                resistance = float(tokens[i + 1])
            except ValueError:
                raise TouchstoneSyntaxError(
                    f"bad resistance value {tokens[i + 1]!r}", line_no) from None
            i += 1
        else:
            raise TouchstoneSyntaxError(f"unrecognized option token {tokens[i]!r}", line_no)
        i += 1
    if param is not None and param != "S":
        raise UnsupportedParameter(
            f"only S-parameter files are supported, got {param} (line {line_no})")
    defaults = TouchstoneOptions()
    return TouchstoneOptions(
        freq_unit=unit or defaults.freq_unit,
        parameter=param or defaults.parameter,
        format=fmt or defaults.format,
        reference_impedance=resistance if resistance is not None else
        defaults.reference_impedance,
    )


def _pairs_to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    if fmt == "MA":
        return a * np.exp(1j * np.deg2rad(b))
    return 10.0 ** (a / 20.0) * np.exp(1j * np.deg2rad(b))


def parse_touchstone(text: str, expected_ports: int | None = None) -> NPortNetwork:
    """Parse a Touchstone v1 document into an N-port network.

    expected_ports fixes the port count (normally taken from the .sNp file
    extension).  Without it the count is inferred as the smallest n whose
    block size 1 + 2*n*n divides the value count with strictly increasing
    frequencies.
    """
    options: TouchstoneOptions | None = None
    values: list[float] = []
    lines: list[int] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("!", 1)[0].strip()
        if not body:
            continue
        if body.startswith("#"):
            if options is not None:
                raise TouchstoneSyntaxError("second option line", line_no)
            if values:
                raise TouchstoneSyntaxError("option line after data", line_no)
            options = _parse_option_line(body[1:].split(), line_no)
            continue
        for tok in body.split():
            try:
                values.append(float(tok))
            except ValueError:
                raise TouchstoneSyntaxError(f"bad number {tok!r}", line_no) from None
            lines.append(line_no)
    if options is None:
        options = TouchstoneOptions()
    if not values:
        raise TouchstoneSyntaxError("no data lines", None)

    data = np.asarray(values, dtype=np.float64)
    if expected_ports is not None:
        n = int(expected_ports)
        if n < 1:
            raise ValueError("expected_ports must be >= 1")
        block = 1 + 2 * n * n
        if data.size % block != 0:
            raise CountMismatch(
                f"{data.size} values do not form whole {n}-port blocks of {block}"
                f" (last value on line {lines[-1]})")
    else:
        n = _infer_ports(data)
        block = 1 + 2 * n * n

    blocks = data.reshape(-1, block)
    freq_hz = blocks[:, 0] * _UNIT_HZ[options.freq_unit]
    if np.any(np.diff(freq_hz) <= 0.0):
        bad = int(np.nonzero(np.diff(freq_hz) <= 0.0)[0][0]) + 1
        raise NonMonotonicFrequency(
            f"frequency block {bad} does not increase ({freq_hz[bad]:.6g} Hz)")
    vals = _pairs_to_complex(blocks[:, 1::2], blocks[:, 2::2], options.format)
    if n == 2:
        s = np.empty((blocks.shape[0], 2, 2), dtype=np.complex128)
        s[:, 0, 0] = vals[:, 0]
        s[:, 1, 0] = vals[:, 1]
        s[:, 0, 1] = vals[:, 2]
        s[:, 1, 1] = vals[:, 3]
    else:
        s = vals.reshape(-1, n, n)
    return NPortNetwork(FrequencyGrid(freq_hz), s, options.reference_impedance)


def _infer_ports(data: np.ndarray) -> int:
    limit = int(np.sqrt(max(data.size - 1, 0) / 2)) + 1
    for n in range(1, limit + 1):
        block = 1 + 2 * n * n
        if data.size % block != 0:
            continue
        freqs = data.reshape(-1, block)[:, 0]
        if freqs.size == 1 or np.all(np.diff(freqs) > 0.0):
            return n
    raise CountMismatch(
        f"cannot infer a port count from {data.size} values; pass expected_ports")


def _complex_to_pairs(v: np.ndarray, fmt: str) -> tuple[np.ndarray, np.ndarray]:
    if fmt == "RI":
        return v.real, v.imag
    mag = np.abs(v)
    ang = np.rad2deg(np.angle(v))
    if fmt == "MA":
        return mag, ang
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag)
    return np.maximum(db, _DB_FLOOR), ang


def write_touchstone(net: NPortNetwork, options: TouchstoneOptions | None = None) -> str:
    """Render a network as Touchstone v1 text (see module docstring)."""
    opt = options or TouchstoneOptions(format="RI")
    if opt.parameter != "S":
        raise UnsupportedParameter("only S-parameter files can be written")
    n = net.n_ports
    freq = net.grid.points / _UNIT_HZ[opt.freq_unit]
    a, b = _complex_to_pairs(net.s, opt.format)

    def num(x: float) -> str:
        return f"{x:.16e}"

    out = [f"# {opt.freq_unit} S {opt.format} R {opt.reference_impedance:.17g}"]
    for fi in range(len(net.grid)):
        if n == 1:
            out.append(f"{num(freq[fi])} {num(a[fi, 0, 0])} {num(b[fi, 0, 0])}")
        elif n == 2:
            cells = [(0, 0), (1, 0), (0, 1), (1, 1)]
            flat = " ".join(f"{num(a[fi, r, c])} {num(b[fi, r, c])}" for r, c in cells)
            out.append(f"{num(freq[fi])} {flat}")
        else:
            head = num(freq[fi])
            for row in range(n):
                for start in range(0, n, 4):
                    cols = range(start, min(start + 4, n))
                    flat = " ".join(
                        f"{num(a[fi, row, c])} {num(b[fi, row, c])}" for c in cols)
                    out.append(f"{head} {flat}" if head else flat)
                    head = ""
    return "\n".join(out) + "\n"


def read_touchstone_file(path) -> NPortNetwork:
    """Parse a .sNp file, taking the port count from the extension."""
    with open(path, "r", encoding="ascii") as fh:
        return parse_touchstone(fh.read(), ports_from_path(path))


def write_touchstone_file(path, net: NPortNetwork,
                          options: TouchstoneOptions | None = None) -> None:
    """Write a network to ``path``; the extension must match its port count."""
    ext_ports = ports_from_path(path)
    if ext_ports is not None and ext_ports != net.n_ports:
        raise ValueError(
            f"{path} names {ext_ports} ports but the network has {net.n_ports}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(write_touchstone(net, options))
