"""Touchstone v1 reader and writer for one- and two-port S-parameter files.

Only scattering data is handled.  Samples are normalized to Hz and complex
(RI) values on read.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = ["TouchstoneData", "TouchstoneError", "read_touchstone",
           "parse_touchstone", "write_touchstone", "format_touchstone"]

_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
_FORMATS = ("RI", "MA", "DB")


class TouchstoneError(ValueError):
    """Malformed Touchstone content; the message carries the line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True, eq=False)
class TouchstoneData:
    """Sampled S-parameters.

    Attributes
    ----------
    frequencies : ndarray
        Strictly increasing, in Hz.
    s : ndarray
        Complex array of shape ``(F, N, N)``.
    resistance : float
        Reference resistance in ohm.
    fmt : str
        Format the data was read in or should be written as.
    unit : str
        Frequency unit used on disk.
    """

    frequencies: np.ndarray
    s: np.ndarray
    resistance: float = 50.0
    fmt: str = "RI"
    unit: str = "Hz"

    @property
    def ports(self) -> int:
        return self.s.shape[1]

    def one_port(self) -> np.ndarray:
        if self.ports != 1:
            raise ValueError("not a one-port file")
        return self.s[:, 0, 0]


def _pair_to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    return mag * np.exp(1j * np.deg2rad(b))


def _complex_to_pair(z: np.ndarray, fmt: str) -> tuple[np.ndarray, np.ndarray]:
    if fmt == "RI":
        return z.real, z.imag
    mag = np.abs(z)
    ang = np.rad2deg(np.angle(z))
    if fmt == "DB":
        with np.errstate(divide="ignore"):
            mag = 20.0 * np.log10(mag)
    return mag, ang


def _parse_option(tokens: list[str], lineno: int):
    # Touchstone defaults: GHz, S, MA, 50 ohm
    unit, fmt, resistance = "GHZ", "MA", 50.0
    i = 0
    while i < len(tokens):
        tok = tokens[i].upper()
        if tok in _UNITS:
            unit = tok
        elif tok in _FORMATS:
            fmt = tok
        elif tok in ("S", "Y", "Z", "H", "G"):
            if tok != "S":
                raise TouchstoneError(f"only S-parameters are supported, got {tok}", lineno)
        elif tok == "R":
            if i + 1 >= len(tokens):
                raise TouchstoneError("option line: R without a value", lineno)
            try:
                resistance = float(tokens[i + 1])
            except ValueError:
                raise TouchstoneError(f"option line: bad resistance {tokens[i + 1]!r}", lineno)
            if not resistance > 0:
                raise TouchstoneError("option line: resistance must be positive", lineno)
            i += 1
        else:
            raise TouchstoneError(f"option line: unknown token {tokens[i]!r}", lineno)
        i += 1
    return unit, fmt, resistance


def parse_touchstone(text: str, ports: Optional[int] = None) -> TouchstoneData:
    """Parse Touchstone v1 text.

    Parameters
    ----------
    text : str
        File content.
    ports : int, optional
        Expected port count (1 or 2).  When omitted it is inferred from the
        row width.

    Raises
    ------
    TouchstoneError
        Malformed option line, non-numeric data, wrong port count or
        non-monotone frequencies.  The message names the offending line.
    """
    option = None
    rows: list[tuple[int, list[float]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if option is not None:
                raise TouchstoneError("duplicate option line", lineno)
            option = _parse_option(line[1:].split(), lineno)
            continue
        if line.startswith("["):
            raise TouchstoneError("Touchstone v2 keywords are not supported", lineno)
        try:
            values = [float(t) for t in line.split()]
        except ValueError:
            raise TouchstoneError(f"non-numeric data: {line!r}", lineno)
        rows.append((lineno, values))
    if option is None:
        option = ("GHZ", "MA", 50.0)
    unit, fmt, resistance = option
    if not rows:
        raise TouchstoneError("no data rows")

    width = {1: 3, 2: 9}
    if ports is None:
        n = len(rows[0][1])
        ports = {3: 1, 9: 2}.get(n)
        if ports is None:
            raise TouchstoneError(f"row has {n} values; expected 3 (1-port) or 9 (2-port)",
                                  rows[0][0])
    if ports not in width:
        raise ValueError("only 1- and 2-port data is supported")
    freq, data = [], []
    for lineno, values in rows:
        if len(values) != width[ports]:
            raise TouchstoneError(
                f"wrong port count: {len(values)} values, expected {width[ports]} "
                f"for a {ports}-port file", lineno)
        freq.append(values[0])
        data.append(values[1:])
        if len(freq) > 1 and not freq[-1] > freq[-2]:
            raise TouchstoneError("frequencies must be strictly increasing", lineno)
    f = np.array(freq) * _UNITS[unit]
    arr = np.array(data)
    z = _pair_to_complex(arr[:, 0::2], arr[:, 1::2], fmt)
    if ports == 1:
        s = z.reshape(-1, 1, 1)
    else:
        # v1 two-port order: S11 S21 S12 S22
        s = np.empty((f.size, 2, 2), complex)
        s[:, 0, 0], s[:, 1, 0], s[:, 0, 1], s[:, 1, 1] = z.T
    pretty = {"HZ": "Hz", "KHZ": "kHz", "MHZ": "MHz", "GHZ": "GHz"}[unit]
    return TouchstoneData(f, s, resistance, fmt, pretty)


def read_touchstone(path, ports: Optional[int] = None) -> TouchstoneData:
    """Read a Touchstone v1 file; the port count defaults to the ``.sNp`` suffix."""
    path = os.fspath(path)
    if ports is None:
        ext = os.path.splitext(path)[1].lower()
        if ext in (".s1p", ".s2p"):
            ports = int(ext[2])
    with open(path, encoding="utf-8") as fh:
        return parse_touchstone(fh.read(), ports)


def format_touchstone(data: TouchstoneData, comment: Optional[str] = None) -> str:
    """Render Touchstone v1 text using ``data.fmt`` and ``data.unit``.

    Values are written with 17 significant digits, so RI data round-trips
    exactly.
    """
    unit = data.unit.upper()
    if unit not in _UNITS:
        raise ValueError(f"unknown frequency unit {data.unit!r}")
    fmt = data.fmt.upper()
    if fmt not in _FORMATS:
        raise ValueError(f"unknown data format {data.fmt!r}")
    lines = []
    if comment:
        lines.extend("! " + c for c in comment.splitlines())
    lines.append(f"# {data.unit} S {fmt} R {data.resistance:g}")
    s = data.s
    if data.ports == 1:
        cols = [s[:, 0, 0]]
    elif data.ports == 2:
        cols = [s[:, 0, 0], s[:, 1, 0], s[:, 0, 1], s[:, 1, 1]]
    else:
        raise ValueError("only 1- and 2-port data is supported")
    f = data.frequencies / _UNITS[unit]
    pairs = [_complex_to_pair(c, fmt) for c in cols]
    for k in range(f.size):
        fields = [f"{f[k]:.17g}"]
        for a, b in pairs:
            fields.append(f"{a[k]:.17g}")
            fields.append(f"{b[k]:.17g}")
        lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"


def write_touchstone(path, data: TouchstoneData, comment: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_touchstone(data, comment))
