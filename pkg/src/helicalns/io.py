"""Snapshot files, diagnostics tables, run configuration and probe reports.

Snapshot layout (little-endian)::

    8 bytes  magic b"HELNSV01"
    u32      n
    f64      nu
    f64      t
    f64      3 n^3 physical samples, x1 fastest, components interleaved

Samples are stored in physical space so the format does not depend on the
transform convention.  Writing a field that was itself read from a file
reproduces the file byte for byte.
"""
from __future__ import annotations

import csv
import dataclasses
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadHeader, BadMagic, ConfigError, DivergenceWarning, SizeMismatch
from .monitor import CSV_COLUMNS, DiagnosticsRecord, Schedule
from .solver import SolverState
from .spectral import GridSpec, SpectralVectorField, divergence_residual, leray_coeffs

MAGIC = b"HELNSV01"
_HEADER = struct.Struct("<8sIdd")
HEADER_SIZE = _HEADER.size
DIVERGENCE_TOL = 1e-10


def snapshot_size(n: int) -> int:
    return HEADER_SIZE + 24 * n ** 3


# --------------------------------------------------------------------------- snapshots


@dataclass(frozen=True)
class Snapshot:
    state: SolverState
    nu: float
    reprojected: bool = False


def write_snapshot(path, state: SolverState, nu: float = 1.0) -> None:
    v = state.v
    n = v.grid.n
    samples = v.to_physical().transpose(3, 2, 1, 0)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, n, float(nu), float(state.t)))
        fh.write(np.ascontiguousarray(samples, dtype="<f8").tobytes())


def read_snapshot_samples(path):
    """Raw header values and samples, shape ``(3, n, n, n)``, without any checks on the field."""
    data = Path(path).read_bytes()
    if len(data) < HEADER_SIZE:
        if not MAGIC.startswith(data[:8]):
            raise BadMagic(f"{path}: not a snapshot file")
        raise SizeMismatch(f"{path}: {len(data)} bytes is shorter than the header")
    magic, n, nu, t = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"{path}: magic {magic!r} != {MAGIC!r}")
    if n < 8 or n % 2 or n > 4096:
        raise BadHeader(f"{path}: invalid grid size n={n}")
    if len(data) != snapshot_size(n):
        raise SizeMismatch(f"{path}: {len(data)} bytes, expected {snapshot_size(n)} for n={n}")
    body = np.frombuffer(data, dtype="<f8", offset=HEADER_SIZE).reshape(n, n, n, 3)
    samples = body.transpose(3, 2, 1, 0).astype(np.float64)
    return n, nu, t, samples


def load_snapshot(path) -> Snapshot:
    """Read a snapshot and re-derive its spectrum.

    A field whose divergence/mean residual exceeds ``1e-10`` is re-projected,
    a :class:`DivergenceWarning` is issued and ``reprojected`` is set.
    """
    n, nu, t, samples = read_snapshot_samples(path)
    grid = GridSpec(n)
    v = SpectralVectorField.from_physical(grid, samples)
    resid = divergence_residual(v.coeffs, grid)
    if resid > DIVERGENCE_TOL:
        warnings.warn(f"{path}: divergence residual {resid:.3e}; field re-projected",
                      DivergenceWarning, stacklevel=2)
        v = SpectralVectorField(grid, leray_coeffs(v.coeffs, grid), divergence_free=True,
                                zero_mean=True)
        return Snapshot(SolverState(v, t), nu, True)
    v = SpectralVectorField(grid, v.coeffs, divergence_free=True, zero_mean=True,
                            _physical=v._physical)
    return Snapshot(SolverState(v, t), nu, False)


def read_snapshot(path) -> SolverState:
    return load_snapshot(path).state


# --------------------------------------------------------------------------- diagnostics CSV


def _fmt(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    return format(float(x), ".17g")


def write_diagnostics_csv(path, records) -> None:
    records = list(records)
    times = [r.t for r in records]
    if any(not b > a for a, b in zip(times, times[1:])):
        raise ValueError("diagnostics times must be strictly increasing")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([_fmt(x) for x in r.row()])


def read_diagnostics_csv(path) -> list[DiagnosticsRecord]:
    out = []
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected diagnostics header")
        for row in rows:
            vals = dict(zip(CSV_COLUMNS, row))
            ok = vals.pop("envelope_ok")
            rec = {k: float(x) for k, x in vals.items()}
            rec["envelope_ok"] = None if ok == "nan" else ok == "1"
            out.append(DiagnosticsRecord(**rec))
    return out


# --------------------------------------------------------------------------- run config

INITS = ("abc", "taylor_green", "random")


@dataclass(frozen=True)
class RunConfig:
    """Flat ``key = value`` run description; relative paths resolve against the file's folder."""

    n: int = 32
    nu: float = 1.0
    t_end: float = 1.0
    dt_max: float = 0.01
    cfl: float = 0.5
    output_every: int = 10
    init: str = "abc"
    abc_A: float = 1.0
    abc_B: float = 1.0
    abc_C: float = 1.0
    seed: int = 0
    slope: float = -2.0
    helicity_fraction: float = 0.5
    k_min: int = 1
    k_max: int = 4
    a_schedule: str = "const:0"
    out_dir: str = "out"

    def schedule(self, base_dir=None) -> Schedule:
        return Schedule.parse(self.a_schedule, base_dir)


_CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _convert(key: str, raw: str):
    kind = _CONFIG_FIELDS[key].type
    try:
        if kind == "int":
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind}") from None
    return raw


def parse_run_config(text: str, base_dir=None) -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected key = value")
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw)
    cfg = RunConfig(**values)
    if cfg.init not in INITS:
        raise ConfigError(f"init must be one of {INITS}")
    try:
        GridSpec(cfg.n)
        cfg.schedule(base_dir)
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    if base_dir is not None and not Path(cfg.out_dir).is_absolute():
        cfg = dataclasses.replace(cfg, out_dir=str(Path(base_dir) / cfg.out_dir))
    return cfg


def load_run_config(path) -> RunConfig:
    path = Path(path)
    return parse_run_config(path.read_text(), base_dir=path.parent)


# --------------------------------------------------------------------------- probe reports


def format_key_values(values: dict) -> str:
    lines = []
    for k, v in values.items():
        if isinstance(v, float):
            v = _fmt(v)
        lines.append(f"{k}={v}")
    return "\n".join(lines) + "\n"


def write_probe_report(path, report) -> None:
    Path(path).write_text(format_key_values(report.as_dict()))


def read_key_values(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            k, _, v = line.partition("=")
            try:
                out[k] = float(v) if not v.lstrip("-").isdigit() else int(v)
            except ValueError:
                out[k] = None if v == "None" else v
    return out


def snapshot_paths(directory) -> list[Path]:
    return sorted(Path(directory).glob("snap_*.bin"))
