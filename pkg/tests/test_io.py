import math
import struct
import warnings

import numpy as np
import pytest

from helicalns import (
    BadMagic,
    ConfigError,
    DivergenceWarning,
    GridSpec,
    SizeMismatch,
    SolverState,
    abc_flow,
    diagnostics_record,
    taylor_green,
)
from helicalns.errors import BadHeader
from helicalns.io import (
    CSV_COLUMNS,
    RunConfig,
    format_key_values,
    load_run_config,
    load_snapshot,
    parse_run_config,
    read_diagnostics_csv,
    read_key_values,
    read_snapshot,
    read_snapshot_samples,
    snapshot_size,
    write_diagnostics_csv,
    write_snapshot,
)
from helicalns.monitor import DiagnosticsRecord

from conftest import mixed_field


def write_abc(path, n=16, t=0.25, nu=0.5):
    v = abc_flow(1.0, 0.7, -0.3, grid=GridSpec(n))
    write_snapshot(path, SolverState(v, t), nu)
    return v


class TestSnapshot:
    def test_size_formula(self, tmp_path):
        p = tmp_path / "s.bin"
        write_abc(p)
        assert p.stat().st_size == snapshot_size(16) == 8 + 4 + 16 + 24 * 16 ** 3

    def test_byte_layout(self, tmp_path):
        # hand-decoded: header then x1 fastest, components interleaved
        p = tmp_path / "s.bin"
        n = 16
        v = write_abc(p, n)
        data = p.read_bytes()
        assert data[:8] == b"HELNSV01"
        assert struct.unpack_from("<Idd", data, 8) == (n, 0.5, 0.25)
        u = v.to_physical()
        for i1, i2, i3, c in [(1, 0, 0, 0), (0, 3, 0, 1), (2, 5, 7, 2), (15, 15, 15, 0)]:
            offset = 28 + 24 * (i1 + n * i2 + n * n * i3) + 8 * c
            assert struct.unpack_from("<d", data, offset)[0] == u[c, i1, i2, i3]

    def test_round_trip_bit_exact(self, tmp_path):
        v = mixed_field(GridSpec(16), 3)
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        write_snapshot(a, SolverState(v, 1.5), 1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            snap = load_snapshot(a)
        assert not snap.reprojected
        assert snap.nu == 1.0 and snap.state.t == 1.5
        assert np.array_equal(snap.state.v.to_physical(), v.to_physical())
        write_snapshot(b, snap.state, snap.nu)
        assert a.read_bytes() == b.read_bytes()

    def test_read_snapshot_state(self, tmp_path):
        p = tmp_path / "s.bin"
        v = write_abc(p)
        state = read_snapshot(p)
        assert state.t == 0.25
        assert np.allclose(state.v.coeffs, v.coeffs, atol=1e-15)

    def test_truncated(self, tmp_path):
        p = tmp_path / "s.bin"
        write_abc(p)
        p.write_bytes(p.read_bytes()[:-8])
        with pytest.raises(SizeMismatch):
            load_snapshot(p)
        p.write_bytes(b"HELNSV01\x10")
        with pytest.raises(SizeMismatch):
            load_snapshot(p)

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "s.bin"
        write_abc(p)
        p.write_bytes(b"NOTASNAP" + p.read_bytes()[8:])
        with pytest.raises(BadMagic):
            load_snapshot(p)
        p.write_bytes(b"x")
        with pytest.raises(BadMagic):
            load_snapshot(p)

    def test_bad_grid_size(self, tmp_path):
        p = tmp_path / "s.bin"
        p.write_bytes(struct.pack("<8sIdd", b"HELNSV01", 7, 1.0, 0.0) + bytes(24 * 7 ** 3))
        with pytest.raises(BadHeader):
            load_snapshot(p)

    def test_perturbed_field_reprojected(self, tmp_path):
        p = tmp_path / "s.bin"
        write_abc(p)
        n, nu, t, samples = read_snapshot_samples(p)
        x = 2 * np.pi * np.arange(n) / n
        samples[0] += 1e-3 * np.sin(x)[:, None, None]  # d/dx1 of this is not zero
        write_snapshot_raw(p, n, nu, t, samples)
        with pytest.warns(DivergenceWarning):
            snap = load_snapshot(p)
        assert snap.reprojected
        assert snap.state.v.divergence_residual() <= 1e-14
        # the solenoidal part survives the projection
        ref = abc_flow(1.0, 0.7, -0.3, grid=GridSpec(n))
        assert np.allclose(snap.state.v.coeffs, ref.coeffs, atol=1e-15)


def write_snapshot_raw(path, n, nu, t, samples):
    with open(path, "wb") as fh:
        fh.write(struct.pack("<8sIdd", b"HELNSV01", n, nu, t))
        fh.write(np.ascontiguousarray(samples.transpose(3, 2, 1, 0), dtype="<f8").tobytes())


class TestDiagnosticsCsv:
    def _records(self):
        v = taylor_green(grid=GridSpec(16))
        recs = [diagnostics_record(v * s, t, -1.0, 1e3) for s, t in ((1.0, 0.0), (0.9, 0.1))]
        recs.append(DiagnosticsRecord(t=0.2, a=-math.inf, envelope=1.0, envelope_ok=False))
        return recs

    def test_header_and_round_trip(self, tmp_path):
        p = tmp_path / "d.csv"
        recs = self._records()
        write_diagnostics_csv(p, recs)
        assert p.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
        back = read_diagnostics_csv(p)
        for a, b in zip(recs, back):
            for x, y in zip(a.row(), b.row()):
                assert x == y or (x != x and y != y) or (x is None and y is None)
        # rewriting the parsed records reproduces the file
        q = tmp_path / "e.csv"
        write_diagnostics_csv(q, back)
        assert p.read_text() == q.read_text()

    def test_seventeen_digits(self, tmp_path):
        p = tmp_path / "d.csv"
        write_diagnostics_csv(p, [DiagnosticsRecord(t=0.1, energy=1 / 3)])
        row = p.read_text().splitlines()[1].split(",")
        assert row[0] == "0.10000000000000001"
        assert row[1] == "0.33333333333333331"
        assert row[-1] == "nan"

    def test_times_strictly_increasing(self, tmp_path):
        with pytest.raises(ValueError):
            write_diagnostics_csv(tmp_path / "d.csv",
                                  [DiagnosticsRecord(t=0.1), DiagnosticsRecord(t=0.1)])

    def test_wrong_header(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("t,energy\n0,1\n")
        with pytest.raises(ValueError):
            read_diagnostics_csv(p)


class TestRunConfig:
    def test_defaults(self):
        cfg = parse_run_config("")
        assert cfg == RunConfig()
        assert cfg.init == "abc" and cfg.a_schedule == "const:0"

    def test_values_and_comments(self):
        cfg = parse_run_config("n = 16\n# comment\nnu=0.1  # viscosity\ninit = random\n"
                               "a_schedule = neg_inf\noutput_every = 5\n")
        assert (cfg.n, cfg.nu, cfg.init, cfg.output_every) == (16, 0.1, "random", 5)
        assert cfg.schedule()(3.0) == -math.inf

    @pytest.mark.parametrize("text", [
        "bogus = 1", "n = sixteen", "n = 16.5", "init = vortex", "n = 15", "novalue",
        "a_schedule = const:", "a_schedule = table:/no/such/file",
    ])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_run_config(text)

    def test_relative_paths(self, tmp_path):
        (tmp_path / "a.txt").write_text("0 1\n1 -1\n")
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text("a_schedule = table:a.txt\nout_dir = results\n")
        cfg = load_run_config(cfg_path)
        assert cfg.out_dir == str(tmp_path / "results")
        assert cfg.schedule(tmp_path)(1.0) == -1


class TestKeyValues:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "r.txt"
        values = {"c1_hat": 0.1 + 0.2, "count": 12, "name": "abc", "maybe": None}
        p.write_text(format_key_values(values))
        assert read_key_values(p) == values
