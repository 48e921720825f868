"""Regularity-criterion diagnostics along a trajectory.

Each snapshot yields one :class:`DiagnosticsRecord`: the condition integrands
built from the positive-helicity vorticity, the cross term that drives the
growth of ``Y = ||A^(1/2) v||^2``, the residual of the cancellation identity,
and the band inequalities relating the truncated projections.  The unnamed
constants of the Sobolev-type and interpolation bounds are probed empirically
by :func:`probe_constants`.

Quadratic integrands are evaluated in helical coordinates; triple products use
3/2-padded transforms so they are alias-free.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InsufficientRecords, InvalidC5, MissingProbeConstant
from .helical import (
    HelicalDecomposition,
    SpectralInterval,
    _basis_arrays,
    _negate_wavevector,
    abs_curl_pow,
    band_project,
    decompose,
    positive_part,
    recompose,
    spectral_moment,
)
from .solver import SolverState, Trajectory, abc_flow, random_helical, taylor_green
from .spectral import (
    VOLUME,
    GridSpec,
    SpectralVectorField,
    cross_arrays,
    curl,
    inner_product,
    l2_norm,
    l3_norm,
    neg_laplacian_pow,
    padded_physical,
    padded_spectral,
)

REL_SLACK = 1e-10


# --------------------------------------------------------------------------- schedule


@dataclass(frozen=True)
class Schedule:
    """Threshold ``a(t)``: a constant (``-inf`` allowed) or a right-continuous step table."""

    times: tuple = ()
    values: tuple = (0.0,)

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("schedule needs at least one value")
        if self.times:
            if len(self.times) != len(self.values):
                raise ValueError("schedule table needs one value per breakpoint")
            if any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise ValueError("schedule breakpoints must be strictly increasing")
        elif len(self.values) != 1:
            raise ValueError("a constant schedule has exactly one value")
        if any(v == math.inf or math.isnan(v) for v in self.values):
            raise ValueError("schedule values must lie in [-inf, inf)")

    @classmethod
    def constant(cls, a: float) -> "Schedule":
        return cls((), (float(a),))

    @classmethod
    def table(cls, rows: Sequence[tuple[float, float]]) -> "Schedule":
        rows = list(rows)
        return cls(tuple(float(t) for t, _ in rows), tuple(float(a) for _, a in rows))

    @classmethod
    def parse(cls, text: str, base_dir: str | Path | None = None) -> "Schedule":
        """``const:<value>``, ``neg_inf`` or ``table:<path>`` (lines of ``t a``)."""
        text = text.strip()
        if text == "neg_inf":
            return cls.constant(-math.inf)
        kind, _, rest = text.partition(":")
        if kind == "const" and rest:
            return cls.constant(float(rest))
        if kind == "table" and rest:
            path = Path(rest)
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            rows = []
            for line in path.read_text().splitlines():
                line = line.split("#", 1)[0].strip()
                if line:
                    t, a = line.replace(",", " ").split()
                    rows.append((float(t), float(a)))
            return cls.table(rows)
        raise ValueError(f"unrecognised schedule {text!r}")

    def __call__(self, t: float) -> float:
        if not self.times:
            return self.values[0]
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.values[max(i, 0)]


# --------------------------------------------------------------------------- records

CSV_COLUMNS = (
    "t", "energy", "grad_sq", "Y", "A32_sq", "cond_i", "cond_ii", "cond_iii", "cond_iv", "a",
    "a_plus_cubed", "a_minus_fifth", "cross_term", "cancel_resid", "ineq_3_2_lhs",
    "ineq_3_2_rhs", "ineq_3_3_lhs", "ineq_3_3_rhs", "ineq_3_5_slack", "ineq_3_10_lhs",
    "ineq_3_10_rhs", "envelope", "envelope_ok",
)

_NAN = math.nan


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One time-stamped row of criterion integrands, identity residuals and band checks.

    ``omega_plus_sq`` is carried for the second Gronwall form but is not a CSV
    column.  Unfilled entries are NaN; ``envelope_ok`` is None until an
    envelope has been attached.
    """

    t: float = _NAN
    energy: float = _NAN
    grad_sq: float = _NAN
    Y: float = _NAN
    A32_sq: float = _NAN
    cond_i: float = _NAN
    cond_ii: float = _NAN
    cond_iii: float = _NAN
    cond_iv: float = _NAN
    a: float = _NAN
    a_plus_cubed: float = _NAN
    a_minus_fifth: float = _NAN
    cross_term: float = _NAN
    cancel_resid: float = _NAN
    ineq_3_2_lhs: float = _NAN
    ineq_3_2_rhs: float = _NAN
    ineq_3_3_lhs: float = _NAN
    ineq_3_3_rhs: float = _NAN
    ineq_3_5_slack: float = _NAN
    ineq_3_10_lhs: float = _NAN
    ineq_3_10_rhs: float = _NAN
    envelope: float = _NAN
    envelope_ok: bool | None = None
    omega_plus_sq: float = field(default=_NAN, compare=False)

    def row(self) -> tuple:
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


# --------------------------------------------------------------------------- integrands


def _sym_sum(per_mode: np.ndarray) -> float:
    # invariant under relabelling k -> -k, so parity images give bit-identical sums
    # contiguous copy so the reduction order does not depend on memory layout
    both = np.ascontiguousarray(per_mode + _negate_wavevector(per_mode))
    return 0.5 * float(np.sum(both))


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


def _as_decomposition(v) -> HelicalDecomposition:
    return v if isinstance(v, HelicalDecomposition) else decompose(v)


def criterion_integrands(v, a: float, *, t: float = _NAN, mirror: bool = False) -> DiagnosticsRecord:
    """Quadratic diagnostics of ``v`` for threshold ``a`` (partial record).

    ``mirror=True`` computes the negative-helicity counterparts: ``omega-`` in
    place of ``omega+`` and the band ``lambda < -a`` in place of ``lambda > a``.
    """
    d = _as_decomposition(v)
    grid = d.grid
    kmag = grid.kmag
    k2 = grid.k2
    hp, hm = _basis_arrays(grid.n)
    h3p, h3m = hp[2], hm[2]
    wp = kmag * d.plus
    wm = -kmag * d.minus
    ep, em = _abs2(d.plus), _abs2(d.minus)
    both = ep + em

    if not mirror:
        band_p = (kmag > a).astype(float)
        band_m = (-kmag > a).astype(float)
        main, main_h3 = wp, h3p
        first, first_band, first_h3 = wp, band_p, h3p
        second, second_band, second_h3 = wm, band_m, h3m
    else:
        band_m = (-kmag < -a).astype(float)
        band_p = (kmag < -a).astype(float)
        main, main_h3 = wm, h3m
        first, first_band, first_h3 = wm, band_m, h3m
        second, second_band, second_h3 = wp, band_p, h3p

    cond_i = kmag * _abs2(main)
    cond_ii = kmag ** 3 * _abs2(main * main_h3)
    cond_iii = kmag * (_abs2(first) * first_band + _abs2(second) * second_band)
    omega_a3 = first * first_band * first_h3 + second * second_band * second_h3
    cond_iv = kmag ** 3 * _abs2(omega_a3)

    a_plus = max(a, 0.0)
    a_minus = max(-a, 0.0)
    return DiagnosticsRecord(
        t=t,
        energy=VOLUME * _sym_sum(both),
        grad_sq=VOLUME * _sym_sum(k2 * both),
        Y=VOLUME * _sym_sum(kmag * both),
        A32_sq=VOLUME * _sym_sum(kmag ** 3 * both),
        cond_i=VOLUME * _sym_sum(cond_i),
        cond_ii=VOLUME * _sym_sum(cond_ii),
        cond_iii=VOLUME * _sym_sum(cond_iii),
        cond_iv=VOLUME * _sym_sum(cond_iv),
        a=a,
        a_plus_cubed=a_plus ** 3,
        a_minus_fifth=a_minus ** 5,
        omega_plus_sq=VOLUME * _sym_sum(_abs2(main)),
    )


def _vorticity_parts(d: HelicalDecomposition):
    kmag = d.grid.kmag
    zero = np.zeros_like(d.plus)
    w_plus = recompose(HelicalDecomposition(d.grid, kmag * d.plus, zero))
    w_minus = recompose(HelicalDecomposition(d.grid, zero, -kmag * d.minus))
    return w_plus, w_minus


def _triple_products(v: SpectralVectorField, d: HelicalDecomposition):
    """``(omega+ x v, omega-)`` and ``(omega x v, A v)`` with alias-free products."""
    grid = v.grid
    n = grid.n
    w_plus, w_minus = _vorticity_parts(d)
    vp = padded_physical(v.coeffs, n)
    cp = SpectralVectorField(grid, padded_spectral(
        cross_arrays(padded_physical(w_plus.coeffs, n), vp), n))
    cross = inner_product(cp, w_minus)
    # omega from the curl multiplier, A v from the |k| multiplier: independent of the split
    omega = curl(v)
    cw = SpectralVectorField(grid, padded_spectral(
        cross_arrays(padded_physical(omega.coeffs, n), vp), n))
    lhs = inner_product(cw, abs_curl_pow(d, 1.0).recompose())
    return cross, lhs


def cancellation_residual(v: SpectralVectorField) -> float:
    """``|(omega x v, A v) + 2 (omega+ x v, omega-)| / max(1, |(omega x v, A v)|)``."""
    cross, lhs = _triple_products(v, decompose(v))
    return abs(lhs + 2.0 * cross) / max(1.0, abs(lhs))


def holder_chain_check(v: SpectralVectorField) -> tuple[float, float]:
    """``|(omega+ x v, omega-)|`` and ``||omega+||_3 ||v||_3 ||omega-||_3``."""
    d = decompose(v)
    cross, _ = _triple_products(v, d)
    w_plus, w_minus = _vorticity_parts(d)
    return abs(cross), l3_norm(w_plus) * l3_norm(v) * l3_norm(w_minus)


# --------------------------------------------------------------------------- band machinery


def _leq(lhs: float, rhs: float, rtol: float = REL_SLACK) -> bool:
    if rhs == math.inf:
        return True
    return lhs <= rhs + rtol * max(1.0, abs(lhs), abs(rhs))


@dataclass(frozen=True)
class BandReport:
    """Both sides of each band inequality for one field and threshold.

    For ``a >= 0`` the ``ineq_3_3`` pair is an equality, for ``a < 0`` it holds
    the ``<=`` form.  The ``3_9`` and ``3_11`` entries are reported, not
    asserted; ``3_11`` is None without probed constants.
    """

    a: float
    c5: float
    ineq_3_2_lhs: float
    ineq_3_2_mid: float
    ineq_3_2_rhs: float
    ineq_3_3_lhs: float
    ineq_3_3_rhs: float
    ineq_3_5_lhs: float
    ineq_3_5_rhs: float
    ineq_3_10_component: float
    ineq_3_10_lhs: float
    ineq_3_10_mid: float
    ineq_3_10_rhs: float
    ineq_3_9_lhs: float
    ineq_3_9_rhs: float
    ineq_3_11_lhs: float | None = None
    ineq_3_11_rhs: float | None = None

    @property
    def ineq_3_5_slack(self) -> float:
        return self.ineq_3_5_rhs - self.ineq_3_5_lhs

    def checks(self, rtol: float = REL_SLACK) -> dict[str, bool]:
        out = {
            "3.2": _leq(self.ineq_3_2_lhs, self.ineq_3_2_mid, rtol)
            and _leq(self.ineq_3_2_mid, self.ineq_3_2_rhs, rtol),
            "3.5": _leq(self.ineq_3_5_lhs, self.ineq_3_5_rhs, rtol),
            "3.10": _leq(self.ineq_3_10_component, self.ineq_3_10_lhs, rtol)
            and _leq(self.ineq_3_10_lhs, self.ineq_3_10_mid, rtol)
            and _leq(self.ineq_3_10_mid, self.ineq_3_10_rhs, rtol),
        }
        if self.a >= 0:
            scale = max(1.0, abs(self.ineq_3_3_rhs))
            out["3.3"] = abs(self.ineq_3_3_lhs - self.ineq_3_3_rhs) <= rtol * scale
        else:
            out["3.4"] = _leq(self.ineq_3_3_lhs, self.ineq_3_3_rhs, rtol)
        return out

    @property
    def ok(self) -> bool:
        return all(self.checks().values())

    @property
    def ineq_3_9_holds(self) -> bool:
        return _leq(self.ineq_3_9_lhs, self.ineq_3_9_rhs)

    @property
    def ineq_3_11_holds(self) -> bool | None:
        if self.ineq_3_11_lhs is None:
            return None
        return _leq(self.ineq_3_11_lhs, self.ineq_3_11_rhs)


def _third_component_sq(f: SpectralVectorField, alpha: float) -> float:
    return l2_norm(neg_laplacian_pow(f.component(2), alpha)) ** 2


def band_inequality_suite(v: SpectralVectorField, a: float, c5: float, *,
                          c3: float | None = None, c4: float | None = None) -> BandReport:
    """Evaluate both sides of the band inequalities for threshold ``a``."""
    d = decompose(v)
    energy = d.energy()
    if c5 < energy * (1.0 - 1e-12):
        raise InvalidC5(f"c5={c5} is below ||v||^2={energy}")
    a_plus = max(a, 0.0)
    a_minus = max(-a, 0.0)

    v_plus = positive_part(d)
    lhs_32 = spectral_moment(v_plus, 3, SpectralInterval(0.0, a_plus))
    mid_32 = a_plus ** 3 * v_plus.energy()
    rhs_32 = c5 * a_plus ** 3

    omega = curl(v)
    w_plus = positive_part(omega)
    w_a = band_project(omega, SpectralInterval.above(a))
    half_a_sq = l2_norm(abs_curl_pow(w_a, 0.5)) ** 2
    lhs_33 = spectral_moment(w_plus, 1, SpectralInterval.above(a_plus))
    lhs_35 = l2_norm(abs_curl_pow(w_plus, 0.5)) ** 2
    rhs_35 = c5 * a_plus ** 3 + half_a_sq

    if a < 0:
        band = SpectralInterval(a, 0.0)
        v_a0 = band_project(d, band)
        lhs_310 = 0.0 - spectral_moment(v_a0, 5, band)
        mid_310 = a_minus ** 5 * v_a0.energy()
        rhs_310 = c5 * a_minus ** 5
        w_a0 = curl(recompose(v_a0))
        comp_310 = _third_component_sq(w_a0, 0.75)
        lhs_39 = _third_component_sq(w_plus, 0.75)
        rhs_39 = _third_component_sq(w_a, 0.75) + comp_310
    else:
        lhs_310 = mid_310 = rhs_310 = comp_310 = 0.0
        lhs_39 = rhs_39 = _third_component_sq(w_plus, 0.75)

    lhs_311 = rhs_311 = None
    if a < 0 and c3 is not None and c4 is not None:
        lhs_311 = lhs_35
        rhs_311 = (c3 * l2_norm(w_plus) ** 2
                   + c4 * (_third_component_sq(w_a, 0.75) + c5 * a_minus ** 5))

    return BandReport(a, c5, lhs_32, mid_32, rhs_32, lhs_33, half_a_sq, lhs_35, rhs_35,
                      comp_310, lhs_310, mid_310, rhs_310, lhs_39, rhs_39, lhs_311, rhs_311)


# --------------------------------------------------------------------------- full records


def diagnostics_record(v: SpectralVectorField, t: float, a: float, c5: float, *,
                       bands: bool = True) -> DiagnosticsRecord:
    """Every per-snapshot column of the diagnostics table (envelope excluded).

    ``bands=False`` skips the band inequalities and leaves their columns NaN.
    """
    d = decompose(v)
    rec = criterion_integrands(d, a, t=t)
    cross, lhs = _triple_products(v, d)
    rec = dataclasses.replace(rec, cross_term=cross,
                              cancel_resid=abs(lhs + 2.0 * cross) / max(1.0, abs(lhs)))
    if not bands:
        return rec
    band = band_inequality_suite(v, a, c5)
    return dataclasses.replace(
        rec,
        ineq_3_2_lhs=band.ineq_3_2_lhs,
        ineq_3_2_rhs=band.ineq_3_2_rhs,
        ineq_3_3_lhs=band.ineq_3_3_lhs,
        ineq_3_3_rhs=band.ineq_3_3_rhs,
        ineq_3_5_slack=band.ineq_3_5_slack,
        ineq_3_10_lhs=band.ineq_3_10_lhs,
        ineq_3_10_rhs=band.ineq_3_10_rhs,
    )


class DiagnosticsRecorder:
    """Record factory for :func:`helicalns.solver.simulate`.

    ``c5="auto"`` uses the running maximum of ``||v||^2`` seen so far.
    """

    def __init__(self, schedule: Schedule, c5: float | str = "auto", *, bands: bool = True):
        self.schedule = schedule
        self.c5 = c5
        self.bands = bands
        self._max_energy = 0.0

    def __call__(self, state) -> DiagnosticsRecord:
        v = state.v
        energy = l2_norm(v) ** 2
        self._max_energy = max(self._max_energy, energy)
        c5 = self._max_energy if self.c5 == "auto" else float(self.c5)
        return diagnostics_record(v, state.t, self.schedule(state.t), c5, bands=self.bands)


def monitor_fields(fields: Sequence[tuple[float, SpectralVectorField]], schedule: Schedule,
                   c5: float | str = "auto") -> list[DiagnosticsRecord]:
    """Diagnostics for stored ``(t, v)`` snapshots in time order."""
    recorder = DiagnosticsRecorder(schedule, c5)
    return [recorder(SolverState(v, t)) for t, v in fields]


# --------------------------------------------------------------------------- time series


def _records(traj) -> list:
    if isinstance(traj, Trajectory):
        return traj.records
    return list(traj)


def energy_identity_residual(traj) -> np.ndarray:
    """Residual of ``d/dt Y/2 - 2 cross + ||A^(3/2) v||^2 = 0`` on each record interval.

    The derivative is the forward difference of ``Y`` and the other terms are
    averaged over the interval, so the residual is centred and O(dt^2).
    """
    recs = _records(traj)
    if len(recs) < 2:
        raise InsufficientRecords("need at least two records")
    t = np.array([r.t for r in recs])
    Y = np.array([r.Y for r in recs])
    cross = np.array([r.cross_term for r in recs])
    a32 = np.array([r.A32_sq for r in recs])
    dt = np.diff(t)
    return np.abs(0.5 * np.diff(Y) / dt - (cross[1:] + cross[:-1]) + 0.5 * (a32[1:] + a32[:-1]))


def _cumtrapz(t, g):
    out = np.zeros_like(g)
    out[1:] = np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(t))
    return out


def energy_inequality_residuals(t, energy, grad_sq, nu: float) -> np.ndarray:
    """``||v(t)||^2 + 2 nu int_s^t ||grad v||^2 - ||v(s)||^2`` for all record pairs s < t.

    Trapezoidal quadrature; entry ``[i, j]`` is the pair ``s = t_i``,
    ``t = t_j`` and the lower triangle is NaN.
    """
    t = np.asarray(t, float)
    energy = np.asarray(energy, float)
    cum = 2.0 * nu * _cumtrapz(t, np.asarray(grad_sq, float))
    resid = energy[None, :] + cum[None, :] - cum[:, None] - energy[:, None]
    resid[np.tril_indices(len(t))] = np.nan
    return resid


def gronwall_envelope(traj, c1_hat: float | None, *, condition: str = "i",
                      c3: float | None = None, c4: float | None = None,
                      tau_index: int = 0, rtol: float = 1e-12):
    """``Y(tau) exp(4 c1^6 int_tau^t g)`` and the flags ``Y(t) <= envelope(t)``.

    ``condition="i"`` integrates ``g = cond_i``; ``condition="ii"`` integrates
    ``g = c3 ||omega+||^2 + c4 cond_ii``.  Entries before ``tau`` are NaN/None.
    """
    if c1_hat is None:
        raise MissingProbeConstant("the envelope needs a probed c1")
    recs = _records(traj)
    t = np.array([r.t for r in recs])
    Y = np.array([r.Y for r in recs])
    if condition == "i":
        g = np.array([r.cond_i for r in recs])
    elif condition == "ii":
        if c3 is None or c4 is None:
            raise MissingProbeConstant("condition (ii) needs probed c3 and c4")
        g = np.array([c3 * r.omega_plus_sq + c4 * r.cond_ii for r in recs])
    else:
        raise ValueError(f"unknown condition {condition!r}")
    env = np.full(len(recs), np.nan)
    ok: list = [None] * len(recs)
    tail = slice(tau_index, None)
    with np.errstate(over="ignore"):  # an overflowing envelope is +inf, which bounds anything
        env[tail] = Y[tau_index] * np.exp(4.0 * c1_hat ** 6 * _cumtrapz(t[tail], g[tail]))
    for j in range(tau_index, len(recs)):
        ok[j] = bool(Y[j] <= env[j] * (1.0 + rtol))
    return env, ok


def attach_envelope(traj, c1_hat: float, **kwargs) -> list[DiagnosticsRecord]:
    env, ok = gronwall_envelope(traj, c1_hat, **kwargs)
    return [dataclasses.replace(r, envelope=float(e), envelope_ok=o)
            for r, e, o in zip(_records(traj), env, ok)]


# --------------------------------------------------------------------------- constant probes


@dataclass(frozen=True)
class EnsembleSpec:
    """Random-field ensemble for constant probes; ``helicity_fraction=None`` draws one per member."""

    n: int = 32
    seed: int = 0
    slope: float = -2.0
    k_min: int = 1
    k_max: float | None = None
    helicity_fraction: float | None = None
    include_canonical: bool = True

    @property
    def resolved_k_max(self) -> float:
        return self.k_max if self.k_max is not None else (self.n - 1) // 3


@dataclass(frozen=True)
class ConstantProbeReport:
    c1_hat: float
    ratio_2_17: dict
    count: int
    skipped: int
    ensemble: EnsembleSpec
    size: int

    @property
    def c34_hat(self) -> float:
        """Smallest common value of the two interpolation constants consistent with the ensemble."""
        return self.ratio_2_17["max"]

    def as_dict(self) -> dict:
        out = {
            "c1_hat": self.c1_hat,
            "c34_hat": self.c34_hat,
            "count": self.count,
            "skipped": self.skipped,
            "size": self.size,
        }
        out.update({f"ratio_2_17_{k}": v for k, v in self.ratio_2_17.items()})
        out.update({f"ensemble_{k}": v for k, v in dataclasses.asdict(self.ensemble).items()})
        return out


def _half_power_sq(d: HelicalDecomposition) -> float:
    # ||A^(1/2) u||^2 = sum |lambda| |c|^2; the signed moment would be the helicity
    return VOLUME * float(np.sum(d.grid.kmag * (_abs2(d.plus) + _abs2(d.minus))))


def sobolev_ratio(u) -> float:
    """``||u||_3 / ||A^(1/2) u||_2``."""
    d = _as_decomposition(u)
    field_ = u if isinstance(u, SpectralVectorField) else recompose(d)
    return l3_norm(field_) / math.sqrt(_half_power_sq(d))


def interpolation_ratio(u) -> float | None:
    """``||A^(1/2) omega+||^2 / (||omega+||^2 + ||(-Lap)^(3/4) omega3+||^2)``; None if 0/0."""
    d = _as_decomposition(u)
    rec = criterion_integrands(d, 0.0)
    denom = rec.omega_plus_sq + rec.cond_ii
    if denom == 0.0:
        return None
    return rec.cond_i / denom


def probe_constants(ensemble: EnsembleSpec, size: int) -> ConstantProbeReport:
    """Evaluate the Sobolev and interpolation ratios over random and canonical fields."""
    if size < 1:
        raise ValueError("size must be >= 1")
    grid = GridSpec(ensemble.n)
    rng = np.random.default_rng(ensemble.seed)
    members = []
    for i in range(size):
        frac = (ensemble.helicity_fraction if ensemble.helicity_fraction is not None
                else float(rng.uniform()))
        member_seed = int(np.random.SeedSequence([ensemble.seed, i]).generate_state(1)[0])
        members.append(random_helical(grid, ensemble.slope, frac, ensemble.k_min,
                                      ensemble.resolved_k_max, member_seed))
    if ensemble.include_canonical:
        members.append(abc_flow(grid=grid))
        members.append(taylor_green(grid=grid))

    c1 = 0.0
    ratios = []
    skipped = 0
    for m in members:
        d = _as_decomposition(m)
        if d.energy() == 0.0:
            skipped += 1
            continue
        c1 = max(c1, sobolev_ratio(m))
        r = interpolation_ratio(d)
        if r is None:
            skipped += 1
        else:
            ratios.append(r)
    r = np.array(ratios) if ratios else np.array([np.nan])
    stats = {
        "min": float(np.min(r)),
        "q50": float(np.quantile(r, 0.5)),
        "q90": float(np.quantile(r, 0.9)),
        "max": float(np.max(r)),
        "mean": float(np.mean(r)),
    }
    return ConstantProbeReport(c1, stats, len(ratios), skipped, ensemble, size)
