"""Incompressible Navier-Stokes on the periodic box, rotational form.

    d_t v = -P(omega x v) - nu curl^2 v

The Leray projection ``P`` absorbs the Bernoulli pressure, so pressure never
appears.  Time stepping is the Lawson (integrating-factor) form of classical
RK4: the viscous factor ``exp(-nu |k|^2 dt)`` is applied exactly and only the
nonlinear term is discretised.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np

from .errors import CflViolation, EmptyShellRange, NonFinite
from .helical import HelicalDecomposition, recompose
from .spectral import (
    VOLUME,
    GridSpec,
    SpectralVectorField,
    _to_physical,
    _to_spectral,
    cross_arrays,
    curl_coeffs,
    grad_norm_sq,
    l2_norm,
    leray_coeffs,
    padded_physical,
    padded_spectral,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    nu: float = 1.0
    t_end: float = 1.0
    dt_max: float = 0.01
    cfl: float = 0.5
    output_every: int = 1

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        if not self.t_end >= 0:
            raise ValueError("t_end must be non-negative")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be positive")
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        if int(self.output_every) != self.output_every or self.output_every < 1:
            raise ValueError("output_every must be a positive integer")


@dataclass(frozen=True)
class SolverState:
    v: SpectralVectorField
    t: float = 0.0


@dataclass(frozen=True)
class BasicRecord:
    t: float
    energy: float
    enstrophy: float


@dataclass(frozen=True)
class TrajectoryEntry:
    t: float
    snapshot: SpectralVectorField | None
    record: Any
    dissipation: float
    """Running ``2 nu int_0^t ||grad v||^2``, integrated with the RK stages."""


@dataclass
class Trajectory:
    entries: list = field(default_factory=list)

    def append(self, entry: TrajectoryEntry):
        if self.entries and not entry.t > self.entries[-1].t:
            raise ValueError("trajectory times must be strictly increasing")
        self.entries.append(entry)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def times(self) -> np.ndarray:
        return np.array([e.t for e in self.entries])

    @property
    def records(self) -> list:
        return [e.record for e in self.entries]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(e.record, name) for e in self.entries], dtype=float)


# --------------------------------------------------------------------------- initial conditions


def abc_flow(A: float = 1.0, B: float = 1.0, C: float = 1.0, *,
             grid: GridSpec | None = None) -> SpectralVectorField:
    """Arnold-Beltrami-Childress field, built directly from its six Fourier modes.

    v = (A sin x3 + C cos x2, B sin x1 + A cos x3, C sin x2 + B cos x1), curl v = v.
    """
    grid = grid or GridSpec(32)
    c = np.zeros((3,) + (grid.n,) * 3, dtype=np.complex128)
    for s in (1, -1):
        i = s % grid.n
        # sin x -> -i s/2 at k = s, cos x -> 1/2
        c[0, 0, 0, i] += -0.5j * s * A
        c[1, 0, 0, i] += 0.5 * A
        c[1, i, 0, 0] += -0.5j * s * B
        c[2, i, 0, 0] += 0.5 * B
        c[2, 0, i, 0] += -0.5j * s * C
        c[0, 0, i, 0] += 0.5 * C
    return SpectralVectorField(grid, c, divergence_free=True, zero_mean=True)


def taylor_green(*, grid: GridSpec | None = None) -> SpectralVectorField:
    """v = (sin x1 cos x2 cos x3, -cos x1 sin x2 cos x3, 0) from its eight modes."""
    grid = grid or GridSpec(32)
    c = np.zeros((3,) + (grid.n,) * 3, dtype=np.complex128)
    for s1 in (1, -1):
        for s2 in (1, -1):
            for s3 in (1, -1):
                idx = (s1 % grid.n, s2 % grid.n, s3 % grid.n)
                c[(0,) + idx] = -0.125j * s1
                c[(1,) + idx] = 0.125j * s2
    return SpectralVectorField(grid, c, divergence_free=True, zero_mean=True)


def random_helical(grid: GridSpec, slope: float, helicity_fraction: float, k_min: int,
                   k_max: float, seed: int) -> HelicalDecomposition:
    """Random helical coefficients with ``|c|^2 ~ |k|^slope`` on ``k_min <= |k| <= k_max``.

    Normalised so that the positive part carries ``helicity_fraction`` of a unit
    energy.  Reality is imposed per helicity: ``c(-k) = -conj(c(k))``.
    """
    if not 0.0 <= helicity_fraction <= 1.0:
        raise ValueError("helicity_fraction must lie in [0, 1]")
    if k_min < 1:
        raise ValueError("k_min must be >= 1")
    kmag = grid.kmag
    shell = (kmag >= k_min) & (kmag <= k_max) & (grid.odd_mask > 0)
    if not np.any(shell):
        raise EmptyShellRange(f"no lattice modes with {k_min} <= |k| <= {k_max} at n={grid.n}")
    rng = np.random.default_rng(seed)
    amp = np.where(shell, np.where(shell, kmag, 1.0) ** (0.5 * slope), 0.0)

    def draw():
        z = rng.standard_normal(kmag.shape) + 1j * rng.standard_normal(kmag.shape)
        z = 0.5 * (z - np.conj(_neg_k(z)))
        return z * amp

    parts = []
    for frac in (helicity_fraction, 1.0 - helicity_fraction):
        z = draw()
        e = VOLUME * float(np.sum(np.abs(z) ** 2))
        parts.append(z * math.sqrt(frac / e) if frac > 0 else np.zeros_like(z))
    return HelicalDecomposition(grid, parts[0], parts[1])


def random_divfree(slope: float = -2.0, helicity_fraction: float = 0.5, k_min: int = 1,
                   k_max: float = 4, seed: int = 0, *,
                   grid: GridSpec | None = None) -> SpectralVectorField:
    """Unit-norm random divergence-free field; deterministic in ``seed``."""
    grid = grid or GridSpec(32)
    return recompose(random_helical(grid, slope, helicity_fraction, k_min, k_max, seed))


def _neg_k(a):
    n = a.shape[-1]
    neg = (-np.arange(n)) % n
    return a[..., neg, :, :][..., :, neg, :][..., :, :, neg]


# --------------------------------------------------------------------------- dynamics


def _nonlinear(c: np.ndarray, grid: GridSpec, rule: str | None = None):
    """``-P(omega x v)`` and ``max|v|`` for coefficient array ``c``.

    ``rule`` overrides the grid's dealiasing rule.
    """
    n = grid.n
    w = curl_coeffs(c, grid)
    if (rule or grid.dealias) == "two_thirds":
        mask = grid.two_thirds_mask
        vp = _to_physical(c * mask, n)
        wp = _to_physical(w * mask, n)
        prod = _to_spectral(cross_arrays(wp, vp), n) * mask
        vmax_field = vp if not np.any(c * (1 - mask)) else _to_physical(c, n)
    else:
        vp = padded_physical(c, n)
        wp = padded_physical(w, n)
        prod = padded_spectral(cross_arrays(wp, vp), n)
        vmax_field = vp
    vmax = float(np.sqrt(np.max(np.sum(vmax_field * vmax_field, axis=0))))
    return -leray_coeffs(prod, grid), vmax


def nonlinear_rhs(v: SpectralVectorField) -> SpectralVectorField:
    """Divergence-free nonlinear tendency ``-P(omega x v)`` with 3/2-padded products."""
    rhs, _ = _nonlinear(v.coeffs, v.grid, "three_halves")
    return SpectralVectorField(v.grid, rhs, divergence_free=True, zero_mean=True)


def _dissipation_rate(c: np.ndarray, grid: GridSpec, nu: float) -> float:
    return 2.0 * nu * VOLUME * float(np.sum(grid.k2 * (c.real ** 2 + c.imag ** 2)))


def _lawson_rk4(c, dt, nu, grid, n1=None):
    """One integrating-factor RK4 step; returns new coefficients and the dissipation increment."""
    e_half = np.exp(-0.5 * nu * dt * grid.k2)
    e_full = e_half * e_half
    if n1 is None:
        n1, _ = _nonlinear(c, grid)
    c2 = e_half * (c + 0.5 * dt * n1)
    n2, _ = _nonlinear(c2, grid)
    c3 = e_half * c + 0.5 * dt * n2
    n3, _ = _nonlinear(c3, grid)
    c4 = e_full * c + dt * (e_half * n3)
    n4, _ = _nonlinear(c4, grid)
    new = e_full * c + (dt / 6.0) * (e_full * n1 + 2.0 * e_half * (n2 + n3) + n4)
    rates = [_dissipation_rate(x, grid, nu) for x in (c, c2, c3, c4)]
    d_inc = dt / 6.0 * (rates[0] + 2.0 * rates[1] + 2.0 * rates[2] + rates[3])
    return leray_coeffs(new, grid), d_inc


def cfl_limit(vmax: float, grid: GridSpec, cfl: float) -> float:
    return math.inf if vmax == 0 else cfl * grid.dx / vmax


def step(state: SolverState, dt: float, config: SolverConfig = SolverConfig()) -> SolverState:
    """Advance ``state`` by ``dt``; raises :class:`CflViolation` if ``dt`` is too large."""
    grid = state.v.grid
    n1, vmax = _nonlinear(state.v.coeffs, grid)
    _check_dt(dt, vmax, grid, config)
    new, _ = _lawson_rk4(state.v.coeffs, dt, config.nu, grid, n1)
    return SolverState(SpectralVectorField(grid, new, divergence_free=True, zero_mean=True),
                       state.t + dt)


def _check_dt(dt, vmax, grid, config):
    slack = 1.0 + 1e-12
    if not dt > 0:
        raise CflViolation(f"dt must be positive, got {dt}")
    if dt > config.dt_max * slack:
        raise CflViolation(f"dt={dt} exceeds dt_max={config.dt_max}")
    limit = cfl_limit(vmax, grid, config.cfl)
    if dt > limit * slack:
        raise CflViolation(f"dt={dt} exceeds the CFL limit {limit:.6g} (max|v|={vmax:.6g})")


def basic_record(state: SolverState) -> BasicRecord:
    v = state.v
    return BasicRecord(state.t, l2_norm(v) ** 2, grad_norm_sq(v))


Observer = Callable[[SolverState, TrajectoryEntry], None]


def simulate(config: SolverConfig, v0: SpectralVectorField, observers: Iterable[Observer] = (),
             *, record: Callable[[SolverState], Any] = basic_record,
             keep_snapshots: bool = False) -> Trajectory:
    """Integrate from ``v0`` to ``config.t_end``.

    A trajectory entry is written at t = 0, every ``output_every`` steps and at
    ``t_end``; each written entry is passed to every observer.  ``record`` maps
    a state to the stored record.  Under the two-thirds rule ``v0`` is first
    truncated to the dealiased cube.
    """
    grid = v0.grid
    c = leray_coeffs(v0.coeffs, grid)
    if grid.dealias == "two_thirds":
        c = c * grid.two_thirds_mask
    observers = list(observers)
    traj = Trajectory()
    nu = config.nu

    def emit(c, t, dissipation):
        v = SpectralVectorField(grid, c, divergence_free=True, zero_mean=True)
        state = SolverState(v, t)
        entry = TrajectoryEntry(t, v if keep_snapshots else None, record(state), dissipation)
        traj.append(entry)
        for obs in observers:
            obs(state, entry)

    t = 0.0
    dissipation = 0.0
    emit(c, t, dissipation)
    t_end = config.t_end
    eps = 1e-12 * max(1.0, t_end)
    nstep = 0
    while t_end - t > eps:
        n1, vmax = _nonlinear(c, grid)
        dt = min(config.dt_max, cfl_limit(vmax, grid, config.cfl))
        last = t + dt >= t_end - eps
        if last:
            dt = t_end - t
        new, d_inc = _lawson_rk4(c, dt, nu, grid, n1)
        if not (np.all(np.isfinite(new)) and math.isfinite(d_inc)):
            raise NonFinite(f"non-finite state after step from t={t}", t_last=t, trajectory=traj)
        c = new
        t = t_end if last else t + dt
        dissipation += d_inc
        nstep += 1
        if last or nstep % config.output_every == 0:
            emit(c, t, dissipation)
    log.debug("simulate: %d steps to t=%g", nstep, t)
    return traj
