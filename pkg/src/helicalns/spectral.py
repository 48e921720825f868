"""Fourier fields on the periodic box [0, 2pi)^3 and the multipliers acting on them.

Coefficients follow the convention

    f(x) = sum_k c(k) exp(i k.x),    c(k) = (1/n^3) sum_x f(x) exp(-i k.x),

so they do not depend on the grid size and every L2 quantity carries the
explicit box volume (2 pi)^3.  Arrays are stored in full (not half) spectral
layout, component axis first: ``(3, n, n, n)`` for vectors and ``(n, n, n)``
for scalars, with array axis ``j`` holding wavenumber component ``k_{j+1}``.

Odd-order multipliers (curl, Leray projection, the helical basis) annihilate
the Nyquist planes, since ``+n/2`` and ``-n/2`` share one slot and the odd
symbol cannot be made Hermitian there.  Divergence-free fields therefore never
carry Nyquist content.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .errors import GridMismatch, NegativePowerOnMeanMode

VOLUME = (2.0 * np.pi) ** 3
DEALIAS_RULES = ("two_thirds", "three_halves")

_AXES = (-3, -2, -1)
_WORKERS = -1


@dataclass(frozen=True)
class GridSpec:
    """Lattice of ``n`` modes per axis on the box of side 2 pi.

    ``dealias`` selects how the solver forms quadratic products:
    ``"two_thirds"`` truncates on the native grid, ``"three_halves"`` pads.
    Diagnostic products always pad.
    """

    n: int
    dealias: str = "two_thirds"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8 or self.n % 2:
            raise ValueError(f"n must be an even integer >= 8, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.dealias not in DEALIAS_RULES:
            raise ValueError(f"dealias must be one of {DEALIAS_RULES}, got {self.dealias!r}")

    @property
    def box_length(self) -> float:
        return 2.0 * np.pi

    @property
    def dx(self) -> float:
        return 2.0 * np.pi / self.n

    @property
    def padded_n(self) -> int:
        return 3 * self.n // 2

    @property
    def k(self) -> np.ndarray:
        """Wavevector components, shape ``(3, n, n, n)``; Nyquist index holds ``+n/2``."""
        return _lattice(self.n)[0]

    @property
    def k2(self) -> np.ndarray:
        return _lattice(self.n)[1]

    @property
    def kmag(self) -> np.ndarray:
        return _lattice(self.n)[2]

    @property
    def nyquist(self) -> np.ndarray:
        """Boolean mask of modes with some ``|k_j| = n/2``."""
        return _lattice(self.n)[3]

    @property
    def odd_mask(self) -> np.ndarray:
        """1.0 off the Nyquist planes and off k = 0, else 0.0."""
        return _lattice(self.n)[4]

    @property
    def two_thirds_mask(self) -> np.ndarray:
        return _lattice(self.n)[5]

    def same_lattice(self, other: "GridSpec") -> bool:
        return self.n == other.n


@lru_cache(maxsize=16)
def _lattice(n: int):
    k1d = np.fft.fftfreq(n, 1.0 / n)
    k1d[n // 2] = n // 2
    k = np.stack(np.meshgrid(k1d, k1d, k1d, indexing="ij"))
    k2 = np.sum(k * k, axis=0)
    kmag = np.sqrt(k2)
    nyq = np.any(np.abs(k) == n // 2, axis=0)
    odd = np.where(nyq | (k2 == 0), 0.0, 1.0)
    # product of two |k_j| <= K modes stays alias-free on n points iff 3K < n
    kcut = (n - 1) // 3
    keep = np.all(np.abs(k) <= kcut, axis=0).astype(float)
    for a in (k, k2, kmag, nyq, odd, keep):
        a.setflags(write=False)
    return k, k2, kmag, nyq, odd, keep


# --------------------------------------------------------------------------- fields


class _SpectralField:
    _ncomp_shape: tuple = ()

    def __init__(self, grid: GridSpec, coeffs, *, divergence_free=False, zero_mean=False,
                 _physical=None):
        arr = np.asarray(coeffs, dtype=np.complex128)
        expected = self._ncomp_shape + (grid.n,) * 3
        if arr.shape != expected:
            raise ValueError(f"coefficient array has shape {arr.shape}, expected {expected}")
        arr = arr.view()
        arr.setflags(write=False)
        self.grid = grid
        self.coeffs = arr
        self.divergence_free = bool(divergence_free)
        self.zero_mean = bool(zero_mean)
        self._physical = _physical

    def _new(self, coeffs, **flags):
        return type(self)(self.grid, coeffs, **flags)

    def __add__(self, other):
        _check_same_grid(self, other)
        return self._new(self.coeffs + other.coeffs,
                         divergence_free=self.divergence_free and other.divergence_free,
                         zero_mean=self.zero_mean and other.zero_mean)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return self._new(self.coeffs - other.coeffs,
                         divergence_free=self.divergence_free and other.divergence_free,
                         zero_mean=self.zero_mean and other.zero_mean)

    def __neg__(self):
        return self._new(-self.coeffs, divergence_free=self.divergence_free,
                         zero_mean=self.zero_mean)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return self._new(self.coeffs * scalar, divergence_free=self.divergence_free,
                         zero_mean=self.zero_mean)

    __rmul__ = __mul__

    def to_physical(self) -> np.ndarray:
        """Real samples on the native grid (a fresh array)."""
        if self._physical is not None:
            return self._physical.copy()
        return _to_physical(self.coeffs, self.grid.n)

    @property
    def mean_mode(self):
        return self.coeffs[..., 0, 0, 0]

    def norm(self) -> float:
        return l2_norm(self)


class SpectralVectorField(_SpectralField):
    """Fourier coefficients of a real 3-vector field, shape ``(3, n, n, n)``.

    The coefficient array is read-only; operators return new fields.  The
    ``divergence_free`` and ``zero_mean`` flags record what the producing
    operator guarantees; :meth:`divergence_residual` measures it.
    """

    _ncomp_shape = (3,)

    @classmethod
    def from_physical(cls, grid: GridSpec, samples) -> "SpectralVectorField":
        samples = np.asarray(samples, dtype=np.float64)
        coeffs = _to_spectral(samples, grid.n)
        cached = samples.copy()
        cached.setflags(write=False)
        return cls(grid, coeffs, _physical=cached)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpectralVectorField":
        return cls(grid, np.zeros((3,) + (grid.n,) * 3, complex), divergence_free=True,
                   zero_mean=True)

    def component(self, j: int) -> "SpectralScalarField":
        return SpectralScalarField(self.grid, self.coeffs[j], zero_mean=self.zero_mean)

    def divergence_residual(self) -> float:
        """``max|k.c| / max(|k||c|)`` with mean and Nyquist content counted as violations."""
        return divergence_residual(self.coeffs, self.grid)


class SpectralScalarField(_SpectralField):
    """Fourier coefficients of a real scalar field, shape ``(n, n, n)``."""

    _ncomp_shape = ()

    @classmethod
    def from_physical(cls, grid: GridSpec, samples) -> "SpectralScalarField":
        samples = np.asarray(samples, dtype=np.float64)
        return cls(grid, _to_spectral(samples, grid.n))


def _check_same_grid(f, g):
    if not f.grid.same_lattice(g.grid):
        raise GridMismatch(f"fields live on different lattices (n={f.grid.n} vs n={g.grid.n})")
    if type(f) is not type(g):
        raise TypeError(f"cannot combine {type(f).__name__} with {type(g).__name__}")


# --------------------------------------------------------------------------- transforms


def _to_physical(coeffs: np.ndarray, n: int) -> np.ndarray:
    half = coeffs[..., : n // 2 + 1]
    return sfft.irfftn(half, s=(n, n, n), axes=_AXES, norm="forward", workers=_WORKERS)


def _to_spectral(samples: np.ndarray, n: int) -> np.ndarray:
    half = sfft.rfftn(samples, axes=_AXES, norm="forward", workers=_WORKERS)
    return _hermitian_complete(half, n)


def _hermitian_complete(half: np.ndarray, m: int) -> np.ndarray:
    """Rebuild the full spectrum of a real field from its ``rfftn`` half."""
    nh = half.shape[-1]
    full = np.empty(half.shape[:-1] + (m,), dtype=np.complex128)
    full[..., :nh] = half
    ntail = m - nh
    if ntail:
        neg = (-np.arange(m)) % m
        src = np.conj(half[..., ntail:0:-1])
        src = np.take(np.take(src, neg, axis=-3), neg, axis=-2)
        full[..., nh:] = src
    return full


def forward_transform(samples, grid: GridSpec | None = None):
    """Real samples, shape ``(3, n, n, n)`` or ``(n, n, n)``, to a spectral field."""
    samples = np.asarray(samples, dtype=np.float64)
    if grid is None:
        grid = GridSpec(samples.shape[-1])
    if samples.ndim == 4:
        return SpectralVectorField.from_physical(grid, samples)
    return SpectralScalarField.from_physical(grid, samples)


def inverse_transform(f) -> np.ndarray:
    return f.to_physical()


def pad_coeffs(coeffs: np.ndarray, n: int, m: int) -> np.ndarray:
    """Embed native ``n``-lattice coefficients into an ``m``-lattice (``m > n``).

    The shared Nyquist slot is split evenly between ``+n/2`` and ``-n/2`` so a
    real field stays real.
    """
    out = coeffs
    h = n // 2
    for axis in _AXES:
        src = np.moveaxis(out, axis, -1)
        dst = np.zeros(src.shape[:-1] + (m,), dtype=np.complex128)
        dst[..., :h] = src[..., :h]
        dst[..., m - h + 1:] = src[..., h + 1:]
        dst[..., h] = 0.5 * src[..., h]
        dst[..., m - h] = 0.5 * src[..., h]
        out = np.moveaxis(dst, -1, axis)
    return out


def truncate_coeffs(coeffs: np.ndarray, m: int, n: int) -> np.ndarray:
    """Restrict ``m``-lattice coefficients to the native ``n`` lattice, dropping Nyquist planes."""
    out = coeffs
    h = n // 2
    for axis in _AXES:
        src = np.moveaxis(out, axis, -1)
        dst = np.zeros(src.shape[:-1] + (n,), dtype=np.complex128)
        dst[..., :h] = src[..., :h]
        dst[..., h + 1:] = src[..., m - h + 1:]
        out = np.moveaxis(dst, -1, axis)
    return out


def padded_physical(coeffs: np.ndarray, n: int) -> np.ndarray:
    m = 3 * n // 2
    return _to_physical(pad_coeffs(coeffs, n, m), m)


def padded_spectral(samples: np.ndarray, n: int) -> np.ndarray:
    m = samples.shape[-1]
    return truncate_coeffs(_to_spectral(samples, m), m, n)


# --------------------------------------------------------------------------- array kernels


def cross_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.stack((a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]))


def curl_coeffs(c: np.ndarray, grid: GridSpec) -> np.ndarray:
    k = grid.k
    out = 1j * cross_arrays(k, c)
    out *= grid.odd_mask
    return out


def leray_coeffs(c: np.ndarray, grid: GridSpec) -> np.ndarray:
    k = grid.k
    k2 = np.where(grid.k2 == 0, 1.0, grid.k2)
    kdotc = np.sum(k * c, axis=0)
    out = c - k * (kdotc / k2)
    out *= grid.odd_mask
    return out


def divergence_residual(c: np.ndarray, grid: GridSpec) -> float:
    scale = float(np.max(grid.kmag * np.sqrt(np.sum(np.abs(c) ** 2, axis=0))))
    if scale == 0.0:
        scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        return 0.0
    k = grid.k * grid.odd_mask
    div = float(np.max(np.abs(np.sum(k * c, axis=0))))
    stray = float(np.max(np.abs(c) * (1.0 - grid.odd_mask)))
    return max(div, stray) / scale


# --------------------------------------------------------------------------- operators


def leray_project(f: SpectralVectorField) -> SpectralVectorField:
    """Orthogonal projection onto divergence-free, zero-mean fields: c - k (k.c)/|k|^2."""
    return SpectralVectorField(f.grid, leray_coeffs(f.coeffs, f.grid), divergence_free=True,
                               zero_mean=True)


def curl(f: SpectralVectorField) -> SpectralVectorField:
    """Multiplier ``i k x``; the output is divergence-free and zero-mean."""
    return SpectralVectorField(f.grid, curl_coeffs(f.coeffs, f.grid), divergence_free=True,
                               zero_mean=True)


def neg_laplacian_pow(f, alpha: float):
    """Fractional power of -Laplacian as the multiplier ``|k|^(2 alpha)``.

    The mean mode maps to zero except for ``alpha == 0``, which is the identity.
    """
    if alpha == 0:
        return f._new(f.coeffs.copy(), divergence_free=f.divergence_free, zero_mean=f.zero_mean)
    if alpha < 0 and np.any(f.mean_mode != 0):
        raise NegativePowerOnMeanMode("negative power of -Laplacian needs a zero-mean field")
    k2 = f.grid.k2
    with np.errstate(divide="ignore"):
        mult = np.where(k2 == 0, 0.0, np.power(np.where(k2 == 0, 1.0, k2), alpha))
    return f._new(f.coeffs * mult, divergence_free=f.divergence_free, zero_mean=True)


def inner_product(f, g) -> float:
    """L2 inner product over the box, ``(2 pi)^3 sum_k Re(c_f . conj(c_g))``."""
    _check_same_grid(f, g)
    return VOLUME * float(np.sum(f.coeffs.real * g.coeffs.real + f.coeffs.imag * g.coeffs.imag))


def l2_norm(f) -> float:
    return float(np.sqrt(inner_product(f, f)))


def grad_norm_sq(f) -> float:
    """``||grad f||^2 = (2 pi)^3 sum |k|^2 |c|^2`` (full gradient tensor)."""
    return VOLUME * float(np.sum(f.grid.k2 * np.abs(f.coeffs) ** 2))


def l3_norm(f: SpectralVectorField) -> float:
    """L3 norm of the pointwise Euclidean magnitude, by the native-grid Riemann sum."""
    u = f.to_physical()
    mag = np.sqrt(np.sum(u * u, axis=0))
    return float((np.sum(mag ** 3) * f.grid.dx ** 3) ** (1.0 / 3.0))


def pointwise_cross(f: SpectralVectorField, g: SpectralVectorField) -> SpectralVectorField:
    """Alias-free ``f x g`` via 3/2-padded transforms, truncated to the native lattice."""
    _check_same_grid(f, g)
    n = f.grid.n
    fp = padded_physical(f.coeffs, n)
    gp = padded_physical(g.coeffs, n)
    return SpectralVectorField(f.grid, padded_spectral(cross_arrays(fp, gp), n))


def dealias_truncate(f: SpectralVectorField) -> SpectralVectorField:
    """Zero every mode outside the two-thirds cube."""
    return f._new(f.coeffs * f.grid.two_thirds_mask, divergence_free=f.divergence_free,
                  zero_mean=f.zero_mean)
