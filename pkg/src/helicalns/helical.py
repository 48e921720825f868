"""Curl eigenbasis, helical decomposition and band filters over signed curl eigenvalues.

On the torus the curl operator restricted to divergence-free, zero-mean fields
is diagonal in the per-mode basis ``h+(k), h-(k)`` with eigenvalues ``+|k|``
and ``-|k|``.  Every spectral projection of curl is therefore a band filter on
those signed eigenvalues, and ``A = |curl|`` is the multiplier ``|k|`` on both
helical components.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NotDivergenceFree, ZeroWavevector
from .spectral import VOLUME, GridSpec, SpectralVectorField, divergence_residual

DIVERGENCE_TOL = 1e-10
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _frame(k1, k2, k3):
    """Orthonormal ``(e1, e2)`` transverse to ``k``; works elementwise on arrays."""
    k1, k2, k3 = (np.asarray(c, dtype=float) for c in (k1, k2, k3))
    along_z = (k1 == 0) & (k2 == 0)
    # k x z_hat, or k x x_hat when k is parallel to z_hat
    a1 = np.where(along_z, 0.0, k2)
    a2 = np.where(along_z, k3, -k1)
    a3 = np.where(along_z, -k2, 0.0)
    anorm = np.sqrt(a1 * a1 + a2 * a2 + a3 * a3)
    anorm = np.where(anorm == 0, 1.0, anorm)
    e1 = np.stack((a1 / anorm, a2 / anorm, a3 / anorm))
    kn = np.sqrt(k1 * k1 + k2 * k2 + k3 * k3)
    kn = np.where(kn == 0, 1.0, kn)
    u = np.stack((k1 / kn, k2 / kn, k3 / kn))
    e2 = np.stack((u[1] * e1[2] - u[2] * e1[1],
                   u[2] * e1[0] - u[0] * e1[2],
                   u[0] * e1[1] - u[1] * e1[0]))
    return e1, e2


def _helical_pair(e1, e2):
    hp = np.empty(e1.shape, dtype=np.complex128)
    hm = np.empty(e1.shape, dtype=np.complex128)
    hp.real = e1 * _INV_SQRT2
    hp.imag = e2 * _INV_SQRT2
    hm.real = hp.real
    hm.imag = -hp.imag
    return hp, hm


def helical_basis(k) -> tuple[np.ndarray, np.ndarray]:
    """Unit eigenvectors ``(h+, h-)`` of ``i k x`` for a single nonzero wavevector.

    ``e1 = normalize(k x z)`` (``normalize(k x x)`` if ``k`` is parallel to z),
    ``e2 = k/|k| x e1`` and ``h+- = (e1 +- i e2)/sqrt(2)``, so that
    ``i k x h+- = +-|k| h+-``.
    """
    k = np.asarray(k, dtype=float)
    if k.shape != (3,):
        raise ValueError("k must be a 3-vector")
    if not np.any(k):
        raise ZeroWavevector("the helical basis is undefined at k = 0")
    e1, e2 = _frame(*k)
    return _helical_pair(e1, e2)


@dataclass(frozen=True)
class HelicalBasis:
    """Basis arrays for a whole lattice, zero at k = 0 and on Nyquist planes."""

    grid: GridSpec
    plus: np.ndarray
    minus: np.ndarray

    @classmethod
    def for_grid(cls, grid: GridSpec) -> "HelicalBasis":
        hp, hm = _basis_arrays(grid.n)
        return cls(grid, hp, hm)


@lru_cache(maxsize=8)
def _basis_arrays(n: int):
    grid = GridSpec(n)
    k = grid.k
    e1, e2 = _frame(k[0], k[1], k[2])
    hp, hm = _helical_pair(e1, e2)
    hp *= grid.odd_mask
    hm *= grid.odd_mask
    hp.setflags(write=False)
    hm.setflags(write=False)
    return hp, hm


@dataclass(frozen=True)
class SpectralInterval:
    """Half-open band ``lo < lambda <= hi`` of signed curl eigenvalues."""

    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise ValueError(f"invalid interval ({self.lo}, {self.hi}]")

    @classmethod
    def positive(cls):
        return cls(0.0, math.inf)

    @classmethod
    def negative(cls):
        return cls(-math.inf, 0.0)

    @classmethod
    def above(cls, a: float):
        return cls(a, math.inf)

    @classmethod
    def up_to(cls, lam: float):
        return cls(-math.inf, lam)

    @property
    def is_everything(self) -> bool:
        return self.lo == -math.inf and self.hi == math.inf

    def contains(self, lam):
        lam = np.asarray(lam)
        return (self.lo < lam) & (lam <= self.hi)


@dataclass(frozen=True, eq=False)
class HelicalDecomposition:
    """Coefficients ``c+(k), c-(k)`` with ``c(k) = c+ h+(k) + c- h-(k)``."""

    grid: GridSpec
    plus: np.ndarray
    minus: np.ndarray

    def recompose(self) -> SpectralVectorField:
        return recompose(self)

    def energy(self) -> float:
        return VOLUME * float(np.sum(np.abs(self.plus) ** 2) + np.sum(np.abs(self.minus) ** 2))

    def masks(self, interval: SpectralInterval):
        kmag = self.grid.kmag
        return interval.contains(kmag), interval.contains(-kmag)


def decompose(f: SpectralVectorField, *, tol: float = DIVERGENCE_TOL) -> HelicalDecomposition:
    """Helical coordinates ``c+- = conj(h+-) . c`` of a divergence-free, zero-mean field."""
    resid = divergence_residual(f.coeffs, f.grid)
    if resid > tol:
        raise NotDivergenceFree(f"divergence/mean residual {resid:.3e} exceeds {tol:.1e}")
    hp, hm = _basis_arrays(f.grid.n)
    # conj(h+) == h- exactly, so the Hermitian projections are plain dot products
    c = f.coeffs
    plus = np.sum(hm * c, axis=0)
    minus = np.sum(hp * c, axis=0)
    return HelicalDecomposition(f.grid, plus, minus)


def recompose(d: HelicalDecomposition) -> SpectralVectorField:
    hp, hm = _basis_arrays(d.grid.n)
    return SpectralVectorField(d.grid, d.plus * hp + d.minus * hm, divergence_free=True,
                               zero_mean=True)


def _as_decomposition(f) -> HelicalDecomposition:
    return f if isinstance(f, HelicalDecomposition) else decompose(f)


def band_project(f, interval: SpectralInterval):
    """Keep helical components whose eigenvalue ``+-|k|`` lies in ``interval``.

    Accepts a field or a decomposition and returns the same kind.  The whole
    real line returns ``f`` itself.
    """
    if interval.is_everything:
        return f
    d = _as_decomposition(f)
    mp, mm = d.masks(interval)
    out = HelicalDecomposition(d.grid, np.where(mp, d.plus, 0.0), np.where(mm, d.minus, 0.0))
    if isinstance(f, HelicalDecomposition):
        return out
    return recompose(out)


def positive_part(f):
    return band_project(f, SpectralInterval.positive())


def negative_part(f):
    return band_project(f, SpectralInterval.negative())


def abs_curl_pow(f, s: float):
    """``A^s`` with ``A = |curl|``: multiplier ``|k|^s`` on both helical components."""
    if s < 0:
        raise ValueError("abs_curl_pow needs s >= 0")
    d = _as_decomposition(f)
    mult = d.grid.kmag ** s
    out = HelicalDecomposition(d.grid, d.plus * mult, d.minus * mult)
    if isinstance(f, HelicalDecomposition):
        return out
    return recompose(out)


def spectral_moment(f, p: int, interval: SpectralInterval) -> float:
    """Discrete Stieltjes moment ``sum_{lambda in I} lambda^p (2 pi)^3 |c_lambda|^2``."""
    if p < 0 or int(p) != p:
        raise ValueError("p must be a non-negative integer")
    d = _as_decomposition(f)
    kmag = d.grid.kmag
    mp, mm = d.masks(interval)
    wp = np.abs(d.plus) ** 2
    wm = np.abs(d.minus) ** 2
    if p == 0:
        total = np.sum(wp[mp]) + np.sum(wm[mm])
    else:
        total = np.sum(kmag[mp] ** p * wp[mp]) + np.sum((-kmag[mm]) ** p * wm[mm])
    return VOLUME * float(total)


def _negate_wavevector(a: np.ndarray) -> np.ndarray:
    """Reindex ``a[..., k]`` to ``a[..., -k]`` over the last three axes."""
    n = a.shape[-1]
    neg = (-np.arange(n)) % n
    return a[..., neg, :, :][..., :, neg, :][..., :, :, neg]


def mirror(f):
    """Parity image ``v(x) -> -v(-x)``, which exchanges the two helicities.

    In helical coordinates this is the swap ``c+(k) <- c-(-k)``,
    ``c-(k) <- c+(-k)``; applied to a decomposition it is exact.
    """
    if isinstance(f, HelicalDecomposition):
        return HelicalDecomposition(f.grid, _negate_wavevector(f.minus),
                                    _negate_wavevector(f.plus))
    return SpectralVectorField(f.grid, -_negate_wavevector(f.coeffs),
                               divergence_free=f.divergence_free, zero_mean=f.zero_mean)
