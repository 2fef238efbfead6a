"""Parameters, frequency/depth grids, spectral fields and the norms used on them.

Fourier transforms use the convention  \\hat u(rho) = int u(xi) exp(-2 pi i <rho, xi>) dxi.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DataError, ParameterError
from .quadrature import composite, legendre_rule

A1, A2, A3 = "A1", "A2", "A3"
A2_RTOL = 1e-12


@dataclass(frozen=True)
class WaveParams:
    k: float
    d: float

    def __post_init__(self):
        if not (np.isfinite(self.k) and self.k > 0):
            raise ParameterError(f"wave number k must be positive, got {self.k!r}")
        if not (np.isfinite(self.d) and self.d > 0):
            raise ParameterError(f"slab depth d must be positive, got {self.d!r}")

    @property
    def small_kd(self):
        return self.k * self.d < math.pi / 2


def lambda_of(rho, params):
    """|rho|^2 - k^2. Works for a single 2-vector or an (n, 2) array."""
    rho = np.asarray(rho, float)
    return np.sum(rho * rho, axis=-1) - params.k ** 2


def classify(lam, k):
    """Region label for each value of lambda; A2 means |lambda| <= 1e-12 * max(1, k^2)."""
    lam = np.asarray(lam, float)
    tol = A2_RTOL * max(1.0, k * k)
    return np.where(np.abs(lam) <= tol, A2, np.where(lam > 0, A1, A3))


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ModeGrid:
    """Frequency samples rho (n, 2), their spacing, depth samples z and per-mode region labels."""
    rho: np.ndarray
    spacing: float
    z: np.ndarray
    k: float
    region: np.ndarray = field(init=False)
    lam: np.ndarray = field(init=False)

    def __post_init__(self):
        rho = _frozen(np.reshape(self.rho, (-1, 2)))
        z = _frozen(np.atleast_1d(self.z))
        if z.size and (np.any(np.diff(z) <= 0) or z[0] < 0):
            raise ParameterError("z samples must be strictly ascending and nonnegative")
        if not self.spacing > 0:
            raise ParameterError("grid spacing must be positive")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "z", z)
        lam = _frozen(np.sum(rho * rho, axis=1) - self.k ** 2)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "region", _frozen(classify(lam, self.k), dtype=object))

    @classmethod
    def square(cls, R, spacing, z, params, keep=None):
        """Uniform samples of [-R, R]^2 at integer multiples of ``spacing``, in row-major order.

        ``keep`` is an optional predicate on the (n, 2) rho array selecting which modes to retain.
        """
        n = int(math.floor(R / spacing + 1e-9))
        ax = np.arange(-n, n + 1) * spacing
        p1, p2 = np.meshgrid(ax, ax, indexing="ij")
        rho = np.column_stack([p1.ravel(), p2.ravel()])
        if keep is not None:
            rho = rho[np.asarray(keep(rho), bool)]
        if params.d < np.max(z):
            raise ParameterError("z samples exceed the slab depth")
        return cls(rho, spacing, z, params.k)

    @property
    def n_rho(self):
        return self.rho.shape[0]

    @property
    def rho2(self):
        return self.lam + self.k ** 2

    def subset(self, mask):
        return ModeGrid(self.rho[mask], self.spacing, self.z, self.k)

    def z_index(self, z0, atol=1e-12):
        i = int(np.argmin(np.abs(self.z - z0)))
        if abs(self.z[i] - z0) > atol:
            raise ParameterError(f"z0={z0} is not a depth sample of this grid")
        return i


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: ModeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        shape = (self.grid.n_rho, self.grid.z.size)
        if v.shape != shape:
            raise ParameterError(f"field shape {v.shape} does not match grid {shape}")
        if not np.all(np.isfinite(v)):
            raise DataError("spectral field contains non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def at(self, z0):
        return self.values[:, self.grid.z_index(z0)]

    def __add__(self, other):
        return SpectralField(self.grid, self.values + other.values)

    def __sub__(self, other):
        return SpectralField(self.grid, self.values - other.values)

    def scaled(self, a):
        return SpectralField(self.grid, a * self.values)


def zeros(grid):
    return SpectralField(grid, np.zeros((grid.n_rho, grid.z.size), complex))


@dataclass(frozen=True, eq=False)
class CauchyData:
    """Spectral Cauchy data on ``grid``.

    ``f_hat(s)`` maps a 1D array of depths to an (n_rho, len(s)) complex array.
    """
    grid: ModeGrid
    g_hat: np.ndarray
    f_hat: Optional[Callable] = None
    h_hat: Optional[np.ndarray] = None

    def __post_init__(self):
        n = self.grid.n_rho
        g = _frozen(np.broadcast_to(np.asarray(self.g_hat, complex), (n,)), complex)
        h = np.zeros(n, complex) if self.h_hat is None else np.broadcast_to(np.asarray(self.h_hat, complex), (n,))
        object.__setattr__(self, "g_hat", g)
        object.__setattr__(self, "h_hat", _frozen(h, complex))
        if self.f_hat is None:
            object.__setattr__(self, "f_hat", lambda s: np.zeros((n, np.size(s)), complex))

    def forcing(self, s):
        s = np.atleast_1d(np.asarray(s, float))
        v = np.asarray(self.f_hat(s), complex)
        v = np.broadcast_to(v, (self.grid.n_rho, s.size))
        if not np.all(np.isfinite(v)):
            raise DataError("forcing spectrum returned non-finite values")
        return v

    def restricted(self, mask):
        """The same data on the modes selected by ``mask``."""
        mask = np.asarray(mask)
        f = self.f_hat
        return CauchyData(self.grid.subset(mask), self.g_hat[mask],
                          lambda s: np.broadcast_to(np.asarray(f(s), complex), (self.grid.n_rho, np.size(s)))[mask],
                          self.h_hat[mask])

    def masked(self, keep):
        """Same grid, data zeroed on modes where ``keep`` is false."""
        keep = np.asarray(keep, bool)
        f = self.f_hat
        return CauchyData(self.grid, np.where(keep, self.g_hat, 0),
                          lambda s: np.where(keep[:, None], f(s), 0), np.where(keep, self.h_hat, 0))


def separable_forcing(spatial, profile):
    """Forcing spectrum of the form spatial(rho) * profile(s)."""
    spatial = np.asarray(spatial, complex)
    return lambda s: spatial[:, None] * np.asarray(profile(np.asarray(s, float)))[None, :]


def parseval_norm(field, z_index):
    """sqrt(spacing^2 * sum |v|^2) at one depth, summed with math.fsum in the grid's row-major order."""
    v = field.values[:, z_index]
    scale = float(np.max(np.abs(v))) if v.size else 0.0
    if scale == 0.0 or not math.isfinite(scale):
        return field.grid.spacing * scale
    # rescale by a power of two (exact) so tiny or huge fields neither underflow nor overflow
    e = math.frexp(scale)[1]
    re, im = np.ldexp(v.real, -e), np.ldexp(v.imag, -e)
    return field.grid.spacing * math.ldexp(math.sqrt(math.fsum((re * re + im * im).tolist())), e)


def fourier_coeff_rect(fn, c, rho, order=10):
    """int_{(0,c)^2} fn(x, y) exp(-2 pi i <rho, (x, y)>) dx dy by tensor composite Gauss-Legendre.

    ``rho`` is a 2-vector or an (n, 2) array. Each axis is split into
    ceil(4 |rho|_inf c + 1) equal panels (using the largest |rho|_inf of the batch),
    which keeps every panel below a quarter period of the oscillating factor.
    ``fn`` is called once on the tensor grid of nodes with broadcastable x and y.
    """
    rho = np.asarray(rho, float)
    single = rho.ndim == 1
    rho = np.atleast_2d(rho)
    rule = legendre_rule(order)
    panels = int(math.ceil(4 * np.max(np.abs(rho)) * c + 1))
    x, w = composite(0.0, c, rule, panels)
    F = np.asarray(fn(x[:, None], x[None, :]), dtype=complex)
    F = np.broadcast_to(F, (x.size, x.size))
    if not np.all(np.isfinite(F)):
        raise DataError("fn returned a non-finite sample")
    e1 = w[None, :] * np.exp(-2j * np.pi * rho[:, :1] * x[None, :])
    e2 = w[None, :] * np.exp(-2j * np.pi * rho[:, 1:] * x[None, :])
    out = np.sum((e1 @ F) * e2, axis=1)
    return out[0] if single else out
