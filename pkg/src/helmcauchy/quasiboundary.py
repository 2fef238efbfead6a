"""Quasi-boundary regularization combined with the spectral cutoff, used as a comparison method."""
from dataclasses import dataclass

import numpy as np

from .analytic import _check_growth
from .errors import ParameterError
from .kernels import chc, shc
from .spectral import A1, SpectralField
from .truncation import RegParams, cutoff_mask


@dataclass(frozen=True)
class QuasiBoundaryParams:
    alpha: float
    reg: RegParams

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ParameterError(f"alpha must be nonnegative, got {self.alpha}")

    @classmethod
    def from_reg(cls, reg):
        """alpha = delta / M0."""
        if reg.M0 is None:
            raise ParameterError("alpha = delta/M0 needs M0")
        return cls(reg.delta / reg.M0, reg)


def xiong_uhat(data_delta, grid, params, qb, rule):
    """Quasi-boundary solution on the modes with lambda > 0 inside the cutoff disk, zero elsewhere.

      g C(d-z) / (1 + alpha cosh(d a))
        - int_z^d f(s) [S(s-z) - alpha S(2d-s+z)] / (1 + alpha sinh(d a)) ds,   a = sqrt(lambda)
    """
    keep = cutoff_mask(grid, qb.reg) & (grid.region == A1)
    out = np.zeros((grid.n_rho, grid.z.size), complex)
    if not np.any(keep):
        return SpectralField(grid, out)
    d, al = params.d, qb.alpha
    sub = data_delta.restricted(keep)
    lam = grid.lam[keep]
    _check_growth(sub.grid, 2 * d)
    a = np.sqrt(lam)
    den_g = 1 + al * np.cosh(d * a)
    den_f = 1 + al * np.sinh(d * a)
    for iz, z in enumerate(grid.z):
        val = sub.g_hat * chc(d - z, lam) / den_g
        if z < d:
            s, w = rule.mapped(z, d)
            ker = shc((s - z)[None, :], lam[:, None]) - al * shc((2 * d - s + z)[None, :], lam[:, None])
            val = val - np.sum(w[None, :] * sub.forcing(s) * ker, axis=1) / den_f
        out[keep, iz] = val
    return SpectralField(grid, out)
