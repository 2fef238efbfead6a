"""Mode-by-mode closed-form solutions of the Helmholtz Cauchy problem.

For each frequency rho the depth profile solves  u'' - lambda u = -f_hat  on [0, d]
with u(d) = g_hat and u'(d) = 0 (the Neumann datum h is treated separately by
``u1_hat_homogeneous``), lambda = |rho|^2 - k^2.
"""
import math

import numpy as np

from .errors import ParameterError, ValidityError
from .kernels import chc, shc, shc_weighted_sum
from .spectral import A2, SpectralField

# exp overflows just above 709.78
_EXP_LIMIT = 709.0


def _check_growth(grid, span, lam=None):
    """Raise ValidityError if cosh/sinh of span*sqrt(lambda) would overflow for some mode."""
    lam = grid.lam if lam is None else lam
    arg = span * np.sqrt(np.maximum(lam, 0.0))
    if arg.size and np.max(arg) > _EXP_LIMIT:
        m = int(np.argmax(arg))
        raise ValidityError(
            f"mode {m} (rho={tuple(grid.rho[m])}) grows like exp({arg[m]:.1f}) and overflows double precision; "
            "apply a cutoff first")


def _require_no_a2(grid, what):
    if np.any(grid.region == A2):
        m = int(np.flatnonzero(grid.region == A2)[0])
        raise ParameterError(f"{what} is undefined on A2 mode {m} (|rho| = k); use a2_solution_hat")


def u1_hat_homogeneous(h_hat, grid, params):
    """Solution of u'' = lambda u, u(0) = 0, u'(d) = h: h * S(z) / C(d)."""
    if not params.small_kd:
        raise ValidityError("k*d >= pi/2: the cosine denominator can vanish on A3 modes")
    _check_growth(grid, params.d)
    h = np.asarray(h_hat, complex).reshape(-1)
    lam = grid.lam[:, None]
    v = h[:, None] * shc(grid.z[None, :], lam) / chc(params.d, lam)
    return SpectralField(grid, v)


def w1_hat(g_hat, grid, params):
    """g * C(d - z): the part driven by the Cauchy value at z = d."""
    _require_no_a2(grid, "w1_hat")
    _check_growth(grid, params.d - grid.z[0] if grid.z.size else 0.0)
    g = np.asarray(g_hat, complex).reshape(-1)
    v = g[:, None] * chc(params.d - grid.z[None, :], grid.lam[:, None])
    return SpectralField(grid, v)


def _w2_values(lam, forcing, z, d, rule, panels=1):
    out = np.zeros((lam.size, z.size), complex)
    for iz, zz in enumerate(z):
        if zz >= d:
            continue
        edges = np.linspace(zz, d, panels + 1)
        s, w = rule.mapped(edges[:-1], edges[1:])
        s, w = s.ravel(), w.ravel()
        out[:, iz] = shc_weighted_sum(lam, forcing(s), s, w, float(zz))
    return out


def w2_hat(f_hat, grid, params, rule, panels=1):
    """int_z^d f_hat(s) S(z - s) ds per mode, Gauss-Legendre on [z, d] for every target z.

    ``f_hat`` is a callable s -> (n_rho, len(s)) or a CauchyData.
    """
    _require_no_a2(grid, "w2_hat")
    if grid.z.size:
        _check_growth(grid, params.d - grid.z[0])
    forcing = getattr(f_hat, "forcing", f_hat)
    return SpectralField(grid, _w2_values(grid.lam, forcing, grid.z, params.d, rule, panels))


def _a2_values(g, forcing, z, d, rule):
    out = np.empty((g.size, z.size), complex)
    for iz, zz in enumerate(z):
        s, ws = rule.mapped(zz, d)                  # outer variable on [z, d]
        gam, wg = rule.mapped(s, d)                 # inner on [s, d], shape (q, q)
        vals = forcing(gam.ravel()).reshape(g.size, *gam.shape)
        inner = np.sum(vals * wg[None], axis=2)
        # int_d^z = -int_z^d
        out[:, iz] = g - np.sum(inner * ws[None, :], axis=1)
    return out


def a2_solution_hat(g_hat, f_hat, grid, params, rule):
    """g + int_d^z int_s^d f_hat(gamma) dgamma ds, nested quadrature with the same rule."""
    forcing = getattr(f_hat, "forcing", f_hat)
    g = np.broadcast_to(np.asarray(g_hat, complex), (grid.n_rho,))
    return SpectralField(grid, _a2_values(g, forcing, grid.z, params.d, rule))


def exact_uhat(data, grid, params, rule, panels=1):
    """Assembled solution for data with h = 0: w1 + w2 on A1/A3 modes, the A2 formula on A2 modes."""
    if np.any(data.h_hat != 0):
        raise ParameterError("exact_uhat expects h = 0; add u1_hat_homogeneous for the Neumann part")
    out = np.zeros((grid.n_rho, grid.z.size), complex)
    a2 = grid.region == A2
    rest = ~a2
    if np.any(rest):
        sub = data.restricted(rest)
        lam = grid.lam[rest]
        if grid.z.size:
            _check_growth(grid.subset(rest), params.d - grid.z[0])
        out[rest] = (sub.g_hat[:, None] * chc(params.d - grid.z[None, :], lam[:, None])
                     + _w2_values(lam, sub.forcing, grid.z, params.d, rule, panels))
    if np.any(a2):
        sub = data.restricted(a2)
        out[a2] = _a2_values(sub.g_hat, sub.forcing, grid.z, params.d, rule)
    return SpectralField(grid, out)


def wellposed_bound(g_norm, f_norm, params):
    """2 d C^2 (|g|^2 + d |f|^2) with C = max(tan(dk)/k, 1), the A2/A3 stability bound."""
    if not params.small_kd:
        raise ValidityError("k*d >= pi/2: tan(dk) is unbounded")
    k, d = params.k, params.d
    C = max(math.tan(d * k) / k, 1.0)
    return 2 * d * C * C * (g_norm ** 2 + d * f_norm ** 2)
