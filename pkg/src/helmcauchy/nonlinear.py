"""Regularized mild solutions for forcing F(u) = f(u) - k^2 u with globally Lipschitz f.

In Fourier variables the problem is  u'' - |rho|^2 u = F(u)  with u(d) = g, u'(d) = h,
and its integral form is u = G(u) with

    G(w)(z) = g C(d-z) + h S(d-z) + int_z^d S(s-z) F(w)(s) ds,   lambda_0 = |rho|^2,

restricted to the cutoff disk. Two solvers are provided: Picard iteration on a
Nystrom discretization of G, and the first-order backward marching scheme.
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import ConvergenceError, ParameterError
from .kernels import chc, shc
from .quadrature import composite
from .spectral import SpectralField
from .truncation import RegParams, cutoff_mask


@dataclass(frozen=True)
class LipschitzForcing:
    """Spectral action of F, applied mode by mode.

    ``eval(w, s, modes)`` receives values w of shape (len(modes), len(s)) at depths s
    for the grid modes with indices ``modes`` and returns F(w) of the same shape.
    """
    eval: Callable
    L_f: float
    k: float

    @property
    def ell_f(self):
        return self.L_f + self.k ** 2

    def __call__(self, w, s, modes):
        return self.eval(w, s, modes)

    @classmethod
    def affine(cls, k, source=None, coeff=0.0):
        """F(w) = (coeff - k^2) w + source(s)[modes]; here f(u) = coeff*u + source, L_f = |coeff|."""
        c = coeff - k * k

        def ev(w, s, modes):
            out = c * np.asarray(w, complex)
            if source is not None:
                out = out + np.asarray(source(s), complex)[modes]
            return out
        return cls(ev, abs(coeff), k)


@dataclass(frozen=True)
class NonlinearRegSetup:
    reg: RegParams
    Q: Optional[float] = None
    max_iters: int = 500
    fp_tol: float = 1e-10
    M: int = 50
    panels: int = 10
    chunk_bytes: float = 4e7

    def __post_init__(self):
        if self.max_iters < 1:
            raise ParameterError("max_iters must be at least 1")
        if self.M < 1:
            raise ParameterError("the marching step count M must be at least 1")
        if self.panels < 1:
            raise ParameterError("panels must be at least 1")


# ---- Nystrom discretization of the depth integral -----------------------

def depth_nodes(d, rule, panels):
    """Composite Gauss-Legendre nodes and weights on [0, d]."""
    return composite(0.0, d, rule, panels)


def _lagrange_matrix(xp, y):
    """L[r, j] = j-th Lagrange basis polynomial through xp evaluated at y[r]."""
    L = np.ones((y.size, xp.size))
    for j in range(xp.size):
        for m in range(xp.size):
            if m != j:
                L[:, j] *= (y - xp[m]) / (xp[j] - xp[m])
    return L


def _weights(lam0, targets, d, rule, panels):
    """W[m, t, j] with int_t^d S(s-t; lam0[m]) F(s) ds ~ sum_j W[m, t, j] F(x_j).

    F is the piecewise polynomial interpolant through the nodes of each panel.
    Whole panels above t use the rule directly; the panel containing t is handled
    by mapping the rule onto [t, b] and interpolating from that panel's nodes.
    """
    q = rule.order
    edges = np.linspace(0.0, d, panels + 1)
    x, w = depth_nodes(d, rule, panels)
    W = np.zeros((lam0.size, targets.size, x.size))
    for it, t in enumerate(targets):
        p = min(int(np.searchsorted(edges, t, side="right")) - 1, panels - 1)
        p = max(p, 0)
        above = slice((p + 1) * q, x.size)
        W[:, it, above] = w[None, above] * shc((x[above] - t)[None, :], lam0[:, None])
        b = edges[p + 1]
        if b > t:
            y, v = rule.mapped(t, b)
            own = slice(p * q, (p + 1) * q)
            L = _lagrange_matrix(x[own], y)
            K = v[None, :] * shc((y - t)[None, :], lam0[:, None])
            W[:, it, own] = K @ L
    return W


def _base(data_g, data_h, lam0, targets, d):
    t = d - targets[None, :]
    return data_g[:, None] * chc(t, lam0[:, None]) + data_h[:, None] * shc(t, lam0[:, None])


def apply_G(w, data, setup, forcing, grid, params, rule, targets=None):
    """One application of G.

    ``w`` holds values at the Nystrom depth nodes (``depth_nodes(d, rule, setup.panels)``);
    either a SpectralField on such a grid or an (n_rho, n_nodes) array. The result is
    returned at ``targets`` (default: the nodes) as an array, zero outside the cutoff disk.
    """
    d = params.d
    x, _ = depth_nodes(d, rule, setup.panels)
    vals = np.asarray(getattr(w, "values", w), complex)
    if vals.shape != (grid.n_rho, x.size):
        raise ParameterError(f"w must hold {x.size} depth-node values per mode, got shape {vals.shape}")
    targets = x if targets is None else np.atleast_1d(np.asarray(targets, float))
    keep = np.flatnonzero(cutoff_mask(grid, setup.reg))
    out = np.zeros((grid.n_rho, targets.size), complex)
    for idx in _chunks(keep, targets.size * x.size, setup.chunk_bytes):
        lam0 = grid.rho2[idx]
        W = _weights(lam0, targets, d, rule, setup.panels)
        Fw = forcing(vals[idx], x, idx)
        out[idx] = _base(data.g_hat[idx], data.h_hat[idx], lam0, targets, d) + np.einsum("mtj,mj->mt", W, Fw)
    return out


def _chunks(idx, per_mode, budget):
    size = max(1, int(budget // (8 * per_mode)))
    for start in range(0, idx.size, size):
        yield idx[start:start + size]


def _depth_norm(diff, spacing):
    """max over depths of sqrt(spacing^2 sum_rho |diff|^2)."""
    if diff.size == 0:
        return 0.0
    per_depth = [math.fsum(col.tolist()) for col in (diff.real ** 2 + diff.imag ** 2).T]
    return spacing * math.sqrt(max(per_depth))


def fixed_point_solve(data, setup, forcing, grid, params, rule, return_history=False):
    """Picard iteration w <- G(w) from w0 = G(0) on the Nystrom nodes.

    Modes are independent, so they are processed in chunks, each iterated until its
    share of the residual is below fp_tol / sqrt(n_chunks). Returns the field at
    ``grid.z``, the iteration count (max over chunks) and the final residual
    max_z |w - G(w)| measured on the nodes over all modes.
    """
    d = params.d
    x, _ = depth_nodes(d, rule, setup.panels)
    targets = np.concatenate([x, grid.z])
    nx = x.size
    keep = np.flatnonzero(cutoff_mask(grid, setup.reg))
    out = np.zeros((grid.n_rho, grid.z.size), complex)
    nodes = np.zeros((grid.n_rho, nx), complex)
    chunks = list(_chunks(keep, targets.size * nx, setup.chunk_bytes))
    tol = setup.fp_tol / math.sqrt(max(len(chunks), 1))
    iters = 0
    history = []
    for idx in chunks:
        lam0 = grid.rho2[idx]
        W = _weights(lam0, targets, d, rule, setup.panels)
        base = _base(data.g_hat[idx], data.h_hat[idx], lam0, targets, d)
        Wn, bn = W[:, :nx], base[:, :nx]
        w = bn.copy()
        hist = []
        for it in range(1, setup.max_iters + 1):
            new = bn + np.einsum("mtj,mj->mt", Wn, forcing(w, x, idx))
            res = _depth_norm(new - w, grid.spacing)
            hist.append(res)
            w = new
            if res < tol:
                break
        else:
            raise ConvergenceError(
                f"fixed point did not converge in {setup.max_iters} iterations (residual {hist[-1]:.3e})", hist)
        iters = max(iters, it)
        history.append(hist)
        nodes[idx] = w
        out[idx] = base[:, nx:] + np.einsum("mtj,mj->mt", W[:, nx:], forcing(w, x, idx))
    final = _depth_norm(nodes - apply_G(nodes, data, setup, forcing, grid, params, rule), grid.spacing)
    field = SpectralField(grid, out)
    if return_history:
        return field, iters, final, history
    return field, iters, final


def contraction_envelope(m, z, eps, params, ell_f):
    """sqrt((exp(2d/sqrt(eps)) d^2 ell_f^2)^m (d - z)^m / m!), the m-step Lipschitz factor of G."""
    d = params.d
    logv = m * (2 * d / math.sqrt(eps) + 2 * math.log(d) + 2 * math.log(ell_f) + math.log(max(d - z, 1e-300)))
    return math.exp(0.5 * (logv - math.lgamma(m + 1)))


# ---- backward marching ---------------------------------------------------

def volterra_march(rhat, setup, grid, params):
    """First-order backward marching for u(z) = r(z) - k^2 int_z^d S(s-z) u(s) ds.

    ``grid.z`` must be the uniform partition of [0, d] into setup.M parts. ``rhat`` is an
    (n_rho, M+1) array of r(rho, z_i), or a callable (rho2, z) -> values. The last
    column of r is the start value u_[M] = g. Modes outside the cutoff disk are zero.
    """
    M, d = setup.M, params.d
    z = grid.z
    if z.size != M + 1 or not np.allclose(z, np.linspace(0, d, M + 1), rtol=0, atol=1e-12 * d):
        raise ParameterError(f"marching needs the uniform {M + 1}-point depth grid on [0, d]")
    if callable(rhat):
        r = np.asarray(rhat(grid.rho2[:, None], z[None, :]), complex)
    else:
        r = np.asarray(rhat, complex)
    if r.shape != (grid.n_rho, M + 1):
        raise ParameterError(f"r must have shape {(grid.n_rho, M + 1)}, got {r.shape}")
    keep = cutoff_mask(grid, setup.reg)
    out = np.zeros((grid.n_rho, M + 1), complex)
    if np.any(keep):
        lam0 = np.ascontiguousarray(grid.rho2[keep])
        k2 = float(params.k ** 2)
        re = kernels.volterra_march(lam0, np.ascontiguousarray(r[keep].real), z, k2)
        im = kernels.volterra_march(lam0, np.ascontiguousarray(r[keep].imag), z, k2)
        out[keep] = re + 1j * im
    return SpectralField(grid, out)


# ---- the Gaussian test case ------------------------------------------------

def gaussian_spectrum(rho2):
    """Fourier transform of exp(-(x^2+y^2)/2): 2 pi exp(-2 pi^2 |rho|^2)."""
    return 2 * np.pi * np.exp(-2 * np.pi ** 2 * np.asarray(rho2, float))


def example2_rhat(rho, z, params, form="derived"):
    """Data-driven part r(rho, z) of the integral equation for the Gaussian test case.

    r = g C(d-z) + int_z^d S(s-z) q(s) ds with g = -2 pi e^{-2 pi^2 |rho|^2} and
    q(s) = 2 pi e^{-2 pi^2 |rho|^2} (2 - 4 pi^2 |rho|^2) cos(s pi/d).

    ``form="derived"`` evaluates that integral in closed form,
        -d^2 (cosh((d-z) a) + cos(z pi/d)) / (pi^2 + a^2 d^2),  a = |rho|.
    ``form="printed"`` uses the alternative bracket
        (pi/a) sin(z pi/d) sinh((d-z) a) - d (1 + cos(z pi/d) cosh((d-z) a))
    scaled by d (2 - 4 pi^2 |rho|^2) / (pi^2 + a^2 d^2), which does not reproduce the integral.
    ``rho`` may be a 2-vector or an array of |rho|^2 values when passed as ``rho2=``.
    """
    rho = np.asarray(rho, float)
    rho2 = np.sum(rho * rho, axis=-1) if rho.shape[-1:] == (2,) else rho
    return _rhat_from_rho2(rho2, z, params, form)


def _rhat_from_rho2(rho2, z, params, form="derived"):
    d = params.d
    rho2 = np.asarray(rho2, float)
    z = np.asarray(z, float)
    G = -gaussian_spectrum(rho2)
    ch = chc(d - z, rho2)
    cz = np.cos(z * np.pi / d)
    den = np.pi ** 2 + rho2 * d * d
    amp = 2 - 4 * np.pi ** 2 * rho2
    if form == "derived":
        return G * (ch + d * d * amp * (ch + cz) / den)
    if form == "printed":
        br = np.pi * np.sin(z * np.pi / d) * shc(d - z, rho2) - d * (1 + cz * ch)
        return G * (ch + d * amp / den * br)
    raise ParameterError(f"unknown form {form!r}")


def example2_rhat_grid(grid, params, form="derived"):
    return _rhat_from_rho2(grid.rho2[:, None], grid.z[None, :], params, form)


def example2_data(grid):
    """Cauchy data and forcing F(w) = -k^2 w + q of the Gaussian test case."""
    from .spectral import CauchyData
    gs = gaussian_spectrum(grid.rho2)
    g = -gs
    return CauchyData(grid, g), gs * (2 - 4 * np.pi ** 2 * grid.rho2)


def example2_forcing(grid, params):
    _, amp = example2_data(grid)
    d = params.d
    return LipschitzForcing.affine(params.k, lambda s: amp[:, None] * np.cos(np.asarray(s) * np.pi / d)[None, :])


def example2_exact(grid, params):
    """Spectrum of exp(-(x^2+y^2)/2) cos(z pi/d) at the grid depths."""
    return gaussian_spectrum(grid.rho2)[:, None] * np.cos(grid.z * np.pi / params.d)[None, :]


def thm17_error_bound(z, delta, Q, ell_f, params):
    """(sqrt(Q) e^{d^2 ell^2 (d-z)/2} + sqrt(3(d^2+1)) e^{3 d^2 ell^2 (d-z)/2}) delta^(z/d)."""
    d = params.d
    if not 0 < z <= d:
        raise ParameterError("z must lie in (0, d]")
    if not 0 < delta < 1:
        raise ParameterError("delta must lie in (0, 1)")
    if not Q > 0:
        raise ParameterError("Q must be positive")
    e = d * d * ell_f ** 2 * (d - z)
    return (math.sqrt(Q) * math.exp(0.5 * e) + math.sqrt(3 * (d * d + 1)) * math.exp(1.5 * e)) * delta ** (z / d)
