"""Pure numpy implementations of the hot kernels.

These are the reference versions; ``_kernels.pyx`` mirrors them loop by loop.
"""
import numpy as np

SERIES_THRESHOLD = 1e-6


def shc(t, lam):
    """sinh(t*sqrt(lam))/sqrt(lam), continued through lam <= 0 as sin(t*sqrt(-lam))/sqrt(-lam).

    Broadcasts ``t`` against ``lam``. At |t|*sqrt|lam| below ``SERIES_THRESHOLD``
    a five-term Taylor series in x = t**2 * lam is used, which also covers lam == 0.
    """
    t, lam = np.broadcast_arrays(np.asarray(t, float), np.asarray(lam, float))
    x = t * t * lam
    out = np.empty(t.shape)
    small = np.abs(x) < SERIES_THRESHOLD**2
    pos = ~small & (lam > 0)
    neg = ~small & (lam < 0)
    with np.errstate(over="ignore"):
        a = np.sqrt(lam[pos])
        out[pos] = np.sinh(t[pos] * a) / a
    b = np.sqrt(-lam[neg])
    out[neg] = np.sin(t[neg] * b) / b
    xs = x[small]
    out[small] = t[small] * (1 + xs / 6 * (1 + xs / 20 * (1 + xs / 42 * (1 + xs / 72))))
    return out


def chc(t, lam):
    """cosh(t*sqrt(lam)), continued as cos(t*sqrt(-lam)) for lam < 0."""
    t, lam = np.broadcast_arrays(np.asarray(t, float), np.asarray(lam, float))
    out = np.empty(t.shape)
    pos = lam >= 0
    with np.errstate(over="ignore"):
        out[pos] = np.cosh(t[pos] * np.sqrt(lam[pos]))
    out[~pos] = np.cos(t[~pos] * np.sqrt(-lam[~pos]))
    return out


def shc_weighted_sum(lam, fvals, s, w, z):
    """sum_q w[q] * fvals[m, q] * shc(z - s[q], lam[m]) for every mode m."""
    K = shc((z - np.asarray(s))[None, :], np.asarray(lam)[:, None])
    return (K * w[None, :] * fvals).sum(axis=1)


def _is_uniform(z):
    if z.size < 3:
        return True
    dz = np.diff(z)
    return bool(np.max(np.abs(dz - dz.mean())) <= 1e-13 * abs(z[-1] - z[0]))


def volterra_march(lam0, r, z, k2):
    """Backward marching for the second-kind Volterra equation in depth.

    u[:, M] = r[:, M]; for i = M-1..0
    u[:, i] = r[:, i] - k2 * sum_{j=i}^{M-1} c_ij * u[:, j+1]
    with c_ij = (cosh((z_i-z_{j+1})a) - cosh((z_i-z_j)a)) / a**2, evaluated as
    2*shc((x+y)/2)*shc((x-y)/2) so that a -> 0 needs no special branch.
    On a uniform grid c_ij depends on j - i only and is tabulated once per mode.
    """
    lam0 = np.asarray(lam0, float)
    r = np.asarray(r, float)
    z = np.asarray(z, float)
    M = z.size - 1
    u = np.empty_like(r)
    u[:, M] = r[:, M]
    if _is_uniform(z) and M > 0:
        h = (z[M] - z[0]) / M
        tab = 2.0 * shc((-(2 * np.arange(M) + 1) * h / 2)[None, :], lam0[:, None]) * shc(-h / 2, lam0[:, None])
    for i in range(M - 1, -1, -1):
        if _is_uniform(z):
            c = tab[:, :M - i]
        else:
            x = z[i] - z[i + 1:]          # z_i - z_{j+1}, j = i..M-1
            y = z[i] - z[i:M]             # z_i - z_j
            c = 2.0 * shc(((x + y) / 2)[None, :], lam0[:, None]) * shc(((x - y) / 2)[None, :], lam0[:, None])
        # descending j, fixed order
        acc = np.zeros(lam0.size)
        for jj in range(c.shape[1] - 1, -1, -1):
            acc += c[:, jj] * u[:, i + 1 + jj]
        u[:, i] = r[:, i] - k2 * acc
    return u
