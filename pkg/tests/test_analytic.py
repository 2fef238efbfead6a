import math

import numpy as np
import pytest

from helmcauchy.analytic import (a2_solution_hat, exact_uhat, u1_hat_homogeneous, w1_hat, w2_hat,
                                 wellposed_bound)
from helmcauchy.errors import ParameterError, ValidityError
from helmcauchy.quadrature import legendre_rule
from helmcauchy.spectral import A2, CauchyData, ModeGrid, WaveParams, fourier_coeff_rect, zeros
from oracles import fd_cauchy, fd_neumann_bvp

P = WaveParams(1 / 3, 0.5)
HI = legendre_rule(30)


def single(lam, z, params=P):
    """Grid with one mode whose lambda is ``lam``."""
    r2 = lam + params.k ** 2
    return ModeGrid([[math.sqrt(r2), 0.0]], 1.0, z, params.k)


def rel(a, b):
    return np.max(np.abs(a - b)) / np.max(np.abs(b))


# ---- u1 -------------------------------------------------------------------

def test_u1_zero_and_a2():
    g = single(0.0, [0.1, 0.5])
    assert np.all(u1_hat_homogeneous([0], g, P).values == 0)
    assert g.region[0] == A2
    assert u1_hat_homogeneous([1.0], g, P).values[0, -1] == pytest.approx(0.5, rel=1e-15)


@pytest.mark.parametrize("lam", [3.0, 40.0, -0.05])
def test_u1_against_bvp(lam):
    rng = np.random.default_rng(int(abs(lam) * 100))
    hv = complex(*rng.normal(size=2))
    zf, uf = fd_neumann_bvp(lam, hv, P.d, 10 ** 4)
    g = single(lam, zf[::500])
    u = u1_hat_homogeneous([hv], g, P).values[0]
    assert rel(u, uf[::500]) < 1e-4


def test_u1_needs_small_kd():
    p = WaveParams(4.0, 0.5)
    with pytest.raises(ValidityError):
        u1_hat_homogeneous([1.0], single(1.0, [0.1], p), p)


# ---- w1, w2, A2 ------------------------------------------------------------

def test_w1_examples():
    p = WaveParams(0.5, 1.0)
    g = single(1.0, [0.0, 1.0], p)
    v = w1_hat([1.0], g, p).values[0]
    assert v[0] == pytest.approx(1.5430806348152437, rel=1e-14)
    assert v[1] == 1.0
    gz = ModeGrid([[1, 1], [0.1, 0.0]], 0.1, [0.5], P.k)
    np.testing.assert_array_equal(w1_hat([2 + 1j, -3], gz, P).values[:, 0], [2 + 1j, -3])


@pytest.mark.parametrize("lam", [2.0, 25.0, -0.08])
def test_w1_against_fd(lam):
    zf, uf = fd_cauchy(lam, 0.7 - 0.2j, lambda z: 0 * z, P.d, 10 ** 4)
    g = single(lam, zf[::1000])
    assert rel(w1_hat([0.7 - 0.2j], g, P).values[0], uf[::1000]) < 1e-4


def test_w1_rejects_a2():
    with pytest.raises(ParameterError):
        w1_hat([1.0], single(0.0, [0.1]), P)
    with pytest.raises(ParameterError):
        w2_hat(lambda s: np.ones((1, s.size)), single(0.0, [0.1]), P, HI)


def test_w2_examples():
    p = WaveParams(0.5, 1.0)
    g = single(1.0, [0.0, 1.0], p)
    assert np.all(w2_hat(lambda s: np.zeros((1, s.size)), g, p, HI).values == 0)
    v = w2_hat(lambda s: np.ones((1, s.size)), g, p, legendre_rule(12)).values[0]
    assert v[0] == pytest.approx(1 - math.cosh(1), rel=1e-13)
    assert v[1] == 0


def test_a2_examples():
    g = single(0.0, [0.0, 0.2, 0.5])
    z = g.z
    v = a2_solution_hat([2.0], lambda s: np.zeros((1, s.size)), g, P, HI).values[0]
    np.testing.assert_array_equal(v, 2.0)
    v = a2_solution_hat([0.0], lambda s: np.ones((1, s.size)), g, P, legendre_rule(2)).values[0]
    np.testing.assert_allclose(v, -(P.d - z) ** 2 / 2, atol=1e-15)
    v = a2_solution_hat([1.0], lambda s: s[None, :], g, P, legendre_rule(5)).values[0]
    assert v[0] == pytest.approx(1 - 1 / 24, rel=1e-14)
    assert v[-1] == 1.0


# ---- exact_uhat -------------------------------------------------------------

def affine_data(grid, g, a, b):
    return CauchyData(grid, g, lambda s: (a + b * s)[None, :] * np.ones((grid.n_rho, 1)))


def test_exact_zero():
    g = ModeGrid.square(2.0, 0.5, [0.0, 0.3], P)
    assert np.all(exact_uhat(CauchyData(g, 0), g, P, HI).values == 0)


def test_exact_rejects_neumann_data():
    g = single(1.0, [0.1])
    with pytest.raises(ParameterError):
        exact_uhat(CauchyData(g, 0, h_hat=1.0), g, P, HI)


@pytest.mark.parametrize("lam", [5.0, 0.0, -0.1, 60.0])
def test_exact_against_fd_with_source(lam):
    rng = np.random.default_rng(7)
    gv, a, b = (complex(*rng.normal(size=2)) for _ in range(3))
    zf, uf = fd_cauchy(lam, gv, lambda z: a + b * z, P.d, 10 ** 4)
    g = single(lam, zf[::1000])
    u = exact_uhat(affine_data(g, gv, a, b), g, P, HI).values[0]
    assert rel(u, uf[::1000]) < 1e-4


def ex1_grid(z):
    g = ModeGrid.square(3.0, 0.5, z, P)
    X = fourier_coeff_rect(lambda x, y: x * y, 1.0, g.rho)
    p = lambda s: (s - 0.5) ** 2 * (12 + (s - 0.5) ** 2 / 9)
    data = CauchyData(g, 0, lambda s: -X[:, None] * p(s)[None, :])
    return g, X, data


def test_example1_spectrum_relation():
    """The closed form (z-1/2)^4 X solves the mode equation only at rho = 0; elsewhere the
    computed solution differs by -|rho|^2 X int_z^d (s-1/2)^4 S(z-s) ds."""
    z = np.array([0.05, 0.1, 0.25, 0.4])
    g, X, data = ex1_grid(z)
    u = exact_uhat(data, g, P, HI).values
    closed = X[:, None] * ((z - 0.5) ** 4)[None, :]
    zero = np.flatnonzero(np.all(g.rho == 0, axis=1))[0]
    np.testing.assert_allclose(u[zero], closed[zero], rtol=1e-12)
    corr = w2_hat(lambda s: (g.rho2 * X)[:, None] * ((s - 0.5) ** 4)[None, :], g, P, HI).values
    a1 = g.region == "A1"
    err = np.abs(u - (closed - corr))[a1] / np.max(np.abs(u[a1]))
    assert np.max(err) < 1e-6
    # and the closed form alone is far off on A1 modes away from the origin
    assert np.max(np.abs(u - closed)[a1]) > 1e-3 * np.max(np.abs(u[a1]))


def test_superposition():
    rng = np.random.default_rng(2)
    g = ModeGrid.square(2.0, 0.5, [0.0, 0.2, 0.45], P)
    gh = rng.normal(size=g.n_rho) + 1j * rng.normal(size=g.n_rho)
    c = rng.normal(size=(g.n_rho, 3))
    f = lambda s: c[:, :1] + c[:, 1:2] * s + c[:, 2:] * s ** 2
    full = exact_uhat(CauchyData(g, gh, f), g, P, HI).values
    part = exact_uhat(CauchyData(g, gh), g, P, HI).values + exact_uhat(CauchyData(g, 0, f), g, P, HI).values
    assert np.max(np.abs(full - part)) <= 1e-12 * np.max(np.abs(full))


@pytest.mark.parametrize("lam", [3.0, -0.09])
def test_ode_residual_second_order(lam):
    z0 = 0.2
    f = lambda s: np.cos(3 * s)[None, :] + 0j
    res = []
    for h in (2e-2, 1e-2):
        g = single(lam, [z0 - h, z0, z0 + h])
        u = exact_uhat(CauchyData(g, 0.4, f), g, P, HI).values[0]
        res.append(abs((u[2] - 2 * u[1] + u[0]) / h ** 2 - lam * u[1] + f(np.array([z0]))[0, 0]))
    assert 3.0 < res[0] / res[1] < 5.0


@pytest.mark.parametrize("lam", [3.0, -0.09, 0.0])
def test_neumann_condition_at_top(lam):
    f = lambda s: (1 + s)[None, :] + 0j
    slopes = []
    for h in (1e-3, 5e-4):
        g = single(lam, [P.d - h, P.d])
        u = exact_uhat(CauchyData(g, 0.4, f), g, P, HI).values[0]
        assert u[1] == pytest.approx(0.4, rel=1e-12)
        slopes.append(abs((u[1] - u[0]) / h))
    assert slopes[1] < 0.6 * slopes[0]


@pytest.mark.parametrize("lam", [1e-3, -1e-3, 1e-6, -1e-6])
def test_a2_continuity(lam):
    z = [0.0, 0.25]
    f = lambda s: (2 - s)[None, :] + 0j
    near = exact_uhat(CauchyData(single(lam, z), 1.3, f), single(lam, z), P, HI).values[0]
    lim = a2_solution_hat([1.3], f, single(0.0, z), P, HI).values[0]
    assert np.max(np.abs(near - lim)) < 2 * abs(lam)


def test_wellposed_bound():
    assert wellposed_bound(0, 0, P) == 0
    assert math.tan(1 / 6) / (1 / 3) < 1
    assert wellposed_bound(2.0, 3.0, P) == pytest.approx(4 + 0.5 * 9, rel=1e-15)
    assert wellposed_bound(4.0, 6.0, P) == pytest.approx(4 * wellposed_bound(2.0, 3.0, P), rel=1e-15)
    with pytest.raises(ValidityError):
        wellposed_bound(1, 1, WaveParams(4.0, 0.5))


def test_stable_modes_respect_wellposed_bound():
    p = WaveParams(1.2, 0.5)
    rng = np.random.default_rng(5)
    g = ModeGrid.square(1.2, 0.1, np.linspace(0, p.d, 41)[:-1] + p.d / 80, p)
    g = g.subset(g.region != "A1")
    gh = rng.normal(size=g.n_rho) + 1j * rng.normal(size=g.n_rho)
    c = rng.normal(size=g.n_rho)
    f = lambda s: c[:, None] * np.cos(5 * s)[None, :]
    u = exact_uhat(CauchyData(g, gh, f), g, p, HI).values
    h2 = g.spacing ** 2
    dz = p.d / 40
    u_norm2 = h2 * dz * np.sum(np.abs(u) ** 2)
    g_norm2 = h2 * np.sum(np.abs(gh) ** 2)
    f_norm2 = h2 * np.sum(c ** 2) * (p.d / 2 + math.sin(10 * p.d) / 20)
    assert u_norm2 <= wellposed_bound(math.sqrt(g_norm2), math.sqrt(f_norm2), p)


def test_overflow_names_mode():
    g = ModeGrid([[0, 0], [2000.0, 0]], 1.0, [0.0], P.k)
    with pytest.raises(ValidityError, match="mode 1"):
        exact_uhat(CauchyData(g, 1.0), g, P, HI)
