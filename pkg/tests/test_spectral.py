import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helmcauchy.errors import DataError, ParameterError
from helmcauchy.illposed import BlowupFamily
from helmcauchy.quadrature import integrate, legendre_rule
from helmcauchy.spectral import (A1, A2, A3, CauchyData, ModeGrid, SpectralField, WaveParams,
                                 fourier_coeff_rect, lambda_of, parseval_norm, separable_forcing, zeros)

P = WaveParams(1 / 3, 0.5)


def test_wave_params():
    assert P.small_kd
    assert not WaveParams(math.sqrt(5), math.pi / math.sqrt(3)).small_kd
    for k, d in [(0, 1), (1, 0), (-1, 1), (float("nan"), 1)]:
        with pytest.raises(ParameterError):
            WaveParams(k, d)


def test_lambda_examples():
    assert lambda_of((P.k, 0), P) == 0
    assert lambda_of((1, 1), P) == pytest.approx(17 / 9, rel=1e-15)
    assert lambda_of((0.1, 0.1), P) < 0


def test_regions_on_grid():
    rho = np.array([[1 / 3, 0], [1, 1], [0.1, 0.1], [0, 0]])
    g = ModeGrid(rho, 0.1, [0.0, 0.5], P.k)
    assert list(g.region) == [A2, A1, A3, A3]


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.05, 3))
def test_region_trichotomy_and_symmetry(r1, r2, k):
    g = ModeGrid([[r1, r2], [-r1, -r2]], 0.1, [0.0], k)
    assert g.region[0] == g.region[1]
    lam = r1 * r1 + r2 * r2 - k * k
    want = A2 if abs(lam) <= 1e-12 * max(1, k * k) else (A1 if lam > 0 else A3)
    assert g.region[0] == want


def test_grid_invariants():
    with pytest.raises(ParameterError):
        ModeGrid([[0, 0]], 0.1, [0.2, 0.1], 1.0)
    with pytest.raises(ParameterError):
        ModeGrid([[0, 0]], 0.1, [-0.1, 0.1], 1.0)
    g = ModeGrid.square(1.0, 0.5, [0.0, 0.25], P)
    assert g.n_rho == 25
    # row-major: first coordinate varies slowest
    assert tuple(g.rho[0]) == (-1.0, -1.0) and tuple(g.rho[1]) == (-1.0, -0.5)
    with pytest.raises(ValueError):
        g.rho[0, 0] = 3.0


def test_field_invariants():
    g = ModeGrid.square(1.0, 0.5, [0.0, 0.25], P)
    with pytest.raises(ParameterError):
        SpectralField(g, np.zeros((3, 2)))
    with pytest.raises(DataError):
        SpectralField(g, np.full((25, 2), np.inf))
    f = zeros(g)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1


def test_parseval_examples():
    g = ModeGrid.square(1.0, 0.25, [0.0], P)
    assert parseval_norm(zeros(g), 0) == 0
    v = np.zeros((g.n_rho, 1), complex)
    v[7, 0] = 3 - 4j
    assert parseval_norm(SpectralField(g, v), 0) == pytest.approx(0.25 * 5, rel=1e-15)


@pytest.mark.parametrize("n", [2, 5])
def test_parseval_blowup_data_converges(n):
    fam = BlowupFamily(n, P)
    errs = []
    for m in (5, 20, 80):
        grid = fam.grid(m)
        f = SpectralField(grid, np.full((grid.n_rho, 1), fam.g_amp))
        errs.append(abs(parseval_norm(f, 0) - 1 / math.sqrt(n)))
    assert errs[-1] < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.integers(0, 1000))
def test_parseval_homogeneous(ar, ai, seed):
    rng = np.random.default_rng(seed)
    g = ModeGrid.square(1.0, 0.25, [0.0], P)
    v = rng.normal(size=(g.n_rho, 1)) + 1j * rng.normal(size=(g.n_rho, 1))
    a = complex(ar, ai)
    n1 = parseval_norm(SpectralField(g, v), 0)
    n2 = parseval_norm(SpectralField(g, a * v), 0)
    assert n2 == pytest.approx(abs(a) * n1, rel=1e-13, abs=1e-300)


def test_fourier_coeff_examples():
    assert fourier_coeff_rect(lambda x, y: 1 + 0 * x * y, 1, (0, 0)) == pytest.approx(1, abs=1e-15)
    assert fourier_coeff_rect(lambda x, y: x * y, 1, (0, 0)) == pytest.approx(0.25, abs=1e-15)


def test_fourier_coeff_against_trapezoid_oracle():
    got = fourier_coeff_rect(lambda x, y: x * y, 1, (1, 0), order=10)
    n = 10 ** 6
    t = np.linspace(0, 1, n + 1)
    w = np.full(n + 1, 1 / n)
    w[[0, -1]] /= 2
    # xy is separable: the 2D trapezoid rule factors into two 1D sums
    oracle = np.sum(w * t * np.exp(-2j * np.pi * t)) * np.sum(w * t)
    assert abs(got - oracle) <= 1e-8 * abs(oracle)


def test_fourier_coeff_zero_frequency_is_plain_integral():
    rng = np.random.default_rng(11)
    rule = legendre_rule(10)
    for _ in range(3):
        c = rng.normal(size=(4, 4))
        fn = lambda x, y, c=c: np.polynomial.polynomial.polyval2d(*np.broadcast_arrays(x, y), c)
        want = integrate(lambda x: integrate(lambda y: fn(x[:, None], y), 0, 2.0, rule), 0, 2.0, rule)
        assert abs(fourier_coeff_rect(fn, 2.0, (0, 0)) - want) <= 1e-10 * max(1, abs(want))


@settings(max_examples=30, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4))
def test_fourier_coeff_conjugate_symmetry(r1, r2):
    fn = lambda x, y: np.exp(x) * np.cos(3 * y) + x * y
    a = fourier_coeff_rect(fn, 1.0, (r1, r2))
    b = fourier_coeff_rect(fn, 1.0, (-r1, -r2))
    assert abs(a - np.conj(b)) <= 1e-12 * max(1, abs(a))


def test_fourier_coeff_batch_matches_single():
    rho = np.array([[0.3, -1.2], [2.0, 0.5], [0, 0]])
    fn = lambda x, y: x * y ** 2
    batch = fourier_coeff_rect(fn, 1.0, rho)
    for r, b in zip(rho, batch):
        assert abs(fourier_coeff_rect(fn, 1.0, r) - b) < 1e-13


def test_fourier_coeff_rejects_nonfinite():
    with pytest.raises(DataError):
        fourier_coeff_rect(lambda x, y: np.full(np.broadcast(x, y).shape, np.inf), 1.0, (0, 0))


def test_cauchy_data():
    g = ModeGrid.square(1.0, 0.5, [0.0, 0.25], P)
    spatial = np.arange(g.n_rho, dtype=float)
    data = CauchyData(g, 1.0, separable_forcing(spatial, lambda s: s ** 2))
    assert data.g_hat.shape == (g.n_rho,) and np.all(data.h_hat == 0)
    np.testing.assert_allclose(data.forcing([0.5])[:, 0], spatial / 4)
    sub = data.restricted(g.region == A1)
    assert sub.forcing([1.0]).shape == (sub.grid.n_rho, 1)
    with pytest.raises(DataError):
        CauchyData(g, 0, lambda s: np.full((g.n_rho, np.size(s)), np.nan)).forcing([0.1])
