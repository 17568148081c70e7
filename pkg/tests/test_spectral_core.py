import numpy as np
import pytest

from bathyhom.spectral_core import (PeriodicGrid1D, dealias, dealias_mask, dealias_spectrum,
                               fourier_shift, helmholtz_inverse, spectral_antiderivative,
                               spectral_derivative, spectral_energy)


@pytest.fixture
def grid():
    return PeriodicGrid1D(64, 2 * np.pi, 0.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        PeriodicGrid1D(7, 1.0)
    with pytest.raises(ValueError):
        PeriodicGrid1D(6, 1.0)
    with pytest.raises(ValueError):
        PeriodicGrid1D(16, -1.0)
    g = PeriodicGrid1D.from_bounds(16, -2.0, 6.0)
    assert g.x[0] == -2.0 and g.x_max == 6.0 and g.dx == 0.5


def test_derivative_of_sine(grid):
    x = grid.x
    np.testing.assert_allclose(spectral_derivative(np.sin(3 * x), grid), 3 * np.cos(3 * x),
                               atol=1e-12)
    np.testing.assert_allclose(spectral_derivative(np.sin(3 * x), grid, order=2),
                               -9 * np.sin(3 * x), atol=1e-11)


def test_derivative_of_constant_is_zero(grid):
    assert np.max(np.abs(spectral_derivative(np.full(grid.n, 2.5), grid))) < 1e-14


def test_nyquist_dropped_for_odd_orders(grid):
    nyq = np.cos(grid.n // 2 * grid.x)
    assert np.max(np.abs(spectral_derivative(nyq, grid))) < 1e-12


def test_derivative_along_axis(grid):
    x = grid.x
    f = np.stack([np.sin(x), np.cos(2 * x)], axis=0)
    d = spectral_derivative(f.T, grid, axis=0)
    np.testing.assert_allclose(d[:, 1], -2 * np.sin(2 * x), atol=1e-12)


def test_fd_oracle_second_order():
    # central differences converge to the spectral derivative at rate 2
    errs = []
    for n in (64, 128, 256):
        g = PeriodicGrid1D(n, 10.0)
        f = np.exp(np.sin(2 * np.pi * g.x / 10.0))
        fd = (np.roll(f, -1) - np.roll(f, 1)) / (2 * g.dx)
        errs.append(np.max(np.abs(fd - spectral_derivative(f, g))))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(rates - 2.0) < 0.1)


def test_antiderivative_inverts_derivative(grid):
    x = grid.x
    f = np.sin(x) + 0.3 * np.cos(5 * x)
    np.testing.assert_allclose(spectral_derivative(spectral_antiderivative(f, grid), grid),
                               f, atol=1e-13)


def test_helmholtz_inverse_single_mode(grid):
    x = grid.x
    c = 0.1
    out = helmholtz_inverse(np.cos(4 * x), grid, c)
    np.testing.assert_allclose(out, np.cos(4 * x) / (1 + c * 16), atol=1e-14)
    np.testing.assert_array_equal(helmholtz_inverse(np.cos(x), grid, 0.0), np.cos(x))
    with pytest.raises(ValueError):
        helmholtz_inverse(np.cos(x), grid, -1.0)


def test_dealias_mask_two_thirds():
    m = dealias_mask(12)
    assert list(np.nonzero(m)[0]) == [0, 1, 2, 3]


def test_dealias_removes_high_modes(grid):
    x = grid.x
    low, high = np.sin(3 * x), np.sin(30 * x)
    np.testing.assert_allclose(dealias(low + high), low, atol=1e-14)


def test_dealias_spectrum_idempotent_bitwise(grid):
    rng = np.random.default_rng(1)
    fhat = np.fft.rfft(rng.standard_normal(grid.n))
    once = dealias_spectrum(fhat, grid.n)
    np.testing.assert_array_equal(dealias_spectrum(once, grid.n), once)


def test_dealias_field_idempotent_to_roundoff():
    rng = np.random.default_rng(2)
    f = rng.standard_normal((32, 16))
    once = dealias(f)
    np.testing.assert_allclose(dealias(once), once, atol=1e-14)


def test_spectral_energy_parseval(grid):
    rng = np.random.default_rng(3)
    f = rng.standard_normal(grid.n)
    assert spectral_energy(f) == pytest.approx(np.sum(f ** 2), rel=1e-13)


def test_fourier_shift(grid):
    x = grid.x
    np.testing.assert_allclose(fourier_shift(np.sin(2 * x), grid, 0.4), np.sin(2 * (x - 0.4)),
                               atol=1e-13)


def test_mismatched_field_rejected(grid):
    with pytest.raises(ValueError):
        spectral_derivative(np.zeros(grid.n + 2), grid)
