import numpy as np
import pytest

from bathyhom.bathymetry import BathymetryProfile, effective_coefficients, pwc_setup
from bathyhom.errors import SimulationError
from bathyhom.homogenized1d import (HomogenizedParams, State1D, gaussian_state,
                                  linear_frequency, rhs_homogenized, simulate_1d,
                                  ssprk3_step, stable_dt)
from bathyhom.spectral_core import PeriodicGrid1D

G = 9.81


@pytest.fixture(scope="module")
def coeffs():
    return effective_coefficients(pwc_setup())


def measured_frequency(coeffs, k_index, length=40.0, n=128, periods=1.0, dt=None):
    grid = PeriodicGrid1D(n, length)
    k = 2 * np.pi * k_index / length
    omega = float(linear_frequency(k, coeffs))
    eps = 1e-6
    eta = eps * np.cos(k * grid.x)
    q = coeffs.mean_H * omega / k * eta
    params = HomogenizedParams(coeffs, nonlinear=False)
    t_end = periods * 2 * np.pi / omega
    if dt is None:
        # keep omega*dt small so the RK3 phase error stays below 1e-6
        dt = min(stable_dt(grid, params), 0.04 / omega)
    res = simulate_1d(State1D(grid, eta, q), t_end, params, dt=dt)
    z = np.sum(res.final.eta * np.exp(1j * k * grid.x))
    z0 = np.sum(eta * np.exp(1j * k * grid.x))
    phase = np.angle(z / z0) + 2 * np.pi * periods
    return phase / t_end, omega


def test_rhs_zero_state(coeffs):
    grid = PeriodicGrid1D(32, 10.0)
    e, q = rhs_homogenized(State1D(grid, np.zeros(32), np.zeros(32)),
                           HomogenizedParams(coeffs))
    assert np.all(e == 0) and np.all(q == 0)


def test_rhs_single_mode(coeffs):
    grid = PeriodicGrid1D(64, 20.0)
    k = 2 * np.pi * 3 / 20.0
    eps = 1e-3
    state = State1D(grid, eps * np.sin(k * grid.x), np.zeros(64))
    e_t, q_t = rhs_homogenized(state, HomogenizedParams(coeffs, nonlinear=False))
    expected = -G * coeffs.mean_H * eps * k * np.cos(k * grid.x) / (1 + coeffs.mu_tilde * k ** 2)
    assert np.max(np.abs(e_t)) < 1e-15
    np.testing.assert_allclose(q_t, expected, atol=1e-14)


def test_rhs_fd_oracle(coeffs):
    """Second-order finite differences of the same formulas converge to the rhs."""
    errs = []
    for n in (128, 256, 512):
        grid = PeriodicGrid1D(n, 40.0)
        x = grid.x
        eta = 0.05 * np.exp(-(x / 4) ** 2)
        q = 0.1 * np.exp(-(x / 3) ** 2) * np.sin(x / 4)
        params = HomogenizedParams(coeffs, dealias_on=False)
        e_t, q_t = rhs_homogenized(State1D(grid, eta, q), params)
        d = lambda f: (np.roll(f, -1) - np.roll(f, 1)) / (2 * grid.dx)  # noqa: E731
        a2 = params.a2
        e_fd = -d(q) - a2 * d(eta * q)
        rhs = params.g_mean_H * d(eta) + a2 * q * d(q)
        # (1 - m d2) r = rhs with the 3-point Laplacian, solved by FFT
        lap = (2 * np.cos(2 * np.pi * np.fft.rfftfreq(n)) - 2) / grid.dx ** 2
        q_fd = -np.fft.irfft(np.fft.rfft(rhs) / (1 - params.helmholtz_coeff * lap), n)
        errs.append(max(np.max(np.abs(e_t - e_fd)), np.max(np.abs(q_t - q_fd))))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.8)


def test_rhs_rejects_nonpositive_depth(coeffs):
    grid = PeriodicGrid1D(16, 10.0)
    with pytest.raises(SimulationError):
        rhs_homogenized(State1D(grid, np.full(16, -2.0), np.zeros(16)),
                        HomogenizedParams(coeffs))


def test_params_validation(coeffs):
    with pytest.raises(ValueError):
        HomogenizedParams(coeffs, cfl=0.0)
    with pytest.raises(ValueError):
        HomogenizedParams(coeffs, cfl=1.5)


def test_step_zero_state(coeffs):
    grid = PeriodicGrid1D(16, 10.0)
    out = ssprk3_step(State1D(grid, np.zeros(16), np.zeros(16)), 0.01,
                      HomogenizedParams(coeffs))
    assert np.all(out.eta == 0) and np.all(out.q == 0) and out.t == 0.01
    with pytest.raises(ValueError):
        ssprk3_step(out, 0.0, HomogenizedParams(coeffs))


def test_linear_frequency_after_one_period(coeffs):
    num, exact = measured_frequency(coeffs, 4)
    assert abs(num / exact - 1) < 1e-6


def test_temporal_order_three(coeffs):
    grid = PeriodicGrid1D(128, 40.0)
    init = gaussian_state(grid, amplitude=0.05, width=3.0)
    params = HomogenizedParams(coeffs)
    t_end = 2.0
    ref = simulate_1d(init, t_end, params, dt=0.0025).final
    errs = []
    for dt in (0.04, 0.02):
        out = simulate_1d(init, t_end, params, dt=dt).final
        errs.append(np.max(np.abs(out.eta - ref.eta)))
    assert 6.5 <= errs[0] / errs[1] <= 9.5


def test_spectral_convergence_in_space(coeffs):
    params = HomogenizedParams(coeffs)
    finals = {}
    for n in (64, 96, 128, 256):
        grid = PeriodicGrid1D(n, 40.0)
        finals[n] = simulate_1d(gaussian_state(grid, 0.01, 4.0), 1.0, params, dt=0.005).final
    ref = finals[256]

    def err(n):
        # compare on the coarse grid via Fourier interpolation of the reference
        fine = np.fft.rfft(ref.eta) / 256
        k = np.arange(fine.size)
        x = finals[n].grid.x + 20.0
        vals = np.real(np.sum(fine[None, :] * np.exp(2j * np.pi * np.outer(x, k) / 40.0)
                              * np.where(k == 0, 1, 2)[None, :], axis=1))
        return np.max(np.abs(finals[n].eta - vals))

    e64, e96, e128 = err(64), err(96), err(128)
    # faster than any fixed power: the error ratio grows with n
    assert e64 / e96 > (96 / 64) ** 4
    assert e128 < 1e-7


def test_stable_dt(coeffs):
    grid = PeriodicGrid1D(100, 50.0)
    assert stable_dt(grid, HomogenizedParams(coeffs)) == pytest.approx(
        0.5 * 0.5 / np.sqrt(G * coeffs.mean_H))


def test_t_end_equal_initial_returns_initial(coeffs):
    grid = PeriodicGrid1D(32, 10.0)
    init = gaussian_state(grid)
    res = simulate_1d(init, 0.0, HomogenizedParams(coeffs), snapshot_times=[0.0])
    np.testing.assert_array_equal(res.final.eta, init.eta)
    assert res.steps == 0 and len(res.snapshots) == 1
    with pytest.raises(ValueError):
        simulate_1d(init, -1.0, HomogenizedParams(coeffs))


def test_snapshots_land_on_requested_times(coeffs):
    grid = PeriodicGrid1D(64, 40.0)
    res = simulate_1d(gaussian_state(grid), 1.0, HomogenizedParams(coeffs),
                      snapshot_times=[0.1234, 0.5, 1.0])
    assert [s.t for s in res.snapshots] == [0.1234, 0.5, 1.0]
    assert res.final.t == 1.0
    assert res.snapshot_at(0.5).t == 0.5
    with pytest.raises(KeyError):
        res.snapshot_at(0.7)


def test_gaussian_splits_symmetrically(coeffs):
    grid = PeriodicGrid1D(1024, 200.0)
    res = simulate_1d(gaussian_state(grid, 0.05, 5.0), 10.0, HomogenizedParams(coeffs))
    eta = res.final.eta
    # x -> -x maps index j to n - j on a grid symmetric about 0
    mirror = np.roll(eta[::-1], 1)
    assert np.max(np.abs(eta - mirror)) < 1e-10
    right = grid.x > 0
    assert grid.x[right][np.argmax(eta[right])] > 25.0


def test_mass_and_momentum_conservation(coeffs):
    grid = PeriodicGrid1D(512, 200.0)
    init = gaussian_state(grid, 0.05, 5.0)
    res = simulate_1d(init, 10.0, HomogenizedParams(coeffs))
    m0 = np.sum(init.eta) * grid.dx
    assert abs(np.sum(res.final.eta) * grid.dx - m0) <= 1e-10 * abs(m0)
    p_scale = np.sum(np.abs(res.final.q)) * grid.dx
    assert abs(np.sum(res.final.q) * grid.dx) <= 1e-8 * p_scale


def test_blow_up_detected(coeffs):
    grid = PeriodicGrid1D(64, 40.0)
    init = gaussian_state(grid, 1e-6, 2.0)
    # a huge explicit step is unstable
    with pytest.raises(SimulationError):
        simulate_1d(init, 50.0, HomogenizedParams(coeffs), dt=1.0)


def test_flat_bottom_is_nondispersive():
    c = effective_coefficients(BathymetryProfile.flat(-1.0))
    assert c.mu_tilde == 0.0
    assert float(linear_frequency(3.0, c)) == pytest.approx(3.0 * np.sqrt(G))
