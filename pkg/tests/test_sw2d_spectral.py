import numpy as np
import pytest

from bathyhom.bathymetry import BathymetryProfile, pwc_setup, sinusoidal_setup
from bathyhom.errors import SimulationError
from bathyhom.sw2d_spectral import (Grid2D, SpectralConfig, SpectralState2D, cfl_dt,
                                    planar_initial_state, rhs_2d_spectral, rk4_step,
                                    sample_bathymetry, simulate_2d_spectral)

G = 9.81


def small_grid(nx=64, length=40.0, ny=8):
    return Grid2D.from_bounds(nx, -length / 2, length / 2, ny, -0.5, 0.5)


def test_rejects_discontinuous_bathymetry():
    with pytest.raises(ValueError):
        sample_bathymetry(pwc_setup(), small_grid())


def test_lake_at_rest_is_exact():
    grid = small_grid()
    prof = sinusoidal_setup()
    state = planar_initial_state(grid, prof, lambda x: 0.0 * x)
    b = sample_bathymetry(prof, grid)
    for r in rhs_2d_spectral(state, b):
        assert np.max(np.abs(r)) < 1e-14


def test_flat_bottom_linear_mode_frequency():
    grid = small_grid(nx=32, ny=8)
    prof = BathymetryProfile.flat(-1.0)
    k = 2 * np.pi * 2 / 40.0
    eps = 1e-7
    omega = np.sqrt(G) * k
    state = planar_initial_state(grid, prof, lambda x: eps * np.cos(k * x),
                                 lambda x: np.sqrt(G) * eps * np.cos(k * x))
    t_end = 2 * np.pi / omega
    res = simulate_2d_spectral(state, t_end, prof, dt=t_end / 400)
    np.testing.assert_allclose(res.final.eta, state.eta, atol=1e-6 * eps)
    assert np.max(np.abs(res.final.p)) < 1e-20


def test_rk4_fourth_order():
    grid = small_grid(nx=64, ny=8)
    prof = sinusoidal_setup()
    state = planar_initial_state(grid, prof, lambda x: 0.05 * np.exp(-(x / 3) ** 2))
    ref = simulate_2d_spectral(state, 0.5, prof, dt=0.5 / 1280).final
    errs = []
    for n in (80, 160):
        out = simulate_2d_spectral(state, 0.5, prof, dt=0.5 / n).final
        errs.append(np.max(np.abs(out.eta - ref.eta)))
    assert 13.0 <= errs[0] / errs[1] <= 19.0


def test_mass_conserved():
    grid = small_grid(nx=128, ny=16)
    prof = sinusoidal_setup()
    state = planar_initial_state(grid, prof, lambda x: 0.05 * np.exp(-(x / 3) ** 2))
    res = simulate_2d_spectral(state, 2.0, prof)
    m0 = np.sum(state.eta - prof.eta0)
    assert abs(np.sum(res.final.eta - prof.eta0) - m0) <= 1e-10 * abs(m0)


def test_x_parity_preserved():
    grid = small_grid(nx=128, ny=16)
    prof = sinusoidal_setup()
    state = planar_initial_state(grid, prof, lambda x: 0.05 * np.exp(-(x / 3) ** 2))
    s = simulate_2d_spectral(state, 2.0, prof).final

    def mirror(f):
        return np.roll(f[::-1], 1, axis=0)

    np.testing.assert_allclose(mirror(s.eta), s.eta, atol=1e-12)
    np.testing.assert_allclose(mirror(s.u), -s.u, atol=1e-12)
    np.testing.assert_allclose(mirror(s.p), s.p, atol=1e-12)


def test_y_translation_equivariance():
    grid = small_grid(nx=64, ny=16)
    prof = sinusoidal_setup()
    shift = 3 * grid.dy
    moved = prof.shifted(shift)
    bump = lambda x: 0.05 * np.exp(-(x / 3) ** 2)  # noqa: E731
    a = simulate_2d_spectral(planar_initial_state(grid, prof, bump), 1.0, prof, dt=0.01).final
    b = simulate_2d_spectral(planar_initial_state(grid, moved, bump), 1.0, moved,
                             dt=0.01).final
    np.testing.assert_allclose(np.roll(a.eta, 3, axis=1), b.eta, atol=1e-12)
    np.testing.assert_allclose(np.roll(a.p, 3, axis=1), b.p, atol=1e-12)


def test_y_momentum_generated_by_bathymetry():
    grid = small_grid(nx=128, ny=16)
    prof = sinusoidal_setup()
    state = planar_initial_state(grid, prof, lambda x: 0.05 * np.exp(-(x / 3) ** 2))
    s = simulate_2d_spectral(state, 1.0, prof).final
    assert np.max(np.abs(s.p)) > 1e-5
    # p has zero y-mean to roundoff by the periodic y-flux
    assert np.max(np.abs(s.p.mean(axis=1))) < 1e-3 * np.max(np.abs(s.p))


def test_cfl_dt_and_step_validation():
    grid = small_grid(nx=64, ny=8)
    prof = sinusoidal_setup()
    state = planar_initial_state(grid, prof, lambda x: 0.0 * x)
    b = sample_bathymetry(prof, grid)
    h_max = np.max(state.eta - b)
    assert cfl_dt(state, b) == pytest.approx(0.5 * grid.dy / np.sqrt(G * h_max))
    with pytest.raises(ValueError):
        rk4_step(state, 0.0, b)


def test_dry_state_detected():
    grid = small_grid(nx=16, ny=8)
    prof = BathymetryProfile.flat(-1.0)
    state = SpectralState2D(grid, np.full(grid.shape, -2.0), np.zeros(grid.shape),
                            np.zeros(grid.shape))
    with pytest.raises(SimulationError):
        rhs_2d_spectral(state, sample_bathymetry(prof, grid))


def test_dealias_toggle_changes_only_nonlinear_terms():
    grid = small_grid(nx=64, ny=8)
    prof = sinusoidal_setup()
    b = sample_bathymetry(prof, grid)
    lin = planar_initial_state(grid, prof, lambda x: 1e-9 * np.cos(2 * np.pi * x / 40))
    on = rhs_2d_spectral(lin, b, SpectralConfig(dealias_on=True))
    off = rhs_2d_spectral(lin, b, SpectralConfig(dealias_on=False))
    for a, c in zip(on, off):
        assert np.max(np.abs(a - c)) <= 1e-3 * max(np.max(np.abs(c)), 1e-300)
