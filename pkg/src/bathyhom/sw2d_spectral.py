r"""
2D pseudospectral solver for shallow water over smooth bathymetry
================================================================

The Saint-Venant system is written in surface elevation, x-velocity and
y-momentum,

.. math::

    \eta_t + (u(\eta-b))_x + p_y &= 0 \\
    u_t + u u_x + g\eta_x + \frac{p}{\eta-b} u_y &= 0 \\
    p_t + \left(\frac{p^2}{\eta-b}\right)_y + g(\eta-b)\eta_y + (pu)_x &= 0,

and discretized with Fourier collocation in both directions (periodic in
x and over one bathymetry period in y) and classical RK4 in time.
Products are filtered with the 2/3 rule unless ``dealias_on`` is off.
"""
from dataclasses import dataclass

import numpy as np

from bathyhom.bathymetry import G
from bathyhom.errors import SimulationError
from bathyhom.homogenized1d import _time_loop
from bathyhom.spectral_core import PeriodicGrid1D, dealias_mask


class Grid2D:
    """Tensor grid of two periodic 1D grids, arrays indexed ``[ix, iy]``."""

    def __init__(self, xgrid, ygrid):
        self.xgrid = xgrid
        self.ygrid = ygrid
        self.shape = (xgrid.n, ygrid.n)
        # rfft2 layout: full spectrum along x, half spectrum along y
        kx = 2 * np.pi * np.fft.fftfreq(xgrid.n, d=xgrid.dx)
        ky = ygrid.k
        self.ikx = (1j * kx)[:, None]
        self.ikx[xgrid.n // 2, 0] = 0.0
        self.iky = (1j * ky)[None, :]
        self.iky[0, -1] = 0.0
        jx = np.abs(np.fft.fftfreq(xgrid.n) * xgrid.n)
        self.mask = ((3 * jx < xgrid.n)[:, None] & dealias_mask(ygrid.n)[None, :])

    @classmethod
    def from_bounds(cls, nx, x_min, x_max, ny, y_min, y_max):
        return cls(PeriodicGrid1D.from_bounds(nx, x_min, x_max),
                   PeriodicGrid1D.from_bounds(ny, y_min, y_max))

    @property
    def x(self):
        return self.xgrid.x

    @property
    def y(self):
        return self.ygrid.x

    @property
    def dx(self):
        return self.xgrid.dx

    @property
    def dy(self):
        return self.ygrid.dx

    def mesh(self):
        return np.meshgrid(self.xgrid.x, self.ygrid.x, indexing="ij")

    def fft(self, f):
        return np.fft.rfft2(f)

    def ifft(self, fhat):
        return np.fft.irfft2(fhat, s=self.shape)


@dataclass
class SpectralState2D:
    grid: Grid2D
    eta: np.ndarray
    u: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def copy(self):
        return SpectralState2D(self.grid, self.eta.copy(), self.u.copy(), self.p.copy(), self.t)

    def y_mean(self, name="eta"):
        return getattr(self, name).mean(axis=1)


@dataclass(frozen=True)
class SpectralConfig:
    g: float = G
    cfl: float = 0.5
    dealias_on: bool = True


def sample_bathymetry(profile, grid):
    """Bottom ``b`` on the y nodes, broadcastable against ``(nx, ny)`` arrays."""
    if not profile.is_smooth:
        raise ValueError(
            "the pseudospectral solver needs continuous bathymetry; "
            "use the finite-volume solver for piecewise-constant profiles")
    y = grid.ygrid.x
    return np.asarray(profile.bottom(y), dtype=float)[None, :]


def rhs_2d_spectral(state, b, config=SpectralConfig()):
    """Return ``(eta_t, u_t, p_t)``."""
    grid = state.grid
    eta, u, p = state.eta, state.u, state.p
    h = eta - b
    if np.any(h <= 0):
        raise SimulationError("non-positive depth", t=state.t)
    g = config.g
    fft, ifft = grid.fft, grid.ifft
    ikx, iky = grid.ikx, grid.iky
    mask = grid.mask if config.dealias_on else 1.0

    eta_hat = fft(eta)
    u_hat = fft(u)
    p_hat = fft(p)
    u_x = ifft(ikx * u_hat)
    u_y = ifft(iky * u_hat)
    eta_x_hat = ikx * eta_hat
    eta_y = ifft(iky * eta_hat)

    uh_hat = fft(u * h) * mask
    eta_t = -ifft(ikx * uh_hat + iky * p_hat)

    adv_hat = fft(u * u_x + p / h * u_y) * mask
    u_t = -ifft(adv_hat + g * eta_x_hat)

    pp_hat = fft(p * p / h) * mask
    pu_hat = fft(p * u) * mask
    hy_hat = fft(h * eta_y) * mask
    p_t = -ifft(iky * pp_hat + ikx * pu_hat + g * hy_hat)
    return eta_t, u_t, p_t


def rk4_step(state, dt, b, config=SpectralConfig()):
    """Classical fourth-order Runge-Kutta step."""
    if not dt > 0:
        raise ValueError("dt must be positive")

    def stage(s, k, a):
        return SpectralState2D(s.grid, s.eta + a * k[0], s.u + a * k[1], s.p + a * k[2], s.t + a)

    k1 = rhs_2d_spectral(state, b, config)
    k2 = rhs_2d_spectral(stage(state, k1, 0.5 * dt), b, config)
    k3 = rhs_2d_spectral(stage(state, k2, 0.5 * dt), b, config)
    k4 = rhs_2d_spectral(stage(state, k3, dt), b, config)
    w = dt / 6.0
    out = SpectralState2D(
        state.grid,
        state.eta + w * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        state.u + w * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        state.p + w * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]),
        state.t + dt)
    if not (np.all(np.isfinite(out.eta)) and np.all(np.isfinite(out.u))
            and np.all(np.isfinite(out.p))):
        raise SimulationError(f"non-finite values at t={out.t:.6g}", t=out.t)
    return out


def cfl_dt(state, b, config=SpectralConfig()):
    """``cfl * min(dx, dy) / c_max`` with ``c_max = max(|u|, |v|) + sqrt(g h_max)``."""
    h = state.eta - b
    v = state.p / h
    c_max = max(np.max(np.abs(state.u)), np.max(np.abs(v))) + np.sqrt(config.g * np.max(h))
    return config.cfl * min(state.grid.dx, state.grid.dy) / c_max


def planar_initial_state(grid, profile, eta0_fn, u0_fn=None, t=0.0):
    """Planar data ``eta(x, y) = eta0(x)``, ``u = u0(x)``, ``p = 0``."""
    x = grid.xgrid.x
    eta1d = profile.eta0 + np.asarray(eta0_fn(x), dtype=float)
    u1d = np.zeros_like(x) if u0_fn is None else np.asarray(u0_fn(x), dtype=float)
    shape = grid.shape
    return SpectralState2D(grid,
                           np.broadcast_to(eta1d[:, None], shape).copy(),
                           np.broadcast_to(u1d[:, None], shape).copy(),
                           np.zeros(shape), t)


def simulate_2d_spectral(initial, t_end, profile, config=SpectralConfig(),
                         snapshot_times=(), observer=None, dt=None, blowup_factor=100.0):
    """Time loop with CFL-limited RK4 steps."""
    b = sample_bathymetry(profile, initial.grid)
    ref = max(np.max(np.abs(initial.eta - profile.eta0)), 1e-300)

    def check(state, nstep):
        if np.max(np.abs(state.eta - profile.eta0)) > blowup_factor * ref:
            raise SimulationError(
                f"blow-up at t={state.t:.6g}", t=state.t, step=nstep)

    if dt is None:
        dt_fn = lambda s: cfl_dt(s, b, config)  # noqa: E731
    else:
        dt_fn = lambda s: float(dt)  # noqa: E731
    return _time_loop(initial.copy(), t_end, lambda s, h: rk4_step(s, h, b, config),
                      dt_fn, snapshot_times, observer, check)
