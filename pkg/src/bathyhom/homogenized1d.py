r"""
Homogenized (transversely averaged) Boussinesq system
====================================================

Solves, for the mean surface perturbation :math:`\bar\eta` and mean
depth-integrated velocity :math:`\bar q = \langle Hu\rangle`,

.. math::

    \bar\eta_t &= -\bar q_x - \delta\langle H\rangle^{-1}(\bar\eta\,\bar q)_x \\
    \bar q_t &= -(1 - \tilde\mu\,\partial_x^2)^{-1}
        \left(g\langle H\rangle\bar\eta_x
              + \delta\langle H\rangle^{-1}\bar q\,\bar q_x\right),
    \qquad \tilde\mu = \delta^2\mu/\langle H\rangle,

with a Fourier pseudospectral discretization on a periodic grid and the
three-stage third-order SSP Runge-Kutta method in time.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from bathyhom.errors import SimulationError
from bathyhom.spectral_core import PeriodicGrid1D, dealias_mask


@dataclass
class State1D:
    grid: PeriodicGrid1D
    eta: np.ndarray
    q: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.eta = np.asarray(self.eta, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if self.eta.shape != (self.grid.n,) or self.q.shape != (self.grid.n,):
            raise ValueError("eta and q must be sampled on the grid")

    @property
    def x(self):
        return self.grid.x

    def copy(self):
        return State1D(self.grid, self.eta.copy(), self.q.copy(), self.t)


@dataclass(frozen=True)
class HomogenizedParams:
    coeffs: object
    cfl: float = 0.5
    dealias_on: bool = True
    nonlinear: bool = True

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")

    @property
    def g_mean_H(self):
        return self.coeffs.g * self.coeffs.mean_H

    @property
    def a2(self):
        return self.coeffs.delta / self.coeffs.mean_H

    @property
    def helmholtz_coeff(self):
        return self.coeffs.mu_tilde


def _irfft(fhat, n):
    return np.fft.irfft(fhat, n)


def rhs_homogenized(state, params, check=True):
    """Return ``(eta_t, q_t)`` for the semi-discrete homogenized system."""
    grid = state.grid
    n = grid.n
    eta, q = state.eta, state.q
    if check and np.any(params.coeffs.mean_H + eta <= 0):
        raise SimulationError("non-positive total depth", t=state.t)

    ik = grid.ik
    eta_hat = np.fft.rfft(eta)
    q_hat = np.fft.rfft(q)
    flux_hat = q_hat
    force_hat = params.g_mean_H * ik * eta_hat

    if params.nonlinear:
        a2 = params.a2
        q_x = _irfft(ik * q_hat, n)
        eq_hat = np.fft.rfft(eta * q)
        qqx_hat = np.fft.rfft(q * q_x)
        if params.dealias_on:
            mask = grid.dealias_mask
            eq_hat = eq_hat * mask
            qqx_hat = qqx_hat * mask
        flux_hat = flux_hat + a2 * eq_hat
        force_hat = force_hat + a2 * qqx_hat

    eta_t = -_irfft(ik * flux_hat, n)
    q_t = -_irfft(force_hat / (1.0 + params.helmholtz_coeff * grid.k2), n)
    return eta_t, q_t


def _check_finite(state, step=None):
    if not (np.all(np.isfinite(state.eta)) and np.all(np.isfinite(state.q))):
        raise SimulationError(
            f"non-finite values at t={state.t:.6g}", t=state.t, step=step)


def ssprk3_step(state, dt, params):
    """One Shu-Osher SSP-RK3 step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    e0, q0 = state.eta, state.q

    k_e, k_q = rhs_homogenized(state, params)
    s1 = State1D(state.grid, e0 + dt * k_e, q0 + dt * k_q, state.t + dt)

    k_e, k_q = rhs_homogenized(s1, params)
    s2 = State1D(state.grid,
                 0.75 * e0 + 0.25 * (s1.eta + dt * k_e),
                 0.75 * q0 + 0.25 * (s1.q + dt * k_q),
                 state.t + 0.5 * dt)

    k_e, k_q = rhs_homogenized(s2, params)
    out = State1D(state.grid,
                  e0 / 3.0 + 2.0 / 3.0 * (s2.eta + dt * k_e),
                  q0 / 3.0 + 2.0 / 3.0 * (s2.q + dt * k_q),
                  state.t + dt)
    _check_finite(out)
    return out


def stable_dt(grid, params):
    """``cfl * dx / sqrt(g <H>)``."""
    return params.cfl * grid.dx / np.sqrt(params.g_mean_H)


@dataclass
class SimulationResult:
    final: object
    snapshots: list = field(default_factory=list)
    steps: int = 0

    def snapshot_at(self, t, atol=1e-9):
        for s in self.snapshots:
            if abs(s.t - t) <= atol:
                return s
        raise KeyError(f"no snapshot at t={t}")


def _time_loop(initial, t_end, step, dt_fn, snapshot_times, observer, check):
    """Generic fixed-target time loop shared by the solvers.

    Steps are shortened to land exactly on every requested snapshot time and
    on ``t_end``.
    """
    if t_end < initial.t:
        raise ValueError("t_end precedes the initial time")
    targets = sorted({float(t) for t in snapshot_times if initial.t <= t <= t_end})
    snapshots = []
    state = initial
    if targets and abs(targets[0] - state.t) < 1e-12:
        snapshots.append(state.copy())
        targets.pop(0)
    nsteps = 0
    tol = 1e-12 * max(1.0, abs(t_end))
    while t_end - state.t > tol:
        dt = dt_fn(state)
        next_stop = targets[0] if targets else t_end
        if state.t + dt >= next_stop - tol:
            dt = next_stop - state.t
        t_target = state.t + dt
        state = step(state, dt)
        nsteps += 1
        if targets and abs(t_target - targets[0]) <= tol:
            state.t = targets[0]
            snapshots.append(state.copy())
            targets.pop(0)
        elif abs(t_target - t_end) <= tol:
            state.t = t_end
        check(state, nsteps)
        if observer is not None:
            observer(state)
    return SimulationResult(state, snapshots, nsteps)


def simulate_1d(initial, t_end, params, snapshot_times=(), observer=None,
                dt=None, blowup_factor=100.0):
    """Integrate the homogenized system from ``initial`` to ``t_end``.

    The step is fixed at ``dt`` (default :func:`stable_dt`) except where it
    is shortened to hit a snapshot time or ``t_end``.
    """
    dt0 = stable_dt(initial.grid, params) if dt is None else float(dt)
    ref = max(np.max(np.abs(initial.eta)), 1e-300)

    def check(state, nstep):
        if np.max(np.abs(state.eta)) > blowup_factor * ref:
            raise SimulationError(
                f"blow-up: max|eta| exceeded {blowup_factor:g}x its initial value "
                f"at t={state.t:.6g}", t=state.t, step=nstep)

    return _time_loop(initial.copy(), t_end,
                      lambda s, dt: ssprk3_step(s, dt, params),
                      lambda s: dt0, snapshot_times, observer, check)


def gaussian_state(grid, amplitude=0.05, width=5.0, center=0.0, t=0.0):
    """Gaussian surface hump at rest."""
    eta = amplitude * np.exp(-((grid.x - center) / width) ** 2)
    return State1D(grid, eta, np.zeros(grid.n), t)


def linear_frequency(k, coeffs):
    """Dispersion relation of the linearized homogenized system."""
    k = np.asarray(k, dtype=float)
    return np.sqrt(coeffs.g * coeffs.mean_H) * k / np.sqrt(1.0 + coeffs.mu_tilde * k ** 2)


def with_params(params, **kw):
    return replace(params, **kw)
