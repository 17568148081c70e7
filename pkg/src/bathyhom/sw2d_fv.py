r"""
Well-balanced finite-volume solver for 2D shallow water
======================================================

Conservative variables :math:`(h, hu, hv)` on a cell-centered grid with
cell-centered bathymetry.  Each stage uses

* MUSCL reconstruction of :math:`(\eta = h+b, hu, hv)` with the minmod
  limiter (or first-order, ``limiter="none"``),
* hydrostatic reconstruction of the interface depths,
  :math:`h^\pm = \max(0, \eta^\pm - \max(b_L, b_R))`, with the
  tangential momentum rescaled to :math:`h^\pm u_t` and the normal momentum
  left as reconstructed (so mass crosses a bottom step continuously),
* the Rusanov (local Lax-Friedrichs) flux,

and the unsplit update is advanced with SSP-RK2.  The bottom-slope source
enters only through the hydrostatic pressure corrections, so the lake at
rest is preserved exactly.

Boundary conditions are periodic in y; in x they are reflecting, periodic,
or reflecting until ``switch_time`` and periodic afterwards.
"""
from dataclasses import dataclass

import numba
import numpy as np

from bathyhom.bathymetry import G
from bathyhom.errors import DryStateError, SimulationError
from bathyhom.homogenized1d import _time_loop

NG = 2
DRY = 1e-12

LIMITERS = {"none": 0, "minmod": 1}
BC_X = ("reflecting", "periodic", "reflecting_then_periodic")


# {{{ kernels

_jit = numba.njit(cache=True, error_model="numpy")
_inline = numba.njit(inline="always", error_model="numpy")


@_inline
def _minmod(a, b):
    # branch-free so the inner loops vectorize
    return 0.5 * (np.sign(a) + np.sign(b)) * min(abs(a), abs(b))


@_inline
def _face_flux(etaL, qnL, qtL, bL, etaR, qnR, qtR, bR, g):
    """Hydrostatic-reconstruction Rusanov flux across one interface.

    Returns the mass flux, the normal-momentum flux seen by the left and by
    the right cell (they differ by the well-balanced pressure corrections)
    and the transverse-momentum flux.
    """
    hL = etaL - bL
    hR = etaR - bR
    # velocities vanish in dry states; written without branches
    invL = (hL > DRY) * (1.0 / max(hL, DRY))
    invR = (hR > DRY) * (1.0 / max(hR, DRY))
    unL = qnL * invL
    utL = qtL * invL
    unR = qnR * invR
    utR = qtR * invR
    bs = max(bL, bR)
    hLs = max(0.0, etaL - bs)
    hRs = max(0.0, etaR - bs)
    # the normal momentum is not rescaled to h* u: that keeps the mass flux
    # continuous when a transverse flow crosses a bottom step
    qnLs = qnL * (hLs > DRY)
    qnRs = qnR * (hRs > DRY)
    qtLs = hLs * utL
    qtRs = hRs * utR
    s = max(abs(unL) + np.sqrt(g * hLs), abs(unR) + np.sqrt(g * hRs))

    fh = 0.5 * (qnLs + qnRs) - 0.5 * s * (hRs - hLs)
    fn = 0.5 * (qnLs * unL + qnRs * unR) - 0.5 * s * (qnRs - qnLs)
    ft = 0.5 * (qnLs * utL + qnRs * utR) - 0.5 * s * (qtRs - qtLs)
    pLs = 0.5 * g * hLs * hLs
    pRs = 0.5 * g * hRs * hRs
    fn_left = fn + 0.5 * (pRs - pLs) + 0.5 * g * hL * hL
    fn_right = fn + 0.5 * (pLs - pRs) + 0.5 * g * hR * hR
    return fh, fn_left, fn_right, ft


@_inline
def _half_slope(qm, q0, qp, limited):
    """Half the minmod-limited cell slope, or zero for first order."""
    return 0.5 * _minmod(q0 - qm, qp - q0) if limited else 0.0


@_jit
def _x_face_row(h, hu, hv, b, i, limited, g, fh, fl, fr, ft):
    """Fluxes through the faces between padded rows ``i`` and ``i+1``."""
    ny = fh.shape[0]
    for jj in range(ny):
        j = NG + jj
        e0 = h[i - 1, j] + b[i - 1, j]
        e1 = h[i, j] + b[i, j]
        e2 = h[i + 1, j] + b[i + 1, j]
        e3 = h[i + 2, j] + b[i + 2, j]
        sl = _half_slope(e0, e1, e2, limited)
        sr = _half_slope(e1, e2, e3, limited)
        ul = _half_slope(hu[i - 1, j], hu[i, j], hu[i + 1, j], limited)
        ur = _half_slope(hu[i, j], hu[i + 1, j], hu[i + 2, j], limited)
        vl = _half_slope(hv[i - 1, j], hv[i, j], hv[i + 1, j], limited)
        vr = _half_slope(hv[i, j], hv[i + 1, j], hv[i + 2, j], limited)
        a, bl, br, c = _face_flux(e1 + sl, hu[i, j] + ul, hv[i, j] + vl, b[i, j],
                                  e2 - sr, hu[i + 1, j] - ur, hv[i + 1, j] - vr,
                                  b[i + 1, j], g)
        fh[jj] = a
        fl[jj] = bl
        fr[jj] = br
        ft[jj] = c


@_jit
def _y_face_row(h, hu, hv, b, i, limited, g, gh, gl, gr, gt):
    """Fluxes through the ``ny + 1`` y-faces of padded row ``i``."""
    for f in range(gh.shape[0]):
        j = NG - 1 + f
        e0 = h[i, j - 1] + b[i, j - 1]
        e1 = h[i, j] + b[i, j]
        e2 = h[i, j + 1] + b[i, j + 1]
        e3 = h[i, j + 2] + b[i, j + 2]
        sl = _half_slope(e0, e1, e2, limited)
        sr = _half_slope(e1, e2, e3, limited)
        ul = _half_slope(hu[i, j - 1], hu[i, j], hu[i, j + 1], limited)
        ur = _half_slope(hu[i, j], hu[i, j + 1], hu[i, j + 2], limited)
        vl = _half_slope(hv[i, j - 1], hv[i, j], hv[i, j + 1], limited)
        vr = _half_slope(hv[i, j], hv[i, j + 1], hv[i, j + 2], limited)
        a, bl, br, c = _face_flux(e1 + sl, hv[i, j] + vl, hu[i, j] + ul, b[i, j],
                                  e2 - sr, hv[i, j + 1] - vr, hu[i, j + 1] - ur,
                                  b[i, j + 1], g)
        gh[f] = a
        gl[f] = bl
        gr[f] = br
        gt[f] = c


@_jit
def _residual_2d(h, hu, hv, b, dx, dy, g, limited, rh, rhu, rhv):
    """Semi-discrete right-hand side on the interior of padded arrays.

    Rows are swept in x so that only one row of x-face fluxes and one row of
    y-face fluxes are live at a time.
    """
    nx, ny = rh.shape
    fh0 = np.empty(ny)
    fl0 = np.empty(ny)
    fr0 = np.empty(ny)
    ft0 = np.empty(ny)
    fh1 = np.empty(ny)
    fl1 = np.empty(ny)
    fr1 = np.empty(ny)
    ft1 = np.empty(ny)
    gh = np.empty(ny + 1)
    gl = np.empty(ny + 1)
    gr = np.empty(ny + 1)
    gt = np.empty(ny + 1)
    _x_face_row(h, hu, hv, b, NG - 1, limited, g, fh0, fl0, fr0, ft0)
    for ii in range(nx):
        i = NG + ii
        _x_face_row(h, hu, hv, b, i, limited, g, fh1, fl1, fr1, ft1)
        _y_face_row(h, hu, hv, b, i, limited, g, gh, gl, gr, gt)
        for jj in range(ny):
            rh[ii, jj] = -(fh1[jj] - fh0[jj]) / dx - (gh[jj + 1] - gh[jj]) / dy
            rhu[ii, jj] = -(fl1[jj] - fr0[jj]) / dx - (gt[jj + 1] - gt[jj]) / dy
            rhv[ii, jj] = -(ft1[jj] - ft0[jj]) / dx - (gl[jj + 1] - gr[jj]) / dy
        fh0, fh1 = fh1, fh0
        fl0, fl1 = fl1, fl0
        fr0, fr1 = fr1, fr0
        ft0, ft1 = ft1, ft0


@_jit
def _residual_1d(h, hu, b, dx, g, limited, rh, rhu):
    nx = h.shape[0] - 2 * NG
    eta = h + b
    se = np.zeros(nx + 2)
    su = np.zeros(nx + 2)
    if limited:
        for i in range(nx + 2):
            se[i] = _half_slope(eta[i], eta[i + 1], eta[i + 2], limited)
            su[i] = _half_slope(hu[i], hu[i + 1], hu[i + 2], limited)
    fh = np.empty(nx + 1)
    fl = np.empty(nx + 1)
    fr = np.empty(nx + 1)
    for f in range(nx + 1):
        i = NG - 1 + f
        a, bl, br, _ = _face_flux(eta[i] + se[f], hu[i] + su[f], 0.0, b[i],
                                  eta[i + 1] - se[f + 1], hu[i + 1] - su[f + 1], 0.0,
                                  b[i + 1], g)
        fh[f] = a
        fl[f] = bl
        fr[f] = br
    for ii in range(nx):
        rh[ii] = -(fh[ii + 1] - fh[ii]) / dx
        rhu[ii] = -(fl[ii + 1] - fr[ii]) / dx


@_jit
def _max_rate(h, hu, hv, dx, dy, g):
    """``max (|u| + c)/dx + (|v| + c)/dy`` over wet cells."""
    m = 0.0
    nx, ny = h.shape
    for i in range(nx):
        for j in range(ny):
            hh = h[i, j]
            if hh > DRY:
                c = np.sqrt(g * hh)
                r = (abs(hu[i, j] / hh) + c) / dx + (abs(hv[i, j] / hh) + c) / dy
                if r > m:
                    m = r
    return m



@_jit
def _face_flux_checked(etaL, qnL, qtL, bL, etaR, qnR, qtR, bR, g):
    return _face_flux(etaL, qnL, qtL, bL, etaR, qnR, qtR, bR, g)


def numerical_flux(left, right, g=G):
    """Interface flux for ``left = (eta, q_n, q_t, b)`` and ``right`` likewise.

    Returns ``(mass, normal momentum seen from the left cell, normal momentum
    seen from the right cell, transverse momentum)``.
    """
    return _face_flux_checked(*map(float, left), *map(float, right), float(g))


def minmod(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return 0.5 * (np.sign(a) + np.sign(b)) * np.minimum(np.abs(a), np.abs(b))


def reconstruct_interfaces(q, limited=True):
    """Left and right states at the interior faces of a 1D array of cell values.

    Face ``f`` sits between cells ``f+1`` and ``f+2``; the first and last
    cells only supply slopes.
    """
    q = np.asarray(q, dtype=float)
    d = np.diff(q)
    half = 0.5 * minmod(d[:-1], d[1:]) if limited else np.zeros(q.size - 2)
    inner = q[1:-1]
    return (inner + half)[:-1], (inner - half)[1:]


def hydrostatic_depths(etaL, etaR, bL, bR):
    """``h^- = max(0, eta_L - max(b_L, b_R))`` and the same on the right."""
    bs = np.maximum(bL, bR)
    return np.maximum(0.0, np.asarray(etaL) - bs), np.maximum(0.0, np.asarray(etaR) - bs)

# }}}


# {{{ grid, state, config

class CellGrid2D:
    """Uniform cell-centered grid on ``[x_min, x_max] x [y_min, y_max]``."""

    def __init__(self, nx, x_min, x_max, ny, y_min=-0.5, y_max=0.5):
        self.nx, self.ny = int(nx), int(ny)
        self.x_min, self.x_max = float(x_min), float(x_max)
        self.y_min, self.y_max = float(y_min), float(y_max)
        self.dx = (self.x_max - self.x_min) / self.nx
        self.dy = (self.y_max - self.y_min) / self.ny
        self.x = self.x_min + self.dx * (np.arange(self.nx) + 0.5)
        self.y = self.y_min + self.dy * (np.arange(self.ny) + 0.5)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def cell_area(self):
        return self.dx * self.dy

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def __repr__(self):
        return (f"CellGrid2D(nx={self.nx}, x=[{self.x_min}, {self.x_max}], "
                f"ny={self.ny}, y=[{self.y_min}, {self.y_max}])")


@dataclass
class FVState:
    grid: CellGrid2D
    h: np.ndarray
    hu: np.ndarray
    hv: np.ndarray
    b: np.ndarray
    t: float = 0.0

    @property
    def eta(self):
        return self.h + self.b

    @property
    def u(self):
        return self.hu / self.h

    @property
    def p(self):
        return self.hv

    def copy(self):
        return FVState(self.grid, self.h.copy(), self.hu.copy(), self.hv.copy(), self.b, self.t)

    def y_mean(self, name="eta"):
        return getattr(self, name).mean(axis=1)

    def mass(self):
        return float(np.sum(self.h) * self.grid.cell_area)


@dataclass(frozen=True)
class FVConfig:
    cfl: float = 0.45
    limiter: str = "minmod"
    bc_x: str = "reflecting_then_periodic"
    switch_time: float = None
    g: float = G

    def __post_init__(self):
        if not 0 < self.cfl < 1:
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if self.limiter not in LIMITERS:
            raise ValueError(f"unknown limiter {self.limiter!r}")
        if self.bc_x not in BC_X:
            raise ValueError(f"unknown x boundary condition {self.bc_x!r}")
        if self.bc_x == "reflecting_then_periodic" and self.switch_time is None:
            raise ValueError("reflecting_then_periodic needs a switch_time")

    def x_bc_at(self, t):
        if self.bc_x == "reflecting_then_periodic":
            return "reflecting" if t < self.switch_time else "periodic"
        return self.bc_x


def default_switch_time(width, g=G, depth=1.0):
    """Time for a Gaussian of e-folding ``width`` to clear the wall.

    ``2 * (2*width) / sqrt(g*depth)``: two full pulse widths at the linear
    wave speed.
    """
    return 2.0 * (2.0 * width) / np.sqrt(g * depth)


def sample_cell_bathymetry(profile, grid):
    """Bottom at cell centers, shape ``(nx, ny)``."""
    b = np.asarray(profile.bottom(grid.y), dtype=float)
    return np.broadcast_to(b[None, :], grid.shape).copy()


def planar_initial_state(grid, profile, eta0_fn, u0_fn=None, t=0.0):
    """``eta = eta0(x)``, ``u = u0(x)``, ``v = 0`` over ``profile``."""
    b = sample_cell_bathymetry(profile, grid)
    eta = profile.eta0 + np.asarray(eta0_fn(grid.x), dtype=float)[:, None]
    h = eta - b
    u = np.zeros(grid.nx) if u0_fn is None else np.asarray(u0_fn(grid.x), dtype=float)
    hu = h * u[:, None]
    return FVState(grid, h, hu, np.zeros(grid.shape), b, t)


def lake_at_rest(grid, profile, t=0.0):
    b = sample_cell_bathymetry(profile, grid)
    h = profile.eta0 - b
    return FVState(grid, h, np.zeros(grid.shape), np.zeros(grid.shape), b, t)

# }}}


# {{{ boundary conditions and stepping

@_jit
def _pad_into(a, periodic, sign, out):
    """Copy ``a`` into ``out`` with ``NG`` ghost cells: periodic in y,
    periodic or mirrored (times ``sign``) in x."""
    nx, ny = a.shape
    for i in range(nx + 2 * NG):
        k = i - NG
        s = 1.0
        if k < 0:
            if periodic:
                k += nx
            else:
                k = -1 - k
                s = sign
        elif k >= nx:
            if periodic:
                k -= nx
            else:
                k = 2 * nx - 1 - k
                s = sign
        for j in range(ny + 2 * NG):
            jj = j - NG
            if jj < 0:
                jj += ny
            elif jj >= ny:
                jj -= ny
            out[i, j] = s * a[k, jj]


@_jit
def _euler(h, hu, hv, rh, rhu, rhv, dt, oh, ohu, ohv):
    """``out = q + dt r``; returns 1 on non-finite values, 2 on negative depth."""
    nx, ny = h.shape
    flag = 0
    for i in range(nx):
        for j in range(ny):
            a = h[i, j] + dt * rh[i, j]
            b = hu[i, j] + dt * rhu[i, j]
            c = hv[i, j] + dt * rhv[i, j]
            oh[i, j] = a
            ohu[i, j] = b
            ohv[i, j] = c
            if not (np.isfinite(a) and np.isfinite(b) and np.isfinite(c)):
                flag = 1
            elif a < 0 and flag == 0:
                flag = 2
    return flag


@_jit
def _heun(h0, hu0, hv0, h1, hu1, hv1, rh, rhu, rhv, dt, oh, ohu, ohv):
    """``out = q0/2 + (q1 + dt r)/2`` with the same flags as ``_euler``."""
    nx, ny = h0.shape
    flag = 0
    for i in range(nx):
        for j in range(ny):
            a = 0.5 * h0[i, j] + 0.5 * (h1[i, j] + dt * rh[i, j])
            b = 0.5 * hu0[i, j] + 0.5 * (hu1[i, j] + dt * rhu[i, j])
            c = 0.5 * hv0[i, j] + 0.5 * (hv1[i, j] + dt * rhv[i, j])
            oh[i, j] = a
            ohu[i, j] = b
            ohv[i, j] = c
            if not (np.isfinite(a) and np.isfinite(b) and np.isfinite(c)):
                flag = 1
            elif a < 0 and flag == 0:
                flag = 2
    return flag


class _Workspace:
    """Padded copies and stage buffers reused across steps of one grid size."""

    def __init__(self, shape):
        padded = (shape[0] + 2 * NG, shape[1] + 2 * NG)
        self.ph, self.phu, self.phv, self.pb = (np.empty(padded) for _ in range(4))
        self.r = tuple(np.empty(shape) for _ in range(3))
        self.stage = tuple(np.empty(shape) for _ in range(3))


_WORKSPACES = {}


def _workspace(shape):
    ws = _WORKSPACES.get(shape)
    if ws is None:
        ws = _WORKSPACES[shape] = _Workspace(shape)
    return ws


def _residual_into(ws, h, hu, hv, grid, config, bc_x, out):
    """Residual into ``out``; ``ws.pb`` must already hold the padded bottom."""
    periodic = bc_x == "periodic"
    _pad_into(h, periodic, 1.0, ws.ph)
    _pad_into(hu, periodic, -1.0, ws.phu)
    _pad_into(hv, periodic, 1.0, ws.phv)
    _residual_2d(ws.ph, ws.phu, ws.phv, ws.pb, grid.dx, grid.dy, config.g,
                 LIMITERS[config.limiter], *out)
    return out


def fv_residual(state, config, bc_x=None):
    """Semi-discrete right-hand side ``(dh, dhu, dhv)``."""
    if bc_x is None:
        bc_x = config.x_bc_at(state.t)
    out = tuple(np.empty(state.grid.shape) for _ in range(3))
    ws = _workspace(state.grid.shape)
    _pad_into(state.b, bc_x == "periodic", 1.0, ws.pb)
    return _residual_into(ws, state.h, state.hu, state.hv, state.grid, config, bc_x, out)


def cfl_dt(state, config):
    rate = _max_rate(state.h, state.hu, state.hv, state.grid.dx, state.grid.dy, config.g)
    if rate <= 0:
        raise SimulationError("no wet cells", t=state.t)
    return config.cfl / rate


def _raise_for(flag, t):
    if flag == 1:
        raise SimulationError(f"non-finite values at t={t:.6g}", t=t)
    if flag == 2:
        raise DryStateError(f"negative depth at t={t:.6g}", t=t)


def fv_step(state, dt, config):
    """SSP-RK2 (Heun) step.  The x boundary condition is frozen over the step."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    bc_x = config.x_bc_at(state.t)
    grid = state.grid
    ws = _workspace(grid.shape)
    _pad_into(state.b, bc_x == "periodic", 1.0, ws.pb)
    r = _residual_into(ws, state.h, state.hu, state.hv, grid, config, bc_x, ws.r)
    h1, hu1, hv1 = ws.stage
    _raise_for(_euler(state.h, state.hu, state.hv, *r, dt, h1, hu1, hv1), state.t + dt)
    r = _residual_into(ws, h1, hu1, hv1, grid, config, bc_x, ws.r)
    out = FVState(grid, np.empty(grid.shape), np.empty(grid.shape), np.empty(grid.shape),
                  state.b, state.t + dt)
    _raise_for(_heun(state.h, state.hu, state.hv, h1, hu1, hv1, *r, dt,
                     out.h, out.hu, out.hv), out.t)
    return out


def simulate_fv(initial, t_end, config, snapshot_times=(), observer=None, dt=None,
                blowup_factor=100.0, eta0=0.0):
    """Time loop with a CFL step recomputed every step.

    With ``reflecting_then_periodic`` the step is also shortened to land on
    ``switch_time``.
    """
    ref = max(np.max(np.abs(initial.eta - eta0)), 1e-300)
    stops = list(snapshot_times)
    if config.bc_x == "reflecting_then_periodic" and initial.t < config.switch_time < t_end:
        stops.append(config.switch_time)
    keep = {float(t) for t in snapshot_times}

    def check(state, nstep):
        if np.max(np.abs(state.eta - eta0)) > blowup_factor * ref:
            raise SimulationError(f"blow-up at t={state.t:.6g}", t=state.t, step=nstep)

    dt_fn = (lambda s: cfl_dt(s, config)) if dt is None else (lambda s: float(dt))
    res = _time_loop(initial.copy(), t_end, lambda s, h: fv_step(s, h, config),
                     dt_fn, stops, observer, check)
    res.snapshots = [s for s in res.snapshots if s.t in keep]
    return res


# }}}


# {{{ 1D reference solver

def _pad1d(a, bc_x, sign=1.0):
    if bc_x == "periodic":
        return np.pad(a, NG, mode="wrap")
    out = np.pad(a, NG, mode="symmetric")
    out[:NG] *= sign
    out[-NG:] *= sign
    return out


def fv1d_residual(h, hu, b, dx, config, bc_x="periodic"):
    rh = np.empty(h.shape)
    rhu = np.empty(h.shape)
    _residual_1d(_pad1d(h, bc_x), _pad1d(hu, bc_x, -1.0), _pad1d(b, bc_x), dx, config.g,
                 LIMITERS[config.limiter], rh, rhu)
    return rh, rhu


def fv1d_step(h, hu, b, dx, dt, config, bc_x="periodic"):
    """One SSP-RK2 step of the same scheme restricted to one dimension."""
    r = fv1d_residual(h, hu, b, dx, config, bc_x)
    h1 = h + dt * r[0]
    hu1 = hu + dt * r[1]
    r = fv1d_residual(h1, hu1, b, dx, config, bc_x)
    return (0.5 * h + 0.5 * (h1 + dt * r[0]),
            0.5 * hu + 0.5 * (hu1 + dt * r[1]))

# }}}
