r"""
Transverse structure of waves predicted from a 1D mean solution
==============================================================

Given the mean fields :math:`(\bar\eta, \bar q)` of the homogenized system,
the leading-order y-dependence is

.. math::

    p &\approx -\delta\,[\![H]\!](y)\,\partial_x \langle u\rangle,
    \qquad \langle u\rangle = \bar q/\langle H\rangle, \\
    \eta &\approx \bar\eta - \delta^2 [\![H^{-1}[\![H]\!]]\!](y)\,\bar\eta_{xx}, \\
    u &\approx \pm\sqrt{g/\langle H\rangle}\,(\eta - \eta^0).

Both y-profiles have zero mean, so the y-average of the reconstructed
fields returns the input mean.  With ``cell_average=True`` the profiles
are replaced by their exact averages over uniform cells centered at ``y``,
which keeps that property on finite-volume grids.
"""
from dataclasses import dataclass

import numpy as np

from bathyhom.spectral_core import spectral_derivative


@dataclass
class Reconstruction2D:
    x: np.ndarray
    y: np.ndarray
    eta: np.ndarray
    u: np.ndarray
    p: np.ndarray
    source: object = None
    coeffs: object = None


def _profile_on(func, y, cell_average):
    """Values of a zero-mean periodic function at ``y`` or its cell averages."""
    y = np.asarray(y, dtype=float)
    if isinstance(func, (int, float)):
        return np.full(y.shape, float(func))
    if not cell_average:
        return np.asarray(func(y), dtype=float)
    if y.size < 2:
        raise ValueError("cell averages need at least two cells")
    dy = y[1] - y[0]
    F = func.integral_function()
    return (np.asarray(F(y + 0.5 * dy)) - np.asarray(F(y - 0.5 * dy))) / dy


def transverse_p_profile(coeffs, y, cell_average=False):
    """``[[H]](y)``."""
    return _profile_on(coeffs.brH, y, cell_average)


def transverse_eta_profile(coeffs, y, cell_average=False):
    """``[[H^{-1}[[H]]]](y)``."""
    return _profile_on(coeffs.brHinvbrH, y, cell_average)


def reconstruct_p(mean_state, coeffs, y, cell_average=False):
    """``p(x, y) = -delta [[H]](y) d/dx (q_bar/<H>)``, shape ``(nx, ny)``."""
    ux = spectral_derivative(mean_state.q / coeffs.mean_H, mean_state.grid)
    prof = transverse_p_profile(coeffs, y, cell_average)
    return -coeffs.delta * ux[:, None] * prof[None, :]


def reconstruct_eta2d(mean_state, coeffs, y, cell_average=False, eta0=0.0):
    """``eta(x, y) = eta0 + eta_bar - delta^2 [[H^{-1}[[H]]]](y) eta_bar_xx``."""
    exx = spectral_derivative(mean_state.eta, mean_state.grid, order=2)
    prof = transverse_eta_profile(coeffs, y, cell_average)
    return eta0 + mean_state.eta[:, None] - coeffs.delta ** 2 * exx[:, None] * prof[None, :]


def reconstruct_u(eta2d, coeffs, direction=1, eta0=0.0):
    """Simple-wave velocity ``direction * sqrt(g/<H>) (eta - eta0)``.

    Only meaningful for a wave travelling in a single direction.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 (right-going) or -1 (left-going)")
    return direction * np.sqrt(coeffs.g / coeffs.mean_H) * (np.asarray(eta2d) - eta0)


def reconstruct(mean_state, coeffs, y, direction=1, cell_average=False, eta0=0.0):
    """All three fields at once."""
    eta = reconstruct_eta2d(mean_state, coeffs, y, cell_average, eta0)
    return Reconstruction2D(
        x=np.asarray(mean_state.grid.x), y=np.asarray(y, dtype=float), eta=eta,
        u=reconstruct_u(eta, coeffs, direction, eta0),
        p=reconstruct_p(mean_state, coeffs, y, cell_average),
        source=mean_state, coeffs=coeffs)
