"""Fourier differentiation, Helmholtz inversion and 2/3-rule filtering on
uniform periodic grids.

All operators act along one axis of a real array, so the same code serves
the 1D homogenized solver and the 2D pseudospectral solver.
"""
import numpy as np


class PeriodicGrid1D:
    """Uniform periodic grid ``x_j = x0 + j*length/n``, ``j = 0..n-1``."""

    def __init__(self, n, length, x0=None):
        n = int(n)
        if n < 8 or n % 2:
            raise ValueError(f"grid size must be even and >= 8, got {n}")
        if length <= 0:
            raise ValueError("length must be positive")
        self.n = n
        self.length = float(length)
        self.x0 = -0.5 * self.length if x0 is None else float(x0)
        self.dx = self.length / n
        self.x = self.x0 + self.dx * np.arange(n)
        # rfft wavenumbers; the last entry is the Nyquist mode
        self.k = 2 * np.pi * np.fft.rfftfreq(n, d=self.dx)
        self.ik = 1j * self.k
        self.ik[-1] = 0.0
        self.k2 = self.k ** 2
        self.dealias_mask = dealias_mask(n)
        self.x.flags.writeable = False
        self.k.flags.writeable = False

    @classmethod
    def from_bounds(cls, n, x_min, x_max):
        return cls(n, x_max - x_min, x_min)

    @property
    def x_max(self):
        return self.x0 + self.length

    def __eq__(self, other):
        return (isinstance(other, PeriodicGrid1D) and self.n == other.n
                and self.length == other.length and self.x0 == other.x0)

    def __hash__(self):
        return hash((self.n, self.length, self.x0))

    def __repr__(self):
        return f"PeriodicGrid1D(n={self.n}, length={self.length}, x0={self.x0})"


def dealias_mask(n):
    """Boolean rfft mask keeping modes with ``|j| < n/3``."""
    j = np.arange(n // 2 + 1)
    return 3 * j < n


def _shape(ndim, axis, arr):
    shape = [1] * ndim
    shape[axis] = arr.size
    return arr.reshape(shape)


def _check(field, grid, axis):
    if field.shape[axis] != grid.n:
        raise ValueError(
            f"field has {field.shape[axis]} points along axis {axis}, grid has {grid.n}")


def spectral_derivative(field, grid, order=1, axis=-1):
    """Derivative of the trigonometric interpolant along ``axis``.

    The Nyquist mode is dropped for odd orders.
    """
    field = np.asarray(field, dtype=float)
    _check(field, grid, axis)
    if order < 0:
        raise ValueError("order must be non-negative")
    if order == 0:
        return field.copy()
    fhat = np.fft.rfft(field, axis=axis)
    sym = (1j * grid.k) ** order
    if order % 2:
        sym[-1] = 0.0
    fhat *= _shape(field.ndim, axis % field.ndim, sym)
    return np.fft.irfft(fhat, grid.n, axis=axis)


def spectral_antiderivative(field, grid, axis=-1):
    """Zero-mean antiderivative of the zero-mean part of ``field``."""
    field = np.asarray(field, dtype=float)
    _check(field, grid, axis)
    fhat = np.fft.rfft(field, axis=axis)
    sym = np.zeros(grid.k.size, dtype=complex)
    sym[1:-1] = 1.0 / (1j * grid.k[1:-1])
    fhat *= _shape(field.ndim, axis % field.ndim, sym)
    return np.fft.irfft(fhat, grid.n, axis=axis)


def helmholtz_inverse(field, grid, coeff, axis=-1):
    """Apply ``(1 - coeff d^2/dx^2)^{-1}`` mode by mode."""
    if coeff < 0:
        raise ValueError(f"Helmholtz coefficient must be non-negative, got {coeff}")
    field = np.asarray(field, dtype=float)
    _check(field, grid, axis)
    if coeff == 0:
        return field.copy()
    fhat = np.fft.rfft(field, axis=axis)
    fhat /= _shape(field.ndim, axis % field.ndim, 1.0 + coeff * grid.k2)
    return np.fft.irfft(fhat, grid.n, axis=axis)


def dealias(field, axes=None):
    """Zero the top third of Fourier modes along each of ``axes``.

    ``axes=None`` filters along every axis.  The filter is a projection, so
    applying it twice gives bit-identical output.
    """
    field = np.asarray(field, dtype=float)
    if axes is None:
        axes = tuple(range(field.ndim))
    elif np.isscalar(axes):
        axes = (axes,)
    axes = tuple(a % field.ndim for a in axes)
    fhat = np.fft.rfftn(field, axes=axes)
    for i, a in enumerate(axes):
        n = field.shape[a]
        if i == len(axes) - 1:
            mask = dealias_mask(n)
        else:
            j = np.abs(np.fft.fftfreq(n) * n)
            mask = 3 * j < n
        fhat *= _shape(field.ndim, a, mask)
    out = np.fft.irfftn(fhat, s=[field.shape[a] for a in axes], axes=axes)
    return out


def dealias_spectrum(fhat, n):
    """Filter an rfft spectrum of an ``n``-point real signal in place-free form."""
    return np.where(dealias_mask(n), fhat, 0.0)


def spectral_energy(field):
    """``sum |f_hat|^2 / n`` over the full FFT; equals ``sum f^2`` (Parseval)."""
    field = np.asarray(field, dtype=float)
    return float(np.sum(np.abs(np.fft.fft(field)) ** 2) / field.size)


def fourier_shift(field, grid, shift):
    """Translate a periodic field by ``shift`` (exact for resolved modes)."""
    fhat = np.fft.rfft(field)
    fhat *= np.exp(-1j * grid.k * shift)
    if grid.n % 2 == 0:
        fhat[-1] = fhat[-1].real * np.cos(grid.k[-1] * shift)
    return np.fft.irfft(fhat, grid.n)
