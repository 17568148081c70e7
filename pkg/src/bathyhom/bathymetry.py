r"""
Periodic bathymetry and its averaging functionals
=================================================

The bottom :math:`b(y)` is periodic in :math:`y` and constant in :math:`x`;
the still-water depth is :math:`H(y) = \eta^0 - b(y)`.  For a periodic
function :math:`f` we use

.. math::

    \langle f \rangle = \frac{1}{P}\int_{y_0}^{y_0+P} f\,dy, \qquad
    [\![ f ]\!] = \int^y (f - \langle f\rangle)\,d\xi, \quad
    \langle [\![ f ]\!] \rangle = 0,

and the effective dispersion coefficient

.. math::

    \mu = -\langle H [\![ H^{-1}[\![H]\!] ]\!] \rangle
        = \langle H^{-1} [\![H]\!]^2 \rangle.

Piecewise-constant profiles are handled exactly with piecewise
polynomials.  Smooth and tabulated profiles are sampled on a uniform
periodic grid, where the trapezoidal mean and the Fourier antiderivative
are spectrally accurate.
"""
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.interpolate import CubicSpline

from bathyhom.errors import ConsistencyError, InvalidProfileError

G = 9.81
DEFAULT_RESOLUTION = 4096
ZERO_MEAN_TOL = 1e-10
MU_CONSISTENCY_RTOL = 1e-10

PIECEWISE_CONSTANT = "piecewise_constant"
SINUSOIDAL = "sinusoidal"
TABULATED = "tabulated"


# {{{ periodic function representations

class PiecewisePolynomial:
    """Periodic piecewise polynomial on ``[breaks[0], breaks[-1])``.

    Piece ``i`` is stored as ascending power coefficients in the local
    variable ``s = y - breaks[i]``.
    """

    def __init__(self, breaks, coefs):
        self.breaks = np.asarray(breaks, dtype=float)
        self.coefs = [np.atleast_1d(np.asarray(c, dtype=float)) for c in coefs]
        if len(self.coefs) != len(self.breaks) - 1:
            raise ValueError("need one coefficient array per piece")
        if np.any(np.diff(self.breaks) <= 0):
            raise ValueError("breaks must be strictly increasing")

    @property
    def y0(self):
        return self.breaks[0]

    @property
    def period(self):
        return self.breaks[-1] - self.breaks[0]

    @property
    def widths(self):
        return np.diff(self.breaks)

    @property
    def degree(self):
        return max(len(c) for c in self.coefs) - 1

    def _wrap(self, y):
        return self.y0 + np.mod(np.asarray(y, dtype=float) - self.y0, self.period)

    def piece_index(self, y):
        yy = self._wrap(y)
        idx = np.searchsorted(self.breaks, yy, side="right") - 1
        return np.clip(idx, 0, len(self.coefs) - 1), yy

    def __call__(self, y):
        idx, yy = self.piece_index(y)
        out = np.empty_like(yy)
        for i, c in enumerate(self.coefs):
            m = idx == i
            if np.any(m):
                out[m] = P.polyval(yy[m] - self.breaks[i], c)
        return out if out.ndim else float(out)

    def mean(self):
        total = 0.0
        for c, w in zip(self.coefs, self.widths):
            total += P.polyval(w, P.polyint(c))
        return total / self.period

    def integral_function(self):
        """Continuous antiderivative vanishing at ``breaks[0]``."""
        out = []
        offset = 0.0
        for c, w in zip(self.coefs, self.widths):
            ci = P.polyint(c)
            ci[0] += offset
            out.append(ci)
            offset = P.polyval(w, ci)
        return PiecewisePolynomial(self.breaks, out)

    def _binary(self, other, op):
        if isinstance(other, PiecewisePolynomial):
            if not np.array_equal(self.breaks, other.breaks):
                raise ValueError("piecewise polynomials must share breakpoints")
            pairs = zip(self.coefs, other.coefs)
        else:
            pairs = ((c, np.array([float(other)])) for c in self.coefs)
        return PiecewisePolynomial(self.breaks, [op(a, b) for a, b in pairs])

    def __add__(self, other):
        return self._binary(other, P.polyadd)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, P.polysub)

    def __rsub__(self, other):
        return (-1.0 * self) + other

    def __mul__(self, other):
        return self._binary(other, P.polymul)

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def reciprocal(self):
        if self.degree > 0:
            raise ValueError("reciprocal only defined for piecewise-constant functions")
        return PiecewisePolynomial(self.breaks, [np.array([1.0 / c[0]]) for c in self.coefs])

    def sample(self, n=DEFAULT_RESOLUTION):
        y = self.y0 + self.period * np.arange(n) / n
        return y, self(y)

    def __repr__(self):
        return f"PiecewisePolynomial(pieces={len(self.coefs)}, degree={self.degree})"


class PeriodicSamples:
    """Samples of a periodic function on a uniform grid ``y0 + j*period/n``."""

    def __init__(self, values, y0=0.0, period=1.0):
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("need a non-empty 1D sample array")
        self.y0 = float(y0)
        self.period = float(period)
        self._spline = None

    @property
    def n(self):
        return self.values.size

    @property
    def y(self):
        return self.y0 + self.period * np.arange(self.n) / self.n

    def mean(self):
        # trapezoidal rule on a periodic grid
        return float(np.mean(self.values))

    def integral_function(self):
        """Zero-mean Fourier antiderivative of the fluctuating part."""
        n = self.n
        fhat = np.fft.rfft(self.values)
        k = 2 * np.pi * np.fft.rfftfreq(n, d=self.period / n)
        ghat = np.zeros_like(fhat)
        ghat[1:] = fhat[1:] / (1j * k[1:])
        if n % 2 == 0:
            ghat[-1] = 0.0
        return PeriodicSamples(np.fft.irfft(ghat, n), self.y0, self.period)

    def _other_values(self, other):
        if isinstance(other, PeriodicSamples):
            if other.n != self.n or other.y0 != self.y0 or other.period != self.period:
                raise ValueError("sampled functions must share a grid")
            return other.values
        return float(other)

    def __add__(self, other):
        return PeriodicSamples(self.values + self._other_values(other), self.y0, self.period)

    __radd__ = __add__

    def __sub__(self, other):
        return PeriodicSamples(self.values - self._other_values(other), self.y0, self.period)

    def __rsub__(self, other):
        return PeriodicSamples(self._other_values(other) - self.values, self.y0, self.period)

    def __mul__(self, other):
        return PeriodicSamples(self.values * self._other_values(other), self.y0, self.period)

    __rmul__ = __mul__

    def __neg__(self):
        return PeriodicSamples(-self.values, self.y0, self.period)

    def reciprocal(self):
        return PeriodicSamples(1.0 / self.values, self.y0, self.period)

    def __call__(self, y):
        if self._spline is None:
            yy = np.append(self.y, self.y0 + self.period)
            vv = np.append(self.values, self.values[0])
            self._spline = CubicSpline(yy, vv, bc_type="periodic")
        y = np.asarray(y, dtype=float)
        out = self._spline(self.y0 + np.mod(y - self.y0, self.period))
        return out if out.ndim else float(out)

    def sample(self, n=None):
        if n is None or n == self.n:
            return self.y, self.values.copy()
        y = self.y0 + self.period * np.arange(n) / n
        return y, self(y)

    def __repr__(self):
        return f"PeriodicSamples(n={self.n}, y0={self.y0}, period={self.period})"


# }}}


# {{{ profiles

@dataclass(frozen=True)
class BathymetryProfile:
    """Bottom elevation ``b(y)``, periodic with ``period``.

    Use the constructors :meth:`piecewise_constant`, :meth:`sinusoidal`,
    :meth:`flat` and :meth:`tabulated` rather than the raw fields.
    For piecewise-constant profiles ``levels`` holds ``(y_break, b_value)``
    pairs, with ``b = b_value`` on ``[y_break, next_break)``.
    """

    kind: str
    levels: tuple = ()
    b0: float = 0.0
    amplitude: float = 0.0
    phase: float = 0.0
    samples: tuple = ()
    y0: float = -0.5
    period: float = 1.0
    eta0: float = 0.0
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if self.period <= 0:
            raise InvalidProfileError("period must be positive")
        if self.kind == PIECEWISE_CONSTANT:
            if len(self.levels) == 0:
                raise InvalidProfileError("piecewise-constant profile needs levels")
            ys = [lv[0] for lv in self.levels]
            if np.any(np.diff(ys) <= 0) or ys[-1] - ys[0] >= self.period:
                raise InvalidProfileError("breakpoints must increase within one period")
            bmax = max(lv[1] for lv in self.levels)
        elif self.kind == SINUSOIDAL:
            bmax = self.b0 + abs(self.amplitude)
        elif self.kind == TABULATED:
            if len(self.samples) == 0:
                raise InvalidProfileError("tabulated profile needs samples")
            bmax = max(self.samples)
        else:
            raise InvalidProfileError(f"unknown profile kind {self.kind!r}")
        if not self.eta0 - bmax > 0:
            raise InvalidProfileError(
                f"non-positive depth: min H = {self.eta0 - bmax:g}")

    # -- constructors

    @classmethod
    def piecewise_constant(cls, levels, period=1.0, eta0=0.0):
        levels = tuple((float(y), float(b)) for y, b in levels)
        return cls(PIECEWISE_CONSTANT, levels=levels, y0=levels[0][0],
                   period=period, eta0=eta0)

    @classmethod
    def sinusoidal(cls, b0, amplitude, phase=0.0, period=1.0, eta0=0.0,
                   y0=-0.5, resolution=DEFAULT_RESOLUTION):
        return cls(SINUSOIDAL, b0=float(b0), amplitude=float(amplitude),
                   phase=float(phase), y0=y0, period=period, eta0=eta0,
                   resolution=resolution)

    @classmethod
    def tabulated(cls, samples, y0=-0.5, period=1.0, eta0=0.0):
        return cls(TABULATED, samples=tuple(float(s) for s in samples),
                   y0=y0, period=period, eta0=eta0)

    @classmethod
    def flat(cls, b=-1.0, period=1.0, eta0=0.0, y0=-0.5):
        return cls.piecewise_constant([(y0, b)], period=period, eta0=eta0)

    # -- queries

    @property
    def is_smooth(self):
        if self.kind == PIECEWISE_CONSTANT:
            return len(self.levels) == 1
        return True

    @property
    def is_flat(self):
        if self.kind == PIECEWISE_CONSTANT:
            return len({b for _, b in self.levels}) == 1
        if self.kind == SINUSOIDAL:
            return self.amplitude == 0.0
        return len(set(self.samples)) == 1

    def bottom(self, y):
        """Bottom elevation ``b(y)``."""
        y = np.asarray(y, dtype=float)
        if self.kind == SINUSOIDAL:
            out = self.b0 + self.amplitude * np.sin(2 * np.pi * y / self.period + self.phase)
        elif self.kind == PIECEWISE_CONSTANT:
            out = -_piecewise_depth(self)(y) + self.eta0
        else:
            out = self.eta0 - _sampled_depth(self)(y)
        return out if np.ndim(out) else float(out)

    def shifted(self, dy):
        """Profile translated by ``dy`` in ``y``: ``b_new(y) = b(y - dy)``."""
        if self.kind == PIECEWISE_CONSTANT:
            return BathymetryProfile.piecewise_constant(
                [(y + dy, b) for y, b in self.levels], self.period, self.eta0)
        if self.kind == SINUSOIDAL:
            return BathymetryProfile.sinusoidal(
                self.b0, self.amplitude, self.phase - 2 * np.pi * dy / self.period,
                self.period, self.eta0, self.y0, self.resolution)
        return BathymetryProfile.tabulated(self.samples, self.y0 + dy, self.period, self.eta0)


def pwc_setup():
    """Two-level profile: ``b = -2/5`` on ``[-1/2, 0)`` and ``-8/5`` on ``[0, 1/2)``."""
    return BathymetryProfile.piecewise_constant([(-0.5, -0.4), (0.0, -1.6)])


def sinusoidal_setup():
    """``b = -1 + (3/10) sin(2 pi y)``."""
    return BathymetryProfile.sinusoidal(-1.0, 0.3)


def _piecewise_depth(profile):
    ys = [lv[0] for lv in profile.levels]
    breaks = np.append(ys, ys[0] + profile.period)
    return PiecewisePolynomial(breaks, [[profile.eta0 - b] for _, b in profile.levels])


def _sampled_depth(profile):
    if profile.kind == SINUSOIDAL:
        n = profile.resolution
        y = profile.y0 + profile.period * np.arange(n) / n
        b = profile.b0 + profile.amplitude * np.sin(2 * np.pi * y / profile.period + profile.phase)
        return PeriodicSamples(profile.eta0 - b, profile.y0, profile.period)
    return PeriodicSamples(profile.eta0 - np.asarray(profile.samples), profile.y0, profile.period)


def depth_function(profile):
    """Still-water depth ``H = eta0 - b`` as a periodic function object."""
    if profile.kind == PIECEWISE_CONSTANT:
        return _piecewise_depth(profile)
    return _sampled_depth(profile)


def profile_eval(profile, y):
    """Depth ``H(y)``; piecewise profiles use left-closed intervals."""
    if not np.all(np.isfinite(y)):
        raise ValueError("y must be finite")
    return depth_function(profile)(y)


# }}}


# {{{ averaging functionals

def mean(f, period=1.0, n=DEFAULT_RESOLUTION, y0=0.0):
    """Period average of ``f``.

    ``f`` may be a scalar, a :class:`PiecewisePolynomial` (exact), a
    :class:`PeriodicSamples`, a 1D array of uniform periodic samples or a
    callable (sampled at ``n`` points).
    """
    if isinstance(f, (PiecewisePolynomial, PeriodicSamples)):
        return f.mean()
    if callable(f):
        y = y0 + period * np.arange(n) / n
        return float(np.mean(f(y)))
    arr = np.asarray(f, dtype=float)
    if arr.ndim == 0:
        return float(arr)
    if arr.size == 0:
        raise ValueError("cannot average an empty sample set")
    return float(np.mean(arr))


def _is_constant(f):
    if isinstance(f, PeriodicSamples):
        return bool(np.all(f.values == f.values[0]))
    return f.degree == 0 and len({float(c[0]) for c in f.coefs}) == 1


def fluct_integral(f):
    """Zero-mean antiderivative of ``f - <f>``."""
    if isinstance(f, (int, float)):
        return 0.0
    if isinstance(f, np.ndarray):
        f = PeriodicSamples(f)
    if _is_constant(f):
        return f * 0.0
    g = (f - f.mean()).integral_function()
    return g - g.mean()


def nested_fluct_integral(profile):
    """Tabulated ``[[H^{-1} [[H]] ]]``."""
    H = depth_function(profile)
    return fluct_integral(H.reciprocal() * fluct_integral(H))


def _mu_both(profile):
    H = depth_function(profile)
    brH = fluct_integral(H)
    Hinv = H.reciprocal()
    nested = fluct_integral(Hinv * brH)
    mu_a = -(H * nested).mean()
    mu_b = (Hinv * brH * brH).mean()
    return mu_a, mu_b, brH, nested


def effective_dispersion_mu(profile):
    """``mu = <H^{-1} [[H]]^2>``, cross-checked against ``-<H [[H^{-1}[[H]]]]>``."""
    mu_a, mu_b, _, _ = _mu_both(profile)
    scale = max(abs(mu_a), abs(mu_b))
    if scale > 0 and abs(mu_a - mu_b) > MU_CONSISTENCY_RTOL * scale + 1e-15:
        raise ConsistencyError(f"mu formulas disagree: {mu_a!r} vs {mu_b!r}")
    return mu_b


def verify_zero_mean_condition(profile, tol=ZERO_MEAN_TOL):
    """Return ``(ok, |<H^{-1}[[H]]>|)``."""
    H = depth_function(profile)
    residual = abs((H.reciprocal() * fluct_integral(H)).mean())
    return residual < tol, residual


@dataclass(frozen=True)
class EffectiveCoefficients:
    mean_H: float
    mu: float
    delta: float
    g: float
    brH: object
    brHinvbrH: object
    zero_mean_ok: bool
    zero_mean_residual: float = 0.0

    @property
    def wave_speed(self):
        return float(np.sqrt(self.g * self.mean_H))

    @property
    def mu_tilde(self):
        """Helmholtz coefficient ``delta^2 mu / <H>``."""
        return self.delta ** 2 * self.mu / self.mean_H

    @property
    def nonlinear_coeff(self):
        return self.delta / self.mean_H

    def as_dict(self):
        return {
            "mean_H": self.mean_H,
            "mu": self.mu,
            "delta": self.delta,
            "g": self.g,
            "c": self.wave_speed,
            "mu_tilde": self.mu_tilde,
            "zero_mean_ok": bool(self.zero_mean_ok),
            "zero_mean_residual": self.zero_mean_residual,
        }


def effective_coefficients(profile, delta=1.0, g=G):
    H = depth_function(profile)
    mu_a, mu_b, brH, nested = _mu_both(profile)
    scale = max(abs(mu_a), abs(mu_b))
    if scale > 0 and abs(mu_a - mu_b) > MU_CONSISTENCY_RTOL * scale + 1e-15:
        raise ConsistencyError(f"mu formulas disagree: {mu_a!r} vs {mu_b!r}")
    ok, residual = verify_zero_mean_condition(profile)
    return EffectiveCoefficients(
        mean_H=H.mean(), mu=mu_b, delta=float(delta), g=float(g),
        brH=brH, brHinvbrH=nested, zero_mean_ok=ok, zero_mean_residual=residual)

# }}}
