r"""
Solitary traveling waves of the homogenized system
==================================================

Substituting :math:`\bar\eta(x - Vt)`, :math:`\bar q(x - Vt)` and
integrating once reduces the homogenized equations to the conservative
oscillator :math:`q'' = -U'(q)` with

.. math::

    U(q) = \frac{1}{\tilde\mu V}\left(\frac{a_2 q^3}{6} - \frac{V q^2}{2}
        - \frac{a_1}{a_2} q - \frac{a_1 V}{a_2^2}\log\left(1 - \frac{a_2 q}{V}\right)\right),

where :math:`a_1 = g\langle H\rangle`, :math:`a_2 = \delta/\langle H\rangle`,
:math:`\tilde\mu = \delta^2\mu/\langle H\rangle`, and
:math:`\eta = q/(V - a_2 q)`.  For :math:`V > \sqrt{a_1}` the origin is a
saddle and the solitary wave is its homoclinic orbit, which turns at the
positive zero of :math:`U`.
"""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, least_squares
from scipy.signal import find_peaks

from bathyhom.errors import TravelingWaveError

DEFAULT_EPS = 1e-8


@dataclass(frozen=True)
class TravelingWaveParams:
    V: float
    a1: float
    a2: float
    mu_tilde: float

    def __post_init__(self):
        if not (self.a1 > 0 and self.a2 > 0 and self.mu_tilde > 0 and self.V > 0):
            raise ValueError("V, a1, a2 and mu_tilde must be positive")

    @classmethod
    def from_coeffs(cls, V, coeffs):
        return cls(float(V), coeffs.g * coeffs.mean_H, coeffs.delta / coeffs.mean_H,
                   coeffs.mu_tilde)

    @property
    def q_max(self):
        """Upper end ``V/a2`` of the physical range."""
        return self.V / self.a2

    @property
    def supersonic(self):
        return self.V ** 2 > self.a1

    @property
    def saddle_rate(self):
        """Unstable eigenvalue ``sqrt((V^2 - a1)/(mu_tilde V^2))`` at the origin."""
        if not self.supersonic:
            raise TravelingWaveError("origin is not a saddle for V <= sqrt(a1)")
        return float(np.sqrt((self.V ** 2 - self.a1) / (self.mu_tilde * self.V ** 2)))


def _domain_check(q, params):
    if np.any(params.a2 * np.asarray(q) >= params.V):
        raise ValueError(f"q must stay below V/a2 = {params.q_max:.6g}")


def potential_U(q, params):
    """Potential of the traveling-wave oscillator; ``U(0) = 0``."""
    _domain_check(q, params)
    q = np.asarray(q, dtype=float)
    V, a1, a2 = params.V, params.a1, params.a2
    val = (a2 * q ** 3 / 6 - V * q ** 2 / 2 - a1 / a2 * q
           - a1 / a2 ** 2 * V * np.log1p(-a2 * q / V))
    return val / (params.mu_tilde * V)


def potential_dU(q, params):
    _domain_check(q, params)
    q = np.asarray(q, dtype=float)
    V, a1, a2 = params.V, params.a1, params.a2
    return (a2 * q ** 2 / 2 - V * q + a1 * q / (V - a2 * q)) / (params.mu_tilde * V)


def potential_d2U(q, params):
    _domain_check(q, params)
    q = np.asarray(q, dtype=float)
    V, a1, a2 = params.V, params.a1, params.a2
    return (a2 * q - V + a1 * V / (V - a2 * q) ** 2) / (params.mu_tilde * V)


def find_equilibria(params, n_scan=4000):
    """Zeros of ``U'`` below ``V/a2`` as ``[(q, "saddle" | "center"), ...]``.

    ``U'(q) = q * f(q)``; the origin is always listed and the zeros of ``f``
    are bracketed on a scan grid and polished with ``brentq``.
    """
    V, a1, a2 = params.V, params.a1, params.a2

    def f(q):
        return a2 * q / 2 - V + a1 / (V - a2 * q)

    # f is positive for very negative q and tends to +inf at V/a2
    s = V * (1.0 - np.geomspace(1e-12, 1.0 + 8.0 * (1 + a1 / V ** 2), n_scan))
    q_grid = np.sort(s / a2)
    fv = f(q_grid)
    roots = []
    for i in np.nonzero(np.sign(fv[:-1]) * np.sign(fv[1:]) < 0)[0]:
        try:
            roots.append(brentq(f, q_grid[i], q_grid[i + 1], xtol=1e-15, rtol=1e-15))
        except (ValueError, RuntimeError) as exc:
            raise TravelingWaveError(f"root finder failed: {exc}") from exc
    out = []
    for q in sorted([0.0] + roots):
        if q != 0.0 and abs(q) < 1e-14 * params.q_max:
            continue
        kind = "saddle" if potential_d2U(q, params) < 0 else "center"
        out.append((float(q), kind))
    return out


def turning_point(params):
    """Positive zero of ``U``, the crest of the homoclinic orbit."""
    if not params.supersonic:
        raise TravelingWaveError("no homoclinic orbit for V <= sqrt(a1)")
    centers = [q for q, kind in find_equilibria(params) if kind == "center" and q > 0]
    if not centers:
        raise TravelingWaveError("no center equilibrium to the right of the saddle")
    lo = centers[0]
    hi = params.q_max * (1.0 - 1e-14)
    if potential_U(hi, params) <= 0:
        raise TravelingWaveError("U stays negative up to V/a2: orbit escapes")
    return brentq(lambda q: float(potential_U(q, params)), lo, hi, xtol=1e-16, rtol=1e-15)


@dataclass
class TravelingWaveSolution:
    params: TravelingWaveParams
    xi: np.ndarray
    q: np.ndarray
    eta: np.ndarray
    amplitude: float
    alpha: float
    residual: float
    energy_drift: float
    half_length: float
    _dense: object = None

    @property
    def V(self):
        return self.params.V

    @property
    def q_peak(self):
        return float(np.max(self.q))

    def sample_q(self, x, x0=0.0):
        """``q`` at ``x`` for a crest at ``x0``; exponential tails beyond the orbit."""
        r = np.abs(np.asarray(x, dtype=float) - x0)
        T = self.half_length
        inside = r <= T
        out = np.empty_like(r)
        if np.any(inside):
            out[inside] = self._dense(T - r[inside])[0]
        q_end = self._dense(0.0)[0]
        out[~inside] = q_end * np.exp(-self.params.saddle_rate * (r[~inside] - T))
        return out

    def sample(self, x, x0=0.0):
        """``(eta, q)`` on ``x`` with the crest at ``x0``."""
        q = self.sample_q(x, x0)
        return q / (self.params.V - self.params.a2 * q), q

    def energy(self):
        """``0.5 q'^2 + U(q)`` on the stored samples (zero on the separatrix)."""
        dq = self._dense(self.half_length - np.abs(self.xi))[1]
        return 0.5 * dq ** 2 + potential_U(self.q, self.params)


def integrate_homoclinic(params, eps=DEFAULT_EPS, n_samples=4001, rtol=1e-12,
                         atol=1e-16, max_length=1e4, fit_threshold=0.5):
    """Homoclinic orbit of the saddle at the origin.

    Integration starts at ``eps * q_c`` (``q_c`` the center equilibrium)
    along the unstable eigenvector ``(1, lambda)`` and stops at the crest
    ``q' = 0``; the descending half is the mirror image.
    """
    if not params.supersonic:
        raise TravelingWaveError(
            f"V = {params.V:.6g} does not exceed sqrt(a1) = {np.sqrt(params.a1):.6g}")
    lam = params.saddle_rate
    centers = [q for q, kind in find_equilibria(params) if kind == "center" and q > 0]
    if not centers:
        raise TravelingWaveError("no center equilibrium; cannot scale the perturbation")
    q0 = eps * centers[0]
    limit = params.q_max

    def rhs(_, y):
        if params.a2 * y[0] >= params.V:
            return [np.nan, np.nan]
        return [y[1], -float(potential_dU(y[0], params))]

    def crest(_, y):
        return y[1]
    crest.terminal = True
    crest.direction = -1

    def escape(_, y):
        return limit * (1 - 1e-12) - y[0]
    escape.terminal = True

    sol = solve_ivp(rhs, (0.0, max_length), [q0, lam * q0], method="DOP853",
                    rtol=rtol, atol=atol, events=(crest, escape), dense_output=True)
    if sol.t_events[1].size:
        raise TravelingWaveError("orbit escaped to q >= V/a2")
    if not sol.t_events[0].size:
        raise TravelingWaveError(f"no crest within xi < {max_length:g}: {sol.message}")
    T = float(sol.t_events[0][0])
    xi = np.linspace(-T, T, n_samples)
    y = sol.sol(T - np.abs(xi))
    q = y[0]
    eta = q / (params.V - params.a2 * q)
    energy = 0.5 * sol.y[1] ** 2 + potential_U(sol.y[0], params)
    A, alpha, residual = fit_sech2(xi, eta, threshold=fit_threshold)
    return TravelingWaveSolution(params, xi, q, eta, A, alpha, residual,
                                 float(np.max(np.abs(energy))), T, sol.sol)


def _refine_peak(xi, eta, half_width=3):
    """Crest position and value from a local interpolating polynomial."""
    i = int(np.argmax(eta))
    if i == 0 or i == len(xi) - 1:
        raise ValueError("profile maximum lies on the sample boundary")
    lo, hi = max(i - half_width, 0), min(i + half_width + 1, len(xi))
    h = xi[i + 1] - xi[i]
    poly = np.polynomial.Polynomial.fit((xi[lo:hi] - xi[i]) / h, eta[lo:hi], hi - lo - 1,
                                        domain=[-1, 1], window=[-1, 1])
    d = poly.deriv()
    if d(-1.0) > 0 > d(1.0):
        s = brentq(d, -1.0, 1.0, xtol=1e-15)
        return float(xi[i] + s * h), float(max(poly(s), eta[i]))
    return float(xi[i]), float(eta[i])


def fit_sech2(xi, eta, threshold=0.5):
    """Fit ``A sech^2(alpha sqrt(A) (xi - xi0))`` to a single-peaked profile.

    ``A`` is the spline-refined crest value; ``alpha`` (with a small
    correction to the crest position) minimizes the squared misfit of
    ``log(eta/A)`` over samples with ``eta >= threshold * A``.
    Returns ``(A, alpha, residual)`` with the max-norm residual relative
    to ``A``.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if xi.shape != eta.shape or xi.ndim != 1:
        raise ValueError("xi and eta must be 1D arrays of equal length")
    top = np.max(eta)
    if not top > 0:
        raise ValueError("profile has no positive crest")
    peaks, _ = find_peaks(eta, height=0.1 * top)
    if len(peaks) > 1:
        raise ValueError(f"expected a single crest, found {len(peaks)}")
    x0, A = _refine_peak(xi, eta)
    m = eta >= threshold * A
    r = np.sqrt(A) * (xi[m] - x0)
    target = np.log(np.clip(eta[m], 1e-300, None) / A)

    def misfit(theta):
        alpha, shift = theta
        return target + 2.0 * np.log(np.cosh(alpha * (r - np.sqrt(A) * shift)))

    # initial alpha from the sample farthest from the crest; the crest
    # offset is refined jointly because the spline peak is only approximate
    far = np.argmax(np.abs(r))
    guess = (np.arccosh(np.sqrt(A / max(eta[m][far], 1e-300))) / abs(r[far])
             if abs(r[far]) > 0 and eta[m][far] < A else 1.0)
    res = least_squares(misfit, [guess, 0.0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    alpha = float(abs(res.x[0]))
    x0 = x0 + float(res.x[1])
    model = A / np.cosh(alpha * np.sqrt(A) * (xi - x0)) ** 2
    return A, alpha, float(np.max(np.abs(eta - model)) / A)


def sech2_profile(x, A, alpha, x0=0.0):
    return A / np.cosh(alpha * np.sqrt(A) * (np.asarray(x) - x0)) ** 2


def amplitude_for_speed(V, coeffs, eps=DEFAULT_EPS):
    """Crest ``eta`` of the solitary wave moving at ``V`` (from the turning point)."""
    params = TravelingWaveParams.from_coeffs(V, coeffs)
    qp = turning_point(params)
    return qp / (params.V - params.a2 * qp)


def speed_for_amplitude(A, coeffs, v_max_factor=1.5):
    """Invert :func:`amplitude_for_speed` with ``brentq``."""
    if not A > 0:
        raise ValueError("amplitude must be positive")
    c = coeffs.wave_speed
    lo, hi = c * (1 + 1e-9), c * v_max_factor
    if amplitude_for_speed(hi, coeffs) < A:
        raise TravelingWaveError(f"amplitude {A:g} beyond the speed bracket")
    return brentq(lambda V: amplitude_for_speed(V, coeffs) - A, lo, hi, xtol=1e-14)


def rescaled_profile(solution, x):
    """``eta / A`` as a function of ``x / sqrt(A)``: ``x`` is the rescaled coordinate."""
    A = solution.amplitude
    eta, _ = solution.sample(np.asarray(x) / np.sqrt(A))
    return eta / A
