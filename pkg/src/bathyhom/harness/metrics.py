"""Transverse averaging, field comparison and peak tracking."""
import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import find_peaks

from bathyhom.traveling_wave import fit_sech2


def y_average(field2d, y=None, period=None, rtol=1e-9):
    """Mean over the second axis.

    On a uniform periodic node grid this is the trapezoidal rule and on a
    cell grid it is the midpoint rule (exact for cell averages); both reduce
    to the arithmetic mean.  When ``y`` and ``period`` are given the grid
    must cover exactly one period.
    """
    field2d = np.asarray(field2d, dtype=float)
    if field2d.ndim != 2:
        raise ValueError("expected a 2D field indexed [x, y]")
    if y is not None and period is not None:
        y = np.asarray(y, dtype=float)
        if y.size != field2d.shape[1]:
            raise ValueError("y does not match the field")
        dy = np.diff(y)
        if y.size < 2 or not np.allclose(dy, dy[0], rtol=rtol, atol=0.0) or \
                abs(dy[0] * y.size - period) > rtol * period:
            raise ValueError("y grid does not cover exactly one period uniformly")
    return field2d.mean(axis=1)


def _peak_position(x, f):
    """Sub-grid maximum from the parabola through the top three samples."""
    i = int(np.argmax(f))
    if i == 0 or i == len(f) - 1:
        return float(x[i])
    fm, f0, fp = f[i - 1], f[i], f[i + 1]
    denom = fm - 2 * f0 + fp
    shift = 0.0 if denom == 0 else 0.5 * (fm - fp) / denom
    return float(x[i] + shift * (x[i + 1] - x[i]))


def _check_single_peak(f, ratio=0.9):
    peaks, props = find_peaks(f, height=ratio * np.max(f))
    if len(peaks) > 1:
        raise ValueError("ambiguous peak: two maxima within 10% of each other")


def peak_position(x, f, x_window=None):
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    if x_window is not None:
        m = (x >= x_window[0]) & (x <= x_window[1])
        x, f = x[m], f[m]
    _check_single_peak(f)
    return _peak_position(x, f)


def track_peak_speed(times, x, fields, x_window=None):
    """Least-squares speed of the tracked maximum.

    ``x_window`` is a fixed ``(lo, hi)`` pair or a callable ``t -> (lo, hi)``.
    Returns ``(speed, rms residual of the linear fit)``.
    """
    times = np.asarray(times, dtype=float)
    if times.size < 3:
        raise ValueError("need at least three snapshots")
    pos = []
    for t, f in zip(times, fields):
        win = x_window(t) if callable(x_window) else x_window
        pos.append(peak_position(x, f, win))
    pos = np.asarray(pos)
    coef = np.polyfit(times, pos, 1)
    resid = pos - np.polyval(coef, times)
    return float(coef[0]), float(np.sqrt(np.mean(resid ** 2)))


def compare_fields(xa, a, xb, b):
    """Compare ``b`` against the reference ``a`` on the finer of the two grids.

    Both fields are interpolated with cubic splines onto the finer grid
    restricted to the common x-range.  Returns absolute L-infinity and L2
    norms and their values relative to the reference amplitude and norm.
    """
    xa, a, xb, b = (np.asarray(v, dtype=float) for v in (xa, a, xb, b))
    lo = max(xa[0], xb[0])
    hi = min(xa[-1], xb[-1])
    if not hi > lo:
        raise ValueError("fields have disjoint x-ranges")
    fine = xa if np.median(np.diff(xa)) <= np.median(np.diff(xb)) else xb
    x = fine[(fine >= lo) & (fine <= hi)]
    fa = a[(xa >= lo) & (xa <= hi)] if fine is xa else CubicSpline(xa, a)(x)
    fb = b[(xb >= lo) & (xb <= hi)] if fine is xb else CubicSpline(xb, b)(x)
    d = fb - fa
    linf = float(np.max(np.abs(d)))
    l2 = float(np.sqrt(np.trapezoid(d ** 2, x))) if x.size > 1 else linf
    amp = float(np.max(np.abs(fa)))
    ref_l2 = float(np.sqrt(np.trapezoid(fa ** 2, x))) if x.size > 1 else amp
    return {
        "linf": linf,
        "l2": l2,
        "amplitude": amp,
        "rel_linf": linf / amp if amp > 0 else float("inf") if linf > 0 else 0.0,
        "rel_l2": l2 / ref_l2 if ref_l2 > 0 else float("inf") if l2 > 0 else 0.0,
    }


def fold_onto(x_src, f_src, x_lo, length):
    """Map a field on a long domain onto the periodic cell ``[x_lo, x_lo+length)``.

    Contributions ``f(x + m*length)`` for ``m >= 0`` inside the source range
    are summed; content at ``x < x_lo`` is discarded.  This models a wave
    that has left a wall at ``x_lo`` and then travels on a periodic domain.
    """
    x_src = np.asarray(x_src, dtype=float)
    f_src = np.asarray(f_src, dtype=float)
    spl = CubicSpline(x_src, f_src)

    def folded(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        m = 0
        while x_lo + m * length <= x_src[-1]:
            xs = x + m * length
            inside = (xs >= x_src[0]) & (xs <= x_src[-1])
            out[inside] += spl(xs[inside])
            m += 1
        return out

    return folded


def solitary_fits(x, eta, min_height=0.2, threshold=0.5):
    """Fit ``A sech^2`` to every crest above ``min_height * max(eta)``.

    Each crest is fitted on the window between its neighbouring troughs.
    Returns a list of dicts ``{x, A, alpha, residual}`` ordered by height.
    """
    x = np.asarray(x, dtype=float)
    eta = np.asarray(eta, dtype=float)
    top = np.max(eta)
    if not top > 0:
        return []
    peaks, _ = find_peaks(eta, height=min_height * top, prominence=0.5 * min_height * top)
    troughs, _ = find_peaks(-eta)
    out = []
    for p in peaks:
        left = troughs[troughs < p]
        right = troughs[troughs > p]
        lo = left[-1] if left.size else 0
        hi = right[0] + 1 if right.size else eta.size
        try:
            A, alpha, res = fit_sech2(x[lo:hi], eta[lo:hi], threshold=threshold)
        except ValueError:
            continue
        out.append({"x": float(x[p]), "A": A, "alpha": alpha, "residual": res})
    return sorted(out, key=lambda d: -d["A"])
