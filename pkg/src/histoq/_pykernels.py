"""Pure-numpy implementations of the hot kernels.

Every function here has a twin with the same signature in the compiled
``_ckernels`` extension.  This module is the fallback when the extension is
not built, and the reference the compiled kernels are tested against.
"""

import numpy as np

from ._weideman import COEFFS as _W_COEFFS, L as _W_L

BACKEND = "python"

_SQRT_PI = np.sqrt(np.pi)
_TWO_OVER_SQRT_PI = 2.0 / _SQRT_PI
# Below this modulus erf is summed from its Taylor series.
_SERIES_RADIUS = 2.0
_SERIES_TERMS = 60
# exp(-z**2) overflows beyond this real part of -z**2.
_EXP_LIMIT = 709.0


def _faddeeva_upper(z):
    """w(z) for Im z >= 0 by Weideman's rational expansion."""
    denom = _W_L - 1j * z
    big_z = (_W_L + 1j * z) / denom
    p = np.zeros_like(z)
    for c in _W_COEFFS:
        p = p * big_z + c
    return 2.0 * p / (denom * denom) + (1.0 / _SQRT_PI) / denom


def faddeeva(z):
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    upper = z.imag >= 0
    out[upper] = _faddeeva_upper(z[upper])
    lo = ~upper
    if np.any(lo):
        zl = z[lo]
        with np.errstate(over="ignore", invalid="ignore"):
            out[lo] = 2.0 * np.exp(-zl * zl) - _faddeeva_upper(-zl)
    return out


def _erf_series(z):
    z2 = z * z
    term = z.copy()
    total = z.copy()
    for n in range(1, _SERIES_TERMS):
        term = term * (-z2) / n
        total = total + term / (2 * n + 1)
    return _TWO_OVER_SQRT_PI * total


def _erfc_right(z):
    """erfc(z) for Re z >= 0, as exp(-z^2) w(iz)."""
    arg = -(z * z)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        scale = np.exp(np.minimum(arg.real, _EXP_LIMIT)) * (np.cos(arg.imag) + 1j * np.sin(arg.imag))
        return scale * _faddeeva_upper(1j * z)


def erf(z):
    """Complex error function, evaluated in the first quadrant and reflected."""
    z = np.asarray(z, dtype=complex)
    flip_re = z.real < 0
    flip_im = z.imag < 0
    q = np.abs(z.real) + 1j * np.abs(z.imag)
    out = np.empty_like(q)
    small = np.abs(q) < _SERIES_RADIUS
    if np.any(small):
        out[small] = _erf_series(q[small])
    big = ~small
    if np.any(big):
        out[big] = 1.0 - _erfc_right(q[big])
    out = np.where(flip_re ^ flip_im, np.conj(out), out)
    return np.where(flip_re, -out, out)


def erfc(z):
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    right = z.real >= 0
    # Near the origin erfc = 1 - erf is well conditioned.
    small = np.abs(z) < _SERIES_RADIUS
    direct = right & ~small
    if np.any(direct):
        out[direct] = _erfc_right(z[direct])
    left = ~right & ~small
    if np.any(left):
        out[left] = 2.0 - _erfc_right(-z[left])
    if np.any(small):
        out[small] = 1.0 - erf(z[small])
    return out


def spin_probabilities(theta, phi, delta):
    """Closed-form two-time spin candidate probabilities, stacked (++, +-, -+, --)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c2 = np.cos(theta / 2) ** 2
    s2 = np.sin(theta / 2) ** 2
    cd2 = np.cos(delta / 2) ** 2
    sd2 = np.sin(delta / 2) ** 2
    cross = 0.25 * np.cos(phi) * np.sin(theta) * np.sin(delta)
    return np.stack([c2 * cd2 + cross, c2 * sd2 - cross, s2 * sd2 + cross, s2 * cd2 - cross])


def spin_min_grid(delta, theta, phi):
    """Minimum of the four candidate probabilities on a theta x phi grid."""
    th, ph = np.meshgrid(np.asarray(theta, float), np.asarray(phi, float), indexing="ij")
    return spin_probabilities(th, ph, delta).min(axis=0)


def ensemble_row(amp, phase, n_total):
    """Re[z^n (1-z)^(N-n)] for n = 0..N with z = amp * exp(i phase), in polar form."""
    n = np.arange(n_total + 1, dtype=float)
    one_minus = 1.0 - amp * np.exp(1j * phase)
    rho = abs(one_minus)
    psi = np.angle(one_minus)
    with np.errstate(divide="ignore"):
        log_a = np.log(amp) if amp > 0 else -np.inf
        log_r = np.log(rho) if rho > 0 else -np.inf
    m = n_total - n
    # 0 * log(0) is taken as 0 so that 0^0 = 1.
    la = np.zeros_like(n)
    lr = np.zeros_like(n)
    la[n > 0] = n[n > 0] * log_a
    lr[m > 0] = m[m > 0] * log_r
    return np.exp(la + lr) * np.cos(n * phase + m * psi)


def ensemble_horizon(amp, phase, n_max, threshold):
    """First (N, n_C, value) with value < threshold, scanning N = 1..n_max; None if no failure."""
    for n_total in range(1, n_max + 1):
        row = ensemble_row(amp, phase, n_total)
        bad = np.nonzero(row < threshold)[0]
        if bad.size:
            k = int(bad[0])
            return n_total, k, float(row[k])
    return None


def two_slit_densities(y, d, dist, k):
    """(wU, wL, wtot) per unit |a|^2 on an array of screen positions."""
    y = np.asarray(y, dtype=float)
    su = np.hypot(d / 2 - y, dist)
    sl = np.hypot(d / 2 + y, dist)
    c = np.cos(k * (sl - su))
    wu = (1.0 / su) * (1.0 / su + c / sl)
    wl = (1.0 / sl) * (1.0 / sl + c / su)
    return wu, wl, wu + wl


def spacetime_integrands(x, center, k0, sigma):
    """Integrands on x > 0 for the remain-right probability and the R/not-R overlap.

    Returns (remain, overlap) where ``remain`` is real and ``overlap`` complex.
    """
    x = np.asarray(x, dtype=float)
    norm = 1.0 / np.sqrt(2.0 * np.pi * sigma * sigma)
    s2 = 2.0 * sigma * sigma
    direct = np.exp(-((x - center) ** 2) / s2)
    mirror = np.exp(-(x * x + center * center) / s2)
    reflected = np.exp(-((x + center) ** 2) / s2)
    remain = norm * (direct - mirror * np.cos(2.0 * k0 * x))
    overlap = norm * (mirror * np.exp(-2j * k0 * x) - reflected)
    return remain, overlap
