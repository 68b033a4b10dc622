"""Continuum examples evaluated by quadrature.

Units have hbar = 1.  Three models live here:

* two slits: candidate densities on the screen and their bin integrals;
* a free Gaussian packet checked for position at two times, with the
  localization probability and its decoherence functional;
* a packet approaching a point, with the candidate probability of having
  stayed on the right throughout an interval (method of images).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._kernels import kernels
from .quadrature import QuadratureError, QuadratureSpec, QuadResult, gauss_kronrod, gauss_kronrod_2d
from .special import complex_erf, complex_erfc

_SQRT2 = math.sqrt(2.0)
_SQRT_PI = math.sqrt(math.pi)
# A contour integrand below exp(-_DESCENT_EXPONENT) is dropped.
_DESCENT_EXPONENT = 40.0


class RegimeWarning(UserWarning):
    """Parameters lie outside the regime where an approximate formula is trusted."""


def _warn(msg):
    warnings.warn(msg, RegimeWarning, stacklevel=3)


# --------------------------------------------------------------------------
# Two slits


@dataclass(frozen=True)
class TwoSlitGeometry:
    d: float  # slit separation
    D: float  # distance to the screen
    k: float  # wave number
    a: complex = 1.0

    def __post_init__(self):
        if not (self.d > 0 and self.D > 0 and self.k > 0):
            raise ValueError("d, D and k must be positive")

    @classmethod
    def from_dimensionless(cls, kd: float, kD: float, k: float = 1.0, a: complex = 1.0) -> "TwoSlitGeometry":
        return cls(kd / k, kD / k, k, a)

    @property
    def fringe_spacing(self) -> float:
        """2 pi D / (k d), the far-field fringe period."""
        return 2.0 * math.pi * self.D / (self.k * self.d)

    def amplitudes(self, y):
        """(Psi_U, Psi_L) at screen positions ``y``."""
        y = np.asarray(y, dtype=float)
        su = np.hypot(0.5 * self.d - y, self.D)
        sl = np.hypot(0.5 * self.d + y, self.D)
        return self.a * np.exp(1j * self.k * su) / su, self.a * np.exp(1j * self.k * sl) / sl


def two_slit_densities(y, g: TwoSlitGeometry):
    """Candidate densities (upper, lower, total) at ``y``."""
    scale = abs(g.a) ** 2
    wu, wl, wt = kernels.two_slit_densities(y, float(g.d), float(g.D), float(g.k))
    if np.ndim(y) == 0:
        return float(wu) * scale, float(wl) * scale, float(wt) * scale
    return wu * scale, wl * scale, wt * scale


def _slit_density(which, g):
    if which not in ("U", "L"):
        raise ValueError("which must be 'U' or 'L'")
    pick = 0 if which == "U" else 1
    return lambda y: two_slit_densities(y, g)[pick]


def two_slit_bin_probability(bin_range, which: str, g: TwoSlitGeometry, q: QuadratureSpec | None = None) -> float:
    """Integral of the upper or lower candidate density over one screen bin."""
    lo, hi = map(float, bin_range)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("bin must be finite")
    r = gauss_kronrod(_slit_density(which, g), lo, hi, q, max_width=g.fringe_spacing / 8)
    return float(r.value)


def two_slit_total_probability(y_max: float, g: TwoSlitGeometry, q: QuadratureSpec | None = None) -> float:
    f = lambda y: two_slit_densities(y, g)[2]
    return float(gauss_kronrod(f, -y_max, y_max, q, max_width=g.fringe_spacing / 8).value)


def uniform_bins(y_range, width: float) -> np.ndarray:
    """Edges of equal bins of ``width`` centred in ``y_range`` (any remainder is split between the ends)."""
    lo, hi = map(float, y_range)
    if width <= 0 or hi <= lo:
        raise ValueError("need width > 0 and a non-empty range")
    n = int(math.floor((hi - lo) / width + 1e-9))
    if n < 1:
        raise ValueError(f"width {width} does not fit in {y_range}")
    start = 0.5 * (lo + hi) - 0.5 * n * width
    return start + width * np.arange(n + 1)


def two_slit_bin_table(g: TwoSlitGeometry, edges, q: QuadratureSpec | None = None):
    """Per-bin (p_U, p_L) for consecutive ``edges``."""
    edges = np.asarray(edges, dtype=float)
    fu, fl = _slit_density("U", g), _slit_density("L", g)
    w = g.fringe_spacing / 8
    rows = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        rows.append((gauss_kronrod(fu, lo, hi, q, max_width=w).value, gauss_kronrod(fl, lo, hi, q, max_width=w).value))
    return np.array(rows, dtype=float).reshape(-1, 2)


@dataclass(frozen=True)
class BinWidthResult:
    width: float | None  # smallest passing width, None when none passed
    fringe_spacing: float
    passing: tuple
    failing: tuple
    min_probability: dict  # width -> smallest bin probability found


def min_lp_binwidth(g: TwoSlitGeometry, y_range, widths, q: QuadratureSpec | None = None) -> BinWidthResult:
    """Smallest of ``widths`` whose uniform binning of ``y_range`` gives no negative p_U or p_L."""
    widths = [float(w) for w in widths]
    if not widths:
        raise ValueError("width list is empty")
    if any(b > a for a, b in zip(widths, widths[1:])):
        raise ValueError("widths must be sorted in descending order")
    passing, failing, mins = [], [], {}
    for w in widths:
        table = two_slit_bin_table(g, uniform_bins(y_range, w), q)
        m = float(table.min())
        mins[w] = m
        (passing if m >= 0.0 else failing).append(w)
    best = min(passing) if passing else None
    return BinWidthResult(best, g.fringe_spacing, tuple(passing), tuple(failing), mins)


# --------------------------------------------------------------------------
# Free Gaussian packet


@dataclass(frozen=True)
class GaussianPacket:
    """exp(i K0 x - (x - X0)^2 / 4 sigma^2) / (2 pi sigma^2)^(1/4)."""

    sigma: float = 1.0
    M: float = 1.0
    X0: float = 0.0
    K0: float = 0.0

    def __post_init__(self):
        if not (self.sigma > 0 and self.M > 0):
            raise ValueError("sigma and M must be positive")

    @property
    def spreading_time(self) -> float:
        return 2.0 * self.sigma**2 * self.M

    def wavelength(self, tau: float) -> float:
        """Oscillation length sqrt(4 pi tau / M) of the propagator at time ``tau``."""
        return math.sqrt(4.0 * math.pi * tau / self.M)

    def time_for_wavelength(self, lam: float) -> float:
        return lam * lam * self.M / (4.0 * math.pi)

    def initial(self, x):
        x = np.asarray(x, dtype=float)
        n = (2.0 * math.pi * self.sigma**2) ** -0.25
        return n * np.exp(1j * self.K0 * x - (x - self.X0) ** 2 / (4.0 * self.sigma**2))

    def evolved(self, x, t: float, spreading: bool = True):
        """Free evolution to time ``t``.

        With ``spreading=False`` the packet only translates and picks up the
        kinetic phase, which is accurate for t much less than the spreading time.
        """
        x = np.asarray(x, dtype=float)
        n = (2.0 * math.pi * self.sigma**2) ** -0.25
        centre = self.X0 + self.K0 * t / self.M
        phase = np.exp(1j * (self.K0 * x - 0.5 * self.K0**2 * t / self.M))
        if not spreading:
            return n * phase * np.exp(-((x - centre) ** 2) / (4.0 * self.sigma**2))
        s = 1.0 + 1j * t / self.spreading_time
        return n * s**-0.5 * phase * np.exp(-((x - centre) ** 2) / (4.0 * self.sigma**2 * s))


def propagated_interval(packet: GaussianPacket, x, tau: float, a: float, b: float):
    """Integral over x1 in [a, b] of K(x, x1, tau) Psi(x1, 0), in closed form.

    K is the free propagator sqrt(M / 2 pi i tau) exp(i M (x - x1)^2 / 2 tau).
    Differences of erf are taken as differences of erfc on whichever side
    of the origin both arguments lie, so thin tails are not lost to
    cancellation.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    x = np.asarray(x, dtype=float)
    s2 = packet.sigma**2
    m = packet.M / (2.0 * tau)
    A = 1.0 / (4.0 * s2) - 1j * m
    B = -2j * m * x + 1j * packet.K0 + packet.X0 / (2.0 * s2)
    C = 1j * m * x * x - packet.X0**2 / (4.0 * s2)
    root = np.sqrt(A)
    shift = B / (2.0 * A)
    lo = root * (a - shift)
    hi = root * (b - shift)
    diff = np.where(
        lo.real > 0,
        complex_erfc(lo) - complex_erfc(hi),
        np.where(hi.real < 0, complex_erfc(-hi) - complex_erfc(-lo), complex_erf(hi) - complex_erf(lo)),
    )
    norm = (2.0 * math.pi * s2) ** -0.25
    prop = math.sqrt(m / math.pi) * complex(math.cos(-math.pi / 4), math.sin(-math.pi / 4))
    return norm * prop * np.exp(C + B * shift / 2.0) * (0.5 * _SQRT_PI / root) * diff


def _interval(iv, packet, q):
    lo, hi = map(float, iv)
    r = q.truncation * packet.sigma
    lo = max(lo, packet.X0 - r) if math.isinf(lo) else lo
    hi = min(hi, packet.X0 + r) if math.isinf(hi) else hi
    return lo, max(lo, hi)


def free_particle_joint_probability(delta1, delta2, packet: GaussianPacket, tau: float,
                                    q: QuadratureSpec | None = None, form: str = "exact") -> float:
    """Candidate probability to be in ``delta1`` at time 0 and ``delta2`` at ``tau``.

    ``form="exact"`` integrates conj(Psi(x2, tau)) against the closed-form
    propagated interval.  ``form="short"`` drops the spreading of the final
    wave function, leaving the double integral with the oscillating
    propagator kernel; it is only meant for tau much less than the spreading time.
    Infinite interval ends are cut at ``q.truncation`` widths from the centre.
    """
    q = q or QuadratureSpec()
    if tau <= 0:
        raise ValueError("tau must be positive")
    a1, b1 = _interval(delta1, packet, q)
    a2, b2 = _interval(delta2, packet, q)
    if a1 == b1 or a2 == b2:
        return 0.0
    lam = packet.wavelength(tau)
    if form == "exact":
        f = lambda x2: (np.conj(packet.evolved(x2, tau)) * propagated_interval(packet, x2, tau, a1, b1)).real
        pts = [p for p in (a1, b1) if a2 < p < b2]
        return float(gauss_kronrod(f, a2, b2, q, breakpoints=pts).value)
    if form != "short":
        raise ValueError(f"unknown form {form!r}")
    if tau > 0.1 * packet.spreading_time:
        _warn(f"tau = {tau:g} is within a factor 10 of the spreading time {packet.spreading_time:g}")
    m = packet.M / (2.0 * tau)
    pref = math.sqrt(m / math.pi) * complex(math.cos(-math.pi / 4), math.sin(-math.pi / 4))

    def kernel(x1, x2):
        return (np.conj(packet.initial(x2)) * pref * np.exp(1j * m * (x2 - x1) ** 2) * packet.initial(x1)).real

    return float(gauss_kronrod_2d(kernel, (a1, b1), (a2, b2), q, max_width=lam / 8).value)


def fresnel_j(z, lam: float):
    """Re erf(sqrt(pi) (1 - i) z / lam)."""
    arg = _SQRT_PI * (1 - 1j) * np.asarray(z, dtype=float) / lam
    return np.real(complex_erf(arg))


def _check_stationary(packet):
    if packet.X0 != 0 or packet.K0 != 0:
        raise ValueError("localization formulas assume a packet at rest at the origin")


def localization_probability(half_width: float, packet: GaussianPacket, lam: float,
                             q: QuadratureSpec | None = None, method: str = "descent") -> float:
    """p_L for staying within [-half_width, half_width] at both times, for lam << sigma.

    ``method="descent"`` swaps the order of integration so that the
    oscillating factor exp(i 2 pi xi^2 / lam^2) multiplies an erf in xi, and
    deforms the xi path onto the two steepest-descent rays leaving its
    endpoints at 45 degrees.  ``method="x"`` integrates the
    position-average variable directly against Re erf; it needs panels
    finer than the oscillation and is only practical for half_width/lam up to
    a few tens.
    """
    q = q or QuadratureSpec()
    _check_stationary(packet)
    if lam <= 0:
        raise ValueError("lam must be positive")
    if half_width < 0:
        raise ValueError("half_width must be non-negative")
    if half_width == 0:
        return 0.0
    if lam > 0.1 * packet.sigma:
        _warn(f"lam/sigma = {lam / packet.sigma:g} is not small")
    h = float(half_width)
    sig = packet.sigma
    if method == "x":
        f = lambda X: np.exp(-X * X / (2 * sig * sig)) * fresnel_j(2.0 * (h - X), lam)
        r = gauss_kronrod(f, 0.0, h, q, max_width=lam / 8)
        return float(math.sqrt(2.0 / (math.pi * sig * sig)) * r.value)
    if method != "descent":
        raise ValueError(f"unknown method {method!r}")
    kappa = 2.0 * math.pi / lam**2
    s_max = math.sqrt(_DESCENT_EXPONENT / kappa)
    ray = complex(1.0, 1.0) / _SQRT2
    scale = 1.0 / (_SQRT2 * sig)

    def g(xi):
        return complex_erf((h - 0.5 * xi) * scale)

    def start(s):
        return np.exp(-kappa * s * s) * g(s * ray)

    def end(s):
        expo = (1j - 1.0) * 2.0 * _SQRT2 * kappa * h * s - kappa * s * s
        return np.exp(expo) * g(2.0 * h + s * ray)

    j1 = gauss_kronrod(start, 0.0, s_max, q).value
    j2 = gauss_kronrod(end, 0.0, s_max, q).value
    phase = np.exp(4j * kappa * h * h)
    return float(((2.0 * _SQRT2 / lam) * (j1 - phase * j2)).real)


def localization_decoherence(half_width: float, packet: GaussianPacket, tau: float,
                             q: QuadratureSpec | None = None) -> complex:
    """D(L, not L) = <Psi|P(0) P(tau) Pbar(0)|Psi> for the interval [-half_width, half_width].

    Equal to the integral over the interval of conj(I_in) (Psi(tau) - I_in),
    with I_in the evolved part of the wave function that started inside.
    """
    q = q or QuadratureSpec()
    if half_width < 0:
        raise ValueError("half_width must be non-negative")
    if half_width == 0:
        return 0j
    h = float(half_width)

    def f(x):
        inside = propagated_interval(packet, x, tau, -h, h)
        return np.conj(inside) * (packet.evolved(x, tau) - inside)

    lo, hi = _interval((-h, h), packet, q)
    width = min(hi - lo, packet.wavelength(tau) / 8)
    return complex(gauss_kronrod(f, lo, hi, q, max_width=width).value)


# --------------------------------------------------------------------------
# Remaining on one side: method of images


def _check_image_regime(packet: GaussianPacket, T: float):
    if packet.X0 < 3.0 * packet.sigma:
        _warn(f"X0 = {packet.X0:g} is not large compared with sigma = {packet.sigma:g}")
    if T > 0.2 * packet.spreading_time:
        _warn(f"T = {T:g} is not small compared with the spreading time {packet.spreading_time:g}")


def restricted_wavefunction(x, T: float, packet: GaussianPacket, spreading: bool = True):
    """Free evolution of the right-half wave function with a hard wall at the origin.

    Phi_R(x, T) = Phi_U(x, T) - Phi_U(-x, T) for x > 0, taking Phi_U as the
    free evolution of the whole initial packet (valid when the packet starts
    well to the right).  ``spreading=False`` uses the rigidly translated packet.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("restricted wave function is defined for x >= 0")
    _check_image_regime(packet, T)
    out = packet.evolved(x, T, spreading) - packet.evolved(-x, T, spreading)
    return complex(out) if out.ndim == 0 else out


def centre_at(packet: GaussianPacket, T: float) -> float:
    return packet.X0 + packet.K0 * T / packet.M


def packet_for_centre(X: float, K0: float, sigma: float = 1.0, M: float = 1.0,
                      spread_fraction: float = 0.125) -> tuple:
    """A packet and time T = spread_fraction * spreading time that put the centre at ``X``."""
    T = spread_fraction * 2.0 * sigma**2 * M
    return GaussianPacket(sigma, M, X - K0 * T / M, K0), T


@dataclass(frozen=True)
class SpacetimeValue:
    value: complex | float
    error: float
    centre: float
    in_validated_range: bool  # centre >= -2 sigma


def _spacetime_integral(packet, T, q, pick):
    q = q or QuadratureSpec()
    X = centre_at(packet, T)
    sig = packet.sigma
    reach = max(q.truncation * sig, q.truncation / abs(packet.K0)) if packet.K0 else q.truncation * sig
    upper = max(X, 0.0) + reach
    width = None
    if packet.K0:
        width = (math.pi / abs(packet.K0)) / 8
    f = lambda x: kernels.spacetime_integrands(x, X, packet.K0, sig)[pick]
    r = gauss_kronrod(f, 0.0, upper, q, max_width=width)
    return r, X


def spacetime_remain_probability(packet: GaussianPacket, T: float, q: QuadratureSpec | None = None,
                                 check_regime: bool = True) -> SpacetimeValue:
    """p_R for the packet to stay at x > 0 throughout [0, T] (rigid-packet approximation)."""
    if check_regime:
        _check_image_regime(packet, T)
    r, X = _spacetime_integral(packet, T, q, 0)
    return SpacetimeValue(float(r.value), r.error, X, X >= -2.0 * packet.sigma)


def spacetime_decoherence(packet: GaussianPacket, T: float, q: QuadratureSpec | None = None,
                          check_regime: bool = True) -> SpacetimeValue:
    """D(R, not R) in the same approximation."""
    if check_regime:
        _check_image_regime(packet, T)
    r, X = _spacetime_integral(packet, T, q, 1)
    return SpacetimeValue(complex(r.value), r.error, X, X >= -2.0 * packet.sigma)


__all__ = [
    "BinWidthResult", "GaussianPacket", "QuadResult", "QuadratureError", "QuadratureSpec", "RegimeWarning",
    "SpacetimeValue", "TwoSlitGeometry", "centre_at", "free_particle_joint_probability", "fresnel_j",
    "localization_decoherence", "localization_probability", "min_lp_binwidth", "packet_for_centre",
    "propagated_interval", "restricted_wavefunction", "spacetime_decoherence", "spacetime_remain_probability",
    "two_slit_bin_probability", "two_slit_bin_table", "two_slit_densities", "two_slit_total_probability",
    "uniform_bins",
]
