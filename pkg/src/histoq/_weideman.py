"""Coefficients of Weideman's rational expansion of the Faddeeva function.

J. A. C. Weideman, "Computation of the complex error function",
SIAM J. Numer. Anal. 31 (1994) 1497-1518.  With 40 terms the relative error
of w(z) in the closed upper half plane is about 2e-14.
"""

import numpy as np

N_TERMS = 40


def _coefficients(n_terms):
    m = 2 * n_terms
    k = np.arange(-m + 1, m)
    length = np.sqrt(n_terms / np.sqrt(2.0))
    t = length * np.tan(0.5 * k * np.pi / m)
    f = np.concatenate([[0.0], np.exp(-t * t) * (length * length + t * t)])
    a = np.real(np.fft.fft(np.fft.fftshift(f))) / (2 * m)
    # Highest power first, for Horner evaluation.
    return np.ascontiguousarray(a[1 : n_terms + 1][::-1]), float(length)


COEFFS, L = _coefficients(N_TERMS)
