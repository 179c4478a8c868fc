"""Independent oracles used by the test suite.

Each deliberately takes a different numerical route than the library:
hand-rolled Gaussian elimination instead of the eigenvalue path for
determinants, Gauss-Legendre / adaptive quadrature instead of the
midpoint rule for integrals.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from capmimo.physics import SystemConfig, green_offset


def logdet_by_row_reduction(M: np.ndarray) -> float:
    """log |det M| via Gaussian elimination with partial pivoting.

    Pure-python pivoting over a copied matrix; no LAPACK factorization,
    no eigenvalues.
    """
    A = np.array(M, dtype=np.complex128, copy=True)
    n = A.shape[0]
    log_abs = 0.0
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(A[col:, col])))
        if pivot != col:
            A[[col, pivot]] = A[[pivot, col]]
        p = A[col, col]
        if p == 0:
            raise ZeroDivisionError("singular matrix in row reduction")
        log_abs += float(np.log(abs(p)))
        for row in range(col + 1, n):
            A[row, col:] -= (A[row, col] / p) * A[col, col:]
    return log_abs


def gauss_legendre_nodes(n: int, length: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped from [-1, 1] to [0, length]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) * (length / 2.0), w * (length / 2.0)


def kernel_value_quad(r: float, r_prime: float, cfg: SystemConfig) -> complex:
    """Adaptive-quadrature evaluation of the field-autocorrelation integrand."""

    def integrand(s: float, part: str) -> float:
        v = complex(green_offset(r - s, cfg)) * complex(green_offset(r_prime - s, cfg)).conjugate()
        return v.real if part == "re" else v.imag

    kwargs = dict(limit=800, epsabs=1e-12, epsrel=1e-12)
    re_v, _ = quad(integrand, 0.0, cfg.aperture_m, args=("re",), **kwargs)
    im_v, _ = quad(integrand, 0.0, cfg.aperture_m, args=("im",), **kwargs)
    return cfg.power_density * complex(re_v, im_v)


def total_power_quad(cfg: SystemConfig) -> float:
    """iint |G(r-s)|^2 dr ds over [0,l]^2 reduced to one adaptive integral.

    The integrand depends only on x = r - s, so the square collapses to
    int_{-l}^{l} |G(x)|^2 (l - |x|) dx: a route entirely unlike the
    library's tensor midpoint rule.
    """
    l = cfg.aperture_m

    def integrand(x: float) -> float:
        g = complex(green_offset(x, cfg))
        return (g.real**2 + g.imag**2) * (l - abs(x))

    val, _ = quad(integrand, -l, l, limit=800, epsabs=1e-13, epsrel=1e-13)
    return cfg.power_density * val


def diagonal_power_quad(r: float, cfg: SystemConfig) -> float:
    """Adaptive-quadrature kernel_value(r, r): received power at one position."""

    def integrand(s: float) -> float:
        g = complex(green_offset(r - s, cfg))
        return g.real**2 + g.imag**2

    val, _ = quad(integrand, 0.0, cfg.aperture_m, limit=400, epsabs=1e-13, epsrel=1e-13)
    return cfg.power_density * val
