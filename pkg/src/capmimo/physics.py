"""Free-space scalar propagation kernel for parallel line apertures.

Geometry convention: the transmit aperture occupies positions s in [0, l]
on the line (0, 0, z), the receive aperture occupies r in [0, l] on the
parallel line (d, 0, z). Everything downstream (field autocorrelation,
operator trace, mutual-information models) is built from the scalar
propagation coefficient ``green_scalar`` and composite midpoint
quadrature over the source coordinate.

All functions here are pure and accept numpy arrays for the position
arguments (broadcasting applies); they are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# free-space intrinsic impedance, ohms
Z0_OHMS = 120.0 * math.pi


@dataclass(frozen=True)
class SystemConfig:
    """Physical scenario: geometry, excitation power density, noise density.

    Attributes:
        wavelength_m: carrier wavelength, > 0.
        aperture_m: common length l of the transmit and receive segments, > 0.
        distance_m: separation d of the two parallel segments, > 0.
        power_density: source power density P (equal allocation, no CSI), >= 0.
        noise_density: receiver noise density n0 (two-sided n0/2), > 0.
    """

    wavelength_m: float = 0.04
    aperture_m: float = 2.0
    distance_m: float = 10.0
    power_density: float = 1.0
    noise_density: float = 2.0

    def __post_init__(self) -> None:
        if not (self.wavelength_m > 0 and math.isfinite(self.wavelength_m)):
            raise ValueError(f"wavelength_m must be positive, got {self.wavelength_m}")
        if not (self.aperture_m > 0 and math.isfinite(self.aperture_m)):
            raise ValueError(f"aperture_m must be positive, got {self.aperture_m}")
        if not (self.distance_m > 0 and math.isfinite(self.distance_m)):
            raise ValueError(f"distance_m must be positive, got {self.distance_m}")
        if not (self.power_density >= 0 and math.isfinite(self.power_density)):
            raise ValueError(f"power_density must be nonnegative, got {self.power_density}")
        if not (self.noise_density > 0 and math.isfinite(self.noise_density)):
            raise ValueError(f"noise_density must be positive, got {self.noise_density}")

    @property
    def wavenumber(self) -> float:
        """Spatial angular frequency 2*pi/wavelength; never stored independently."""
        return 2.0 * math.pi / self.wavelength_m

    def default_inner_points(self) -> int:
        """Source-quadrature resolution: at least 20 samples per wavelength along l."""
        return max(512, math.ceil(20.0 * self.aperture_m / self.wavelength_m))


def green_offset(x, cfg: SystemConfig):
    """Scalar propagation coefficient as a function of the axial offset x = r - s.

    Evaluates the z-polarized entry of the free-space dyadic kernel for
    source/observer separated by (d, 0, x): radiating term plus the two
    near-field corrections, all even in x. Returns complex values with
    the same shape as ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    d = cfg.distance_m
    lam = cfg.wavelength_m
    r_sq = x * x + d * d
    r_abs = np.sqrt(r_sq)
    kr = cfg.wavenumber * r_abs
    transverse = (d * d) / r_sq               # radiating direction factor
    near = (d * d - 2.0 * x * x) / r_sq       # direction factor of the 1/kr terms
    bracket = transverse + 1j * near / kr - near / (kr * kr)
    return (1j * Z0_OHMS / (2.0 * lam * r_abs)) * np.exp(1j * kr) * bracket


def green_scalar(r, s, cfg: SystemConfig):
    """Field at receive position r due to a unit point source at s.

    Positions may lie anywhere on the axis (the formula is global); the
    value depends on (r, s) only through the offset r - s. Scalar inputs
    give a python complex, array inputs broadcast.
    """
    r = np.asarray(r, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    out = green_offset(r - s, cfg)
    if out.ndim == 0:
        return complex(out)
    return out


def _check_points(name: str, n: int) -> None:
    if n < 2:
        raise ValueError(f"{name} must be >= 2 for a meaningful quadrature, got {n}")


def _source_midpoints(cfg: SystemConfig, n: int) -> np.ndarray:
    return (np.arange(n, dtype=np.float64) + 0.5) * (cfg.aperture_m / n)


def kernel_value(r: float, r_prime: float, cfg: SystemConfig,
                 inner_points: int | None = None) -> complex:
    """Autocorrelation of the received field between positions r and r_prime.

    Midpoint-rule approximation of P * integral_0^l G(r,s) G*(r_prime,s) ds
    with ``inner_points`` source samples. Conjugate symmetry
    kernel_value(a, b) == conj(kernel_value(b, a)) holds exactly: the pair
    is evaluated once in canonical order and mirrored by conjugation, and
    the diagonal is forced real.
    """
    if inner_points is None:
        inner_points = cfg.default_inner_points()
    _check_points("inner_points", inner_points)
    if r == r_prime:
        s = _source_midpoints(cfg, inner_points)
        g = green_offset(r - s, cfg)
        val = cfg.power_density * (cfg.aperture_m / inner_points) * np.sum(g.real**2 + g.imag**2)
        return complex(val, 0.0)
    if r > r_prime:
        return complex(kernel_value(r_prime, r, cfg, inner_points)).conjugate()
    s = _source_midpoints(cfg, inner_points)
    prod = green_offset(r - s, cfg) * np.conj(green_offset(r_prime - s, cfg))
    return complex(cfg.power_density * (cfg.aperture_m / inner_points) * np.sum(prod))


def kernel_diagonal(positions: np.ndarray, cfg: SystemConfig,
                    inner_points: int | None = None) -> np.ndarray:
    """Vectorized kernel_value(r, r) for an array of receive positions.

    The diagonal is the per-position received signal power; it feeds the
    SNR-matching rules and the operator trace, so a single quadrature
    convention is used everywhere.
    """
    if inner_points is None:
        inner_points = cfg.default_inner_points()
    _check_points("inner_points", inner_points)
    positions = np.asarray(positions, dtype=np.float64)
    s = _source_midpoints(cfg, inner_points)
    g = green_offset(positions[:, None] - s[None, :], cfg)
    return cfg.power_density * (cfg.aperture_m / inner_points) * np.sum(g.real**2 + g.imag**2, axis=1)


def operator_trace(cfg: SystemConfig, outer_points: int | None = None,
                   inner_points: int | None = None) -> float:
    """Total received signal power P * iint |G(r,s)|^2 dr ds over [0, l]^2.

    Composite midpoint rule on both axes; equals the sum of the field
    operator's eigenvalues in the continuum limit. Nonnegative.
    """
    if outer_points is None:
        outer_points = 2000
    if inner_points is None:
        inner_points = cfg.default_inner_points()
    _check_points("outer_points", outer_points)
    _check_points("inner_points", inner_points)
    r = (np.arange(outer_points, dtype=np.float64) + 0.5) * (cfg.aperture_m / outer_points)
    diag = kernel_diagonal(r, cfg, inner_points)
    return float((cfg.aperture_m / outer_points) * diag.sum())
