"""Midpoint grids, Hermitian kernel assembly, eigen-decomposition, log-det.

The continuum field operator is realized numerically by sampling its
kernel on an equal-weight midpoint grid; with the grid weight folded
into the scale argument, ``logdet_one_plus_scaled`` then evaluates both
the operator determinant (fine reference grid) and the finite antenna
array determinant (physical grid) through one code path.

Kernel matrices are plain complex ndarrays that satisfy, by
construction, K[i, j] == conj(K[j, i]) entrywise-exactly with an exactly
real diagonal; ``validate_hermitian`` enforces this contract on any
externally supplied matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .physics import SystemConfig, _check_points, green_offset


class PSDViolationError(ValueError):
    """An eigenvalue fell below the negative tolerance band: matrix not PSD."""


@dataclass(frozen=True)
class QuadratureGrid:
    """Equal-weight midpoint grid r_i = (i - 0.5) * l / m on (0, l)."""

    points: np.ndarray = field(compare=False)
    weight: float
    m: int

    @property
    def length(self) -> float:
        return self.weight * self.m


def midpoint_grid(length: float, m: int) -> QuadratureGrid:
    """Build the m-point midpoint grid on (0, length).

    This is simultaneously the quadrature rule for the field operator and
    the evenly spaced antenna layout of the discrete models (spacing
    length/m, first element at half a spacing from the edge).
    """
    if m < 1:
        raise ValueError(f"grid size m must be >= 1, got {m}")
    if not length > 0:
        raise ValueError(f"grid length must be positive, got {length}")
    pts = (np.arange(m, dtype=np.float64) + 0.5) * (length / m)
    pts.setflags(write=False)
    return QuadratureGrid(points=pts, weight=length / m, m=m)


def _hermitize_in_place(K: np.ndarray) -> np.ndarray:
    # mirror the upper triangle so K[j,i] == conj(K[i,j]) bitwise, real diagonal
    iu = np.triu_indices(K.shape[0], k=1)
    K[(iu[1], iu[0])] = K[iu].conj()
    np.fill_diagonal(K, K.diagonal().real)
    return K


def assemble_kernel_matrix(grid: QuadratureGrid, cfg: SystemConfig,
                           inner_points: int | None = None) -> np.ndarray:
    """Sampled field-autocorrelation matrix K[i, j] = kernel_value(r_i, r_j).

    The inner source integral is shared across all pairs: with
    A[i, k] = G(r_i - s_k), K = P * (l/n) * A A^H, which is then mirrored
    to make Hermitian symmetry exact. Cost O(m^2 n).
    """
    if inner_points is None:
        inner_points = cfg.default_inner_points()
    _check_points("inner_points", inner_points)
    s = (np.arange(inner_points, dtype=np.float64) + 0.5) * (cfg.aperture_m / inner_points)
    A = green_offset(grid.points[:, None] - s[None, :], cfg)
    K = (cfg.power_density * cfg.aperture_m / inner_points) * (A @ A.conj().T)
    return _hermitize_in_place(K)


def assemble_channel_matrix(rx_grid: QuadratureGrid, tx_grid: QuadratureGrid,
                            cfg: SystemConfig) -> np.ndarray:
    """Point-to-point gain matrix H[i, k] = G(r_i - s_k), shape (m_rx, m_tx)."""
    return green_offset(rx_grid.points[:, None] - tx_grid.points[None, :], cfg)


def gram_from_channel(H: np.ndarray, power_density: float) -> np.ndarray:
    """Received-signal correlation P * H H^H with exact Hermitian symmetry."""
    K = power_density * (H @ H.conj().T)
    return _hermitize_in_place(K)


def validate_hermitian(K: np.ndarray) -> None:
    """Reject matrices violating the entrywise-exact Hermitian contract."""
    K = np.asarray(K)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"kernel matrix must be square, got shape {K.shape}")
    if not np.array_equal(K, K.conj().T):
        raise ValueError("matrix is not exactly Hermitian")


@dataclass(frozen=True)
class SpectralResult:
    """Nonincreasing real spectrum plus clamping diagnostics.

    clamped_count reports eigenvalues that were materially negative
    (beyond eigensolver roundoff, dim * eps * lambda_max) yet inside the
    clamp tolerance and were raised to zero; roundoff-level negatives are
    zeroed silently. All reported eigenvalues are >= 0.
    """

    eigenvalues: np.ndarray = field(compare=False)
    clamped_count: int
    clamp_floor: float


def hermitian_eigenvalues(K: np.ndarray, clamp_rel: float = 1e-12) -> SpectralResult:
    """Eigenvalues of a Hermitian PSD matrix, sorted nonincreasing.

    Eigenvalues in [-clamp_rel * lambda_max, 0) are clamped to zero;
    anything below that band raises PSDViolationError. The returned sum
    of eigenvalues matches the matrix trace up to the clamped mass.
    """
    if clamp_rel < 0:
        raise ValueError(f"clamp_rel must be >= 0, got {clamp_rel}")
    validate_hermitian(K)
    ev = np.linalg.eigvalsh(np.asarray(K, dtype=np.complex128))[::-1]
    lam_max = max(float(ev[0]), 0.0)
    floor = clamp_rel * lam_max
    worst = float(ev[-1])
    if worst < -floor:
        raise PSDViolationError(
            f"eigenvalue {worst:.6e} below -{clamp_rel:.1e} * lambda_max = {-floor:.6e}")
    # negatives within dim*eps*lambda_max are indistinguishable from zero
    roundoff = K.shape[0] * np.finfo(np.float64).eps * lam_max
    clamped = int(np.sum((ev < -roundoff) & (ev < 0.0)))
    ev = np.maximum(ev, 0.0)
    ev.setflags(write=False)
    return SpectralResult(eigenvalues=ev, clamped_count=clamped, clamp_floor=floor)


def logdet_one_plus_scaled(K: np.ndarray, scale: float,
                           clamp_rel: float = 1e-12) -> float:
    """log det(I + scale * K) of a Hermitian PSD matrix via its spectrum.

    Computed as sum_k log(1 + scale * lambda_k) over the clamped
    spectrum, so the individual subchannel terms remain available to
    callers that need them. Nondecreasing in scale; zero at scale = 0.
    """
    if scale < 0:
        raise ValueError(f"scale must be >= 0, got {scale}")
    res = hermitian_eigenvalues(K, clamp_rel)
    return float(np.sum(np.log1p(scale * res.eigenvalues)))
