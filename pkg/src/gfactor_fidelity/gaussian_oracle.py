"""Exact overlaps of Gaussian ground states of harmonic rings.

The ring with stiffness ``lam`` has ground-state wave function
``psi(x) ~ det(A)^{1/4} exp(-x^T A x / 2)`` with ``A = lam sqrt(K_ring)``,
``K_ring`` the ring Laplacian. The constant (zero) mode is not normalisable and
is projected out, leaving ``L - 1`` modes.
"""

import logging
from typing import Iterable

import numpy as np
from scipy.linalg import circulant, null_space

from . import bcft
from .fidelity import extract_g, series_from_overlaps
from .models import FidelitySeries, GaussianPairDescriptor, GaussianState, GFactorEstimate

logger = logging.getLogger(__name__)


def ring_laplacian(length: int) -> np.ndarray:
    column = np.zeros(length)
    column[0] = 2.0
    column[1] -= 1.0
    column[-1] -= 1.0
    return circulant(column)


def gaussian_state(length: int, lam: float) -> GaussianState:
    """Width operator lam * sqrt(K_ring) built from the spectral decomposition of K_ring."""
    if length < 2:
        raise ValueError(f"ring needs at least 2 sites, got {length}")
    if not lam > 0.0:
        raise ValueError(f"stiffness must be positive, got {lam}")

    eigenvalues, eigenvectors = np.linalg.eigh(ring_laplacian(length))
    # eigenvalues are 2 - 2 cos(2 pi k / L); k = 0 is the zero mode
    frequencies = np.sqrt(np.clip(eigenvalues, 0.0, None))
    frequencies[0] = 0.0
    width = (eigenvectors * (lam * frequencies)) @ eigenvectors.T
    return GaussianState(length=length, lam=lam, width=width)


def zero_mode_complement(length: int) -> np.ndarray:
    """Orthonormal basis (columns) of the vectors orthogonal to the constant vector."""
    return null_space(np.ones((1, length)))


def gaussian_overlap(first: GaussianState, second: GaussianState) -> float:
    """F = det(A1)^{1/4} det(A2)^{1/4} det((A1 + A2) / 2)^{-1/2} on the zero-mode-free subspace."""
    if first.length != second.length:
        raise ValueError(f"ring sizes differ: {first.length} vs {second.length}")

    projector = zero_mode_complement(first.length)
    return width_overlap(
        projector.T @ first.width @ projector,
        projector.T @ second.width @ projector,
    )


def width_overlap(width1: np.ndarray, width2: np.ndarray) -> float:
    """Overlap of two normalised Gaussians exp(-x^T A_i x / 2) with positive definite widths."""
    width1 = np.atleast_2d(width1)
    width2 = np.atleast_2d(width2)
    if width1.shape != width2.shape:
        raise ValueError(f"width shapes differ: {width1.shape} vs {width2.shape}")

    sign1, logdet1 = np.linalg.slogdet(width1)
    sign2, logdet2 = np.linalg.slogdet(width2)
    sign_mean, logdet_mean = np.linalg.slogdet(0.5 * (width1 + width2))
    if sign_mean <= 0.0 or sign1 <= 0.0 or sign2 <= 0.0:
        raise ValueError("width operators are singular on the zero-mode-free subspace")

    return float(np.exp(0.25 * logdet1 + 0.25 * logdet2 - 0.5 * logdet_mean))


def mode_product_overlap(lam1: float, lam2: float, length: int) -> float:
    """Closed form: every one of the L - 1 modes contributes sqrt(2 sqrt(lam1 lam2) / (lam1 + lam2))."""
    ratio = 2.0 * np.sqrt(lam1 * lam2) / (lam1 + lam2)
    return float(ratio ** ((length - 1) / 2.0))


def gaussian_series(lam1: float, lam2: float, sizes: Iterable[int]) -> FidelitySeries:
    points = [
        (size, gaussian_overlap(gaussian_state(size, lam1), gaussian_state(size, lam2)))
        for size in sizes
    ]
    return series_from_overlaps(GaussianPairDescriptor(lam1=lam1, lam2=lam2), points)


def oracle_g(lam1: float, lam2: float, sizes: Iterable[int]) -> GFactorEstimate:
    """Fit the determinant overlaps; the result should reproduce bcft.g_critical."""
    estimate = extract_g(gaussian_series(lam1, lam2, sizes))
    logger.info(
        "Gaussian oracle lam=(%g, %g): g=%.12g, BCFT %.12g",
        lam1,
        lam2,
        estimate.g,
        bcft.g_critical(lam1, lam2),
    )
    return estimate
