import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable

import numpy as np
from pydantic import ValidationError

from . import eigensolver, xxz
from .errors import FidelitySeriesError, SolverError
from .models import (
    DEFAULT_SIZES,
    FidelityPoint,
    FidelitySeries,
    GFactorEstimate,
    LanczosResult,
    SeriesDescriptor,
    StabilityReport,
    XxzPairDescriptor,
    XxzParams,
)
from .spin_basis import EVEN_PARITY, SectorBasis, enumerate_sector

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
MIN_FIT_POINTS = 4


def overlap(u: np.ndarray, v: np.ndarray) -> float:
    """F = |<u, v>| for unit vectors; inputs off the unit sphere are renormalised with a warning."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")

    u = _unit(u, "first")
    v = _unit(v, "second")
    return min(float(abs(np.vdot(u, v))), 1.0)


def _unit(vector: np.ndarray, label: str) -> np.ndarray:
    norm = float(np.linalg.norm(vector))
    if norm == 0.0:
        raise ValueError(f"{label} vector is zero")
    if abs(norm - 1.0) > NORM_TOLERANCE:
        logger.warning("%s vector has norm %.12g; renormalising", label.capitalize(), norm)
        return vector / norm
    return vector


def fidelity_series(
    pair: XxzPairDescriptor,
    sizes: Iterable[int] = DEFAULT_SIZES,
    tol: float = 1e-10,
    max_iter: int | None = None,
    seed: int = 0,
    workers: int = 1,
) -> FidelitySeries:
    """Ground-state fidelity of the two chains of `pair` at every size.

    Sizes are solved independently (optionally on `workers` threads) and
    gathered in increasing L. A failed solve raises FidelitySeriesError carrying
    the failing L and every point that did complete.
    """
    sizes = list(sizes)
    if sizes != sorted(set(sizes)):
        raise ValueError(f"sizes must be strictly increasing: {sizes}")

    logger.info(
        "Fidelity series delta1=%g delta2=%g bc=%s theta=%g over L=%s",
        pair.delta1,
        pair.delta2,
        pair.bc,
        pair.theta,
        sizes,
    )

    def solve(size: int) -> FidelityPoint | Exception:
        try:
            return _solve_point(pair, size, tol, max_iter, seed)
        except (SolverError, ValidationError, ValueError) as exc:
            return exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(solve, sizes))
    else:
        outcomes = [solve(size) for size in sizes]

    points = [outcome for outcome in outcomes if isinstance(outcome, FidelityPoint)]
    series = FidelitySeries(descriptor=pair, points=points, tol=tol, seed=seed)

    for size, outcome in zip(sizes, outcomes):
        if isinstance(outcome, Exception):
            raise FidelitySeriesError(str(outcome), size=size, partial=series) from outcome

    return series


def _solve_point(
    pair: XxzPairDescriptor,
    size: int,
    tol: float,
    max_iter: int | None,
    seed: int,
) -> FidelityPoint:
    params1 = XxzParams(length=size, delta=pair.delta1, bc=pair.bc, theta=pair.theta)
    params2 = XxzParams(length=size, delta=pair.delta2, bc=pair.bc, theta=pair.theta)

    # the toroidal chain is degenerate between the two parity blocks of n_up;
    # the even block fixes the ground state
    n_up = size // 2 if params1.conserves_magnetization else EVEN_PARITY
    basis = enumerate_sector(size, n_up)

    first_is_critical = abs(pair.delta1) <= abs(pair.delta2)
    lead, follow = (params1, params2) if first_is_critical else (params2, params1)

    lead_result = _ground_state(lead, basis, tol, max_iter, seed, start=None)
    if follow.delta == lead.delta:
        follow_result = lead_result
    else:
        # a massive side starts from the critical ground state so that the Neel
        # doublet resolves into the finite-size ground state
        start = lead_result.vector if abs(follow.delta) > 1.0 else None
        follow_result = _ground_state(follow, basis, tol, max_iter, seed, start=start)

    result1, result2 = (
        (lead_result, follow_result) if first_is_critical else (follow_result, lead_result)
    )
    fidelity = overlap(result1.vector, result2.vector)
    logger.info("L=%d: F=%.15g (E1=%.12g, E2=%.12g)", size, fidelity, result1.energy, result2.energy)

    return FidelityPoint(
        size=size,
        fidelity=fidelity,
        energy1=result1.energy,
        energy2=result2.energy,
        residual1=result1.residual,
        residual2=result2.residual,
    )


def _ground_state(
    params: XxzParams,
    basis: SectorBasis,
    tol: float,
    max_iter: int | None,
    seed: int,
    start: np.ndarray | None,
) -> LanczosResult:
    hamiltonian = xxz.operator(params, basis)
    return eigensolver.ground_state(
        hamiltonian.matvec, basis.dimension, tol, max_iter, seed, start=start
    )


def series_from_overlaps(
    descriptor: SeriesDescriptor, points: Iterable[tuple[int, float]]
) -> FidelitySeries:
    return FidelitySeries(
        descriptor=descriptor,
        points=[FidelityPoint(size=size, fidelity=value) for size, value in points],
    )


def extract_g(series: FidelitySeries) -> GFactorEstimate:
    """Least-squares fit of ln F(L) = -f L + ln g + c1 / L with unit weights."""
    sizes = np.array(series.sizes, dtype=np.float64)
    fidelities = np.array(series.fidelities, dtype=np.float64)

    if sizes.size < MIN_FIT_POINTS:
        raise ValueError(f"fit needs at least {MIN_FIT_POINTS} points, got {sizes.size}")
    if np.unique(sizes).size < 3:
        raise ValueError("fit needs at least 3 distinct sizes")
    if np.any(fidelities <= 0.0):
        raise ValueError("fidelity series contains non-positive values")

    design = np.column_stack([-sizes, np.ones_like(sizes), 1.0 / sizes])
    target = np.log(fidelities)

    coefficients, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < design.shape[1]:
        raise ValueError("degenerate design matrix")

    residuals = target - design @ coefficients
    dof = sizes.size - design.shape[1]
    variance = float(residuals @ residuals) / dof
    covariance = variance * np.linalg.inv(design.T @ design)

    f, ln_g, c1 = (float(value) for value in coefficients)
    estimate = GFactorEstimate(
        ln_g=ln_g,
        f=f,
        c1=c1,
        stderr_ln_g=float(np.sqrt(max(covariance[1, 1], 0.0))),
        max_abs_residual=float(np.max(np.abs(residuals))),
        l_min=int(sizes.min()),
        l_max=int(sizes.max()),
        n_points=int(sizes.size),
    )
    logger.debug("Fit: ln g=%.12g +- %.3g, f=%.12g, c1=%.6g", ln_g, estimate.stderr_ln_g, f, c1)
    return estimate


def stability(series: FidelitySeries) -> StabilityReport:
    """Shift of ln g when the smallest or the largest size is dropped from the fit."""
    full = extract_g(series)
    without_smallest = extract_g(series.model_copy(update={"points": series.points[1:]}))
    without_largest = extract_g(series.model_copy(update={"points": series.points[:-1]}))

    shift_small = without_smallest.ln_g - full.ln_g
    shift_large = without_largest.ln_g - full.ln_g
    return StabilityReport(
        ln_g=full.ln_g,
        stderr_ln_g=full.stderr_ln_g,
        drop_smallest_shift=shift_small,
        drop_largest_shift=shift_large,
        stable=max(abs(shift_small), abs(shift_large)) <= full.stderr_ln_g,
    )
