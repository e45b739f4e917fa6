"""Lanczos with full reorthogonalization for the lowest eigenpairs of a Hermitian operator."""

import logging
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import LanczosConvergenceError
from .models import LanczosResult

logger = logging.getLogger(__name__)

Operator = Callable[[np.ndarray], np.ndarray]

DEFAULT_TOL = 1e-12
# Krylov vectors kept before a restart from the current Ritz vector
KRYLOV_LIMIT = 250
BREAKDOWN = 1e-14


def default_max_iter(dim: int) -> int:
    return 2 * min(dim, 500)


def ground_state(
    apply: Operator,
    dim: int,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    seed: int = 0,
    *,
    start: np.ndarray | None = None,
) -> LanczosResult:
    """Lowest eigenpair of `apply`.

    The start vector is seeded Gaussian noise unless `start` is given. When the
    converged pair sits closer than ``10 * tol`` to the next Ritz value, one more
    cycle is run from the converged vector so that the vector, not only the
    energy, meets the residual bound.
    """
    return _lanczos(apply, dim, tol, max_iter, seed, start=start, deflate=())


def lowest_two(
    apply: Operator,
    dim: int,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    seed: int = 0,
) -> tuple[LanczosResult, LanczosResult]:
    """Ground state and first excited state, the latter found in the complement of the former.

    Both results report ``gap_estimate = E1 - E0``.
    """
    if dim < 2:
        raise ValueError(f"two eigenpairs need dim >= 2, got {dim}")

    first = ground_state(apply, dim, tol, max_iter, seed)
    second = _lanczos(apply, dim, tol, max_iter, seed + 1, start=None, deflate=(first.vector,))

    gap = second.energy - first.energy
    logger.debug("Lowest two: E0=%.15g E1=%.15g gap=%.3g", first.energy, second.energy, gap)
    return (
        first.model_copy(update={"gap_estimate": gap}),
        second.model_copy(update={"gap_estimate": gap}),
    )


def _project_out(vector: np.ndarray, others: np.ndarray) -> np.ndarray:
    if others.shape[0] == 0:
        return vector
    return vector - others.T @ (others.conj() @ vector)


def _start_vector(
    dim: int,
    seed: int,
    start: np.ndarray | None,
    deflate: np.ndarray,
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if start is not None:
        vector = np.array(start, copy=True)
        if vector.shape != (dim,):
            raise ValueError(f"start vector has shape {vector.shape}, expected ({dim},)")
    else:
        # complex operators are detected at the first Krylov step, which upcasts
        vector = rng.standard_normal(dim)
        if deflate.dtype.kind == "c":
            vector = vector + 1j * rng.standard_normal(dim)

    vector = _project_out(vector, deflate)
    vector = _project_out(vector, deflate)
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise ValueError("start vector vanishes after deflation")
    return vector / norm


def _lanczos(
    apply: Operator,
    dim: int,
    tol: float,
    max_iter: int | None,
    seed: int,
    *,
    start: np.ndarray | None,
    deflate: Sequence[np.ndarray],
) -> LanczosResult:
    if dim < 1:
        raise ValueError(f"operator dimension must be positive, got {dim}")
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if max_iter is None:
        max_iter = default_max_iter(dim)

    deflated = np.array(deflate) if len(deflate) else np.zeros((0, dim))
    vector = _start_vector(dim, seed, start, deflated)

    reachable = dim - deflated.shape[0]
    window = max(1, min(reachable, KRYLOV_LIMIT))

    steps = 0
    restarted_for_gap = False

    while True:
        ritz_value, ritz_vector, residual_estimate, gap, steps = _cycle(
            apply, vector, window, deflated, tol, steps, max_iter
        )

        residual = float(np.linalg.norm(apply(ritz_vector) - ritz_value * ritz_vector))
        result = LanczosResult(
            energy=ritz_value,
            vector=ritz_vector,
            residual=residual,
            iterations=steps,
            gap_estimate=gap,
            converged=residual <= tol,
        )
        logger.debug(
            "Lanczos cycle: E=%.15g residual=%.3g (estimate %.3g) gap=%.3g steps=%d",
            ritz_value,
            residual,
            residual_estimate,
            gap,
            steps,
        )

        if residual <= tol and (gap >= 10.0 * tol or restarted_for_gap):
            return result

        if steps >= max_iter:
            raise LanczosConvergenceError(
                f"no convergence after {steps} steps (residual {residual:.3g} > tol {tol:.3g})",
                best=result.model_copy(update={"converged": False}),
            )

        if residual <= tol:
            logger.warning(
                "Quasi-degenerate ground state (gap estimate %.3g < 10 tol); restarting from the converged vector",
                gap,
            )
            restarted_for_gap = True

        vector = ritz_vector


def _cycle(
    apply: Operator,
    start: np.ndarray,
    window: int,
    deflated: np.ndarray,
    tol: float,
    steps: int,
    max_iter: int,
) -> tuple[float, np.ndarray, float, float, int]:
    """One Lanczos run of at most `window` vectors; returns the lowest Ritz pair."""
    dtype = np.result_type(start.dtype, deflated.dtype)
    krylov = np.zeros((window, start.shape[0]), dtype=dtype)
    krylov[0] = start
    alphas: list[float] = []
    betas: list[float] = []

    while True:
        k = len(alphas)
        krylov, alpha, w = _expand(apply, krylov, k, betas[-1] if betas else 0.0, deflated)
        steps += 1

        beta = float(np.linalg.norm(w))
        alphas.append(alpha)

        if len(alphas) == 1:
            values, vectors = np.array([alpha]), np.ones((1, 1))
        else:
            values, vectors = eigh_tridiagonal(np.array(alphas), np.array(betas))
        residual_estimate = beta * abs(vectors[-1, 0])
        gap = float(values[1] - values[0]) if len(values) > 1 else float("inf")

        finished = (
            residual_estimate <= tol
            or beta <= BREAKDOWN * max(1.0, abs(alpha))
            or len(alphas) == window
            or steps >= max_iter
        )
        if finished:
            ritz_vector = vectors[:, 0] @ krylov[: len(alphas)]
            ritz_vector = _project_out(ritz_vector, deflated)
            ritz_vector = ritz_vector / np.linalg.norm(ritz_vector)
            return float(values[0]), ritz_vector, float(residual_estimate), gap, steps

        betas.append(beta)
        krylov[k + 1] = w / beta


def _expand(
    apply: Operator,
    krylov: np.ndarray,
    k: int,
    previous_beta: float,
    deflated: np.ndarray,
) -> tuple[np.ndarray, float, np.ndarray]:
    """Applies the operator to krylov[k] and orthogonalises the image.

    Returns the (possibly upcast) Krylov array, the diagonal element and the
    unnormalised next direction.
    """
    q = krylov[k]
    w = apply(q)
    if w.dtype != krylov.dtype:
        krylov = krylov.astype(np.result_type(w.dtype, krylov.dtype))
        q = krylov[k]

    alpha = float(np.real(np.vdot(q, w)))
    w = w - alpha * q
    if k > 0:
        w = w - previous_beta * krylov[k - 1]

    # two passes of classical Gram-Schmidt against everything kept so far
    for _ in range(2):
        w = _project_out(w, krylov[: k + 1])
        w = _project_out(w, deflated)
    return krylov, alpha, w


def krylov_basis(apply: Operator, start: np.ndarray, size: int) -> np.ndarray:
    """Orthonormal Lanczos vectors spanning the Krylov space of `start`, one per row.

    Stops early when the space becomes invariant.
    """
    start = np.asarray(start)
    if size < 1:
        raise ValueError(f"Krylov space size must be positive, got {size}")
    norm = np.linalg.norm(start)
    if norm == 0.0:
        raise ValueError("start vector is zero")

    krylov = np.zeros((size, start.shape[0]), dtype=np.result_type(start.dtype, np.float64))
    krylov[0] = start / norm
    no_deflation = np.zeros((0, start.shape[0]))
    beta = 0.0

    for k in range(size - 1):
        krylov, alpha, w = _expand(apply, krylov, k, beta, no_deflation)
        beta = float(np.linalg.norm(w))
        if beta <= BREAKDOWN * max(1.0, abs(alpha)):
            return krylov[: k + 1]
        krylov[k + 1] = w / beta
    return krylov
