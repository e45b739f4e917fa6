"""Six-vertex partition functions (a = b = 1, d = 0, variable c) on small tori.

Edges carry arrows encoded as bits: a horizontal edge is 1 when its arrow points
right, a vertical edge is 1 when it points up. A vertex with left/bottom/right/top
edges ``(l, b, r, t)`` obeys the ice rule iff ``l + b == r + t``; it is a c-vertex
when the horizontal arrow turns (``l != r``).

The row transfer matrix acts on the ``2^L1`` states of one row of vertical
edges; the torus partition function is ``tr T^L2``. These lattices are far from
the scaling regime: they check the structure of the fidelity formula, not the
continuum g-factor.
"""

import logging
import math
from collections import Counter
from fractions import Fraction
from typing import Iterator

import numpy as np

from .models import VertexLattice

logger = logging.getLogger(__name__)

MAX_ENUMERATION_SITES = 16


def vertex_c_count(left: int, bottom: int, right: int, top: int) -> int | None:
    """1 for a c-vertex, 0 for an a/b vertex, None when the ice rule fails."""
    if left + bottom != right + top:
        return None
    return 0 if left == right else 1


def _row_polynomial(l1: int, bottom: int, top: int) -> np.ndarray:
    """Coefficients (by number of c-vertices) of one transfer-matrix element."""
    coefficients = np.zeros(l1 + 1, dtype=np.int64)
    for first in (0, 1):
        # walk the row, tracking {c count: ways} for each horizontal arrow state
        states: dict[int, Counter[int]] = {first: Counter({0: 1})}
        for j in range(l1):
            b = (bottom >> j) & 1
            t = (top >> j) & 1
            following: dict[int, Counter[int]] = {}
            for left, counts in states.items():
                for right in (0, 1):
                    c_count = vertex_c_count(left, b, right, t)
                    if c_count is None:
                        continue
                    bucket = following.setdefault(right, Counter())
                    for n_c, ways in counts.items():
                        bucket[n_c + c_count] += ways
            states = following
        for n_c, ways in states.get(first, Counter()).items():
            coefficients[n_c] += ways
    return coefficients


def transfer_polynomial(l1: int) -> np.ndarray:
    """Row transfer matrix as integer coefficients: result[k, top, bottom] counts rows with k c-vertices."""
    dim = 1 << l1
    matrix = np.zeros((l1 + 1, dim, dim), dtype=np.int64)
    for top in range(dim):
        for bottom in range(dim):
            matrix[:, top, bottom] = _row_polynomial(l1, bottom, top)
    return matrix


def transfer_matrix(l1: int, weight: float) -> np.ndarray:
    """Row transfer matrix with c-vertex weight `weight` (a = b = 1)."""
    coefficients = transfer_polynomial(l1)
    powers = float(weight) ** np.arange(coefficients.shape[0], dtype=np.float64)
    return np.tensordot(powers, coefficients.astype(np.float64), axes=1)


def _polynomial_matmul(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    degree = left.shape[0] + right.shape[0] - 2
    product = np.zeros((degree + 1, left.shape[1], right.shape[2]), dtype=np.int64)
    for i in range(left.shape[0]):
        if not left[i].any():
            continue
        for j in range(right.shape[0]):
            product[i + j] += left[i] @ right[j]
    return product


def z2d_polynomial(lattice: VertexLattice) -> list[int]:
    """Exact integer coefficients of Z_2D(w) = sum_C w^{n_c(C)}."""
    row = transfer_polynomial(lattice.l1)
    power = row
    for _ in range(lattice.l2 - 1):
        power = _polynomial_matmul(power, row)

    coefficients = [int(np.trace(power[k])) for k in range(power.shape[0])]
    while len(coefficients) > 1 and coefficients[-1] == 0:
        coefficients.pop()
    return coefficients


def z2d(lattice: VertexLattice, weight: float | None = None) -> float:
    """Z_2D at c-vertex weight `weight` (defaults to lattice.c squared): tr T^L2."""
    if weight is None:
        weight = lattice.c * lattice.c
    if weight < 0.0:
        raise ValueError(f"vertex weight must be non-negative, got {weight}")

    matrix = transfer_matrix(lattice.l1, weight)
    value = float(np.trace(np.linalg.matrix_power(matrix, lattice.l2)))
    logger.debug("Z_2D %dx%d at w=%g: %.17g", lattice.l1, lattice.l2, weight, value)
    return value


def lattice_fidelity(lattice: VertexLattice, c: float, c_prime: float) -> float:
    """<Psi(c^2)|Psi(c'^2)> = Z(c c') / sqrt(Z(c^2) Z(c'^2))."""
    if not (c > 0.0 and c_prime > 0.0):
        raise ValueError(f"vertex weights must be positive, got c={c}, c'={c_prime}")
    mixed = z2d(lattice, c * c_prime)
    return mixed / math.sqrt(z2d(lattice, c * c) * z2d(lattice, c_prime * c_prime))


def fidelity_squared_exact(
    lattice: VertexLattice, c: Fraction, c_prime: Fraction
) -> Fraction:
    """F^2 as an exact rational for rational weights."""
    coefficients = z2d_polynomial(lattice)

    def evaluate(weight: Fraction) -> Fraction:
        return sum((count * weight**k for k, count in enumerate(coefficients)), Fraction(0))

    mixed = evaluate(c * c_prime)
    return mixed * mixed / (evaluate(c * c) * evaluate(c_prime * c_prime))


def bulk_log_fidelity(lattice: VertexLattice, c: float, c_prime: float) -> float:
    """-ln F per vertex, the non-universal area term."""
    return -math.log(lattice_fidelity(lattice, c, c_prime)) / (lattice.l1 * lattice.l2)


def enumerate_configurations(lattice: VertexLattice) -> Iterator[int]:
    """Yields n_c of every ice-rule configuration, found by backtracking over edges."""
    l1, l2 = lattice.l1, lattice.l2
    if l1 * l2 > MAX_ENUMERATION_SITES:
        raise ValueError(
            f"enumeration limited to {MAX_ENUMERATION_SITES} vertices, got {l1}x{l2}"
        )

    def horizontal(i: int, j: int) -> int:
        return 2 * (i * l1 + j % l1)

    def vertical(i: int, j: int) -> int:
        return 2 * ((i % l2) * l1 + j) + 1

    vertex_edges = [
        (horizontal(i, j - 1), vertical(i - 1, j), horizontal(i, j), vertical(i, j))
        for i in range(l2)
        for j in range(l1)
    ]
    n_edges = 2 * l1 * l2
    completed_at: list[list[int]] = [[] for _ in range(n_edges)]
    for vertex, edges in enumerate(vertex_edges):
        completed_at[max(edges)].append(vertex)

    arrows = [0] * n_edges

    def assign(edge: int, n_c: int) -> Iterator[int]:
        if edge == n_edges:
            yield n_c
            return
        for arrow in (0, 1):
            arrows[edge] = arrow
            total = n_c
            for vertex in completed_at[edge]:
                left, bottom, right, top = (arrows[e] for e in vertex_edges[vertex])
                c_count = vertex_c_count(left, bottom, right, top)
                if c_count is None:
                    break
                total += c_count
            else:
                yield from assign(edge + 1, total)

    yield from assign(0, 0)


def enumerate_c_counts(lattice: VertexLattice) -> list[int]:
    """Histogram of c-vertex counts over all configurations, same layout as z2d_polynomial."""
    counts = Counter(enumerate_configurations(lattice))
    if not counts:
        return [0]
    return [counts.get(k, 0) for k in range(max(counts) + 1)]
