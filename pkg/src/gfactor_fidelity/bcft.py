"""Closed-form boundary CFT predictions for the free boson.

Conventions: stiffness ``lam`` of the action ``(lam / 2) int (d phi)^2`` with
phi compactified on a circle of circumference 2 pi, Luttinger parameter
``K = 1 / (4 pi lam)``.
"""

import math
from typing import Iterable

from .models import Coupling


def _require_positive(name: str, value: float) -> None:
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value}")


def lambda_of_delta(delta: float) -> Coupling:
    """XXZ anisotropy -> free-boson coupling, lam = (pi - arccos delta) / (2 pi^2)."""
    if not -1.0 < delta <= 1.0:
        raise ValueError(f"anisotropy {delta} outside the critical region (-1, 1]")
    return Coupling.from_lam((math.pi - math.acos(delta)) / (2.0 * math.pi**2))


def g_critical(lam1: float, lam2: float) -> float:
    """g = sqrt((lam1 + lam2) / (2 sqrt(lam1 lam2)))."""
    _require_positive("lam1", lam1)
    _require_positive("lam2", lam2)
    return math.sqrt((lam1 + lam2) / (2.0 * math.sqrt(lam1 * lam2)))


def g_dirichlet(lam: float) -> float:
    _require_positive("lam", lam)
    return 2.0**-0.5 * (math.pi * lam) ** -0.25


def g_neumann(lam: float) -> float:
    _require_positive("lam", lam)
    return (math.pi * lam) ** 0.25


def g_dirichlet_luttinger(k: float) -> float:
    """Dirichlet g-factor written with the Luttinger parameter, g_D = K^(1/4)."""
    _require_positive("K", k)
    return k**0.25


def fold(lam1: float, lam2: float) -> tuple[float, float]:
    """Couplings (lam_N, lam_D) of the two species seen after folding the interface."""
    _require_positive("lam1", lam1)
    _require_positive("lam2", lam2)
    return lam1 + lam2, lam1 * lam2 / (lam1 + lam2)


def interface_coupling(lam1: float, lam2: float) -> float:
    """Homogeneous coupling whose partition function equals the interface one."""
    _require_positive("lam1", lam1)
    _require_positive("lam2", lam2)
    return 0.5 * (lam1 + lam2)


def g_critical_massive(k: float) -> float:
    """Critical side with Luttinger parameter K against a Neel side: two Dirichlet
    sectors, each weighted 1/sqrt(2), g = sqrt(2) K^(1/4)."""
    _require_positive("K", k)
    return math.sqrt(2.0) * k**0.25


def g_antiperiodic() -> float:
    """Antiperiodic (toroidal) fields leave no O(1) term."""
    return 1.0


def g_curve(delta1: float, delta2_grid: Iterable[float]) -> list[tuple[float, float]]:
    """(delta2, g_critical) along a grid at fixed delta1."""
    lam1 = lambda_of_delta(delta1).lam
    return [
        (delta2, g_critical(lam1, lambda_of_delta(delta2).lam)) for delta2 in delta2_grid
    ]


def g_massive_curve(delta2_grid: Iterable[float]) -> list[tuple[float, float, float]]:
    """(delta2, K, g_critical_massive) along a grid of critical anisotropies."""
    rows = []
    for delta2 in delta2_grid:
        k = lambda_of_delta(delta2).k
        rows.append((delta2, k, g_critical_massive(k)))
    return rows
