"""Continuum torus quantities of the compact boson for the quantum vertex model.

Real nome only: ``q = q_bar = exp(-2 pi L1 / L2)``. The torus partition function
is ``(eta(q) eta(q_bar))^{-1} I(lam)``; the eta factors cancel in the fidelity
ratio and only the instanton sums remain.
"""

import logging
import math

import numpy as np

from .models import CftPoint

logger = logging.getLogger(__name__)

# a product/sum stops once the next term is below this fraction of the total
TRUNCATION = 1e-17
# below this exponent the theta series is summed in its Jacobi-dual form
DUAL_SWITCH = 0.05
MAX_WEIGHT = math.sqrt(2.0)


def _require_nome(q: float) -> None:
    if not 0.0 < q < 1.0:
        raise ValueError(f"nome must lie in (0, 1), got {q}")


def nome(aspect: float) -> float:
    if not aspect > 0.0:
        raise ValueError(f"aspect ratio must be positive, got {aspect}")
    return math.exp(-2.0 * math.pi * aspect)


def eta_truncation_order(q: float) -> int:
    """Smallest N with sum_{n > N} q^n below TRUNCATION."""
    _require_nome(q)
    return max(1, math.ceil(math.log(TRUNCATION * (1.0 - q)) / math.log(q)))


def log_dedekind_eta(q: float, n_terms: int | None = None) -> float:
    _require_nome(q)
    order = eta_truncation_order(q) if n_terms is None else n_terms
    powers = q ** np.arange(1, order + 1, dtype=np.float64)
    return math.log(q) / 24.0 + float(np.sum(np.log1p(-powers)[::-1]))


def dedekind_eta(q: float, n_terms: int | None = None) -> float:
    """eta(q) = q^{1/24} prod_{n >= 1} (1 - q^n)."""
    return math.exp(log_dedekind_eta(q, n_terms))


def theta_order(t: float) -> int:
    """Terms of sum_{n>=1} exp(-t n^2) kept before they drop below TRUNCATION."""
    return max(1, math.ceil(math.sqrt(-math.log(TRUNCATION) / t)))


def theta_sum(t: float, n_terms: int | None = None) -> float:
    """sum_{n in Z} exp(-t n^2) for t > 0.

    For small t the series converges slowly; it is then evaluated through its
    Jacobi dual sqrt(pi / t) sum_k exp(-pi^2 k^2 / t).
    """
    if not t > 0.0:
        raise ValueError(f"theta exponent must be positive, got {t}")

    if t < DUAL_SWITCH:
        dual = math.pi**2 / t
        return math.sqrt(math.pi / t) * _direct_theta(dual, n_terms)
    return _direct_theta(t, n_terms)


def _direct_theta(t: float, n_terms: int | None) -> float:
    order = theta_order(t) if n_terms is None else n_terms
    n = np.arange(1, order + 1, dtype=np.float64)
    # smallest terms first
    return 1.0 + 2.0 * float(np.sum(np.exp(-t * n * n)[::-1]))


def instanton_sum(lam: float, q: float, n_terms: int | None = None) -> float:
    """I(lam) = sum_{n,m} q^{n^2 / (4 pi lam)} q^{pi lam m^2} for real q.

    With q = q_bar the cross terms of the momentum/winding exponent cancel and
    the double sum factorises into two theta series.
    """
    if not lam > 0.0:
        raise ValueError(f"coupling must be positive, got {lam}")
    _require_nome(q)

    log_inverse_q = -math.log(q)
    momentum = theta_sum(log_inverse_q / (4.0 * math.pi * lam), n_terms)
    winding = theta_sum(math.pi * lam * log_inverse_q, n_terms)
    return momentum * winding


def instanton_double_sum(lam: float, q: float, cutoff: int = 40) -> float:
    """Direct evaluation of the momentum/winding double sum over |n|, |m| <= cutoff."""
    if not lam > 0.0:
        raise ValueError(f"coupling must be positive, got {lam}")
    _require_nome(q)

    radius = math.sqrt(2.0 * math.pi * lam)
    n, m = np.meshgrid(
        np.arange(-cutoff, cutoff + 1, dtype=np.float64),
        np.arange(-cutoff, cutoff + 1, dtype=np.float64),
        indexing="ij",
    )
    holomorphic = 0.25 * (n / radius + m * radius) ** 2
    antiholomorphic = 0.25 * (n / radius - m * radius) ** 2
    terms = np.exp(math.log(q) * (holomorphic + antiholomorphic))
    return float(np.sum(np.sort(terms, axis=None)))


def _require_weight(name: str, value: float) -> None:
    if not 0.0 < value < MAX_WEIGHT:
        raise ValueError(f"{name}={value} outside the disordered region (0, sqrt 2)")


def lambda_of_c(c: float) -> float:
    """Coupling of vertex weight c: c^4 / 2 - 1 = -cos(2 pi^2 lam)."""
    _require_weight("c", c)
    return math.acos(1.0 - 0.5 * c**4) / (2.0 * math.pi**2)


def lambda_of_pair(c: float, c_prime: float) -> float:
    """Coupling Lam of the product weight: (c c')^2 / 2 - 1 = -cos(2 pi^2 Lam)."""
    _require_weight("c", c)
    _require_weight("c_prime", c_prime)
    return math.acos(1.0 - 0.5 * (c * c_prime) ** 2) / (2.0 * math.pi**2)


def cft_point(c: float, c_prime: float, aspect: float = 1.0) -> CftPoint:
    return CftPoint(
        c=c,
        c_prime=c_prime,
        lam=lambda_of_c(c),
        lam_prime=lambda_of_c(c_prime),
        big_lam=lambda_of_pair(c, c_prime),
        aspect=aspect,
        q=nome(aspect),
    )


def g_eight_vertex(
    c: float, c_prime: float, aspect: float = 1.0, n_terms: int | None = None
) -> float:
    """O(1) term I(Lam) / sqrt(I(lam) I(lam')) of the vertex-model fidelity on the torus."""
    point = cft_point(c, c_prime, aspect)
    mixed = instanton_sum(point.big_lam, point.q, n_terms)
    normalisation = instanton_sum(point.lam, point.q, n_terms) * instanton_sum(
        point.lam_prime, point.q, n_terms
    )
    return mixed / math.sqrt(normalisation)


def rectangle_universal_term(l1: float, l2: float) -> float:
    """Universal part 1/4 ln L2 - 1/2 ln eta(q) of ln Z on an L1 x L2 rectangle.

    Takes no coupling: on the rectangle with free boundaries it drops out, so
    the fidelity there has no O(1) term.
    """
    if not (l1 > 0.0 and l2 > 0.0):
        raise ValueError(f"rectangle sides must be positive, got {l1} x {l2}")
    return 0.25 * math.log(l2) - 0.5 * log_dedekind_eta(nome(l1 / l2))
