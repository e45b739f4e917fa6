from fractions import Fraction

import numpy as np
import pytest

from gfactor_fidelity.models import VertexLattice
from gfactor_fidelity.vertex_model import (
    MAX_ENUMERATION_SITES,
    bulk_log_fidelity,
    enumerate_c_counts,
    fidelity_squared_exact,
    lattice_fidelity,
    transfer_matrix,
    transfer_polynomial,
    vertex_c_count,
    z2d,
    z2d_polynomial,
)

SMALL_TORI = [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3), (2, 4), (4, 4), (3, 5)]
ALL_TORI = [
    (l1, l2) for l1 in range(1, 7) for l2 in range(1, 7) if l1 * l2 <= MAX_ENUMERATION_SITES
]


class TestVertexWeights:
    """Tests for the ice rule and c-vertex classification."""

    def test_six_allowed_vertices(self) -> None:
        """Test that exactly six of the sixteen edge assignments obey the ice rule."""
        counts = [
            vertex_c_count(left, bottom, right, top)
            for left in (0, 1)
            for bottom in (0, 1)
            for right in (0, 1)
            for top in (0, 1)
        ]

        assert sum(count is not None for count in counts) == 6
        assert counts.count(1) == 2

    def test_transfer_polynomial_shape(self) -> None:
        """Test that the row matrix has one integer slice per c-vertex count."""
        coefficients = transfer_polynomial(3)

        assert coefficients.shape == (4, 8, 8)
        assert coefficients.dtype == np.int64

    def test_transfer_matrix_conserves_flux(self) -> None:
        """Test that w = 1 counts every ice-rule row once, conserving the up-arrow flux."""
        matrix = transfer_matrix(2, 1.0)

        # rows with different numbers of up arrows are never connected
        assert matrix[0b00, 0b11] == 0.0
        assert matrix[0b11, 0b11] > 0.0


class TestPartitionFunction:
    """Tests for the torus partition function."""

    @pytest.mark.parametrize(("l1", "l2"), SMALL_TORI)
    def test_transfer_matrix_equals_enumeration(self, l1: int, l2: int) -> None:
        """Test integer coefficients from the transfer matrix against backtracking."""
        lattice = VertexLattice(l1=l1, l2=l2)

        assert z2d_polynomial(lattice) == enumerate_c_counts(lattice)

    @pytest.mark.slow
    @pytest.mark.parametrize(("l1", "l2"), ALL_TORI)
    def test_all_small_tori(self, l1: int, l2: int) -> None:
        """Test every torus with at most 16 vertices."""
        lattice = VertexLattice(l1=l1, l2=l2)

        assert z2d_polynomial(lattice) == enumerate_c_counts(lattice)

    def test_zero_weight_counts_plain_vertices(self) -> None:
        """Test that w = 0 keeps only configurations without c-vertices."""
        lattice = VertexLattice(l1=3, l2=3)

        assert z2d(lattice, 0.0) == z2d_polynomial(lattice)[0]

    def test_polynomial_interpolation(self) -> None:
        """Test that values at integer weights interpolate to the integer coefficients."""
        lattice = VertexLattice(l1=2, l2=2)
        coefficients = z2d_polynomial(lattice)
        degree = len(coefficients) - 1
        weights = np.arange(degree + 1, dtype=np.float64)

        values = [z2d(lattice, w) for w in weights]
        fitted = np.polynomial.polynomial.polyfit(weights, values, degree)

        assert np.rint(fitted).astype(int).tolist() == coefficients

    def test_default_weight_is_c_squared(self) -> None:
        """Test that z2d without a weight uses the lattice c squared."""
        lattice = VertexLattice(l1=2, l2=3, c=1.1)

        assert z2d(lattice) == pytest.approx(z2d(lattice, 1.21), rel=1e-14)

    def test_negative_weight_rejected(self) -> None:
        """Test that negative weights are rejected."""
        with pytest.raises(ValueError):
            z2d(VertexLattice(l1=2, l2=2), -0.5)

    def test_enumeration_limit(self) -> None:
        """Test that lattices above the enumeration limit are refused."""
        with pytest.raises(ValueError):
            enumerate_c_counts(VertexLattice(l1=5, l2=4))


class TestLatticeFidelity:
    """Tests for the exact six-vertex fidelity."""

    def test_diagonal(self) -> None:
        """Test that c = c' gives F = 1."""
        assert lattice_fidelity(VertexLattice(l1=3, l2=3), 0.9, 0.9) == pytest.approx(
            1.0, abs=1e-15
        )

    def test_swap_symmetry(self) -> None:
        """Test F(c, c') = F(c', c)."""
        lattice = VertexLattice(l1=3, l2=4)

        assert lattice_fidelity(lattice, 0.8, 1.2) == pytest.approx(
            lattice_fidelity(lattice, 1.2, 0.8), abs=1e-15
        )

    def test_brute_force_state_vectors(self) -> None:
        """Test the 4x4 torus at (0.8, 1.2) against amplitudes c^{n_c} summed over configurations."""
        lattice = VertexLattice(l1=4, l2=4)
        histogram = np.array(enumerate_c_counts(lattice), dtype=np.float64)
        k = np.arange(histogram.size)

        inner = np.sum(histogram * (0.8 * 1.2) ** k)
        norm1 = np.sum(histogram * 0.8 ** (2 * k))
        norm2 = np.sum(histogram * 1.2 ** (2 * k))

        assert lattice_fidelity(lattice, 0.8, 1.2) == pytest.approx(
            inner / np.sqrt(norm1 * norm2), rel=1e-13
        )

    def test_exact_rational(self) -> None:
        """Test the rational F^2 against the floating-point value."""
        lattice = VertexLattice(l1=3, l2=3)
        exact = fidelity_squared_exact(lattice, Fraction(4, 5), Fraction(6, 5))

        assert isinstance(exact, Fraction)
        assert float(exact) == pytest.approx(lattice_fidelity(lattice, 0.8, 1.2) ** 2, rel=1e-14)

    @pytest.mark.parametrize(("l1", "l2"), [(2, 2), (3, 3), (4, 4)])
    def test_bounded_by_one(self, l1: int, l2: int) -> None:
        """Test F <= 1 with equality only on the diagonal."""
        lattice = VertexLattice(l1=l1, l2=l2)
        for c in (0.3, 0.9, 1.3):
            for c_prime in (0.3, 0.9, 1.3):
                value = lattice_fidelity(lattice, c, c_prime)
                if c == c_prime:
                    assert value == pytest.approx(1.0, abs=1e-14)
                else:
                    assert value < 1.0 - 1e-6

    def test_bulk_term_positive(self) -> None:
        """Test that the area term -ln F / (L1 L2) is positive off the diagonal."""
        assert bulk_log_fidelity(VertexLattice(l1=3, l2=3), 0.5, 1.0) > 0.0

    def test_weights_must_be_positive(self) -> None:
        """Test that zero weights are rejected."""
        with pytest.raises(ValueError):
            lattice_fidelity(VertexLattice(l1=2, l2=2), 0.0, 1.0)
