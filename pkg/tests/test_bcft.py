import math

import numpy as np
import pytest

from gfactor_fidelity import bcft


class TestLambdaOfDelta:
    """Tests for the anisotropy to coupling map."""

    def test_free_fermion_point(self) -> None:
        """Test delta = 0 -> lam = 1/(4 pi), K = 1."""
        coupling = bcft.lambda_of_delta(0.0)

        assert coupling.lam == pytest.approx(1.0 / (4.0 * math.pi), abs=1e-15)
        assert coupling.k == pytest.approx(1.0, abs=1e-14)

    def test_heisenberg_point(self) -> None:
        """Test delta = 1 -> lam = 1/(2 pi), K = 1/2."""
        coupling = bcft.lambda_of_delta(1.0)

        assert coupling.lam == pytest.approx(0.1591549, abs=1e-7)
        assert coupling.k == pytest.approx(0.5, abs=1e-14)

    def test_fig1_reference_anisotropy(self) -> None:
        """Test delta = 0.20 -> lam ~ 0.0897784."""
        assert bcft.lambda_of_delta(0.2).lam == pytest.approx(0.0897784, abs=1e-7)

    @pytest.mark.parametrize("delta", [-1.0, 1.5, -3.0])
    def test_outside_critical_region(self, delta: float) -> None:
        """Test that gapped anisotropies are rejected."""
        with pytest.raises(ValueError):
            bcft.lambda_of_delta(delta)


class TestGCritical:
    """Tests for the critical-critical g-factor."""

    def test_equal_couplings(self) -> None:
        """Test g = 1 when lam1 = lam2."""
        assert bcft.g_critical(0.3, 0.3) == pytest.approx(1.0, abs=1e-15)

    def test_ratio_four(self) -> None:
        """Test (lam, 4 lam) -> sqrt(5/4) for any lam."""
        for lam in (0.01, 0.2, 3.0):
            assert bcft.g_critical(lam, 4 * lam) == pytest.approx(math.sqrt(1.25), abs=1e-14)

    def test_delta_pair(self) -> None:
        """Test the (0.2, 0.8) anisotropy pair -> g ~ 1.00735."""
        g = bcft.g_critical(bcft.lambda_of_delta(0.2).lam, bcft.lambda_of_delta(0.8).lam)

        assert g == pytest.approx(1.00735, abs=1e-5)

    def test_rejects_non_positive(self) -> None:
        """Test that couplings must be positive."""
        with pytest.raises(ValueError):
            bcft.g_critical(0.0, 1.0)

    def test_curve(self) -> None:
        """Test g_curve against the scalar evaluator and its fixed point."""
        curve = bcft.g_curve(0.2, [-0.4, 0.2, 0.6])

        assert [delta2 for delta2, _ in curve] == [-0.4, 0.2, 0.6]
        assert curve[1][1] == pytest.approx(1.0, abs=1e-15)
        assert all(g >= 1.0 for _, g in curve)


class TestBoundaryStates:
    """Tests for the Dirichlet and Neumann g-factors and folding."""

    def test_unit_neumann_point(self) -> None:
        """Test lam = 1/pi -> g_N = 1, g_D = 2^(-1/2)."""
        assert bcft.g_neumann(1.0 / math.pi) == pytest.approx(1.0, abs=1e-15)
        assert bcft.g_dirichlet(1.0 / math.pi) == pytest.approx(2.0**-0.5, abs=1e-15)

    def test_product_identity(self) -> None:
        """Test g_D(lam) g_N(lam) = 1/sqrt 2 for any lam."""
        for lam in (0.01, 0.1, 1.0, 7.0):
            assert bcft.g_dirichlet(lam) * bcft.g_neumann(lam) == pytest.approx(
                2.0**-0.5, abs=1e-15
            )

    def test_luttinger_form(self) -> None:
        """Test that g_D written with K equals g_D written with lam."""
        for delta in (-0.6, 0.0, 0.5):
            coupling = bcft.lambda_of_delta(delta)
            assert bcft.g_dirichlet_luttinger(coupling.k) == pytest.approx(
                bcft.g_dirichlet(coupling.lam), abs=1e-14
            )

    def test_folding_reproduces_g_critical(self) -> None:
        """Test g_N(lam_N) g_D(lam_D) = g_critical over 10^4 random pairs."""
        rng = np.random.default_rng(0)
        for lam1, lam2 in rng.uniform(0.01, 5.0, size=(10_000, 2)):
            lam_n, lam_d = bcft.fold(lam1, lam2)
            folded = bcft.g_neumann(lam_n) * bcft.g_dirichlet(lam_d)
            assert folded == pytest.approx(bcft.g_critical(lam1, lam2), abs=1e-13)

    def test_interface_coupling(self) -> None:
        """Test the homogeneous coupling is the mean and half of lam_N."""
        assert bcft.interface_coupling(0.1, 0.3) == pytest.approx(0.2)
        assert bcft.interface_coupling(0.1, 0.3) == pytest.approx(0.5 * bcft.fold(0.1, 0.3)[0])


class TestMassive:
    """Tests for the critical-massive and antiperiodic predictions."""

    def test_free_fermion_side(self) -> None:
        """Test K = 1 -> sqrt 2."""
        assert bcft.g_critical_massive(1.0) == pytest.approx(1.414214, abs=1e-6)

    def test_heisenberg_side(self) -> None:
        """Test K = 1/2 -> sqrt 2 * 2^(-1/4) ~ 1.189207."""
        assert bcft.g_critical_massive(0.5) == pytest.approx(1.189207, abs=1e-6)

    def test_two_dirichlet_sectors(self) -> None:
        """Test g = 2 x (1/sqrt 2) x g_D in Luttinger form."""
        k = bcft.lambda_of_delta(0.3).k
        assert bcft.g_critical_massive(k) == pytest.approx(
            2.0 / math.sqrt(2.0) * bcft.g_dirichlet_luttinger(k), abs=1e-15
        )

    def test_massive_curve(self) -> None:
        """Test that the inset curve carries K and the predicted g."""
        rows = bcft.g_massive_curve([0.0, 0.5])

        assert rows[0] == pytest.approx((0.0, 1.0, math.sqrt(2.0)), abs=1e-14)
        assert rows[1][2] < rows[0][2]

    def test_antiperiodic(self) -> None:
        """Test that antiperiodic boundaries leave no g-factor."""
        assert bcft.g_antiperiodic() == 1.0
