import inspect
import math

import pytest
from pydantic import ValidationError

from gfactor_fidelity.enums import BoundaryKind
from gfactor_fidelity.fidelity import fidelity_series
from gfactor_fidelity.models import (
    DEFAULT_SIZES,
    LARGE_SIZES,
    Coupling,
    FidelityPoint,
    FidelitySeries,
    GFactorEstimate,
    GaussianPairDescriptor,
    RunConfig,
    VertexLattice,
    XxzPairDescriptor,
    XxzParams,
)


class TestXxzParams:
    """Tests for the XxzParams model."""

    def test_params_creation_with_defaults(self) -> None:
        """Test that a chain defaults to periodic boundaries without twist."""
        params = XxzParams(length=8, delta=0.2)

        assert params.bc == BoundaryKind.PERIODIC
        assert params.theta == 0.0
        assert not params.is_complex
        assert params.conserves_magnetization

    @pytest.mark.parametrize("length", [3, 5, 2, 26])
    def test_params_rejects_bad_length(self, length: int) -> None:
        """Test that odd or out-of-range chain lengths are rejected."""
        with pytest.raises(ValidationError):
            XxzParams(length=length, delta=0.0)

    def test_periodic_rejects_angle(self) -> None:
        """Test that a twist angle needs a non-periodic boundary."""
        with pytest.raises(ValidationError):
            XxzParams(length=8, delta=0.0, theta=0.5)

    def test_twisted_angle_is_complex(self) -> None:
        """Test that a non-zero twist switches to complex arithmetic."""
        params = XxzParams(length=8, delta=0.0, bc=BoundaryKind.TWISTED, theta=0.5)

        assert params.is_complex
        assert params.conserves_magnetization

    def test_toroidal_breaks_magnetization(self) -> None:
        """Test that the toroidal seam mixes magnetization sectors."""
        params = XxzParams(length=8, delta=0.0, bc=BoundaryKind.TOROIDAL)

        assert not params.conserves_magnetization
        assert not params.is_complex


class TestFidelitySeries:
    """Tests for the FidelitySeries and FidelityPoint models."""

    def test_point_rejects_fidelity_above_one(self) -> None:
        """Test that fidelities live in (0, 1]."""
        with pytest.raises(ValidationError):
            FidelityPoint(size=8, fidelity=1.5)
        with pytest.raises(ValidationError):
            FidelityPoint(size=8, fidelity=0.0)

    def test_series_sizes_must_increase(self) -> None:
        """Test that series sizes are strictly increasing."""
        with pytest.raises(ValidationError):
            FidelitySeries(
                descriptor=XxzPairDescriptor(delta1=0.2, delta2=0.5),
                points=[FidelityPoint(size=10, fidelity=0.9), FidelityPoint(size=8, fidelity=0.95)],
            )

    def test_series_sizes_must_be_even_and_large(self) -> None:
        """Test that series sizes are even and at least 8."""
        for size in (6, 9):
            with pytest.raises(ValidationError):
                FidelitySeries(
                    descriptor=XxzPairDescriptor(delta1=0.2, delta2=0.5),
                    points=[FidelityPoint(size=size, fidelity=0.9)],
                )

    def test_descriptor_is_discriminated(self) -> None:
        """Test that the descriptor kind selects the model on validation."""
        series = FidelitySeries.model_validate(
            {"descriptor": {"kind": "gaussian", "lam1": 1.0, "lam2": 2.0}, "points": []}
        )

        assert isinstance(series.descriptor, GaussianPairDescriptor)


class TestGFactorEstimate:
    """Tests for the GFactorEstimate model."""

    def test_g_is_exponential_of_ln_g(self) -> None:
        """Test the computed g field and its presence in the dump."""
        estimate = GFactorEstimate(
            ln_g=math.log(1.2),
            f=0.3,
            c1=0.0,
            stderr_ln_g=0.0,
            max_abs_residual=0.0,
            l_min=8,
            l_max=14,
            n_points=4,
        )

        assert estimate.g == pytest.approx(1.2, abs=1e-15)
        assert estimate.model_dump()["g"] == pytest.approx(1.2, abs=1e-15)


class TestCoupling:
    """Tests for the Coupling model."""

    def test_from_lam_and_from_k_agree(self) -> None:
        """Test that 4 pi lam K = 1 in both constructors."""
        coupling = Coupling.from_lam(1.0 / (4.0 * math.pi))

        assert coupling.k == pytest.approx(1.0, abs=1e-15)
        assert Coupling.from_k(0.5).lam == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-15)

    def test_inconsistent_pair_rejected(self) -> None:
        """Test that a lam/K pair violating duality is rejected."""
        with pytest.raises(ValidationError):
            Coupling(lam=0.1, k=1.0)


class TestVertexLattice:
    """Tests for the VertexLattice model."""

    def test_lattice_bounds(self) -> None:
        """Test that lattice sides stay within the transfer-matrix range."""
        VertexLattice(l1=6, l2=6)
        with pytest.raises(ValidationError):
            VertexLattice(l1=7, l2=2)
        with pytest.raises(ValidationError):
            VertexLattice(l1=0, l2=2)


class TestRunConfig:
    """Tests for the RunConfig model."""

    def test_defaults(self) -> None:
        """Test the default delta grid parameters."""
        config = RunConfig()

        assert config.delta1 == 0.2
        assert config.sizes == [8, 10, 12, 14, 16, 18]
        assert config.bc == BoundaryKind.PERIODIC
        assert len(config.c_grid) == 14

    def test_string_lists_are_split(self) -> None:
        """Test that comma lists and colon pairs from the text format are coerced."""
        config = RunConfig.model_validate(
            {
                "delta2_grid": "-0.5, 0, 0.5",
                "sizes": "8,10,12,14",
                "vertex_sizes": "2:2, 3:4",
                "gaussian_pairs": "1:2",
                "lmax": "none",
            }
        )

        assert config.delta2_grid == [-0.5, 0.0, 0.5]
        assert config.sizes == [8, 10, 12, 14]
        assert config.vertex_sizes == [(2, 2), (3, 4)]
        assert config.gaussian_pairs == [(1.0, 2.0)]
        assert config.lmax is None

    def test_unknown_key_rejected(self) -> None:
        """Test that typos in the config file are errors."""
        with pytest.raises(ValidationError):
            RunConfig.model_validate({"delta_1": 0.2})

    def test_effective_sizes(self) -> None:
        """Test the opt-in large sizes and the lmax cut."""
        assert RunConfig(include_large=True).effective_sizes()[-2:] == [20, 22]
        assert RunConfig(lmax=12).effective_sizes() == [8, 10, 12]
        assert RunConfig(include_large=True).effective_sizes([8, 10]) == [8, 10]

    def test_size_defaults_shared_with_fidelity(self) -> None:
        """Test that the config and the series solver use the same default sizes."""
        assert RunConfig().sizes == list(DEFAULT_SIZES)
        assert RunConfig(include_large=True).effective_sizes() == [*DEFAULT_SIZES, *LARGE_SIZES]
        assert inspect.signature(fidelity_series).parameters["sizes"].default is DEFAULT_SIZES

    def test_digest_ignores_out_dir(self) -> None:
        """Test that the output location does not change the reproducibility record."""
        assert RunConfig(out_dir="a").digest() == RunConfig(out_dir="b").digest()
        assert RunConfig(seed=1).digest() != RunConfig(seed=2).digest()
        assert len(RunConfig().digest()) == 64
