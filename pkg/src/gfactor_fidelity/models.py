import hashlib
import json
import math
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    computed_field,
    field_validator,
    model_validator,
)

from .enums import BondKind, BoundaryKind, CheckStatus

MIN_CHAIN_LENGTH = 4
MAX_CHAIN_LENGTH = 24
MIN_SERIES_LENGTH = 8
MAX_VERTEX_SIZE = 6
DEFAULT_SIZES = (8, 10, 12, 14, 16, 18)
# opt-in sizes, minutes per series
LARGE_SIZES = (20, 22)


class XxzParams(BaseModel):
    """H = sum_i [sx_i sx_{i+1} + sy_i sy_{i+1} + delta sz_i sz_{i+1}], site L+1 set by bc."""

    model_config = ConfigDict(frozen=True)

    length: int
    delta: float
    bc: BoundaryKind = BoundaryKind.PERIODIC
    theta: float = 0.0

    @field_validator("length")
    @classmethod
    def _even_length_in_range(cls, value: int) -> int:
        if value % 2 or not MIN_CHAIN_LENGTH <= value <= MAX_CHAIN_LENGTH:
            raise ValueError(
                f"chain length must be even and in [{MIN_CHAIN_LENGTH}, {MAX_CHAIN_LENGTH}], got {value}"
            )
        return value

    @model_validator(mode="after")
    def _periodic_has_no_angle(self) -> "XxzParams":
        if self.bc == BoundaryKind.PERIODIC and self.theta != 0.0:
            raise ValueError("periodic boundary carries no twist angle; use bc=twisted")
        return self

    @property
    def is_complex(self) -> bool:
        return self.bc != BoundaryKind.PERIODIC and self.theta != 0.0

    @property
    def conserves_magnetization(self) -> bool:
        return self.bc != BoundaryKind.TOROIDAL


class Bond(BaseModel):
    model_config = ConfigDict(frozen=True)

    site_i: int
    site_j: int
    kind: BondKind = BondKind.PLAIN
    theta: float = 0.0

    @property
    def changes_parity_sector(self) -> bool:
        return self.kind == BondKind.TOROIDAL


class LanczosResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    energy: float
    vector: np.ndarray
    residual: float
    iterations: int
    gap_estimate: float
    converged: bool = True


class FidelityPoint(BaseModel):
    size: int
    fidelity: float
    energy1: float | None = None
    energy2: float | None = None
    residual1: float | None = None
    residual2: float | None = None

    @field_validator("fidelity")
    @classmethod
    def _fidelity_in_unit_interval(cls, value: float) -> float:
        if not 0.0 < value <= 1.0:
            raise ValueError(f"fidelity must lie in (0, 1], got {value!r}")
        return value


class XxzPairDescriptor(BaseModel):
    kind: Literal["xxz"] = "xxz"
    delta1: float
    delta2: float
    bc: BoundaryKind = BoundaryKind.PERIODIC
    theta: float = 0.0


class GaussianPairDescriptor(BaseModel):
    kind: Literal["gaussian"] = "gaussian"
    lam1: float
    lam2: float


SeriesDescriptor = Annotated[
    XxzPairDescriptor | GaussianPairDescriptor, Field(discriminator="kind")
]


class FidelitySeries(BaseModel):
    descriptor: SeriesDescriptor
    points: list[FidelityPoint] = Field(default_factory=list)
    tol: float | None = None
    seed: int | None = None

    @field_validator("points")
    @classmethod
    def _sizes_even_and_increasing(cls, points: list[FidelityPoint]) -> list[FidelityPoint]:
        sizes = [point.size for point in points]
        if any(size % 2 or size < MIN_SERIES_LENGTH for size in sizes):
            raise ValueError(f"series sizes must be even and >= {MIN_SERIES_LENGTH}: {sizes}")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError(f"series sizes must be strictly increasing: {sizes}")
        return points

    @property
    def sizes(self) -> list[int]:
        return [point.size for point in self.points]

    @property
    def fidelities(self) -> list[float]:
        return [point.fidelity for point in self.points]


class GFactorEstimate(BaseModel):
    """Fit of ln F(L) = -f L + ln g + c1 / L."""

    ln_g: float
    f: float
    c1: float
    stderr_ln_g: float
    max_abs_residual: float
    l_min: int
    l_max: int
    n_points: int

    @computed_field
    @property
    def g(self) -> float:
        return math.exp(self.ln_g)


class StabilityReport(BaseModel):
    ln_g: float
    stderr_ln_g: float
    drop_smallest_shift: float
    drop_largest_shift: float
    stable: bool


class Coupling(BaseModel):
    """Free-boson stiffness `lam` and Luttinger parameter `k`, with 4 pi lam k = 1."""

    model_config = ConfigDict(frozen=True)

    lam: float = Field(gt=0.0)
    k: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _dual_couplings(self) -> "Coupling":
        if abs(4.0 * math.pi * self.lam * self.k - 1.0) > 1e-14:
            raise ValueError(f"lam={self.lam} and k={self.k} violate 4 pi lam k = 1")
        return self

    @classmethod
    def from_lam(cls, lam: float) -> "Coupling":
        return cls(lam=lam, k=1.0 / (4.0 * math.pi * lam))

    @classmethod
    def from_k(cls, k: float) -> "Coupling":
        return cls(lam=1.0 / (4.0 * math.pi * k), k=k)


class GaussianState(BaseModel):
    """Gaussian ground state of a harmonic ring; `width` is lam * sqrt(K_ring) with the zero mode removed."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    length: int = Field(ge=2)
    lam: float = Field(gt=0.0)
    width: np.ndarray


class CftPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    c: float
    c_prime: float
    lam: float
    lam_prime: float
    big_lam: float
    aspect: float = Field(gt=0.0)
    q: float = Field(gt=0.0, lt=1.0)


class VertexLattice(BaseModel):
    model_config = ConfigDict(frozen=True)

    l1: int = Field(ge=1, le=MAX_VERTEX_SIZE)
    l2: int = Field(ge=1, le=MAX_VERTEX_SIZE)
    c: float = Field(default=1.0, ge=0.0)


class OracleCheck(BaseModel):
    name: str
    value: float
    expected: float
    abs_error: float
    tol: float
    status: CheckStatus


def _split_list(value: object) -> object:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def _split_pairs(value: object) -> object:
    value = _split_list(value)
    if isinstance(value, list):
        return [
            tuple(part.strip() for part in item.split(":")) if isinstance(item, str) else item
            for item in value
        ]
    return value


def _none_spelling(value: object) -> object:
    if isinstance(value, str) and value.strip().lower() in {"", "none"}:
        return None
    return value


FloatList = Annotated[list[float], BeforeValidator(_split_list)]
IntList = Annotated[list[int], BeforeValidator(_split_list)]
IntPairList = Annotated[list[tuple[int, int]], BeforeValidator(_split_pairs)]
FloatPairList = Annotated[list[tuple[float, float]], BeforeValidator(_split_pairs)]
OptionalInt = Annotated[int | None, BeforeValidator(_none_spelling)]


class RunConfig(BaseModel):
    """Everything a run depends on; a run is reproducible from this record alone."""

    model_config = ConfigDict(extra="forbid")

    delta1: float = 0.20
    delta2_grid: FloatList = Field(
        default_factory=lambda: [-0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8]
    )
    massive_delta1: float = 10.0
    massive_delta2_grid: FloatList = Field(default_factory=lambda: [-0.5, 0.0, 0.5])
    sizes: IntList = Field(default_factory=lambda: list(DEFAULT_SIZES))
    toroidal_sizes: IntList = Field(default_factory=lambda: [8, 10, 12, 14])
    include_large: bool = False
    lmax: OptionalInt = None
    bc: BoundaryKind = BoundaryKind.PERIODIC
    theta: float = 0.0
    tol: float = Field(default=1e-10, gt=0.0)
    max_iter: OptionalInt = None
    seed: int = 0
    workers: int = Field(default=1, ge=1)
    c_grid: FloatList = Field(
        default_factory=lambda: [round(0.1 * k, 10) for k in range(1, 15)]
    )
    aspect: float = Field(default=1.0, gt=0.0)
    vertex_sizes: IntPairList = Field(
        default_factory=lambda: [(2, 2), (2, 3), (3, 3), (2, 4), (4, 4), (3, 5)]
    )
    gaussian_pairs: FloatPairList = Field(
        default_factory=lambda: [(1.0, 2.0), (1.0, 4.0), (0.3, 0.7)]
    )
    gaussian_sizes: IntList = Field(
        default_factory=lambda: [8, 16, 24, 32, 40, 48, 56, 64]
    )
    oracle_tol: float = Field(default=1e-10, ge=0.0)
    out_dir: Path = Path("results")

    def effective_sizes(self, sizes: list[int] | None = None) -> list[int]:
        chosen = list(self.sizes if sizes is None else sizes)
        if self.include_large and sizes is None:
            chosen += LARGE_SIZES
        if self.lmax is not None:
            chosen = [size for size in chosen if size <= self.lmax]
        return sorted(set(chosen))

    def digest(self) -> str:
        payload = json.dumps(self.model_dump(mode="json", exclude={"out_dir"}), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()
