import tempfile
from functools import reduce
from pathlib import Path
from typing import Any, Generator

import numpy as np
import pytest

from gfactor_fidelity.enums import BoundaryKind
from gfactor_fidelity.models import RunConfig, XxzParams

# single-site operators in the (down, up) basis
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]])
SIGMA_MINUS = SIGMA_PLUS.T
SIGMA_Z = np.diag([-1.0, 1.0])
IDENTITY = np.eye(2)


def site_operator(length: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    """Kronecker product with ops[i] on site i; site i is bit i of the basis index."""
    factors = [ops.get(site, IDENTITY) for site in reversed(range(length))]
    return reduce(np.kron, factors)


def dense_xxz(params: XxzParams) -> np.ndarray:
    """Full 2^L Hamiltonian assembled from Pauli products, independent of the bit tricks."""
    length, delta = params.length, params.delta
    matrix = np.zeros((1 << length, 1 << length), dtype=np.complex128)

    for i in range(length - 1):
        j = i + 1
        matrix += 2.0 * site_operator(length, {i: SIGMA_PLUS, j: SIGMA_MINUS})
        matrix += 2.0 * site_operator(length, {i: SIGMA_MINUS, j: SIGMA_PLUS})
        matrix += delta * site_operator(length, {i: SIGMA_Z, j: SIGMA_Z})

    last, phase = length - 1, np.exp(1j * params.theta)
    if params.bc == BoundaryKind.TOROIDAL:
        matrix += 2.0 * np.conj(phase) * site_operator(length, {last: SIGMA_PLUS, 0: SIGMA_PLUS})
        matrix += 2.0 * phase * site_operator(length, {last: SIGMA_MINUS, 0: SIGMA_MINUS})
        matrix -= delta * site_operator(length, {last: SIGMA_Z, 0: SIGMA_Z})
    else:
        twist = phase if params.bc == BoundaryKind.TWISTED else 1.0
        matrix += 2.0 * np.conj(twist) * site_operator(length, {last: SIGMA_PLUS, 0: SIGMA_MINUS})
        matrix += 2.0 * twist * site_operator(length, {last: SIGMA_MINUS, 0: SIGMA_PLUS})
        matrix += delta * site_operator(length, {last: SIGMA_Z, 0: SIGMA_Z})

    if not params.is_complex:
        return matrix.real
    return matrix


def dense_ground_state(matrix: np.ndarray) -> tuple[float, np.ndarray]:
    values, vectors = np.linalg.eigh(matrix)
    return float(values[0]), vectors[:, 0]


@pytest.fixture
def temp_dir() -> Generator[Path, Any, None]:
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as directory:
        yield Path(directory)


@pytest.fixture
def small_config(temp_dir: Path) -> RunConfig:
    """A RunConfig small enough for the default test run."""
    return RunConfig(
        delta2_grid=[0.2, 0.6],
        massive_delta2_grid=[0.0],
        sizes=[8, 10, 12, 14],
        toroidal_sizes=[8, 10, 12, 14],
        c_grid=[0.3, 0.9, 1.4],
        vertex_sizes=[(2, 2), (2, 3), (3, 3)],
        gaussian_pairs=[(1.0, 2.0)],
        gaussian_sizes=[8, 16, 24, 32],
        out_dir=temp_dir / "results",
    )


@pytest.fixture
def config_file(temp_dir: Path) -> Path:
    """Create a key = value run config."""
    path = temp_dir / "run.conf"
    path.write_text(
        "# small run\n"
        "delta1 = 0.3\n"
        "delta2_grid = 0.1, 0.5\n"
        "sizes = 8, 10, 12, 14\n"
        "vertex_sizes = 2:2, 3:3\n"
        "gaussian_pairs = 1:2\n"
        "gaussian_sizes = 8, 16, 24, 32\n"
        "c_grid = 0.5, 1.0\n"
        "lmax = none\n"
        f"out_dir = {temp_dir / 'results'}\n"
    )
    return path
