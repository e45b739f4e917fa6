"""Matrix-free XXZ Hamiltonian in the Pauli (sigma) normalisation.

    H = sum_{i} [sx_i sx_{i+1} + sy_i sy_{i+1} + delta sz_i sz_{i+1}]

Sites are ``0 .. L-1``; the seam bond ``(L-1, 0)`` carries the boundary
condition:

* periodic: plain bond,
* twisted(theta): sigma^+-_L = e^{+-i theta} sigma^+-_0, hopping picks up a phase,
* toroidal(theta): sigma^+-_L = e^{+-i theta} sigma^-+_0 and sz_L = -sz_0, so the
  seam creates/annihilates pairs of up spins and its Ising term flips sign.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .enums import BondKind, BoundaryKind
from .models import Bond, XxzParams
from .spin_basis import SectorBasis, ranks

logger = logging.getLogger(__name__)

# sx sx + sy sy = 2 (s+ s- + s- s+)
HOPPING_AMPLITUDE = 2.0


def bond_list(params: XxzParams) -> list[Bond]:
    """The L bonds of the ring; only the seam (L-1, 0) is decorated."""
    bonds = [Bond(site_i=i, site_j=i + 1) for i in range(params.length - 1)]

    seam_kind = {
        BoundaryKind.PERIODIC: BondKind.PLAIN,
        BoundaryKind.TWISTED: BondKind.TWISTED,
        BoundaryKind.TOROIDAL: BondKind.TOROIDAL,
    }[params.bc]
    bonds.append(
        Bond(site_i=params.length - 1, site_j=0, kind=seam_kind, theta=params.theta)
    )
    return bonds


@dataclass
class _Transition:
    source: np.ndarray
    target: np.ndarray
    amplitude: complex | float | np.ndarray


@dataclass
class XxzOperator:
    """Diagonal part plus off-diagonal transitions of H on a fixed basis."""

    params: XxzParams
    basis: SectorBasis
    diagonal: np.ndarray
    transitions: list[_Transition] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.complex128 if self.params.is_complex else np.float64)

    def matvec(self, vector: np.ndarray) -> np.ndarray:
        vector = np.asarray(vector)
        if vector.shape != (self.dimension,):
            raise ValueError(
                f"vector has shape {vector.shape}, basis dimension is {self.dimension}"
            )

        result_type = np.result_type(vector.dtype, self.dtype)
        out = (self.diagonal * vector).astype(result_type, copy=False)
        for transition in self.transitions:
            # targets are distinct within one transition group
            out[transition.target] += transition.amplitude * vector[transition.source]
        return out

    __call__ = matvec

    def to_dense(self) -> np.ndarray:
        matrix = np.diag(self.diagonal).astype(self.dtype)
        for transition in self.transitions:
            matrix[transition.target, transition.source] += transition.amplitude
        return matrix


def operator(params: XxzParams, basis: SectorBasis) -> XxzOperator:
    """Precomputes the action of H on `basis` for repeated application."""
    if basis.length != params.length:
        raise ValueError(f"basis has L={basis.length}, params have L={params.length}")
    if not params.conserves_magnetization and not (basis.is_full or basis.is_parity):
        raise ValueError(
            "toroidal boundary mixes magnetization sectors; use a parity block or the full basis"
        )

    states = basis.states
    diagonal = np.zeros(basis.dimension, dtype=np.float64)
    transitions: list[_Transition] = []

    for bond in bond_list(params):
        bit_i = (states >> bond.site_i) & 1
        bit_j = (states >> bond.site_j) & 1
        aligned = bit_i == bit_j
        flip = (1 << bond.site_i) | (1 << bond.site_j)

        ising_sign = -1.0 if bond.kind == BondKind.TOROIDAL else 1.0
        diagonal += ising_sign * params.delta * np.where(aligned, 1.0, -1.0)

        if bond.kind == BondKind.TOROIDAL:
            phase = np.exp(-1j * bond.theta) if params.is_complex else 1.0
            both_down = np.flatnonzero(aligned & (bit_i == 0))
            both_up = np.flatnonzero(aligned & (bit_i == 1))
            # s+_{L-1} s+_0 carries e^{-i theta}, its conjugate e^{+i theta}
            transitions.append(
                _Transition(
                    source=both_down,
                    target=ranks(basis, states[both_down] ^ flip),
                    amplitude=HOPPING_AMPLITUDE * phase,
                )
            )
            transitions.append(
                _Transition(
                    source=both_up,
                    target=ranks(basis, states[both_up] ^ flip),
                    amplitude=HOPPING_AMPLITUDE * np.conj(phase),
                )
            )
            continue

        source = np.flatnonzero(~aligned)
        target = ranks(basis, states[source] ^ flip)
        amplitude: complex | float | np.ndarray = HOPPING_AMPLITUDE
        if bond.kind == BondKind.TWISTED and params.is_complex:
            # raising site_i while lowering site_j is s+_{L-1} s-_0 -> e^{-i theta}
            raises_i = bit_i[source] == 0
            amplitude = HOPPING_AMPLITUDE * np.where(
                raises_i, np.exp(-1j * bond.theta), np.exp(1j * bond.theta)
            )
        transitions.append(_Transition(source=source, target=target, amplitude=amplitude))

    logger.debug(
        "Built XXZ operator L=%d delta=%g bc=%s on dimension %d",
        params.length,
        params.delta,
        params.bc,
        basis.dimension,
    )
    return XxzOperator(params=params, basis=basis, diagonal=diagonal, transitions=transitions)


def apply(params: XxzParams, basis: SectorBasis, vector: np.ndarray) -> np.ndarray:
    """Returns H @ vector."""
    return operator(params, basis).matvec(vector)


def dense_matrix(params: XxzParams, basis: SectorBasis) -> np.ndarray:
    return operator(params, basis).to_dense()


def total_up(config: int) -> int:
    return int(config).bit_count()
