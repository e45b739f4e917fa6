"""Bit-string bases of spin-1/2 chains.

A configuration is an unsigned integer whose bit ``i`` is the spin on site ``i``
(1 = up). Sector bases hold every configuration with a fixed number of up
spins, or with a fixed parity of that number, sorted increasingly, so that
ranks are found by binary search; the full space is indexed by the
configuration itself.
"""

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from .errors import StateNotInBasisError
from .models import MAX_CHAIN_LENGTH, MIN_CHAIN_LENGTH

logger = logging.getLogger(__name__)

FULL_SPACE: Literal["all"] = "all"
EVEN_PARITY: Literal["even"] = "even"
ODD_PARITY: Literal["odd"] = "odd"
PARITY_REMAINDERS = {EVEN_PARITY: 0, ODD_PARITY: 1}

SectorLabel = int | Literal["all", "even", "odd"]


class SectorBasis(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    length: int
    n_up: SectorLabel
    states: np.ndarray

    @property
    def dimension(self) -> int:
        return int(self.states.shape[0])

    @property
    def is_full(self) -> bool:
        return self.n_up == FULL_SPACE

    @property
    def is_parity(self) -> bool:
        """True for bases fixed only by the parity of the number of up spins."""
        return self.n_up in PARITY_REMAINDERS


def sector_dimension(length: int, n_up: SectorLabel = FULL_SPACE) -> int:
    if n_up == FULL_SPACE:
        return 1 << length
    if n_up in PARITY_REMAINDERS:
        return 1 << (length - 1)
    return math.comb(length, n_up)


def enumerate_sector(length: int, n_up: SectorLabel = FULL_SPACE) -> SectorBasis:
    """Returns the ordered basis of the `n_up` sector, a parity block or the whole space."""
    if length % 2 or not MIN_CHAIN_LENGTH <= length <= MAX_CHAIN_LENGTH:
        raise ValueError(
            f"chain length must be even and in [{MIN_CHAIN_LENGTH}, {MAX_CHAIN_LENGTH}], got {length}"
        )

    configs = np.arange(1 << length, dtype=np.int64)

    if n_up == FULL_SPACE:
        states = configs
    elif n_up in PARITY_REMAINDERS:
        states = configs[np.bitwise_count(configs) % 2 == PARITY_REMAINDERS[n_up]]
    else:
        if not 0 <= n_up <= length:
            raise ValueError(f"n_up must lie in [0, {length}], got {n_up}")
        states = configs[np.bitwise_count(configs) == n_up]

    states.setflags(write=False)
    logger.debug("Enumerated L=%d n_up=%s: dimension %d", length, n_up, states.shape[0])
    return SectorBasis(length=length, n_up=n_up, states=states)


def rank_of(basis: SectorBasis, config: int) -> int:
    """Index of `config` in the basis; raises StateNotInBasisError when absent."""
    if basis.is_full:
        if not 0 <= config < basis.dimension:
            raise StateNotInBasisError(f"configuration {config} outside the L={basis.length} space")
        return int(config)

    index = int(np.searchsorted(basis.states, config))
    if index == basis.dimension or basis.states[index] != config:
        raise StateNotInBasisError(f"configuration {config:#b} not in sector n_up={basis.n_up}")
    return index


def ranks(basis: SectorBasis, configs: np.ndarray) -> np.ndarray:
    """Vectorised `rank_of` over an array of configurations."""
    configs = np.asarray(configs, dtype=np.int64)
    if basis.is_full:
        if configs.size and (configs.min() < 0 or configs.max() >= basis.dimension):
            raise StateNotInBasisError("configuration outside the full space")
        return configs

    index = np.searchsorted(basis.states, configs)
    clipped = np.minimum(index, basis.dimension - 1)
    if configs.size and not np.array_equal(basis.states[clipped], configs):
        raise StateNotInBasisError(f"configuration not in sector n_up={basis.n_up}")
    return index
