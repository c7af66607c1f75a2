"""Block-decomposed state of the spin(s) + apparatus(es) density operator.

Expanding the density operator in the z-basis of the tested spins (and, for
spatially confined detectors, in the position-region basis) yields blocks
that evolve independently.  Each block holds one complex sector distribution
per apparatus; distributions of distinct apparatuses stay in product form
for all times because their generators act on separate factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OUTSIDE = "outside"

_SPIN_CHAR = {+1: "u", -1: "d"}


@dataclass(frozen=True)
class BlockLabel:
    """Bra/ket spin values per tested spin, plus region labels if spatial.

    Immutable: a block keeps its label for the whole evolution.  Regions are
    detector indices or OUTSIDE; None for scenarios without spatial structure.
    """

    spin_bra: tuple
    spin_ket: tuple
    region_bra: object = None
    region_ket: object = None

    def __post_init__(self):
        if len(self.spin_bra) != len(self.spin_ket):
            raise ValueError("bra and ket spin tuples must have equal length")
        if len(self.spin_bra) not in (1, 2):
            raise ValueError("one or two tested spins supported")

    @property
    def is_diagonal(self) -> bool:
        return self.spin_bra == self.spin_ket and self.region_bra == self.region_ket

    def conjugate(self) -> "BlockLabel":
        return BlockLabel(self.spin_ket, self.spin_bra, self.region_ket, self.region_bra)

    @property
    def id(self) -> str:
        spins = "".join(_SPIN_CHAR[s] for s in self.spin_bra) + "." + \
                "".join(_SPIN_CHAR[s] for s in self.spin_ket)
        if self.region_bra is None:
            return spins
        def reg(r):
            return "out" if r == OUTSIDE else f"r{r}"
        return f"{spins}@{reg(self.region_bra)}.{reg(self.region_ket)}"


@dataclass
class SectorDistribution:
    """Complex amplitudes over the N+1 magnetization sectors of one apparatus."""

    amplitudes: np.ndarray

    def total(self) -> complex:
        return complex(self.amplitudes.sum())

    def mean_m(self, m: np.ndarray) -> float:
        """Magnitude-weighted mean magnetization (equals the probability mean
        for diagonal blocks, where amplitudes are real and nonnegative)."""
        w = np.abs(self.amplitudes)
        tot = w.sum()
        if tot == 0:
            return 0.0
        return float((m * w).sum() / tot)

    def var_m(self, m: np.ndarray) -> float:
        w = np.abs(self.amplitudes)
        tot = w.sum()
        if tot == 0:
            return 0.0
        mu = (m * w).sum() / tot
        return float(((m - mu) ** 2 * w).sum() / tot)


@dataclass
class BlockState:
    """One independently evolving block: label, spatial weight, distributions."""

    label: BlockLabel
    weight: complex
    per_apparatus: list  # list[SectorDistribution], one per apparatus
    frozen: bool = field(default=False)

    def copy(self) -> "BlockState":
        return BlockState(
            label=self.label,
            weight=self.weight,
            per_apparatus=[SectorDistribution(d.amplitudes.copy()) for d in self.per_apparatus],
            frozen=self.frozen)


@dataclass(frozen=True)
class CouplingSchedule:
    """System-apparatus coupling g, switched on at t_on and off at t_off.

    k is the region potential depth for spatially confined detectors; the
    effective coupling inside a region is -k*g per side.
    """

    g: float
    t_on: float = 0.0
    t_off: float = float("inf")
    k: float = 1.0

    def __post_init__(self):
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if not 0 <= self.t_on < self.t_off:
            raise ValueError(f"need 0 <= t_on < t_off, got t_on={self.t_on}, t_off={self.t_off}")
        if self.k <= 0:
            raise ValueError(f"k must be > 0, got {self.k}")


def block_trace(block: BlockState) -> complex:
    """weight times the product over apparatuses of the distribution sums.

    For diagonal blocks this is the block's Born weight; summed over all
    diagonal blocks it is conserved at 1.
    """
    tr = block.weight
    for dist in block.per_apparatus:
        tr = tr * dist.total()
    return complex(tr)


def coherence_magnitude(block: BlockState) -> float:
    """|trace| of an off-diagonal (spin or region) block.

    At gamma = 0 with a single apparatus this equals
    |r_offdiag(0)| * |cos(2 g t)|^N.
    """
    if block.label.is_diagonal:
        raise ValueError(f"block {block.label.id} is diagonal; coherence is undefined")
    return abs(block_trace(block))
