"""Effective quasi-Ohmic bath: spectral kernel, flip rates, block generators.

The microscopic phonon bath is never simulated mode by mode.  It enters
through the Markovian spectral kernel

    K(w) = (1/4) * w * exp(-|w|/cutoff) / (exp(w/T) - 1),   K(0) = T/4,

which satisfies the KMS condition K(-w) = exp(w/T) * K(w).  Magnetization
flips m -> m +- 2/N then occur with gain-loss rates proportional to the
number of flippable spins times K at the sector energy difference, which
enforces detailed balance against each sector Hamiltonian exactly.

The overall rate prefactor only fixes the unit of bath time relative to the
coherent (phase) time; RATE_SCALE pins that convention so that the default
parameter set suppresses the first dephasing recurrence below 1% (see
DEFAULTS in the package docs).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .magnet import MagnetSpec, magnetization_grid, sector_energies

# Bath-time unit convention: flip rates are RATE_SCALE * gamma * N * n_flip * 2K.
# Detailed balance and all rate *ratios* are independent of this number; it is
# pinned by requiring the first coherence recurrence (t = pi/2g) to be
# suppressed below 1% at the default parameter set.
RATE_SCALE = 10.0

OFFDIAG_MODES = ("mixed", "loss_only", "off")


@dataclass(frozen=True)
class BathSpec:
    """Effective bath: dimensionless coupling, temperature, Debye-like cutoff."""

    gamma: float
    temperature: float
    cutoff: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.temperature <= 0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if self.cutoff <= 0:
            raise ValueError(f"cutoff must be > 0, got {self.cutoff}")
        if self.gamma > 0.05:
            warnings.warn(
                f"gamma={self.gamma} is outside the weak-coupling regime "
                "(gamma << 1); rates may not be physically meaningful",
                stacklevel=2)


@dataclass(frozen=True)
class RatePair:
    """Rates for one sector: m -> m + 2/N (up) and m -> m - 2/N (down)."""

    up: float
    down: float


def spectral_kernel(bath: BathSpec, omega):
    """K(omega); vectorized, continuous at omega = 0 where K = T/4."""
    w = np.asarray(omega, dtype=float)
    small = np.abs(w) < 1e-12 * bath.temperature
    x = np.where(small, 1.0, w)
    val = 0.25 * x * np.exp(-np.abs(x) / bath.cutoff) / np.expm1(x / bath.temperature)
    out = np.where(small, bath.temperature / 4.0, val)
    return float(out) if np.isscalar(omega) else out


def _hop_frequencies(magnet: MagnetSpec, s: float, g: float, m: np.ndarray):
    """Energy changes for hops m -> m+2/N and m -> m-2/N on one side.

    Entries for hops leaving the grid are set to 0 (their rates are zeroed
    by the occupation factors anyway).
    """
    e = sector_energies(magnet, s, g, m)
    om_up = np.zeros_like(m)
    om_dn = np.zeros_like(m)
    om_up[:-1] = e[1:] - e[:-1]
    om_dn[1:] = e[:-1] - e[1:]
    return om_up, om_dn


def _raw_rates(magnet: MagnetSpec, bath: BathSpec, m: np.ndarray, om_up, om_dn):
    """Gain-loss rates: n_flippable * 2K(omega).  No overall time scale."""
    n = magnet.n
    up = bath.gamma * n * (1.0 - m) / 2.0 * 2.0 * spectral_kernel(bath, om_up)
    down = bath.gamma * n * (1.0 + m) / 2.0 * 2.0 * spectral_kernel(bath, om_dn)
    up[-1] = 0.0
    down[0] = 0.0
    return up, down


def flip_rates(magnet: MagnetSpec, bath: BathSpec, s: int, g: float, m: float) -> RatePair:
    """Up/down rates at one grid point for a same-coupling (diagonal) block.

    up(m)/down(m+2/N) = [G(m+2/N)/G(m)] * exp(-(H(m+2/N)-H(m))/T), so the
    equilibrium distribution G(m) exp(-H(m)/T) is stationary.
    """
    grid = magnetization_grid(magnet)
    i = grid.index_of(m)
    om_up, om_dn = _hop_frequencies(magnet, s, g, grid.m)
    up, down = _raw_rates(magnet, bath, grid.m, om_up, om_dn)
    return RatePair(up=float(up[i]), down=float(down[i]))


@dataclass
class BlockGenerator:
    """Tridiagonal-plus-diagonal generator for one (block, apparatus) stream.

    Acts on a complex sector distribution c as

        (A c)[k] = (phase[k] - loss[k]) c[k]
                   + gain_up[k-1] c[k-1] + gain_down[k+1] c[k+1]
    """

    phase: np.ndarray      # -i*(H_bra - H_ket) per grid point
    gain_up: np.ndarray    # rate feeding bin k+1 from bin k
    gain_down: np.ndarray  # rate feeding bin k-1 from bin k
    loss: np.ndarray       # up(k) + down(k), removed from bin k
    is_diagonal: bool

    def __post_init__(self):
        self._diag = self.phase - self.loss

    @property
    def max_rate(self) -> float:
        return float(max(self.gain_up.max(initial=0.0),
                         self.gain_down.max(initial=0.0),
                         self.loss.max(initial=0.0)))

    def apply(self, y: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        """Matrix-vector product, O(N)."""
        if out is None:
            out = np.empty_like(y)
        np.multiply(self._diag, y, out=out)
        out[1:] += self.gain_up[:-1] * y[:-1]
        out[:-1] += self.gain_down[1:] * y[1:]
        return out

    def dense(self) -> np.ndarray:
        """Full matrix; for the dense reference solver and audits."""
        n = len(self.phase)
        a = np.zeros((n, n), dtype=complex)
        idx = np.arange(n)
        a[idx, idx] = self._diag
        a[idx[1:], idx[:-1]] = self.gain_up[:-1]
        a[idx[:-1], idx[1:]] = self.gain_down[1:]
        return a


def build_generator(magnet: MagnetSpec, bath: BathSpec, s_bra: int, s_ket: int,
                    coupling_bra: float, coupling_ket: float,
                    offdiag_bath: str = "mixed",
                    rate_scale: float = RATE_SCALE) -> BlockGenerator:
    """Generator for a block labeled by per-side spin values and couplings.

    The per-side couplings are the effective products of g with any region
    factor (-k inside a detector region, 0 outside).  When the two sides see
    the same effective field the phase part vanishes and the gain-loss part
    is the full detailed-balance generator (columns sum to zero).  Otherwise
    the block carries a per-bin phase rotation -i*(H_bra - H_ket) and the
    bath acts per `offdiag_bath`:

      mixed     -- gain-loss rates at the arithmetic mean of the bra and ket
                   hop frequencies (default; reduces to pure dephasing at
                   gamma = 0),
      loss_only -- same rates but gain terms dropped,
      off       -- no bath action on non-diagonal blocks.
    """
    if offdiag_bath not in OFFDIAG_MODES:
        raise ValueError(f"offdiag_bath must be one of {OFFDIAG_MODES}, got {offdiag_bath!r}")
    grid = magnetization_grid(magnet)
    m = grid.m
    e_bra = sector_energies(magnet, s_bra, coupling_bra, m)
    e_ket = sector_energies(magnet, s_ket, coupling_ket, m)
    phase = -1j * (e_bra - e_ket)
    diagonal = bool(np.array_equal(e_bra, e_ket))

    zeros = np.zeros_like(m)
    if bath.gamma == 0.0:
        return BlockGenerator(phase=phase, gain_up=zeros.copy(), gain_down=zeros.copy(),
                              loss=zeros.copy(), is_diagonal=diagonal)

    if diagonal:
        om_up, om_dn = _hop_frequencies(magnet, s_bra, coupling_bra, m)
        up, down = _raw_rates(magnet, bath, m, om_up, om_dn)
        up *= rate_scale
        down *= rate_scale
        return BlockGenerator(phase=phase, gain_up=up, gain_down=down,
                              loss=up + down, is_diagonal=True)

    if offdiag_bath == "off":
        return BlockGenerator(phase=phase, gain_up=zeros.copy(), gain_down=zeros.copy(),
                              loss=zeros.copy(), is_diagonal=False)

    bu, bd = _hop_frequencies(magnet, s_bra, coupling_bra, m)
    ku, kd = _hop_frequencies(magnet, s_ket, coupling_ket, m)
    up, down = _raw_rates(magnet, bath, m, (bu + ku) / 2.0, (bd + kd) / 2.0)
    up *= rate_scale
    down *= rate_scale
    if offdiag_bath == "loss_only":
        return BlockGenerator(phase=phase, gain_up=zeros.copy(), gain_down=zeros.copy(),
                              loss=up + down, is_diagonal=False)
    return BlockGenerator(phase=phase, gain_up=up, gain_down=down,
                          loss=up + down, is_diagonal=False)
