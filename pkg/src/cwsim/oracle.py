"""Independent brute-force validators.

Everything here deliberately uses different numerics from the engine:
closed-form binomial sums instead of integrated phases, matrix exponentials
instead of Runge-Kutta steps, dense parameter scans instead of bisection.
Shared bugs cannot cancel.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .bath import BathSpec, BlockGenerator
from .magnet import MagnetSpec, free_energy, magnetization_grid, sector_energies

DENSE_N_MAX = 64


def analytic_dephasing(n: int, g: float, t):
    """|cos(2 g t)|^N: the exact gamma = 0 coherence decay law.

    Computed as exp(N * ln|cos 2gt|) so it underflows gracefully; exact 0 at
    the zeros of the cosine.
    """
    t = np.asarray(t, dtype=float)
    c = np.abs(np.cos(2.0 * g * t))
    with np.errstate(divide="ignore"):
        out = np.where(c == 0.0, 0.0, np.exp(n * np.log(np.where(c == 0, 1.0, c))))
    return float(out) if out.ndim == 0 else out


def dense_reference_evolution(generator: BlockGenerator, initial: np.ndarray,
                              t_final: float, steps: int = 1024) -> np.ndarray:
    """Reference evolution by repeated application of expm(A * t / steps).

    Scaling-and-squaring matrix exponential on a fixed fine grid; dense
    (N+1)^2 storage, so N is capped at DENSE_N_MAX.
    """
    n = len(initial) - 1
    if n > DENSE_N_MAX:
        raise ValueError(f"dense reference limited to N <= {DENSE_N_MAX}, got N = {n}")
    e = expm(generator.dense() * (t_final / steps))
    y = np.asarray(initial, dtype=complex).copy()
    for _ in range(steps):
        y = e @ y
    return y


def dense_reference_trajectory(generator: BlockGenerator, initial: np.ndarray,
                               times) -> np.ndarray:
    """Reference amplitudes at each requested time (expm from t = 0)."""
    n = len(initial) - 1
    if n > DENSE_N_MAX:
        raise ValueError(f"dense reference limited to N <= {DENSE_N_MAX}, got N = {n}")
    a = generator.dense()
    y0 = np.asarray(initial, dtype=complex)
    return np.stack([expm(a * float(t)) @ y0 for t in times])


def stationarity_residual(generator: BlockGenerator, magnet: MagnetSpec,
                          bath: BathSpec, s: int, g: float) -> float:
    """Detailed-balance audit: P_eq ~ G(m) exp(-H/T) must be a null vector.

    Builds the equilibrium distribution independently from logs and returns
    ||generator . P_eq||_inf normalized by the largest rate.  Zero (exactly)
    when gamma = 0; below ~1e-10 for a correctly signed kernel; order one
    for a sign-flipped kernel.
    """
    grid = magnetization_grid(magnet)
    log_p = grid.log_mult - sector_energies(magnet, s, g, grid.m) / bath.temperature
    log_p -= log_p.max()
    p_eq = np.exp(log_p)
    p_eq /= p_eq.sum()
    resid = np.abs(generator.apply(p_eq.astype(complex))).max()
    scale = generator.max_rate
    if scale == 0.0:
        return float(resid)
    return float(resid / scale)


def barrier_scan(magnet: MagnetSpec, s: int, temperature: float,
                 g_grid) -> float | None:
    """Brute-force threshold coupling: first grid g with no confining barrier.

    Returns None when no barrier exists anywhere on the grid (e.g. above the
    Curie point there is nothing to erase).
    """
    g_grid = np.asarray(g_grid, dtype=float)
    had_barrier = False
    for g in g_grid:
        b = free_energy(magnet, s, float(g), temperature).barrier_toward(s)
        if b is not None and b > 0:
            had_barrier = True
        elif had_barrier:
            return float(g)
    return None
