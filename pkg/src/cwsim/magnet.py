"""Static thermodynamics of the Curie-Weiss magnet.

The magnet is a collection of N spins-1/2 whose collective magnetization
m = (1/N) sum_n sigma_z^n takes the N+1 values m_k = -1 + 2k/N.  Because
every Hamiltonian in the model depends on the spins only through m, and the
initial magnet state is permutation-uniform, all dynamics close on these
sectors.  This module provides the sector grid with log-domain
multiplicities, the per-sector energies, grid free energies, ferromagnetic
mean-field fixed points, and the coupling threshold at which the
paramagnetic barrier disappears.

Units: hbar = 1, energies dimensionless (pick your unit; J4 is the
conventional choice), temperatures in energy units, times in inverse
energy units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass(frozen=True)
class MagnetSpec:
    """Magnet parameters: spin count and the two mean-field couplings.

    The self-energy per sector is -N*J2*m^2/2 - N*J4*m^4/4 with J2 >= 0 and
    J4 > 0 (quartic regime: first-order transition from the metastable
    paramagnet to the ferromagnetic wells).
    """

    n: int
    j2: float = 0.0
    j4: float = 1.0

    def __post_init__(self):
        if self.n < 1 or int(self.n) != self.n:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.j2 < 0:
            raise ValueError(f"j2 must be >= 0, got {self.j2}")
        if self.j4 <= 0:
            raise ValueError(f"j4 must be > 0, got {self.j4}")


@dataclass(frozen=True)
class SectorPoint:
    """One magnetization eigenvalue and the log of its multiplicity."""

    m: float
    log_mult: float


class SectorGrid:
    """The N+1 magnetization sectors, ascending in m.

    Multiplicities binom(N, N(1+m)/2) are held as logs throughout: the
    binomial row overflows double precision long before N = 1000.
    """

    def __init__(self, spec: MagnetSpec):
        self.spec = spec
        n = spec.n
        k = np.arange(n + 1)
        self.m = -1.0 + 2.0 * k / n
        self.log_mult = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)

    def __len__(self):
        return len(self.m)

    def __getitem__(self, i) -> SectorPoint:
        return SectorPoint(float(self.m[i]), float(self.log_mult[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def initial_distribution(self) -> np.ndarray:
        """Paramagnetic weights G(m)/2^N; sums to 1."""
        return np.exp(self.log_mult - self.spec.n * np.log(2.0))

    def index_of(self, m: float) -> int:
        """Grid index of m; raises if m is not a grid point."""
        k = (1.0 + m) * self.spec.n / 2.0
        ki = int(round(k))
        if not 0 <= ki <= self.spec.n or abs(k - ki) > 1e-9 * max(1, self.spec.n):
            raise ValueError(f"m={m} is not on the magnetization grid for N={self.spec.n}")
        return ki


def magnetization_grid(spec: MagnetSpec) -> SectorGrid:
    """Sector grid for the magnet; N+1 points, no overflow up to N ~ 10^6."""
    return SectorGrid(spec)


def sector_energies(spec: MagnetSpec, s: float, g: float, m: np.ndarray) -> np.ndarray:
    """Vectorized H_i(m) = -g*N*s*m - N*J2*m^2/2 - N*J4*m^4/4.

    s is the tested spin's z-value on this side (+1 or -1); g the effective
    coupling (may carry a region factor, may be 0 or negative).
    """
    n = spec.n
    return -g * n * s * m - 0.5 * n * spec.j2 * m**2 - 0.25 * n * spec.j4 * m**4


def sector_hamiltonian(spec: MagnetSpec, s: int, g: float, m: float) -> float:
    """Sector energy at a single grid point; raises if m is off-grid."""
    magnetization_grid(spec).index_of(m)
    return float(sector_energies(spec, s, g, np.asarray(m)))


@dataclass
class FreeEnergyProfile:
    """Grid free energy F(m) = H_i(m) - T*log G(m) with well structure."""

    m: np.ndarray
    f: np.ndarray
    minima: list  # indices of local minima, ascending m

    def points(self):
        return list(zip(self.m.tolist(), self.f.tolist()))

    def barrier_toward(self, direction: int) -> float | None:
        """Height of the barrier confining the m ~ 0 well toward +-1.

        Walks downhill from the grid point nearest m = 0 to the local
        minimum of the origin well, then returns max(F) - F(well) over the
        remaining path in `direction`.  None if there is no local minimum
        beyond the well in that direction (no barrier structure).
        """
        i0 = int(np.argmin(np.abs(self.m)))
        step = 1 if direction > 0 else -1
        f = self.f
        i = i0
        while 0 <= i + step <= len(f) - 1 and f[i + step] < f[i]:
            i += step
        rest = f[i::step]
        if len(rest) < 2:
            return None
        height = float(rest.max() - rest[0])
        # a genuine barrier needs a descent beyond the peak
        peak = int(np.argmax(rest))
        if peak == len(rest) - 1:
            return None if height == 0.0 else height
        return height


def free_energy(spec: MagnetSpec, s: int, g: float, temperature: float) -> FreeEnergyProfile:
    """F over the sector grid, with local minima reported.

    For large N, F/N approaches the intensive form
    -g*s*m - J2*m^2/2 - J4*m^4/4 - T*s_ent(m) up to O(ln N / N).
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    grid = magnetization_grid(spec)
    f = sector_energies(spec, s, g, grid.m) - temperature * grid.log_mult
    minima = []
    for i in range(len(f)):
        left_ok = i == 0 or f[i] < f[i - 1]
        right_ok = i == len(f) - 1 or f[i] <= f[i + 1]
        if left_ok and right_ok:
            minima.append(i)
    return FreeEnergyProfile(m=grid.m, f=f, minima=minima)


@dataclass
class MeanFieldResult:
    m: float
    converged: bool
    iterations: int


def meanfield_fixed_point(spec: MagnetSpec, s: int, g: float, temperature: float,
                          max_iter: int = 100_000, tol: float = 1e-13) -> MeanFieldResult:
    """Largest-|m| stable root of m = tanh(beta*(J2*m + J4*m^3 + g*s)).

    Damped iteration (factor 0.5) seeded at 0.9*s so the paramagnetic root
    cannot capture the search when ferromagnetic roots exist.
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    beta = 1.0 / temperature

    def step(x):
        return np.tanh(beta * (spec.j2 * x + spec.j4 * x**3 + g * s))

    m = 0.9 * s
    for it in range(1, max_iter + 1):
        m = 0.5 * m + 0.5 * step(m)
        if abs(m - step(m)) < tol:
            return MeanFieldResult(m=float(m), converged=True, iterations=it)
    raise RuntimeError(
        f"mean-field iteration did not converge after {max_iter} iterations "
        f"(s={s}, g={g}, T={temperature})")


def threshold_coupling(spec: MagnetSpec, temperature: float, s: int = +1,
                       tol: float = 1e-6, g_max: float = 10.0) -> float:
    """Minimal coupling g at which the free-energy barrier from m ~ 0 vanishes.

    Bisection on g of barrier_toward(s); requires the three-minima
    (metastable) structure at g = 0.
    """
    prof0 = free_energy(spec, s, 0.0, temperature)
    b0 = prof0.barrier_toward(s)
    if b0 is None or b0 <= 0 or len(prof0.minima) < 3:
        raise ValueError(
            "no threshold in this regime: free energy at g=0 has no "
            "metastable barrier structure")

    def barrier(g):
        b = free_energy(spec, s, g, temperature).barrier_toward(s)
        return b if b is not None else 0.0

    lo, hi = 0.0, g_max
    if barrier(hi) > 0:
        raise ValueError(f"barrier persists up to g={g_max}; raise g_max")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if barrier(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
