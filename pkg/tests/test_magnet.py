"""Magnet thermodynamics: grid, multiplicities, free energy, fixed points."""

import numpy as np
import pytest
from scipy.special import logsumexp

from cwsim import (MagnetSpec, free_energy, magnetization_grid,
                   meanfield_fixed_point, sector_hamiltonian,
                   threshold_coupling)
from cwsim.oracle import barrier_scan


def test_grid_n2():
    grid = magnetization_grid(MagnetSpec(n=2))
    assert np.allclose(grid.m, [-1.0, 0.0, 1.0])


def test_grid_n4_multiplicity():
    grid = magnetization_grid(MagnetSpec(n=4))
    assert np.exp(grid.log_mult[2]) == pytest.approx(6.0, rel=1e-12)


def test_grid_n1000_total_multiplicity():
    # log-sum-exp of the binomial row must equal N ln 2
    grid = magnetization_grid(MagnetSpec(n=1000))
    total = logsumexp(grid.log_mult)
    assert abs(total - 1000 * np.log(2.0)) <= 1e-12 * 1000 * np.log(2.0)


def test_grid_symmetry_and_endpoints():
    grid = magnetization_grid(MagnetSpec(n=101))
    assert np.allclose(grid.log_mult, grid.log_mult[::-1], atol=1e-9)
    assert grid.log_mult[0] == 0.0 and grid.log_mult[-1] == 0.0
    peak = np.argmax(grid.log_mult)
    assert abs(grid.m[peak]) == np.abs(grid.m).min()


def test_grid_ascending_and_bounds():
    grid = magnetization_grid(MagnetSpec(n=37))
    assert len(grid) == 38
    assert np.all(np.diff(grid.m) > 0)
    assert grid[0].m == -1.0 and grid[-1].m == 1.0


def test_spec_validation():
    with pytest.raises(ValueError):
        MagnetSpec(n=0)
    with pytest.raises(ValueError):
        MagnetSpec(n=10, j2=-1.0)
    with pytest.raises(ValueError):
        MagnetSpec(n=10, j4=0.0)


def test_sector_hamiltonian_values():
    assert sector_hamiltonian(MagnetSpec(4, 0.0, 1.0), +1, 0.1, 1.0) == pytest.approx(-1.4)
    assert sector_hamiltonian(MagnetSpec(4, 0.0, 1.0), +1, 0.1, 0.0) == 0.0
    assert sector_hamiltonian(MagnetSpec(2, 1.0, 1.0), +1, 0.0, 1.0) == pytest.approx(-1.5)


def test_sector_hamiltonian_off_grid():
    with pytest.raises(ValueError):
        sector_hamiltonian(MagnetSpec(4), +1, 0.1, 0.3)


def test_sector_hamiltonian_spin_flip_symmetry():
    spec = MagnetSpec(n=20, j2=0.3, j4=1.0)
    grid = magnetization_grid(spec)
    for m in grid.m:
        left = sector_hamiltonian(spec, +1, 0.07, float(m))
        right = sector_hamiltonian(spec, -1, 0.07, float(-m))
        assert left == pytest.approx(right, abs=1e-12)


def test_free_energy_hot_single_minimum():
    prof = free_energy(MagnetSpec(n=1000), +1, 0.0, 10.0)
    assert len(prof.minima) == 1
    assert abs(prof.m[prof.minima[0]]) < 1.5 / 1000


def test_free_energy_cold_three_minima():
    prof = free_energy(MagnetSpec(n=1000), +1, 0.0, 0.2)
    assert len(prof.minima) == 3
    ms = sorted(prof.m[i] for i in prof.minima)
    assert ms[0] < -0.9 and abs(ms[1]) < 0.01 and ms[2] > 0.9


def test_free_energy_barrier_vanishes_above_threshold():
    spec = MagnetSpec(n=200)
    h_c = threshold_coupling(spec, 0.2)
    below = free_energy(spec, +1, 0.9 * h_c, 0.2).barrier_toward(+1)
    above = free_energy(spec, +1, 1.1 * h_c, 0.2).barrier_toward(+1)
    assert below is not None and below > 0
    assert above is None or above == 0.0


def test_meanfield_paramagnetic():
    # beta*J2 = 0.5 < 1: only the m = 0 root
    res = meanfield_fixed_point(MagnetSpec(100, 1.0, 1e-12), +1, 0.0, 2.0)
    assert res.converged
    assert abs(res.m) < 1e-10


def test_meanfield_ising_value():
    # oracle: bisection on f(m) = m - tanh(2m) over [0.5, 1.5]
    lo, hi = 0.5, 1.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - np.tanh(2 * mid) < 0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    res = meanfield_fixed_point(MagnetSpec(100, 1.0, 1e-12), +1, 0.0, 0.5)
    assert res.m == pytest.approx(root, abs=1e-11)
    assert res.m == pytest.approx(0.9575, abs=1e-4)


def test_meanfield_quartic_value():
    # oracle: bisection on m - tanh(5 m^3)
    lo, hi = 0.9, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - np.tanh(5 * mid**3) < 0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    res = meanfield_fixed_point(MagnetSpec(100, 0.0, 1.0), +1, 0.0, 0.2)
    assert res.m == pytest.approx(root, abs=1e-11)
    assert 0.9998 < res.m < 1.0  # close to but not equal to 1


def test_meanfield_residual_and_stability():
    spec = MagnetSpec(200, 0.0, 1.0)
    for s, g in [(+1, 0.0), (-1, 0.0), (+1, 0.1), (-1, 0.05)]:
        res = meanfield_fixed_point(spec, s, g, 0.2)
        beta = 5.0
        fixed = np.tanh(beta * (spec.j2 * res.m + spec.j4 * res.m**3 + g * s))
        assert abs(res.m - fixed) < 1e-12
        # iteration map derivative magnitude < 1 at the root
        deriv = beta * (spec.j2 + 3 * spec.j4 * res.m**2) * (1 - fixed**2)
        assert abs(deriv) < 1.0


def test_threshold_no_metastability_error():
    with pytest.raises(ValueError, match="no threshold"):
        threshold_coupling(MagnetSpec(n=200), 10.0)


def test_threshold_matches_dense_scan():
    spec = MagnetSpec(n=200)
    h_c = threshold_coupling(spec, 0.2)
    scan = barrier_scan(spec, +1, 0.2, np.arange(0.0, 0.08, 1e-4))
    assert scan is not None
    assert abs(h_c - scan) <= 1e-4


def test_threshold_monotone_in_temperature():
    spec = MagnetSpec(n=200)
    assert threshold_coupling(spec, 0.18) < threshold_coupling(spec, 0.22)


def test_intensive_free_energy_limit():
    n = 2000
    temp = 0.2
    spec = MagnetSpec(n=n, j2=0.0, j4=1.0)
    prof = free_energy(spec, +1, 0.05, temp)
    m = prof.m[1:-1]
    s_ent = -((1 + m) / 2 * np.log((1 + m) / 2) + (1 - m) / 2 * np.log((1 - m) / 2))
    intensive = -0.05 * m - spec.j4 * m**4 / 4 - temp * s_ent
    dev = np.abs(prof.f[1:-1] / n - intensive).max()
    assert dev <= 2.0 * temp * np.log(n) / n
    # endpoints are exact: log G(+-1) = 0 and s_ent(+-1) = 0
    assert prof.f[0] / n == pytest.approx(0.05 - 0.25, abs=1e-12)
