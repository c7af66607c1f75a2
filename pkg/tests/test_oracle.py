"""The oracles themselves, plus engine-vs-oracle cross checks."""

import numpy as np
import pytest
from scipy.special import comb

from cwsim import (BathSpec, BlockGenerator, MagnetSpec, analytic_dephasing,
                   barrier_scan, build_generator, dense_reference_evolution,
                   magnetization_grid, threshold_coupling)
from cwsim.bath import _hop_frequencies, _raw_rates, spectral_kernel
from cwsim.oracle import dense_reference_trajectory, stationarity_residual

BATH = BathSpec(gamma=0.002, temperature=0.2, cutoff=50.0)


def test_analytic_dephasing_values():
    # cos(pi/2) in floats is ~6e-17, not an exact zero
    assert analytic_dephasing(1, 0.1, np.pi / 4 / 0.1) < 1e-15
    assert analytic_dephasing(50, 0.1, np.pi / 4 / 0.1) == 0.0  # underflows to 0
    assert analytic_dephasing(7, 0.3, 0.0) == 1.0
    # explicit 51-term binomial sum at N=50, 2gt = 0.1
    n, g = 50, 0.05
    t = 0.1 / (2 * g)
    m = -1.0 + 2.0 * np.arange(n + 1) / n
    weights = comb(n, np.arange(n + 1)) / 2.0**n
    explicit = abs((weights * np.exp(2j * g * n * m * t)).sum())
    assert analytic_dephasing(n, g, t) == pytest.approx(explicit, rel=1e-12)
    assert explicit == pytest.approx(0.7784754827, abs=1e-9)


def test_dense_reference_zero_generator():
    n = 10
    zeros = np.zeros(n + 1)
    gen = BlockGenerator(phase=zeros * 0j, gain_up=zeros.copy(),
                         gain_down=zeros.copy(), loss=zeros.copy(), is_diagonal=True)
    y0 = np.linspace(0, 1, n + 1).astype(complex)
    out = dense_reference_evolution(gen, y0, 5.0)
    assert np.abs(out - y0).max() < 1e-14


def test_dense_reference_size_guard():
    magnet = MagnetSpec(n=80)
    gen = build_generator(magnet, BATH, +1, +1, 0.1, 0.1)
    p0 = magnetization_grid(magnet).initial_distribution().astype(complex)
    with pytest.raises(ValueError, match="N <= 64"):
        dense_reference_evolution(gen, p0, 1.0)


def test_dense_reference_pure_phase_preserves_moduli():
    magnet = MagnetSpec(n=20)
    bath0 = BathSpec(gamma=0.0, temperature=0.2, cutoff=50.0)
    gen = build_generator(magnet, bath0, +1, -1, 0.3, 0.3)
    p0 = magnetization_grid(magnet).initial_distribution().astype(complex)
    out = dense_reference_evolution(gen, p0, 3.0)
    assert np.abs(np.abs(out) - np.abs(p0)).max() < 1e-12


def test_stationarity_residual_modes():
    magnet = MagnetSpec(n=50)
    gen = build_generator(magnet, BATH, +1, +1, 0.1, 0.1)
    assert stationarity_residual(gen, magnet, BATH, +1, 0.1) < 1e-10

    bath0 = BathSpec(gamma=0.0, temperature=0.2, cutoff=50.0)
    gen0 = build_generator(magnet, bath0, +1, +1, 0.1, 0.1)
    assert stationarity_residual(gen0, magnet, bath0, +1, 0.1) == 0.0


def test_stationarity_detects_sign_error():
    # mutation: kernel evaluated at flipped frequency sign breaks balance
    magnet = MagnetSpec(n=50)
    grid = magnetization_grid(magnet)
    om_up, om_dn = _hop_frequencies(magnet, +1, 0.1, grid.m)
    up, down = _raw_rates(magnet, BATH, grid.m, -om_up, -om_dn)  # sign flip
    mutant = BlockGenerator(phase=np.zeros_like(grid.m) * 0j, gain_up=up,
                            gain_down=down, loss=up + down, is_diagonal=True)
    assert stationarity_residual(mutant, magnet, BATH, +1, 0.1) > 1e-2


def test_barrier_scan_against_bisection():
    spec = MagnetSpec(n=200)
    grid = np.arange(0.0, 0.08, 1e-4)
    scan = barrier_scan(spec, +1, 0.2, grid)
    h_c = threshold_coupling(spec, 0.2)
    assert abs(scan - h_c) <= 1e-4


def test_barrier_scan_above_curie():
    assert barrier_scan(MagnetSpec(n=200), +1, 10.0, np.arange(0, 0.1, 1e-3)) is None


def test_barrier_scan_monotone_in_temperature():
    spec = MagnetSpec(n=200)
    grid = np.arange(0.0, 0.1, 1e-4)
    values = [barrier_scan(spec, +1, t, grid) for t in (0.18, 0.20, 0.22)]
    assert values[0] < values[1] < values[2]


def test_engine_matches_dense_reference_diagonal():
    # the comparison that anchors criterion 10, small version
    from cwsim import CouplingSchedule, IntegratorConfig, ScenarioSpec, run_scenario
    magnet = MagnetSpec(n=20)
    spec = ScenarioSpec(kind="single", spin_state=np.diag([1.0, 0.0]),
                        magnet=magnet, bath=BATH,
                        schedule=CouplingSchedule(g=0.3, t_on=0.0, t_off=40.0),
                        t_final=40.0, samples=9)
    traj = run_scenario(spec, IntegratorConfig(samples=9, snapshots=9))
    gen = build_generator(magnet, BATH, +1, +1, 0.3, 0.3)
    p0 = magnetization_grid(magnet).initial_distribution().astype(complex)
    ref = dense_reference_trajectory(gen, p0, traj.times)
    for row, j in enumerate(traj.snapshot_indices):
        amps = traj.snapshots[j][0].per_apparatus[0].amplitudes
        assert np.abs(amps - ref[j]).max() < 1e-6


def test_kernel_vectorization_matches_scalar():
    omegas = np.array([-3.0, -0.5, 0.0, 0.5, 3.0])
    vec = spectral_kernel(BATH, omegas)
    scal = np.array([spectral_kernel(BATH, float(w)) for w in omegas])
    assert np.allclose(vec, scal, rtol=0, atol=0)
