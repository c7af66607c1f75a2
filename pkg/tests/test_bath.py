"""Bath kernel, flip rates, and block generators."""

import numpy as np
import pytest

from cwsim import (BathSpec, MagnetSpec, build_generator, flip_rates,
                   magnetization_grid, sector_energies, spectral_kernel)
from cwsim.oracle import stationarity_residual

BATH = BathSpec(gamma=0.002, temperature=0.2, cutoff=50.0)


def test_kernel_zero_frequency_limit():
    assert spectral_kernel(BATH, 0.0) == pytest.approx(0.05, rel=1e-14)
    # approach from both sides
    assert spectral_kernel(BATH, 1e-9) == pytest.approx(0.05, rel=1e-6)
    assert spectral_kernel(BATH, -1e-9) == pytest.approx(0.05, rel=1e-6)


def test_kernel_kms_single():
    lhs = spectral_kernel(BATH, -1.3)
    rhs = np.exp(1.3 / 0.2) * spectral_kernel(BATH, 1.3)
    assert lhs == pytest.approx(rhs, rel=1e-14)


def test_kernel_kms_random():
    rng = np.random.default_rng(7)
    omega = rng.uniform(-40, 40, 1000)
    omega = omega[np.abs(omega) > 1e-9]
    lhs = spectral_kernel(BATH, -omega)
    rhs = np.exp(omega / BATH.temperature) * spectral_kernel(BATH, omega)
    assert np.abs(lhs / rhs - 1).max() < 1e-12


def test_kernel_cutoff_suppression():
    assert spectral_kernel(BATH, -50.0 * BATH.cutoff) < 1e-18


def test_bath_validation_and_warning():
    with pytest.raises(ValueError):
        BathSpec(gamma=0.01, temperature=0.0, cutoff=50.0)
    with pytest.raises(ValueError):
        BathSpec(gamma=0.01, temperature=0.2, cutoff=-1.0)
    with pytest.warns(UserWarning, match="weak-coupling"):
        BathSpec(gamma=0.1, temperature=0.2, cutoff=50.0)


def test_flip_rates_edges():
    magnet = MagnetSpec(n=10)
    assert flip_rates(magnet, BATH, +1, 0.1, 1.0).up == 0.0
    assert flip_rates(magnet, BATH, +1, 0.1, -1.0).down == 0.0


def test_flip_rates_detailed_balance_ratio():
    # up(m)/down(m+2/N) against G-ratio times the Boltzmann factor,
    # both sides evaluated independently
    magnet = MagnetSpec(n=10, j2=0.0, j4=1.0)
    g, temp, m = 0.1, 0.2, 0.2
    grid = magnetization_grid(magnet)
    i = grid.index_of(m)
    up = flip_rates(magnet, BATH, +1, g, m).up
    down = flip_rates(magnet, BATH, +1, g, grid.m[i + 1]).down
    dh = (sector_energies(magnet, +1, g, grid.m[i + 1])
          - sector_energies(magnet, +1, g, grid.m[i]))
    expected = np.exp(grid.log_mult[i + 1] - grid.log_mult[i]) * np.exp(-dh / temp)
    assert up / down == pytest.approx(expected, rel=1e-12)


def test_generator_diagonal_block_is_stochastic():
    magnet = MagnetSpec(n=30)
    gen = build_generator(magnet, BATH, +1, +1, 0.1, 0.1)
    assert gen.is_diagonal
    assert np.all(gen.phase == 0)
    # column sums of the rate part vanish
    col = gen.gain_up + gen.gain_down - gen.loss
    assert np.abs(col).max() <= 1e-14 * gen.max_rate


def test_generator_offdiag_phase_value():
    # H_up - H_down = -2 g N m; phase = -i*(H_bra - H_ket) = +2i g N m
    magnet = MagnetSpec(n=4, j2=0.0, j4=1.0)
    gen = build_generator(magnet, BATH, +1, -1, 0.1, 0.1)
    grid = magnetization_grid(magnet)
    i = grid.index_of(0.5)
    assert gen.phase[i] == pytest.approx(1j * 0.4, abs=1e-14)


def test_generator_gamma_zero_pure_dephasing():
    magnet = MagnetSpec(n=12)
    bath0 = BathSpec(gamma=0.0, temperature=0.2, cutoff=50.0)
    gen = build_generator(magnet, bath0, +1, -1, 0.1, 0.1)
    assert np.all(gen.loss == 0) and np.all(gen.gain_up == 0)
    assert np.all(gen.phase.real == 0)


def test_generator_offdiag_modes():
    magnet = MagnetSpec(n=12)
    mixed = build_generator(magnet, BATH, +1, -1, 0.1, 0.1, offdiag_bath="mixed")
    loss_only = build_generator(magnet, BATH, +1, -1, 0.1, 0.1, offdiag_bath="loss_only")
    off = build_generator(magnet, BATH, +1, -1, 0.1, 0.1, offdiag_bath="off")
    assert np.all(mixed.loss == loss_only.loss)
    assert np.all(loss_only.gain_up == 0)
    assert np.all(off.loss == 0)
    assert mixed.gain_up.max() > 0
    with pytest.raises(ValueError):
        build_generator(magnet, BATH, +1, -1, 0.1, 0.1, offdiag_bath="nope")


def test_equilibrium_is_stationary():
    magnet = MagnetSpec(n=50)
    for g in (0.0, 0.1):
        gen = build_generator(magnet, BATH, +1, +1, g, g)
        res = stationarity_residual(gen, magnet, BATH, +1, g)
        assert res < 1e-10


def test_generator_dense_matches_apply():
    magnet = MagnetSpec(n=16)
    gen = build_generator(magnet, BATH, +1, -1, 0.2, 0.1)
    rng = np.random.default_rng(3)
    y = rng.normal(size=17) + 1j * rng.normal(size=17)
    assert np.allclose(gen.dense() @ y, gen.apply(y), atol=1e-14)
