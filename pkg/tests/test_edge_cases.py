"""Remaining contract edges: errors, big-N grids, coherence bounds."""

import numpy as np
import pytest

from cwsim import (BathSpec, CouplingSchedule, IntegrationError,
                   IntegratorConfig, MagnetSpec, ScenarioSpec,
                   magnetization_grid, meanfield_fixed_point, readout,
                   run_scenario)
from cwsim.scenarios import spatial_weight_matrix
from cwsim import RegionSpec

BATH = BathSpec(gamma=0.002, temperature=0.2, cutoff=50.0)


def test_grid_scales_to_macroscopic_n():
    grid = magnetization_grid(MagnetSpec(n=10**6))
    assert len(grid) == 10**6 + 1
    assert np.isfinite(grid.log_mult).all()
    mid = grid.log_mult[len(grid) // 2]
    assert mid == pytest.approx(10**6 * np.log(2.0), rel=1e-4)


def test_meanfield_iteration_cap():
    with pytest.raises(RuntimeError, match="did not converge"):
        meanfield_fixed_point(MagnetSpec(n=10, j2=1.0, j4=1e-12), +1, 0.0, 0.999,
                              max_iter=5)


def test_step_underflow_raises_with_block_label():
    spec = ScenarioSpec(kind="single", spin_state=np.diag([1.0, 0.0]),
                        magnet=MagnetSpec(n=10), bath=BATH,
                        schedule=CouplingSchedule(g=0.1, t_on=0.0, t_off=1.0),
                        t_final=1.0, samples=3)
    with pytest.raises(IntegrationError, match="u.u"):
        run_scenario(spec, IntegratorConfig(samples=3, max_step=1e-20))


def test_direct_w_matrix_validation():
    regions = RegionSpec(intervals=((0.0, 1.0),))
    base = dict(kind="spatial-one-detector", spin_state=np.diag([1.0, 0.0]),
                magnet=MagnetSpec(n=10), bath=BATH,
                schedule=CouplingSchedule(g=1.0, t_on=0.0, t_off=2.0),
                t_final=2.0, regions=regions)
    bad_cs = ScenarioSpec(**base, w_matrix=np.array([[0.5, 0.9], [0.9, 0.5]]))
    with pytest.raises(ValueError, match="inconsistent"):
        from cwsim import initialize_blocks
        initialize_blocks(bad_cs)
    bad_trace = ScenarioSpec(**base, w_matrix=np.array([[0.5, 0.0], [0.0, 0.4]]))
    with pytest.raises(ValueError, match="sum to 1"):
        spatial_weight_matrix(bad_trace)


def test_readout_requires_snapshot_time():
    spec = ScenarioSpec(kind="single", spin_state=np.diag([1.0, 0.0]),
                        magnet=MagnetSpec(n=10), bath=BATH,
                        schedule=CouplingSchedule(g=0.1, t_on=0.0, t_off=5.0),
                        t_final=5.0, samples=101)
    traj = run_scenario(spec, IntegratorConfig(samples=101, snapshots=3))
    with pytest.raises(ValueError, match="snapshot"):
        readout(traj, at=1.2345)


def test_no_gain_of_coherence():
    # l1 norm of every distribution never exceeds its initial value
    c = np.sqrt(0.21)
    spec = ScenarioSpec(kind="single", spin_state=np.array([[0.3, c], [c, 0.7]]),
                        magnet=MagnetSpec(n=40), bath=BATH,
                        schedule=CouplingSchedule(g=0.3, t_on=0.0, t_off=30.0),
                        t_final=30.0, samples=17)
    traj = run_scenario(spec, IntegratorConfig(samples=17, snapshots=17))
    for j in traj.snapshot_indices:
        for st in traj.snapshots[j]:
            for dist in st.per_apparatus:
                assert np.abs(dist.amplitudes).sum() <= 1.0 + 1e-12


def test_diagonal_blocks_stay_real_nonnegative():
    spec = ScenarioSpec(kind="single", spin_state=np.diag([0.4, 0.6]),
                        magnet=MagnetSpec(n=40), bath=BATH,
                        schedule=CouplingSchedule(g=0.3, t_on=0.0, t_off=60.0),
                        t_final=60.0, samples=9)
    traj = run_scenario(spec, IntegratorConfig(samples=9, snapshots=9))
    for j in traj.snapshot_indices:
        for st in traj.snapshots[j]:
            amps = st.per_apparatus[0].amplitudes
            assert np.abs(amps.imag).max() < 1e-12
            assert amps.real.min() > -1e-12


def test_t_on_delay_segment():
    # coupling off until t_on: the distribution only starts moving after
    spec = ScenarioSpec(kind="single", spin_state=np.diag([1.0, 0.0]),
                        magnet=MagnetSpec(n=40), bath=BATH,
                        schedule=CouplingSchedule(g=0.5, t_on=20.0, t_off=60.0),
                        t_final=80.0, samples=81)
    traj = run_scenario(spec)
    mean = traj.mean_m[:, 0, 0]
    t = traj.times
    assert abs(mean[t <= 19.0].max()) < 0.01
    assert mean[-1] > 0.2  # moved once the coupling came on
