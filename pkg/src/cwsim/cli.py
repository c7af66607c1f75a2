"""Command-line entry points.

  cwsim run --config cfg.json --out outdir
  cwsim verify [--n N]
  cwsim threshold --config cfg.json
  cwsim meanfield --config cfg.json
  cwsim dephase --config cfg.json
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import runner
from .bath import BathSpec, build_generator, flip_rates, spectral_kernel
from .blocks import CouplingSchedule
from .config import ConfigError, parse_config
from .engine import IntegratorConfig
from .magnet import MagnetSpec, meanfield_fixed_point, threshold_coupling
from .oracle import (analytic_dephasing, barrier_scan,
                     dense_reference_trajectory, stationarity_residual)
from .scenarios import ScenarioSpec, run_scenario


def _cmd_run(args):
    config = parse_config(args.config)
    paths = runner.run(config, args.out)
    print(f"wrote {paths['timeseries']}")
    print(f"wrote {paths['distributions']}")
    print(f"wrote {paths['readout']}")
    return 0


def _check(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


def _cmd_verify(args):
    n = args.n
    magnet = MagnetSpec(n=n, j2=0.0, j4=1.0)
    bath = BathSpec(gamma=0.002, temperature=0.2, cutoff=50.0)
    all_ok = True

    rng = np.random.default_rng(0)
    omegas = rng.uniform(-5, 5, 1000)
    omegas = omegas[np.abs(omegas) > 1e-6]
    lhs = spectral_kernel(bath, -omegas)
    rhs = np.exp(omegas / bath.temperature) * spectral_kernel(bath, omegas)
    err = float(np.abs(lhs / rhs - 1).max())
    all_ok &= _check("KMS symmetry", err < 1e-12, f"max rel err {err:.2e}")

    grid_m = -1.0 + 2.0 * np.arange(n + 1) / n
    i = n // 2 + 1
    rp = flip_rates(magnet, bath, +1, 0.1, grid_m[i])
    rq = flip_rates(magnet, bath, +1, 0.1, grid_m[i + 1])
    from .magnet import magnetization_grid, sector_energies
    g = magnetization_grid(magnet)
    dh = (sector_energies(magnet, +1, 0.1, grid_m[i + 1])
          - sector_energies(magnet, +1, 0.1, grid_m[i]))
    expect = np.exp(g.log_mult[i + 1] - g.log_mult[i]) * np.exp(-dh / bath.temperature)
    err = abs(rp.up / rq.down / expect - 1)
    all_ok &= _check("detailed balance ratio", err < 1e-12, f"rel err {err:.2e}")

    gen = build_generator(magnet, bath, +1, +1, 0.1, 0.1)
    res = stationarity_residual(gen, magnet, bath, +1, 0.1)
    all_ok &= _check("equilibrium stationarity", res < 1e-10, f"residual {res:.2e}")

    r = np.array([[0.5, 0.5], [0.5, 0.5]])
    spec = ScenarioSpec(kind="single", spin_state=r, magnet=magnet,
                        bath=BathSpec(gamma=0.0, temperature=0.2, cutoff=50.0),
                        schedule=CouplingSchedule(g=0.1, t_on=0.0, t_off=20.0),
                        t_final=20.0, samples=65)
    traj = run_scenario(spec, IntegratorConfig(rtol=1e-11, atol=1e-14, samples=65))
    i_off = traj.block_index("u.d")
    sim = traj.coherence(i_off) / abs(traj.traces[0, i_off])
    law = analytic_dephasing(n, 0.1, traj.times)
    err = float(np.abs(sim - law).max())
    all_ok &= _check("gamma=0 dephasing law", err < 1e-8, f"max err {err:.2e}")

    spec2 = ScenarioSpec(kind="single", spin_state=r, magnet=magnet, bath=bath,
                         schedule=CouplingSchedule(g=0.1, t_on=0.0, t_off=20.0),
                         t_final=20.0, samples=33)
    traj2 = run_scenario(spec2, IntegratorConfig(rtol=1e-10, atol=1e-13, samples=33))
    worst = 0.0
    from .scenarios import build_scenario
    built = build_scenario(spec2)
    p0 = magnetization_grid(magnet).initial_distribution().astype(complex)
    for bi, label in enumerate(traj2.labels):
        ref = dense_reference_trajectory(built.generators[bi][0].on, p0, traj2.times)
        sums = ref.sum(axis=1) * traj2.weights[bi]
        worst = max(worst, float(np.abs(sums - traj2.traces[:, bi]).max()))
    all_ok &= _check("engine vs dense reference", worst < 1e-6, f"max diff {worst:.2e}")

    tr = traj2.traces[:, [i for i, l in enumerate(traj2.labels) if l.is_diagonal]]
    err = float(np.abs(tr.sum(axis=1).real - 1).max())
    all_ok &= _check("trace conservation", err < 1e-9, f"max dev {err:.2e}")

    magnet200 = MagnetSpec(n=200, j2=0.0, j4=1.0)
    hc = threshold_coupling(magnet200, 0.2)
    scan = barrier_scan(magnet200, +1, 0.2, np.arange(0.0, 0.1, 1e-4))
    err = abs(hc - scan)
    all_ok &= _check("threshold vs dense scan", err <= 1e-4,
                     f"h_c={hc:.6f} scan={scan:.6f} diff {err:.1e}")

    print("verify:", "all checks passed" if all_ok else "FAILURES present")
    return 0 if all_ok else 1


def _cmd_threshold(args):
    config = parse_config(args.config)
    magnet = config.scenario.magnet
    temp = config.scenario.bath.temperature
    h_c = threshold_coupling(magnet, temp)
    scan = barrier_scan(magnet, +1, temp, np.arange(0.0, max(0.2, 3 * h_c), 1e-4))
    print(f"h_c (bisection) = {h_c:.6f}")
    print(f"h_c (dense scan, step 1e-4) = {scan:.6f}")
    print(f"difference = {abs(h_c - scan):.2e}")
    return 0


def _cmd_meanfield(args):
    config = parse_config(args.config)
    sc = config.scenario
    temp = sc.bath.temperature
    for s in (+1, -1):
        r0 = meanfield_fixed_point(sc.magnet, s, 0.0, temp)
        rg = meanfield_fixed_point(sc.magnet, s, sc.schedule.g, temp)
        print(f"s={s:+d}: m_F(g=0) = {r0.m:+.9f} ({r0.iterations} iterations), "
              f"m*(g={sc.schedule.g}) = {rg.m:+.9f}")
    return 0


def _cmd_dephase(args):
    config = parse_config(args.config)
    sc = config.scenario
    bath0 = BathSpec(gamma=0.0, temperature=sc.bath.temperature, cutoff=sc.bath.cutoff)
    r = np.array([[0.5, 0.5], [0.5, 0.5]])
    t_final = min(sc.t_final, np.pi / (2 * sc.schedule.g)) if sc.schedule.g > 0 else sc.t_final
    spec = ScenarioSpec(kind="single", spin_state=r, magnet=sc.magnet, bath=bath0,
                        schedule=CouplingSchedule(g=sc.schedule.g, t_on=0.0,
                                                  t_off=t_final),
                        t_final=t_final, samples=33)
    traj = run_scenario(spec, IntegratorConfig(rtol=1e-12, atol=1e-15, samples=33))
    i_off = traj.block_index("u.d")
    sim = traj.coherence(i_off) / abs(traj.traces[0, i_off])
    law = analytic_dephasing(sc.magnet.n, sc.schedule.g, traj.times)
    print(f"{'t':>12} {'analytic':>14} {'simulated':>14} {'diff':>10}")
    for t, a, s in zip(traj.times, law, sim):
        print(f"{t:12.6f} {a:14.9f} {s:14.9f} {abs(a - s):10.2e}")
    print(f"max |analytic - simulated| = {float(np.abs(law - sim).max()):.3e}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cwsim",
                                     description="Curie-Weiss measurement simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a configured scenario")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="run the oracle audit suite")
    p_verify.add_argument("--n", type=int, default=20)
    p_verify.set_defaults(func=_cmd_verify)

    for name, fn in (("threshold", _cmd_threshold), ("meanfield", _cmd_meanfield),
                     ("dephase", _cmd_dephase)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.set_defaults(func=fn)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
