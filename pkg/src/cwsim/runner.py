"""Run orchestration and bit-stable result serialization.

Writes three artifacts per run:

  timeseries.csv    -- t, then per block: trace_re, trace_im, coh_mag, and
                       per apparatus: mean_m, var_m (columns b{i}.*)
  distributions.csv -- long-format P(m) snapshots: t, block, apparatus, m, re, im
  readout.json      -- the Readout structure plus h_c / m_F diagnostics and
                       a config echo

Floats are written in shortest round-trip decimal form, so identical configs
give byte-identical files.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .config import RunConfig
from .magnet import meanfield_fixed_point, threshold_coupling
from .scenarios import readout, run_scenario

TIMESERIES_NAME = "timeseries.csv"
DISTRIBUTIONS_NAME = "distributions.csv"
READOUT_NAME = "readout.json"


def _fmt(x) -> str:
    return repr(float(x))


def timeseries_header(n_blocks: int, n_apparatus: int) -> list:
    cols = ["t"]
    for i in range(n_blocks):
        cols += [f"b{i}.trace_re", f"b{i}.trace_im", f"b{i}.coh_mag"]
        for a in range(n_apparatus):
            cols += [f"b{i}.a{a}.mean_m", f"b{i}.a{a}.var_m"]
    return cols


def write_timeseries(traj, path):
    n_blocks = len(traj.labels)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(timeseries_header(n_blocks, traj.n_apparatus)) + "\n")
        for row, t in enumerate(traj.times):
            cells = [_fmt(t)]
            for i in range(n_blocks):
                tr = traj.traces[row, i]
                cells += [_fmt(tr.real), _fmt(tr.imag), _fmt(abs(tr))]
                for a in range(traj.n_apparatus):
                    cells += [_fmt(traj.mean_m[row, i, a]), _fmt(traj.var_m[row, i, a])]
            fh.write(",".join(cells) + "\n")


def write_distributions(traj, path, grid_m):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,block,apparatus,m,re,im\n")
        for j in traj.snapshot_indices:
            t = traj.times[j]
            for state in traj.snapshots[j]:
                for a, dist in enumerate(state.per_apparatus):
                    for mi, amp in zip(grid_m, dist.amplitudes):
                        fh.write(f"{_fmt(t)},{state.label.id},{a},{_fmt(mi)},"
                                 f"{_fmt(amp.real)},{_fmt(amp.imag)}\n")


def run(config: RunConfig, out_dir) -> dict:
    """Execute the configured scenario; returns paths of the files written."""
    os.makedirs(out_dir, exist_ok=True)
    spec = config.scenario
    traj = run_scenario(spec, config=config.integrator,
                        offdiag_bath=config.offdiag_bath,
                        rate_scale=config.rate_scale)
    ro = readout(traj, threshold_fraction=config.threshold_fraction)

    m_f = ro.m_f
    try:
        h_c = threshold_coupling(spec.magnet, spec.bath.temperature)
    except ValueError:
        h_c = None
    m_star = meanfield_fixed_point(spec.magnet, +1, spec.schedule.g,
                                   spec.bath.temperature).m

    from .magnet import magnetization_grid
    grid_m = magnetization_grid(spec.magnet).m

    ts_path = os.path.join(out_dir, TIMESERIES_NAME)
    dist_path = os.path.join(out_dir, DISTRIBUTIONS_NAME)
    ro_path = os.path.join(out_dir, READOUT_NAME)
    write_timeseries(traj, ts_path)
    write_distributions(traj, dist_path, grid_m)

    payload = {
        "schema": 1,
        "readout": {
            "at": ro.at,
            "threshold": ro.threshold,
            "m_f": ro.m_f,
            "per_apparatus": ro.per_apparatus,
            "joint": {"|".join(k): v for k, v in sorted(ro.joint.items())},
            "correlators": {f"a{a}.s{s}": v for (a, s), v in sorted(ro.correlators.items())},
            "residual_coherence": dict(sorted(ro.residual_coherence.items())),
            "p_both_click": ro.p_both_click,
        },
        "diagnostics": {"m_f": m_f, "h_c": h_c, "m_star": m_star},
        "blocks": [{"index": i, "id": lab.id, "diagonal": lab.is_diagonal,
                    "weight_re": traj.weights[i].real, "weight_im": traj.weights[i].imag}
                   for i, lab in enumerate(traj.labels)],
        "config": config.to_dict(),
    }
    with open(ro_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"timeseries": ts_path, "distributions": dist_path, "readout": ro_path,
            "trajectory": traj, "readout_obj": ro}
