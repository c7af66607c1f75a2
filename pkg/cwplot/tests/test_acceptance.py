"""Secondary acceptance: render figures from real cwsim runs.

Drives the primary package through its CLI (the external interface),
then checks both figures render and the gamma = 0 overlay residual.
"""

import json
import subprocess
import sys

import numpy as np

from cwplot import plot_coherence, plot_registration


def cwsim_run(tmp_path, name, cfg):
    cfg_path = tmp_path / f"{name}.json"
    out_dir = tmp_path / name
    cfg_path.write_text(json.dumps(cfg))
    subprocess.run([sys.executable, "-m", "cwsim.cli", "run",
                    "--config", str(cfg_path), "--out", str(out_dir)],
                   check=True, capture_output=True, text=True)
    return out_dir


def test_figures_from_born_weight_run(tmp_path, capsys):
    # the single-spin Born-weight run: pure state with r_uu = 0.3
    c = float(np.sqrt(0.21))
    cfg = {
        "schema": 1,
        "kind": "single",
        "spin_state": [[0.3, c], [c, 0.7]],
        "magnet": {"n": 200, "j2": 0.0, "j4": 1.0},
        "bath": {"gamma": 0.002, "temperature": 0.2, "cutoff": 50.0},
        "schedule": {"g": 0.1, "t_on": 0.0, "t_off": 1200.0},
        "t_final": 1300.0,
        "samples": 256,
    }
    run_dir = cwsim_run(tmp_path, "born", cfg)

    coh_svg = tmp_path / "coherence.svg"
    reg_svg = tmp_path / "registration.svg"
    residual = plot_coherence(run_dir, coh_svg)
    plot_registration(run_dir, reg_svg)
    assert coh_svg.exists() and reg_svg.exists()
    assert residual is None  # bath on: no analytic overlay

    ro = json.loads((run_dir / "readout.json").read_text())
    assert abs(ro["readout"]["per_apparatus"][0]["up"] - 0.3) < 1e-6

    ok = coh_svg.stat().st_size > 0 and reg_svg.stat().st_size > 0
    print(f"ACCEPTANCE 11a {'PASS' if ok else 'FAIL'}: both figures rendered "
          f"from the Born-weight run")
    assert ok


def test_gamma0_overlay_residual(tmp_path, capsys):
    t_rec = float(np.pi / 0.2)
    cfg = {
        "schema": 1,
        "kind": "single",
        "spin_state": [[0.5, 0.5], [0.5, 0.5]],
        "magnet": {"n": 50, "j2": 0.0, "j4": 1.0},
        "bath": {"gamma": 0.0, "temperature": 0.2, "cutoff": 50.0},
        "schedule": {"g": 0.1, "t_on": 0.0, "t_off": t_rec},
        "t_final": t_rec,
        "samples": 512,
        "integrator": {"rtol": 1e-12, "atol": 1e-16},
    }
    run_dir = cwsim_run(tmp_path, "dephase", cfg)
    residual = plot_coherence(run_dir, tmp_path / "overlay.svg")
    ok = residual is not None and residual < 1e-8
    print(f"ACCEPTANCE 11b {'PASS' if ok else 'FAIL'}: gamma=0 overlay "
          f"residual {residual:.2e} < 1e-8")
    assert ok
