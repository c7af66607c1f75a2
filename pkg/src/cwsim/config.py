"""Strict JSON run configuration.

A config file fully determines a run (there is no randomness anywhere), so
two runs of the same file produce byte-identical outputs.  Unknown keys are
rejected; every error names the offending key and the expected type.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bath import OFFDIAG_MODES, RATE_SCALE, BathSpec
from .blocks import CouplingSchedule
from .engine import IntegratorConfig
from .magnet import MagnetSpec
from .scenarios import KINDS, PacketSpec, RegionSpec, ScenarioSpec, epr_state

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


def _check_keys(d: dict, allowed, where: str):
    for key in d:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}; allowed: {sorted(allowed)}")


_REQUIRED = object()


def _get(d: dict, key: str, typ, where: str, default=_REQUIRED):
    if key not in d:
        if default is _REQUIRED:
            raise ConfigError(f"missing key {key!r} in {where} (expected {typ.__name__})")
        return default
    val = d[key]
    if typ is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if not isinstance(val, typ) or isinstance(val, bool) and typ is not bool:
        raise ConfigError(f"key {key!r} in {where} must be {typ.__name__}, "
                          f"got {type(val).__name__}")
    return val


def _complex_entry(v, where):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    raise ConfigError(f"{where} entries must be numbers or [re, im] pairs")


def _matrix(raw, where) -> np.ndarray:
    if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
        raise ConfigError(f"{where} must be a list of rows")
    return np.array([[_complex_entry(v, where) for v in row] for row in raw])


def _matrix_to_json(mat: np.ndarray):
    out = []
    for row in np.asarray(mat):
        out.append([float(v.real) if v.imag == 0 else [float(v.real), float(v.imag)]
                    for v in row])
    return out


@dataclass
class RunConfig:
    """Scenario plus integrator and readout settings; seedless by design."""

    scenario: ScenarioSpec
    integrator: IntegratorConfig
    offdiag_bath: str = "mixed"
    rate_scale: float = RATE_SCALE
    threshold_fraction: float = 0.5

    def to_dict(self) -> dict:
        sc = self.scenario
        out = {
            "schema": SCHEMA_VERSION,
            "kind": sc.kind,
            "spin_state": _matrix_to_json(sc.spin_state),
            "magnet": {"n": sc.magnet.n, "j2": sc.magnet.j2, "j4": sc.magnet.j4},
            "bath": {"gamma": sc.bath.gamma, "temperature": sc.bath.temperature,
                     "cutoff": sc.bath.cutoff},
            "schedule": {"g": sc.schedule.g, "t_on": sc.schedule.t_on,
                         "t_off": sc.schedule.t_off, "k": sc.schedule.k},
            "t_final": sc.t_final,
            "samples": sc.samples,
            "integrator": {
                "rtol": self.integrator.rtol,
                "atol": self.integrator.atol,
                "snapshots": self.integrator.snapshots,
                "freeze_threshold": self.integrator.freeze_threshold,
            },
            "offdiag_bath": self.offdiag_bath,
            "rate_scale": self.rate_scale,
            "threshold_fraction": self.threshold_fraction,
        }
        if math.isfinite(self.integrator.max_step):
            out["integrator"]["max_step"] = self.integrator.max_step
        if sc.regions is not None:
            out["regions"] = {"intervals": [list(iv) for iv in sc.regions.intervals],
                              "k": sc.regions.k}
        if sc.packet is not None:
            p = {"kind": sc.packet.kind}
            if sc.packet.kind == "two-lobe-gaussian":
                p["means"] = list(sc.packet.means)
                p["widths"] = list(sc.packet.widths)
            else:
                p["mean"] = sc.packet.means[0]
                p["width"] = sc.packet.widths[0]
            out["packet"] = p
        if sc.w_matrix is not None:
            out["w_matrix"] = _matrix_to_json(sc.w_matrix)
        return out


_TOP_KEYS = {"schema", "kind", "spin_state", "magnet", "bath", "schedule",
             "t_final", "samples", "regions", "packet", "w_matrix",
             "integrator", "offdiag_bath", "rate_scale", "threshold_fraction"}


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(raw, _TOP_KEYS, "config")
    schema = _get(raw, "schema", int, "config")
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"key 'schema' must be {SCHEMA_VERSION}, got {schema}")

    kind = _get(raw, "kind", str, "config")
    if kind not in KINDS:
        raise ConfigError(f"key 'kind' must be one of {KINDS}, got {kind!r}")

    mag_raw = _get(raw, "magnet", dict, "config")
    _check_keys(mag_raw, {"n", "j2", "j4"}, "magnet")
    magnet = MagnetSpec(n=_get(mag_raw, "n", int, "magnet"),
                        j2=_get(mag_raw, "j2", float, "magnet", 0.0),
                        j4=_get(mag_raw, "j4", float, "magnet", 1.0))

    bath_raw = _get(raw, "bath", dict, "config")
    _check_keys(bath_raw, {"gamma", "temperature", "cutoff"}, "bath")
    bath = BathSpec(gamma=_get(bath_raw, "gamma", float, "bath"),
                    temperature=_get(bath_raw, "temperature", float, "bath"),
                    cutoff=_get(bath_raw, "cutoff", float, "bath", 50.0))

    sch_raw = _get(raw, "schedule", dict, "config")
    _check_keys(sch_raw, {"g", "t_on", "t_off", "k"}, "schedule")
    g = _get(sch_raw, "g", float, "schedule")
    if g < 0:
        raise ConfigError(f"key 'g' in schedule must be >= 0, got {g}")
    schedule = CouplingSchedule(g=g,
                                t_on=_get(sch_raw, "t_on", float, "schedule", 0.0),
                                t_off=_get(sch_raw, "t_off", float, "schedule"),
                                k=_get(sch_raw, "k", float, "schedule", 1.0))

    spin_raw = raw.get("spin_state", "epr" if kind.startswith("epr") else None)
    if spin_raw is None:
        raise ConfigError("missing key 'spin_state' in config (expected matrix)")
    if spin_raw == "epr":
        if not kind.startswith("epr"):
            raise ConfigError("spin_state 'epr' shorthand needs an epr-* kind")
        spin_state = epr_state()
    else:
        spin_state = _matrix(spin_raw, "spin_state")

    regions = None
    if "regions" in raw:
        reg_raw = _get(raw, "regions", dict, "config")
        _check_keys(reg_raw, {"intervals", "k"}, "regions")
        ivs = reg_raw.get("intervals")
        if (not isinstance(ivs, list) or not all(
                isinstance(iv, list) and len(iv) == 2 for iv in ivs)):
            raise ConfigError("key 'intervals' in regions must be a list of [a, b] pairs")
        try:
            regions = RegionSpec(intervals=tuple(tuple(iv) for iv in ivs),
                                 k=_get(reg_raw, "k", float, "regions", 1.0))
        except ValueError as e:
            raise ConfigError(str(e)) from e

    packet = None
    if "packet" in raw:
        p_raw = _get(raw, "packet", dict, "config")
        pkind = _get(p_raw, "kind", str, "packet")
        if pkind == "two-lobe-gaussian":
            _check_keys(p_raw, {"kind", "means", "widths"}, "packet")
            means = p_raw.get("means")
            widths = p_raw.get("widths")
            if not isinstance(means, list) or not isinstance(widths, list):
                raise ConfigError("two-lobe-gaussian packet needs list keys "
                                  "'means' and 'widths'")
        else:
            _check_keys(p_raw, {"kind", "mean", "width"}, "packet")
            means = [_get(p_raw, "mean", float, "packet")]
            widths = [_get(p_raw, "width", float, "packet")]
        try:
            packet = PacketSpec(kind=pkind, means=tuple(means), widths=tuple(widths))
        except ValueError as e:
            raise ConfigError(str(e)) from e

    w_matrix = _matrix(raw["w_matrix"], "w_matrix") if "w_matrix" in raw else None

    int_raw = _get(raw, "integrator", dict, "config", {})
    _check_keys(int_raw, {"rtol", "atol", "max_step", "snapshots", "freeze_threshold"},
                "integrator")
    integrator = IntegratorConfig(
        rtol=_get(int_raw, "rtol", float, "integrator", 1e-8),
        atol=_get(int_raw, "atol", float, "integrator", 1e-16),
        max_step=_get(int_raw, "max_step", float, "integrator", float("inf")),
        samples=_get(raw, "samples", int, "config", 512),
        snapshots=_get(int_raw, "snapshots", int, "integrator", 9),
        freeze_threshold=_get(int_raw, "freeze_threshold", float, "integrator", 1e-10))

    offdiag = _get(raw, "offdiag_bath", str, "config", "mixed")
    if offdiag not in OFFDIAG_MODES:
        raise ConfigError(f"key 'offdiag_bath' must be one of {OFFDIAG_MODES}, "
                          f"got {offdiag!r}")
    threshold_fraction = _get(raw, "threshold_fraction", float, "config", 0.5)
    if not 0 < threshold_fraction < 1:
        raise ConfigError("key 'threshold_fraction' must lie in (0, 1)")

    try:
        scenario = ScenarioSpec(kind=kind, spin_state=spin_state, magnet=magnet,
                                bath=bath, schedule=schedule,
                                t_final=_get(raw, "t_final", float, "config"),
                                samples=_get(raw, "samples", int, "config", 512),
                                regions=regions, packet=packet, w_matrix=w_matrix)
    except ValueError as e:
        raise ConfigError(str(e)) from e

    return RunConfig(scenario=scenario, integrator=integrator, offdiag_bath=offdiag,
                     rate_scale=_get(raw, "rate_scale", float, "config", RATE_SCALE),
                     threshold_fraction=threshold_fraction)


def parse_config(path) -> RunConfig:
    """Load and validate a config file; see config_from_dict for the schema."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON in {path}: {e}") from e
    return config_from_dict(raw)
