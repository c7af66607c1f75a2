"""The measurement experiments: single spin, entangled pair, confined detectors.

A scenario is a declarative description (spins, apparatuses, regions, wave
packet, coupling schedule) that expands into independent blocks plus one
generator per (block, apparatus) stream.  Readout turns a finished
trajectory into pointer probabilities, joint tables and correlators by
thresholding each apparatus's final magnetization distribution at a fraction
of the ferromagnetic value m_F.

Spatial scenarios coarse-grain the particle's position density matrix to
block weights over the detector regions at t = 0 (the packet is assumed
stationary -- constant flux); inside a region the effective per-side
coupling is -k*g, outside it is 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from .bath import RATE_SCALE, BathSpec, build_generator
from .blocks import (OUTSIDE, BlockLabel, BlockState, CouplingSchedule,
                     SectorDistribution, block_trace)
from .engine import IntegratorConfig, StreamGenerators, Trajectory, evolve
from .magnet import MagnetSpec, magnetization_grid, meanfield_fixed_point

KINDS = ("single", "epr-one-apparatus", "epr-two-apparatuses",
         "spatial-one-detector", "spatial-two-detectors")

_N_APPARATUS = {"single": 1, "epr-one-apparatus": 1, "epr-two-apparatuses": 2,
                "spatial-one-detector": 1, "spatial-two-detectors": 2}

_WEIGHT_FLOOR = 1e-15


def epr_state() -> np.ndarray:
    """Density matrix of (|ud> + |du>)/sqrt(2) in the basis uu, ud, du, dd."""
    r = np.zeros((4, 4))
    r[1, 1] = r[1, 2] = r[2, 1] = r[2, 2] = 0.5
    return r


def spin_basis(n_spins: int):
    if n_spins == 1:
        return [(+1,), (-1,)]
    return [(+1, +1), (+1, -1), (-1, +1), (-1, -1)]


@dataclass(frozen=True)
class RegionSpec:
    """Disjoint detector intervals on the line, with potential depth k."""

    intervals: tuple
    k: float = 1.0

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for a, b in ivs:
            if not a < b:
                raise ValueError(f"interval ({a}, {b}) is empty")
        for i, (a1, b1) in enumerate(ivs):
            for a2, b2 in ivs[i + 1:]:
                if max(a1, a2) < min(b1, b2):
                    raise ValueError("intervals must be disjoint")
        if self.k <= 0:
            raise ValueError(f"k must be > 0, got {self.k}")


@dataclass(frozen=True)
class PacketSpec:
    """Pure spatial wave packet: gaussian, uniform, or two gaussian lobes."""

    kind: str
    means: tuple
    widths: tuple

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform", "two-lobe-gaussian"):
            raise ValueError(f"unknown packet kind {self.kind!r}")
        means = tuple(float(x) for x in np.atleast_1d(self.means))
        widths = tuple(float(x) for x in np.atleast_1d(self.widths))
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "widths", widths)
        n_lobes = 2 if self.kind == "two-lobe-gaussian" else 1
        if len(means) != n_lobes or len(widths) != n_lobes:
            raise ValueError(f"{self.kind} needs {n_lobes} mean(s) and width(s)")
        if any(w <= 0 for w in widths):
            raise ValueError("widths must be > 0")

    def psi(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            mu, sig = self.means[0], self.widths[0]
            return (2 * np.pi * sig**2) ** -0.25 * np.exp(-((x - mu) ** 2) / (4 * sig**2))
        if self.kind == "uniform":
            mu, w = self.means[0], self.widths[0]
            inside = (x >= mu - w / 2) & (x <= mu + w / 2)
            return np.where(inside, 1.0 / np.sqrt(w), 0.0)
        lobes = sum((2 * np.pi * s**2) ** -0.25 * np.exp(-((x - mu) ** 2) / (4 * s**2))
                    for mu, s in zip(self.means, self.widths))
        return lobes / np.sqrt(self._two_lobe_norm_sq())

    def _two_lobe_norm_sq(self):
        (m1, m2), (s1, s2) = self.means, self.widths
        # |phi1 + phi2|^2 integrates to 2 + 2*overlap of unit gaussians
        ov = quad(lambda x: (2 * np.pi * s1**2) ** -0.25 * np.exp(-((x - m1) ** 2) / (4 * s1**2))
                  * (2 * np.pi * s2**2) ** -0.25 * np.exp(-((x - m2) ** 2) / (4 * s2**2)),
                  min(m1 - 40 * s1, m2 - 40 * s2), max(m1 + 40 * s1, m2 + 40 * s2),
                  epsabs=1e-14)[0]
        return 2.0 + 2.0 * ov

    def support(self):
        if self.kind == "uniform":
            mu, w = self.means[0], self.widths[0]
            return (mu - w / 2, mu + w / 2)
        lo = min(mu - 40 * s for mu, s in zip(self.means, self.widths))
        hi = max(mu + 40 * s for mu, s in zip(self.means, self.widths))
        return (lo, hi)


def _quad_piece(f, a, b):
    if b <= a:
        return 0.0
    val, _ = quad(f, a, b, epsabs=1e-12, limit=200)
    return val


def region_weights(packet: PacketSpec, regions: RegionSpec) -> np.ndarray:
    """Block weights of the spatial density matrix over detector regions.

    Index order: detector 0, .., detector D-1, outside.  Diagonal entries are
    the Born masses int_R |psi|^2 (summing to 1); off-diagonal entries are
    the interference-block weights, with magnitude sqrt(w_ii * w_jj) (the
    trace norm of the corresponding block of a pure packet, which saturates
    Cauchy-Schwarz) and phase from the lobe amplitude integrals.
    """
    lo, hi = packet.support()
    norm = _quad_piece(lambda x: abs(packet.psi(x)) ** 2, lo, hi)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"packet is not normalized: integral |psi|^2 = {norm}")

    ivs = sorted(regions.intervals)
    d = len(ivs)
    masses = np.zeros(d + 1)
    amps = np.zeros(d + 1)
    for i, (a, b) in enumerate(ivs):
        masses[i] = _quad_piece(lambda x: abs(packet.psi(x)) ** 2, max(a, lo), min(b, hi))
        amps[i] = _quad_piece(packet.psi, max(a, lo), min(b, hi))
    masses[d] = max(0.0, 1.0 - masses[:d].sum())
    cuts = [lo] + [c for ab in ivs for c in ab] + [hi]
    for j in range(0, len(cuts), 2):
        amps[d] += _quad_piece(packet.psi, cuts[j], cuts[j + 1])

    w = np.zeros((d + 1, d + 1), dtype=complex)
    for i in range(d + 1):
        w[i, i] = masses[i]
        for j in range(i + 1, d + 1):
            mag = np.sqrt(masses[i] * masses[j])
            ph = amps[i] * np.conj(amps[j])
            phase = ph / abs(ph) if abs(ph) > 0 else 1.0
            w[i, j] = mag * phase
            w[j, i] = np.conj(w[i, j])
    return w


@dataclass
class ScenarioSpec:
    """Full declarative description of one measurement experiment."""

    kind: str
    spin_state: np.ndarray
    magnet: MagnetSpec
    bath: BathSpec
    schedule: CouplingSchedule
    t_final: float
    samples: int = 512
    regions: RegionSpec | None = None
    packet: PacketSpec | None = None
    w_matrix: np.ndarray | None = None  # direct spatial weights (mixed states)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.t_final <= 0:
            raise ValueError(f"t_final must be > 0, got {self.t_final}")
        if self.samples < 2:
            raise ValueError("samples must be >= 2")
        if np.isfinite(self.schedule.t_off) and self.schedule.t_off > self.t_final:
            raise ValueError(
                f"t_off={self.schedule.t_off} exceeds t_final={self.t_final}")

        r = np.asarray(self.spin_state, dtype=complex)
        n_spins = 2 if self.kind.startswith("epr") else 1
        dim = 2 ** n_spins
        if r.shape != (dim, dim):
            raise ValueError(f"spin_state must be {dim}x{dim} for kind {self.kind!r}")
        if np.abs(r - r.conj().T).max() > 1e-12:
            raise ValueError("spin_state must be Hermitian")
        if abs(np.trace(r).real - 1.0) > 1e-9 or abs(np.trace(r).imag) > 1e-12:
            raise ValueError("spin_state must have unit trace")
        if np.linalg.eigvalsh(r).min() < -1e-12:
            raise ValueError("spin_state must be positive semidefinite")
        self.spin_state = r

        if self.kind.startswith("spatial"):
            if self.regions is None:
                raise ValueError(f"kind {self.kind!r} requires regions")
            want = 1 if self.kind == "spatial-one-detector" else 2
            if len(self.regions.intervals) != want:
                raise ValueError(f"{self.kind!r} needs exactly {want} detector interval(s)")
            if (self.packet is None) == (self.w_matrix is None):
                raise ValueError("spatial scenarios need exactly one of packet or w_matrix")
            if self.schedule.k != self.regions.k:
                raise ValueError(
                    f"schedule.k={self.schedule.k} conflicts with regions.k={self.regions.k}")
        else:
            if self.regions is not None or self.packet is not None:
                raise ValueError(f"kind {self.kind!r} takes no regions or packet")

    @property
    def n_apparatus(self) -> int:
        return _N_APPARATUS[self.kind]

    @property
    def n_spins(self) -> int:
        return 2 if self.kind.startswith("epr") else 1


def _check_weight_consistency(w: np.ndarray, what: str):
    d = w.shape[0]
    for i in range(d):
        for j in range(d):
            if abs(w[i, j]) ** 2 > w[i, i].real * w[j, j].real + 1e-12:
                raise ValueError(
                    f"inconsistent {what}: |w[{i}][{j}]|^2 > w[{i}][{i}]*w[{j}][{j}]")


def spatial_weight_matrix(spec: ScenarioSpec) -> np.ndarray | None:
    if not spec.kind.startswith("spatial"):
        return None
    if spec.w_matrix is not None:
        w = np.asarray(spec.w_matrix, dtype=complex)
        d = len(spec.regions.intervals) + 1
        if w.shape != (d, d):
            raise ValueError(f"w_matrix must be {d}x{d} (detectors plus outside)")
        if abs(np.trace(w).real - 1.0) > 1e-9:
            raise ValueError("w_matrix diagonal must sum to 1")
        return w
    return region_weights(spec.packet, spec.regions)


def initialize_blocks(spec: ScenarioSpec) -> list:
    """One block per nonzero (spin_bra, spin_ket, region_bra, region_ket).

    Every apparatus starts in the paramagnetic state: each block's
    distributions are the binomial weights G(m)/2^N, which put the pointer
    at <m> = 0.
    """
    basis = spin_basis(spec.n_spins)
    r = spec.spin_state
    _check_weight_consistency(r, "spin weights")
    w_reg = spatial_weight_matrix(spec)
    if w_reg is not None:
        _check_weight_consistency(w_reg, "region weights")
        d = w_reg.shape[0] - 1
        region_labels = list(range(d)) + [OUTSIDE]
    p0 = magnetization_grid(spec.magnet).initial_distribution().astype(complex)

    blocks = []
    for ib, bra in enumerate(basis):
        for ik, ket in enumerate(basis):
            if w_reg is None:
                weight = complex(r[ib, ik])
                if abs(weight) < _WEIGHT_FLOOR:
                    continue
                label = BlockLabel(spin_bra=bra, spin_ket=ket)
                blocks.append(BlockState(
                    label=label, weight=weight,
                    per_apparatus=[SectorDistribution(p0.copy())
                                   for _ in range(spec.n_apparatus)]))
            else:
                for ir, reg_bra in enumerate(region_labels):
                    for jr, reg_ket in enumerate(region_labels):
                        weight = complex(r[ib, ik]) * complex(w_reg[ir, jr])
                        if abs(weight) < _WEIGHT_FLOOR:
                            continue
                        label = BlockLabel(spin_bra=bra, spin_ket=ket,
                                           region_bra=reg_bra, region_ket=reg_ket)
                        blocks.append(BlockState(
                            label=label, weight=weight,
                            per_apparatus=[SectorDistribution(p0.copy())
                                           for _ in range(spec.n_apparatus)]))
    return blocks


class BuiltScenario(NamedTuple):
    blocks: list
    generators: list  # [block][apparatus] -> StreamGenerators
    schedule: CouplingSchedule


def _tested_spin(kind: str, apparatus: int) -> int:
    # epr-two couples apparatus j to spin j; every other kind tests spin 0
    return apparatus if kind == "epr-two-apparatuses" else 0


def _region_factor(label: BlockLabel, side: str, apparatus: int, k: float,
                   spatial: bool) -> float:
    if not spatial:
        return 1.0
    region = label.region_bra if side == "bra" else label.region_ket
    return -k if region == apparatus else 0.0


def build_scenario(spec: ScenarioSpec, offdiag_bath: str = "mixed",
                   rate_scale: float = RATE_SCALE) -> BuiltScenario:
    """Expand a scenario into blocks and per-stream generators.

    single              -> spin blocks of the 2x2 state, one apparatus
    epr-one-apparatus   -> 4 blocks, apparatus coupled to spin a only
    epr-two-apparatuses -> 4 blocks, apparatus j coupled to spin j
    spatial-one-detector  -> (regions+outside)^2 region blocks x spin blocks
    spatial-two-detectors -> 9 region-block classes x spin blocks, each
                             apparatus coupled only inside its own region
    """
    blocks = initialize_blocks(spec)
    spatial = spec.kind.startswith("spatial")
    k = spec.regions.k if spatial else 1.0
    g = spec.schedule.g

    generators = []
    for block in blocks:
        per_app = []
        for a in range(spec.n_apparatus):
            sp = _tested_spin(spec.kind, a)
            s_bra = block.label.spin_bra[sp]
            s_ket = block.label.spin_ket[sp]
            fb = _region_factor(block.label, "bra", a, k, spatial)
            fk = _region_factor(block.label, "ket", a, k, spatial)
            gen_on = build_generator(spec.magnet, spec.bath, s_bra, s_ket,
                                     coupling_bra=g * fb, coupling_ket=g * fk,
                                     offdiag_bath=offdiag_bath, rate_scale=rate_scale)
            gen_off = build_generator(spec.magnet, spec.bath, s_bra, s_ket,
                                      coupling_bra=0.0, coupling_ket=0.0,
                                      offdiag_bath=offdiag_bath, rate_scale=rate_scale)
            per_app.append(StreamGenerators(on=gen_on, off=gen_off))
        generators.append(per_app)
    return BuiltScenario(blocks=blocks, generators=generators, schedule=spec.schedule)


def run_scenario(spec: ScenarioSpec, config: IntegratorConfig | None = None,
                 offdiag_bath: str = "mixed",
                 rate_scale: float = RATE_SCALE) -> Trajectory:
    """Build and integrate a scenario; the returned trajectory carries spec."""
    if config is None:
        config = IntegratorConfig(samples=spec.samples)
    built = build_scenario(spec, offdiag_bath=offdiag_bath, rate_scale=rate_scale)
    traj = evolve(built.blocks, built.generators, built.schedule, config, spec.t_final)
    traj.scenario = spec
    return traj


OUTCOMES = ("up", "down", "null")


def _outcome_masses(dist: SectorDistribution, m: np.ndarray, theta: float):
    amp = dist.amplitudes
    return {
        "up": complex(amp[m > theta].sum()),
        "down": complex(amp[m < -theta].sum()),
        "null": complex(amp[(m >= -theta) & (m <= theta)].sum()),
        None: complex(amp.sum()),
    }


@dataclass
class Readout:
    """Pointer statistics at one readout time."""

    threshold: float
    m_f: float
    at: float
    per_apparatus: list        # [{"up": p, "down": p, "null": p, "click": p}]
    joint: dict                # outcome tuple -> probability
    correlators: dict          # (apparatus, spin) -> <s * sign(pointer)>
    residual_coherence: dict   # off-diagonal block id -> |trace(at)| / |trace(0)|
    p_both_click: float = field(default=0.0)

    def marginal(self, apparatus: int) -> dict:
        return self.per_apparatus[apparatus]


def readout(trajectory: Trajectory, threshold_fraction: float = 0.5,
            at: float | None = None) -> Readout:
    """Threshold the pointer distributions into up/down/null statistics.

    P(up) collects final mass at m > theta, P(down) at m < -theta, and
    P(null) the remainder (non-registration), with theta =
    threshold_fraction * m_F.  Joint tables multiply per-apparatus masses
    within each diagonal block (product form is exact).
    """
    spec = trajectory.scenario
    if spec is None:
        raise ValueError("trajectory carries no scenario; use run_scenario")
    if not 0.0 < threshold_fraction < 1.0:
        raise ValueError(
            f"threshold {threshold_fraction} must lie in (0, 1) so that "
            "theta falls inside (0, m_F)")
    if at is None:
        at = float(trajectory.times[-1])
    states = trajectory.states_at(at)
    m = magnetization_grid(spec.magnet).m
    m_f = meanfield_fixed_point(spec.magnet, +1, 0.0, spec.bath.temperature).m
    theta = threshold_fraction * m_f

    n_app = spec.n_apparatus
    masses = []
    for st in states:
        masses.append([_outcome_masses(d, m, theta) for d in st.per_apparatus])

    per_app = [{o: 0.0 for o in OUTCOMES} for _ in range(n_app)]
    joint = {}
    correlators = {}
    for i, st in enumerate(states):
        if not st.label.is_diagonal:
            continue
        w = st.weight.real
        for a in range(n_app):
            for o in OUTCOMES:
                contrib = w * masses[i][a][o].real
                for b in range(n_app):
                    if b != a:
                        contrib *= masses[i][b][None].real
                per_app[a][o] += contrib
        for combo in np.ndindex(*([3] * n_app)):
            key = tuple(OUTCOMES[c] for c in combo)
            p = w
            for a in range(n_app):
                p *= masses[i][a][key[a]].real
            joint[key] = joint.get(key, 0.0) + p
        for a in range(n_app):
            for sp in range(spec.n_spins):
                key = (a, sp)
                signed = masses[i][a]["up"].real - masses[i][a]["down"].real
                for b in range(n_app):
                    if b != a:
                        signed *= masses[i][b][None].real
                correlators[key] = correlators.get(key, 0.0) + \
                    w * st.label.spin_bra[sp] * signed

    for a in range(n_app):
        per_app[a]["click"] = per_app[a]["up"] + per_app[a]["down"]

    residual = {}
    for i, lab in enumerate(trajectory.labels):
        if lab.is_diagonal:
            continue
        init = abs(trajectory.traces[0, i])
        idx = int(np.argmin(np.abs(trajectory.times - at)))
        now = abs(trajectory.traces[idx, i])
        residual[lab.id] = now / init if init > 0 else 0.0

    p_both = 0.0
    if n_app == 2:
        for key, p in joint.items():
            if key[0] in ("up", "down") and key[1] in ("up", "down"):
                p_both += p

    return Readout(threshold=theta, m_f=m_f, at=at, per_apparatus=per_app,
                   joint=joint, correlators=correlators,
                   residual_coherence=residual, p_both_click=p_both)


def conditional_spin_state(trajectory: Trajectory, conditions: dict,
                           threshold_fraction: float = 0.5,
                           at: float | None = None):
    """Spin density matrix conditioned on pointer outcomes.

    conditions maps apparatus index -> outcome ("up"/"down"/"null"); other
    apparatuses are traced over.  Returns (rho, probability) with rho
    normalized; rho spans all tested spins in the z basis.
    """
    spec = trajectory.scenario
    if at is None:
        at = float(trajectory.times[-1])
    states = trajectory.states_at(at)
    m = magnetization_grid(spec.magnet).m
    m_f = meanfield_fixed_point(spec.magnet, +1, 0.0, spec.bath.temperature).m
    theta = threshold_fraction * m_f

    basis = spin_basis(spec.n_spins)
    index = {b: i for i, b in enumerate(basis)}
    rho = np.zeros((len(basis), len(basis)), dtype=complex)
    for st in states:
        amp = st.weight
        for a, dist in enumerate(st.per_apparatus):
            amp = amp * _outcome_masses(dist, m, theta)[conditions.get(a)]
        rho[index[st.label.spin_bra], index[st.label.spin_ket]] += amp
    prob = float(np.trace(rho).real)
    if prob <= 0:
        raise ValueError(f"conditioning event has zero probability: {conditions}")
    return rho / prob, prob


def partial_trace_spin(rho4: np.ndarray, keep: int) -> np.ndarray:
    """Reduce a two-spin 4x4 density matrix to the kept spin (0 = a, 1 = b)."""
    r = rho4.reshape(2, 2, 2, 2)
    return np.einsum("ikjk->ij", r) if keep == 0 else np.einsum("kikj->ij", r)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.linalg.eigvalsh(rho - sigma)).sum())
