"""Deterministic simulator of Curie-Weiss quantum measurement dynamics.

Evolves the joint spin-magnet density operator in block-decomposed,
magnetization-sector form through the measurement process, for single spins,
entangled pairs, and spatially confined detectors.
"""

from .bath import (RATE_SCALE, BathSpec, BlockGenerator, RatePair,
                   build_generator, flip_rates, spectral_kernel)
from .blocks import (OUTSIDE, BlockLabel, BlockState, CouplingSchedule,
                     SectorDistribution, block_trace, coherence_magnitude)
from .engine import (IntegrationError, IntegratorConfig, StreamGenerators,
                     Trajectory, evolve, total_diagonal_trace)
from .magnet import (FreeEnergyProfile, MagnetSpec, MeanFieldResult,
                     SectorGrid, SectorPoint, free_energy, magnetization_grid,
                     meanfield_fixed_point, sector_energies,
                     sector_hamiltonian, threshold_coupling)
from .oracle import (analytic_dephasing, barrier_scan,
                     dense_reference_evolution, dense_reference_trajectory,
                     stationarity_residual)
from .scenarios import (KINDS, BuiltScenario, PacketSpec, Readout, RegionSpec,
                        ScenarioSpec, build_scenario, conditional_spin_state,
                        epr_state, initialize_blocks, partial_trace_spin,
                        readout, region_weights, run_scenario, spin_basis,
                        trace_distance)

__version__ = "0.1.0"
