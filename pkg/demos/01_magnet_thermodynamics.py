"""The Curie-Weiss magnet before any spin arrives.

Walks the static side of the model: the magnetization sector grid, the free
energy landscape F(m) = H(m) - T log G(m), the ferromagnetic fixed points,
and the coupling threshold h_c at which the paramagnetic barrier vanishes
and registration becomes possible.
"""

import numpy as np

from cwsim import (MagnetSpec, free_energy, magnetization_grid,
                   meanfield_fixed_point, threshold_coupling)
from cwsim.oracle import barrier_scan

magnet = MagnetSpec(n=200, j2=0.0, j4=1.0)
T = 0.2

grid = magnetization_grid(magnet)
print(f"magnet: N={magnet.n}, J2={magnet.j2}, J4={magnet.j4}, T={T}")
print(f"sector grid: {len(grid)} points, m in [{grid.m[0]}, {grid.m[-1]}]")
print(f"most populated sector: m={grid.m[np.argmax(grid.log_mult)]:.3f} "
      f"(log multiplicity {grid.log_mult.max():.1f})")

# Cold quartic magnet: metastable paramagnet flanked by ferromagnetic wells.
prof = free_energy(magnet, s=+1, g=0.0, temperature=T)
print(f"\nfree energy at g=0 has {len(prof.minima)} local minima:")
for i in prof.minima:
    print(f"  m = {prof.m[i]:+.3f}   F = {prof.f[i]:+.3f}")
print(f"barrier confining m=0 toward +1: {prof.barrier_toward(+1):.3f}")

mf = meanfield_fixed_point(magnet, +1, 0.0, T)
print(f"\nferromagnetic magnetization m_F = {mf.m:.6f} "
      f"({mf.iterations} damped iterations) -- close to but not equal to 1")

# The measurement coupling tilts the landscape; at h_c the barrier is gone.
h_c = threshold_coupling(magnet, T)
scan = barrier_scan(magnet, +1, T, np.arange(0.0, 0.08, 1e-4))
print(f"\nthreshold coupling h_c = {h_c:.6f}")
print(f"brute-force scan agrees: {scan:.6f} (diff {abs(h_c - scan):.1e})")
for g in (0.5 * h_c, 1.5 * h_c):
    b = free_energy(magnet, +1, g, T).barrier_toward(+1)
    state = "confined (no registration)" if b and b > 0 else "barrier gone (registers)"
    print(f"  g = {g:.4f}: {state}")

print(f"\nh_c grows with temperature: "
      f"{threshold_coupling(magnet, 0.18):.4f} @ T=0.18, "
      f"{threshold_coupling(magnet, 0.22):.4f} @ T=0.22")
