#!/usr/bin/env python3
"""Degrees of freedom: how distance throttles the spatial multiplexing gain.

The number of significantly coupled subchannels between two length-l
apertures falls off inversely with distance; the classic parallel-segment
rule of thumb is l^2 / (d * wavelength). We tabulate that rule against the
actual count of eigenvalues above 1% of the strongest, and show why, at
large distance, a handful of antennas already captures nearly all of the
mutual information.
"""

import dataclasses

from capmimo import SystemConfig, dof_estimate, mi_continuous, mi_discrete_trx

cfg = SystemConfig()

print(f"{'d [m]':>8} {'analytic l^2/(d*lam)':>22} {'eigencount @1%':>16} {'top-4 relative spectrum'}")
for d in (5.0, 10.0, 50.0, 100.0, 200.0):
    cfg_d = dataclasses.replace(cfg, distance_m=d)
    est = dof_estimate(cfg_d, ref_m=1600)
    spectrum = mi_continuous(cfg_d, ref_m=1600).eigenvalues
    rel = spectrum[:4] / spectrum[0]
    rel_str = "  ".join(f"{v:.3f}" for v in rel)
    print(f"{d:>8g} {est.analytic:>22.2f} {est.eigen_count:>16} {rel_str}")

print("\nat d = 50 m the rule gives 2 dominant modes; the smooth transition")
print("band of the spectrum adds a couple of partially coupled ones.")

print("\nsparse arrays at large distance (d = 50 m):")
cfg50 = dataclasses.replace(cfg, distance_m=50.0)
ref = mi_continuous(cfg50, ref_m=1600).value_nats
for m in (2, 5, 10, 100):
    val = mi_discrete_trx(m, m, cfg50).value_nats
    print(f"  m1 = m2 = {m:>3}: {val:8.4f} nats = {100 * val / ref:6.2f}% of continuous")
