"""
Fitting the single diode model to the RTC France cell
=====================================================

A walk through the basic workflow: load a bundled I-V dataset, run
differential evolution a few times with the standard settings, look at the
spread of RMSE values and reconstruct the I-V curve of the best fit.

Run with ``python gallery/fit_rtc.py``; it takes a few seconds.
"""

import numpy as np

from pvextract import (DEConfig, DE_SETTINGS, ModelKind, default_bounds, format_rmse_5sig,
                       load_benchmark, reconstruct_curve, run_batch)

# The dataset: 26 (V, I) pairs of a 57 mm silicon cell measured at 33 C.
d = load_benchmark("rtc_france")
print(f"{d.name}: {len(d)} points, T = {d.condition.temperature:.2f} K")
print(f"voltage {d.voltage.min():.4f} .. {d.voltage.max():.4f} V, "
      f"current {d.current.min():.4f} .. {d.current.max():.4f} A")

# Search ranges for (iph [A], i0 [uA], n, rs [ohm], rp [ohm]).
bounds = default_bounds("sdm", "rtc_france")
print("lower", bounds.lower)
print("upper", bounds.upper)

# Np=50, Cr=0.6, F=0.9, G=800; every run gets its own seed (seed, seed+1, ...).
cfg = DEConfig(**DE_SETTINGS[ModelKind.SDM], seed=0)
stats = run_batch("sdm", d, bounds, cfg, n_runs=5,
                  progress=lambda r: print(f"  seed {r.seed}: RMSE {r.best_rmse:.10e}"))

print("\nRMSE over 5 runs (5 significant digits):", stats.formatted())
print(f"population std {stats.std:.3e}")

best = stats.best
names = ModelKind.SDM.param_names
for name, value in zip(names, best.best_theta):
    print(f"  {name:>4s} = {value:.7g}")

# The convergence history holds the best RMSE after each generation.
hist = np.asarray(best.history)
for g in (0, 10, 50, 100, 400, len(hist) - 1):
    print(f"  generation {g:4d}: {format_rmse_5sig(hist[g])}")

# Measured versus calculated current at every point.
print("\n     V        I_meas      I_calc     |err|")
for p in reconstruct_curve(best.best_theta, "sdm", d):
    print(f"{p.v:8.4f} {p.i_measured:10.4f} {p.i_calculated:10.6f} {p.abs_error:9.2e}")
