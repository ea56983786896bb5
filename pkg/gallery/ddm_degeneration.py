"""
When the double diode model collapses to the single diode model
===============================================================

The double diode model contains the single diode model: switch off the
second diode (i02 = 0) and the SSE is the same, bit for bit. With two equal
ideality factors the two diodes merge into one whose saturation current is
i01 + i02. This script checks both facts and fits the DDM on the Photowatt
module, where the fitted diodes tend to merge.

Run with ``python gallery/ddm_degeneration.py`` (a few seconds per DE run).
"""

import numpy as np

from pvextract import (DEConfig, DE_SETTINGS, ModelKind, default_bounds, embed_sdm_in_ddm,
                       load_benchmark, run_de, sse)

d = load_benchmark("photowatt_pwp201")
sdm_theta = np.array([1.03051, 3.48226, 48.6428, 1.20127, 981.982])

# i02 = 0: identical floating-point result.
ddm_theta = embed_sdm_in_ddm(sdm_theta, n2=30.0)
print("SDM SSE      ", repr(sse(sdm_theta, "sdm", d)))
print("DDM(i02=0)   ", repr(sse(ddm_theta, "ddm", d)))

# n1 = n2: splitting i0 between the diodes changes the SSE only by rounding.
for share in (0.1, 0.5, 0.9):
    split = sdm_theta.copy()
    t = np.array([split[0], share * split[1], (1 - share) * split[1], split[2], split[2],
                  split[3], split[4]])
    print(f"DDM, i0 split {share:.1f}/{1 - share:.1f}", repr(sse(t, "ddm", d)))

# Fit both models with DE and compare.
for kind in (ModelKind.SDM, ModelKind.DDM):
    cfg = DEConfig(**DE_SETTINGS[kind], seed=1)
    r = run_de(kind, d, default_bounds(kind, d.name), cfg)
    print(f"\n{kind.value.upper()}: RMSE {r.best_rmse:.10e} after {r.n_evals} evaluations")
    for name, value in zip(kind.param_names, r.best_theta):
        print(f"  {name:>4s} = {value:.7g}")
    if kind is ModelKind.DDM:
        iph, i01, i02, n1, n2, rs, rp = r.best_theta
        print(f"  n1/n2 = {n1 / n2:.5f}, i01 + i02 = {i01 + i02:.6g} uA")
