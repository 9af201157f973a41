"""Regenerates msigma.csv, a synthetic stand-in for a 46-galaxy M-sigma table.

Columns: log_sigma (log10 of the bulge velocity dispersion in km/s),
log_sigma_err (its standard error), log_mbh (log10 of the black-hole mass in
solar masses) and log_mbh_err (its standard error).
"""

import numpy as np

N = 46
SEED = 20140101

rng = np.random.default_rng(SEED)
true_sigma = rng.normal(2.25, 0.2, N)
sigma_err = rng.uniform(0.01, 0.05, N)
mbh_err = rng.uniform(0.05, 0.3, N)
true_mbh = 8.3 + 4.8 * (true_sigma - 2.3) + rng.normal(0.0, 0.35, N)

log_sigma = true_sigma + rng.normal(0.0, sigma_err)
log_mbh = true_mbh + rng.normal(0.0, mbh_err)

with open("msigma.csv", "w") as f:
    f.write("# synthetic M-sigma table, see README.md in this directory\n")
    f.write("log_sigma,log_sigma_err,log_mbh,log_mbh_err\n")
    for row in zip(log_sigma, sigma_err, log_mbh, mbh_err):
        f.write(",".join(f"{v:.4f}" for v in row) + "\n")
