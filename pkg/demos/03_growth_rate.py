"""Monte Carlo growth rate of the counting function.

For almost every scalar target the signed count grows like gamma * T with
gamma = 24 log 2 / pi^2 = 1.68553...; the ensemble average at finite T sits
slightly above because the first few shells are richer than the ergodic
average (the q = 1 shell alone always contributes).  A second ensemble at a
higher cut-off shows the estimate moving toward the constant.
"""

import math

from diophlab import GAMMA_1D_SIGNED, cf_fast_count, estimate_gamma
from diophlab.runner import sample_theta

print(f"reference constant: 24 log2 / pi^2 = {GAMMA_1D_SIGNED:.6f}\n")

for T, samples in ((10, 800), (25, 800), (40, 800)):
    pairs = []
    for i in range(samples):
        theta = sample_theta(seed=2, index=i, dims=(1, 1), bits=64)
        pairs.append((float(T), cf_fast_count(theta.entries[0][0], T=T,
                                              sign_mode="signed")))
    gamma_hat, stderr = estimate_gamma(pairs)
    excess = (gamma_hat - GAMMA_1D_SIGNED) * T
    print(f"T = {T:>3}: gamma_hat = {gamma_hat:.5f} +- {stderr:.5f}"
          f"   (finite-T excess ~ {excess:+.2f} counts)")

print("\nthe excess per target is O(1), so gamma_hat - gamma shrinks like 1/T.")
