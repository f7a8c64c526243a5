#!/usr/bin/env python3
# -----------------------------------------------------------------------------
# Sharp RDD on scalar outcomes, end to end.
#
# Scalar outcomes are the sanity anchor: the geodesic estimator must reduce
# exactly to two one-sided local linear fits, and the effect length to the
# absolute jump.  We verify that, then recover the unit treatment effect on
# a noisy design with the data-adaptive bandwidth.
# -----------------------------------------------------------------------------

import numpy as np

from geordd import ScalarDgp, estimate_sharp, generate_scalar, select_bandwidth

print("=" * 72)
print("1. Noiseless linear design: the estimator is exact")
print("=" * 72)

sample = generate_scalar(ScalarDgp(setting="I", sigma=0.0, n=500, seed=1))
est = estimate_sharp(sample, h0=0.3, h1=0.3)
print(f"left limit  {est.start.data[0]:+.12f}")
print(f"right limit {est.end.data[0]:+.12f}")
print(f"magnitude   {est.magnitude:.12f}  (true jump = 1)")

print()
print("=" * 72)
print("2. Noisy design with automatic bandwidth selection")
print("=" * 72)

sample = generate_scalar(ScalarDgp(setting="I", sigma=0.5, n=1000, seed=7))
search = select_bandwidth(sample)
print(f"candidate range: [{search.b_min:.4f}, {search.b_max:.4f}]")
print(f"selected b* = {search.b_star:.4f}")
est = estimate_sharp(sample, search.b_star, search.b_star)
print(f"estimated magnitude = {est.magnitude:.4f}  (true = 1)")
print(f"side counts: {est.n0} below, {est.n1} at-or-above the cutoff")

print()
print("=" * 72)
print("3. A short Monte Carlo: tight centering around the truth")
print("=" * 72)

mags = []
for rep in range(50):
    s = generate_scalar(ScalarDgp(setting="I", n=1000, seed=100 + rep))
    b = select_bandwidth(s).b_star
    mags.append(estimate_sharp(s, b, b).magnitude)
print(f"mean estimate over 50 replications: {np.mean(mags):.4f}")
print(f"standard deviation:                 {np.std(mags):.4f}")
