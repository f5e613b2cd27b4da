#!/usr/bin/env python3
"""Build the hard logistic-regression datasets and look inside them."""

import numpy as np

from hardlogit import Variant, build_instance, build_w, export, matvec_a, matvec_at, spectral_norm

np.set_printoptions(precision=3, suppress=True, linewidth=120)

# The building block: a k x k operator with two nonzeros per row (one +1 on
# an anti-diagonal, one -1 next to it) and a lone +1 in the corner.
w = build_w(5)
print("W (k=5):")
print(w.dense())
print("W @ ones      =", w.apply(np.ones(5)), " (all mass lands on the last coordinate)")
print("W @ (1..5)/10 =", w.apply(np.arange(1.0, 6.0) / 10), " (a scaled ramp becomes constant)")

# Stacking scaled copies of W with mirrored labels gives the dataset.  The
# four-block form is symmetric under negating the features, which pins the
# optimal intercept of the fitted classifier at zero.
inst = build_instance(6, sigma=1.3, zeta=1.0, variant=Variant.FOUR_BLOCK)
print(f"\nfour-block instance: {inst.n_rows} rows x {inst.k} features")
print("labels:", inst.labels.astype(int))
print("A' b   =", matvec_at(inst, inst.labels), " (only the last feature sees the labels)")

est = spectral_norm(inst)
print(f"\n||A|| by power iteration: {est.value:.6f} "
      f"(converged={est.converged} after {est.iterations} iterations)")
print(f"closed-form bound 4*sqrt(2(sigma^2+zeta^2)) = {inst.spectral_norm_bound():.6f}")

# Products never materialize A: cost is O(k) per block.
x = np.arange(1.0, 7.0)
print("\nA @ (1..6) head:", matvec_a(inst, x)[:8])

# The half-size variant drops the mirrored blocks.
small = build_instance(3, 1.3, 1.0, Variant.TWO_BLOCK)
print(f"\ntwo-block instance: {small.n_rows} rows x {small.k} features")
print(small.dense())

export(inst, "csv", "demo_dataset.csv")
export(inst, "libsvm", "demo_dataset.libsvm")
export(inst, "json-meta", "demo_dataset.meta.json")
print("\nwrote demo_dataset.csv / .libsvm / .meta.json")
