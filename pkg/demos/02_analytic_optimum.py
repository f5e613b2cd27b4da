#!/usr/bin/env python3
"""The closed-form optimum: the scaling root c, the ramp minimizer, and the
per-coordinate gap constant that powers the lower bounds."""

import numpy as np

from hardlogit import (
    build_instance,
    c_bracket,
    constant_c_ratio,
    loss,
    phi,
    profile,
    solve_c,
    subspace_gap,
)

sigma, zeta = 1.3, 1.0

# c solves sigma*tanh(sigma*c) + zeta*tanh(zeta*c) = sigma - zeta.
c = solve_c(sigma, zeta)
residual = sigma * np.tanh(sigma * c) + zeta * np.tanh(zeta * c) - (sigma - zeta)
lo, hi = c_bracket(sigma, zeta)
print(f"c = {c:.15f}  (residual {residual:.1e}, bracket [{lo:.4f}, {hi:.4f}])")

# The minimizer is the ramp c*(1, 2, ..., k); its value has a closed form.
inst = build_instance(8, sigma, zeta)
prof = profile(inst)
resp = loss(inst, prof.x_star)
print(f"\nk = {inst.k}:  f* = {prof.f_star:.12f}")
print(f"direct evaluation at x*:  {resp.value:.12f}")
print(f"gradient sup-norm at x*:  {np.max(np.abs(resp.gradient)):.2e}")
print(f"||x*||^2 = {prof.xstar_norm_sq:.6f}  (= c^2 k(k+1)(2k+1)/6)")

# With an intercept in the model, (x*, 0) is still optimal.
_, gx, gy = phi(inst, prof.x_star, 0.0)
print(f"intercept derivative at (x*, 0): {gy:.2e}")

# Freezing the leading coordinates at zero costs a fixed amount per frozen
# coordinate; that amount, relative to c^2 sigma^2, is the ratio constant.
print(f"\nper-coordinate gap floor, sharp:        {constant_c_ratio(sigma, zeta):.6f}")
print(f"per-coordinate gap floor, conservative: "
      f"{constant_c_ratio(sigma, zeta, conservative=True):.6f}")
for t in (2, 4, 6, 8):
    print(f"  min over last-{t}-coordinate subspace minus f*: "
          f"{subspace_gap(inst.k, t, sigma, zeta):.6f}")
