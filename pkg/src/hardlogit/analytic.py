"""Closed-form quantities for the hard instances.

For sigma > zeta > 0 there is a unique c > 0 with

    sigma*tanh(sigma*c) + zeta*tanh(zeta*c) = sigma - zeta,

and the four-block instance is minimized at x* = c*(1, 2, ..., k) with
optimal value

    f* = 8k*log2 + 4k*[logcosh(sigma*c) + logcosh(zeta*c) - (sigma-zeta)*c].

This module solves for c (bisection on a proven bracket), assembles the
analytic profile of an instance, and evaluates the iteration-count lower
bounds that the benchmark races methods against.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .datasets import Variant, WorstCaseInstance
from .logloss import LOG2, lipschitz, loss


def logcosh(z: float) -> float:
    """log(cosh(z)), overflow-safe: |z| + log1p(exp(-2|z|)) - log 2."""
    a = abs(float(z))
    return a + np.log1p(np.exp(-2.0 * a)) - LOG2


def _root_residual(c: float, sigma: float, zeta: float) -> float:
    return sigma * np.tanh(sigma * c) + zeta * np.tanh(zeta * c) - sigma + zeta


def c_bracket(sigma: float, zeta: float) -> tuple[float, float]:
    """Proven bracket [c_lb, c_ub] for the root; needs sigma < 2*zeta."""
    if not (2.0 * zeta > sigma > zeta > 0.0):
        raise ValueError(
            f"bracket needs 2*zeta > sigma > zeta > 0, got sigma={sigma}, zeta={zeta}"
        )
    c_lb = np.arctanh(0.5 - zeta / (2.0 * sigma)) / sigma
    c_ub = np.arctanh(sigma / (2.0 * zeta) - 0.5) / zeta
    return float(c_lb), float(c_ub)


def solve_c(sigma: float, zeta: float) -> float:
    """The unique positive root of the scaling equation, by bisection.

    The bracket is the closed-form [c_lb, c_ub] when sigma < 2*zeta,
    otherwise [0, B] with B doubled until the residual turns positive.
    Terminates when the bracket width falls below 1e-15*max(1, c) or the
    residual magnitude below 1e-14.
    """
    sigma = float(sigma)
    zeta = float(zeta)
    if not (sigma > zeta > 0.0):
        raise ValueError(
            f"invalid parameters: need sigma > zeta > 0, got sigma={sigma}, zeta={zeta}"
        )
    if sigma < 2.0 * zeta:
        lo, hi = c_bracket(sigma, zeta)
    else:
        lo, hi = 0.0, 1.0
        while _root_residual(hi, sigma, zeta) <= 0.0:
            hi *= 2.0
    # residual is increasing in c: keep lo on the <=0 side, hi on the >=0 side
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = _root_residual(mid, sigma, zeta)
        if abs(r) <= 1e-14:
            return mid
        if r < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, mid):
            break
    return 0.5 * (lo + hi)


def _curvature_gap(z: float) -> float:
    # z*tanh(z) - logcosh(z), increasing for z > 0
    return z * np.tanh(z) - logcosh(z)


def constant_c_ratio(sigma: float, zeta: float, conservative: bool = False) -> float:
    """The ratio constant C(sigma/zeta) in the per-coordinate gap bound

        (sigma-zeta)*c - logcosh(sigma*c) - logcosh(zeta*c) >= C * c^2 * sigma^2.

    Defined for 2*zeta > sigma > zeta > 0; scale-invariant (depends only on
    sigma/zeta).  The default is the sharp constant, evaluated at the solved
    root c.  ``conservative=True`` instead evaluates the bracket-endpoint
    certificate [g(sigma*c_lb)+g(zeta*c_lb)]/(c_ub^2*sigma^2), which is a
    valid but much looser lower bound (about 0.28 at ratio 1.3, versus the
    sharp 0.79).
    """
    sigma = float(sigma)
    zeta = float(zeta)
    if not (sigma > zeta > 0.0):
        raise ValueError(
            f"invalid parameters: need sigma > zeta > 0, got sigma={sigma}, zeta={zeta}"
        )
    if sigma >= 2.0 * zeta:
        raise ValueError(
            f"undefined constant: needs sigma < 2*zeta, got sigma={sigma}, zeta={zeta}"
        )
    if conservative:
        c_lb, c_ub = c_bracket(sigma, zeta)
        num = _curvature_gap(sigma * c_lb) + _curvature_gap(zeta * c_lb)
        return float(num / (c_ub**2 * sigma**2))
    c = solve_c(sigma, zeta)
    num = _curvature_gap(sigma * c) + _curvature_gap(zeta * c)
    return float(num / (c**2 * sigma**2))


@dataclass(frozen=True)
class AnalyticProfile:
    """Closed-form optimum data for one four-block instance."""

    c: float
    x_star: np.ndarray
    f_star: float
    xstar_norm_sq: float
    C_ratio: float | None  # None when sigma >= 2*zeta
    c_lb: float
    c_ub: float


def per_coordinate_gap(sigma: float, zeta: float) -> float:
    """(sigma-zeta)*c - logcosh(sigma*c) - logcosh(zeta*c) at the root c."""
    c = solve_c(sigma, zeta)
    return float((sigma - zeta) * c - logcosh(sigma * c) - logcosh(zeta * c))


def profile(inst: WorstCaseInstance) -> AnalyticProfile:
    """Assemble c, x*, f*, ||x*||^2 and the ratio constant for an instance.

    Only the four-block variant has these closed forms; for two_block use
    :func:`numeric_optimum`.
    """
    if inst.variant is not Variant.FOUR_BLOCK:
        raise ValueError(
            "unsupported variant: closed-form optimum data covers four_block only; "
            "use numeric_optimum for two_block"
        )
    sigma, zeta, k = inst.sigma, inst.zeta, inst.k
    c = solve_c(sigma, zeta)
    x_star = c * np.arange(1, k + 1, dtype=float)
    f_star = 8.0 * k * LOG2 + 4.0 * k * (
        logcosh(sigma * c) + logcosh(zeta * c) - (sigma - zeta) * c
    )
    norm_sq = c * c * k * (k + 1) * (2 * k + 1) / 6.0
    if sigma < 2.0 * zeta:
        c_lb, c_ub = c_bracket(sigma, zeta)
        ratio = constant_c_ratio(sigma, zeta)
    else:
        c_lb, c_ub = 0.0, float("inf")
        ratio = None
    return AnalyticProfile(
        c=c, x_star=x_star, f_star=float(f_star), xstar_norm_sq=float(norm_sq),
        C_ratio=ratio, c_lb=c_lb, c_ub=c_ub,
    )


def profile_metadata(p: AnalyticProfile) -> dict:
    """The analytic entries of the dataset metadata sidecar."""
    return {"c": p.c, "f_star": p.f_star, "xstar_norm_sq": p.xstar_norm_sq}


def subspace_gap(k: int, t: int, sigma: float, zeta: float) -> float:
    """min over the last-t-coordinates subspace of the loss, minus f*.

    Equals 4*(k-t)*[(sigma-zeta)*c - logcosh(sigma*c) - logcosh(zeta*c)]:
    freezing the leading k-t coordinates at zero leaves each of their rows
    at the symmetric value 2*log2 while the trailing block reproduces the
    t-dimensional problem.
    """
    if not 1 <= t <= k:
        raise ValueError(f"need 1 <= t <= k, got t={t}, k={k}")
    return 4.0 * (k - t) * per_coordinate_gap(sigma, zeta)


class LowerBound(NamedTuple):
    gap: float
    dist_factor: float


def bound_linear_span(T: int, a_norm: float, dist0_sq: float) -> LowerBound:
    """Iteration-T lower bound for gradient-span methods (dimension 2T).

    gap(x_T) > 3*||A||^2*||x0-x*||^2 / (32*(2T+1)*(4T+1)) and
    ||x_T - x*||^2 > ||x0-x*||^2 / 8.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    gap = 3.0 * a_norm**2 * dist0_sq / (32.0 * (2 * T + 1) * (4 * T + 1))
    return LowerBound(gap=float(gap), dist_factor=0.125)


def bound_general(T: int, a_norm: float, dist0_sq: float) -> LowerBound:
    """Iteration-T lower bound for arbitrary deterministic first-order
    methods (dimension 4T+2, adaptively rotated instance).

    gap(x_T) > 3*||A||^2*||x0-z*||^2 / (32*(4T+3)*(8T+5)) and
    ||x_T - z*||^2 > ||x0-z*||^2 / 8.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    gap = 3.0 * a_norm**2 * dist0_sq / (32.0 * (4 * T + 3) * (8 * T + 5))
    return LowerBound(gap=float(gap), dist_factor=0.125)


def sandwich_ratio(T: int) -> float:
    """Analytic (upper bound)/(lower bound) ratio for the accelerated method:
    [2L*d^2/(T+1)^2] / [3*||A||^2*d^2/(32(2T+1)(4T+1))] with L = ||A||^2/2,
    which is 32*(2T+1)*(4T+1)/(3*(T+1)^2), capped by 256/3 for all T.
    """
    return 32.0 * (2 * T + 1) * (4 * T + 1) / (3.0 * (T + 1) ** 2)


def agd_upper_bound(T: int, lipschitz_const: float, dist0_sq: float) -> float:
    """Guaranteed accelerated-method gap after T steps: 2L*d0^2/(T+1)^2."""
    return 2.0 * lipschitz_const * dist0_sq / (T + 1) ** 2


def numeric_optimum(inst, iterations: int = 200_000):
    """Approximate (x_opt, f_opt) by a long accelerated-gradient run.

    Used where no closed form is exposed (the two_block variant).
    """
    step = 1.0 / lipschitz(inst)
    x_prev = np.zeros(inst.k)
    y = np.zeros(inst.k)
    x = x_prev
    for t in range(1, iterations + 1):
        x = y - step * loss(inst, y).gradient
        y = x + ((t - 1) / (t + 2)) * (x - x_prev)
        x_prev = x
    return x, float(loss(inst, x).value)
