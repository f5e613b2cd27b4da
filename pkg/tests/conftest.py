"""Shared independent oracles for the test suite.

Everything here recomputes expected values from first principles (literal
index rules, naive formulas, finite differences, dense linear algebra) so
the package code under test never checks itself.
"""

import numpy as np
import pytest


def dense_w(k: int) -> np.ndarray:
    """W from the literal row rule: row i (1-based, i<k) has -1 at column
    k-i and +1 at column k-i+1; row k has +1 at column 1."""
    W = np.zeros((k, k))
    for i in range(1, k):
        W[i - 1, (k - i) - 1] = -1.0
        W[i - 1, (k - i + 1) - 1] = 1.0
    W[k - 1, 0] = 1.0
    return W


def dense_ab(k: int, sigma: float, zeta: float, variant: str = "fourblock"):
    """Dense (A, b) straight from the stacked-block definition."""
    W = dense_w(k)
    if variant == "fourblock":
        A = np.vstack([2 * sigma * W, -2 * zeta * W, -2 * sigma * W, 2 * zeta * W])
        b = np.concatenate([np.ones(k), np.ones(k), -np.ones(k), -np.ones(k)])
    elif variant == "twoblock":
        A = np.vstack([2 * sigma * W, 2 * zeta * W])
        b = np.concatenate([np.ones(k), -np.ones(k)])
    else:
        raise ValueError(variant)
    return A, b


def naive_h(u: np.ndarray) -> float:
    """Direct 2*log(2*cosh(u/2)) sum; valid only for moderate |u|."""
    u = np.asarray(u, dtype=float)
    return float(np.sum(2.0 * np.log(2.0 * np.cosh(u / 2.0))))


def logistic_form(A: np.ndarray, b: np.ndarray, x: np.ndarray) -> float:
    """The log1p(exp(.)) form of the loss, from the dense data."""
    margins = b * (A @ x)
    return float(np.sum(2.0 * np.log1p(np.exp(-margins))))


def central_diff_grad(f, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (f(x + e) - f(x - e)) / (2.0 * step)
    return g


def random_orthogonal(k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


@pytest.fixture
def rng():
    return np.random.default_rng(202401234)
