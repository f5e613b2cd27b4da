"""Deterministic first-order methods driven purely by the oracle.

Every method starts at x_0 = 0, makes one oracle call per iteration while
stepping, and is fully deterministic.  ``dense_probe`` deliberately leaves
the span of past gradients (it adds a scaled all-ones direction) while
still converging, so span checking and the adaptive adversary have a
method to catch.
"""

import csv
import json
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class MethodSpec:
    """A named deterministic method and its step parameters.

    ``step_size`` is usually 1/L with L the smoothness constant of the
    target instance; the harness fills it in.  ``momentum`` applies to
    heavyball only, ``probe_scale`` to dense_probe only.
    """

    name: str
    step_size: float | None = None
    momentum: float = 0.9
    probe_scale: float = 1e-3

    def with_step(self, step_size: float) -> "MethodSpec":
        return replace(self, step_size=step_size)


METHOD_NAMES = ("gd", "agd", "heavyball", "denseprobe")


@dataclass(frozen=True)
class Trace:
    """One run's iterates and per-iterate metrics.

    iterates[0] is always the zero start; values[i] and grad_norms[i]
    (sup-norm) are the loss data at iterates[i], recomputable exactly.
    """

    iterates: np.ndarray  # (T+1, k)
    values: np.ndarray  # (T+1,)
    grad_norms: np.ndarray  # (T+1,)
    oracle_calls: int

    def __len__(self) -> int:
        return self.iterates.shape[0]


def _normalize_name(name: str) -> str:
    key = str(name).strip().lower().replace("_", "").replace("-", "")
    if key not in METHOD_NAMES:
        raise ValueError(f"unknown method {name!r}; expected one of {METHOD_NAMES}")
    return key


def iterate_steps(method: MethodSpec, ask, k: int):
    """Generate iterates x_1, x_2, ... calling ask(x) for oracle answers.

    The generator is infinite; callers take as many steps as they need.
    For gd / heavyball / denseprobe the oracle is queried at each iterate;
    agd queries at its extrapolated points.
    """
    name = _normalize_name(method.name)
    if method.step_size is None or not method.step_size > 0:
        raise ValueError("method.step_size must be a positive real")
    eta = float(method.step_size)
    x = np.zeros(k)
    if name == "gd":
        while True:
            g = ask(x).gradient
            x = x - eta * g
            yield x
    elif name == "agd":
        # query at the extrapolated point y_t, report the descent point x_t
        x_prev = x
        y = x
        t = 1
        while True:
            g = ask(y).gradient
            x_new = y - eta * g
            y = x_new + ((t - 1) / (t + 2)) * (x_new - x_prev)
            x_prev = x_new
            t += 1
            yield x_new
    elif name == "heavyball":
        beta = float(method.momentum)
        x_prev = x
        while True:
            g = ask(x).gradient
            x_new = x - eta * g + beta * (x - x_prev)
            x_prev = x
            x = x_new
            yield x
    else:  # denseprobe
        ones_dir = np.full(k, 1.0 / np.sqrt(k))
        scale = float(method.probe_scale)
        while True:
            g = ask(x).gradient
            x = x - eta * g + scale * float(np.linalg.norm(g)) * ones_dir
            yield x


def run(method: MethodSpec, oracle, T: int) -> Trace:
    """Execute exactly T iterations from x_0 = 0 and assemble the trace.

    The oracle must expose the dimension as ``oracle.k``.  Trace values at
    iterates the method did not itself query are filled by extra oracle
    calls; ``oracle_calls`` counts everything.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    k = oracle.k
    name = _normalize_name(method.name)
    queries_at_iterates = name != "agd"
    calls = 0
    iterates = [np.zeros(k)]
    answers: dict[int, object] = {}

    def ask(x):
        nonlocal calls
        calls += 1
        return oracle(x)

    def recording_ask(x):
        resp = ask(x)
        t = len(iterates) - 1
        # gd/heavyball/denseprobe query at the current iterate; agd only
        # shares its first query (the zero start) with an iterate
        if queries_at_iterates or (t == 0 and not answers):
            answers[t] = resp
        return resp

    stepper = iterate_steps(method, recording_ask, k)
    for _ in range(T):
        iterates.append(next(stepper))

    values = np.empty(T + 1)
    grad_norms = np.empty(T + 1)
    for i, x in enumerate(iterates):
        resp = answers.get(i)
        if resp is None:
            resp = ask(x)
        values[i] = resp.value
        grad_norms[i] = np.max(np.abs(resp.gradient))
    return Trace(
        iterates=np.array(iterates), values=values,
        grad_norms=grad_norms, oracle_calls=calls,
    )


def check_linear_span(trace: Trace, oracle, rel_tol: float = 1e-8) -> bool:
    """Whether every iterate lies in the span of earlier iterate gradients.

    Builds an orthonormal basis of span{grad f(x_0), ..., grad f(x_{t-1})}
    by modified Gram-Schmidt with one re-orthogonalization pass and tests
    the projection residual of x_t against rel_tol*(1 + ||x_t||).
    """
    if len(trace) == 0:
        raise ValueError("empty trace")
    basis: list[np.ndarray] = []
    for t in range(1, len(trace)):
        g = np.array(oracle(trace.iterates[t - 1]).gradient, dtype=float)
        g_norm = np.linalg.norm(g)
        if g_norm > 0.0:
            v = g
            for _ in range(2):  # re-orthogonalize for stability
                for q in basis:
                    v = v - (q @ v) * q
            v_norm = np.linalg.norm(v)
            if v_norm > 1e-12 * g_norm:
                basis.append(v / v_norm)
        x = trace.iterates[t]
        r = x.copy()
        for q in basis:
            r = r - (q @ r) * q
        if np.linalg.norm(r) > rel_tol * (1.0 + np.linalg.norm(x)):
            return False
    return True


def trace_to_csv(trace: Trace, path, f_star: float, x_star: np.ndarray) -> None:
    """Per-iteration metrics: t, value, gap, dist_sq, grad_norm."""
    x_star = np.asarray(x_star, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "value", "gap", "dist_sq", "grad_norm"])
        for t in range(len(trace)):
            d = trace.iterates[t] - x_star
            writer.writerow([
                t,
                f"{trace.values[t]:.17g}",
                f"{trace.values[t] - f_star:.17g}",
                f"{float(d @ d):.17g}",
                f"{trace.grad_norms[t]:.17g}",
            ])


def trace_to_json(trace: Trace, path) -> None:
    """Full iterate dump (large; optional)."""
    payload = {
        "oracle_calls": trace.oracle_calls,
        "values": trace.values.tolist(),
        "grad_norms": trace.grad_norms.tolist(),
        "iterates": trace.iterates.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")
