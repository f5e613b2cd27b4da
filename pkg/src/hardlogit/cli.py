"""Command-line harness: generate datasets, verify invariants, race methods.

Subcommands:

- ``generate``: write one dataset (csv or libsvm) plus its metadata sidecar.
- ``verify``: run the analytic invariant suite up to a given dimension.
- ``race``: run a method on the hard instance (dimension 2T) for each
  requested T and compare the final gap/distance against the span-method
  lower bounds (and, for agd, the upper bound).
- ``resist``: race a method against the adaptive rotation adversary
  (dimension 4T+2) and check the general lower bounds plus replay.

Exit codes: 0 pass, 1 assertion failure, 2 usage error.  Reports are
canonical JSON (sorted keys); pass --no-timestamp for byte-identical
reruns.  HARDLOGIT_THREADS caps parallel race cells.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic, datasets, logloss, optimizers, resist

DEFAULT_SIGMA = 1.3
DEFAULT_ZETA = 1.0


@dataclass
class ExperimentReport:
    """Config echo, measured quantities, theoretical targets, verdicts."""

    config: dict
    measured: dict
    theoretical: dict
    verdicts: list = field(default_factory=list)
    timestamp: str | None = None

    def add_verdict(self, check: str, passed: bool, margin: float) -> None:
        self.verdicts.append(
            {"check": check, "passed": bool(passed), "margin": float(margin)}
        )

    @property
    def all_passed(self) -> bool:
        return all(v["passed"] for v in self.verdicts)

    def to_dict(self) -> dict:
        out = {
            "config": self.config,
            "measured": self.measured,
            "theoretical": self.theoretical,
            "verdicts": self.verdicts,
        }
        if self.timestamp is not None:
            out["timestamp"] = self.timestamp
        return out

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _timestamp(args) -> str | None:
    if getattr(args, "no_timestamp", False):
        return None
    return time.strftime("%Y-%m-%dT%H:%M:%S%z")


def _parse_t_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in str(text).split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad iteration list {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"bad iteration list {text!r}")
    return values


def cmd_generate(args) -> int:
    inst = datasets.build_instance(args.k, args.sigma, args.zeta, args.variant)
    fmt = args.format.lower()
    ext = {"csv": "csv", "libsvm": "libsvm"}[fmt]
    out = Path(args.out) if args.out else Path(f"wc_k{inst.k}_{inst.variant.value}.{ext}")
    datasets.export(inst, fmt, out)

    if inst.variant is datasets.Variant.FOUR_BLOCK:
        prof = analytic.profile(inst)
        extra = analytic.profile_metadata(prof)
    else:
        c = analytic.solve_c(inst.sigma, inst.zeta)
        _, f_num = analytic.numeric_optimum(inst, iterations=args.optimum_iters)
        norm_sq = c * c * inst.k * (inst.k + 1) * (2 * inst.k + 1) / 6.0
        extra = {"c": c, "f_star": f_num, "xstar_norm_sq": norm_sq}
    sidecar = out.with_suffix(out.suffix + ".meta.json")
    datasets.export(inst, "json-meta", sidecar, extra_meta=extra)
    print(f"wrote {out} ({inst.n_rows} rows x {inst.k} columns) and {sidecar}")
    return 0


def _verify_checks(max_k: int, rng: np.random.Generator):
    """Yield (name, passed, detail) for every analytic invariant."""
    sigma, zeta = DEFAULT_SIGMA, DEFAULT_ZETA

    ratio = analytic.constant_c_ratio(sigma, zeta)
    yield "ratio_constant_above_half", ratio > 0.5, f"C={ratio:.6f}"

    worst_grad = 0.0
    worst_f = 0.0
    worst_dy = 0.0
    for k in range(1, max_k + 1):
        inst = datasets.build_instance(k, sigma, zeta)
        prof = analytic.profile(inst)
        resp = logloss.loss(inst, prof.x_star)
        worst_grad = max(worst_grad, float(np.max(np.abs(resp.gradient))))
        worst_f = max(
            worst_f, abs(resp.value - prof.f_star) / (1.0 + abs(prof.f_star))
        )
        _, _, dy = logloss.phi(inst, prof.x_star, 0.0)
        worst_dy = max(worst_dy, abs(dy))
    yield "optimum_gradient_vanishes", worst_grad <= 1e-9, f"max={worst_grad:.2e}"
    yield "optimum_value_matches_formula", worst_f <= 1e-10, f"max={worst_f:.2e}"
    yield "intercept_derivative_vanishes", worst_dy <= 1e-9, f"max={worst_dy:.2e}"

    leak = 0.0
    for k in range(2, max_k + 1):
        inst = datasets.build_instance(k, sigma, zeta)
        for t in range(1, k):
            x = np.zeros(k)
            x[k - t:] = rng.standard_normal(t)
            g = logloss.loss(inst, x).gradient
            lead = k - (t + 1)
            if lead > 0:
                leak = max(leak, float(np.max(np.abs(g[:lead]))))
    yield "gradients_stay_in_next_subspace", leak <= 1e-10, f"max={leak:.2e}"

    worst_id = 0.0
    for k in range(2, max_k + 1):
        inst = datasets.build_instance(k, sigma, zeta)
        prof_k = analytic.profile(inst)
        for t in range(1, k):
            prof_t = analytic.profile(datasets.build_instance(t, sigma, zeta))
            x = np.zeros(k)
            x[k - t:] = prof_t.x_star
            lhs = logloss.loss(inst, x).value
            rhs = 8.0 * (k - t) * logloss.LOG2 + prof_t.f_star
            worst_id = max(worst_id, abs(lhs - rhs))
            gap = analytic.subspace_gap(k, t, sigma, zeta)
            worst_id = max(worst_id, abs((rhs - prof_k.f_star) - gap))
    yield "restricted_optimum_identity", worst_id <= 1e-9, f"max={worst_id:.2e}"

    worst_norm = -np.inf
    for k in (1, 2, 3, 5, max_k):
        inst = datasets.build_instance(k, sigma, zeta)
        est = datasets.spectral_norm(inst).value
        worst_norm = max(worst_norm, est - inst.spectral_norm_bound())
    yield "norm_below_closed_form_bound", worst_norm <= 1e-8, f"max excess={worst_norm:.2e}"


def cmd_verify(args) -> int:
    if args.max_k < 2:
        print("error: --max-k must be >= 2", file=sys.stderr)
        return 2
    rng = np.random.default_rng(20240601)
    failures = 0
    for name, passed, detail in _verify_checks(args.max_k, rng):
        status = "ok" if passed else "FAIL"
        print(f"{status:4s} {name}: {detail}")
        failures += 0 if passed else 1
    print(f"{failures} failure(s)")
    return 1 if failures else 0


def _race_cell(method_name: str, T: int, sigma: float, zeta: float, ts) -> tuple:
    inst = datasets.build_instance(2 * T, sigma, zeta)
    prof = analytic.profile(inst)
    a_norm = datasets.spectral_norm(inst).value
    lips = 0.5 * a_norm**2
    spec = optimizers.MethodSpec(name=method_name, step_size=1.0 / lips)
    trace = optimizers.run(spec, logloss.FirstOrderOracle(inst), T)

    gap = float(trace.values[-1] - prof.f_star)
    diff = trace.iterates[-1] - prof.x_star
    dist_sq = float(diff @ diff)
    dist0_sq = prof.xstar_norm_sq
    is_span = optimizers.check_linear_span(trace, logloss.FirstOrderOracle(inst))
    if is_span:
        bound = analytic.bound_linear_span(T, a_norm, dist0_sq)
        bound_name = "gap_above_span_lower_bound"
    else:
        bound = analytic.bound_general(T, a_norm, dist0_sq)
        bound_name = "gap_above_general_lower_bound"

    report = ExperimentReport(
        config={
            "method": method_name, "k": inst.k, "sigma": sigma, "zeta": zeta,
            "T": T, "variant": inst.variant.value,
        },
        measured={
            "final_gap": gap, "final_dist_sq": dist_sq, "a_norm": a_norm,
            "oracle_calls": trace.oracle_calls, "span_method": is_span,
        },
        theoretical={
            "gap_lower_bound": bound.gap, "dist_factor": bound.dist_factor,
            "dist0_sq": dist0_sq,
        },
        timestamp=ts,
    )
    report.add_verdict(bound_name, gap > bound.gap, gap - bound.gap)
    report.add_verdict(
        "dist_sq_above_one_eighth",
        dist_sq > bound.dist_factor * dist0_sq,
        dist_sq - bound.dist_factor * dist0_sq,
    )
    if method_name == "agd":
        upper = analytic.agd_upper_bound(T, lips, dist0_sq)
        report.theoretical["agd_upper_bound"] = upper
        report.theoretical["sandwich_ratio"] = analytic.sandwich_ratio(T)
        report.add_verdict("gap_below_agd_upper_bound", gap <= upper, upper - gap)
    return report, trace, prof


def cmd_race(args) -> int:
    ts = _timestamp(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = max(1, int(os.environ.get("HARDLOGIT_THREADS", "1")))
    cells = list(args.T)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(
            pool.map(
                lambda T: _race_cell(args.method, T, args.sigma, args.zeta, ts), cells
            )
        )
    ok = True
    for T, (report, trace, prof) in zip(cells, results):
        stem = f"{args.method}_T{T}"
        report.write(out_dir / f"report_{stem}.json")
        optimizers.trace_to_csv(
            trace, out_dir / f"trace_{stem}.csv", prof.f_star, prof.x_star
        )
        if args.dump_iterates:
            optimizers.trace_to_json(trace, out_dir / f"iterates_{stem}.json")
        for v in report.verdicts:
            status = "ok" if v["passed"] else "FAIL"
            print(f"{status:4s} T={T} {v['check']} (margin {v['margin']:.3e})")
        ok = ok and report.all_passed
    if not ok and args.strict:
        return 1
    return 0


def cmd_resist(args) -> int:
    ts = _timestamp(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    T = args.T
    method = optimizers.MethodSpec(name=args.method)
    trace, final = resist.adversarial_run(method, T, args.sigma, args.zeta)

    base = final.base
    prof = analytic.profile(base)
    a_norm = datasets.spectral_norm(base).value
    z_star = final.U.T @ prof.x_star
    gap = float(trace.values[-1] - prof.f_star)
    diff = trace.iterates[-1] - z_star
    dist_sq = float(diff @ diff)
    dist0_sq = prof.xstar_norm_sq
    bound = analytic.bound_general(T, a_norm, dist0_sq)

    atb = datasets.matvec_at(base, base.labels)
    ortho = float(np.max(np.abs(final.U.T @ final.U - np.eye(base.k))))
    fixed_dir = float(np.max(np.abs(final.U.T @ atb - atb)))
    replay_ok = resist.replay_check(method, final, trace)

    report = ExperimentReport(
        config={
            "method": args.method, "k": base.k, "sigma": args.sigma,
            "zeta": args.zeta, "T": T, "variant": base.variant.value,
        },
        measured={
            "final_gap": gap, "final_dist_sq": dist_sq, "a_norm": a_norm,
            "oracle_calls": trace.oracle_calls,
            "orthogonality_residual": ortho,
            "data_direction_residual": fixed_dir,
        },
        theoretical={
            "gap_lower_bound": bound.gap, "dist_factor": bound.dist_factor,
            "dist0_sq": dist0_sq,
        },
        timestamp=ts,
    )
    report.add_verdict("gap_above_general_lower_bound", gap > bound.gap, gap - bound.gap)
    report.add_verdict(
        "dist_sq_above_one_eighth",
        dist_sq > bound.dist_factor * dist0_sq,
        dist_sq - bound.dist_factor * dist0_sq,
    )
    report.add_verdict("rotation_orthogonal", ortho <= 1e-10, 1e-10 - ortho)
    report.add_verdict("data_direction_fixed", fixed_dir <= 1e-10, 1e-10 - fixed_dir)
    report.add_verdict("replay_matches", replay_ok, 0.0 if replay_ok else -1.0)

    stem = f"resist_{args.method}_T{T}"
    report.write(out_dir / f"report_{stem}.json")
    optimizers.trace_to_csv(trace, out_dir / f"trace_{stem}.csv", prof.f_star, z_star)
    datasets.export(final, "libsvm", out_dir / f"dataset_{stem}.libsvm")
    datasets.export(
        final, "json-meta", out_dir / f"dataset_{stem}.libsvm.meta.json",
        extra_meta=analytic.profile_metadata(prof),
    )
    resist.save_matrix_csv(final.U, out_dir / f"rotation_{stem}.csv")
    for v in report.verdicts:
        status = "ok" if v["passed"] else "FAIL"
        print(f"{status:4s} T={T} {v['check']} (margin {v['margin']:.3e})")
    if not report.all_passed and args.strict:
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardlogit",
        description="Hard binary-logistic-regression datasets and first-order method benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a dataset file plus metadata sidecar")
    p_gen.add_argument("--k", type=int, required=True)
    p_gen.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p_gen.add_argument("--zeta", type=float, default=DEFAULT_ZETA)
    p_gen.add_argument("--variant", default="fourblock", choices=["fourblock", "twoblock"])
    p_gen.add_argument("--format", default="csv", choices=["csv", "libsvm"])
    p_gen.add_argument("--out", default=None)
    p_gen.add_argument("--optimum-iters", type=int, default=100_000,
                       help="iterations for the numeric optimum (twoblock sidecar)")
    p_gen.set_defaults(func=cmd_generate)

    p_ver = sub.add_parser("verify", help="run the analytic invariant suite")
    p_ver.add_argument("--max-k", type=int, default=20)
    p_ver.set_defaults(func=cmd_verify)

    p_race = sub.add_parser("race", help="race a method against the lower bounds")
    p_race.add_argument("--method", default="agd",
                        choices=list(optimizers.METHOD_NAMES))
    p_race.add_argument("--T", type=_parse_t_list, default=[5, 25, 50],
                        help="comma-separated iteration counts")
    p_race.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p_race.add_argument("--zeta", type=float, default=DEFAULT_ZETA)
    p_race.add_argument("--out", default="reports")
    p_race.add_argument("--strict", action="store_true")
    p_race.add_argument("--no-timestamp", action="store_true")
    p_race.add_argument("--dump-iterates", action="store_true")
    p_race.set_defaults(func=cmd_race)

    p_res = sub.add_parser("resist", help="race a method against the rotation adversary")
    p_res.add_argument("--method", default="denseprobe",
                       choices=list(optimizers.METHOD_NAMES))
    p_res.add_argument("--T", type=int, default=10)
    p_res.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p_res.add_argument("--zeta", type=float, default=DEFAULT_ZETA)
    p_res.add_argument("--out", default="reports")
    p_res.add_argument("--strict", action="store_true")
    p_res.add_argument("--no-timestamp", action="store_true")
    p_res.set_defaults(func=cmd_resist)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
