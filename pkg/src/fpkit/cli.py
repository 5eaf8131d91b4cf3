"""Command-line driver: validated experiments with reproducible artifacts.

Every subcommand reads a JSON config, validates it strictly, runs the
numerics, and writes into the output directory:

* one or more CSV files with fixed float formatting (%.12g), so a rerun with
  the same config, seed, and package version produces byte-identical CSVs;
* SVG figures rendered by the built-in writer (no plotting dependency);
* run_report.json with the config digest, package version, outcome, wall
  time, and the artifact manifest. Timings vary between runs, so the report
  is the one artifact excluded from the byte-identical guarantee.

Exit codes: 0 on success, 2 for validation failures (bad config, unknown
keys, bad CLI usage), 3 for numerical failures (solver or check errors).

The sweep subcommand fans a delta/eps axis out over a thread pool
(--workers, or the FPKIT_WORKERS environment variable) with one
subdirectory per point and a merged summary sorted by axis value.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .conditions import check_condition_h
from .config import (field_from_config, grid_from_config, kernel_from_name,
                     load_config_file, model_from_config, validate_command_config)
from .errors import FpkError, ValidationError
from .fields import DiffusionMatrixField, linear_drift
from .fpk import harnack_ratio, moment_report, solve_exact_1d, solve_grid, weighted_lp_norm
from .grids import GridSpec
from .meanfield import (MeanFieldModel, contraction_estimate, epsilon_threshold,
                        gaussian_probe, picard_iterate)
from .oscillation import SamplingSpec, dini_integral, dini_mean_oscillation
from .poisson import PoissonProblem, solve_poisson, verify_growth_bounds
from .stability import CoefficientPair, stability_sweep, weighted_l1_distance
from . import svg

_EXIT_VALIDATION = 2
_EXIT_NUMERICAL = 3


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def write_csv(path: str, header: list[str], rows) -> str:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def config_digest(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


class RunContext:
    """Output directory plus the bookkeeping for run_report.json."""

    def __init__(self, out_dir: str, command: str, cfg: dict, seed: int):
        self.out_dir = out_dir
        self.command = command
        self.cfg = cfg
        self.seed = seed
        self.t0 = time.monotonic()
        self.artifacts: list[str] = []
        self.summary: dict = {}
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name: str) -> str:
        p = os.path.join(self.out_dir, name)
        self.artifacts.append(name)
        return p

    def finish(self, checks: dict) -> dict:
        report = {
            "command": self.command,
            "version": __version__,
            "config_digest": config_digest(self.cfg),
            "seed": self.seed,
            "checks": {k: bool(v) for k, v in checks.items()},
            "passed": bool(all(checks.values())),
            "wall_time_s": round(time.monotonic() - self.t0, 6),
            "artifacts": sorted(self.artifacts),
            "summary": self.summary,
        }
        with open(os.path.join(self.out_dir, "run_report.json"), "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return report


# ---------------------------------------------------------------------------
# subcommand runners; each returns the named invariant checks it evaluated
# ---------------------------------------------------------------------------


def run_dini(ctx: RunContext, cfg: dict, strict: bool) -> dict:
    field = field_from_config(cfg["field"], path="field")
    rc = cfg["radii"]
    radii = np.geomspace(rc["min"], rc["max"], rc["count"])
    sampling = SamplingSpec(box_radius=cfg["box_radius"], n_centers=cfg["n_centers"],
                            seed=cfg["seed"])
    mod = dini_mean_oscillation(field, radii, sampling, t0=cfg["t0"])
    est = dini_integral(mod, t0=cfg["t0"])
    write_csv(ctx.path("omega.csv"), ["r", "omega", "stderr"],
              zip(mod.radii, mod.omega, mod.stderr))
    verdict = {
        "field": field.name,
        "finite": est.finite,
        "value": est.value if np.isfinite(est.value) else None,
        "tail_model": est.tail_model,
        "tail_exponent": est.tail_exponent,
        "sampled_part": est.sampled_part,
        "tail_part": est.tail_part if np.isfinite(est.tail_part) else None,
    }
    with open(ctx.path("dini_verdict.json"), "w") as fh:
        json.dump(verdict, fh, indent=2, sort_keys=True)
        fh.write("\n")
    pos = mod.omega > 0
    if pos.sum() >= 2:
        svg.line_plot(ctx.path("omega.svg"),
                      [("omega(r)", mod.radii[pos], mod.omega[pos])],
                      title=f"mean oscillation of {field.name}",
                      xlabel="r", ylabel="omega", logx=True, logy=True)
    ctx.summary.update(verdict)
    return {"omega_nonnegative": bool((mod.omega >= 0).all()),
            "verdict_reached": est.finite is not None}


def run_solve(ctx: RunContext, cfg: dict, strict: bool) -> dict:
    A, b, dim, name = model_from_config(cfg)
    spec = grid_from_config(cfg, dim, b.growth.beta2)
    method = cfg["method"]
    if method == "auto":
        method = "exact-1d" if dim == 1 else "grid"
    if method == "exact-1d":
        if dim != 1:
            raise ValidationError("method exact-1d needs a one-dimensional model", path="method")
        rho = solve_exact_1d(A, b, spec)
    else:
        rho = solve_grid(A, b, spec, strict=strict or cfg["strict"])
    k = cfg["weight_order"]
    mom = moment_report(rho, orders=(0.0, 1.0, 2.0, 4.0))
    mass = mom.value(0.0)
    ctx.summary.update({
        "model": name, "method": method, "n": spec.n, "radius": spec.radius,
        "mass": mass,
        "boundary_mass": rho.boundary_mass,
        "residual": rho.info.get("residual", 0.0),
        "weighted_l2_norm": weighted_lp_norm(rho, k, 2.0),
        "harnack_ratio_r1": harnack_ratio(rho, 1.0),
        "moments": {f"k={ko:g}": v for ko, v in mom.entries},
    })
    checks = {
        "mass_ok": abs(mass - 1.0) <= 1e-8,
        "boundary_mass_ok": rho.boundary_mass < 1e-4,
        "positive_on_unit_ball": float(rho.flat()[spec.center_radii() <= 1.0].min()) > 0.0,
    }
    pts = spec.cell_centers()
    if dim == 1:
        write_csv(ctx.path("density.csv"), ["x1", "rho"], zip(pts[:, 0], rho.flat()))
        svg.line_plot(ctx.path("density.svg"), [("rho", pts[:, 0], rho.flat())],
                      title=f"stationary density ({name})", xlabel="x1", ylabel="rho")
    else:
        write_csv(ctx.path("density.csv"), ["x1", "x2", "rho"],
                  zip(pts[:, 0], pts[:, 1], rho.flat()))
        svg.heatmap(ctx.path("density.svg"), rho.values, spec.radius,
                    title=f"stationary density ({name})")
    write_csv(ctx.path("moments.csv"), ["order", "value"], list(mom.entries))
    return checks


def run_poisson(ctx: RunContext, cfg: dict, strict: bool) -> dict:
    A, b, dim, name = model_from_config(cfg)
    psi = field_from_config(cfg["psi"], dim=dim, path="psi")
    spec = grid_from_config(cfg, dim, b.growth.beta2)
    rho = solve_exact_1d(A, b, spec) if dim == 1 else solve_grid(A, b, spec)
    prob = PoissonProblem(A, b, psi, cfg["k"], rho, p=cfg["p"])
    sol = solve_poisson(prob)
    pts = spec.cell_centers()
    res_cells = np.asarray(sol.info["residual_cells"]).ravel()
    if dim == 1:
        write_csv(ctx.path("solution.csv"), ["x1", "u", "du", "residual"],
                  zip(pts[:, 0], sol.u.ravel(), sol.du[:, 0], res_cells))
        svg.line_plot(ctx.path("solution.svg"),
                      [("u", pts[:, 0], sol.u.ravel()), ("du", pts[:, 0], sol.du[:, 0])],
                      title=f"Poisson solution ({name})", xlabel="x1", ylabel="value")
    else:
        du = sol.du.reshape(-1, 2)
        write_csv(ctx.path("solution.csv"), ["x1", "x2", "u", "du1", "du2", "residual"],
                  zip(pts[:, 0], pts[:, 1], sol.u.ravel(), du[:, 0], du[:, 1], res_cells))
        svg.heatmap(ctx.path("solution.svg"), sol.u, spec.radius,
                    title=f"Poisson solution ({name})")
    n_base = spec.n if dim == 1 else min(spec.n, 128)
    radii = tuple(float(r) for r in cfg["check_radii"])
    rep = verify_growth_bounds(A, b, psi, cfg["k"], radii=radii, n_base=n_base, p=cfg["p"])
    write_csv(ctx.path("bounds.csv"),
              ["radius", "g0_over_psi", "g1_over_psi", "h_over_psi"],
              [(r, *q) for r, q in zip(rep.radii, rep.quotients)])
    wit = sol.info["lyapunov"]
    ctx.summary.update({
        "model": name, "k": cfg["k"], "residual_interior": sol.residual_interior,
        "psi_sup": sol.psi_sup, "g0": sol.g0, "g1": sol.g1, "h_norm": sol.h_norm,
        "g0_quotient": sol.g0_quotient, "g1_quotient": sol.g1_quotient,
        "h_quotient": sol.h_quotient, "m0": wit.m0, "r0": wit.r0,
        "bound_drift": rep.max_drift, "bounds_finite": rep.all_finite,
    })
    return {
        "bounds_finite": rep.all_finite,
        "centering_ok": abs(prob.centering_defect()) <= 1e-8,
        "residual_finite": bool(np.isfinite(sol.residual)),
    }


def _stability_pair_family(cfg: dict):
    dim = cfg["dim"]
    eye = np.eye(dim)
    A1 = DiffusionMatrixField.from_constant(eye, 1.0)
    if cfg["family"] == "drift-linear":
        def make(delta: float) -> CoefficientPair:
            return CoefficientPair(A1, linear_drift(dim, 1.0 + delta),
                                   A1, linear_drift(dim, 1.0))
    else:
        def make(delta: float) -> CoefficientPair:
            Am = DiffusionMatrixField.from_constant(eye * (1.0 + delta),
                                                    lam=min(1.0, 1.0 / (1.0 + delta)))
            return CoefficientPair(Am, linear_drift(dim, 1.0), A1, linear_drift(dim, 1.0))
    return make


def run_stability(ctx: RunContext, cfg: dict, strict: bool) -> dict:
    make = _stability_pair_family(cfg)
    spec = grid_from_config(cfg, cfg["dim"], 0.5)
    res = stability_sweep(make, cfg["deltas"], spec, k=cfg["k"], r=cfg["r"])
    rows = [(d, rep.lhs, rep.rhs_diffusion, rep.rhs_drift, rep.c_hat)
            for d, rep in zip(res.deltas, res.reports)]
    write_csv(ctx.path("sweep.csv"),
              ["delta", "lhs", "rhs_diffusion", "rhs_drift", "c_hat"], rows)
    pos = res.deltas > 0
    if pos.sum() >= 2:
        svg.line_plot(ctx.path("sweep.svg"),
                      [("lhs", res.deltas[pos], res.lhs_values[pos])],
                      title=f"perturbation response ({cfg['family']})",
                      xlabel="delta", ylabel="weighted L1 distance", logx=True, logy=True)
    cs = res.c_hats[np.isfinite(res.c_hats)]
    ctx.summary.update({"family": cfg["family"], "slope": res.slope,
                        "fit_sse": res.fit_sse, "c_spread": res.c_spread,
                        "c_hat_max": float(cs.max()) if len(cs) else None,
                        "c_hat_min": float(cs.min()) if len(cs) else None,
                        "k": cfg["k"], "r": cfg["r"]})
    return {"slope_near_one": bool(abs(res.slope - 1.0) <= 0.2),
            "c_hat_spread_ok": bool(res.c_spread <= 10.0)}


def run_meanfield(ctx: RunContext, cfg: dict, strict: bool) -> dict:
    dim = cfg["dim"]
    A1 = DiffusionMatrixField.from_constant(np.eye(dim), 1.0)
    model = MeanFieldModel(A1, linear_drift(dim, 1.0), eps=float(cfg["eps"]),
                           weight_order=cfg["weight_order"],
                           **kernel_from_name(cfg["kernel"], dim))
    spec = grid_from_config(cfg, dim, 0.5)
    traces = []
    for mean in cfg["starts"]:
        start = gaussian_probe(spec, np.full(dim, float(mean)), 1.0)
        traces.append(picard_iterate(model, start, tol=cfg["tol"], max_iter=cfg["max_iter"]))
    rows = []
    for si, tr in enumerate(traces):
        for t, g in enumerate(tr.gaps):
            rows.append((si, t + 1, g,
                         tr.factors[t - 1] if 0 < t <= len(tr.factors) else float("nan")))
    write_csv(ctx.path("trace.csv"),
              ["start", "iteration", "gap", "contraction_factor"], rows)
    series = [(f"start {cfg['starts'][i]:g}", np.arange(1, len(tr.gaps) + 1),
               np.maximum(tr.gaps, 1e-300)) for i, tr in enumerate(traces) if tr.gaps]
    if series and all(len(s[1]) >= 2 for s in series):
        svg.line_plot(ctx.path("gaps.svg"), series, title="fixed-point iteration gaps",
                      xlabel="iteration", ylabel="weighted gap", logy=True)
    spread = 0.0
    for i in range(len(traces)):
        for j in range(i + 1, len(traces)):
            spread = max(spread, weighted_l1_distance(traces[i].fixed_point,
                                                      traces[j].fixed_point,
                                                      cfg["weight_order"]))
    factors = [f for tr in traces for f in tr.factors]
    summary = {
        "eps": cfg["eps"], "kernel": cfg["kernel"],
        "converged": all(tr.converged for tr in traces),
        "iterations": [tr.n_steps for tr in traces],
        "fixed_point_spread": spread,
        "threshold_scale": traces[0].threshold_scale if traces else None,
        "m_hat": traces[0].m_hat if traces else None,
    }
    if cfg["threshold"]:
        summary["eps_threshold"] = epsilon_threshold(model, spec)
    if cfg["eps_grid"]:
        facs = [contraction_estimate(model.with_eps(e), spec).factor for e in cfg["eps_grid"]]
        write_csv(ctx.path("response.csv"), ["eps", "factor"], zip(cfg["eps_grid"], facs))
        summary["max_factor"] = max(facs)
    ctx.summary.update(summary)
    return {"converged": bool(summary["converged"]),
            "fixed_points_agree": bool(spread <= 1e-5),
            "factors_below_one": bool(all(f < 1.0 for f in factors))}


def _run_sweep_point(task: str, base_cfg: dict, axis_key: str, value: float,
                     out_dir: str, strict: bool) -> dict:
    cfg = dict(base_cfg)
    if axis_key == "deltas":
        # a per-point slope needs two sizes; pair each axis value with its double
        cfg["deltas"] = [value, 2.0 * value]
    else:
        cfg[axis_key] = value
    ctx = RunContext(out_dir, task, cfg, cfg.get("seed", 0))
    runner = {"stability": run_stability, "meanfield": run_meanfield}[task]
    try:
        checks = runner(ctx, cfg, strict)
    except FpkError as exc:
        if strict:
            raise
        ctx.summary["error"] = f"{type(exc).__name__}: {exc}"
        report = ctx.finish({"completed": False})
        return {"value": value, "passed": False, "error": ctx.summary["error"],
                "summary": report["summary"]}
    report = ctx.finish(checks)
    return {"value": value, "passed": report["passed"], "summary": report["summary"]}


def run_sweep(ctx: RunContext, cfg: dict, strict: bool, workers: int) -> dict:
    task = cfg["task"]
    axis_key = cfg["axis_key"]
    values = sorted(float(v) for v in cfg["axis"])
    if len(values) < 3:
        raise ValidationError("sweep needs at least 3 axis points", path="axis")
    jobs = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for i, v in enumerate(values):
            sub = os.path.join(ctx.out_dir, f"point-{i:03d}")
            jobs.append(pool.submit(_run_sweep_point, task, cfg["base"], axis_key, v,
                                    sub, strict))
        results = [j.result() for j in jobs]
    results.sort(key=lambda r: r["value"])
    metric = "slope" if task == "stability" else "fixed_point_spread"
    rows = [(r["value"], r["passed"], r["summary"].get(metric, float("nan"))) for r in results]
    write_csv(ctx.path("summary.csv"), ["value", "passed", metric], rows)
    failures = [r["value"] for r in results if not r["passed"]]
    ctx.summary.update({"task": task, "points": len(values),
                        "all_passed": not failures, "failed_values": failures})
    for i in range(len(values)):
        ctx.artifacts.append(f"point-{i:03d}/run_report.json")
    if strict:
        return {"all_points_passed": not failures}
    # lenient mode records failures in the summary and still exits 0
    return {"sweep_completed": True}


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpkit",
        description="stationary Kolmogorov equation toolkit: solvers, bounds, sweeps")
    parser.add_argument("--version", action="version", version=f"fpkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("dini", "sample a mean-oscillation modulus and test its Dini integral"),
        ("solve", "solve a stationary equation and report density diagnostics"),
        ("poisson", "solve a source problem and verify growth bounds"),
        ("stability", "measure the perturbation estimate along a family"),
        ("meanfield", "iterate the self-consistency map to a fixed point"),
        ("sweep", "fan a stability/meanfield axis over a thread pool"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--strict", action="store_true",
                       help="escalate soft numerical warnings to errors")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--workers", type=int, default=None,
                       help="thread count for sweep points (default: FPKIT_WORKERS or 4)")
    return parser


def resolve_workers(flag_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get("FPKIT_WORKERS", "")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"FPKIT_WORKERS must be an integer, got {env!r}",
                                  path="FPKIT_WORKERS")
    return 4


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        raw = load_config_file(args.config)
        if args.seed is not None:
            raw["seed"] = args.seed
        cfg = validate_command_config(args.command, raw)
        workers = resolve_workers(args.workers)
        ctx = RunContext(args.out, args.command, cfg, cfg.get("seed", 0))
        if args.command == "sweep":
            checks = run_sweep(ctx, cfg, args.strict, workers)
        else:
            runner = {"dini": run_dini, "solve": run_solve, "poisson": run_poisson,
                      "stability": run_stability, "meanfield": run_meanfield}[args.command]
            checks = runner(ctx, cfg, args.strict)
        report = ctx.finish(checks)
        status = "pass" if report["passed"] else "fail"
        print(f"{args.command}: {status} ({report['wall_time_s']:.2f}s) -> {args.out}")
        return 0 if report["passed"] else _EXIT_NUMERICAL
    except ValidationError as exc:
        print(f"config error: {exc}" + (f" [at {exc.path}]" if exc.path else ""),
              file=sys.stderr)
        return _EXIT_VALIDATION
    except ValueError as exc:
        print(f"invalid parameter: {exc}", file=sys.stderr)
        return _EXIT_VALIDATION
    except FpkError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
