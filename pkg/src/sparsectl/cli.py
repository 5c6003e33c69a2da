"""Command-line front end.

Subcommands: ``check``, ``synth``, ``simulate``, ``sweep``.  Exit codes:
0 success, 1 domain failure (assumption violated, infeasible synthesis,
or a diverged simulation where divergence is the finding), 2 usage or
IO errors.  ``SPARSECTL_THREADS`` provides the default for --threads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, serialize, sim, synth
from .errors import (AssumptionError, DimensionError, InfeasibilityError,
                     InvalidInputError, PlantFormatError, ToolkitError)
from .models import parse_model_uri

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("SPARSECTL_THREADS", "1")))
    except ValueError:
        return 1


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad index list {text!r}") from exc


def _decay_target(text: str):
    if text.lower() in ("none", "off"):
        return None
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad decay target {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsectl",
        description="Synthesize and certify feedback under randomized "
                    "sparse state measurement.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check", help="verify the synthesis assumptions")
    pc.add_argument("model", help="builtin:... URI or plant file path")

    ps = sub.add_parser("synth", help="design a gain and probabilities")
    ps.add_argument("model")
    ps.add_argument("--delta", type=float, default=synth.DEFAULT_DELTA,
                    help="grid step for the contraction-target sweep")
    ps.add_argument("--p-floor", type=float, default=synth.DEFAULT_P_FLOOR)
    ps.add_argument("--eps-p", type=float, default=synth.DEFAULT_EPS_P)
    ps.add_argument("--decay-target", type=_decay_target,
                    default=synth.DEFAULT_DECAY_TARGET,
                    help="certified contraction cap, or 'none'")
    ps.add_argument("--gamma-grid", choices=("residual", "full"),
                    default="residual",
                    help="start the sweep at the residual norm, or cover the "
                         "family's full feasible range")
    ps.add_argument("--adaptive", action="store_true",
                    help="per-coordinate probabilities")
    ps.add_argument("--weights", default=None,
                    help="comma list or @file with a JSON list")
    ps.add_argument("--out", default="plan.json")

    def sim_flags(p):
        p.add_argument("--runs", type=int, default=100)
        p.add_argument("--steps", type=int, default=200)
        p.add_argument("--sigma", type=float, default=100.0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol-rel", type=float, default=1e-3)
        p.add_argument("--record", type=_int_list, default=None,
                       help="state indices to log as x_mean_<i> columns")
        p.add_argument("--threads", type=int, default=_default_threads())

    pm = sub.add_parser("simulate", help="Monte Carlo ensemble for one plan")
    pm.add_argument("model")
    pm.add_argument("--plan", required=True)
    pm.add_argument("--p", type=_float_list, default=None,
                    help="override probability (scalar or n comma values)")
    sim_flags(pm)
    pm.add_argument("--out", default="run.csv")

    pw = sub.add_parser("sweep", help="common-random-number sweep over p")
    pw.add_argument("model")
    pw.add_argument("--plan", required=True)
    pw.add_argument("--p-list", type=_float_list, required=True)
    sim_flags(pw)
    pw.add_argument("--out-dir", default="sweep")
    return parser


def _resolve_plant(uri: str):
    spec = parse_model_uri(uri)
    return spec.resolve()


def _load_weights(arg: str | None, plant) -> np.ndarray | None:
    if arg is None:
        return plant.weights
    if arg.startswith("@"):
        with open(arg[1:]) as fh:
            return np.asarray(json.load(fh), dtype=float)
    return np.asarray(_float_list(arg), dtype=float)


def cmd_check(args) -> int:
    plant = _resolve_plant(args.model)
    report = synth.check_assumptions(plant)
    print(f"plant: {plant.name or args.model}  n={plant.n} m={plant.m}")
    print(f"input rank: {plant.input_rank} of {plant.m}  "
          f"-> {'ok' if report.rank_ok else 'VIOLATED (Assumption: full column rank)'}")
    print(f"projected residual norm: {report.residual_norm:.12g}  "
          f"-> {'ok' if report.spectral_ok else 'VIOLATED (must be < 1)'}")
    return EXIT_OK if (report.rank_ok and report.spectral_ok) else EXIT_DOMAIN


def cmd_synth(args) -> int:
    plant = _resolve_plant(args.model)
    report = synth.check_assumptions(plant)
    if not (report.rank_ok and report.spectral_ok):
        print(f"assumptions violated: rank_ok={report.rank_ok} "
              f"residual_norm={report.residual_norm:.6g}", file=sys.stderr)
        return EXIT_DOMAIN
    config = {
        "model": args.model, "delta": args.delta, "p_floor": args.p_floor,
        "eps_p": args.eps_p, "decay_target": args.decay_target,
        "gamma_grid": args.gamma_grid, "adaptive": args.adaptive,
        "out": str(args.out),
    }
    manifest = serialize.ManifestWriter(command=sys.argv[1:], config=config)
    try:
        if args.adaptive:
            weights = _load_weights(args.weights, plant)
            plan = synth.design_adaptive(
                plant, weights=weights, delta=args.delta, p_floor=args.p_floor,
                eps_p=args.eps_p, decay_target=args.decay_target,
                gamma_grid=args.gamma_grid)
        else:
            plan = synth.design_uniform(
                plant, delta=args.delta, p_floor=args.p_floor,
                eps_p=args.eps_p, decay_target=args.decay_target,
                gamma_grid=args.gamma_grid)
    except InfeasibilityError as exc:
        print(f"synthesis infeasible: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    out = Path(args.out)
    manifest_path = out.with_suffix(out.suffix + ".manifest.json")
    manifest.add_output(str(out))
    serialize.save_plan(plan, plant, out, manifest_path=manifest_path)
    manifest.write(manifest_path)
    if plan.mode == "uniform":
        print(f"p_star = {plan.p_star:.10g}  (threshold {plan.threshold:.10g})")
    else:
        head = ", ".join(f"{v:.6g}" for v in plan.p_vec[:8])
        tail = ", ..." if plan.cert.n > 8 else ""
        print(f"p_vec = [{head}{tail}]")
    print(f"gamma = {plan.cert.gamma:.10g}  t = {plan.cert.t:.10g}  "
          f"contraction = {plan.contraction:.10g}")
    print(f"expected sparsity = {plan.expected_sparsity:.10g} of {plan.cert.n}")
    if plan.is_degenerate:
        print("note: gain is zero (open loop already meets the target); "
              "probabilities fall back to p_floor")
    print(f"plan written to {out}")
    return EXIT_OK


def _sim_config(args) -> sim.SimConfig:
    record = tuple(args.record) if args.record is not None else None
    return sim.SimConfig(steps=args.steps, runs=args.runs,
                         init_sigma=args.sigma, master_seed=args.seed,
                         record_components=record, threads=args.threads)


def _probs_override(args, plant) -> np.ndarray | None:
    if args.p is None:
        return None
    values = args.p
    if len(values) == 1:
        return np.full(plant.n, values[0])
    if len(values) != plant.n:
        raise DimensionError(
            f"--p needs 1 or {plant.n} values, got {len(values)}")
    return np.asarray(values, dtype=float)


def cmd_simulate(args) -> int:
    plant = _resolve_plant(args.model)
    doc = serialize.read_plan_file(args.plan)
    plan = serialize.bind_plan(doc, plant)
    probs = _probs_override(args, plant)
    cfg = _sim_config(args)
    config = {
        "model": args.model, "plan": str(args.plan),
        "p_override": None if args.p is None else args.p,
        "runs": cfg.runs, "steps": cfg.steps, "sigma": cfg.init_sigma,
        "seed": cfg.master_seed, "tol_rel": args.tol_rel,
        "record": list(cfg.record_components or ()), "threads": cfg.threads,
        "out": str(args.out),
    }
    manifest = serialize.ManifestWriter(command=sys.argv[1:], config=config)
    stats = sim.run_ensemble(plant, plan, cfg, probs=probs)
    effective = plan.probabilities if probs is None else probs
    report = sim.decay_report(
        stats, serialize.plan_contraction(plan, effective), tol_rel=args.tol_rel)
    out = Path(args.out)
    serialize.write_stats_csv(stats, out)
    manifest.add_output(str(out))
    summary_path = out.with_suffix(out.suffix + ".summary.json")
    manifest_path = out.with_suffix(out.suffix + ".manifest.json")
    summary = {
        "verdict": report.verdict,
        "threshold_step": report.threshold_step,
        "tol_rel": report.tol_rel,
        "contraction_bound": report.bound,
        "initial_mean_sq_norm": stats.mean_sq_norm[0],
        "final_mean_sq_norm": stats.mean_sq_norm[-1],
        "diverged_runs": stats.diverged_runs,
        "manifest": str(manifest_path),
    }
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=1)
        fh.write("\n")
    manifest.add_output(str(summary_path))
    manifest.write(manifest_path)
    print(f"verdict: {report.verdict}"
          + (f" (threshold step {report.threshold_step})"
             if report.threshold_step is not None else ""))
    print(f"csv written to {out}")
    return EXIT_DOMAIN if report.verdict == "diverged" else EXIT_OK


def cmd_sweep(args) -> int:
    plant = _resolve_plant(args.model)
    doc = serialize.read_plan_file(args.plan)
    plan = serialize.bind_plan(doc, plant)
    p_list = []
    for p in args.p_list:
        if p in p_list:
            print(f"warning: duplicate p={p:g} ignored", file=sys.stderr)
        else:
            p_list.append(p)
    if not p_list:
        print("error: --p-list is empty", file=sys.stderr)
        return EXIT_USAGE
    cfg = _sim_config(args)
    config = {
        "model": args.model, "plan": str(args.plan), "p_list": p_list,
        "runs": cfg.runs, "steps": cfg.steps, "sigma": cfg.init_sigma,
        "seed": cfg.master_seed, "tol_rel": args.tol_rel,
        "record": list(cfg.record_components or ()), "threads": cfg.threads,
        "out_dir": str(args.out_dir),
    }
    manifest = serialize.ManifestWriter(command=sys.argv[1:], config=config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = sim.sweep_p(plant, plan.cert, p_list, cfg, tol_rel=args.tol_rel)
    rows = []
    for entry in entries:
        csv_path = out_dir / f"p_{entry.p:g}.csv"
        serialize.write_stats_csv(entry.stats, csv_path)
        manifest.add_output(str(csv_path))
        rows.append({
            "p": entry.p,
            "verdict": entry.report.verdict,
            "threshold_step": entry.report.threshold_step,
            "contraction_bound": entry.report.bound,
            "final_mean_sq_norm": entry.stats.mean_sq_norm[-1],
            "csv": str(csv_path),
        })
        print(f"p={entry.p:g}: {entry.report.verdict}"
              + (f" at step {entry.report.threshold_step}"
                 if entry.report.threshold_step is not None else ""))
    summary_path = out_dir / "summary.json"
    with open(summary_path, "w") as fh:
        json.dump({"entries": rows}, fh, indent=1)
        fh.write("\n")
    manifest.add_output(str(summary_path))
    manifest.write(out_dir / "manifest.json")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "check":
            return cmd_check(args)
        if args.command == "synth":
            return cmd_synth(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        return cmd_sweep(args)
    except (AssumptionError, InfeasibilityError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (PlantFormatError, InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
