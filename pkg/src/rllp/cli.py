"""Command-line entry points: single runs, variant comparisons, disturbance
sweeps and synthetic path generation.

Exit codes: 0 success, 2 configuration error, 3 simulation abort.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import sim
from .kinematics import DegenerateGamma
from .path import generate_nonsmooth_path, save_path_csv
from .sim import ConfigError, Scenario

SWEEP_CSV_COLUMNS = (
    "l_d,eta_lon_mean,eta_lon_std,eta_lat_mean,eta_lat_std,"
    "a_yc_mean,a_yc_std,a_zc_mean,a_zc_std,ed_conv_median_s"
)


def _fail_config(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _ensure_outputs(paths: list[str], force: bool) -> str | None:
    for p in paths:
        if os.path.exists(p) and not force:
            return f"{p} exists; pass --force to overwrite"
    return None


def _parse_window(text: str | None) -> tuple[float, float] | None:
    if text is None:
        return None
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ConfigError(f"--window expects `start:end`, got {text!r}")
    w = (sim.eval_number(lo), sim.eval_number(hi))
    if w[0] >= w[1]:
        raise ConfigError(f"--window start must be < end, got {text!r}")
    return w


def _load_scenario(args) -> Scenario:
    scenario = sim.load_scenario(args.config)
    if getattr(args, "seed", None) is not None:
        scenario = replace(scenario, seed=args.seed)
    if getattr(args, "controller", None) is not None:
        scenario = replace(scenario, controller=args.controller)
    return scenario


def _write_run(out_dir: str, name: str, records, metrics, extra: dict) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, f"{name}.csv"), "w", encoding="utf-8") as f:
        sim.write_log_csv(records, f)
    with open(os.path.join(out_dir, "metrics.json"), "w", encoding="utf-8") as f:
        f.write(sim.metrics_json(metrics, extra))


def cmd_run(args) -> int:
    try:
        scenario = _load_scenario(args)
        window = _parse_window(args.window)
    except ConfigError as exc:
        return _fail_config(str(exc))
    out_csv = os.path.join(args.out, "run.csv")
    out_json = os.path.join(args.out, "metrics.json")
    clash = _ensure_outputs([out_csv, out_json], args.force)
    if clash:
        return _fail_config(clash)
    try:
        records, metrics = sim.run(scenario)
    except DegenerateGamma as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return 3
    if window is not None:
        metrics = sim.compute_metrics(records, window)
    extra = {"controller": scenario.controller, "l_d": scenario.l_d, "seed": scenario.seed}
    _write_run(args.out, "run", records, metrics, extra)
    print(f"wrote {out_csv} ({len(records)} ticks) and {out_json}")
    return 0


def cmd_compare(args) -> int:
    try:
        scenario = _load_scenario(args)
        l_d = sim.eval_number(args.ld)
        window = _parse_window(args.window)
    except ConfigError as exc:
        return _fail_config(str(exc))
    scenario = replace(scenario, l_d=l_d)
    out_files = [os.path.join(args.out, f"{v}.csv") for v in sim.CONTROLLERS]
    out_files.append(os.path.join(args.out, "compare.json"))
    clash = _ensure_outputs(out_files, args.force)
    if clash:
        return _fail_config(clash)
    os.makedirs(args.out, exist_ok=True)
    variants = {}
    for variant in sim.CONTROLLERS:
        try:
            records, metrics = sim.run(replace(scenario, controller=variant))
        except DegenerateGamma as exc:
            print(f"simulation aborted ({variant}): {exc}", file=sys.stderr)
            return 3
        if window is not None:
            metrics = sim.compute_metrics(records, window)
        with open(os.path.join(args.out, f"{variant}.csv"), "w", encoding="utf-8") as f:
            sim.write_log_csv(records, f)
        variants[variant] = metrics.as_dict()
    doc = {
        "l_d": l_d,
        "seed": scenario.seed,
        "window": list(window) if window else None,
        "variants": variants,
    }
    with open(os.path.join(args.out, "compare.json"), "w", encoding="utf-8") as f:
        f.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(variants)} logs and compare.json under {args.out}")
    return 0


def _sweep_token(expr: str) -> str:
    return expr.strip().replace("/", "_").replace("*", "x").replace(" ", "") or "0"


def _run_level(payload):
    scenario, out_dir, extra = payload
    records, metrics = sim.run(scenario)
    _write_run(out_dir, "run", records, metrics, extra)
    return metrics


def cmd_sweep(args) -> int:
    try:
        scenario = _load_scenario(args)
        levels = [(tok, sim.eval_number(tok)) for tok in args.ld.split(",") if tok.strip()]
    except ConfigError as exc:
        return _fail_config(str(exc))
    if not levels:
        return _fail_config("--ld produced no levels")
    sweep_csv = os.path.join(args.out, "sweep.csv")
    outputs = [sweep_csv]
    jobs = []
    for i, (tok, l_d) in enumerate(levels):
        out_dir = os.path.join(args.out, f"ld_{_sweep_token(tok)}")
        outputs.append(os.path.join(out_dir, "run.csv"))
        # One fixed, documented seed per level: base seed + level index.
        level = replace(scenario, l_d=l_d, seed=scenario.seed + i)
        extra = {"controller": level.controller, "l_d": l_d, "seed": level.seed}
        jobs.append((level, out_dir, extra))
    clash = _ensure_outputs(outputs, args.force)
    if clash:
        return _fail_config(clash)
    os.makedirs(args.out, exist_ok=True)

    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_run_level, jobs))
        else:
            results = [_run_level(j) for j in jobs]
    except DegenerateGamma as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return 3

    with open(sweep_csv, "w", encoding="utf-8") as f:
        f.write(SWEEP_CSV_COLUMNS + "\n")
        for (tok, l_d), m in zip(levels, results):
            med = m.ed_convergence_median
            med_txt = "" if med is None or math.isinf(med) else f"{med:.9g}"
            f.write(
                f"{l_d:.9g},{m.eta_lon.mean:.9g},{m.eta_lon.std:.9g},"
                f"{m.eta_lat.mean:.9g},{m.eta_lat.std:.9g},"
                f"{m.a_yc.mean:.9g},{m.a_yc.std:.9g},"
                f"{m.a_zc.mean:.9g},{m.a_zc.std:.9g},{med_txt}\n"
            )
    print(f"wrote {len(levels)} runs and {sweep_csv}")
    return 0


def cmd_gen_path(args) -> int:
    path = generate_nonsmooth_path(
        seed=args.seed,
        segments=args.segments,
        spacing=args.spacing,
        max_turn=sim.eval_number(args.max_turn),
        max_climb=sim.eval_number(args.max_climb),
    )
    if os.path.exists(args.out) and not args.force:
        return _fail_config(f"{args.out} exists; pass --force to overwrite")
    save_path_csv(path, args.out)
    print(f"wrote {len(path)} waypoints to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rllp",
        description="Look-ahead pursuit path-following simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_controller=True):
        p.add_argument("--config", required=True, help="scenario config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        if with_controller:
            p.add_argument("--controller", choices=sim.CONTROLLERS, default=None)
        p.add_argument("--force", action="store_true", help="overwrite existing logs")

    p_run = sub.add_parser("run", help="single scenario run")
    common(p_run)
    p_run.add_argument("--window", default=None, help="metrics window start:end seconds")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run all three controller variants")
    common(p_cmp, with_controller=False)
    p_cmp.add_argument("--ld", default="pi/15", help="disturbance bound (default pi/15)")
    p_cmp.add_argument("--window", default=None, help="metrics window start:end seconds")
    p_cmp.set_defaults(func=cmd_compare)

    p_swp = sub.add_parser("sweep", help="disturbance-bound sweep")
    common(p_swp)
    p_swp.add_argument("--ld", default="0,pi/40,pi/30,pi/20,pi/15,pi/10",
                       help="comma-separated disturbance bounds")
    p_swp.add_argument("--jobs", type=int, default=1, help="concurrent sweep levels")
    p_swp.set_defaults(func=cmd_sweep)

    p_gen = sub.add_parser("gen-path", help="emit a synthetic non-smooth path CSV")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--segments", type=int, default=6)
    p_gen.add_argument("--spacing", type=float, default=200.0)
    p_gen.add_argument("--max-turn", default="pi*5/12")
    p_gen.add_argument("--max-climb", default="pi/22")
    p_gen.add_argument("--force", action="store_true")
    p_gen.set_defaults(func=cmd_gen_path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail_config(str(exc))


if __name__ == "__main__":
    sys.exit(main())
