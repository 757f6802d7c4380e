"""``crowdsim`` command line."""

from __future__ import annotations

import argparse
import csv
import glob
import io
import json
import math
import sys
from dataclasses import asdict, fields
from pathlib import Path

from . import data
from .bench import BenchConfig, bench_scaling, eval_dynamics, eval_nav
from .dynamics import SimParams
from .generator import GeneratorConfig, generate_scenes
from .geometry import SceneError, load_scene, save_scene
from .integrator import run, write_events_json, write_timing_json, write_trajectory_csv
from .metrics import EpisodeReport, MetricsReport, RewardParams, rows_to_csv

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_pair(text: str) -> tuple[float, float]:
    try:
        parts = [float(t) for t in str(text).split(",")]
    except ValueError:
        parts = []
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}")
    return parts[0], parts[1]


def _int_pair(text: str) -> tuple[int, int]:
    lo, hi = _float_pair(text)
    if lo != int(lo) or hi != int(hi):
        raise argparse.ArgumentTypeError(f"expected integers 'lo,hi', got {text!r}")
    return int(lo), int(hi)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults (flags win)")
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="crowdsim", description="Crowd dynamics simulator and benchmarks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-scenes", parents=[common], help="generate a scene suite")
    g.add_argument("--count", type=int, default=20)
    g.add_argument("--density", type=_float_pair, default=(0.1, 0.5), metavar="LO,HI")
    g.add_argument("--density-mean", type=float, default=0.189,
                   help="target mean density; a negative value samples uniformly")
    g.add_argument("--area", type=_float_pair, default=(10.0, 300.0), metavar="LO,HI")
    g.add_argument("--obstacles", type=_int_pair, default=(0, 3), metavar="LO,HI")
    g.add_argument("--episodes", type=int, default=3, help="navigation episodes per scene")
    g.add_argument("--prefix", default="scene")
    g.add_argument("--out", required=True, help="output directory")

    r = sub.add_parser("run", parents=[common], help="simulate one scene")
    r.add_argument("--scene", required=True)
    r.add_argument("--steps", type=int, default=500)
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--no-timing", action="store_true", help="do not write timing.json")

    def scenes(sp, default_glob):
        sp.add_argument("--scene-glob", default=default_glob)
        sp.add_argument("--scene", action="append", default=[], help="explicit scene file (repeatable)")

    def output(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="json")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--jobs", type=int, default=1)

    d = sub.add_parser("eval-dynamics", parents=[common], help="CAR/GR/mCT over a scene suite")
    scenes(d, data.suite_glob())
    d.add_argument("--steps", type=int, default=500)
    d.add_argument("--no-timing", action="store_true", help="omit wall-clock fields")
    output(d)

    b = sub.add_parser("bench-scaling", parents=[common], help="per-human cost versus crowd size")
    b.add_argument("--humans", type=_int_list, default=[5, 10, 20, 40])
    b.add_argument("--trials", type=int, default=5)
    b.add_argument("--steps", type=int, default=200)
    b.add_argument("--area", type=float, default=200.0)
    b.add_argument("--no-timing", action="store_true", help="omit wall-clock fields")
    output(b)

    n = sub.add_parser("eval-nav", parents=[common], help="scripted point-goal navigation")
    scenes(n, str(data.scenes_dir() / data.NAV_DENSITY / "*.json"))
    n.add_argument("--policy", default="greedy")
    n.add_argument("--episodes", type=int, default=None, help="episodes per scene (default: all)")
    n.add_argument("--rc", type=float, default=RewardParams().r_collision, help="collision reward")
    n.add_argument("--log", help="write per-step JSON lines here")
    output(n)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.config}: not valid JSON ({exc})") from exc
    if not isinstance(cfg, dict):
        raise UsageError(f"{args.config}: expected a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions} | {"params"}
    unknown = sorted(set(k.replace("-", "_") for k in cfg) - known)
    if unknown:
        raise UsageError(f"{args.config}: unknown keys {', '.join(unknown)}")
    defaults = {}
    for key, value in cfg.items():
        key = key.replace("-", "_")
        action = next((a for a in sub._actions if a.dest == key), None)
        if action is not None and action.type is not None and isinstance(value, (str, int, float)):
            value = action.type(value) if isinstance(value, str) else value
        if isinstance(value, list) and key in ("density", "area", "obstacles"):
            value = tuple(value)
        defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _sim_params(args) -> SimParams:
    overrides = getattr(args, "params", None) or {}
    if not isinstance(overrides, dict):
        raise UsageError("config key 'params' must be an object")
    names = {f.name for f in fields(SimParams)} - {"contact"}
    bad = sorted(set(overrides) - names)
    if bad:
        raise UsageError(f"unknown simulation parameters: {', '.join(bad)}")
    return SimParams(**overrides)


def _scene_paths(args) -> list[str]:
    paths = list(args.scene) if args.scene else sorted(glob.glob(args.scene_glob))
    if not paths:
        raise UsageError(f"no scenes match {args.scene_glob!r}")
    return paths


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def cmd_gen_scenes(args) -> int:
    lo, hi = args.density
    mean = None if args.density_mean < 0 or lo == hi else args.density_mean
    cfg = GeneratorConfig(
        count=args.count, density_range=(lo, hi), density_mean=mean, area_range=args.area,
        obstacle_count_range=args.obstacles, episodes_per_scene=args.episodes, seed=args.seed,
        prefix=args.prefix,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for scene in generate_scenes(cfg):
        save_scene(scene, out / f"{scene.name}.json")
    return EXIT_OK


def cmd_run(args) -> int:
    if args.steps < 0:
        raise UsageError("steps must be non-negative")
    scene = load_scene(args.scene)
    state, log = run(scene, _sim_params(args), args.steps, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(log, out / "trajectory.csv")
    write_events_json(log, out / "events.json")
    if not args.no_timing:
        write_timing_json(log, out / "timing.json")
    return EXIT_OK


DYNAMICS_HEADER = ("scene", "n_humans", "steps", "car", "gr", "mct_seconds",
                   "overlap_steps", "reached", "flag")


def cmd_eval_dynamics(args) -> int:
    rows, agg = eval_dynamics(_scene_paths(args), args.steps, args.seed, _sim_params(args), args.jobs)
    timing = not args.no_timing

    def line(r, flag=""):
        return (r.scene, r.n_humans, r.steps, r.car, r.gr, r.mct if timing else None,
                r.overlap_steps, r.reached, flag)

    flag = "CAR<100" if agg.car < 100.0 else ""
    if args.format == "csv":
        text = _csv(DYNAMICS_HEADER, [line(r) for r in rows] + [line(agg, flag)])
    else:
        report = json.loads(MetricsReport(agg.car, agg.gr, agg.mct if timing else None).to_json())
        report["car_below_100"] = bool(flag)
        report["scenes"] = [dict(zip(DYNAMICS_HEADER[:-1], line(r)[:-1])) for r in rows]
        text = json.dumps(report, indent=1) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _finite(d: dict) -> dict:
    # JSON has no NaN; an undefined R² is written as null
    return {k: None if isinstance(v, float) and math.isnan(v) else v for k, v in d.items()}


def cmd_bench_scaling(args) -> int:
    cfg = BenchConfig(tuple(args.humans), args.trials, args.steps, args.seed, args.area)
    timing = not args.no_timing
    res = bench_scaling(cfg, _sim_params(args), args.jobs, timing)
    fit = res.fit
    if args.format == "csv":
        text = _csv(("n", "trials", "steps", "mct_mean", "mct_std", "mct_median", "digest"),
                    [(r.n, r.trials, r.steps, r.mct_mean, r.mct_std, r.mct_median, r.digest)
                     for r in res.rows])
        if fit is not None:
            text += "\n" + _csv(("slope", "intercept", "r2", "degenerate", "mct_ratio"),
                                [(fit.slope, fit.intercept, fit.r2, fit.degenerate, res.mct_ratio)])
    else:
        text = json.dumps({
            "rows": [asdict(r) for r in res.rows],
            "fit": None if fit is None else _finite(asdict(fit)),
            "mct_ratio": res.mct_ratio,
        }, indent=1) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_eval_nav(args) -> int:
    reward = RewardParams(r_collision=args.rc)
    res = eval_nav(_scene_paths(args), args.policy, args.episodes, args.seed, _sim_params(args),
                   reward, args.jobs, want_log=bool(args.log))
    s = res.summary
    if args.format == "csv":
        text = rows_to_csv(res.episodes, EpisodeReport)
    else:
        report = json.loads(MetricsReport(episodes=res.episodes).to_json())
        report["summary"] = asdict(s)
        report["policy"] = args.policy
        report["r_collision"] = args.rc
        text = json.dumps(report, indent=1) + "\n"
    _emit(text, args.out)
    if args.log:
        _emit("".join(res.logs), args.log)
    return EXIT_OK


COMMANDS = {
    "gen-scenes": cmd_gen_scenes,
    "run": cmd_run,
    "eval-dynamics": cmd_eval_dynamics,
    "bench-scaling": cmd_bench_scaling,
    "eval-nav": cmd_eval_nav,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return COMMANDS[args.command](args)
    except (SceneError, ValueError, TypeError) as exc:
        print(f"crowdsim: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"crowdsim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
