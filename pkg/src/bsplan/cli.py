"""Command-line front end: generate, plan, evaluate, render, reproduce.

Stages talk to each other only through files. Station files carry their
scenario metadata as ``# key,value`` comment lines, so later stages can pick
up the roi and alpha without repeating them on the command line.

Exit codes: 0 ok, 1 other planner error, 2 usage/parse/io error, 3 invalid
parameter value, 4 degenerate or empty station set, 5 inconsistent roi.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import __version__
from .errors import (ConfigError, DegenerateInput, DuplicatePoint, EmptySet, InvalidParameter,
                     InvalidSpec, MismatchedConfig, PlannerError)
from .geometry import delaunay_triangulate
from .metrics import compare_scenarios, evaluate, report_to_csv, report_to_text, set_threads
from .optimizer import DescentConfig, candidate_minima, format_candidates
from .placement import PlacementPlan, format_plan, read_plan, run_heuristic
from .radio import RadioParams
from .render import LAYERS, RenderSpec, output_name, render_scenario, write_svg
from .scenario import (RNG_ALGORITHM, Rect, ScenarioConfig, StationSet, generate_ppp,
                       load_config, parse_stations, write_stations)

log = logging.getLogger("bsplan")

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_DEGENERATE = 4
EXIT_MISMATCH = 5


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ConfigError, InvalidSpec, OSError)):
        return EXIT_USAGE
    if isinstance(exc, InvalidParameter):
        return EXIT_INVALID
    if isinstance(exc, (DegenerateInput, DuplicatePoint, EmptySet)):
        return EXIT_DEGENERATE
    if isinstance(exc, MismatchedConfig):
        return EXIT_MISMATCH
    return EXIT_OTHER


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(f"error[E_USAGE]: {message}\n")
        raise SystemExit(EXIT_USAGE)


class _Run:
    """Collects timings and outputs for the manifest."""

    def __init__(self, command: str, out: Path, name: str):
        self.command = command
        self.out = out
        self.name = name
        self.timings: dict[str, float] = {}
        self.outputs: list[str] = []
        self.config: dict = {}
        out.mkdir(parents=True, exist_ok=True)

    def stage(self, label):
        run = self

        class _Timer:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                run.timings[label] = round(time.perf_counter() - self.t0, 6)

        return _Timer()

    def write(self, filename: str, text: str) -> Path:
        path = self.out / filename
        path.write_text(text)
        self.outputs.append(filename)
        return path

    def manifest(self) -> Path:
        doc = {
            "command": self.command,
            "config": self.config,
            "rng": RNG_ALGORITHM,
            "version": __version__,
            "timings_s": self.timings,
            "outputs": self.outputs,
        }
        path = self.out / f"{self.name}.{self.command}.manifest.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return path


# ---- shared argument handling

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="scenario config file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--name", default="scenario", help="file name prefix for outputs")
    p.add_argument("--threads", type=int, help="cap on worker threads")


def _add_radio(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, help="path-loss exponent (> 2)")
    p.add_argument("--roi", help="region of interest x0,y0,x1,y1")


def _add_descent(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("descent")
    g.add_argument("--step-dt", type=float)
    g.add_argument("--max-iters", type=int)
    g.add_argument("--grad-tol", type=float)
    g.add_argument("--move-tol", type=float)
    g.add_argument("--shrink-factor", type=float)
    g.add_argument("--no-multistart", action="store_true", help="start only from the centroid")


def _config(args) -> ScenarioConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ScenarioConfig()
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "resolution", None) is not None:
        changes["grid_resolution"] = args.resolution
    if getattr(args, "beta", None) is not None:
        changes["beta"] = args.beta
    if getattr(args, "k", None) is not None:
        changes["k_new"] = args.k
    if getattr(args, "alpha", None) is not None:
        changes["alpha"] = args.alpha
    if getattr(args, "roi", None):
        changes["roi"] = roi = Rect.parse(args.roi)
        changes["extent"] = _cover(cfg.extent, roi)
    if changes:
        cfg = dataclasses.replace(cfg, **changes)
    return cfg


def _descent(args, base: DescentConfig) -> DescentConfig:
    changes = {}
    for flag in ("step_dt", "max_iters", "grad_tol", "move_tol", "shrink_factor"):
        v = getattr(args, flag, None)
        if v is not None:
            changes[flag] = v
    if getattr(args, "no_multistart", False):
        changes["multistart"] = False
    return dataclasses.replace(base, **changes) if changes else base


def _config_echo(cfg: ScenarioConfig, descent: DescentConfig | None = None) -> dict:
    d = {
        "extent": str(cfg.extent),
        "roi": str(cfg.roi),
        "lambda": cfg.lambda_,
        "seed": cfg.seed,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "k_new": cfg.k_new,
        "grid_resolution": cfg.grid_resolution,
    }
    descent = descent or cfg.descent
    for f in dataclasses.fields(DescentConfig):
        d[f"descent.{f.name}"] = getattr(descent, f.name)
    return d


def _header_meta(text: str) -> dict[str, str]:
    meta = {}
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition(",")
            if sep:
                meta[key.strip()] = value.strip()
    return meta


def _load_stations(path: Path, alpha: float | None):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read station file {path}: {exc}") from None
    meta = _header_meta(text)
    if alpha is None:
        alpha = float(meta["alpha"]) if "alpha" in meta else 4.0
    return parse_stations(text, alpha), meta


def _station_header(cfg: ScenarioConfig) -> str:
    return "\n".join([
        f"extent,{cfg.extent}",
        f"roi,{cfg.roi}",
        f"lambda,{cfg.lambda_!r}",
        f"seed,{cfg.seed}",
        f"alpha,{cfg.alpha!r}",
        f"rng,{RNG_ALGORITHM}",
    ])


def _resolve_inputs(args, need_stations=True):
    """Config with roi/alpha filled from flags, then config file, then station metadata."""
    cfg = _config(args)
    stations = meta = None
    if need_stations:
        if args.stations is None:
            raise ConfigError("--stations is required")
        alpha = args.alpha if args.alpha is not None else (cfg.alpha if args.config else None)
        stations, meta = _load_stations(args.stations, alpha)
        changes = {"alpha": stations.alpha}
        if not args.roi and not args.config and "roi" in meta:
            changes["roi"] = Rect.parse(meta["roi"])
            if not cfg.extent.contains_rect(changes["roi"]):
                changes["extent"] = changes["roi"]
        cfg = dataclasses.replace(cfg, **changes)
    return cfg, stations, meta


def _warn_buffer(cfg: ScenarioConfig) -> None:
    if not cfg.edge_buffer_ok:
        spacing = 1.0 / math.sqrt(cfg.lambda_)
        sys.stderr.write(f"warning[W_EDGE_BUFFER]: roi is closer than one mean spacing "
                         f"({spacing:.4g}) to the extent border\n")


def _require_stations(stations: StationSet, minimum: int) -> None:
    if len(stations) == 0:
        raise EmptySet("station set is empty")
    if len(stations) < minimum:
        raise DegenerateInput(f"need at least {minimum} stations, got {len(stations)}")


# ---- stages

def _generate(run: _Run, cfg: ScenarioConfig) -> tuple[StationSet, str]:
    _warn_buffer(cfg)
    with run.stage("generate"):
        stations = generate_ppp(cfg.extent, cfg.lambda_, cfg.seed, cfg.alpha)
    fname = f"{run.name}.stations.csv"
    path = run.out / fname
    write_stations(path, stations, _station_header(cfg))
    run.outputs.append(fname)
    return stations, fname


def _plan(run: _Run, stations, cfg: ScenarioConfig, heuristic: int, descent: DescentConfig):
    if heuristic not in (1, 2):
        raise ConfigError(f"unknown heuristic {heuristic} (expected 1 or 2)")
    _require_stations(stations, 3)
    with run.stage(f"plan_h{heuristic}"):
        plan = run_heuristic(heuristic, stations, cfg.roi, cfg.k_new, descent)
    run.write(f"{run.name}.h{heuristic}.plan.csv", format_plan(plan))
    parts = []
    for i, pool in enumerate(plan.rounds, 1):
        parts.append(f"# round,{i}\n" + format_candidates(pool))
    run.write(f"{run.name}.h{heuristic}.candidates.csv", "".join(parts))
    if plan.short:
        sys.stderr.write(f"warning[W_SHORT_PLAN]: heuristic {heuristic} found "
                         f"{len(plan)} of {plan.requested} sites\n")
    return plan


def _evaluate(run: _Run, stations, cfg: ScenarioConfig, plans: list[PlacementPlan]):
    if len(stations) == 0:
        raise EmptySet("station set is empty")
    params = RadioParams(alpha=stations.alpha, beta=cfg.beta)
    res = cfg.grid_resolution
    with run.stage("evaluate"):
        base = evaluate(stations, cfg.roi, params, res)
        reports = [evaluate(stations.with_added(p.added), cfg.roi, params, res) for p in plans]
    if len(plans) == 2:
        by_id = sorted(zip(plans, reports), key=lambda pr: pr[0].heuristic_id)
        cmp = compare_scenarios(base, by_id[0][1], by_id[1][1])
        text, csv = cmp.to_text(), cmp.to_csv()
    else:
        text = report_to_text(base, "Scenario 0")
        csv = report_to_csv(base)
        for p, r in zip(plans, reports):
            text += "\n" + report_to_text(r, f"Heuristic {p.heuristic_id}")
    run.write(f"{run.name}.report.txt", text)
    run.write(f"{run.name}.report.csv", csv)
    return text


def _render(run: _Run, stations, cfg: ScenarioConfig, layers, plan, descent, spec_kw=None):
    spec = RenderSpec(layers=tuple(layers), **(spec_kw or {}))
    tri = cands = None
    if "triangulation" in layers or "candidates" in layers or "descent_paths" in layers:
        _require_stations(stations, 3)
        tri = delaunay_triangulate(stations.positions)
    with run.stage(f"render_{spec.layerset}"):
        if "candidates" in layers or "descent_paths" in layers:
            cands = candidate_minima(tri, stations, cfg.roi, descent.resolve_for(stations))
        params = RadioParams(alpha=stations.alpha, beta=cfg.beta)
        doc = render_scenario(stations, cfg.roi, tri, cands, plan, params, spec, title=run.name)
    fname = output_name(run.name, spec)
    write_svg(run.out / fname, doc)
    run.outputs.append(fname)
    return fname


def _parse_layers(text: str) -> list[str]:
    layers = [s.strip() for s in text.split(",") if s.strip()]
    if not layers:
        raise InvalidSpec("no layers enabled")
    return layers


def _check_plan_roi(cfg: ScenarioConfig, plans: list[PlacementPlan], roi_given: bool) -> ScenarioConfig:
    rois = {p.roi for p in plans if p.roi is not None}
    if len(rois) > 1:
        raise MismatchedConfig("plans were made for different regions of interest")
    if rois:
        plan_roi = rois.pop()
        if roi_given and plan_roi != cfg.roi:
            raise MismatchedConfig(f"--roi {cfg.roi} differs from the plan's roi {plan_roi}")
        if not roi_given:
            cfg = dataclasses.replace(cfg, roi=plan_roi, extent=_cover(cfg.extent, plan_roi))
    return cfg


def _cover(a: Rect, b: Rect) -> Rect:
    return Rect(min(a.min_x, b.min_x), min(a.min_y, b.min_y),
                max(a.max_x, b.max_x), max(a.max_y, b.max_y))


# ---- commands

def cmd_generate(args) -> int:
    cfg = _config(args)
    run = _Run("generate", args.out, args.name)
    run.config = _config_echo(cfg)
    stations, fname = _generate(run, cfg)
    run.manifest()
    print(f"{run.out / fname}: {len(stations)} stations")
    return EXIT_OK


def cmd_plan(args) -> int:
    cfg, stations, _ = _resolve_inputs(args)
    descent = _descent(args, cfg.descent)
    run = _Run("plan", args.out, args.name)
    run.config = _config_echo(cfg, descent) | {"heuristic": args.heuristic}
    plan = _plan(run, stations, cfg, args.heuristic, descent)
    run.manifest()
    print(format_plan(plan), end="")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg, stations, _ = _resolve_inputs(args)
    plans = [read_plan(p) for p in args.plan or []]
    if len(plans) > 2:
        raise ConfigError("at most two plans can be compared")
    cfg = _check_plan_roi(cfg, plans, bool(args.roi))
    run = _Run("evaluate", args.out, args.name)
    run.config = _config_echo(cfg) | {"plans": [str(p) for p in args.plan or []]}
    text = _evaluate(run, stations, cfg, plans)
    run.manifest()
    print(text, end="")
    return EXIT_OK


def cmd_render(args) -> int:
    layers = _parse_layers(args.layers)
    cfg, stations, _ = _resolve_inputs(args)
    plans = [read_plan(p) for p in args.plan or []]
    if len(plans) > 1:
        raise ConfigError("render takes at most one plan")
    cfg = _check_plan_roi(cfg, plans, bool(args.roi))
    descent = _descent(args, cfg.descent)
    run = _Run("render", args.out, args.name)
    run.config = _config_echo(cfg, descent) | {"layers": layers}
    if len(stations) == 0:
        raise EmptySet("station set is empty")
    spec_kw = {"width": args.width, "height": args.height,
               "raster_resolution": args.raster_resolution}
    fname = _render(run, stations, cfg, layers, plans[0] if plans else None, descent, spec_kw)
    run.manifest()
    print(run.out / fname)
    return EXIT_OK


FIGURES = (
    ("reception_areas", "stations", "roi"),
    ("triangulation", "stations", "roi", "descent_paths", "candidates"),
    ("reception_areas", "stations", "roi", "added_stations"),
)


def cmd_reproduce(args) -> int:
    """Single-seed run of the reference experiment, every stage written to --out."""
    cfg = _config(args)
    descent = _descent(args, cfg.descent)
    run = _Run("reproduce", args.out, args.name)
    run.config = _config_echo(cfg, descent)
    stations, _ = _generate(run, cfg)
    plans = [_plan(run, stations, cfg, h, descent) for h in (1, 2)]
    text = _evaluate(run, stations, cfg, plans)
    spec_kw = {"raster_resolution": args.raster_resolution}
    for layers in FIGURES:
        plan = plans[1] if "added_stations" in layers else None
        _render(run, stations, cfg, layers, plan, descent, spec_kw)
    run.manifest()
    print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bsplan", description="Place new base stations at interference minima.")
    parser.add_argument("--version", action="version", version=f"bsplan {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="draw a Poisson station layout")
    _add_common(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("plan", help="choose new sites with heuristic 1 or 2")
    _add_common(p)
    _add_radio(p)
    _add_descent(p)
    p.add_argument("--stations", type=Path, required=True)
    p.add_argument("--k", type=int, help="number of sites to add")
    p.add_argument("--heuristic", type=int, default=2, help="1 or 2")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("evaluate", help="coverage and capacity, optionally after plans")
    _add_common(p)
    _add_radio(p)
    p.add_argument("--stations", type=Path, required=True)
    p.add_argument("--plan", type=Path, action="append", help="plan file (repeatable)")
    p.add_argument("--beta", type=float)
    p.add_argument("--resolution", type=int, help="grid samples per axis")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("render", help="draw an SVG of the scenario")
    _add_common(p)
    _add_radio(p)
    _add_descent(p)
    p.add_argument("--stations", type=Path, required=True)
    p.add_argument("--plan", type=Path, action="append")
    p.add_argument("--beta", type=float)
    p.add_argument("--layers", default="reception_areas,stations,roi,added_stations",
                   help=f"comma-separated subset of {','.join(LAYERS)}")
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=800)
    p.add_argument("--raster-resolution", type=int, default=250)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("reproduce", help="generate, plan both heuristics, evaluate, render")
    _add_common(p)
    _add_descent(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--resolution", type=int)
    p.add_argument("--raster-resolution", type=int, default=250)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        set_threads(getattr(args, "threads", None))
        return args.func(args)
    except (PlannerError, OSError) as exc:
        code = getattr(exc, "code", "E_IO")
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        sys.stderr.write(f"error[{code}]: {msg}\n")
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
