"""Command-line interface: generate, batch, estimate, stats.

Exit codes: 0 success, 1 usage or parameter error, 2 runtime error (IO,
depth-limit, inconsistent files). The default seed comes from --seed, then the
HIERGEN_SEED environment variable, then the params file, then 0. Every command
is deterministic given its flags; --jobs changes scheduling only, never
numbers.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .analytics import (
    child_selection_variance,
    expected_child_selection,
    expected_retention,
    expected_sigma_ratio,
    predict_regime,
    retention_variance,
    simulate_child_selection_counts,
    simulate_depth_counts,
    simulate_sigma_ratios,
)
from .errors import ConsistencyError, HiergenError, ParameterError, ParseError
from .experiments import run_batch
from .generator import generate, prune
from .metrics import HierarchyStats, compute_stats
from .model import GeneratorParams, check_partition, validate
from .postprocess import fit_box_transform, reassign, rescale
from .presets import PRESET_NAMES, parse_preset_selection, preset
from .sampling import RandomSource

ENV_SEED = "HIERGEN_SEED"

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # default argparse exits with 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=PRESET_NAMES, help="bundled parameter set")
    p.add_argument("--params-file", type=Path, help="key=value parameter file")
    p.add_argument("--n", type=int, help="number of points")
    p.add_argument("--d", type=int, help="number of dimensions")
    p.add_argument("--alpha0", type=float, help="depth control: stop parameter at the root")
    p.add_argument("--lambda", dest="lam", type=float, help="depth control: per-level decay")
    p.add_argument("--gamma", type=float, help="width control: child stick parameter")
    p.add_argument("--p", type=float, help="sigma-scaling Beta shape p")
    p.add_argument("--q", type=float, help="sigma-scaling Beta shape q")
    p.add_argument("--sigma-min", type=float, help="lower clamp on child sigmas")
    p.add_argument("--sigma-max", type=float, help="root sigma per dimension")
    p.add_argument("--max-depth", type=int, help="hard routing depth guard")
    p.add_argument("--seed", type=int, help=f"RNG seed (default: ${ENV_SEED}, then 0)")


def _env_seed() -> int | None:
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ParameterError(f"{ENV_SEED} must be an integer, got {raw!r}", ("seed",))


def _flag_overrides(args) -> dict:
    overrides = {}
    for field in ("n", "d", "alpha0", "lam", "gamma", "p", "q", "sigma_min", "sigma_max", "max_depth"):
        value = getattr(args, field)
        if value is not None:
            overrides[field] = value
    seed = args.seed if args.seed is not None else _env_seed()
    if seed is not None:
        overrides["seed"] = seed
    return overrides


def _resolve_params(args) -> GeneratorParams:
    if args.preset and args.params_file:
        raise ParameterError("--preset and --params-file are mutually exclusive", ("preset",))
    if args.params_file:
        base = io.read_params(args.params_file)
    elif args.preset:
        base = preset(args.preset)
    else:
        required = {"n": args.n, "d": args.d, "alpha0": args.alpha0, "lam": args.lam, "gamma": args.gamma}
        missing = [k for k, v in required.items() if v is None]
        if missing:
            flags = ", ".join("--lambda" if k == "lam" else f"--{k}" for k in missing)
            raise ParameterError(f"missing required flags: {flags}", tuple(missing))
        base = GeneratorParams(n=args.n, d=args.d, alpha0=args.alpha0, lam=args.lam, gamma=args.gamma)
    params = GeneratorParams(**{**base.__dict__, **_flag_overrides(args)})
    validate(params)
    return params


def _parse_pairs(text: str, what: str) -> list[tuple[float, float]]:
    pairs = []
    for piece in text.split(","):
        first, sep, second = piece.partition(":")
        if not sep:
            raise ParameterError(f"bad {what} component {piece!r}, expected a:b", (what,))
        try:
            pairs.append((float(first), float(second)))
        except ValueError:
            raise ParameterError(f"bad {what} component {piece!r}", (what,))
    return pairs


def format_stats_line(stats: HierarchyStats, n_points: int) -> str:
    return (
        f"points={n_points} N={stats.node_count} L={stats.leaf_count} D={stats.depth} "
        f"B={stats.breadth_mean:.6g}±{stats.breadth_std:.6g} "
        f"P={stats.path_mean:.6g}±{stats.path_std:.6g}"
    )


# -- generate -------------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.rescale and args.fit_box:
        raise ParameterError("--rescale and --fit-box are mutually exclusive", ("rescale",))
    params = _resolve_params(args)
    hierarchy, points = generate(params)
    if args.reassign:
        hierarchy, points = reassign(hierarchy, points)
    if not args.no_prune:
        hierarchy = prune(hierarchy)
    if args.rescale:
        pairs = _parse_pairs(args.rescale, "rescale")
        scale = [s for s, _ in pairs]
        offset = [o for _, o in pairs]
        hierarchy, points = rescale(hierarchy, points, scale, offset)
    elif args.fit_box:
        pairs = _parse_pairs(args.fit_box, "fit-box")
        low = [a for a, _ in pairs]
        high = [b for _, b in pairs]
        scale, offset = fit_box_transform(points, low, high)
        hierarchy, points = rescale(hierarchy, points, scale, offset)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    io.write_points(points, outdir / "points.csv")
    io.write_hierarchy(hierarchy, outdir / "hierarchy.csv")
    print(format_stats_line(compute_stats(hierarchy), len(points)))
    return 0


# -- batch ----------------------------------------------------------------------


def cmd_batch(args) -> int:
    if args.replicates < 1:
        raise ParameterError("--replicates must be >= 1", ("replicates",))
    if args.both and args.reassign:
        raise ParameterError("--both already includes the reassigned variant", ("both",))
    overrides = _flag_overrides(args)
    if args.presets:
        names = parse_preset_selection(args.presets)
        sets = [
            (name, GeneratorParams(**{**preset(name).__dict__, **overrides}))
            for name in names
        ]
    elif args.params_file:
        params = io.read_params(args.params_file)
        sets = [(args.params_file.stem, GeneratorParams(**{**params.__dict__, **overrides}))]
    else:
        raise ParameterError("batch needs --presets or --params-file", ("presets",))
    for _, params in sets:
        validate(params)
    variants = "both" if args.both else ("reassigned" if args.reassign else "raw")
    summaries = run_batch(sets, args.replicates, variants=variants, jobs=args.jobs)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    io.write_histograms(summaries, outdir / "summary.csv")
    for s in summaries:
        sc = s.scalars
        print(
            f"{s.label}: N={sc.nodes_mean:.6g}±{sc.nodes_std:.6g} "
            f"L={sc.leaves_mean:.6g}±{sc.leaves_std:.6g} "
            f"D={sc.depth_mean:.6g}±{sc.depth_std:.6g} "
            f"B={sc.breadth_mean:.6g}±{sc.breadth_std:.6g} "
            f"P={sc.path_mean:.6g}±{sc.path_std:.6g}"
        )
    if args.figures:
        from .plots import render_figures

        for path in render_figures(summaries, outdir / "figures"):
            print(f"wrote {path}")
    return 0


# -- estimate -------------------------------------------------------------------


def _verify_line(expected: float, observed: float, se: float) -> str:
    z = (observed - expected) / se if se > 0 else 0.0
    return f" mc={observed:.6g} se={se:.3g} z={z:+.2f}"


def cmd_estimate(args) -> int:
    seed = args.seed if args.seed is not None else (_env_seed() or 0)
    rng = RandomSource(seed)
    wrote = False
    if args.alpha0 is not None and args.lam is not None:
        wrote = True
        counts = None
        if args.verify:
            scan_gamma = 0.2 if args.gamma is None else args.gamma  # depth law is gamma-free
            counts = simulate_depth_counts(args.alpha0, args.lam, scan_gamma, args.mc_samples, rng.fork(0))
        for level in range(args.levels):
            line = (
                f"retention level {level}: expected={expected_retention(args.alpha0, args.lam, level):.6g} "
                f"variance={retention_variance(args.alpha0, args.lam, level):.6g}"
            )
            if counts is not None:
                freq = (counts[level] if level < len(counts) else 0) / args.mc_samples
                se = max(np.sqrt(freq * (1 - freq) / args.mc_samples), 1e-12)
                line += _verify_line(expected_retention(args.alpha0, args.lam, level), freq, se)
            print(line)
    if args.gamma is not None:
        wrote = True
        counts = None
        if args.verify:
            counts = simulate_child_selection_counts(args.gamma, args.mc_samples, rng.fork(1))
        for index in range(1, args.indices + 1):
            line = (
                f"child index {index}: expected={expected_child_selection(args.gamma, index):.6g} "
                f"variance={child_selection_variance(args.gamma, index):.6g}"
            )
            if counts is not None:
                freq = (counts[index - 1] if index - 1 < len(counts) else 0) / args.mc_samples
                se = max(np.sqrt(freq * (1 - freq) / args.mc_samples), 1e-12)
                line += _verify_line(expected_child_selection(args.gamma, index), freq, se)
            print(line)
    if args.p is not None and args.q is not None:
        wrote = True
        mean, variance = expected_sigma_ratio(args.p, args.q)
        line = f"sigma ratio: mean={mean:.6g} variance={variance:.6g}"
        if args.verify:
            ratios = simulate_sigma_ratios(args.p, args.q, min(args.mc_samples, 100_000), rng.fork(2))
            se = float(ratios.std(ddof=1) / np.sqrt(len(ratios)))
            line += _verify_line(mean, float(ratios.mean()), se)
        print(line)
    if args.alpha0 is not None and args.lam is not None and args.gamma is not None:
        regime = predict_regime(args.alpha0, args.lam, args.gamma)
        print(f"regime: depth={regime.depth} width={regime.width} ({regime.description})")
    if not wrote:
        raise ParameterError(
            "estimate needs --alpha0/--lambda, --gamma, or --p/--q", ("estimate",)
        )
    return 0


# -- stats ----------------------------------------------------------------------


def cmd_stats(args) -> int:
    hierarchy, recorded_counts = io.read_hierarchy(args.hierarchy)
    points = io.read_points(args.points)
    if len(points) and points.features.shape[1] != hierarchy.params.d:
        raise ConsistencyError(
            f"points are {points.features.shape[1]}-dimensional, hierarchy is {hierarchy.params.d}"
        )
    for pid, owner in zip(points.ids, points.owners):
        if owner not in hierarchy.nodes:
            raise ConsistencyError(
                f"point {pid} references missing node {io.format_path(owner)}"
            )
        hierarchy.nodes[owner].point_ids.append(int(pid))
    for path, recorded in recorded_counts.items():
        actual = len(hierarchy.nodes[path].point_ids)
        if actual != recorded:
            raise ConsistencyError(
                f"node {io.format_path(path)} records {recorded} points, files hold {actual}"
            )
    check_partition(hierarchy, points)
    print(format_stats_line(compute_stats(hierarchy), len(points)))
    return 0


# -- wiring ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hiergen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate one dataset + hierarchy")
    _add_param_flags(g)
    g.add_argument("--out", required=True, type=Path, help="output directory")
    g.add_argument("--no-prune", action="store_true", help="keep never-populated subtrees")
    g.add_argument("--reassign", action="store_true", help="apply likelihood reassignment")
    g.add_argument("--rescale", help="per-dimension scale:offset pairs, comma separated")
    g.add_argument("--fit-box", help="per-dimension low:high box to map the data onto")
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("batch", help="replicate parameter sets and aggregate")
    _add_param_flags(b)
    b.add_argument("--presets", help="comma list and/or ranges, e.g. s00..s07")
    b.add_argument("--replicates", type=int, default=100, help="replicates per set")
    b.add_argument("--both", action="store_true", help="report raw and reassigned variants")
    b.add_argument("--reassign", action="store_true", help="report the reassigned variant only")
    b.add_argument("--jobs", type=int, default=1, help="worker processes")
    b.add_argument("--out", required=True, type=Path, help="output directory")
    b.add_argument(
        "--figures",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="render histogram figures next to summary.csv",
    )
    b.set_defaults(func=cmd_batch)

    e = sub.add_parser("estimate", help="closed-form structure estimates")
    e.add_argument("--alpha0", type=float)
    e.add_argument("--lambda", dest="lam", type=float)
    e.add_argument("--gamma", type=float)
    e.add_argument("--p", type=float)
    e.add_argument("--q", type=float)
    e.add_argument("--levels", type=int, default=4, help="retention levels to print")
    e.add_argument("--indices", type=int, default=4, help="child indices to print")
    e.add_argument("--verify", action="store_true", help="add Monte-Carlo comparisons")
    e.add_argument("--mc-samples", type=int, default=1_000_000)
    e.add_argument("--seed", type=int)
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("stats", help="recompute metrics from serialized files")
    s.add_argument("--points", required=True, type=Path)
    s.add_argument("--hierarchy", required=True, type=Path)
    s.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # argparse help/usage paths
        code = exc.code if isinstance(exc.code, int) else USAGE_ERROR
        return code
    except (ParameterError, ParseError) as exc:
        print(f"hiergen: parameter error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except HiergenError as exc:
        print(f"hiergen: error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR
    except OSError as exc:
        print(f"hiergen: io error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
