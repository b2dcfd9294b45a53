"""Command-line front end.

One binary, nine subcommands: opcount, space, optimize, oracle, compare,
simulate, calibrate, microbench, gen-code. Exit codes: 0 success, 1 usage
error, 2 invalid input, 3 runtime failure. All stdout output is
deterministic for identical inputs, config, and seed; progress chatter
goes to stderr under --verbose.
"""
from __future__ import annotations

import argparse
import csv
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .codegen import emit, render
from .config import CostModelConfig, load_config
from .costmodel import predict_schedule
from .errors import (
    DegenerateDataError,
    DLFusionError,
    DomainError,
    InsufficientDataError,
    NonPowerOfTwoError,
    NotComputeLayerError,
    SchemaError,
    SpaceTooLargeError,
    ValidationError,
)
from .fusion import ORACLE_LABEL, STRATEGY_LABELS, strategy_schedule
from .ir import NetworkIR, parse_network
from .microbench import (
    SweepSpec,
    generate_sweep,
    sweep_curves,
    synthesize_profiles,
    write_curves,
)
from .mpselect import calibrate, read_profiles, write_profiles
from .opcount import format_scientific, intensity, layer_ops, network_ops, search_space
from .schedule import Schedule, parse_schedule, serialize_schedule
from .search import SearchSpaceSpec, brute_force

# Input problems exit 2; anything that fails later exits 3.
_INPUT_ERRORS = (
    SchemaError,
    ValidationError,
    DomainError,
    NonPowerOfTwoError,
    NotComputeLayerError,
    InsufficientDataError,
    DegenerateDataError,
    FileNotFoundError,
)


class _Parser(argparse.ArgumentParser):
    """argparse, but usage errors exit 1 instead of 2."""

    def error(self, message: str) -> None:  # noqa: A003 - argparse API
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(value: object) -> str:
    """One formatting rule shared by tables and CSV, so both carry
    identical values."""
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def _emit_table(header: Sequence[str], rows: Sequence[Sequence[object]],
                as_csv: bool) -> None:
    cells = [[_fmt(v) for v in row] for row in rows]
    if as_csv:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(cells)
        return
    widths = [len(h) for h in header]
    for row in cells:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    def line(parts: Sequence[str]) -> str:
        # first column left-aligned, the rest right-aligned
        out = [parts[0].ljust(widths[0])]
        out += [p.rjust(w) for p, w in zip(parts[1:], widths[1:])]
        return "  ".join(out)
    print(line(header))
    for row in cells:
        print(line(row))


def _existing(path: str, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such {what}: {path}")
    return p


def _load_net(path: str) -> NetworkIR:
    return parse_network(_existing(path, "network file"))


def _load_sched(path: str) -> Schedule:
    return parse_schedule(_existing(path, "schedule file"))


def _load_cfg(args: argparse.Namespace) -> CostModelConfig:
    if getattr(args, "config", None) is not None:
        return load_config(_existing(args.config, "config file"))
    return load_config(None)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}")


# ---------------------------------------------------------------- commands


def _cmd_opcount(args: argparse.Namespace) -> int:
    net = _load_net(args.network)
    cfg = _load_cfg(args)
    rows = []
    for layer in net.layers:
        ops = layer_ops(layer).ops
        inten = (_fmt(intensity(layer, cfg.bytes_per_element))
                 if layer.is_compute else "-")
        rows.append([layer.id, layer.kind.value, ops, layer_ops(layer).gops, inten])
    total = network_ops(net)
    rows.append(["total", "", total.ops, total.gops, "-"])
    _emit_table(["layer", "type", "ops", "gops", "intensity"], rows, args.csv)
    return 0


def _cmd_space(args: argparse.Namespace) -> int:
    exact = search_space(args.layers, args.cores)
    print(f"layers: {args.layers}")
    print(f"schedules: {exact}")
    print(f"≈{format_scientific(exact)}")
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    net = _load_net(args.network)
    cfg = _load_cfg(args)
    sched = strategy_schedule(net, args.strategy, cfg, fixed_mp=args.mp,
                              threshold_gops=args.threshold_gops)
    pred = predict_schedule(net, sched, cfg)
    print(f"network: {net.name}")
    print(f"strategy: {sched.strategy}")
    print(f"blocks: {len(sched.blocks)}")
    print(f"latency_ms: {_fmt(pred.total_latency_ms)}")
    print(f"fps: {_fmt(pred.fps)}")
    if args.output:
        Path(args.output).write_text(serialize_schedule(sched))
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(serialize_schedule(sched))
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    net = _load_net(args.network)
    cfg = _load_cfg(args)
    overrides = {"block_multiple": args.block_multiple,
                 "max_candidates": args.max_candidates}
    if args.mp_choices is not None:
        overrides["mp_choices"] = args.mp_choices
    spec = SearchSpaceSpec(**overrides)
    result = brute_force(net, cfg, spec)
    if args.verbose:
        print(f"searched {result.partitions} partitions in "
              f"{result.wall_time_s:.2f}s", file=sys.stderr)
    s6 = strategy_schedule(net, 6, cfg)
    s6_lat = predict_schedule(net, s6, cfg).total_latency_ms
    gap = (s6_lat / result.best_latency_ms - 1.0) * 100.0
    print(f"network: {net.name}")
    print(f"candidates: {result.candidates}")
    print(f"best_latency_ms: {_fmt(result.best_latency_ms)}")
    print(f"strategy6_latency_ms: {_fmt(s6_lat)}")
    print(f"gap_vs_strategy6_pct: {_fmt(gap)}")
    if args.output:
        Path(args.output).write_text(serialize_schedule(result.best))
        print(f"wrote {args.output}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    net = _load_net(args.network)
    cfg = _load_cfg(args)
    rows = []
    base_latency = None
    for strategy in range(1, 7):
        sched = strategy_schedule(net, strategy, cfg, fixed_mp=args.mp)
        pred = predict_schedule(net, sched, cfg)
        if base_latency is None:
            base_latency = pred.total_latency_ms
        rows.append([f"{strategy}:{STRATEGY_LABELS[strategy]}", len(sched.blocks),
                     pred.total_latency_ms, pred.fps,
                     base_latency / pred.total_latency_ms])
    try:
        result = brute_force(net, cfg, SearchSpaceSpec())
        rows.append([ORACLE_LABEL, len(result.best.blocks), result.best_latency_ms,
                     1000.0 / result.best_latency_ms,
                     base_latency / result.best_latency_ms])
    except SpaceTooLargeError as exc:
        print(f"oracle skipped: {exc}", file=sys.stderr)
    _emit_table(["strategy", "blocks", "latency_ms", "fps", "speedup_vs_1"],
                rows, args.csv)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    net = _load_net(args.network)
    sched = _load_sched(args.schedule)
    cfg = _load_cfg(args)
    pred = predict_schedule(net, sched, cfg)
    rows = []
    for block, cost in zip(sched.blocks, pred.blocks):
        ids = block.layer_ids
        span = f"{ids[0]}-{ids[-1]}" if len(ids) > 1 else str(ids[0])
        rows.append([span, block.mp, cost.effective_ops.gops, cost.per_core_gops,
                     cost.efficiency, cost.compute_ms, cost.memory_ms,
                     cost.latency_ms])
    rows.append(["total", "", "", "", "", "", "", pred.total_latency_ms])
    _emit_table(
        ["layers", "mp", "eff_gops", "per_core_gops", "efficiency",
         "compute_ms", "memory_ms", "latency_ms"],
        rows, args.csv)
    if not args.csv:
        print(f"fps: {_fmt(pred.fps)}")
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    records = read_profiles(_existing(args.profiles, "profiles file"))
    fit = calibrate(records, method=args.method)
    print(f"method: {fit.method}")
    print(f"alpha: {_fmt(fit.alpha)}")
    print(f"beta: {_fmt(fit.beta)}")
    print(f"mp_map_scale: {_fmt(fit.mp_map_scale)}")
    print(f"mp_map_bias: {_fmt(fit.mp_map_bias)}")
    print(f"residual: {_fmt(fit.residual)}")
    if args.write_config:
        cfg = _load_cfg(args).with_overrides(
            alpha=fit.alpha, beta=fit.beta,
            mp_map_scale=fit.mp_map_scale, mp_map_bias=fit.mp_map_bias)
        Path(args.write_config).write_text(
            json.dumps(cfg.to_dict(), indent=2) + "\n")
        print(f"wrote {args.write_config}")
    return 0


def _cmd_microbench(args: argparse.Namespace) -> int:
    defaults = SweepSpec()
    spec = SweepSpec(
        channel_range=args.channels or defaults.channel_range,
        spatial_range=args.spatial or defaults.spatial_range,
        kernel_range=args.kernels or defaults.kernel_range,
        mp_values=args.mp_values or defaults.mp_values,
    )
    print(f"sweep: {spec.size} combinations")
    cfg = _load_cfg(args)
    convs = generate_sweep(spec)
    profiles = synthesize_profiles(convs, cfg)
    write_profiles(profiles, args.out)
    print(f"wrote {args.out} ({len(profiles)} profiles)")
    if args.curves:
        rows = sweep_curves(convs, cfg, spec.mp_values)
        write_curves(rows, args.curves)
        print(f"wrote {args.curves} ({len(rows)} rows)")
    return 0


def _cmd_gen_code(args: argparse.Namespace) -> int:
    net = _load_net(args.network)
    sched = _load_sched(args.schedule)
    cfg = _load_cfg(args)
    project = render(net, sched, cfg, sdk_root=args.sdk_root)
    emit(project, args.output, force=args.force)
    for rel_path, _ in project.source_files:
        print(f"wrote {Path(args.output) / rel_path}")
    return 0


# ----------------------------------------------------------------- parser


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="cost-model config JSON overlaying the defaults")
    common.add_argument("--csv", action="store_true",
                        help="emit CSV instead of a human table")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized sweeps")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="dlfusion",
                     description="Joint layer-fusion and model-parallelism "
                                 "tuning on an accelerator cost model")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("opcount", parents=[common],
                       help="per-layer operation counts and intensity")
    p.add_argument("network")
    p.set_defaults(func=_cmd_opcount)

    p = sub.add_parser("space", parents=[common],
                       help="size of the joint fusion x MP schedule space")
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--cores", type=int, default=32)
    p.set_defaults(func=_cmd_space)

    p = sub.add_parser("optimize", parents=[common],
                       help="produce a schedule with one of strategies 1-6")
    p.add_argument("network")
    p.add_argument("--strategy", type=int, default=6, choices=range(1, 7))
    p.add_argument("--mp", type=int, default=4,
                   help="fixed MP for strategies 2 and 5")
    p.add_argument("--threshold-gops", type=float, default=None,
                   help="fusion accumulation threshold (default: the "
                        "per-core saturation point)")
    p.add_argument("-o", "--output", metavar="SCHED_JSON")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("oracle", parents=[common],
                       help="exhaustive best schedule over the candidate space")
    p.add_argument("network")
    p.add_argument("--mp-choices", type=_int_list, default=None)
    p.add_argument("--block-multiple", type=int, default=4)
    p.add_argument("--max-candidates", type=int, default=10**7)
    p.add_argument("-o", "--output", metavar="SCHED_JSON")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("compare", parents=[common],
                       help="strategies 1-6 and the oracle side by side")
    p.add_argument("network")
    p.add_argument("--mp", type=int, default=4,
                   help="fixed MP for strategies 2 and 5")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("simulate", parents=[common],
                       help="predict per-block cost for an existing schedule")
    p.add_argument("network")
    p.add_argument("--schedule", required=True, metavar="SCHED_JSON")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("calibrate", parents=[common],
                       help="fit MP-vote coefficients from a profile CSV")
    p.add_argument("--profiles", required=True, metavar="CSV")
    p.add_argument("--method", choices=("least-squares", "pca"),
                   default="least-squares")
    p.add_argument("--write-config", metavar="OUT_JSON")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("microbench", parents=[common],
                       help="synthesize a layer sweep and its best-MP profiles")
    p.add_argument("--channels", type=_int_list, default=None)
    p.add_argument("--spatial", type=_int_list, default=None)
    p.add_argument("--kernels", type=_int_list, default=None)
    p.add_argument("--mp-values", type=_int_list, default=None)
    p.add_argument("--out", required=True, metavar="CSV")
    p.add_argument("--curves", metavar="CSV")
    p.set_defaults(func=_cmd_microbench)

    p = sub.add_parser("gen-code", parents=[common],
                       help="render a schedule into C++ against the stub SDK")
    p.add_argument("network")
    p.add_argument("--schedule", required=True, metavar="SCHED_JSON")
    p.add_argument("-o", "--output", required=True, metavar="DIR")
    p.add_argument("--force", action="store_true",
                   help="overwrite files in a non-empty output directory")
    p.add_argument("--sdk-root", default="../sdk-stub",
                   help="stub SDK path baked into the build script")
    p.set_defaults(func=_cmd_gen_code)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help/--version, 1 via _Parser.error
        return int(exc.code or 0)
    if args.seed is not None:
        random.seed(args.seed)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DLFusionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
