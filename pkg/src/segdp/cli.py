"""Command-line surface: simulate, fit, grid and report.

All commands are batch jobs: they read config files, write their outputs
under a target directory and exit. Exit codes: 0 success, 2 config error,
3 infeasible constraints, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import consensus as cns
from . import io as sio
from .config import load_dataset_spec, load_run_config
from .core import objective
from .errors import AllInfeasible, ConfigError, Infeasible, SegdpError, SpecError
from .simulator import generate_dataset
from .svg import scatter_rug_svg

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_RUNTIME = 4


def _out_dir(path_str: str) -> Path:
    out = Path(path_str)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    spec = load_dataset_spec(args.spec)
    series, truth, manifest = generate_dataset(spec)
    out = _out_dir(args.out)
    sio.write_series_csv(out / "series.csv", series)
    sio.write_assignment_csv(out / "truth.csv", truth)
    manifest["created_at"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    sio.write_json(out / "manifest.json", manifest)
    print(f"wrote {series.n_points} points, {truth.n_transitions} transitions -> {out}")
    return EXIT_OK


def _dataset_name(series_path: Path) -> str:
    sibling = series_path.parent / "manifest.json"
    if sibling.exists():
        try:
            name = sio.read_json(sibling).get("name")
            if name:
                return str(name)
        except ConfigError:
            pass
    return series_path.stem


def cmd_fit(args) -> int:
    config = load_run_config(args.config)
    series = sio.load_series_csv(args.series)
    adapter = config.adapter()
    started = time.monotonic()
    results = cns.fit_restarts(
        series,
        adapter,
        config.constraints,
        config.n_init,
        config.seed,
        max_outer_iters=config.max_outer_iters,
        workers=config.threads,
    )
    chosen = cns.consensus(results)
    elapsed = time.monotonic() - started

    out = _out_dir(args.out if args.out else (config.out_dir or "."))
    sio.write_assignment_csv(out / "assignment.csv", chosen.assignment)
    lines = ["restart,seed,cost,iterations,converged,n_transitions,c_used"]
    for i, r in enumerate(results):
        lines.append(
            f"{i},{r.seed},{sio.format_real(r.cost)},{r.iterations},"
            f"{str(r.converged).lower()},{r.assignment.n_transitions},"
            f"{len(r.assignment.used_labels())}"
        )
    (out / "restarts.csv").write_text("\n".join(lines) + "\n")
    sio.write_json(
        out / "run_manifest.json",
        {
            "command": "fit",
            "seed": config.seed,
            "config_hash": config.config_hash(),
            "n_init": config.n_init,
            "loss_traces": [list(r.loss_trace) for r in results],
            "consensus_seed": chosen.seed,
            "consensus_cost": chosen.cost,
            "elapsed_seconds": elapsed,
        },
    )
    print(
        f"consensus cost {chosen.cost:.6g} with {chosen.assignment.n_transitions} "
        f"transitions over {len(results)} restarts -> {out}"
    )
    return EXIT_OK


def _write_confusion(path: Path, matrix) -> None:
    header = "pred_label," + ",".join(f"truth_{j}" for j in range(matrix.shape[1]))
    lines = [header]
    for i, row in enumerate(matrix):
        lines.append(f"{i}," + ",".join(str(int(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _truth_cost(series, truth, adapter, min_block) -> float | None:
    c_true = max(truth.used_labels()) + 1
    try:
        weights = adapter.characterize(series, truth, c_true, min_block)
        return objective(series, truth, weights, adapter.affiliate, adapter.batch_affiliate)
    except SegdpError as exc:
        log.warning("could not evaluate the ground-truth cost: %s", exc)
        return None


def cmd_grid(args) -> int:
    config = load_run_config(args.config)
    if config.n_max_grid is None or config.c_max_grid is None:
        raise ConfigError("the grid command needs grid.n_max_grid and grid.c_max_grid")
    series = sio.load_series_csv(args.series)
    truth = sio.load_assignment_csv(args.truth) if args.truth else None
    adapter = config.adapter()
    started = time.monotonic()
    points = cns.grid_search(
        series,
        adapter,
        min_block=config.constraints.min_block,
        epsilon=config.constraints.epsilon,
        n_max_grid=config.n_max_grid,
        c_max_grid=config.c_max_grid,
        n_init=config.n_init,
        master_seed=config.seed,
        max_outer_iters=config.max_outer_iters,
        workers=config.threads,
    )
    report = cns.select_region(points, config.selection)
    lowest = cns.lowest_cost_point(points)
    elapsed = time.monotonic() - started

    out = _out_dir(args.out if args.out else (config.out_dir or "."))
    sio.write_grid_csv(out / "grid.csv", points)
    sio.write_assignment_csv(out / "assignment_most_common.csv", report.chosen.result.assignment)
    sio.write_assignment_csv(out / "assignment_lowest_cost.csv", lowest.result.assignment)

    plot_points = [(p.n_grid, p.c_grid, p.cost) for p in points if p.result is not None]
    svg = scatter_rug_svg(
        plot_points,
        region=report.region,
        region_costs=[p.cost for p in report.region_members],
    )
    (out / "grid.svg").write_text(svg)

    dataset = _dataset_name(Path(args.series))
    rows = []
    for mode, point in ((cns.MOST_COMMON, report.chosen), (cns.LOWEST_COST, lowest)):
        row = {
            "dataset": dataset,
            "mode": mode,
            "cost_pred": point.cost,
            "n_grid": point.n_grid,
            "c_grid": point.c_grid,
            "n_effective": point.n_effective,
            "c_effective": point.c_effective,
            "cost_true": None,
            "ari": None,
        }
        rows.append(row)
    if truth is not None:
        cost_true = _truth_cost(series, truth, adapter, config.constraints.min_block)
        for row, point in zip(rows, (report.chosen, lowest)):
            row["cost_true"] = cost_true
            row["ari"] = cns.ari(point.result.assignment, truth)
        _write_confusion(
            out / "confusion_most_common.csv",
            cns.confusion_matrix(report.chosen.result.assignment, truth),
        )
        _write_confusion(
            out / "confusion_lowest_cost.csv",
            cns.confusion_matrix(lowest.result.assignment, truth),
        )

    sio.write_json(
        out / "report.json",
        {
            "dataset": dataset,
            "rows": rows,
            "selection": {
                "mode": report.mode,
                "region": list(report.region),
                "n_region_members": len(report.region_members),
                "chosen_n_grid": report.chosen.n_grid,
                "chosen_c_grid": report.chosen.c_grid,
            },
        },
    )
    sio.write_json(
        out / "run_manifest.json",
        {
            "command": "grid",
            "seed": config.seed,
            "config_hash": config.config_hash(),
            "n_init": config.n_init,
            "n_grid_points": len(points),
            "n_failed_points": sum(1 for p in points if p.error),
            "elapsed_seconds": elapsed,
        },
    )
    print(
        f"grid of {len(points)} points; selection mode {report.mode}; "
        f"most-common cost {report.chosen.cost:.6g} -> {out}"
    )
    return EXIT_OK


def _format_cell(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def cmd_report(args) -> int:
    report_path = Path(args.run) / "report.json"
    if not report_path.exists():
        raise ConfigError(f"{report_path} not found; run the grid command first")
    payload = sio.read_json(report_path)
    print("dataset      mode         cost_pred    cost_true    ARI")
    for row in payload["rows"]:
        print(
            f"{row['dataset']:<12s} {row['mode']:<12s} "
            f"{_format_cell(row['cost_pred']):<12s} "
            f"{_format_cell(row['cost_true']):<12s} "
            f"{_format_cell(row['ari'])}"
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segdp",
        description="Constrained segmentation and clustering of multivariate series",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="enable info logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic well log")
    p.add_argument("--spec", required=True, help="dataset spec JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="consensus fit at a fixed (N, C)")
    p.add_argument("--config", required=True, help="run config JSON")
    p.add_argument("--series", required=True, help="series CSV")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("grid", help="grid search over (N, C) with region selection")
    p.add_argument("--config", required=True, help="run config JSON")
    p.add_argument("--series", required=True, help="series CSV")
    p.add_argument("--truth", default=None, help="optional ground-truth assignment CSV")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("report", help="print the summary rows of a grid run")
    p.add_argument("--run", required=True, help="directory written by the grid command")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ConfigError, SpecError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (Infeasible, AllInfeasible) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SegdpError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
