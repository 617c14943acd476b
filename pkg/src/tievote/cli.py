"""Command-line interface.

Subcommands:

* ``split-demo`` -- leaf-count/leaf-size table for a splitting preset,
* ``train``      -- train one (learner, m) cell, print diagnostics JSON,
* ``eval``       -- run a plan and print the aggregate summary as CSV,
* ``sweep``      -- run a plan, write the results CSV (and SVG with --plot),
* ``plot``       -- render the SVG from an existing results CSV.

Exit codes: 0 success, 2 configuration/validation error, 3 I/O error.
All outputs are byte-reproducible given the config.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import ConfigFileError, RunConfig, load_config
from .distributions import exact_error
from .ensemble import ConfigError
from .experiments import (
    aggregate,
    records_from_csv,
    records_to_csv,
    run_plan,
)
from .selection import PlainErmLearner, train_select
from .sequences import StructuralError
from .splitting import PRESETS, exact_log3, leaf_count, split
from .svgplot import render_excess_svg
from .tie import TieTrainConfig, train_tie

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _fail_config(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_CONFIG


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_split_demo(args) -> int:
    preset = PRESETS.get(args.preset)
    if preset is None:
        return _fail_config(f"preset must be one of {sorted(PRESETS)}")
    try:
        k = exact_log3(args.m)
    except StructuralError:
        return _fail_config(f"m must be a power of 3 (got {args.m})")
    leaves = leaf_count(args.m, preset)
    depth = preset.depth(k)
    # leaf size from the recursion shape, without materializing a sequence
    size = 3 ** (k - depth * preset.active_exp_drop)
    kk = k
    for _ in range(depth):
        size += 3 ** (kk - preset.history_exp_drop) - 3 ** (kk - preset.active_exp_drop)
        kk -= preset.active_exp_drop
    print("m,preset,leaves,leaf_size,depth")
    print(f"{args.m},{args.preset},{leaves},{size},{depth}")
    return EXIT_OK


def _single_cell_config(cfg: RunConfig):
    plan = cfg.plan
    if len(plan.learners) != 1 or len(plan.m_grid) != 1:
        raise ConfigFileError("$", "train needs exactly one learner and one m")
    return plan.learners[0], plan.m_grid[0]


def cmd_train(args) -> int:
    try:
        cfg = load_config(args.config)
        learner, m = _single_cell_config(cfg)
        if learner not in ("tie", "selected"):
            raise ConfigFileError("$.learners", "train supports the 'tie' and 'selected' learners")
    except (ConfigFileError, ConfigError, StructuralError) as exc:
        return _fail_config(str(exc))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    plan = cfg.plan
    dist, hclass = plan.distribution.build()
    from .rng import SeedSpec

    seed = SeedSpec(plan.master_seed).derive(0).derive(0)
    sample = dist.sample(m, seed.derive(0))
    tie_cfg = TieTrainConfig(
        split_params=PRESETS[plan.split],
        voter=plan.voter_config(),
        thresholds=plan.thresholds,
        erm_tie=plan.erm_tie,
        seed=seed.derive(1),
    )
    try:
        if learner == "tie":
            clf = train_tie(hclass, sample, tie_cfg)
            payload = json.loads(clf.diagnostics_json())
        else:
            sel = train_select(hclass, sample, PlainErmLearner(tie=plan.erm_tie), tie_cfg)
            payload = json.loads(sel.diagnostics_json())
    except (ConfigError, StructuralError) as exc:
        return _fail_config(str(exc))
    payload["learner"] = learner
    payload["m"] = m
    err = exact_error(clf if learner == "tie" else sel, dist)
    payload["exact_error"] = [err.numerator, err.denominator]
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def _run_config(args):
    cfg = load_config(args.config)
    result = run_plan(cfg.plan, jobs=args.jobs)
    return cfg, result


def cmd_eval(args) -> int:
    try:
        cfg, result = _run_config(args)
    except (ConfigFileError, ConfigError, StructuralError) as exc:
        return _fail_config(str(exc))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(
        "learner,m,n,mean_err_num,mean_err_den,median_err_num,median_err_den,"
        "q05_err_num,q05_err_den,q95_err_num,q95_err_den,"
        "mean_excess_num,mean_excess_den"
    )
    for row in aggregate(result.records):
        print(
            f"{row.learner},{row.m},{row.n},"
            f"{row.mean_err.numerator},{row.mean_err.denominator},"
            f"{row.median_err.numerator},{row.median_err.denominator},"
            f"{row.q05_err.numerator},{row.q05_err.denominator},"
            f"{row.q95_err.numerator},{row.q95_err.denominator},"
            f"{row.mean_excess.numerator},{row.mean_excess.denominator}"
        )
    for skip in result.skips:
        print(f"# skipped {skip.learner} at m={skip.m}: {skip.reason}", file=sys.stderr)
    return EXIT_OK


def _series_from_records(records):
    series = {}
    for row in aggregate(records):
        series.setdefault(row.learner, []).append((row.m, row.mean_excess))
    return series


def cmd_sweep(args) -> int:
    try:
        cfg, result = _run_config(args)
    except (ConfigFileError, ConfigError, StructuralError) as exc:
        return _fail_config(str(exc))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if cfg.csv_path is None:
        return _fail_config("$.output.csv: sweep needs an output CSV path")
    try:
        _write_text(cfg.csv_path, records_to_csv(result.records))
        if args.plot:
            if cfg.svg_path is None:
                return _fail_config("$.output.svg: --plot needs an output SVG path")
            _write_text(cfg.svg_path, render_excess_svg(_series_from_records(result.records)))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for skip in result.skips:
        print(f"# skipped {skip.learner} at m={skip.m}: {skip.reason}", file=sys.stderr)
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        with open(args.csv, "r", encoding="utf-8") as fh:
            records = records_from_csv(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        return _fail_config(str(exc))
    try:
        _write_text(args.out, render_excess_svg(_series_from_records(records)))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tievote",
        description="Subsampled ERM voting with margin tie-breaking: training, sweeps, plots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split-demo", help="print the leaf table for a splitting preset")
    p.add_argument("m", type=int, help="training size (a power of 3)")
    p.add_argument("--preset", default="ALG2", help="ALG1 or ALG2 (default ALG2)")
    p.set_defaults(func=cmd_split_demo)

    p = sub.add_parser("train", help="train one cell and print diagnostics JSON")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="run a plan and print the aggregate summary CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="run a plan and write the results CSV (+SVG)")
    p.add_argument("--config", required=True)
    p.add_argument("--plot", action="store_true")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="render the SVG from an existing results CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
