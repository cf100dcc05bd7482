"""Command-line experiment runner.

Subcommands:

* generate  - write a synthetic hybrid network to edge-list files
* truth     - ground-truth label distribution as CSV
* run       - run a configured experiment, write the aggregated result CSV
* figdata   - merge result CSVs into tidy figure data

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiment, geo, ingest


def _split_sets(pairs) -> dict:
    overrides = {}
    for item in pairs or []:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    return overrides


def _load_cfg(args) -> experiment.ExperimentConfig:
    mapping = experiment.parse_config_file(args.config) if args.config else {}
    overrides = _split_sets(getattr(args, "set", None))
    if getattr(args, "out", None):
        overrides["out"] = args.out
    return experiment.make_config(mapping, overrides)


def cmd_generate(args) -> int:
    cfg = _load_cfg(args)
    if cfg.source != "synthetic":
        raise ValueError("generate only writes synthetic networks")
    hybrid, _ = experiment.build_network(cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ingest.write_edge_list(hybrid.target, out_dir / "target.txt")
    ingest.write_edge_list(hybrid.auxiliary, out_dir / "auxiliary.txt")
    ingest.write_affiliation(hybrid.affiliation, out_dir / "affiliation.txt")
    venues = experiment.synthetic_venues(hybrid.auxiliary.n, geo.NYC_REGION, cfg.seed)
    geo.write_venues(venues, out_dir / "venues.txt")
    print(
        f"wrote {out_dir}/: target n={hybrid.target.n} m={hybrid.target.num_edges}, "
        f"auxiliary n={hybrid.auxiliary.n} m={hybrid.auxiliary.num_edges}, "
        f"affiliation m={hybrid.affiliation.num_edges}"
    )
    return 0


def cmd_truth(args) -> int:
    cfg = _load_cfg(args)
    prep = experiment.prepare_experiment(cfg)
    lines = ["label,theta"]
    for label in prep.truth.labels():
        lines.append(f"{label},{prep.truth[label]!r}")
    text = "\n".join(lines) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_run(args) -> int:
    cfg = _load_cfg(args)
    table = experiment.run_experiment(cfg)
    text = experiment.format_result_csv(table)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_figdata(args) -> int:
    tables = [experiment.read_result_csv(p) for p in args.results]
    experiment.emit_figure_data(args.kind, tables, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridsample", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    common.add_argument("-o", "--out", help="output path (default: stdout)")

    p_gen = sub.add_parser("generate", parents=[common],
                           help="write a synthetic network to files")
    p_gen.add_argument("--out-dir", default="network", help="output directory")
    p_gen.set_defaults(func=cmd_generate)

    p_truth = sub.add_parser("truth", parents=[common],
                             help="ground-truth label distribution")
    p_truth.set_defaults(func=cmd_truth)

    p_run = sub.add_parser("run", parents=[common], help="run an experiment")
    p_run.set_defaults(func=cmd_run)

    p_fig = sub.add_parser("figdata", help="merge result CSVs into figure data")
    p_fig.add_argument("--kind", required=True, choices=sorted(experiment.FIGURE_KINDS))
    p_fig.add_argument("results", nargs="+", help="result CSV files from 'run'")
    p_fig.add_argument("-o", "--out", required=True, help="output CSV path")
    p_fig.set_defaults(func=cmd_figdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
