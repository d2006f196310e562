"""Command line: ``guideboot run | summarize | oracle-check``."""
from __future__ import annotations

import argparse
from dataclasses import replace
import logging
import sys

from .config import ConfigError, parse_config, parse_seeds
from .io import format_summary, read_records, write_outputs
from .oracle_check import run_oracle_checks
from .runner import aggregate, run_experiment

log = logging.getLogger("guideboot")


def _cmd_run(args) -> int:
    config = parse_config(args.config)
    if args.agents:
        config = config.with_agents(a.strip() for a in args.agents.split(",") if a.strip())
    if args.seeds:
        config = replace(config, seeds=parse_seeds(args.seeds))
    log.info("running %s on %s for %d seeds", ",".join(config.agents), config.env.kind,
             len(config.seeds))
    records = run_experiment(config, workers=args.workers)
    summary = aggregate(records, config.agents)
    rec_path, sum_path = write_outputs(records, summary, config, args.out_dir)
    print(format_summary(summary), end="")
    log.info("wrote %s and %s", rec_path, sum_path)
    return 0


def _cmd_summarize(args) -> int:
    records = read_records(args.records)
    agents = list(dict.fromkeys(r.agent for r in records))
    print(format_summary(aggregate(records, agents)), end="")
    return 0


def _cmd_oracle_check(args) -> int:
    checks = run_oracle_checks(trials=args.trials, seed=args.seed)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="guideboot", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate every (agent, seed) episode of a config")
    run.add_argument("--config", required=True)
    run.add_argument("--seeds", help="a..b (inclusive) or comma list; overrides the config")
    run.add_argument("--agents", help="comma-separated agent names; overrides the config")
    run.add_argument("--out-dir", help="directory for the records and summary files")
    run.add_argument("--workers", type=int, default=None, help="parallel episode processes")
    run.set_defaults(func=_cmd_run)

    summ = sub.add_parser("summarize", help="aggregate a records file")
    summ.add_argument("--records", required=True)
    summ.set_defaults(func=_cmd_summarize)

    oc = sub.add_parser("oracle-check", help="verify the estimator-moment oracles")
    oc.add_argument("--trials", type=int, default=1_000_000)
    oc.add_argument("--seed", type=int, default=0)
    oc.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
