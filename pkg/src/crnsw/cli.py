"""`simulate` command line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, ParameterError
from .harness import SCENARIOS, emit_outputs, override, parse_config, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3

log = logging.getLogger("crnsw")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simulate", description="Run CRN small-world experiments.")
    p.add_argument("--config", required=True, type=Path, help="key = value config file")
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.add_argument("--seeds", type=int, help="number of seeds (overrides config)")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), help="run only this scenario")
    p.add_argument("--scheme", help="comma-separated scheme list, e.g. NSC+CA,RS+Random")
    p.add_argument("--seed-offset", type=int, help="first seed (overrides config)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # argparse uses 2 for usage errors, 0 for --help
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        text = args.config.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        print(f"simulate: cannot read config: {e}", file=sys.stderr)
        return EXIT_IO

    try:
        configs = parse_config(text)
        if args.scenario:
            configs = [c for c in configs if c.scenario == args.scenario]
            if not configs:
                raise ConfigError(f"scenario {args.scenario} not in config")
        schemes = tuple(s.strip() for s in args.scheme.split(",") if s.strip()) if args.scheme else None
        if schemes and len(configs) > 1:
            # several scenarios: each keeps the requested schemes it supports
            picked = [(c, tuple(s for s in schemes if s in SCENARIOS[c.scenario][3])) for c in configs]
            configs = [override(c, schemes=s) for c, s in picked if s]
            if not configs:
                raise ConfigError(f"no scenario accepts schemes {list(schemes)}")
        elif schemes:
            configs = [override(configs[0], schemes=schemes)]
        configs = [override(c, seeds=args.seeds, seed_offset=args.seed_offset) for c in configs]
        results = []
        for c in configs:
            log.info("running %s: %d sweep points x %d schemes x %d seeds",
                     c.scenario, len(c.sweep), len(c.schemes), c.seeds)
            results.append(run_experiment(c, jobs=args.jobs))
    except (ConfigError, ParameterError) as e:
        print(f"simulate: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        files = emit_outputs(results, args.out)
    except OSError as e:
        print(f"simulate: cannot write outputs: {e}", file=sys.stderr)
        return EXIT_IO
    for f in files:
        log.info("wrote %s", f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
