"""Command-line runner: ``jspofdm --preset fig4 --out runs/fig4``.

Exit codes: 0 success, 2 configuration error, 3 infeasible design,
4 numerical failure.
"""

import argparse
import sys

from .config import list_presets, load_config, load_preset
from .errors import ConditioningError, ConfigError, EqualizerFailure, InfeasibleDesignError
from .experiments import run, summary_lines, write_outputs
from .parallel import default_threads

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="jspofdm",
        description="Design spectral precoders and run PSD, BER and condition-number experiments.")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="scenario YAML file")
    src.add_argument("--preset", metavar="ID", help="shipped scenario, see --list-presets")
    p.add_argument("--list-presets", action="store_true", help="print preset ids and exit")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for Monte Carlo loops (default: all cores); "
                        "results do not depend on it")
    p.add_argument("--out", metavar="DIR", default=None,
                   help="output directory (default: runs/<preset or config stem>)")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.list_presets:
        for pid, desc in list_presets():
            print(f"{pid:<12} {desc}")
        return EXIT_OK
    if not (args.config or args.preset):
        print("error: one of --config or --preset is required", file=sys.stderr)
        return EXIT_CONFIG
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_preset(args.preset) if args.preset else load_config(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg = cfg.model_copy(update={"seed": args.seed})
    name = args.preset or args.config.rsplit("/", 1)[-1].rsplit(".", 1)[0]
    threads = args.threads or default_threads()
    try:
        res = run(cfg, threads=threads)
    except InfeasibleDesignError as err:
        print(f"infeasible design: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConditioningError, EqualizerFailure) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as err:
        # Library precondition failures on a config that parsed but cannot run.
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    out = write_outputs(res, args.out or f"runs/{name}")
    for line in summary_lines(res):
        print(line)
    print(f"wrote {len(res.files) + 1} files to {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
