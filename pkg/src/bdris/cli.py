"""Command-line interface for bdris."""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .channel import StreamFactory, sample_channels
from .config import ArchitectureSpec, ScenarioConfig
from .errors import BdrisError, ConfigError
from .harness import complexity_table, run_sweep
from .optimize import optimize_architecture
from .validate import SUITES, TRIALS_DEFAULT, run_suite

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

logger = logging.getLogger(__name__)


def load_config(path, seed=None):
    """Read a scenario file, mapping each failure to its own message.

    Returns:
        The resolved config

    Raises:
        ConfigError: With a message telling unreadable, malformed and
            schema-violating files apart
    """
    try:
        config = ScenarioConfig.load(path)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    except ConfigError as e:
        raise ConfigError(f"config {path} violates the schema: {e}") from e
    if seed is None:
        return config
    if seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed}")
    return config.with_seed(seed)


def optimize_command(args):
    """Optimize one channel realization and print the result as JSON.

    Returns:
        Exit code
    """
    config = load_config(args.config, args.seed)
    spec = ArchitectureSpec.parse(args.arch)
    n = args.n or config.n_list[0]
    m = args.m or config.m_list[0]
    k_db = config.rician_k_db[0]
    streams = StreamFactory(config.seed)
    ch = sample_channels(
        n, m, config.geometry, config.path_loss, k_db, streams.trial(0)
    )
    arch = spec.build(n, streams.generator("tree"))
    result = optimize_architecture(
        arch,
        ch.h_ri,
        ch.h_it,
        config.z0,
        config.tol,
        config.max_iter,
        streams.generator("precoder"),
        p_t=config.p_t,
    )
    document = {"n": n, "m": m, "k_db": k_db, "seed": config.seed}
    document.update(result.to_dict())
    document["architecture"] = arch.to_dict()
    print(json.dumps(document, indent=2))
    return EXIT_OK


def sweep_command(args):
    """Run the Monte Carlo sweep and write CSV plus a metadata sidecar.

    Returns:
        Exit code
    """
    config = load_config(args.config, args.seed)
    out = Path(args.out)
    meta = out.with_name(out.name + ".meta.json")
    count = len(config.architectures)
    print(f"🔍 Sweeping {count} architectures, {config.trials} trials each...")
    result = run_sweep(config)
    result.to_csv(out)
    result.write_metadata(meta)
    print(f"✅ Wrote {len(result.rows)} rows to {out}")
    print(f"✅ Wrote metadata to {meta}")

    labels = {(spec.label, spec.group_size) for spec in config.architectures}
    single = ("single", None)
    if single in labels:
        for numerator in sorted(labels - {single}, key=str):
            for (n, m, k_db), gain in sorted(result.gain(numerator, single).items()):
                label, size = numerator
                name = label if size is None else f"{label}({size})"
                print(f"   {name} vs single, N={n} M={m} K={k_db:g} dB: x{gain:.3f}")
    return EXIT_OK


def complexity_command(args):
    """Emit the tunable admittance counts for N = 1..n_max as CSV.

    Returns:
        Exit code
    """
    table = complexity_table(range(1, args.n_max + 1), args.group_sizes, strict=False)
    if args.out is None:
        table.to_csv(sys.stdout)
        return EXIT_OK
    with open(args.out, "w", newline="") as f:
        table.to_csv(f)
    print(f"✅ Wrote complexity table to {args.out}")
    return EXIT_OK


def validate_command(args):
    """Run the numerical property checks.

    Returns:
        Exit code (0 only when every check passes)
    """
    print(f"🔍 Running {args.suite} checks ({args.trials} trials each)...\n")
    checks = run_suite(args.suite, args.trials, args.seed)
    for check in checks:
        marker = "✅" if check.passed else "❌"
        print(f"{marker} {check.name}: {check.detail}")
    failed = [c for c in checks if not c.passed]
    if failed:
        print(f"\n❌ {len(failed)} of {len(checks)} checks failed")
        return EXIT_FAILURE
    print(f"\n✅ All {len(checks)} checks passed")
    return EXIT_OK


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def seed_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {value}")
    return value


def int_list(text):
    return [positive_int(part) for part in text.split(",") if part.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bdris",
        description="Tree- and forest-connected BD-RIS modelling and optimization",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Optimize one realization on a tridiagonal RIS
  bdris optimize --config scenario.json --arch tridiagonal

  # Forest with arrowhead groups of 4 ports, another seed
  bdris optimize --config scenario.json --arch forest-arrowhead:4 --seed 7

  # Monte Carlo sweep
  bdris sweep --config scenario.json --out results.csv

  # Circuit complexity up to N = 64
  bdris complexity --n-max 64 --group-sizes 2,4,8

  # Numerical property checks
  bdris validate --suite props
        """,
    )

    parser.add_argument(
        "--version",
        "-v",
        action="version",
        version=f"bdris {__version__}",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Log debug records to stderr",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Optimize command
    optimize_parser = subparsers.add_parser(
        "optimize", help="Optimize one channel realization"
    )
    optimize_parser.add_argument("--config", required=True, help="Scenario JSON")
    optimize_parser.add_argument(
        "--arch",
        required=True,
        help="Architecture, e.g. single, tridiagonal, group:8, forest-arrowhead:4",
    )
    optimize_parser.add_argument(
        "--seed", type=seed_int, help="Override the config seed"
    )
    optimize_parser.add_argument("--n", type=positive_int, help="RIS ports")
    optimize_parser.add_argument("--m", type=positive_int, help="Transmit antennas")

    # Sweep command
    sweep_parser = subparsers.add_parser("sweep", help="Run the Monte Carlo sweep")
    sweep_parser.add_argument("--config", required=True, help="Scenario JSON")
    sweep_parser.add_argument("--out", required=True, help="CSV output path")
    sweep_parser.add_argument(
        "--seed", type=seed_int, help="Override the config seed"
    )

    # Complexity command
    complexity_parser = subparsers.add_parser(
        "complexity", help="Count tunable admittances per architecture"
    )
    complexity_parser.add_argument("--n-max", type=positive_int, required=True)
    complexity_parser.add_argument(
        "--group-sizes",
        type=int_list,
        default=[2, 4, 8],
        help="Comma-separated group sizes (default: 2,4,8)",
    )
    complexity_parser.add_argument("--out", help="CSV output path (default: stdout)")

    # Validate command
    validate_parser = subparsers.add_parser(
        "validate", help="Run numerical property checks"
    )
    validate_parser.add_argument("--suite", choices=SUITES, default="props")
    validate_parser.add_argument(
        "--trials", type=positive_int, default=TRIALS_DEFAULT
    )
    validate_parser.add_argument("--seed", type=seed_int, default=0)

    return parser


COMMANDS = {
    "optimize": optimize_command,
    "sweep": sweep_command,
    "complexity": complexity_command,
    "validate": validate_command,
}


def main(argv=None):
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.command is None:
        parser.print_help()
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except (BdrisError, OSError) as e:
        logger.debug("command failed", exc_info=True)
        print(f"❌ {args.command} failed: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
