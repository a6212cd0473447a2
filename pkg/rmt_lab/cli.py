#!/usr/bin/env python3
"""
Copyright 2025 Samapriya Roy

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.

rmt-lab command line interface
"""

import argparse
import logging
import sys

from rich.console import Console

from rmt_lab.commands import (
    analyze_command,
    kernel_command,
    params_command,
    sample_command,
    verify_command,
)
from rmt_lab.config import ExperimentConfig, load_config
from rmt_lab.ensembles import ENSEMBLE_TAGS
from rmt_lab.errors import RmtLabError
from rmt_lab.kernels import REGIMES

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger("rmt-lab")

MODEL_FLAGS = ("ensemble", "tau", "gamma", "k_p", "n", "t", "draws", "alpha", "x_global", "regime")


def _add_common(group):
    group.add_argument("--config", help="Experiment config JSON file")
    group.add_argument("--seed", type=int, help="Seed (unsigned 64-bit); overrides the config")
    group.add_argument("--out", help="Output directory; overrides the config")
    group.add_argument("--threads", type=int, help="Worker threads (default: $RMT_THREADS or 1)")


def _add_model(group):
    group.add_argument("--ensemble", choices=ENSEMBLE_TAGS, help="Ensemble tag")
    group.add_argument("--tau", type=float, help="Non-Hermiticity parameter τ in (-1, 1)")
    group.add_argument("--gamma", type=float, help="Trace-squared strength γ >= 0")
    group.add_argument("--kp", dest="k_p", type=float, help="Target Tr JJ*/N, K_p > 0")
    group.add_argument("--n", type=int, help="Matrix size N")


def build_parser():
    parser = argparse.ArgumentParser(description="Random matrix laboratory for elliptic, fixed-trace and trace-squared ensembles")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    verbosity.add_argument("--quiet", action="store_true", help="Log warnings only and hide progress bars")
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # Params command
    params_parser = subparsers.add_parser("params", help="Report derived constants K, K̄, K_FT, C and scalings")
    params_parser._action_groups.pop()
    params_optional = params_parser.add_argument_group('optional arguments')
    _add_common(params_optional)
    _add_model(params_optional)
    params_optional.add_argument("--alpha", type=float, help="Weak-regime α for the scaling report (default: 1)")
    params_optional.add_argument("--x", dest="x_global", type=float, help="Bulk point X for the scaling report")
    params_optional.add_argument("--json", action="store_true", help="Print the JSON report instead of a table")

    # Sample command
    sample_parser = subparsers.add_parser("sample", help="Draw spectra and write records with metadata")
    sample_parser._action_groups.pop()
    sample_optional = sample_parser.add_argument_group('optional arguments')
    _add_common(sample_optional)
    _add_model(sample_optional)
    sample_optional.add_argument("--draws", type=int, help="Number of spectra")

    # Kernel command
    kernel_parser = subparsers.add_parser("kernel", help="Tabulate a correlation kernel on the configured grid")
    kernel_parser._action_groups.pop()
    kernel_optional = kernel_parser.add_argument_group('optional arguments')
    _add_common(kernel_optional)
    _add_model(kernel_optional)
    kernel_optional.add_argument("--regime", choices=REGIMES, help="Kernel regime")
    kernel_optional.add_argument("--alpha", type=float, help="α (weak_limit) or α̃ (weak_prop)")
    kernel_optional.add_argument("--x", dest="x_global", type=float, help="Bulk point X for weak_prop")
    kernel_optional.add_argument("--t", type=float, help="Linearization frequency t in a(t)")

    # Analyze command
    analyze_parser = subparsers.add_parser("analyze", help="Run estimators on a sample directory")
    analyze_parser._action_groups.pop()
    analyze_optional = analyze_parser.add_argument_group('optional arguments')
    _add_common(analyze_optional)
    analyze_optional.add_argument("--samples", help="Directory written by 'sample' (default: --out)")

    # Verify command
    verify_parser = subparsers.add_parser("verify", help="Run acceptance suites")
    verify_parser._action_groups.pop()
    verify_optional = verify_parser.add_argument_group('optional arguments')
    _add_common(verify_optional)
    verify_optional.add_argument("--suite", help="Suite names, comma separated, or 'all'")
    verify_optional.add_argument("--extended", action="store_true", help="Include extended suites in 'all'")
    return parser


def resolve_config(args):
    """
    Config from --config with command-line flags taking precedence

    Returns:
        ExperimentConfig
    """
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {name: getattr(args, name, None) for name in MODEL_FLAGS}
    overrides.update(seed=args.seed, threads=args.threads, out=args.out)
    if getattr(args, "suite", None) is not None:
        overrides["suites"] = tuple(args.suite.split(","))
    if getattr(args, "extended", False):
        overrides["extended"] = True
    return config.with_overrides(**overrides)


def main(argv=None):
    """Main entry point for the CLI"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger().setLevel(logging.WARNING)

    if args.command is None:
        parser.print_help()
        return 0

    try:
        config = resolve_config(args)
    except RmtLabError as e:
        logger.error(f"Invalid configuration: {str(e)}")
        Console().print(f"[red]Error: {str(e)}[/red]")
        sys.exit(2)

    # Process commands
    if args.command == "params":
        result = params_command(config, json_output=args.json)
    elif args.command == "sample":
        result = sample_command(config, quiet=args.quiet)
    elif args.command == "kernel":
        result = kernel_command(config, quiet=args.quiet)
    elif args.command == "analyze":
        result = analyze_command(config, sample_dir=args.samples, quiet=args.quiet)
    elif args.command == "verify":
        result = verify_command(config, quiet=args.quiet)
        sys.exit(1 if result is None else result.exit_code)
    else:
        parser.print_help()
        return 0

    sys.exit(0 if result is not None else 1)


if __name__ == "__main__":
    main()
