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

Acceptance suite runner
"""

import logging
from pathlib import Path

from rich import box
from rich.console import Console
from rich.table import Table

from rmt_lab.errors import RmtLabError
from rmt_lab.verify import VerifyContext, VerifyReport, run_suites, select_suites

logger = logging.getLogger("rmt-lab.commands.verify")

REPORT_FILE = "verify-report.json"


def display_verify_table(report):
    console = Console()
    table = Table(show_header=True, header_style="bold magenta", box=box.ROUNDED)
    table.add_column("Suite", style="cyan")
    table.add_column("Criterion", style="cyan")
    table.add_column("Measured", style="yellow")
    table.add_column("Tolerance", style="yellow")
    table.add_column("Result")
    table.add_column("Runtime (s)", style="blue")
    for r in report.results:
        relation = r.detail.get("relation", "<=")
        table.add_row(
            r.suite,
            r.name,
            f"{r.measured:.6g}",
            f"{relation} {r.tolerance:.6g}",
            "[green]pass[/green]" if r.passed else "[red]FAIL[/red]",
            f"{r.runtime_s:.2f}",
        )
    console.print(table)


def verify_command(config, quiet=False):
    """
    Run the acceptance suites named in config.suites, every default suite when none are named

    Args:
        config (ExperimentConfig): suites, extended, seed, threads, backend and output directory
        quiet (bool): Skip the results table and progress bars

    Returns:
        VerifyReport: The report (possibly with failures), None if the selection is invalid
    """
    console = Console()
    try:
        suites = select_suites(list(config.suites) or "all", extended=config.extended)
    except RmtLabError as e:
        logger.error(f"Invalid suite selection: {str(e)}")
        console.print(f"[red]Error: {str(e)}[/red]")
        return None

    if not suites:
        logger.info("Empty suite selection")
        report = VerifyReport()
    else:
        context = VerifyContext(seed=config.seed, threads=config.threads, backend=config.backend,
                                progress=not quiet)
        report = run_suites(suites, context)

    path = report.write(Path(config.output.directory) / REPORT_FILE)
    if not quiet and report.results:
        display_verify_table(report)
    if report.passed:
        console.print(f"[bold green]All {len(report.results)} criteria passed; report at {path}[/bold green]")
    else:
        logger.error(f"{report.failures} criteria failed")
        console.print(f"[red]{report.failures} of {len(report.results)} criteria failed; report at {path}[/red]")
    return report
