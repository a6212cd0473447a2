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

Kernel tabulation on a grid
"""

import logging
from pathlib import Path

from rich import box
from rich.console import Console
from rich.table import Table

from rmt_lab.config import config_hash
from rmt_lab.errors import RmtLabError
from rmt_lab.io import kernel_frame, write_csv, write_metadata
from rmt_lab.kernels import KernelContext, kernel_profile

logger = logging.getLogger("rmt-lab.commands.kernel")

KERNEL_CSV = "kernel.csv"
PREVIEW_ROWS = 10


def display_kernel_table(frame):
    console = Console()
    table = Table(show_header=True, header_style="bold magenta", box=box.ROUNDED)
    for column in frame.columns:
        table.add_column(column, style="cyan" if column.endswith(("1", "2")) else "green")
    for _, row in frame.head(PREVIEW_ROWS).iterrows():
        table.add_row(*[f"{value:.8g}" for value in row])
    console.print(table)
    if len(frame) > PREVIEW_ROWS:
        console.print(f"... {len(frame) - PREVIEW_ROWS} more rows")


def kernel_command(config, quiet=False):
    """
    Tabulate the configured kernel regime on the configured grid

    Args:
        config (ExperimentConfig): Experiment configuration; regime, alpha,
            x_global, t and grid select the table
        quiet (bool): Skip the preview table

    Returns:
        KernelProfile: The tabulated profile if successful, None otherwise
    """
    console = Console()
    out_dir = Path(config.output.directory)
    try:
        ctx = KernelContext.from_params(config.model_params(), regime=config.regime, alpha=config.alpha,
                                        fixed_trace=config.fixed_trace, x_global=config.x_global)
        profile = kernel_profile(config.grid.pairs(), ctx, threads=config.threads)
        frame = kernel_frame(profile)
        path = write_csv(frame, out_dir / KERNEL_CSV, config_hash(config), config.seed)
        write_metadata(out_dir, config, {"regime": profile.provenance, "points": len(profile)})
    except RmtLabError as e:
        logger.error(f"Kernel tabulation failed: {str(e)}")
        console.print(f"[red]Error: {str(e)}[/red]")
        return None

    if not quiet:
        display_kernel_table(frame)
        console.print(f"[bold green]Wrote {path}[/bold green]")
    return profile
