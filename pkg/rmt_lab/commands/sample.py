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

Sampling runs with record output and diagnostics
"""

import logging
import math
import time
from pathlib import Path

import numpy as np
from rich import box
from rich.console import Console
from rich.table import Table

from rmt_lab.ensembles import CHAIN_TAGS, draw_spectra, split_chain_check
from rmt_lab.errors import RmtLabError
from rmt_lab.io import write_metadata, write_spectra

logger = logging.getLogger("rmt-lab.commands.sample")


def sample_diagnostics(config, samples, runtime):
    """Run diagnostics recorded in metadata.json"""
    traces = np.array([s.diagnostics.get("trace_jj", math.nan) for s in samples], dtype=float)
    rates = np.array([s.diagnostics.get("accept_rate", math.nan) for s in samples], dtype=float)
    diagnostics = {
        "ensemble": config.ensemble,
        "n": config.n,
        "draws": len(samples),
        "eigenvalue_count": int(sum(s.n for s in samples)),
        "trace_jj_mean": float(np.nanmean(traces)),
        "trace_jj_min": float(np.nanmin(traces)),
        "trace_jj_max": float(np.nanmax(traces)),
        "trace_jj_target": config.n * config.k_p,
        "accept_rate_mean": float(np.nanmean(rates)),
        "runtime_s": runtime,
    }
    if config.ensemble in CHAIN_TAGS and len(samples) >= 4:
        diagnostics["stationarity_z"] = split_chain_check(traces)
        diagnostics["chains"] = config.chain.chains
    return diagnostics


def display_sample_table(diagnostics, written):
    console = Console()
    table = Table(show_header=True, header_style="bold magenta", box=box.ROUNDED)
    table.add_column("Diagnostic", style="cyan")
    table.add_column("Value", style="green")
    for key, value in diagnostics.items():
        table.add_row(key, f"{value:.10g}" if isinstance(value, float) else f"{value}")
    console.print(table)
    for path in written:
        console.print(f"[bold green]Wrote {path}[/bold green]")


def sample_command(config, quiet=False):
    """
    Run the configured sampler and write records plus metadata

    Args:
        config (ExperimentConfig): Experiment configuration
        quiet (bool): Disable the progress bar and the summary table

    Returns:
        dict: Metadata diagnostics if successful, None otherwise
    """
    console = Console()
    out_dir = Path(config.output.directory)
    start = time.perf_counter()
    try:
        samples = draw_spectra(config.ensemble, config.sampler_config(), config.draws,
                               threads=config.threads, backend=config.backend, progress=not quiet)
        diagnostics = sample_diagnostics(config, samples, time.perf_counter() - start)
        written = write_spectra(samples, out_dir, config)
        written.append(write_metadata(out_dir, config, diagnostics))
    except RmtLabError as e:
        logger.error(f"Sampling failed: {str(e)}")
        console.print(f"[red]Error: {str(e)}[/red]")
        return None

    logger.info(f"Sampled {len(samples)} {config.ensemble} spectra into {out_dir}")
    if not quiet:
        display_sample_table(diagnostics, written)
    return diagnostics
