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

Statistics over a written sample directory
"""

import json
import logging
import math
from pathlib import Path

from rich import box
from rich.console import Console
from rich.table import Table

from rmt_lab.config import ExperimentConfig, config_hash
from rmt_lab.errors import RmtLabError
from rmt_lab.io import (
    correlation_frame,
    histogram_frame,
    load_spectra,
    read_metadata,
    write_csv,
)
from rmt_lab.params import derive
from rmt_lab.stats import (
    STRONG_INTENSITY,
    esd_hist,
    gof,
    local_pair_correlation,
    marginal_x,
    off_axis_mass,
    semicircle_pdf,
    strong_pair_target,
)

logger = logging.getLogger("rmt-lab.commands.analyze")

ANALYSIS_FILE = "analysis.json"


def _sample_config(sample_dir, fallback):
    """Config recorded with the samples, so constants match the run that produced them"""
    try:
        recorded = ExperimentConfig.from_dict(read_metadata(sample_dir)["config"])
    except (RmtLabError, KeyError):
        logger.warning(f"No usable metadata in {sample_dir}; using the supplied config")
        return fallback
    return recorded.with_overrides(bins=fallback.bins, output=fallback.output, threads=fallback.threads)


def analyze_command(config, sample_dir=None, quiet=False):
    """
    ESD histogram, real-part marginal with semicircle GOF, off-axis mass and
    strong-regime g₂ for a sample directory

    Args:
        config (ExperimentConfig): Supplies bins and the output directory
        sample_dir (str, optional): Directory written by sample_command;
            defaults to the output directory
        quiet (bool): Skip the summary table

    Returns:
        dict: Summary if successful, None otherwise
    """
    console = Console()
    sample_dir = Path(sample_dir or config.output.directory)
    out_dir = Path(config.output.directory)
    try:
        spectra = load_spectra(sample_dir)
        run = _sample_config(sample_dir, config)
        derived = derive(run.model_params(), fixed_trace=run.fixed_trace)
        bins = config.bins
        digest = config_hash(run)

        hist = esd_hist(spectra, bins.x_edges(), bins.y_edges())
        marginal = marginal_x(spectra, bins.x_edges())
        fit = gof(marginal, lambda x: semicircle_pdf(x, derived.c_weak))
        off_axis = off_axis_mass(spectra, bins.delta_band)
        n = max(s.size for s in spectra)
        g2 = local_pair_correlation(spectra, bins.center_point, math.sqrt(derived.scale_strong * n),
                                    bins.r_edges(), window=bins.window, target=strong_pair_target,
                                    support=derived.ellipse, seed=config.seed,
                                    intensity=STRONG_INTENSITY)

        written = [
            write_csv(histogram_frame(hist), out_dir / "esd.csv", digest, config.seed),
            write_csv(histogram_frame(marginal), out_dir / "marginal_x.csv", digest, config.seed),
            write_csv(correlation_frame(g2), out_dir / "g2.csv", digest, config.seed),
        ]
        summary = {
            "config_hash": digest,
            "spectra": len(spectra),
            "eigenvalues": hist.total,
            "out_of_range": hist.out_of_range,
            "semicircle_c": derived.c_weak,
            "gof_ks": fit.ks,
            "gof_l1": fit.l1,
            "gof_chi2_p": fit.chi2_p,
            "off_axis_mass": off_axis,
            "g2_window_points": g2.n_window,
        }
        summary_path = out_dir / ANALYSIS_FILE
        with open(summary_path, "w", encoding="utf-8") as f:
            json.dump(summary, f, indent=2)
        written.append(summary_path)
    except RmtLabError as e:
        logger.error(f"Analysis failed: {str(e)}")
        console.print(f"[red]Error: {str(e)}[/red]")
        return None

    if not quiet:
        table = Table(show_header=True, header_style="bold magenta", box=box.ROUNDED)
        table.add_column("Statistic", style="cyan")
        table.add_column("Value", style="green")
        for key, value in summary.items():
            table.add_row(key, f"{value:.6g}" if isinstance(value, float) else f"{value}")
        console.print(table)
        for path in written:
            console.print(f"[bold green]Wrote {path}[/bold green]")
    return summary
