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

Model constants report
"""

import cmath
import json
import logging

from rich import box
from rich.console import Console
from rich.table import Table

from rmt_lab.errors import EdgeError, RmtLabError
from rmt_lab.params import derive, k_ft, weak_scaling

logger = logging.getLogger("rmt-lab.commands.params")


def params_report(config):
    """
    Derived constants for a config as a JSON-ready dict

    Args:
        config (ExperimentConfig): Experiment configuration

    Returns:
        dict: K, K̄, K_FT, C, c_a, ellipse axes and weak scalings
    """
    model = config.model_params()
    derived = derive(model, fixed_trace=config.fixed_trace)
    c_a = None if derived.c_at_sq is None else cmath.sqrt(derived.c_at_sq)
    report = {
        "ensemble": config.ensemble,
        "tau": model.tau,
        "gamma": model.gamma,
        "k_p": model.k_p,
        "n": model.n,
        "t": model.t,
        "K": derived.k,
        "gamma_K": derived.gamma_k,
        "K_bar": derived.kbar,
        "K_FT": k_ft(model.tau, model.k_p),
        "C_strong": derived.scale_strong,
        "C": derived.c_weak,
        "c_a": None if c_a is None else {"re": c_a.real, "im": c_a.imag},
        "a": {"re": derived.a_t.real, "im": derived.a_t.imag},
        "b": derived.b,
        "ellipse_semi_axes": list(derived.ellipse.semi_axes),
        "ellipse_degenerate": derived.ellipse.degenerate,
    }

    alpha = config.alpha if config.alpha is not None else 1.0
    try:
        scaling = weak_scaling(config.x_global, alpha, derived.c_weak)
        report["weak"] = {
            "x": scaling.x,
            "alpha": scaling.alpha,
            "nu": scaling.nu,
            "tau_n": scaling.tau_n(model.n),
            "local_scale": scaling.local_scale(model.n),
            "alpha_tilde": scaling.alpha_tilde,
        }
    except EdgeError as e:
        report["weak"] = {"error": str(e)}
    return report


def display_params_table(report):
    console = Console()
    table = Table(show_header=True, header_style="bold magenta", box=box.ROUNDED)
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green")

    for key in ("ensemble", "tau", "gamma", "k_p", "n", "K", "K_bar", "K_FT", "C_strong", "C", "b"):
        table.add_row(key, f"{report[key]}")
    if report["c_a"] is not None:
        table.add_row("c_a", f"{complex(report['c_a']['re'], report['c_a']['im']):.10g}")
    a_axis, b_axis = report["ellipse_semi_axes"]
    table.add_row("ellipse semi-axes", f"{a_axis:.10g}, {b_axis:.10g}")
    for key, value in report["weak"].items():
        table.add_row(f"weak {key}", f"{value}")
    console.print(table)


def params_command(config, json_output=False):
    """
    Print derived constants

    Args:
        config (ExperimentConfig): Experiment configuration
        json_output (bool): Print the JSON report instead of a table

    Returns:
        dict: The report if successful, None otherwise
    """
    console = Console()
    try:
        report = params_report(config)
    except RmtLabError as e:
        logger.error(f"Could not derive parameters: {str(e)}")
        console.print(f"[red]Error: {str(e)}[/red]")
        return None

    if json_output:
        console.print_json(json.dumps(report))
    else:
        display_params_table(report)
    return report
