"""
rmt-lab CLI commands package
"""

from .params import params_command
from .sample import sample_command
from .kernel import kernel_command
from .analyze import analyze_command
from .verify import verify_command

__all__ = [
    'params_command',
    'sample_command',
    'kernel_command',
    'analyze_command',
    'verify_command',
]
