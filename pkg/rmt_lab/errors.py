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

Exception hierarchy for rmt-lab
"""


class RmtLabError(Exception):
    """Base class for every error raised by rmt-lab"""


class DomainError(RmtLabError, ValueError):
    """An argument lies outside the domain of the operation"""


class EdgeError(DomainError):
    """A weak-regime anchor sits on or beyond the edge of the semicircle support"""


class ConvergenceError(RmtLabError, RuntimeError):
    """An iterative method did not converge

    Args:
        message (str): Human readable description
        block (tuple, optional): Unresolved (lo, hi) block of an eigenvalue iteration
        iterations (int, optional): Iterations spent before giving up
    """

    def __init__(self, message, block=None, iterations=None):
        super().__init__(message)
        self.block = block
        self.iterations = iterations


class RecurrenceOverflowError(RmtLabError, OverflowError):
    """A polynomial recurrence left the double-precision range"""


class ConfigError(RmtLabError, ValueError):
    """Invalid experiment configuration"""


class SamplerError(RmtLabError, RuntimeError):
    """A sampler could not produce a valid state"""
