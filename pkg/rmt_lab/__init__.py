"""
rmt-lab package - A numerical laboratory for non-Hermitian random matrix ensembles
"""

import logging

__version__ = '0.1.0'
__author__ = 'Samapriya Roy'

from rmt_lab.cmatrix import ComplexMatrix, Spectrum, eigenvalues, hessenberg
from rmt_lab.config import ExperimentConfig, config_hash, load_config, save_config
from rmt_lab.ensembles import (
    SamplerConfig,
    SpectrumSample,
    draw_spectra,
    mcmc_coulomb,
    mcmc_ft_elliptic,
    mcmc_trace_squared,
    sample_elliptic,
    sample_ft_ginibre,
    sample_gue,
    sample_pab,
)
from rmt_lab.errors import RmtLabError
from rmt_lab.kernels import KernelContext, k_strong, k_weak, k_weak_prop, kernel_contour, kernel_finite_n
from rmt_lab.params import ModelParams, derive, solve_k

# Set up a null handler for the package's logger
logging.getLogger("rmt-lab").addHandler(logging.NullHandler())

__all__ = [
    'ComplexMatrix',
    'Spectrum',
    'eigenvalues',
    'hessenberg',
    'ExperimentConfig',
    'config_hash',
    'load_config',
    'save_config',
    'SamplerConfig',
    'SpectrumSample',
    'draw_spectra',
    'mcmc_coulomb',
    'mcmc_ft_elliptic',
    'mcmc_trace_squared',
    'sample_elliptic',
    'sample_ft_ginibre',
    'sample_gue',
    'sample_pab',
    'RmtLabError',
    'KernelContext',
    'k_strong',
    'k_weak',
    'k_weak_prop',
    'kernel_contour',
    'kernel_finite_n',
    'ModelParams',
    'derive',
    'solve_k',
]
