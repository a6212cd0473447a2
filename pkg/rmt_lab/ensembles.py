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

Random matrix samplers: exact Gaussian and fixed-trace draws, Metropolis
chains for the fixed-trace elliptic and trace-squared ensembles, and an
eigenvalue-level Coulomb gas
"""

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, special
from tqdm import tqdm

from rmt_lab.cmatrix import ComplexMatrix, Spectrum, eigenvalues
from rmt_lab.errors import ConfigError, DomainError, SamplerError
from rmt_lab.params import ModelParams, covariance_pab, k_ft, solve_k

logger = logging.getLogger("rmt-lab.ensembles")

ENSEMBLE_TAGS = ("gue", "ginibre", "elliptic", "pab", "ft_ginibre", "ft_elliptic", "trace_squared", "coulomb")
EXACT_TAGS = ("gue", "ginibre", "elliptic", "pab", "ft_ginibre")
CHAIN_TAGS = ("ft_elliptic", "trace_squared", "coulomb")
FIXED_TRACE_TAGS = ("ft_ginibre", "ft_elliptic")

PROPOSALS = {
    "ft_elliptic": ("pcn", "sphere", "geodesic"),
    "trace_squared": ("pcn", "rw"),
    "coulomb": ("rw",),
}
DEFAULT_PROPOSAL = {"ft_elliptic": "pcn", "trace_squared": "pcn", "coulomb": "rw"}

SPHERE_STEP_CAP = 1e-2
ADAPT_WINDOW = 100
ACCEPT_WARN = (0.05, 0.95)
FIXED_TRACE_RTOL = 1e-10
MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class ChainSettings:
    """
    Metropolis chain hyperparameters

    Attributes:
        step_size (float): Initial proposal scale. pCN mixing weight β for "pcn",
            entry-scale multiple for "rw" and "sphere", great-circle angle for "geodesic"
        burn_in (int): Sweeps discarded before the first kept state
        thin (int, optional): Sweeps between kept states, N when None
        target_accept (float): Acceptance rate the step is adapted toward during burn-in
        proposal (str, optional): Proposal kind, the ensemble default when None
        chains (int): Independent chains run by draw_spectra
    """

    step_size: float = 0.1
    burn_in: int = 100_000
    thin: Optional[int] = None
    target_accept: float = 0.3
    proposal: Optional[str] = None
    chains: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.step_size) and self.step_size > 0.0):
            raise ConfigError(f"step_size must be positive, got {self.step_size}")
        if int(self.burn_in) != self.burn_in or self.burn_in < 0:
            raise ConfigError(f"burn_in must be a nonnegative integer, got {self.burn_in}")
        if self.thin is not None and (int(self.thin) != self.thin or self.thin < 0):
            raise ConfigError(f"thin must be a nonnegative integer, got {self.thin}")
        if not 0.0 < self.target_accept < 1.0:
            raise ConfigError(f"target_accept must lie in (0, 1), got {self.target_accept}")
        if int(self.chains) != self.chains or self.chains < 1:
            raise ConfigError(f"chains must be a positive integer, got {self.chains}")
        known = {name for names in PROPOSALS.values() for name in names}
        if self.proposal is not None and self.proposal not in known:
            raise ConfigError(f"Unknown proposal '{self.proposal}'. Available: {', '.join(sorted(known))}")

    def thin_for(self, n):
        return n if self.thin is None else max(1, int(self.thin))


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters, seed and chain settings of one sampling run"""

    params: ModelParams
    seed: Optional[int] = 0
    chain: ChainSettings = field(default_factory=ChainSettings)

    def __post_init__(self):
        if self.seed is not None and (int(self.seed) != self.seed or not 0 <= self.seed < MAX_SEED):
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class SpectrumSample:
    """
    One draw's eigenvalues with provenance

    Attributes:
        eigenvalues (numpy.ndarray): Complex eigenvalues in (Re, Im) order
        ensemble_tag (str): One of ENSEMBLE_TAGS
        seed (int): Run seed
        diagnostics (dict): accept_rate, trace_jj and sampler-specific entries
    """

    eigenvalues: np.ndarray
    ensemble_tag: str
    seed: Optional[int] = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ensemble_tag not in ENSEMBLE_TAGS:
            raise DomainError(f"Unknown ensemble tag '{self.ensemble_tag}'")
        object.__setattr__(self, "eigenvalues", Spectrum(self.eigenvalues).values)

    @property
    def n(self):
        return self.eigenvalues.size


def make_generator(seed):
    """Philox generator from a seed, SeedSequence or an existing Generator"""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def spawn_generators(seed, count):
    """Independent Philox substreams, one per draw or chain"""
    return [np.random.Generator(np.random.Philox(child))
            for child in np.random.SeedSequence(seed).spawn(count)]


def trace_jj(entries):
    """Tr JJ* over the last two axes"""
    entries = np.asarray(entries)
    return np.sum(entries.real ** 2 + entries.imag ** 2, axis=(-2, -1))


def re_trace_square(entries):
    """Re Tr J² over the last two axes"""
    entries = np.asarray(entries)
    return np.sum(entries * np.swapaxes(entries, -1, -2), axis=(-2, -1)).real


def _shape(n, size):
    return (n, n) if size is None else (size, n, n)


def _complex_normal(rng, shape, variance):
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"Matrix size must be a positive integer, got {n}")
    return int(n)


def gue_entries(n, rng, size=None):
    """GUE draws with density ∝ exp(-N Tr J²)"""
    n = _check_n(n)
    a = _complex_normal(rng, _shape(n, size), 1.0 / n)
    return (a + np.conj(np.swapaxes(a, -1, -2))) / 2.0


def ginibre_entries(n, rng, size=None):
    """i.i.d. complex Gaussian entries with E|J_jk|² = 1/N"""
    n = _check_n(n)
    return _complex_normal(rng, _shape(n, size), 1.0 / n)


def elliptic_entries(n, tau, rng, size=None):
    """J = sqrt(1+τ) J1 + i sqrt(1-τ) J2 with J1, J2 independent GUE"""
    if not -1.0 < tau < 1.0:
        raise DomainError(f"tau must lie in (-1, 1), got {tau}")
    first = gue_entries(n, rng, size)
    second = gue_entries(n, rng, size)
    return math.sqrt(1.0 + tau) * first + 1j * math.sqrt(1.0 - tau) * second


def pab_entries(cov, rng, size=None):
    """
    Exact draws from the linearized Gaussian P_{a,b}

    Off-diagonal pairs are built from the eigenvectors of their 2x2 blocks:
    (Re J_jk, Re J_kj) has covariance ρ and (Im J_jk, Im J_kj) has -ρ.

    Args:
        cov (PabCovariance): Entry covariances
        rng (numpy.random.Generator): Random stream
        size (int, optional): Batch size; a single (N, N) array when None

    Returns:
        numpy.ndarray: Complex draws of shape (N, N) or (size, N, N)
    """
    n = cov.n
    count = 1 if size is None else size
    upper = np.triu_indices(n, 1)
    normals = rng.standard_normal((4, count, upper[0].size))
    plus, minus = math.sqrt(cov.lambda_plus_sq), math.sqrt(cov.lambda_minus_sq)
    root2 = math.sqrt(2.0)

    out = np.empty((count, n, n), dtype=np.complex128)
    out[:, upper[0], upper[1]] = ((plus * normals[0] + minus * normals[1])
                                  + 1j * (minus * normals[2] + plus * normals[3])) / root2
    out[:, upper[1], upper[0]] = ((plus * normals[0] - minus * normals[1])
                                  + 1j * (minus * normals[2] - plus * normals[3])) / root2
    diagonal = rng.standard_normal((2, count, n))
    index = np.arange(n)
    out[:, index, index] = (math.sqrt(cov.var_diag_re) * diagonal[0]
                            + 1j * math.sqrt(cov.var_diag_im) * diagonal[1])
    return out[0] if size is None else out


def ft_ginibre_entries(n, k_p, rng, size=None):
    """Uniform draws on the sphere Tr JJ* = N K_p"""
    if not k_p > 0.0:
        raise DomainError(f"k_p must be positive, got {k_p}")
    n = _check_n(n)
    raw = ginibre_entries(n, rng, size)
    batch = raw.reshape(-1, n, n)
    norms = np.sqrt(trace_jj(batch))
    while np.any(norms == 0.0):
        zero = np.flatnonzero(norms == 0.0)
        batch[zero] = ginibre_entries(n, rng, zero.size)
        norms = np.sqrt(trace_jj(batch))
    batch = math.sqrt(n * k_p) * batch / norms[:, None, None]
    return batch[0] if size is None else batch


def sample_gue(n, seed=None):
    """
    Hermitian GUE matrix with diagonal variance 1/(2N) and off-diagonal
    real and imaginary variances 1/(4N)
    """
    return ComplexMatrix(gue_entries(n, make_generator(seed)))


def sample_ginibre(n, seed=None):
    """Ginibre matrix, the τ = 0 elliptic ensemble"""
    return ComplexMatrix(ginibre_entries(n, make_generator(seed)))


def sample_elliptic(n, tau, seed=None):
    """Elliptic Ginibre matrix with correlation τ between J_jk and J_kj"""
    return ComplexMatrix(elliptic_entries(n, tau, make_generator(seed)))


def sample_pab(config, fixed_trace=False):
    """
    Exact draw from P_{a,b} with K = solve_k

    Args:
        config (SamplerConfig): Parameters and seed
        fixed_trace (bool): Use γK = K_FT instead

    Returns:
        ComplexMatrix
    """
    cov = covariance_pab(config.params, fixed_trace=fixed_trace)
    return ComplexMatrix(pab_entries(cov, make_generator(config.seed)))


def sample_ft_ginibre(n, k_p, seed=None):
    """J = sqrt(N K_p) G/‖G‖_F with G Ginibre"""
    return ComplexMatrix(ft_ginibre_entries(n, k_p, make_generator(seed)))


def sample_trace_pab(params, size, seed=None):
    """Tr JJ* under P_{a,b} drawn from its weighted χ² representation"""
    rng = make_generator(seed)
    total = np.zeros(size)
    for scale, dof in covariance_pab(params).chi_square_terms():
        if dof > 0:
            total += scale * rng.chisquare(dof, size)
    return total


class MetropolisChain:
    """
    Adaptive Metropolis chain

    Subclasses provide the state, the proposal and the log weight whose
    differences decide acceptance. For reference-reversible proposals the
    weight is the target density relative to the reference Gaussian.
    """

    tag = None
    step_caps = {}

    def __init__(self, config, rng=None):
        self.config = config
        self.params = config.params
        self.settings = config.chain
        self.rng = make_generator(config.seed) if rng is None else rng
        self.proposal = self.settings.proposal or DEFAULT_PROPOSAL[self.tag]
        if self.proposal not in PROPOSALS[self.tag]:
            raise SamplerError(f"Proposal '{self.proposal}' is not available for {self.tag}. "
                               f"Use one of: {', '.join(PROPOSALS[self.tag])}")
        self.step = min(self.settings.step_size, self.step_cap)
        self.thin = self.settings.thin_for(self.params.n)
        self.accepted = 0
        self.proposed = 0
        self.burned_in = False
        self.state = self.initial_state()
        self.log_weight = self.weight(self.state)

    @property
    def step_cap(self):
        return self.step_caps.get(self.proposal, math.inf)

    @property
    def updates_per_sweep(self):
        return 1

    @property
    def accept_rate(self):
        return self.accepted / self.proposed if self.proposed else math.nan

    def initial_state(self):
        raise NotImplementedError

    def propose(self):
        raise NotImplementedError

    def weight(self, state):
        raise NotImplementedError

    def emit(self):
        raise NotImplementedError

    def sweep(self):
        """One Metropolis update; returns the number of accepted moves"""
        candidate = self.propose()
        log_weight = self.weight(candidate)
        self.proposed += 1
        log_ratio = log_weight - self.log_weight
        if log_ratio >= 0.0 or self.rng.random() < math.exp(log_ratio):
            self.state = candidate
            self.log_weight = log_weight
            self.accepted += 1
            return 1
        return 0

    def burn_in(self):
        """Run the burn-in sweeps, adapting the step toward target_accept"""
        window = 0
        for i in range(1, self.settings.burn_in + 1):
            window += self.sweep()
            if i % ADAPT_WINDOW == 0:
                rate = window / (ADAPT_WINDOW * self.updates_per_sweep)
                self.step = min(self.step_cap, self.step * math.exp(rate - self.settings.target_accept))
                window = 0
        logger.debug(f"{self.tag} burn-in done: {self.settings.burn_in} sweeps, "
                     f"proposal={self.proposal}, step={self.step:.4g}, acceptance={self.accept_rate:.3f}")
        self.accepted = 0
        self.proposed = 0
        self.burned_in = True

    def stream(self, count=None):
        """
        Kept states after burn-in, thin sweeps apart

        Args:
            count (int, optional): Number of states; unbounded when None

        Yields:
            The emitted state (see emit)
        """
        if not self.burned_in:
            self.burn_in()
        kept = 0
        while count is None or kept < count:
            for _ in range(self.thin):
                self.sweep()
            kept += 1
            yield self.emit()
        self.check_acceptance()

    def check_acceptance(self):
        """Warn when the post-burn-in acceptance rate leaves [0.05, 0.95]"""
        rate = self.accept_rate
        low, high = ACCEPT_WARN
        if rate < low or (rate > high and self.step < self.step_cap):
            logger.warning(f"{self.tag} chain acceptance rate {rate:.3f} is outside [{low}, {high}] "
                           f"(proposal={self.proposal}, step={self.step:.4g})")
            return False
        return True

    def diagnostics(self):
        return {
            "accept_rate": self.accept_rate,
            "step": self.step,
            "proposal": self.proposal,
        }


class TraceSquaredChain(MetropolisChain):
    """
    Chain for the trace-squared ensemble

    "pcn" moves J' = sqrt(1-β²)J + βG with G ~ P_{a,b}, which is reversible for
    P_{a,b}; the weight is then the tilt -γ(Tr JJ* - N(K_p + K))². "rw" is a
    plain random walk on the full log density.
    """

    tag = "trace_squared"
    step_caps = {"pcn": 1.0}

    def __init__(self, config, rng=None):
        p = config.params
        self.k = solve_k(p.tau, p.gamma, p.k_p)
        self.cov = covariance_pab(p)
        self.center = p.n * (p.k_p + self.k)
        self.confinement = p.n / (1.0 - p.tau ** 2)
        super().__init__(config, rng)

    def initial_state(self):
        return pab_entries(self.cov, self.rng)

    def propose(self):
        if self.proposal == "pcn":
            beta = self.step
            return math.sqrt(1.0 - beta * beta) * self.state + beta * pab_entries(self.cov, self.rng)
        return self.state + self.step * ginibre_entries(self.params.n, self.rng)

    def weight(self, state):
        p = self.params
        trace = trace_jj(state)
        if self.proposal == "pcn":
            return -p.gamma * (trace - self.center) ** 2
        return (-self.confinement * (trace - p.tau * re_trace_square(state))
                - p.gamma * (trace - p.n * p.k_p) ** 2)

    def emit(self):
        return ComplexMatrix(self.state)


class FixedTraceEllipticChain(MetropolisChain):
    """
    Chain for the elliptic fixed-trace ensemble on Tr JJ* = N K_p

    "pcn" runs on the radial lift of the sphere. The reference is P_{â,b} with
    γK = K_FT; its angular marginal is ∝ (â - b s)^{-N²} with s = Re Tr Ω², so the
    weight b N K_p s + N² log(â - b s) makes Ω = J/‖J‖ exactly target-distributed.
    "sphere" takes a Gaussian step and renormalizes. "geodesic" moves along a
    great circle in a uniformly drawn tangent direction.
    """

    tag = "ft_elliptic"
    step_caps = {"pcn": 1.0, "sphere": SPHERE_STEP_CAP, "geodesic": math.pi / 2.0}

    def __init__(self, config, rng=None):
        p = config.params
        s = 1.0 - p.tau ** 2
        self.radius = math.sqrt(p.n * p.k_p)
        self.cov = covariance_pab(p, fixed_trace=True)
        self.a_hat = p.n * (1.0 / s + 2.0 * k_ft(p.tau, p.k_p))
        self.b = p.tau * p.n / s
        super().__init__(config, rng)

    def _to_sphere(self, entries):
        return self.radius * entries / math.sqrt(trace_jj(entries))

    def initial_state(self):
        if self.proposal == "pcn":
            return pab_entries(self.cov, self.rng)
        return ft_ginibre_entries(self.params.n, self.params.k_p, self.rng)

    def propose(self):
        n = self.params.n
        if self.proposal == "pcn":
            beta = self.step
            return math.sqrt(1.0 - beta * beta) * self.state + beta * pab_entries(self.cov, self.rng)
        if self.proposal == "sphere":
            step = self.step * math.sqrt(self.params.k_p) * ginibre_entries(n, self.rng)
            return self._to_sphere(self.state + step)
        omega = self.state / self.radius
        direction = ginibre_entries(n, self.rng)
        direction = direction - np.vdot(omega, direction).real * omega
        direction = direction / math.sqrt(trace_jj(direction))
        return self._to_sphere(math.cos(self.step) * omega + math.sin(self.step) * direction)

    def weight(self, state):
        p = self.params
        s = re_trace_square(state) / trace_jj(state)
        tilt = self.b * p.n * p.k_p * s
        if self.proposal == "pcn":
            return tilt + p.n ** 2 * math.log(self.a_hat - self.b * s)
        return tilt

    def emit(self):
        return ComplexMatrix(self._to_sphere(self.state))


class CoulombChain(MetropolisChain):
    """
    Single-eigenvalue Metropolis on ℂ^N for the normal-matrix eigenvalue density

    Σ_{j<l} 2 log|z_j - z_l| - N/(1-τ²)[Σ|z_j|² - τ Σ Re z_j²] - γ(Σ|z_j|² - N K_p)²

    One sweep updates every point once; coincident proposals are rejected.
    """

    tag = "coulomb"

    def __init__(self, config, rng=None):
        p = config.params
        self.confinement = p.n / (1.0 - p.tau ** 2)
        self.target_sum = p.n * p.k_p
        super().__init__(config, rng)
        self.sum_sq = float(np.sum(np.abs(self.state) ** 2))

    @property
    def updates_per_sweep(self):
        return self.params.n

    def initial_state(self):
        start = pab_entries(covariance_pab(self.params), self.rng)
        return np.array(eigenvalues(start).values)

    def weight(self, state):
        p = self.params
        distances = np.abs(state[:, None] - state[None, :])[np.triu_indices(p.n, 1)]
        if np.any(distances == 0.0):
            return -math.inf
        radial = np.sum(np.abs(state) ** 2)
        return (2.0 * np.sum(np.log(distances))
                - self.confinement * (radial - p.tau * np.sum(state.real ** 2 - state.imag ** 2))
                - p.gamma * (radial - self.target_sum) ** 2)

    def sweep(self):
        p = self.params
        z = self.state
        scale = self.step / math.sqrt(p.n)
        accepted = 0
        for j in range(p.n):
            old = z[j]
            new = old + scale * complex(self.rng.standard_normal(), self.rng.standard_normal())
            new_distances = np.abs(new - z)
            old_distances = np.abs(old - z)
            new_distances[j] = old_distances[j] = 1.0
            self.proposed += 1
            if np.any(new_distances == 0.0):
                continue
            new_sq, old_sq = abs(new) ** 2, abs(old) ** 2
            new_sum = self.sum_sq + new_sq - old_sq
            log_ratio = (2.0 * np.sum(np.log(new_distances) - np.log(old_distances))
                         - self.confinement * ((new_sq - old_sq) - p.tau * ((new * new).real - (old * old).real))
                         - p.gamma * ((new_sum - self.target_sum) ** 2 - (self.sum_sq - self.target_sum) ** 2))
            if log_ratio >= 0.0 or self.rng.random() < math.exp(log_ratio):
                z[j] = new
                self.sum_sq = new_sum
                accepted += 1
        self.accepted += accepted
        self.sum_sq = float(np.sum(np.abs(z) ** 2))
        return accepted

    def emit(self):
        diagnostics = self.diagnostics()
        diagnostics["trace_jj"] = self.sum_sq
        return SpectrumSample(self.state.copy(), "coulomb", self.config.seed, diagnostics)


CHAINS = {
    "ft_elliptic": FixedTraceEllipticChain,
    "trace_squared": TraceSquaredChain,
    "coulomb": CoulombChain,
}


def mcmc_ft_elliptic(config, count=None):
    """Stream of ComplexMatrix states of the elliptic fixed-trace ensemble"""
    return FixedTraceEllipticChain(config).stream(count)


def mcmc_trace_squared(config, count=None):
    """Stream of ComplexMatrix states of the trace-squared ensemble"""
    return TraceSquaredChain(config).stream(count)


def mcmc_coulomb(config, count=None):
    """Stream of SpectrumSample states of the Coulomb gas"""
    return CoulombChain(config).stream(count)


def _exact_draw(tag, config, cov):
    p = config.params
    draws = {
        "gue": lambda rng: gue_entries(p.n, rng),
        "ginibre": lambda rng: ginibre_entries(p.n, rng),
        "elliptic": lambda rng: elliptic_entries(p.n, p.tau, rng),
        "pab": lambda rng: pab_entries(cov, rng),
        "ft_ginibre": lambda rng: ft_ginibre_entries(p.n, p.k_p, rng),
    }
    return draws[tag]


def _check_fixed_trace(tag, trace, params):
    target = params.n * params.k_p
    if tag in FIXED_TRACE_TAGS and abs(trace - target) > FIXED_TRACE_RTOL * target:
        raise SamplerError(f"{tag} draw left the sphere: Tr JJ* = {trace!r}, expected {target!r}")


def draw_spectra(tag, config, n_draws, threads=1, backend=None, progress=False):
    """
    Draw n_draws spectra of an ensemble

    Exact samplers give every draw its own substream; chains give every chain
    its own substream and split the kept states evenly. Results are assembled
    in draw order, so the output does not depend on threads.

    Args:
        tag (str): Ensemble tag
        config (SamplerConfig): Parameters, seed and chain settings
        n_draws (int): Number of spectra
        threads (int): Worker threads
        backend (str, optional): Eigenvalue backend
        progress (bool): Show a tqdm progress bar

    Returns:
        list: SpectrumSample objects
    """
    if tag not in ENSEMBLE_TAGS:
        raise ConfigError(f"Unknown ensemble '{tag}'. Available: {', '.join(ENSEMBLE_TAGS)}")
    if n_draws < 1:
        raise DomainError(f"n_draws must be positive, got {n_draws}")
    params = config.params
    logger.info(f"Drawing {n_draws} {tag} spectra at N={params.n} (seed={config.seed}, threads={threads})")

    if tag in EXACT_TAGS:
        cov = covariance_pab(params) if tag == "pab" else None
        draw = _exact_draw(tag, config, cov)
        generators = spawn_generators(config.seed, n_draws)

        def draw_one(index):
            entries = draw(generators[index])
            trace = float(trace_jj(entries))
            _check_fixed_trace(tag, trace, params)
            values = eigenvalues(entries, backend=backend).values
            return SpectrumSample(values, tag, config.seed,
                                  {"draw": index, "accept_rate": 1.0, "trace_jj": trace})

        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(tqdm(executor.map(draw_one, range(n_draws)), total=n_draws,
                             desc=tag, disable=not progress))

    chains = config.chain.chains
    per_chain = -(-n_draws // chains)
    generators = spawn_generators(config.seed, chains)
    bar = tqdm(total=chains * per_chain, desc=tag, disable=not progress)
    lock = threading.Lock()

    def run_chain(index):
        chain = CHAINS[tag](config, rng=generators[index])
        samples = []
        for state in chain.stream(per_chain):
            if isinstance(state, SpectrumSample):
                diagnostics = dict(state.diagnostics, chain=index)
                sample = SpectrumSample(state.eigenvalues, tag, config.seed, diagnostics)
            else:
                trace = state.trace_jj()
                _check_fixed_trace(tag, trace, params)
                diagnostics = dict(chain.diagnostics(), chain=index, trace_jj=trace)
                sample = SpectrumSample(eigenvalues(state, backend=backend).values, tag, config.seed, diagnostics)
            samples.append(sample)
            with lock:
                bar.update(1)
        return samples

    try:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(run_chain, range(chains)))
    finally:
        bar.close()
    return [sample for chunk in results for sample in chunk][:n_draws]


def split_chain_check(values, batches=10):
    """
    Split-half stationarity statistic

    Args:
        values (array_like): A scalar chain observable in chain order
        batches (int): Batch-means blocks per half for the standard errors

    Returns:
        float: |mean(first half) - mean(second half)| in combined standard errors
    """
    values = np.asarray(values, dtype=float)
    if values.size < 4:
        raise DomainError(f"split_chain_check needs at least 4 values, got {values.size}")
    half = values.size // 2
    first, second = values[:half], values[half:2 * half]

    def batch_se(x):
        k = max(2, min(batches, x.size // 2))
        means = np.array([chunk.mean() for chunk in np.array_split(x, k)])
        return means.std(ddof=1) / math.sqrt(k)

    combined = math.hypot(batch_se(first), batch_se(second))
    difference = abs(first.mean() - second.mean())
    if combined == 0.0:
        return 0.0 if difference == 0.0 else math.inf
    return difference / combined


def coulomb_pair_moment(tau, gamma=0.0, k_p=1.0):
    """
    E[|z_1|² + |z_2|²] for the two-point Coulomb gas by deterministic quadrature

    In centre-of-mass coordinates w = (z1+z2)/√2, d = (z1-z2)/√2 the angles
    integrate to Bessel I0 factors, leaving a double integral over u = |w|², v = |d|².

    Args:
        tau (float): τ in (-1, 1)
        gamma (float): γ >= 0
        k_p (float): K_p > 0

    Returns:
        float: The exact second moment, (N + 1)/2 = 1.5 at τ = γ = 0
    """
    ModelParams(tau=tau, gamma=gamma, k_p=k_p, n=2)
    n = 2
    s = 1.0 - tau * tau
    kappa = abs(tau) * n / s
    decay = n / (1.0 + abs(tau))
    target = n * k_p

    peak = max(0.0, target - decay / (2.0 * gamma)) if gamma > 0.0 else 0.0
    shift = decay * peak + gamma * (peak - target) ** 2
    upper = peak + 60.0 / decay + (10.0 / math.sqrt(gamma) if gamma > 0.0 else 0.0)

    def density(v, u):
        total = u + v
        return (v * special.i0e(kappa * u) * special.i0e(kappa * v)
                * math.exp(-decay * total - gamma * (total - target) ** 2 + shift))

    norm, _ = integrate.dblquad(density, 0.0, upper, 0.0, upper, epsabs=0.0, epsrel=1e-10)
    moment, _ = integrate.dblquad(lambda v, u: (u + v) * density(v, u), 0.0, upper, 0.0, upper,
                                  epsabs=0.0, epsrel=1e-10)
    return moment / norm
