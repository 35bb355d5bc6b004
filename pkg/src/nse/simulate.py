"""Monte Carlo study of NSE coverage, FDR and power in the Gaussian mean model.

Each trial draws its own Philox stream keyed by (seed, trial_index), so a
trial can be regenerated in isolation and results do not depend on how
trials are spread over workers. Per-trial outcomes are stored in trial
order and reduced in that order.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import erfc

from . import pi0 as pi0_mod
from .decisions import Method, NseDecision, decide, rejection_set
from .errors import InvalidScenario, NSEError
from .pi0 import DEFAULT_LAMBDA
from .pvalues import PValueSet
from .theory import GaussianScenario, f1_cdf

DEFAULT_SEED = 20240611
DEFAULT_METHODS = (
    Method.ORACLE_NORMAL,
    Method.SGOF,
    Method.PLUGIN_STOREY,
    Method.PLUGIN_DALMASSO,
    Method.UPDATED_STOREY,
    Method.UPDATED_DALMASSO,
)
CHUNK_SIZE = 64
_U64 = 2 ** 64


class SimulationError(NSEError, RuntimeError):
    def __init__(self, trial_index: int, method: Method, cause: Exception):
        self.trial_index = trial_index
        self.method = method
        super().__init__(f"trial {trial_index}, method {method.value}: {cause}")


@dataclass(frozen=True)
class SimScenario:
    m: int
    pi0: float
    mu: float
    n: int = 5
    gamma: float = 0.05
    alpha: float = 0.05
    reps: int = 5000
    seed: int = DEFAULT_SEED
    methods: tuple = DEFAULT_METHODS
    lambda_: float = DEFAULT_LAMBDA

    def __post_init__(self):
        try:
            methods = tuple(Method.parse(x) if isinstance(x, str) else Method(x) for x in self.methods)
        except (ValueError, NSEError) as exc:
            raise InvalidScenario(str(exc)) from None
        object.__setattr__(self, "methods", methods)
        if self.m < 1:
            raise InvalidScenario(f"m must be >= 1, got {self.m}")
        if self.n < 1:
            raise InvalidScenario(f"n must be >= 1, got {self.n}")
        if self.reps < 1:
            raise InvalidScenario(f"reps must be >= 1, got {self.reps}")
        if not 0.0 <= self.pi0 <= 1.0:
            raise InvalidScenario(f"pi0 must lie in [0, 1], got {self.pi0!r}")
        for name in ("gamma", "alpha", "lambda_"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise InvalidScenario(f"{name.rstrip('_')} must lie in (0, 1), got {v!r}")
        if not math.isfinite(self.mu):
            raise InvalidScenario("mu must be finite")
        if not 0 <= self.seed < _U64:
            raise InvalidScenario("seed must be a 64-bit unsigned integer")
        if not methods:
            raise InvalidScenario("at least one method is required")
        if Method.EXPECTED_STOREY in methods and self.gamma > self.lambda_:
            raise InvalidScenario("expected_storey requires gamma <= lambda")

    @property
    def gaussian(self) -> GaussianScenario:
        return GaussianScenario(self.mu, self.n, self.pi0)


@dataclass(frozen=True)
class TruthLabeledTrial:
    ps: PValueSet
    is_alternative: np.ndarray
    n_alt_sig: int
    gamma: float

    @property
    def n_alternatives(self) -> int:
        return int(self.is_alternative.sum())


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Counter-based stream for one trial: Philox keyed by (seed, trial_index)."""
    return np.random.Generator(np.random.Philox(key=(trial_index << 64) | seed))


def gen_trial(sc: SimScenario, trial_index: int) -> TruthLabeledTrial:
    if not 0 <= trial_index < sc.reps:
        raise IndexError(f"trial_index must lie in [0, {sc.reps}), got {trial_index}")
    rng = trial_rng(sc.seed, trial_index)
    is_alt = rng.random(sc.m) < (1.0 - sc.pi0)
    z = rng.standard_normal(sc.m)
    z[is_alt] += math.sqrt(sc.n) * sc.mu
    p = erfc(np.abs(z) / math.sqrt(2.0))
    is_alt.setflags(write=False)
    ps = PValueSet(p)
    n_alt_sig = int(np.count_nonzero(is_alt & (ps.values <= sc.gamma)))
    return TruthLabeledTrial(ps, is_alt, n_alt_sig, sc.gamma)


def error_counts(trial: TruthLabeledTrial, decision: NseDecision) -> tuple[int, int, int]:
    """(FP, FN, TP) of a decision against the truth labels.

    FN counts alternatives with p <= gamma that were not rejected.
    """
    rejected = np.zeros(trial.ps.m, dtype=bool)
    rejected[rejection_set(trial.ps, decision)] = True
    alt = trial.is_alternative
    sig = trial.ps.values <= trial.gamma
    fp = int(np.count_nonzero(rejected & ~alt))
    fn = int(np.count_nonzero(~rejected & alt & sig))
    tp = int(np.count_nonzero(rejected & alt))
    return fp, fn, tp


@dataclass(frozen=True)
class MethodResult:
    method: Method
    nse_coverage: float
    coverage_se: float
    fdr: float
    fdr_se: float
    power: float | None
    power_se: float | None
    reps_used: int
    power_reps: int
    expected_coverage: float | None = None


@dataclass(frozen=True)
class SimResult:
    scenario: SimScenario
    methods: dict = field(default_factory=dict)
    pi0_storey_mean: float = math.nan
    pi0_storey_sd: float = math.nan
    pi0_dalmasso_mean: float = math.nan
    pi0_dalmasso_sd: float = math.nan

    def __getitem__(self, method) -> MethodResult:
        key = Method.parse(method) if isinstance(method, str) else method
        return self.methods[key]


def _run_chunk(sc: SimScenario, indices: range):
    k = len(sc.methods)
    n_rej = np.zeros((len(indices), k), dtype=np.int64)
    fp = np.zeros((len(indices), k), dtype=np.int64)
    n_alt_sig = np.zeros(len(indices), dtype=np.int64)
    n_alt = np.zeros(len(indices), dtype=np.int64)
    pi0s = np.zeros((len(indices), 2))
    for row, t in enumerate(indices):
        trial = gen_trial(sc, t)
        ps = trial.ps
        null_in_order = np.cumsum(~trial.is_alternative[ps.sorted_index])
        n_alt_sig[row] = trial.n_alt_sig
        n_alt[row] = trial.n_alternatives
        pi0s[row, 0] = pi0_mod.storey(ps, sc.lambda_).value
        pi0s[row, 1] = pi0_mod.dalmasso(ps).value
        for col, method in enumerate(sc.methods):
            try:
                d = decide(ps, method, sc.gamma, sc.alpha, pi0=sc.pi0, lambda_=sc.lambda_)
            except NSEError as exc:
                raise SimulationError(t, method, exc) from exc
            n_rej[row, col] = d.n_reject
            fp[row, col] = null_in_order[d.n_reject - 1] if d.n_reject else 0
    return n_rej, fp, n_alt_sig, n_alt, pi0s


def _rate_se(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n)


def _mean_se(x: np.ndarray) -> float:
    if x.size < 2:
        return 0.0
    return float(np.std(x, ddof=1) / math.sqrt(x.size))


def run_scenario(sc: SimScenario, workers: int = 1) -> SimResult:
    """Run ``sc.reps`` trials and aggregate coverage, FDR and power per method."""
    chunks = [range(s, min(s + CHUNK_SIZE, sc.reps)) for s in range(0, sc.reps, CHUNK_SIZE)]
    if workers <= 1:
        parts = [_run_chunk(sc, c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _run_chunk(sc, c), chunks))
    n_rej, fp, n_alt_sig, n_alt, pi0s = (np.concatenate(a) for a in zip(*parts))

    expected_alt_sig = None
    if sc.pi0 < 1.0:
        expected_alt_sig = sc.m * (1.0 - sc.pi0) * f1_cdf(sc.gaussian, sc.gamma)
    has_alt = n_alt > 0

    out = {}
    for col, method in enumerate(sc.methods):
        n = n_rej[:, col]
        cover = n <= n_alt_sig
        cov = float(np.mean(cover))
        fdp = fp[:, col] / np.maximum(n, 1)
        if has_alt.any():
            tpr = (n - fp[:, col])[has_alt] / n_alt[has_alt]
            power, power_se = float(np.mean(tpr)), _mean_se(tpr)
        else:
            power = power_se = None
        exp_cov = None if expected_alt_sig is None else float(np.mean(n <= expected_alt_sig))
        out[method] = MethodResult(
            method, cov, _rate_se(cov, sc.reps), float(np.mean(fdp)), _mean_se(fdp),
            power, power_se, sc.reps, int(has_alt.sum()), exp_cov,
        )
    sd = np.std(pi0s, axis=0, ddof=1) if sc.reps > 1 else np.zeros(2)
    mean = np.mean(pi0s, axis=0)
    return SimResult(sc, out, float(mean[0]), float(sd[0]), float(mean[1]), float(sd[1]))


def expected_coverage_probe(sc: SimScenario, method: Method | str, workers: int = 1) -> float:
    """Frequency of {n_reject <= m F^1(gamma)} with F^1(gamma) the expected alternative fraction."""
    if sc.pi0 >= 1.0:
        raise InvalidScenario("the expected-count probe needs pi0 < 1")
    method = Method.parse(method) if isinstance(method, str) else method
    probe = SimScenario(sc.m, sc.pi0, sc.mu, sc.n, sc.gamma, sc.alpha, sc.reps, sc.seed,
                        (method,), sc.lambda_)
    return run_scenario(probe, workers)[method].expected_coverage


def scenario_grid(m: Sequence[int], pi0: Sequence[float], mu: Sequence[float],
                  gamma: Sequence[float], alpha: Sequence[float], *, reps: int = 5000,
                  seed: int = DEFAULT_SEED, n: int = 5,
                  methods: Iterable = DEFAULT_METHODS,
                  lambda_: float = DEFAULT_LAMBDA) -> list[SimScenario]:
    """Cartesian scenario grid; pi0 = 1 appears once per (m, gamma, alpha) with mu = 0."""
    methods = tuple(methods)
    out = []
    seen = set()
    for mm, g, a, p0, mu_ in itertools.product(m, gamma, alpha, pi0, mu):
        if p0 == 1.0:
            mu_ = 0.0
        key = (mm, g, a, p0, mu_)
        if key in seen:
            continue
        seen.add(key)
        out.append(SimScenario(int(mm), float(p0), float(mu_), n, float(g), float(a),
                               reps, seed, methods, lambda_))
    return out
