"""Seeded, trial-averaged retrieval experiments.

Every trial draws fresh random patterns, trains a network, corrupts one stored
pattern and retrieves it. Trial ``k`` takes its random streams from
``SeedSequence(master_seed, spawn_key=(k, ...))``, so trials are independent
of each other and of how many of them run.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .dynamics import Outcome, UpdateScheme, run_retrieval
from .kernel import KernelParams, PatternSet, as_bipolar, overlap
from .training import DualWeights, TrainConfig, train_network

__all__ = [
    "AggregateResult",
    "ExperimentConfig",
    "TrialResult",
    "default_threads",
    "inject_noise",
    "noise_count",
    "overlap",
    "run_capacity_experiment",
    "run_dynamics_experiment",
    "run_efficiency_experiment",
    "run_trials",
]

DEFAULT_LOADS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 25, 30)

# Choices the method description leaves open; echoed into every output file.
RUN_NOTES = {
    "alpha_init": "zeros",
    "optimizer": "full-batch gradient descent, fixed step, no early stopping",
    "async_order": "fresh random permutation per epoch",
    "overlap": "(1/N) sum_i s_i xi_i",
    "convergence": "zero-flip epoch; sync also stops on a period-2 cycle",
    "noise": "exactly round(f*N) distinct bits flipped",
    "target": "pattern index = trial mod P",
}


def noise_count(fraction: float, n: int) -> int:
    """Number of bits flipped for a noise ``fraction``, rounding half up."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"noise fraction must lie in [0, 1], got {fraction}")
    return int(math.floor(round(fraction * n, 9) + 0.5))


def inject_noise(pattern, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """Flip exactly ``round(fraction * N)`` distinct, uniformly chosen bits."""
    pattern = as_bipolar(pattern)
    d = noise_count(fraction, pattern.shape[-1])
    out = pattern.copy()
    idx = rng.choice(pattern.shape[-1], size=d, replace=False)
    out[idx] *= -1
    return out, d


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 50
    load: float = 3.0
    gamma: float = 0.1
    train: TrainConfig = field(default_factory=TrainConfig)
    noise_fraction: float = 0.2
    trials: int = 50
    schemes: tuple[UpdateScheme, ...] = (UpdateScheme.SYNC, UpdateScheme.ASYNC)
    max_epochs: int = 100
    master_seed: int = 0
    check_cache: bool = False

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(UpdateScheme(s) for s in self.schemes))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 1 or self.p < 1:
            raise ValueError("n and round(load * n) must be positive")
        noise_count(self.noise_fraction, self.n)

    @property
    def p(self) -> int:
        return int(math.floor(round(self.load * self.n, 9) + 0.5))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schemes"] = [s.value for s in self.schemes]
        d["p"] = self.p
        return d


@dataclass
class TrialResult:
    trial: int
    scheme: UpdateScheme
    noise_fraction: float
    initial_hamming: int
    success: bool
    total_events: int
    overlaps: list[float]
    energies: list[float]
    epochs_run: int
    outcome: Outcome


@dataclass
class AggregateResult:
    """Statistics over the trials of one condition (size, load, noise, scheme)."""

    n: int
    load: float
    noise_fraction: float
    scheme: UpdateScheme
    trials: list[TrialResult]

    def _trajectories(self, attr: str) -> np.ndarray:
        # hold each trajectory at its final value once the trial has stopped
        seqs = [getattr(t, attr) for t in self.trials]
        width = max(len(s) for s in seqs)
        return np.array([s + [s[-1]] * (width - len(s)) for s in seqs], dtype=np.float64)

    @property
    def overlap_mean(self) -> np.ndarray:
        return self._trajectories("overlaps").mean(axis=0)

    @property
    def overlap_std(self) -> np.ndarray:
        return self._trajectories("overlaps").std(axis=0)

    @property
    def energy_mean(self) -> np.ndarray:
        return self._trajectories("energies").mean(axis=0)

    @property
    def accuracy(self) -> float:
        return float(np.mean([t.success for t in self.trials]))

    @property
    def accuracy_std(self) -> float:
        return float(np.std([float(t.success) for t in self.trials]))

    @property
    def mean_events(self) -> float:
        return float(np.mean([t.total_events for t in self.trials]))

    @property
    def std_events(self) -> float:
        return float(np.std([t.total_events for t in self.trials]))

    @property
    def mean_initial_hamming(self) -> float:
        return float(np.mean([t.initial_hamming for t in self.trials]))

    @property
    def std_initial_hamming(self) -> float:
        return float(np.std([t.initial_hamming for t in self.trials]))

    @property
    def event_ratio(self) -> float:
        """mean events / mean initial Hamming distance (nan when nothing was corrupted)."""
        h = self.mean_initial_hamming
        return self.mean_events / h if h > 0 else float("nan")

    @property
    def final_overlap_mean(self) -> float:
        return float(np.mean([t.overlaps[-1] for t in self.trials]))

    def parity_violations(self) -> list[TrialResult]:
        """Successful trials with fewer events than initially wrong bits (should be none)."""
        return [t for t in self.trials if t.success and t.total_events < t.initial_hamming]


def default_threads() -> int:
    env = os.environ.get("KLR_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


_SCHEME_KEYS = {UpdateScheme.SYNC: 0, UpdateScheme.ASYNC: 1}


def _stream(cfg: ExperimentConfig, *key: int) -> np.random.Generator:
    seq = np.random.SeedSequence(cfg.master_seed, spawn_key=key)
    return np.random.Generator(np.random.PCG64(seq))


def _train_trial(cfg: ExperimentConfig, trial: int) -> DualWeights:
    ps = PatternSet.random(cfg.n, cfg.p, _stream(cfg, trial, 0))
    return train_network(ps, KernelParams(cfg.gamma), cfg.train)


def _run_trial(cfg: ExperimentConfig, trial: int, noise_levels) -> list[TrialResult]:
    w = _train_trial(cfg, trial)
    target = w.patterns.patterns[trial % w.p]
    results = []
    for level, fraction in enumerate(noise_levels):
        s0, d = inject_noise(target, fraction, _stream(cfg, trial, 1, level))
        for scheme in cfg.schemes:
            trace = run_retrieval(
                w, s0, target, scheme,
                max_epochs=cfg.max_epochs,
                rng=_stream(cfg, trial, 2, level, _SCHEME_KEYS[scheme]),
                check_cache=cfg.check_cache,
            )
            results.append(
                TrialResult(
                    trial=trial,
                    scheme=scheme,
                    noise_fraction=fraction,
                    initial_hamming=d,
                    success=bool(np.array_equal(trace.final_state, target)),
                    total_events=trace.total_events,
                    overlaps=trace.overlaps,
                    energies=trace.energies,
                    epochs_run=trace.epochs_run,
                    outcome=trace.outcome,
                )
            )
    return results


def run_trials(cfg: ExperimentConfig, noise_levels=None, threads: int | None = None) -> list[TrialResult]:
    """All trials of ``cfg``; one network per trial shared by every noise level and scheme."""
    levels = [cfg.noise_fraction] if noise_levels is None else list(noise_levels)
    threads = threads or default_threads()
    if threads == 1:
        chunks = [_run_trial(cfg, k, levels) for k in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda k: _run_trial(cfg, k, levels), range(cfg.trials)))
    return [r for chunk in chunks for r in chunk]


def _aggregate(cfg: ExperimentConfig, results: list[TrialResult]) -> list[AggregateResult]:
    groups: dict[tuple[float, UpdateScheme], list[TrialResult]] = {}
    for r in results:
        groups.setdefault((r.noise_fraction, r.scheme), []).append(r)
    return [
        AggregateResult(cfg.n, cfg.load, noise, scheme, trials)
        for (noise, scheme), trials in groups.items()
    ]


def run_dynamics_experiment(cfg: ExperimentConfig, threads: int | None = None) -> dict[UpdateScheme, AggregateResult]:
    """Overlap trajectories of every scheme from the same corrupted start."""
    if not {UpdateScheme.SYNC, UpdateScheme.ASYNC} <= set(cfg.schemes):
        raise ValueError("the dynamics comparison needs both update schemes")
    return {a.scheme: a for a in _aggregate(cfg, run_trials(cfg, threads=threads))}


def run_capacity_experiment(
    cfg: ExperimentConfig,
    loads=DEFAULT_LOADS,
    sizes=(50,),
    threads: int | None = None,
) -> list[AggregateResult]:
    """Recall accuracy over a grid of network sizes and storage loads."""
    loads = list(loads)
    if loads != sorted(loads):
        raise ValueError("loads must be sorted ascending")
    out = []
    for n in sizes:
        for load in loads:
            sub = replace(cfg, n=n, load=load)
            out.extend(_aggregate(sub, run_trials(sub, threads=threads)))
    return out


def run_efficiency_experiment(
    cfg: ExperimentConfig,
    noise_grid=(0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40),
    threads: int | None = None,
) -> list[AggregateResult]:
    """Event counts against initial Hamming distance, asynchronous updates only."""
    if tuple(cfg.schemes) != (UpdateScheme.ASYNC,):
        raise ValueError("the efficiency experiment runs the asynchronous scheme only")
    results = run_trials(cfg, noise_levels=noise_grid, threads=threads)
    return _aggregate(cfg, results)
