"""Monte Carlo harness: repeated independent runs with reproducible seeding.

Per-trial randomness is derived from SeedSequence([master_seed, tag, trial]),
so results are independent of scheduling: the same experiment gives
bit-identical trial times whether it runs on one thread or eight.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .protocol import DEFAULT_STEP_CAP, ModelParams, run_to_consensus
from .topology import (
    GraphTopology,
    make_complete,
    make_erdos_renyi,
    make_random_regular,
)

# Default worker count when the jobs argument is omitted.
ENV_JOBS = "TWOCHOICES_JOBS"

# Seed-derivation namespaces: shared graph, per-trial run, per-trial graph.
_NS_GRAPH_SHARED = 0
_NS_RUN = 1
_NS_GRAPH_TRIAL = 2

_LOG_FN = {"e": math.log, "2": math.log2, "10": math.log10}

# ceil() guard for logs that are exact integers (log2(1024) must give 10).
_CEIL_EPS = 1e-12


class AllTrialsCappedError(RuntimeError):
    """Every trial hit the step cap, so there is no completed-run mean.

    Carries the per-trial data so callers can still salvage censored
    statistics (each capped time is a lower bound on the true one).
    """

    def __init__(self, capped_count: int, times: np.ndarray, step_cap: int):
        super().__init__(
            f"all {capped_count} trials hit the step cap ({step_cap}); "
            "no completed runs to average"
        )
        self.capped_count = capped_count
        self.times = times
        self.step_cap = step_cap


@dataclass(frozen=True)
class GraphSpec:
    """Graph family plus either a fixed parameter or an n-dependent rule.

    Exactly one of degree/degree_rule must be set for "regular", exactly one
    of p_edge/p_edge_rule for "er", and none of them for "complete".  The
    only rules are "ceil-log" (degree = ceil(log n)) and "conn-threshold"
    (p_edge = log(n)/n, the connectivity threshold), with the log base
    chosen by ``log_base``.
    """

    kind: str  # "complete" | "regular" | "er"
    degree: Optional[int] = None
    degree_rule: Optional[str] = None
    p_edge: Optional[float] = None
    p_edge_rule: Optional[str] = None
    log_base: str = "e"

    def __post_init__(self):
        if self.kind not in ("complete", "regular", "er"):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.log_base not in _LOG_FN:
            raise ValueError(f"log base must be one of e, 2, 10; got {self.log_base!r}")
        if self.degree_rule is not None and self.degree_rule != "ceil-log":
            raise ValueError(f"unknown degree rule {self.degree_rule!r}")
        if self.p_edge_rule is not None and self.p_edge_rule != "conn-threshold":
            raise ValueError(f"unknown edge-probability rule {self.p_edge_rule!r}")
        n_deg = (self.degree is not None) + (self.degree_rule is not None)
        n_p = (self.p_edge is not None) + (self.p_edge_rule is not None)
        if self.kind == "regular" and (n_deg != 1 or n_p != 0):
            raise ValueError("regular graphs need exactly one of degree or degree_rule")
        if self.kind == "er" and (n_p != 1 or n_deg != 0):
            raise ValueError("er graphs need exactly one of p_edge or p_edge_rule")
        if self.kind == "complete" and (n_deg or n_p):
            raise ValueError("complete graphs take no degree or edge-probability")
        if self.degree is not None and self.degree < 0:
            raise ValueError(f"degree must be non-negative, got {self.degree}")
        if self.p_edge is not None and not 0.0 <= self.p_edge <= 1.0:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.p_edge}")

    def resolve(self, n: int) -> Union[int, float]:
        """Concrete degree (regular), edge probability (er), or n-1 (complete)."""
        if self.kind == "complete":
            return n - 1
        log_n = _LOG_FN[self.log_base](n)
        if self.kind == "regular":
            if self.degree is not None:
                return self.degree
            return math.ceil(log_n - _CEIL_EPS) if n > 1 else 0
        if self.p_edge is not None:
            return self.p_edge
        return min(1.0, log_n / n)

    def build(self, n: int, seed: int) -> GraphTopology:
        if self.kind == "complete":
            return make_complete(n)
        if self.kind == "regular":
            return make_random_regular(n, int(self.resolve(n)), seed)
        return make_erdos_renyi(n, float(self.resolve(n)), seed)


@dataclass(frozen=True)
class ExperimentSpec:
    """One Monte Carlo point: graph family, model parameters, n, trials.

    ``regenerate_graph`` defaults to None, meaning: draw a fresh random
    graph for every trial (so stats average over the graph ensemble), except
    on complete graphs where there is nothing to redraw.
    """

    graph: GraphSpec
    params: ModelParams
    n: int
    trials: int
    master_seed: int
    step_cap: int = DEFAULT_STEP_CAP
    regenerate_graph: Optional[bool] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one agent, got n={self.n}")
        if self.trials < 1:
            raise ValueError(f"need at least one trial, got {self.trials}")
        if self.master_seed < 0:
            raise ValueError(f"master seed must be non-negative, got {self.master_seed}")
        if self.step_cap < 1:
            raise ValueError(f"step cap must be positive, got {self.step_cap}")

    @property
    def regenerate(self) -> bool:
        if self.regenerate_graph is None:
            return self.graph.kind != "complete"
        return self.regenerate_graph


@dataclass(frozen=True)
class ConsensusStats:
    """Per-trial consensus times plus summary statistics.

    ``mean`` and the 95% confidence interval cover completed (absorbed)
    trials only; capped trials are counted in ``capped_count`` and their
    (censoring) times stay visible in ``times``.
    """

    times: np.ndarray  # int64, elementary steps per trial
    absorbed: np.ndarray  # bool, False where the step cap hit
    mean: float
    ci_low: float
    ci_high: float
    capped_count: int
    trials: int
    master_seed: int


def _derived_seed(master_seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([master_seed, *key]).generate_state(1, np.uint64)[0])


def _resolve_jobs(jobs: Optional[int]) -> int:
    if jobs is None:
        jobs = int(os.environ.get(ENV_JOBS) or "1")
    if jobs < 1:
        raise ValueError(f"job count must be positive, got {jobs}")
    return jobs


def _graph_for_trial(spec: ExperimentSpec, trial: int) -> GraphTopology:
    """Graph used by one trial when regeneration is on."""
    return spec.graph.build(spec.n, _derived_seed(spec.master_seed, _NS_GRAPH_TRIAL, trial))


def _summarize(spec: ExperimentSpec, times: np.ndarray, absorbed: np.ndarray) -> ConsensusStats:
    completed = times[absorbed]
    capped = int(spec.trials - completed.size)
    if completed.size == 0:
        raise AllTrialsCappedError(capped, times, spec.step_cap)
    mean = float(completed.mean())
    if completed.size > 1:
        half = 1.96 * float(completed.std(ddof=1)) / math.sqrt(completed.size)
    else:
        half = 0.0
    return ConsensusStats(
        times=times,
        absorbed=absorbed,
        mean=mean,
        ci_low=mean - half,
        ci_high=mean + half,
        capped_count=capped,
        trials=spec.trials,
        master_seed=spec.master_seed,
    )


def run_experiment(
    spec: ExperimentSpec,
    jobs: Optional[int] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> ConsensusStats:
    """Run spec.trials independent runs and summarize.

    ``progress``, if given, is called as progress(trials_done, trials_total)
    from the collecting thread.
    """
    jobs = _resolve_jobs(jobs)
    shared = None
    if not spec.regenerate:
        shared = spec.graph.build(spec.n, _derived_seed(spec.master_seed, _NS_GRAPH_SHARED))

    def one_trial(trial: int) -> tuple[int, bool]:
        graph = shared if shared is not None else _graph_for_trial(spec, trial)
        result = run_to_consensus(
            graph,
            spec.params,
            _derived_seed(spec.master_seed, _NS_RUN, trial),
            step_cap=spec.step_cap,
        )
        return result.steps, result.absorbed

    times = np.empty(spec.trials, dtype=np.int64)
    absorbed = np.empty(spec.trials, dtype=bool)
    if jobs == 1:
        outcomes = map(one_trial, range(spec.trials))
    else:
        pool = ThreadPoolExecutor(max_workers=jobs)  # kernel releases the GIL
        outcomes = pool.map(one_trial, range(spec.trials))
    for trial, (steps, done) in enumerate(outcomes):
        times[trial] = steps
        absorbed[trial] = done
        if progress is not None:
            progress(trial + 1, spec.trials)
    if jobs > 1:
        pool.shutdown()
    return _summarize(spec, times, absorbed)


@dataclass(frozen=True)
class SweepPoint:
    """Result of one system size in a sweep; stats is None on failure."""

    n: int
    graph_parameter: Union[int, float]
    stats: Optional[ConsensusStats]
    failure: Optional[Exception] = None

    @property
    def error(self) -> Optional[str]:
        return None if self.failure is None else str(self.failure)

    @property
    def normalized_mean(self) -> float:
        if self.stats is None:
            return math.nan
        return self.stats.mean / self.n


def sweep(
    spec: ExperimentSpec,
    n_values: Sequence[int],
    jobs: Optional[int] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> list[SweepPoint]:
    """run_experiment across a ladder of n, resolving graph rules per point.

    Per-point failures (all trials capped, graph generation giving up) are
    recorded on the returned points instead of aborting the rest of the
    sweep.
    """
    if len(n_values) == 0:
        raise ValueError("need at least one system size")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError(f"system sizes must be strictly increasing, got {list(n_values)}")
    points: list[SweepPoint] = []
    for n in n_values:
        sub = replace(spec, n=n)
        parameter = sub.graph.resolve(n)
        try:
            stats = run_experiment(sub, jobs=jobs, progress=progress)
            points.append(SweepPoint(n=n, graph_parameter=parameter, stats=stats))
        except (ValueError, RuntimeError) as exc:
            points.append(
                SweepPoint(n=n, graph_parameter=parameter, stats=None, failure=exc)
            )
    return points
