"""Biased two-choices opinion dynamics on a fixed interaction graph.

Each elementary step activates one uniformly random agent.  With probability
alpha the agent adopts the superior opinion (1) outright; otherwise it samples
two of its neighbours uniformly *with replacement* and adopts the majority
opinion among itself and the two samples.  The all-ones state is absorbing.

:func:`step` is the plain-Python reference used by distribution tests;
:func:`run_to_consensus` drives a compiled kernel that does the same thing a
few hundred times faster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ._util import ceil_count
from .topology import GraphTopology

# Slow-regime runs take exp(Theta(n)) steps; without a cap the harness would
# never terminate.
DEFAULT_STEP_CAP = 10**10

# Kernel call granularity: progress callbacks and cap checks happen on these
# boundaries (~0.3 s of work each).
_CHUNK = 1 << 24

# Uniform doubles are drawn in blocks; block-wise generation is ~5x faster
# than one Generator call per draw inside the kernel.
_DRAW_BLOCK = 8192


@dataclass(frozen=True)
class ModelParams:
    """Bias alpha and initial superior fraction p.

    alpha = 0 (no bias at all) is accepted so the bare majority update can be
    exercised on its own, but then all-zeros is absorbing too and consensus
    on 1 is no longer guaranteed.
    """

    alpha: float
    p: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"bias must lie in [0, 1], got alpha={self.alpha}")
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"start fraction must lie in [0, 1), got p={self.p}")


@dataclass
class OpinionState:
    """Mutable configuration: one uint8 opinion per agent plus bookkeeping."""

    opinions: np.ndarray  # uint8, shape (n,)
    ones_count: int
    clock: int  # elementary steps taken so far


@dataclass(frozen=True)
class RunResult:
    """Outcome of one run: steps taken, and whether all-ones was reached."""

    steps: int
    absorbed: bool
    final_ones_count: int


def init_state(graph: GraphTopology, params: ModelParams, seed: int) -> OpinionState:
    """Fresh state with ceil(p*n) ones placed on a uniform random subset."""
    n = graph.n
    k = ceil_count(params.p, n)
    opinions = np.zeros(n, dtype=np.uint8)
    if k > 0:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        opinions[rng.choice(n, size=k, replace=False)] = 1
    return OpinionState(opinions=opinions, ones_count=k, clock=0)


def step(
    state: OpinionState,
    graph: GraphTopology,
    params: ModelParams,
    rng: np.random.Generator,
) -> OpinionState:
    """One elementary update, in place.  Reference implementation."""
    u = int(rng.integers(0, graph.n))
    old = int(state.opinions[u])
    if rng.random() < params.alpha:
        new = 1
    else:
        nbrs = graph.neighbors(u)
        deg = nbrs.shape[0]
        if deg == 0:
            new = old  # nothing to sample: keep current opinion
        else:
            v1 = int(nbrs[int(rng.integers(0, deg))])
            v2 = int(nbrs[int(rng.integers(0, deg))])
            total = old + int(state.opinions[v1]) + int(state.opinions[v2])
            new = 1 if total >= 2 else 0
    if new != old:
        state.opinions[u] = new
        state.ones_count += new - old
    state.clock += 1
    return state


@njit(cache=True, nogil=True)
def _advance(opinions, indptr, indices, ones_count, alpha, max_steps, rng):
    """Run up to max_steps updates; returns (steps_taken, ones_count).

    Stops early on absorption.  All randomness comes from block-drawn
    uniform doubles; at most four are consumed per step.
    """
    n = opinions.shape[0]
    block = rng.random(_DRAW_BLOCK)
    pos = 0
    steps = np.int64(0)
    while steps < max_steps and ones_count < n:
        if pos + 4 > _DRAW_BLOCK:
            block = rng.random(_DRAW_BLOCK)
            pos = 0
        u = np.int64(block[pos] * n)
        pos += 1
        if block[pos] < alpha:
            pos += 1
            if opinions[u] == 0:
                opinions[u] = 1
                ones_count += 1
        else:
            pos += 1
            lo = indptr[u]
            deg = indptr[u + 1] - lo
            if deg > 0:
                v1 = indices[lo + np.int64(block[pos] * deg)]
                pos += 1
                v2 = indices[lo + np.int64(block[pos] * deg)]
                pos += 1
                total = opinions[u] + opinions[v1] + opinions[v2]
                if total >= 2:
                    if opinions[u] == 0:
                        opinions[u] = 1
                        ones_count += 1
                elif opinions[u] == 1:
                    opinions[u] = 0
                    ones_count -= 1
        steps += 1
    return steps, ones_count


def run_to_consensus(
    graph: GraphTopology,
    params: ModelParams,
    seed: int,
    step_cap: int = DEFAULT_STEP_CAP,
    progress=None,
) -> RunResult:
    """Run until all-ones or until step_cap elementary steps have elapsed.

    Fully deterministic in (graph, params, seed, step_cap).  ``progress``,
    if given, is called as progress(steps_so_far, ones_count) after each
    kernel chunk.
    """
    if params.alpha == 0.0:
        raise ValueError("consensus on opinion 1 requires alpha > 0")
    if step_cap < 1:
        raise ValueError(f"step cap must be positive, got {step_cap}")
    init_seed, run_seed = np.random.SeedSequence(seed).generate_state(2, np.uint64)
    state = init_state(graph, params, int(init_seed))
    rng = np.random.Generator(np.random.PCG64(int(run_seed)))
    ones = state.ones_count
    steps = 0
    while ones < graph.n and steps < step_cap:
        budget = min(step_cap - steps, _CHUNK)
        done, ones = _advance(
            state.opinions,
            graph.indptr,
            graph.indices,
            np.int64(ones),
            params.alpha,
            np.int64(budget),
            rng,
        )
        steps += int(done)
        if progress is not None:
            progress(steps, int(ones))
    state.ones_count = int(ones)
    state.clock = steps
    return RunResult(steps=steps, absorbed=bool(ones == graph.n), final_ones_count=int(ones))
