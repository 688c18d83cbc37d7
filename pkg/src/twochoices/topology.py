"""Interaction graphs for the two-choices dynamics.

Every generator returns an immutable :class:`GraphTopology` whose adjacency
is stored in CSR form (``indptr``/``indices``), so sampling a uniform random
neighbour of any node is O(1) — the one operation the update rule needs.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

import numpy as np

# Restart budget for the degree-constrained pairing loop.  Dead ends are
# rare because failed stubs are re-paired in place rather than thrown away,
# so this only guards pathological parameter choices.
MAX_PAIRING_RESTARTS = 10_000


class GraphGenerationError(RuntimeError):
    """A random-graph construction exhausted its restart budget."""


@dataclass(frozen=True)
class GraphTopology:
    """Undirected simple graph on nodes 0..n-1, adjacency in CSR layout.

    ``indices[indptr[u]:indptr[u+1]]`` lists the neighbours of ``u``.  The
    arrays are not to be mutated after construction.
    """

    n: int
    kind: str  # "complete" | "regular" | "er"
    indptr: np.ndarray  # int64, shape (n+1,)
    indices: np.ndarray  # int32, shape (2 * num_edges,)
    seed: Optional[int] = None  # generation seed; None for complete graphs
    degree: Optional[int] = None  # regular graphs only
    p_edge: Optional[float] = None  # Erdos-Renyi graphs only

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return int(self.indices.shape[0]) // 2


def _csr_from_edges(n: int, edges) -> tuple[np.ndarray, np.ndarray]:
    """CSR arrays from an iterable of undirected edge pairs (u, v), u != v."""
    e = np.asarray(list(edges), dtype=np.int64)
    if e.size == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int32)
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    order = np.lexsort((dst, src))  # sorted neighbour lists -> canonical form
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst.astype(np.int32)


def make_complete(n: int) -> GraphTopology:
    """Complete graph K_n."""
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    # Row u holds (u+1..u+n-1) mod n: every v != u exactly once, built
    # without materialising the full n x n matrix.
    offsets = np.arange(1, n, dtype=np.int32)
    rows = np.add.outer(np.arange(n, dtype=np.int32), offsets)
    rows %= n
    indptr = np.arange(n + 1, dtype=np.int64) * (n - 1)
    return GraphTopology(n=n, kind="complete", indptr=indptr, indices=rows.ravel())


def _suitable(edges: set, potential_edges: dict) -> bool:
    """True if the leftover stubs can still be paired into fresh edges."""
    if not potential_edges:
        return True
    for s1 in potential_edges:
        for s2 in potential_edges:
            if s1 == s2:
                break
            if s1 > s2:
                s1, s2 = s2, s1
            if (s1, s2) not in edges:
                return True
    return False


def _try_pairing(n: int, d: int, rng: np.random.Generator):
    """One pass of the stub-pairing construction; None on a dead end."""
    edges: set = set()
    stubs = list(range(n)) * d
    while stubs:
        potential_edges: dict = defaultdict(int)
        rng.shuffle(stubs)
        stub_iter = iter(stubs)
        for s1, s2 in zip(stub_iter, stub_iter):
            if s1 > s2:
                s1, s2 = s2, s1
            if s1 != s2 and (s1, s2) not in edges:
                edges.add((s1, s2))
            else:
                potential_edges[s1] += 1
                potential_edges[s2] += 1
        if not _suitable(edges, potential_edges):
            return None
        stubs = [node for node, count in potential_edges.items() for _ in range(count)]
    return edges


def make_random_regular(n: int, d: int, seed: int) -> GraphTopology:
    """Uniform-ish random d-regular simple graph via stub pairing.

    Stubs that would create loops or parallel edges are re-paired in place;
    only a provably stuck pass triggers a full restart.
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    if not 0 <= d < n:
        raise ValueError(f"degree must satisfy 0 <= d < n, got d={d}, n={n}")
    if (n * d) % 2 != 0:
        raise ValueError(f"no {d}-regular graph on {n} nodes: n*d must be even")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_PAIRING_RESTARTS):
        edges = _try_pairing(n, d, rng)
        if edges is not None:
            indptr, indices = _csr_from_edges(n, edges)
            return GraphTopology(
                n=n, kind="regular", indptr=indptr, indices=indices, seed=seed, degree=d
            )
    raise GraphGenerationError(
        f"gave up pairing a {d}-regular graph on {n} nodes "
        f"after {MAX_PAIRING_RESTARTS} restarts (seed={seed})"
    )


def make_erdos_renyi(n: int, p_edge: float, seed: int) -> GraphTopology:
    """G(n, p): every unordered pair is an edge independently with p_edge.

    Uses geometric skipping over the pair sequence, so the cost is
    O(edges) rather than O(n^2).
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    if not 0.0 <= p_edge <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p_edge}")
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, int]] = []
    if p_edge == 1.0:
        edges = [(v, w) for v in range(1, n) for w in range(v)]
    elif p_edge > 0.0:
        log_q = math.log1p(-p_edge)
        v, w = 1, -1
        while v < n:
            # Skip a Geometric(p_edge) number of pairs in row-major order.
            w += 1 + int(math.log1p(-rng.random()) / log_q)
            while w >= v and v < n:
                w -= v
                v += 1
            if v < n:
                edges.append((v, w))
    indptr, indices = _csr_from_edges(n, edges)
    return GraphTopology(
        n=n, kind="er", indptr=indptr, indices=indices, seed=seed, p_edge=p_edge
    )
