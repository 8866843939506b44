"""Substrate graphs: candidate semantic spaces on which walks are performed.

A substrate is an undirected, unweighted graph held in CSR form (``indptr``
plus per-node sorted neighbor lists).  Generators cover a small-world
rewired ring (Watts-Strogatz), a regular tree where every node has ``z+1``
neighbors, and Erdos-Renyi ``G(n, p)``.  Graphs are immutable once built
and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ContractError, ParameterError

__all__ = [
    "SubstrateGraph",
    "GraphSpec",
    "WattsStrogatz",
    "RegularTree",
    "ErdosRenyi",
    "RingProfile",
    "generate_watts_strogatz",
    "generate_regular_tree",
    "generate_erdos_renyi",
    "build_graph",
    "bfs_rings",
]


@dataclass(frozen=True)
class SubstrateGraph:
    """Immutable undirected graph with 0-based dense integer node ids."""

    node_count: int
    indptr: np.ndarray   # int64, length node_count + 1
    indices: np.ndarray  # int32, neighbors grouped by node, sorted within a node

    @property
    def edge_count(self) -> int:
        return self.indices.size // 2

    def degree(self, node: int) -> int:
        return int(self.indptr[node + 1] - self.indptr[node])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, node: int) -> np.ndarray:
        return self.indices[self.indptr[node]:self.indptr[node + 1]]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """All edges as parallel arrays (i, j) with i < j, sorted lexicographically."""
        rows = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees())
        cols = self.indices.astype(np.int64)
        keep = rows < cols
        return rows[keep], cols[keep]

    def validate(self) -> None:
        """Check structural invariants; raises ContractError on violation."""
        n = self.node_count
        if self.indptr.shape != (n + 1,) or self.indptr[0] != 0:
            raise ContractError("malformed indptr")
        if np.any(np.diff(self.indptr) < 0):
            raise ContractError("indptr not non-decreasing")
        if self.indices.size != self.indptr[-1]:
            raise ContractError("indices size disagrees with indptr")
        if self.indices.size == 0:
            return
        if self.indices.min() < 0 or self.indices.max() >= n:
            raise ContractError("neighbor id out of range")
        rows = np.repeat(np.arange(n, dtype=np.int64), self.degrees())
        cols = self.indices.astype(np.int64)
        if np.any(rows == cols):
            raise ContractError("self-loop present")
        # within a row, neighbor ids must be strictly increasing
        if cols.size > 1:
            same_row = rows[1:] == rows[:-1]
            if np.any(same_row & (np.diff(cols) <= 0)):
                raise ContractError("neighbor list not strictly increasing")
        # symmetry: the multiset of directed edges equals its own transpose
        fwd = np.sort(rows * n + cols)
        rev = np.sort(cols * n + rows)
        if not np.array_equal(fwd, rev):
            raise ContractError("adjacency not symmetric")

    # -- file format: "# nodes=<n>" header, then "i<TAB>j" per edge, i < j --

    def write_edge_list(self, path) -> None:
        rows, cols = self.edge_arrays()
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(f"# nodes={self.node_count}\n")
            for i, j in zip(rows.tolist(), cols.tolist()):
                fh.write(f"{i}\t{j}\n")

    @classmethod
    def read_edge_list(cls, path) -> "SubstrateGraph":
        n = None
        src: list[int] = []
        dst: list[int] = []
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    if "nodes=" in line:
                        n = int(line.split("nodes=")[1].split()[0])
                    continue
                a, b = line.split("\t")
                src.append(int(a))
                dst.append(int(b))
        if n is None:
            raise ContractError(f"{path}: missing '# nodes=' header")
        return from_edge_pairs(n, np.asarray(src, dtype=np.int64),
                               np.asarray(dst, dtype=np.int64))


def from_edge_pairs(n: int, src: np.ndarray, dst: np.ndarray) -> SubstrateGraph:
    """Build a validated graph from undirected edge pairs (any orientation)."""
    both_src = np.concatenate([src, dst])
    both_dst = np.concatenate([dst, src])
    order = np.lexsort((both_dst, both_src))
    both_src = both_src[order]
    both_dst = both_dst[order]
    if both_src.size and (n == 0 or both_src.min() < 0
                          or max(both_src.max(), both_dst.max()) >= n):
        raise ContractError("edge endpoint out of range")
    counts = np.bincount(both_src, minlength=n)
    indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    g = SubstrateGraph(n, indptr, both_dst.astype(np.int32))
    g.validate()
    return g


def _graph_from_sets(adj: list[set[int]]) -> SubstrateGraph:
    n = len(adj)
    degrees = np.fromiter((len(s) for s in adj), dtype=np.int64, count=n)
    indptr = np.concatenate([[0], np.cumsum(degrees)]).astype(np.int64)
    indices = np.empty(int(indptr[-1]), dtype=np.int32)
    pos = 0
    for s in adj:
        nbrs = sorted(s)
        indices[pos:pos + len(nbrs)] = nbrs
        pos += len(nbrs)
    g = SubstrateGraph(n, indptr, indices)
    g.validate()
    return g


# ---------------------------------------------------------------------------
# Generator specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WattsStrogatz:
    n: int
    k: int
    p_rewire: float


@dataclass(frozen=True)
class RegularTree:
    z: int
    depth: int


@dataclass(frozen=True)
class ErdosRenyi:
    n: int
    mean_degree: float


GraphVariant = Union[WattsStrogatz, RegularTree, ErdosRenyi]


@dataclass(frozen=True)
class GraphSpec:
    variant: GraphVariant
    seed: int


def build_graph(spec: GraphSpec) -> SubstrateGraph:
    v = spec.variant
    if isinstance(v, WattsStrogatz):
        return generate_watts_strogatz(v.n, v.k, v.p_rewire, spec.seed)
    if isinstance(v, RegularTree):
        return generate_regular_tree(v.z, v.depth, spec.seed)
    if isinstance(v, ErdosRenyi):
        return generate_erdos_renyi(v.n, v.mean_degree, spec.seed)
    raise ParameterError(f"unknown graph variant {type(v).__name__}")


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def generate_watts_strogatz(n: int, k: int, p_rewire: float, seed: int) -> SubstrateGraph:
    """Small-world graph by rewiring a ring lattice.

    Each node starts connected to its ``k/2`` nearest neighbors on each side;
    every lattice edge's far endpoint is then rewired with probability
    ``p_rewire`` to a uniformly chosen node, avoiding self-loops and
    duplicate edges.  Rewiring preserves the edge count ``n*k/2`` exactly.
    """
    if k % 2 != 0:
        raise ParameterError("k must be even")
    if not (2 <= k < n):
        raise ParameterError("need 2 <= k < n")
    if not (0.0 <= p_rewire <= 1.0):
        raise ParameterError("p_rewire must be in [0, 1]")
    rng = np.random.default_rng(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    half = k // 2
    for j in range(1, half + 1):
        for i in range(n):
            v = (i + j) % n
            adj[i].add(v)
            adj[v].add(i)
    for j in range(1, half + 1):
        coins = rng.random(n) < p_rewire
        for i in np.nonzero(coins)[0]:
            i = int(i)
            if len(adj[i]) >= n - 1:
                continue  # nothing left to rewire to
            v = (i + j) % n
            m = int(rng.integers(n))
            while m == i or m in adj[i]:
                m = int(rng.integers(n))
            adj[i].remove(v)
            adj[v].remove(i)
            adj[i].add(m)
            adj[m].add(i)
    return _graph_from_sets(adj)


def generate_regular_tree(z: int, depth: int, seed: int = 0) -> SubstrateGraph:
    """Rooted tree where every node has ``z+1`` neighbors, truncated at ``depth``.

    The root (node 0) has ``z+1`` children and each internal node ``z``
    further children, so the shell at distance ``l >= 1`` holds
    ``(z+1) * z**(l-1)`` nodes.  Deterministic; ``seed`` is accepted for
    interface uniformity only.
    """
    del seed
    if z < 1:
        raise ParameterError("z must be >= 1")
    if depth < 0:
        raise ParameterError("depth must be >= 0")
    level_sizes = [1]
    for l in range(1, depth + 1):
        level_sizes.append((z + 1) * z ** (l - 1))
    total = sum(level_sizes)
    src = np.empty(total - 1, dtype=np.int64)
    dst = np.empty(total - 1, dtype=np.int64)
    edge = 0
    parent_start = 0
    child_start = 1
    for l in range(1, depth + 1):
        n_parents = level_sizes[l - 1]
        per_parent = z + 1 if l == 1 else z
        for p in range(n_parents):
            parent = parent_start + p
            for c in range(per_parent):
                child = child_start + p * per_parent + c
                src[edge] = parent
                dst[edge] = child
                edge += 1
        parent_start = child_start
        child_start += level_sizes[l]
    return from_edge_pairs(total, src, dst)


def generate_erdos_renyi(n: int, mean_degree: float, seed: int) -> SubstrateGraph:
    """``G(n, p)`` with ``p = mean_degree / (n - 1)``, via geometric edge skipping."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not (0.0 <= mean_degree <= n - 1):
        raise ParameterError("need 0 <= mean_degree <= n-1")
    p = mean_degree / (n - 1) if n > 1 else 0.0
    total_pairs = n * (n - 1) // 2
    if p <= 0.0 or total_pairs == 0:
        return from_edge_pairs(n, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    rng = np.random.default_rng(seed)
    positions: list[np.ndarray] = []
    cursor = -1
    batch = int(total_pairs * p * 1.1) + 128
    while True:
        gaps = rng.geometric(p, size=batch)
        cand = cursor + np.cumsum(gaps)
        take = cand[cand < total_pairs]
        positions.append(take)
        if take.size < cand.size:
            break
        cursor = int(cand[-1])
        batch = max(128, int((total_pairs - cursor) * p * 1.2) + 128)
    linear = np.concatenate(positions)
    # decode linear upper-triangle index (row-major) into (i, j)
    row_ends = np.cumsum(np.arange(n - 1, 0, -1, dtype=np.int64))
    i = np.searchsorted(row_ends, linear, side="right")
    row_start = row_ends[i] - (n - 1 - i)
    j = linear - row_start + i + 1
    return from_edge_pairs(n, i.astype(np.int64), j.astype(np.int64))


# ---------------------------------------------------------------------------
# Ring decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RingProfile:
    """Shell populations around an origin: sizes[l] = #nodes at distance l."""

    origin: int
    sizes: np.ndarray  # int64, sizes[0] == 1

    @property
    def max_distance(self) -> int:
        return len(self.sizes) - 1

    @property
    def component_size(self) -> int:
        return int(self.sizes.sum())


def _gather_neighbors(graph: SubstrateGraph, nodes: np.ndarray) -> np.ndarray:
    starts = graph.indptr[nodes]
    counts = graph.indptr[nodes + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int32)
    ends = np.cumsum(counts)
    within = np.arange(total, dtype=np.int64) - np.repeat(ends - counts, counts)
    return graph.indices[np.repeat(starts, counts) + within]


def bfs_rings(graph: SubstrateGraph, origin: int) -> RingProfile:
    """Breadth-first shell sizes from ``origin``; unreachable nodes excluded."""
    if not (0 <= origin < graph.node_count):
        raise ParameterError(f"origin {origin} out of range")
    seen = np.zeros(graph.node_count, dtype=bool)
    seen[origin] = True
    frontier = np.array([origin], dtype=np.int64)
    sizes = [1]
    while frontier.size:
        nbrs = _gather_neighbors(graph, frontier).astype(np.int64)
        nbrs = np.unique(nbrs[~seen[nbrs]])
        if nbrs.size == 0:
            break
        seen[nbrs] = True
        sizes.append(int(nbrs.size))
        frontier = nbrs
    return RingProfile(origin=origin, sizes=np.asarray(sizes, dtype=np.int64))
