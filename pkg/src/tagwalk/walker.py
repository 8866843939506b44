"""Random-walk ensembles on a substrate graph.

Every walk starts at a fixed origin, draws its length (number of steps)
from a shared distribution, and then moves to uniformly random neighbors.
Each walk consumes an independent counter-based random stream keyed by
``(master_seed, walk_index)``: counter 0 feeds the length draw and counter
``t`` feeds step ``t``.  Because no state is shared between walks, the
ensemble is reproducible node-for-node regardless of batching or thread
count, and a one-walk scalar reference can replay any walk exactly.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import ContractError, ParameterError
from .rng import stream_uniform, stream_uniforms, walk_seed, walk_seeds
from .substrate import SubstrateGraph

__all__ = [
    "FixedLength",
    "PowerLawLength",
    "LengthDist",
    "sample_lengths",
    "length_pmf",
    "WalkConfig",
    "WalkEnsemble",
    "run_walk",
    "simulate_walks",
    "run_ensemble",
    "heaps_checkpoints",
    "heaps_curve",
    "node_frequencies",
    "trace_lengths_histogram",
    "visit_probabilities",
]

log = logging.getLogger(__name__)

# Walks are generated in fixed-size index blocks so that the work split is
# a pure function of the walk index, never of the thread count.
BLOCK_SIZE = 16384


# ---------------------------------------------------------------------------
# Walk-length distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FixedLength:
    """Every walk takes exactly ``value`` steps."""

    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ParameterError("walk length must be >= 0")


@dataclass(frozen=True)
class PowerLawLength:
    """Discrete power law P(l) proportional to l**(-exponent) on [l_min, l_max]."""

    exponent: float
    l_min: int = 1
    l_max: int = 1000

    def __post_init__(self):
        if not (1 <= self.l_min <= self.l_max):
            raise ParameterError("need 1 <= l_min <= l_max")


LengthDist = Union[FixedLength, PowerLawLength]


@dataclass(frozen=True)
class WalkConfig:
    """Everything that determines an ensemble besides the substrate."""

    origin: int
    n_rw: int
    lengths: LengthDist
    seed: int
    count_origin: bool = True
    non_backtracking: bool = False

    def __post_init__(self):
        if self.n_rw < 0:
            raise ParameterError("n_rw must be >= 0")


@lru_cache(maxsize=32)
def _power_law_cdf(exponent: float, l_min: int, l_max: int) -> np.ndarray:
    values = np.arange(l_min, l_max + 1, dtype=np.float64)
    weights = values ** (-exponent)
    return np.cumsum(weights / weights.sum())


def sample_lengths(dist: LengthDist, u):
    """Map uniforms in [0, 1) to lengths by inverting the distribution's CDF."""
    u = np.asarray(u)
    if isinstance(dist, FixedLength):
        return np.full(u.shape, dist.value, dtype=np.int64)
    cdf = _power_law_cdf(dist.exponent, dist.l_min, dist.l_max)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)
    return (dist.l_min + idx).astype(np.int64)


def length_pmf(dist: LengthDist) -> tuple[np.ndarray, np.ndarray]:
    """Support and probabilities of the length distribution."""
    if isinstance(dist, FixedLength):
        return (np.asarray([dist.value], dtype=np.int64),
                np.asarray([1.0], dtype=np.float64))
    values = np.arange(dist.l_min, dist.l_max + 1, dtype=np.int64)
    weights = values.astype(np.float64) ** (-dist.exponent)
    return values, weights / weights.sum()


# ---------------------------------------------------------------------------
# Ensembles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WalkEnsemble:
    """Concatenated traces of an ordered collection of walks.

    Walk ``w`` visited ``nodes[offsets[w]:offsets[w+1]]`` in step order,
    origin first.  A walk of length ``l`` therefore spans ``l + 1`` entries.
    """

    origin: int
    node_count: int
    offsets: np.ndarray  # int64, (walk_count + 1,)
    nodes: np.ndarray    # int32 flat traces

    @property
    def walk_count(self) -> int:
        return self.offsets.size - 1

    def lengths(self) -> np.ndarray:
        return np.diff(self.offsets) - 1

    def trace(self, w: int) -> np.ndarray:
        return self.nodes[self.offsets[w]:self.offsets[w + 1]]

    def walk_node_pairs(self, count_origin: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """Deduplicated (walk_id, node) pairs, walk-major, nodes ascending."""
        walk_ids = np.repeat(np.arange(self.walk_count, dtype=np.int64),
                             np.diff(self.offsets))
        nodes = self.nodes.astype(np.int64)
        if not count_origin:
            keep = nodes != self.origin
            walk_ids, nodes = walk_ids[keep], nodes[keep]
        keys = np.unique(walk_ids * self.node_count + nodes)
        return keys // self.node_count, keys % self.node_count

    def distinct_count(self, count_origin: bool = True) -> int:
        nodes = self.nodes
        if not count_origin:
            nodes = nodes[nodes != self.origin]
        return int(np.unique(nodes).size)

    # -- trace file: one walk per line, node ids space-separated --

    def write_traces(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            for w in range(self.walk_count):
                fh.write(" ".join(map(str, self.trace(w).tolist())))
                fh.write("\n")

    @classmethod
    def read_traces(cls, path, node_count: int | None = None) -> "WalkEnsemble":
        traces: list[list[int]] = []
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    traces.append([int(tok) for tok in line.split()])
        if not traces:
            raise ContractError(f"{path}: no walks found")
        origin = traces[0][0]
        lengths = np.asarray([len(t) for t in traces], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
        flat = np.asarray([v for t in traces for v in t], dtype=np.int32)
        if node_count is None:
            node_count = int(flat.max()) + 1
        return cls(origin=origin, node_count=node_count, offsets=offsets, nodes=flat)


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

def run_walk(graph: SubstrateGraph, origin: int, master_seed: int, walk_index: int,
             lengths: LengthDist, non_backtracking: bool = False) -> np.ndarray:
    """Replay a single walk step by step.

    Produces exactly the trace that :func:`simulate_walks` assigns to
    ``walk_index`` under the same master seed.
    """
    seed = walk_seed(master_seed, walk_index)
    length = int(sample_lengths(lengths, stream_uniform(seed, 0)))
    if graph.degree(origin) == 0:
        if length > 0:
            log.warning("origin %d is isolated; walk truncated to [origin]", origin)
        return np.asarray([origin], dtype=np.int32)
    trace = [origin]
    prev = -1
    cur = origin
    for t in range(length):
        u = stream_uniform(seed, t + 1)
        nbrs = graph.neighbors(cur)
        deg = nbrs.size
        if non_backtracking and t > 0:
            k = max(min(int(u * (deg - 1)), deg - 2), 0)
            nxt = int(nbrs[k])
            if nxt == prev:
                nxt = int(nbrs[deg - 1])
        else:
            nxt = int(nbrs[min(int(u * deg), deg - 1)])
        trace.append(nxt)
        prev = cur
        cur = nxt
    return np.asarray(trace, dtype=np.int32)


def _walk_block(graph: SubstrateGraph, origin: int, seeds: np.ndarray,
                lengths: np.ndarray, non_backtracking: bool) -> tuple[np.ndarray, np.ndarray]:
    """Simulate one block of walks; returns (offsets, flat nodes) in walk order."""
    n = seeds.size
    if graph.degree(origin) == 0:
        # stuck at an isolated origin: every trace collapses to one node
        if np.any(lengths > 0):
            log.warning("origin %d is isolated; walks truncated to [origin]", origin)
        return (np.arange(n + 1, dtype=np.int64),
                np.full(n, origin, dtype=np.int32))
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(lengths + 1, out=offsets[1:])
    flat = np.empty(int(offsets[-1]), dtype=np.int32)
    flat[offsets[:-1]] = origin

    order = np.argsort(-lengths, kind="stable")
    seeds_s = seeds[order]
    neg_lengths = -lengths[order]           # ascending
    base = offsets[:-1][order]              # origin slot of each sorted walk
    longest = int(lengths[order[0]]) if n else 0

    indptr, indices = graph.indptr, graph.indices
    pos = np.full(n, origin, dtype=np.int64)
    prev = np.full(n, -1, dtype=np.int64)
    for t in range(longest):
        na = int(np.searchsorted(neg_lengths, -t, side="left"))
        if na == 0:
            break
        u = stream_uniforms(seeds_s[:na], t + 1)
        cur = pos[:na]
        start = indptr[cur]
        deg = indptr[cur + 1] - start
        if non_backtracking and t > 0:
            k = np.maximum(np.minimum((u * (deg - 1)).astype(np.int64), deg - 2), 0)
            cand = indices[start + k].astype(np.int64)
            last = indices[start + deg - 1].astype(np.int64)
            nxt = np.where(cand == prev[:na], last, cand)
        else:
            choice = np.minimum((u * deg).astype(np.int64), deg - 1)
            nxt = indices[start + choice].astype(np.int64)
        flat[base[:na] + (t + 1)] = nxt
        prev[:na] = cur
        pos[:na] = nxt
    return offsets, flat


def simulate_walks(graph: SubstrateGraph, origin: int, n_walks: int,
                   lengths: LengthDist, seed: int, threads: int = 1,
                   non_backtracking: bool = False) -> WalkEnsemble:
    """Run ``n_walks`` independent walks from ``origin``.

    The result is identical for any ``threads`` value; threading only
    changes which worker evaluates each fixed block of walk indices.
    """
    if not (0 <= origin < graph.node_count):
        raise ParameterError(f"origin {origin} out of range")
    if n_walks < 0:
        raise ParameterError("n_walks must be >= 0")
    if threads < 1:
        raise ParameterError("threads must be >= 1")

    starts = list(range(0, n_walks, BLOCK_SIZE))

    def do_block(start: int) -> tuple[np.ndarray, np.ndarray]:
        count = min(BLOCK_SIZE, n_walks - start)
        seeds = walk_seeds(seed, start, count)
        block_lengths = sample_lengths(lengths, stream_uniforms(seeds, 0))
        return _walk_block(graph, origin, seeds, block_lengths, non_backtracking)

    if threads == 1 or len(starts) <= 1:
        parts = [do_block(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(do_block, starts))

    if not parts:
        return WalkEnsemble(origin=origin, node_count=graph.node_count,
                            offsets=np.zeros(1, dtype=np.int64),
                            nodes=np.empty(0, dtype=np.int32))
    sizes = np.asarray([p[0][-1] for p in parts], dtype=np.int64)
    shifts = np.concatenate([[0], np.cumsum(sizes)])
    offsets = np.concatenate([parts[0][0]] +
                             [p[0][1:] + shifts[i + 1] for i, p in enumerate(parts[1:], start=0)])
    flat = np.concatenate([p[1] for p in parts])
    return WalkEnsemble(origin=origin, node_count=graph.node_count,
                        offsets=offsets.astype(np.int64), nodes=flat)


# ---------------------------------------------------------------------------
# Ensemble summaries
# ---------------------------------------------------------------------------

def heaps_checkpoints(n_walks: int) -> np.ndarray:
    """Ensemble sizes at which to record vocabulary growth.

    Dense coverage up to 1000 walks, then about 50 points per decade, always
    including the final size.
    """
    if n_walks <= 0:
        return np.empty(0, dtype=np.int64)
    parts = [np.arange(1, min(n_walks, 1000) + 1, dtype=np.int64)]
    if n_walks > 1000:
        span = np.log10(n_walks) - 3.0
        num = max(2, int(np.ceil(span * 50)) + 1)
        parts.append(np.round(np.logspace(3.0, np.log10(n_walks), num=num)).astype(np.int64))
        parts.append(np.asarray([n_walks], dtype=np.int64))
    pts = np.unique(np.concatenate(parts))
    return pts[pts <= n_walks]


def heaps_curve(ensemble: WalkEnsemble, checkpoints: np.ndarray | None = None,
                count_origin: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Distinct visited nodes as a function of the number of walks.

    Returns ``(n_rw, n_distinct)`` sampled at ``checkpoints`` (1-based walk
    counts); with ``count_origin=False`` the origin never enters the tally.
    """
    n = ensemble.walk_count
    if checkpoints is None:
        checkpoints = heaps_checkpoints(n)
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    if np.any((checkpoints < 1) | (checkpoints > n)):
        raise ParameterError("checkpoints must lie in [1, walk_count]")
    walk_ids = np.repeat(np.arange(n, dtype=np.int64), np.diff(ensemble.offsets))
    nodes = ensemble.nodes
    if not count_origin:
        keep = nodes != ensemble.origin
        walk_ids, nodes = walk_ids[keep], nodes[keep]
    _, first_flat = np.unique(nodes, return_index=True)
    new_per_walk = np.bincount(walk_ids[first_flat], minlength=n)
    cumulative = np.cumsum(new_per_walk)
    return checkpoints, cumulative[checkpoints - 1]


def node_frequencies(ensemble: WalkEnsemble, count_origin: bool = True) -> np.ndarray:
    """Number of walks whose trace contains each node (at most one per walk)."""
    _, nodes = ensemble.walk_node_pairs(count_origin=count_origin)
    return np.bincount(nodes, minlength=ensemble.node_count).astype(np.int64)


def trace_lengths_histogram(ensemble: WalkEnsemble) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of walk step-lengths: (lengths, counts), lengths ascending."""
    lengths = ensemble.lengths()
    if lengths.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    v, c = np.unique(lengths, return_counts=True)
    return v.astype(np.int64), c.astype(np.int64)


def run_ensemble(graph: SubstrateGraph, config: WalkConfig, threads: int = 1
                 ) -> tuple[WalkEnsemble, tuple[np.ndarray, np.ndarray], np.ndarray]:
    """Simulate a configured ensemble and summarize it.

    Returns the ensemble, the vocabulary-growth curve ``(n_rw, n_distinct)``,
    and the per-node visit frequencies.
    """
    ens = simulate_walks(graph, config.origin, config.n_rw, config.lengths,
                         config.seed, threads=threads,
                         non_backtracking=config.non_backtracking)
    if config.n_rw == 0:
        curve = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
        freqs = np.zeros(graph.node_count, dtype=np.int64)
    else:
        curve = heaps_curve(ens, count_origin=config.count_origin)
        freqs = node_frequencies(ens, count_origin=config.count_origin)
    return ens, curve, freqs


def visit_probabilities(graph: SubstrateGraph, origin: int, lengths: LengthDist,
                        n_walks: int, seed: int, threads: int = 1) -> np.ndarray:
    """Monte Carlo estimate of the chance a single walk visits each node."""
    if n_walks < 1:
        raise ParameterError("n_walks must be >= 1")
    ens = simulate_walks(graph, origin, n_walks, lengths, seed, threads=threads)
    return node_frequencies(ens) / float(n_walks)
