"""Config-driven experiment pipelines with reproducible artifact directories.

A single JSON config drives either a synthetic run (substrate, walks,
co-occurrence network, observables, ring-model prediction) or an empirical
ingest run (cleaned corpus, focus-tag stream, the same observables).  All
randomness flows from one master seed, outputs are byte-stable across
reruns and thread counts, and the manifest records the fully resolved
config plus its hash so a directory can be reproduced from the manifest
alone.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cooc, ingest, observables, theory, walker
from .errors import ConfigError, FitError, ParameterError
from .formats import read_csv, sha256_of, write_csv, write_json
from .rng import derive_seed
from .substrate import (ErdosRenyi, GraphSpec, RegularTree, SubstrateGraph,
                        WattsStrogatz, bfs_rings, build_graph)
from .walker import (FixedLength, LengthDist, PowerLawLength, WalkConfig,
                     WalkEnsemble)

__all__ = [
    "FitWindows",
    "ObservableFlags",
    "TheoryOptions",
    "ExperimentConfig",
    "IngestConfig",
    "load_config",
    "run_experiment",
    "run_ingest",
    "run_stage",
    "compare",
]

FORMAT_VERSION = 1

# salts separating auxiliary random streams from the walk streams
_GRAPH_SALT = 0x67727068
_SIM_SALT = 0x73696D70

_OBSERVABLE_FILES = [
    "degree_dist.csv", "strength_dist.csv", "weight_dist.csv",
    "s_of_k.csv", "knn_of_k.csv", "clustering_of_k.csv",
    "weight_vs_product.csv", "similarity_hist.csv", "frequency_rank.csv",
]


# ---------------------------------------------------------------------------
# Config schema
# ---------------------------------------------------------------------------

def _check_keys(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _get(mapping: dict, key: str, kind, where: str, default=None, required=False):
    if key not in mapping:
        if required:
            raise ConfigError(f"missing required key '{key}' in {where}")
        return default
    value = mapping[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is int and isinstance(value, bool):
        raise ConfigError(f"'{key}' in {where} must be {kind.__name__}")
    if not isinstance(value, kind):
        raise ConfigError(f"'{key}' in {where} must be {kind.__name__}")
    return value


@dataclass(frozen=True)
class FitWindows:
    """Documented default fitting windows for the standard analyses.

    Vocabulary growth is fitted for n_rw >= heaps_min; the frequency-rank
    series over ranks [1, zipf_max_rank]; the weight versus degree-product
    tail over the top tail_decades decades of the product axis, with the
    plateau read off the lowest product decile.
    """

    heaps_min: float = 100.0
    zipf_max_rank: int = 1000
    tail_decades: float = 2.5

    @classmethod
    def from_dict(cls, d: dict) -> "FitWindows":
        _check_keys(d, {"heaps_min", "zipf_max_rank", "tail_decades"}, "fits")
        return cls(heaps_min=_get(d, "heaps_min", float, "fits", 100.0),
                   zipf_max_rank=_get(d, "zipf_max_rank", int, "fits", 1000),
                   tail_decades=_get(d, "tail_decades", float, "fits", 2.5))

    def to_dict(self) -> dict:
        return {"heaps_min": self.heaps_min, "zipf_max_rank": self.zipf_max_rank,
                "tail_decades": self.tail_decades}


@dataclass(frozen=True)
class ObservableFlags:
    distributions: bool = True
    s_of_k: bool = True
    knn: bool = True
    clustering: bool = True
    weight_vs_product: bool = True
    similarity: bool = True
    frequency_rank: bool = True
    similarity_pair_budget: int = 10 ** 6

    @classmethod
    def from_dict(cls, d: dict) -> "ObservableFlags":
        allowed = {"distributions", "s_of_k", "knn", "clustering",
                   "weight_vs_product", "similarity", "frequency_rank",
                   "similarity_pair_budget"}
        _check_keys(d, allowed, "observables")
        kw = {}
        for key in allowed - {"similarity_pair_budget"}:
            kw[key] = _get(d, key, bool, "observables", True)
        kw["similarity_pair_budget"] = _get(d, "similarity_pair_budget", int,
                                            "observables", 10 ** 6)
        return cls(**kw)

    def to_dict(self) -> dict:
        return {"distributions": self.distributions, "s_of_k": self.s_of_k,
                "knn": self.knn, "clustering": self.clustering,
                "weight_vs_product": self.weight_vs_product,
                "similarity": self.similarity,
                "frequency_rank": self.frequency_rank,
                "similarity_pair_budget": self.similarity_pair_budget}


@dataclass(frozen=True)
class TheoryOptions:
    """Ring-model prediction settings for the theory stage."""

    ring_prediction: bool = True
    rings: str | dict = "bfs"      # "bfs" or a ring-structure dict
    n_grid: dict | None = None     # {"min","max","points"} log grid override

    @classmethod
    def from_dict(cls, d: dict) -> "TheoryOptions":
        _check_keys(d, {"ring_prediction", "rings", "n_grid"}, "theory")
        rings = d.get("rings", "bfs")
        if isinstance(rings, dict):
            _check_keys(rings, {"type", "a", "c_n", "z"}, "theory.rings")
            kind = _get(rings, "type", str, "theory.rings", required=True)
            if kind not in ("power_law", "exponential"):
                raise ConfigError(f"unknown ring structure type '{kind}'")
        elif rings != "bfs":
            raise ConfigError("theory.rings must be 'bfs' or a ring-structure object")
        n_grid = d.get("n_grid")
        if n_grid is not None:
            _check_keys(n_grid, {"min", "max", "points"}, "theory.n_grid")
            for key in ("min", "max", "points"):
                if key not in n_grid:
                    raise ConfigError(f"missing '{key}' in theory.n_grid")
        return cls(ring_prediction=_get(d, "ring_prediction", bool, "theory", True),
                   rings=rings, n_grid=n_grid)

    def to_dict(self) -> dict:
        return {"ring_prediction": self.ring_prediction, "rings": self.rings,
                "n_grid": self.n_grid}

    def ring_structure(self, graph: SubstrateGraph, origin: int):
        if self.rings == "bfs":
            return bfs_rings(graph, origin)
        if self.rings["type"] == "power_law":
            return theory.PowerLawRings(a=float(self.rings.get("a", 1.0)),
                                        c_n=float(self.rings.get("c_n", 1.0)))
        return theory.ExponentialRings(z=float(self.rings["z"]))


def _lengths_from_dict(d: dict) -> LengthDist:
    kind = _get(d, "type", str, "walk.lengths", required=True)
    if kind == "fixed":
        _check_keys(d, {"type", "value"}, "walk.lengths")
        return FixedLength(_get(d, "value", int, "walk.lengths", required=True))
    if kind == "power_law":
        _check_keys(d, {"type", "exponent", "l_min", "l_max"}, "walk.lengths")
        return PowerLawLength(
            exponent=_get(d, "exponent", float, "walk.lengths", 3.0),
            l_min=_get(d, "l_min", int, "walk.lengths", 1),
            l_max=_get(d, "l_max", int, "walk.lengths", 1000))
    raise ConfigError(f"unknown length distribution type '{kind}'")


def _lengths_to_dict(lengths: LengthDist) -> dict:
    if isinstance(lengths, FixedLength):
        return {"type": "fixed", "value": lengths.value}
    return {"type": "power_law", "exponent": lengths.exponent,
            "l_min": lengths.l_min, "l_max": lengths.l_max}


def _graph_from_dict(d: dict, seed: int) -> GraphSpec:
    kind = _get(d, "type", str, "graph", required=True)
    if kind == "watts_strogatz":
        _check_keys(d, {"type", "n", "k", "p_rewire"}, "graph")
        variant = WattsStrogatz(n=_get(d, "n", int, "graph", required=True),
                                k=_get(d, "k", int, "graph", required=True),
                                p_rewire=_get(d, "p_rewire", float, "graph",
                                              required=True))
    elif kind == "regular_tree":
        _check_keys(d, {"type", "z", "depth"}, "graph")
        variant = RegularTree(z=_get(d, "z", int, "graph", required=True),
                              depth=_get(d, "depth", int, "graph", required=True))
    elif kind == "erdos_renyi":
        _check_keys(d, {"type", "n", "mean_degree"}, "graph")
        variant = ErdosRenyi(n=_get(d, "n", int, "graph", required=True),
                             mean_degree=_get(d, "mean_degree", float, "graph",
                                              required=True))
    else:
        raise ConfigError(f"unknown graph type '{kind}'")
    return GraphSpec(variant=variant, seed=derive_seed(seed, _GRAPH_SALT))


def _graph_to_dict(spec: GraphSpec) -> dict:
    v = spec.variant
    if isinstance(v, WattsStrogatz):
        return {"type": "watts_strogatz", "n": v.n, "k": v.k, "p_rewire": v.p_rewire}
    if isinstance(v, RegularTree):
        return {"type": "regular_tree", "z": v.z, "depth": v.depth}
    return {"type": "erdos_renyi", "n": v.n, "mean_degree": v.mean_degree}


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved synthetic-run configuration."""

    seed: int
    graph: GraphSpec
    walk: WalkConfig
    observables: ObservableFlags = ObservableFlags()
    theory: TheoryOptions = TheoryOptions()
    fits: FitWindows = FitWindows()
    emit_traces: bool = False
    format_version: int = FORMAT_VERSION

    @classmethod
    def from_dict(cls, d: dict, seed_override: int | None = None) -> "ExperimentConfig":
        allowed = {"format_version", "seed", "graph", "walk", "observables",
                   "theory", "fits", "emit_traces"}
        _check_keys(d, allowed, "config")
        version = _get(d, "format_version", int, "config", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ConfigError(f"unsupported format_version {version}")
        seed = seed_override if seed_override is not None else \
            _get(d, "seed", int, "config", required=True)
        graph = _graph_from_dict(_get(d, "graph", dict, "config", required=True), seed)
        wd = _get(d, "walk", dict, "config", required=True)
        _check_keys(wd, {"origin", "n_rw", "lengths", "count_origin",
                         "non_backtracking"}, "walk")
        lengths = _lengths_from_dict(wd["lengths"]) if "lengths" in wd else \
            PowerLawLength(3.0, 1, 1000)
        walk = WalkConfig(origin=_get(wd, "origin", int, "walk", 0),
                          n_rw=_get(wd, "n_rw", int, "walk", required=True),
                          lengths=lengths, seed=seed,
                          count_origin=_get(wd, "count_origin", bool, "walk", True),
                          non_backtracking=_get(wd, "non_backtracking", bool,
                                                "walk", False))
        return cls(seed=seed, graph=graph, walk=walk,
                   observables=ObservableFlags.from_dict(d.get("observables", {})),
                   theory=TheoryOptions.from_dict(d.get("theory", {})),
                   fits=FitWindows.from_dict(d.get("fits", {})),
                   emit_traces=_get(d, "emit_traces", bool, "config", False),
                   format_version=version)

    def resolved(self) -> dict:
        return {"format_version": self.format_version,
                "seed": self.seed,
                "graph": _graph_to_dict(self.graph),
                "walk": {"origin": self.walk.origin, "n_rw": self.walk.n_rw,
                         "lengths": _lengths_to_dict(self.walk.lengths),
                         "count_origin": self.walk.count_origin,
                         "non_backtracking": self.walk.non_backtracking},
                "observables": self.observables.to_dict(),
                "theory": self.theory.to_dict(),
                "fits": self.fits.to_dict(),
                "emit_traces": self.emit_traces}


@dataclass(frozen=True)
class IngestConfig:
    """Resolved empirical-run configuration."""

    seed: int
    input_path: str
    focus_tag: str
    ts_min: int = ingest.DEFAULT_TS_MIN
    ts_max: int | None = None
    observables: ObservableFlags = ObservableFlags()
    fits: FitWindows = FitWindows()
    format_version: int = FORMAT_VERSION

    @classmethod
    def from_dict(cls, d: dict, seed_override: int | None = None) -> "IngestConfig":
        allowed = {"format_version", "seed", "ingest", "observables", "fits"}
        _check_keys(d, allowed, "config")
        version = _get(d, "format_version", int, "config", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ConfigError(f"unsupported format_version {version}")
        seed = seed_override if seed_override is not None else \
            _get(d, "seed", int, "config", required=True)
        sub = _get(d, "ingest", dict, "config", required=True)
        _check_keys(sub, {"input", "focus_tag", "ts_min", "ts_max"}, "ingest")
        ts_max = sub.get("ts_max")
        if ts_max is not None and (isinstance(ts_max, bool) or
                                   not isinstance(ts_max, int)):
            raise ConfigError("'ts_max' in ingest must be int or null")
        return cls(seed=seed,
                   input_path=_get(sub, "input", str, "ingest", required=True),
                   focus_tag=_get(sub, "focus_tag", str, "ingest", required=True),
                   ts_min=_get(sub, "ts_min", int, "ingest", ingest.DEFAULT_TS_MIN),
                   ts_max=ts_max,
                   observables=ObservableFlags.from_dict(d.get("observables", {})),
                   fits=FitWindows.from_dict(d.get("fits", {})),
                   format_version=version)

    def resolved(self) -> dict:
        return {"format_version": self.format_version,
                "seed": self.seed,
                "ingest": {"input": self.input_path, "focus_tag": self.focus_tag,
                           "ts_min": self.ts_min, "ts_max": self.ts_max},
                "observables": self.observables.to_dict(),
                "fits": self.fits.to_dict()}


def load_config(path, seed_override: int | None = None):
    """Parse a config file into an ExperimentConfig or IngestConfig."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        d = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    if "ingest" in d:
        return IngestConfig.from_dict(d, seed_override)
    return ExperimentConfig.from_dict(d, seed_override)


# ---------------------------------------------------------------------------
# Fit helpers
# ---------------------------------------------------------------------------

def _fit_or_none(x, y, window) -> dict | None:
    try:
        fr = observables.fit_power_law(x, y, window)
    except FitError:
        return None
    return {"exponent": fr.exponent, "stderr": fr.stderr,
            "window": [fr.window[0], fr.window[1]], "points": fr.points}


def _finite_or_none(value) -> float | None:
    value = float(value)
    return value if np.isfinite(value) else None


# ---------------------------------------------------------------------------
# Observable emission (shared by synthetic and empirical runs)
# ---------------------------------------------------------------------------

def _write_graph_observables(g: cooc.CoocGraph, out: Path, flags: ObservableFlags,
                             fitw: FitWindows, sim_seed: int,
                             fits: dict) -> None:
    obs_dir = out / "observables"
    obs_dir.mkdir(parents=True, exist_ok=True)
    if g.edge_count:
        observables.assert_accounting(g)
    if flags.distributions:
        pk, ps, pw = observables.degree_strength_weight_distributions(g)
        for name, dist in [("degree_dist", pk), ("strength_dist", ps),
                           ("weight_dist", pw)]:
            write_csv(obs_dir / f"{name}.csv", ["value", "count"],
                      zip(dist.values, dist.counts))
    if flags.s_of_k:
        series = observables.s_of_k(g)
        write_csv(obs_dir / "s_of_k.csv", ["k", "mean_s", "n"],
                  zip(series.x, series.y, series.n))
    if flags.knn:
        plain = observables.knn_of_k(g, weighted=False)
        weighted = observables.knn_of_k(g, weighted=True)
        write_csv(obs_dir / "knn_of_k.csv", ["k", "knn", "knn_w", "n"],
                  zip(plain.x, plain.y, weighted.y, plain.n))
    if flags.clustering:
        plain = observables.clustering_of_k(g, weighted=False)
        weighted = observables.clustering_of_k(g, weighted=True)
        write_csv(obs_dir / "clustering_of_k.csv", ["k", "c", "c_w", "n"],
                  zip(plain.x, plain.y, weighted.y, plain.n))
    if flags.weight_vs_product:
        products, weights, binned = observables.weight_vs_kikj(g)
        write_csv(obs_dir / "weight_vs_product.csv", ["kikj", "mean_w", "n"],
                  zip(binned.x, binned.y, binned.n))
        if products.size:
            decile = np.quantile(products, 0.10)
            fits["weight_product_plateau"] = _finite_or_none(
                weights[products <= decile].mean())
            p_max = float(products.max())
            fits["weight_product_tail"] = _fit_or_none(
                binned.x, binned.y, (p_max / 10 ** fitw.tail_decades, p_max))
        else:
            fits["weight_product_plateau"] = None
            fits["weight_product_tail"] = None
    if flags.similarity:
        hist = observables.cosine_similarity_distribution(
            g, pair_budget=flags.similarity_pair_budget, seed=sim_seed)
        write_csv(obs_dir / "similarity_hist.csv", ["bin_lo", "bin_hi", "count"],
                  zip(hist.edges[:-1], hist.edges[1:], hist.counts))
        fits["similarity_mode"] = (float(hist.mode_center())
                                   if hist.counts.sum() else None)


def _write_frequency_rank(counts, out: Path, fitw: FitWindows, fits: dict) -> None:
    ranks, ordered = observables.frequency_rank(counts)
    obs_dir = out / "observables"
    obs_dir.mkdir(parents=True, exist_ok=True)
    write_csv(obs_dir / "frequency_rank.csv", ["rank", "count"],
              zip(ranks, ordered))
    fits["zipf"] = _fit_or_none(ranks, ordered, (1, fitw.zipf_max_rank))


def _combine_zipf_heaps(fits: dict) -> None:
    heaps = fits.get("heaps")
    zipf = fits.get("zipf")
    fits["zipf_heaps_product"] = (abs(zipf["exponent"]) * heaps["exponent"]
                                  if heaps and zipf else None)


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------

def _write_manifest(out: Path, resolved: dict, provenance: dict | None = None) -> None:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    manifest = {"format_version": resolved["format_version"],
                "config": resolved,
                "config_sha256": hashlib.sha256(blob.encode("ascii")).hexdigest()}
    if provenance is not None:
        manifest["provenance"] = provenance
    write_json(out / "manifest.json", manifest)


# ---------------------------------------------------------------------------
# Synthetic pipeline
# ---------------------------------------------------------------------------

def _load_or_build_graph(cfg: ExperimentConfig, out: Path) -> SubstrateGraph:
    path = out / "substrate.edges"
    if path.exists():
        return SubstrateGraph.read_edge_list(path)
    return build_graph(cfg.graph)


def _theory_stage(cfg: ExperimentConfig, out: Path, graph: SubstrateGraph) -> None:
    if not cfg.theory.ring_prediction:
        return
    theory_dir = out / "theory"
    theory_dir.mkdir(parents=True, exist_ok=True)
    rings = cfg.theory.ring_structure(graph, cfg.walk.origin)
    spec = theory.RingModelSpec(rings=rings, lengths=cfg.walk.lengths)
    heaps_path = out / "heaps.csv"
    simulated = None
    if cfg.theory.n_grid is not None:
        grid_cfg = cfg.theory.n_grid
        n_values = np.logspace(np.log10(float(grid_cfg["min"])),
                               np.log10(float(grid_cfg["max"])),
                               int(grid_cfg["points"]))
    elif heaps_path.exists():
        _, rows = read_csv(heaps_path)
        n_values = np.asarray([int(r[0]) for r in rows], dtype=np.int64)
        simulated = np.asarray([int(r[1]) for r in rows], dtype=np.int64)
    else:
        n_values = np.empty(0, dtype=np.int64)
    predicted = theory.n_distinct_random_length(spec, n_values.astype(np.float64)) \
        if n_values.size else np.empty(0)
    if not cfg.walk.count_origin:
        predicted = predicted - 1.0  # the origin ring contributes exactly 1
    write_csv(theory_dir / "prediction.csv", ["n_rw", "prediction"],
              zip(n_values, predicted))
    if simulated is not None:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(predicted > 0, simulated / predicted, np.nan)
        write_csv(theory_dir / "comparison.csv",
                  ["n_rw", "simulated", "predicted", "ratio"],
                  zip(n_values, simulated, predicted, ratio))


def run_experiment(cfg: ExperimentConfig, out_dir, threads: int = 1) -> Path:
    """End-to-end synthetic run; returns the artifact directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    graph = build_graph(cfg.graph)
    graph.write_edge_list(out / "substrate.edges")
    ens, (heaps_n, heaps_d), freqs = walker.run_ensemble(graph, cfg.walk,
                                                         threads=threads)
    if cfg.emit_traces:
        ens.write_traces(out / "traces.txt")
    write_csv(out / "heaps.csv", ["n_rw", "n_distinct"], zip(heaps_n, heaps_d))
    g = cooc.build_from_traces(ens, count_origin=cfg.walk.count_origin)
    g.write_edge_list(out / "cooc.edges")

    fits: dict = {}
    fits["heaps"] = _fit_or_none(heaps_n, heaps_d,
                                 (cfg.fits.heaps_min, max(cfg.walk.n_rw, 1)))
    _write_graph_observables(g, out, cfg.observables, cfg.fits,
                             derive_seed(cfg.seed, _SIM_SALT), fits)
    if cfg.observables.frequency_rank:
        _write_frequency_rank(freqs, out, cfg.fits, fits)
    _combine_zipf_heaps(fits)
    write_json(out / "fits.json", fits)
    _theory_stage(cfg, out, graph)
    _write_manifest(out, cfg.resolved())
    return out


def run_stage(cfg: ExperimentConfig, out_dir, stage: str, threads: int = 1) -> Path:
    """Run one pipeline stage into (or out of) an artifact directory.

    Stages: ``generate`` writes the substrate; ``walk`` writes traces and
    the vocabulary curve; ``cooc`` projects an existing traces file;
    ``stats`` analyzes an existing co-occurrence network; ``theory`` adds
    the ring-model prediction.  Later stages read earlier stages' files,
    so externally supplied inputs in the same formats work too.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if stage == "generate":
        graph = build_graph(cfg.graph)
        graph.write_edge_list(out / "substrate.edges")
    elif stage == "walk":
        graph = _load_or_build_graph(cfg, out)
        if not (out / "substrate.edges").exists():
            graph.write_edge_list(out / "substrate.edges")
        ens, (heaps_n, heaps_d), _ = walker.run_ensemble(graph, cfg.walk,
                                                         threads=threads)
        ens.write_traces(out / "traces.txt")
        write_csv(out / "heaps.csv", ["n_rw", "n_distinct"], zip(heaps_n, heaps_d))
    elif stage == "cooc":
        traces_path = out / "traces.txt"
        if not traces_path.exists():
            raise FileNotFoundError(f"{traces_path} not found; run the walk stage first")
        graph = _load_or_build_graph(cfg, out)
        ens = WalkEnsemble.read_traces(traces_path, node_count=graph.node_count)
        g = cooc.build_from_traces(ens, count_origin=cfg.walk.count_origin)
        g.write_edge_list(out / "cooc.edges")
    elif stage == "stats":
        cooc_path = out / "cooc.edges"
        if not cooc_path.exists():
            raise FileNotFoundError(f"{cooc_path} not found; run the cooc stage first")
        g = cooc.CoocGraph.read_edge_list(cooc_path)
        fits: dict = {}
        heaps_path = out / "heaps.csv"
        if heaps_path.exists():
            _, rows = read_csv(heaps_path)
            heaps_n = np.asarray([int(r[0]) for r in rows])
            heaps_d = np.asarray([int(r[1]) for r in rows])
            fits["heaps"] = _fit_or_none(
                heaps_n, heaps_d,
                (cfg.fits.heaps_min, max(cfg.walk.n_rw, 1)))
        else:
            fits["heaps"] = None
        _write_graph_observables(g, out, cfg.observables, cfg.fits,
                                 derive_seed(cfg.seed, _SIM_SALT), fits)
        traces_path = out / "traces.txt"
        if cfg.observables.frequency_rank and traces_path.exists():
            graph = _load_or_build_graph(cfg, out)
            ens = WalkEnsemble.read_traces(traces_path, node_count=graph.node_count)
            freqs = walker.node_frequencies(ens, count_origin=cfg.walk.count_origin)
            _write_frequency_rank(freqs, out, cfg.fits, fits)
        _combine_zipf_heaps(fits)
        write_json(out / "fits.json", fits)
    elif stage == "theory":
        graph = _load_or_build_graph(cfg, out)
        _theory_stage(cfg, out, graph)
    else:
        raise ParameterError(f"unknown stage '{stage}'")
    _write_manifest(out, cfg.resolved())
    return out


# ---------------------------------------------------------------------------
# Empirical pipeline
# ---------------------------------------------------------------------------

def run_ingest(cfg: IngestConfig, out_dir, strict: bool = False) -> Path:
    """Parse, clean, and analyze an annotation log around one focus tag."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    window = ingest.ValidityWindow(ts_min=cfg.ts_min, ts_max=cfg.ts_max)
    corpus, report = ingest.parse_posts(cfg.input_path, window=window,
                                        strict=strict)
    corpus.write_jsonl(out / "corpus.jsonl")
    report.write_csv(out / "rejects.csv")
    focus = cfg.focus_tag.lower()
    stream = ingest.filter_by_tag(corpus, focus)
    n_posts, n_distinct = ingest.vocabulary_growth(stream, focus)
    write_csv(out / "heaps.csv", ["n_rw", "n_distinct"], zip(n_posts, n_distinct))
    g = ingest.empirical_cooc(stream, focus)
    g.write_edge_list(out / "cooc.edges")
    g.write_labels(out / "cooc_labels.tsv")

    fits: dict = {}
    fits["heaps"] = _fit_or_none(n_posts, n_distinct,
                                 (cfg.fits.heaps_min, max(len(stream), 1)))
    _write_graph_observables(g, out, cfg.observables, cfg.fits,
                             derive_seed(cfg.seed, _SIM_SALT), fits)
    if cfg.observables.frequency_rank:
        _write_frequency_rank(ingest.tag_post_counts(stream, focus), out,
                              cfg.fits, fits)
    _combine_zipf_heaps(fits)
    write_json(out / "fits.json", fits)
    provenance = dict(corpus.provenance)
    provenance["input_sha256"] = sha256_of(cfg.input_path)
    provenance["accepted"] = report.accepted
    provenance["focus_posts"] = len(stream)
    _write_manifest(out, cfg.resolved(), provenance=provenance)
    return out


# ---------------------------------------------------------------------------
# Comparison report
# ---------------------------------------------------------------------------

def _compare_csv(left: Path, right: Path, name: str, out: Path,
                 warnings: list[str]) -> None:
    lp, rp = left / name, right / name
    if not lp.exists() or not rp.exists():
        missing = "left" if not lp.exists() else "right"
        if lp.exists() or rp.exists():
            warnings.append(f"{name} missing on {missing}")
        return
    lh, lrows = read_csv(lp)
    rh, rrows = read_csv(rp)
    if len(lh) < 2 or len(rh) < 2:
        warnings.append(f"{name} has no data columns")
        return
    rmap = {row[0]: row[1] for row in rrows}
    joined = [(row[0], row[1], rmap[row[0]]) for row in lrows if row[0] in rmap]
    dest = out / name
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{lh[0]},left_{lh[1]},right_{rh[1]}\n")
        for x, lv, rv in joined:
            fh.write(f"{x},{lv},{rv}\n")
    if not joined:
        warnings.append(f"{name}: no common x values")


def compare(left_dir, right_dir, out_dir) -> Path:
    """Side-by-side report of two artifact directories.

    Joins every shared observable CSV on its x column and diffs the fitted
    exponents; observables present on only one side are listed as warnings
    in summary.json rather than failing.
    """
    left, right, out = Path(left_dir), Path(right_dir), Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    warnings: list[str] = []
    _compare_csv(left, right, "heaps.csv", out, warnings)
    for name in _OBSERVABLE_FILES:
        _compare_csv(left, right, f"observables/{name}", out, warnings)

    summary: dict = {"left": str(left), "right": str(right), "fits": {}}
    lfits = json.loads((left / "fits.json").read_text()) \
        if (left / "fits.json").exists() else {}
    rfits = json.loads((right / "fits.json").read_text()) \
        if (right / "fits.json").exists() else {}
    for key in sorted(set(lfits) | set(rfits)):
        lv, rv = lfits.get(key), rfits.get(key)
        if isinstance(lv, dict):
            lv = lv.get("exponent")
        if isinstance(rv, dict):
            rv = rv.get("exponent")
        if lv is None or rv is None:
            warnings.append(f"fit '{key}' unavailable on "
                            f"{'left' if lv is None else 'right'}")
            continue
        summary["fits"][key] = {"left": lv, "right": rv,
                                "difference": lv - rv}
    summary["warnings"] = sorted(warnings)
    write_json(out / "summary.json", summary)
    return out
