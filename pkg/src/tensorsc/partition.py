"""Tensor spectral bisection and recursive clustering."""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import asdict, dataclass, field
from typing import IO

import numpy as np

from .graph import DirectedGraph
from .mlpr import MlprConfig, solve_mlpr
from .motifs import MotifTensor, build_tensor, normalize
from .orderings import tsc_ordering
from .sweep import SweepProfile, best_cut, sweep

logger = logging.getLogger(__name__)


class NoMotifError(ValueError):
    pass


class EarlyStopWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TSCConfig:
    alpha: float = 0.99
    gamma: float = 0.01
    tol: float = 1e-10
    max_iters: int = 10_000
    score: str = "cond3"
    k_min: int = 1
    seed: int = 0

    def mlpr(self) -> MlprConfig:
        return MlprConfig(alpha=self.alpha, gamma=self.gamma, tol=self.tol, max_iters=self.max_iters)


@dataclass
class Bisection:
    S: list[int]
    S_bar: list[int]
    profile: SweepProfile
    score: float
    info: dict = field(default_factory=dict)


def tsc_profile(g: DirectedGraph, t: MotifTensor, cfg: TSCConfig = TSCConfig(), k_min=None):
    """Run the TSC pipeline up to the sweep profile; returns ``(profile, info)``."""
    if t.total == 0:
        raise NoMotifError(
            f"graph has no {t.kind} motifs; choose another tensor kind or a baseline method"
        )
    tt = normalize(t)
    res = solve_mlpr(tt, cfg.mlpr())
    ov = tsc_ordering(tt, res.x, seed=cfg.seed)
    prof = sweep(g, t, ov, cfg.k_min if k_min is None else k_min)
    info = {"mlpr_converged": res.converged, "mlpr_iterations": res.iterations,
            "mlpr_residual": res.residual_1norm, "eigen": {k: v for k, v in ov.eigen.items()}}
    return prof, info


def bisect(g: DirectedGraph, tensor_kind: str = "d3c", cfg: TSCConfig = TSCConfig(),
           t: MotifTensor | None = None, method: str = "tsc") -> Bisection:
    """Split ``g`` in two by sweeping an ordering under ``cfg.score``.

    ``method`` is ``"tsc"`` (tensor spectral partitioning) or one of the
    baselines; baselines are still scored with the motif tensor.
    """
    if g.n < 2:
        raise ValueError("need at least two nodes to bisect")
    t = build_tensor(g, tensor_kind) if t is None else t
    if method == "tsc":
        prof, info = tsc_profile(g, t, cfg)
    else:
        from .baselines import run_baseline
        prof = run_baseline(g, method, t, cfg.score, cfg.seed, cfg.k_min)
        info = {}
    cut = best_cut(prof, cfg.score)
    S = cut.best_set
    S_bar = sorted(set(range(g.n)) - set(S))
    info["k"] = cut.prefix_index
    return Bisection(S, S_bar, prof, cut.best_score, info)


@dataclass
class Partition:
    assignment: np.ndarray
    clusters: list[list[int]]
    meta: list[dict]
    warnings: list[str] = field(default_factory=list)

    @property
    def C(self) -> int:
        return len(self.clusters)

    def labelled(self, g: DirectedGraph) -> list[list[int]]:
        return [sorted(int(g.labels[i]) for i in c) for c in self.clusters]

    def to_json(self, g: DirectedGraph, method: str, tensor_kind: str, cfg: TSCConfig) -> str:
        doc = {"method": method, "tensor_kind": tensor_kind, "config": asdict(cfg),
               "clusters": self.labelled(g), "meta": self.meta, "warnings": self.warnings}
        return json.dumps(doc, indent=1)

    def to_tsv(self, g: DirectedGraph, stream: IO[str]) -> None:
        for i in range(len(self.assignment)):
            stream.write(f"{int(g.labels[i])}\t{int(self.assignment[i])}\n")


def cluster(g: DirectedGraph, tensor_kind: str = "d3c", cfg: TSCConfig = TSCConfig(), C: int = 2,
            method: str = "tsc", t: MotifTensor | None = None) -> Partition:
    """Recursive bisection into ``C`` clusters, always splitting the largest.

    Each split sees the induced subgraph with the parent tensor restricted to
    it. If the cluster to split has no motifs (TSC) the recursion stops early
    with a warning and a partial partition.
    """
    if not 2 <= C <= g.n:
        raise ValueError(f"need 2 <= C <= n, got C={C}, n={g.n}")
    t = build_tensor(g, tensor_kind) if t is None else t
    parts: list[np.ndarray] = [np.arange(g.n)]
    scores: list[float | None] = [None]
    notes: list[str] = []
    while len(parts) < C:
        sizes = [p.size for p in parts]
        c = int(np.argmax(sizes))
        nodes = parts[c]
        if nodes.size < 2:
            notes.append(f"stopped at {len(parts)} clusters: largest cluster is a singleton")
            break
        sub_t = t.restrict(nodes)
        if method == "tsc" and sub_t.total == 0:
            notes.append(f"stopped at {len(parts)} clusters: cluster {c} has no {t.kind} motifs")
            break
        half = bisect(g.subgraph(nodes), tensor_kind, cfg, t=sub_t, method=method)
        parts[c] = nodes[half.S]
        parts.append(nodes[half.S_bar])
        scores[c] = half.score
        scores.append(half.score)
    for msg in notes:
        warnings.warn(msg, EarlyStopWarning, stacklevel=2)

    order = sorted(range(len(parts)), key=lambda i: int(parts[i].min()))
    clusters = [sorted(parts[i].tolist()) for i in order]
    assignment = np.empty(g.n, dtype=np.int64)
    meta = []
    for cid, i in enumerate(order):
        assignment[parts[i]] = cid
        meta.append({"size": int(parts[i].size), "motifs": t.restrict(parts[i]).total,
                     "split_score": scores[i]})
    return Partition(assignment, clusters, meta, notes)
