"""Baseline orderings swept against the same higher-order scores as TSC."""

from __future__ import annotations

import numpy as np

from .graph import DirectedGraph, motif_core_nodes
from .motifs import MotifTensor
from .orderings import (
    OrderingVector,
    al_ordering,
    co_ordering,
    dl_ordering,
    random_ordering,
    ul_ordering,
)
from .sweep import SCORES, SweepProfile, best_cut, sweep

METHODS = ("ul", "dl", "al", "co", "random", "sub-dl")


def baseline_ordering(g: DirectedGraph, method: str, seed: int = 0, t: MotifTensor | None = None):
    """Ordering(s) for ``method``; ``co`` yields a pair, the rest a single vector."""
    if method == "ul":
        return ul_ordering(g)
    if method == "dl":
        return dl_ordering(g)
    if method == "al":
        return al_ordering(g)
    if method == "co":
        return co_ordering(g)
    if method == "random":
        return random_ordering(g.n, seed)
    if method == "sub-dl":
        if t is None:
            raise ValueError("sub-dl needs the motif tensor")
        return sub_dl_ordering(g, t)
    raise ValueError(f"unknown baseline {method!r}; expected one of {METHODS}")


def sub_dl_ordering(g: DirectedGraph, t: MotifTensor) -> OrderingVector:
    """Directed Laplacian on the motif core, extended to every node of ``g``.

    Core nodes come first in DL order, then the remaining nodes by index.
    """
    core, mask = motif_core_nodes(g, t)
    sub = g.subgraph(np.arange(g.n), edge_mask=mask).subgraph(core)
    ov = dl_ordering(sub)
    order = np.concatenate([np.asarray(core)[ov.order()], np.setdiff1d(np.arange(g.n), core)])
    scores = np.empty(g.n)
    scores[order] = np.arange(g.n, dtype=float)
    meta = dict(ov.eigen, core=list(map(int, core)))
    return OrderingVector(scores, "sub-dl", meta)


def run_baseline(g: DirectedGraph, method: str, t: MotifTensor, score_kind: str = "cond3",
                 seed: int = 0, k_min: int = 1) -> SweepProfile:
    """Sweep profile of a baseline ordering under the higher-order scores of ``t``.

    For ``co`` both singular vectors are swept and the profile whose best
    ``score_kind`` is lower is returned (``meta["vector"]`` names it).
    """
    if score_kind not in SCORES:
        raise ValueError(f"unknown score {score_kind!r}")
    ov = baseline_ordering(g, method, seed, t)
    if method != "co":
        return sweep(g, t, ov, k_min)
    profiles = [sweep(g, t, o, k_min, method="co") for o in ov]
    scores = [best_cut(p, score_kind).best_score for p in profiles]
    win = 0 if scores[0] <= scores[1] else 1
    best = profiles[win]
    best.meta["vector"] = ("left", "right")[win]
    best.meta["candidates"] = {"left": scores[0], "right": scores[1]}
    return best


def sub_dl(g: DirectedGraph, t: MotifTensor, k_min: int = 1) -> SweepProfile:
    return sweep(g, t, sub_dl_ordering(g, t), k_min)
