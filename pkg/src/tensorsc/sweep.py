"""Sweep cuts scored by edge and higher-order conductance/expansion.

Conventions:

* ``cut(S)`` counts directed edges with exactly one endpoint in ``S`` and
  ``vol(S)`` sums in- plus out-degree over ``S``, so ``vol(S) + vol(S^c) = 2m``.
* ``cut3`` and ``vol3`` sum the tensor over ordered index triples. A
  straddling ordered triple is counted once per index position (so the cut
  is divided by three), which keeps ``phi3`` in ``[0, 1]``. ``vol3(S)`` is
  ``sum T(S, V, V)``.
* A zero denominator gives a score of 1 if the numerator is positive, else 0.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .graph import DirectedGraph
from .motifs import MotifTensor

COLUMNS = ("k", "node", "cut", "vol", "phi", "ncut", "rho", "cut3", "vol3", "phi3", "rho3", "density")
SCORES = {"cond3": "phi3", "exp3": "rho3", "cond": "phi", "ncut": "ncut", "exp": "rho"}
_INT_COLUMNS = {"k", "node", "cut", "vol", "cut3", "vol3"}
TIE_TOL = 1e-12


def _ratio(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    safe = np.where(den > 0, den, 1.0)
    return np.where(den > 0, num / safe, np.where(num > 0, 1.0, 0.0))


def tensor_weights(t: MotifTensor):
    """Per-entry cut weight (``val * perms / 3``) and per-node ``vol3`` degree."""
    if t.kind == "edge":
        raise TypeError("edge-kind tensors are scored through the edge columns")
    perms = t.multiplicity
    cut_w = t.val * perms // 3
    deg = np.zeros(t.n, dtype=np.int64)
    for col in range(3):
        # an index occurring r times is first in r * perms / 3 of the images
        np.add.at(deg, t.idx[:, col], cut_w)
    return cut_w, deg


def _scores(n, size, cut, vol, vol_c, cut3, vol3, vol3_c, inside, inside_c):
    small = np.minimum(size, n - size)
    s_small = np.where(size <= n - size, size, n - size)
    e_small = np.where(size <= n - size, inside, inside_c)
    pairs = s_small * (s_small - 1)
    return {
        "phi": _ratio(cut, np.minimum(vol, vol_c)),
        "ncut": _ratio(cut, vol) + _ratio(cut, vol_c),
        "rho": _ratio(cut, small),
        "phi3": _ratio(cut3, np.minimum(vol3, vol3_c)),
        "rho3": _ratio(cut3, small),
        "density": _ratio(e_small, pairs),
    }


@dataclass
class SweepProfile:
    method: str
    kind: str
    n: int
    columns: dict
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.columns["k"])

    @property
    def rows(self) -> list[dict]:
        return [{c: self.columns[c][i].item() for c in COLUMNS} for i in range(len(self))]

    def to_csv(self, stream: IO[str], labels=None, extra: dict | None = None) -> None:
        extra = extra or {}
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(list(COLUMNS) + list(extra))
        for i in range(len(self)):
            row = []
            for c in COLUMNS:
                v = self.columns[c][i]
                if c == "node" and labels is not None:
                    v = labels[v]
                row.append(int(v) if c in _INT_COLUMNS else repr(float(v)))
            w.writerow(row + list(extra.values()))

    def to_json(self, labels=None, extra: dict | None = None) -> str:
        rows = self.rows
        if labels is not None:
            for r in rows:
                r["node"] = int(labels[r["node"]])
        doc = {"method": self.method, "tensor_kind": self.kind, "n": self.n,
               "columns": list(COLUMNS), "rows": rows, **(extra or {})}
        return json.dumps(doc, indent=1)


@dataclass
class CutResult:
    best_set: list[int]
    best_score: float
    score_kind: str
    prefix_index: int


def sweep(g: DirectedGraph, t: MotifTensor, ordering, k_min: int = 1,
          method: str | None = None) -> SweepProfile:
    """Score every prefix ``S_k`` of ``ordering`` for ``k_min <= k <= n - k_min``.

    ``ordering`` is an :class:`OrderingVector` or an explicit node permutation.
    """
    n = g.n
    if hasattr(ordering, "order"):
        method = method or ordering.method
        order = ordering.order()
    else:
        order = np.asarray(ordering, dtype=np.int64)
    if sorted(order.tolist()) != list(range(n)):
        raise ValueError("ordering must be a permutation of the nodes")
    if k_min < 1:
        raise ValueError("k_min must be at least 1")
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)

    # an item with sorted positions p_min <= p_max is split by prefix k
    # iff p_min < k <= p_max; difference arrays give every k at once
    def straddle(lo, hi, w):
        d = np.zeros(n + 2, dtype=np.int64)
        np.add.at(d, lo + 1, w)
        np.add.at(d, hi + 1, -w)
        return np.cumsum(d)[: n + 1]

    def inside_by(hi):
        return np.cumsum(np.bincount(hi + 1, minlength=n + 1)[: n + 1])

    ps, pd = pos[g.src], pos[g.dst]
    lo, hi = np.minimum(ps, pd), np.maximum(ps, pd)
    ones = np.ones(g.m, dtype=np.int64)
    cut = straddle(lo, hi, ones)
    inside = inside_by(hi)
    # edges with both endpoints at positions >= k
    inside_c = g.m - np.concatenate([[0], np.cumsum(np.bincount(lo, minlength=n))])[: n + 1]
    deg = np.bincount(g.src, minlength=n) + np.bincount(g.dst, minlength=n)
    vol = np.concatenate([[0], np.cumsum(deg[order])])
    vol_c = 2 * g.m - vol

    if t.kind == "edge":
        cut3, vol3, vol3_c = cut, vol, vol_c
    else:
        cut_w, deg3 = tensor_weights(t)
        ep = pos[t.idx] if t.nnz else np.zeros((0, 3), dtype=np.int64)
        cut3 = straddle(ep.min(axis=1), ep.max(axis=1), cut_w) if t.nnz else np.zeros(n + 1, np.int64)
        vol3 = np.concatenate([[0], np.cumsum(deg3[order])])
        vol3_c = int(deg3.sum()) - vol3

    ks = np.arange(k_min, n - k_min + 1)
    sc = _scores(n, ks, cut[ks], vol[ks], vol_c[ks], cut3[ks], vol3[ks], vol3_c[ks],
                 inside[ks], inside_c[ks])
    cols = {
        "k": ks, "node": order[ks - 1] if ks.size else ks,
        "cut": cut[ks], "vol": vol[ks], "phi": sc["phi"], "ncut": sc["ncut"], "rho": sc["rho"],
        "cut3": cut3[ks], "vol3": vol3[ks], "phi3": sc["phi3"], "rho3": sc["rho3"],
        "density": sc["density"],
    }
    degenerate = ks[(np.minimum(vol3[ks], vol3_c[ks]) == 0)].tolist()
    return SweepProfile(method or "explicit", t.kind, n, cols,
                        {"order": order, "k_min": k_min, "degenerate_rows": degenerate})


def score_set(g: DirectedGraph, t: MotifTensor, S) -> dict:
    """All scores for one explicit node set ``S`` (nonempty, not all nodes)."""
    n = g.n
    S = np.unique(np.asarray(list(S), dtype=np.int64))
    if S.size == 0 or S.size >= n:
        raise ValueError("S must be a nonempty proper subset of the nodes")
    ins = np.zeros(n, dtype=bool)
    ins[S] = True
    a, b = ins[g.src], ins[g.dst]
    cut = int(np.count_nonzero(a != b))
    deg = np.bincount(g.src, minlength=n) + np.bincount(g.dst, minlength=n)
    vol = int(deg[ins].sum())
    inside, inside_c = int(np.count_nonzero(a & b)), int(np.count_nonzero(~a & ~b))
    if t.kind == "edge":
        cut3, vol3, vol3_c = cut, vol, 2 * g.m - vol
    else:
        cut_w, deg3 = tensor_weights(t)
        cnt = ins[t.idx].sum(axis=1) if t.nnz else np.zeros(0, dtype=np.int64)
        cut3 = int(cut_w[(cnt > 0) & (cnt < 3)].sum())
        vol3 = int(deg3[ins].sum())
        vol3_c = int(deg3.sum()) - vol3
    sc = _scores(n, S.size, cut, vol, 2 * g.m - vol, cut3, vol3, vol3_c, inside, inside_c)
    out = {"size": int(S.size), "cut": cut, "vol": vol, "cut3": cut3, "vol3": vol3}
    out.update({k: float(v) for k, v in sc.items()})
    return out


def best_cut(profile: SweepProfile, score_kind: str = "cond3") -> CutResult:
    """Lowest-scoring prefix; ties favour balance, then the smaller prefix."""
    if score_kind not in SCORES:
        raise ValueError(f"unknown score {score_kind!r}; expected one of {sorted(SCORES)}")
    if len(profile) == 0:
        raise ValueError("empty sweep profile")
    col = SCORES[score_kind]
    vals = np.asarray(profile.columns[col], dtype=float)
    ks = np.asarray(profile.columns["k"])
    best = vals.min()
    cand = np.flatnonzero(vals <= best + TIE_TOL)
    balance = np.minimum(ks[cand], profile.n - ks[cand])
    cand = cand[balance == balance.max()]
    i = int(cand[np.argmin(ks[cand])])
    k = int(ks[i])
    order = profile.meta["order"]
    return CutResult(sorted(order[:k].tolist()), float(vals[i]), score_kind, k)
