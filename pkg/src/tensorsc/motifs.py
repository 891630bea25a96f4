"""Triangle-based motif tensors and their transition tensors.

A :class:`MotifTensor` stores only canonical triples ``i <= j <= k``; every
permutation of a stored triple carries the same value. The transition tensor
expands those into ordered entries once, after which the collapsed matrix
``P[x]`` is applied in O(nnz + n) without materialising it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterator

import numpy as np

from .graph import DirectedGraph

KINDS = ("edge", "triangle", "d3c", "d3c-norecip", "layered")

# bit layout of the directed-edge mask for a triangle a < b < c
AB, BA, AC, CA, BC, CB = 1, 2, 4, 8, 16, 32

_WEDGE_CHUNK = 4_000_000


def _ro(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


def enumerate_triangles(g: DirectedGraph) -> tuple[np.ndarray, np.ndarray]:
    """All triangles of the undirected view with their directed edge masks.

    Returns ``(tri, mask)`` where each row of ``tri`` is a sorted triple
    ``a < b < c`` and ``mask`` holds the bits ``AB | BA | AC | CA | BC | CB``
    of the directed edges present. Each triangle appears exactly once.
    """
    n = g.n
    und = g.undirected()
    empty = (np.zeros((0, 3), dtype=np.int64), np.zeros(0, dtype=np.int64))
    if und.und_src.size == 0:
        return empty

    # orient every undirected edge from lower to higher (degree, index) rank
    rank = np.empty(n, dtype=np.int64)
    rank[np.lexsort((np.arange(n), und.degree))] = np.arange(n)
    a, b = und.und_src, und.und_dst
    flip = rank[a] > rank[b]
    lo = np.where(flip, b, a)
    hi = np.where(flip, a, b)
    order = np.lexsort((hi, lo))
    lo, hi = lo[order], hi[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, lo + 1, 1)
    indptr = np.cumsum(indptr)
    keys = lo * n + hi

    counts = indptr[hi + 1] - indptr[hi]
    bounds = [0]
    acc = 0
    for i, c in enumerate(counts.tolist()):
        acc += c
        if acc >= _WEDGE_CHUNK:
            bounds.append(i + 1)
            acc = 0
    if bounds[-1] != lo.size:
        bounds.append(lo.size)

    found = []
    for s, e in zip(bounds[:-1], bounds[1:]):
        cnt = counts[s:e]
        tot = int(cnt.sum())
        if tot == 0:
            continue
        x = np.repeat(lo[s:e], cnt)
        y = np.repeat(hi[s:e], cnt)
        offs = np.arange(tot) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        w = hi[np.repeat(indptr[hi[s:e]], cnt) + offs]
        q = x * n + w
        pos = np.minimum(np.searchsorted(keys, q), keys.size - 1)
        hit = keys[pos] == q
        found.append(np.column_stack([x[hit], y[hit], w[hit]]))
    if not found:
        return empty
    tri = np.sort(np.concatenate(found), axis=1)
    tri = tri[np.lexsort((tri[:, 2], tri[:, 1], tri[:, 0]))]
    ta, tb, tc = tri[:, 0], tri[:, 1], tri[:, 2]
    mask = (
        AB * g.has_edges(ta, tb) | BA * g.has_edges(tb, ta)
        | AC * g.has_edges(ta, tc) | CA * g.has_edges(tc, ta)
        | BC * g.has_edges(tb, tc) | CB * g.has_edges(tc, tb)
    ).astype(np.int64)
    return tri, mask


def _has(mask, bits):
    return (mask & bits) == bits


def _cycles(mask):
    """Indicator arrays for a->b->c->a and a->c->b->a."""
    return _has(mask, AB | BC | CA), _has(mask, AC | CB | BA)


@dataclass(frozen=True, eq=False)
class MotifTensor:
    """Sparse symmetric order-3 tensor of motif counts.

    ``idx`` rows are canonical (nondecreasing) triples and ``val`` their
    counts. For ``kind == "edge"`` the tensor is the degenerate one whose
    collapse is the graph's transition matrix; it has no canonical entries
    and instead carries the directed edge arrays.
    """

    n: int
    kind: str
    idx: np.ndarray
    val: np.ndarray
    edge_src: np.ndarray | None = field(default=None, repr=False)
    edge_dst: np.ndarray | None = field(default=None, repr=False)

    @property
    def nnz(self) -> int:
        return int(self.val.size)

    @property
    def total(self) -> int:
        """Sum of canonical counts (number of motif instances)."""
        if self.kind == "edge":
            return int(self.edge_src.size)
        return int(self.val.sum())

    @cached_property
    def entries(self) -> dict[tuple[int, int, int], int]:
        return {tuple(r): int(v) for r, v in zip(self.idx.tolist(), self.val.tolist())}

    def value(self, i: int, j: int, k: int) -> float:
        if self.kind == "edge":
            # T(i, j, k) = A[j, i]: column j of every slice is node j's out-row
            return float(_edge_lookup(self, j, i))
        return self.entries.get(tuple(sorted((i, j, k))), 0)

    @cached_property
    def multiplicity(self) -> np.ndarray:
        """Number of distinct index permutations of each canonical entry."""
        i, j, k = self.idx.T
        distinct = (i != j).astype(int) + (j != k) + (i != k)
        return _ro(np.select([distinct == 3, distinct == 0], [6, 1], 3), np.int64)

    def participating_edges(self, g: DirectedGraph) -> np.ndarray:
        """Boolean mask over ``g``'s edges used by at least one motif instance."""
        if self.kind == "edge":
            return np.ones(g.m, dtype=bool)
        keys = []
        i, j, k = self.idx.T
        dist = (i != j) & (j != k)
        a, b, c = i[dist], j[dist], k[dist]
        if self.kind == "triangle":
            for u, v in ((a, b), (b, a), (a, c), (c, a), (b, c), (c, b)):
                h = g.has_edges(u, v)
                keys.append(u[h] * g.n + v[h])
        else:
            fwd = g.has_edges(a, b) & g.has_edges(b, c) & g.has_edges(c, a)
            bwd = g.has_edges(a, c) & g.has_edges(c, b) & g.has_edges(b, a)
            for cyc, path in ((fwd, ((a, b), (b, c), (c, a))), (bwd, ((a, c), (c, b), (b, a)))):
                for u, v in path:
                    keys.append(u[cyc] * g.n + v[cyc])
        if self.kind == "layered":
            rep = ~dist
            p, q = i[rep], k[rep]
            keys += [p * g.n + q, q * g.n + p]
        if not keys:
            return np.zeros(g.m, dtype=bool)
        return np.isin(g.edge_keys, np.concatenate(keys))

    def restrict(self, nodes) -> "MotifTensor":
        """Entries whose indices all lie in ``nodes``, reindexed to ``0..len-1``."""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size)
        if self.kind == "edge":
            keep = (remap[self.edge_src] >= 0) & (remap[self.edge_dst] >= 0)
            return MotifTensor(
                nodes.size, "edge", _empty_idx(), _empty_val(),
                _ro(remap[self.edge_src[keep]], np.int64), _ro(remap[self.edge_dst[keep]], np.int64),
            )
        ri = remap[self.idx] if self.nnz else self.idx
        keep = (ri >= 0).all(axis=1) if self.nnz else np.zeros(0, dtype=bool)
        return MotifTensor(nodes.size, self.kind, _ro(ri[keep].reshape(-1, 3), np.int64),
                           _ro(self.val[keep], np.int64))

    def dump(self, stream: IO[str]) -> None:
        """Write ``i j k value`` lines in canonical order."""
        for (i, j, k), v in zip(self.idx.tolist(), self.val.tolist()):
            stream.write(f"{i} {j} {k} {v}\n")


def _empty_idx():
    return _ro(np.zeros((0, 3)), np.int64)


def _empty_val():
    return _ro(np.zeros(0), np.int64)


def _edge_lookup(t: MotifTensor, u: int, v: int) -> bool:
    hit = (t.edge_src == u) & (t.edge_dst == v)
    return bool(hit.any())


def reciprocated_pairs(g: DirectedGraph) -> np.ndarray:
    """Pairs ``(a, b)``, ``a < b``, with both a->b and b->a present."""
    fwd = g.src < g.dst
    a, b = g.src[fwd], g.dst[fwd]
    both = g.has_edges(b, a)
    return np.column_stack([a[both], b[both]])


def build_tensor(g: DirectedGraph, kind: str) -> MotifTensor:
    """Motif tensor of ``kind`` for graph ``g``.

    * ``triangle``: 1 on every undirected triangle.
    * ``d3c``: number of directed 3-cycles on the triple (0, 1 or 2).
    * ``d3c-norecip``: 1 for a directed 3-cycle with none of its three
      reverse edges present.
    * ``layered``: ``d3c`` values plus 1 on ``(a, a, b)`` and ``(a, b, b)``
      for every reciprocated pair ``a <-> b``.
    * ``edge``: degenerate tensor collapsing to the transition matrix.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown tensor kind {kind!r}; expected one of {KINDS}")
    if kind == "edge":
        return MotifTensor(g.n, "edge", _empty_idx(), _empty_val(),
                           _ro(g.src, np.int64), _ro(g.dst, np.int64))

    tri, mask = enumerate_triangles(g)
    if kind == "triangle":
        val = np.ones(len(tri), dtype=np.int64)
    else:
        fwd, bwd = _cycles(mask)
        if kind == "d3c-norecip":
            recip = (mask & (AB | BA)) == (AB | BA)
            recip |= (mask & (AC | CA)) == (AC | CA)
            recip |= (mask & (BC | CB)) == (BC | CB)
            val = ((fwd | bwd) & ~recip).astype(np.int64)
        else:
            val = fwd.astype(np.int64) + bwd
    keep = val > 0
    idx, val = tri[keep], val[keep]

    if kind == "layered":
        pairs = reciprocated_pairs(g)
        a, b = pairs[:, 0], pairs[:, 1]
        extra = np.concatenate([np.column_stack([a, a, b]), np.column_stack([a, b, b])])
        idx = np.concatenate([idx, extra])
        val = np.concatenate([val, np.ones(len(extra), dtype=np.int64)])
        order = np.lexsort((idx[:, 2], idx[:, 1], idx[:, 0]))
        idx, val = idx[order], val[order]

    return MotifTensor(g.n, kind, _ro(idx.reshape(-1, 3), np.int64), _ro(val, np.int64))


def iter_entries(t: MotifTensor) -> Iterator[tuple[int, int, int, int]]:
    for (i, j, k), v in zip(t.idx.tolist(), t.val.tolist()):
        yield i, j, k, v


def _ordered_images(t: MotifTensor):
    """Every distinct ordered permutation of every canonical entry."""
    if t.nnz == 0:
        z = np.zeros(0, dtype=np.int64)
        return z, z, z, z.astype(float)
    i, j, k = t.idx.T
    eid = np.arange(t.nnz)
    perms = [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)]
    P = np.concatenate([np.column_stack([eid, *p]) for p in perms])
    P = np.unique(P, axis=0)
    return P[:, 1], P[:, 2], P[:, 3], t.val[P[:, 0]].astype(float)


class TransitionTensor:
    """Column-normalised motif tensor with an implicit dangling fill.

    ``P(i, j, k) = T(i, j, k) / sum_i T(i, j, k)`` on columns with positive
    mass. Columns without mass are never enumerated: they resolve to
    ``fills[group[j]]`` when ``j`` and ``k`` share a group, and to ``cross``
    otherwise. The ordinary case is a single group whose fill is ``u``.
    """

    def __init__(self, base: MotifTensor, u=None, *, groups=None, fills=None, cross=None):
        n = base.n
        self.base = base
        self.n = n
        if groups is None:
            u = np.full(n, 1.0 / n) if u is None else np.asarray(u, dtype=float)
            _check_distribution(u, n, "dangling distribution u")
            groups = np.zeros(n, dtype=np.int64)
            fills = u[None, :]
        self.u = fills[0] if fills.shape[0] == 1 else None
        self.groups = _ro(groups, np.int64)
        self.fills = np.asarray(fills, dtype=float)
        self.cross = None if cross is None else np.asarray(cross, dtype=float)
        self.static = base.kind == "edge"

        if self.static:
            outdeg = np.bincount(base.edge_src, minlength=n)
            self.I = base.edge_dst
            self.J = base.edge_src
            self.K = None
            self.W = 1.0 / outdeg[base.edge_src]
            self._nodangle = outdeg > 0
            self.pair_j = self.pair_k = np.zeros(0, dtype=np.int64)
            self.pair_sum = np.zeros(0)
        else:
            I, J, K, V = _ordered_images(base)
            ck = J * n + K
            uk, inv = np.unique(ck, return_inverse=True)
            sums = np.bincount(inv, weights=V, minlength=uk.size)
            self.I, self.J, self.K = I, J, K
            self.W = V / sums[inv] if V.size else V
            self.pair_j, self.pair_k = uk // max(n, 1), uk % max(n, 1)
            self.pair_sum = sums

    @property
    def column_sums(self) -> dict[tuple[int, int], float]:
        if self.static:
            raise TypeError("edge-kind tensors have no finite column list")
        return {(int(j), int(k)): float(s) for j, k, s in zip(self.pair_j, self.pair_k, self.pair_sum)}

    def _check(self, v, name):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"{name} has shape {v.shape}, expected ({self.n},)")
        return v

    def _dangling(self, x):
        """Per column j of ``P[x]``: mass sent to its group fill and to ``cross``."""
        if self.static:
            return np.where(self._nodangle, 0.0, x.sum()), np.zeros(self.n)
        xg = np.bincount(self.groups, weights=x, minlength=self.fills.shape[0])
        covered = np.bincount(self.pair_j, weights=x[self.pair_k], minlength=self.n)
        same = xg[self.groups] - covered
        cross = x.sum() - xg[self.groups] if self.cross is not None else np.zeros(self.n)
        return same, cross

    def collapse_apply(self, x, y) -> np.ndarray:
        """``P[x] @ y``."""
        x, y = self._check(x, "x"), self._check(y, "y")
        w = self.W if self.static else self.W * x[self.K]
        out = np.bincount(self.I, weights=w * y[self.J], minlength=self.n).astype(float)
        same, cross = self._dangling(x)
        out += self.fills.T @ np.bincount(self.groups, weights=same * y, minlength=self.fills.shape[0])
        if self.cross is not None:
            out += self.cross * float(cross @ y)
        return out

    def collapse_left(self, x, z) -> np.ndarray:
        """``z^T P[x]`` as a vector."""
        x, z = self._check(x, "x"), self._check(z, "z")
        w = self.W if self.static else self.W * x[self.K]
        out = np.bincount(self.J, weights=w * z[self.I], minlength=self.n).astype(float)
        same, cross = self._dangling(x)
        out += same * (self.fills @ z)[self.groups]
        if self.cross is not None:
            out += cross * float(self.cross @ z)
        return out

    def column(self, j: int, k: int) -> np.ndarray:
        """Dense column ``P(:, j, k)``."""
        if self.static:
            col = np.zeros(self.n)
            sel = self.J == j
            if sel.any():
                col[self.I[sel]] = self.W[sel]
                return col
            return self.fills[0].copy()
        sel = (self.J == j) & (self.K == k)
        if sel.any():
            col = np.zeros(self.n)
            np.add.at(col, self.I[sel], self.W[sel])
            return col
        if self.cross is not None and self.groups[j] != self.groups[k]:
            return self.cross.copy()
        return self.fills[self.groups[j]].copy()


def _check_distribution(v, n, name):
    if v.shape != (n,) or np.any(v < 0) or not np.isclose(v.sum(), 1.0, rtol=0, atol=1e-12):
        raise ValueError(f"{name} must be a nonnegative length-{n} vector summing to 1")


def normalize(t: MotifTensor, u=None) -> TransitionTensor:
    """Transition tensor of ``t`` with dangling distribution ``u`` (uniform by default)."""
    return TransitionTensor(t, u)


def collapse_matvec(tt: TransitionTensor, x, z) -> np.ndarray:
    """``z^T P[x]`` where ``P[x] = sum_k x_k R_k``."""
    return tt.collapse_left(x, z)
