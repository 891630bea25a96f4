"""Directed graph container, edge-list I/O, SCCs and motif-core filtering."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

logger = logging.getLogger(__name__)


class EdgeListParseError(ValueError):
    """Raised for a data line that is not two nonnegative integers."""

    def __init__(self, lineno: int, line: str):
        super().__init__(f"line {lineno}: expected two nonnegative integers, got {line!r}")
        self.lineno = lineno


class EmptyCoreError(ValueError):
    """Raised when motif filtering leaves no edges."""


def _frozen(a, dtype=np.int64):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _csr(n, rows, cols):
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    return _frozen(np.cumsum(indptr)), _frozen(cols)


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Immutable simple digraph on nodes ``0..n-1``.

    ``labels[i]`` is the original label of internal node ``i``. Edges are
    stored sorted by (source, target) with no self-loops or duplicates.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    labels: np.ndarray
    dropped: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_edges(cls, n, edges, labels=None, dropped=None) -> "DirectedGraph":
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        e = e[e[:, 0] != e[:, 1]]
        if e.size:
            keys = np.unique(e[:, 0] * max(n, 1) + e[:, 1])
            src, dst = keys // max(n, 1), keys % max(n, 1)
        else:
            src = dst = np.zeros(0, dtype=np.int64)
        if labels is None:
            labels = np.arange(n)
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (n,) or np.unique(labels).size != n:
            raise ValueError("labels must be n distinct values")
        return cls(n, _frozen(src), _frozen(dst), _frozen(labels), dict(dropped or {}))

    @property
    def m(self) -> int:
        return int(self.src.size)

    @property
    def edges(self) -> set[tuple[int, int]]:
        return set(zip(self.src.tolist(), self.dst.tolist()))

    @cached_property
    def _out(self):
        return _csr(self.n, self.src, self.dst)

    @cached_property
    def _in(self):
        return _csr(self.n, self.dst, self.src)

    def out_neighbors(self, u: int) -> np.ndarray:
        indptr, idx = self._out
        return idx[indptr[u]:indptr[u + 1]]

    def in_neighbors(self, u: int) -> np.ndarray:
        indptr, idx = self._in
        return idx[indptr[u]:indptr[u + 1]]

    @cached_property
    def edge_keys(self) -> np.ndarray:
        """Sorted ``src * n + dst`` keys, for vectorised edge lookup."""
        return _frozen(self.src * self.n + self.dst)

    def has_edges(self, u, v) -> np.ndarray:
        keys = np.asarray(u, dtype=np.int64) * self.n + np.asarray(v, dtype=np.int64)
        ek = self.edge_keys
        if ek.size == 0:
            return np.zeros(keys.shape, dtype=bool)
        pos = np.searchsorted(ek, keys)
        pos = np.minimum(pos, ek.size - 1)
        return ek[pos] == keys

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.has_edges(u, v))

    @cached_property
    def label_index(self) -> dict[int, int]:
        return {int(lab): i for i, lab in enumerate(self.labels)}

    def adjacency(self) -> sparse.csr_matrix:
        """Sparse 0/1 matrix with ``A[u, v] = 1`` for each edge u -> v."""
        data = np.ones(self.m)
        return sparse.csr_matrix((data, (self.src, self.dst)), shape=(self.n, self.n))

    def undirected(self) -> "UndirectedView":
        return UndirectedView.of(self)

    def subgraph(self, nodes, edge_mask=None) -> "DirectedGraph":
        """Induced subgraph on ``nodes`` (kept in increasing internal order).

        ``edge_mask`` optionally restricts which of this graph's edges survive.
        Labels carry over, so they keep pointing at the original file ids.
        """
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.size)
        keep = (remap[self.src] >= 0) & (remap[self.dst] >= 0)
        if edge_mask is not None:
            keep &= np.asarray(edge_mask, dtype=bool)
        e = np.column_stack([remap[self.src[keep]], remap[self.dst[keep]]])
        return DirectedGraph.from_edges(nodes.size, e, labels=self.labels[nodes])


@dataclass(frozen=True, eq=False)
class UndirectedView:
    """Direction-erased view; ``und_src < und_dst`` for every stored pair."""

    n: int
    und_src: np.ndarray
    und_dst: np.ndarray

    @classmethod
    def of(cls, g: DirectedGraph) -> "UndirectedView":
        lo = np.minimum(g.src, g.dst)
        hi = np.maximum(g.src, g.dst)
        if lo.size:
            keys = np.unique(lo * g.n + hi)
            lo, hi = keys // g.n, keys % g.n
        return cls(g.n, _frozen(lo), _frozen(hi))

    @property
    def und_edges(self) -> set[frozenset]:
        return {frozenset(p) for p in zip(self.und_src.tolist(), self.und_dst.tolist())}

    @cached_property
    def degree(self) -> np.ndarray:
        d = np.bincount(self.und_src, minlength=self.n) + np.bincount(self.und_dst, minlength=self.n)
        return _frozen(d)

    def adjacency(self) -> sparse.csr_matrix:
        rows = np.concatenate([self.und_src, self.und_dst])
        cols = np.concatenate([self.und_dst, self.und_src])
        return sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(self.n, self.n))


def load_edge_list(stream: IO[str] | Iterable[str]) -> DirectedGraph:
    """Parse a SNAP-style edge list.

    Lines starting with ``#`` and blank lines are skipped. Labels are remapped
    to ``0..n-1`` in first-seen order; self-loops and repeated edges are
    dropped and the counts recorded in ``graph.dropped``.
    """
    flat: list[int] = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != 2 or not (parts[0].isdigit() and parts[1].isdigit()):
            raise EdgeListParseError(lineno, line.rstrip("\n"))
        flat.append(int(parts[0]))
        flat.append(int(parts[1]))

    raw = np.asarray(flat, dtype=np.int64)
    uniq, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty(order.size, dtype=np.int64)
    rank[order] = np.arange(order.size)
    ids = rank[inverse].reshape(-1, 2)
    labels = uniq[order]
    n = labels.size

    loops = int(np.count_nonzero(ids[:, 0] == ids[:, 1])) if ids.size else 0
    proper = ids[ids[:, 0] != ids[:, 1]] if ids.size else ids
    distinct = np.unique(proper[:, 0] * max(n, 1) + proper[:, 1]).size if proper.size else 0
    dropped = {"self_loops": loops, "duplicates": int(len(proper) - distinct)}
    g = DirectedGraph.from_edges(n, proper, labels=labels, dropped=dropped)
    if loops or dropped["duplicates"]:
        logger.info("dropped %d self-loops and %d duplicate edges", loops, dropped["duplicates"])
    return g


def read_edge_list(path) -> DirectedGraph:
    with open(path) as fh:
        return load_edge_list(fh)


def write_edge_list(g: DirectedGraph, stream: IO[str], header: str | None = None) -> None:
    """Write edges as ``label label`` lines (original labels)."""
    if header:
        for line in header.splitlines():
            stream.write(f"# {line}\n")
    for u, v in zip(g.labels[g.src].tolist(), g.labels[g.dst].tolist()):
        stream.write(f"{u} {v}\n")


def write_label_map(g: DirectedGraph, stream: IO[str]) -> None:
    for i, lab in enumerate(g.labels.tolist()):
        stream.write(f"{i} {lab}\n")


def degrees(g: DirectedGraph) -> dict[str, np.ndarray]:
    """Out-, in- and undirected degree for every node."""
    return {
        "out": np.bincount(g.src, minlength=g.n),
        "in": np.bincount(g.dst, minlength=g.n),
        "undirected": np.asarray(g.undirected().degree),
    }


def strongly_connected_components(g: DirectedGraph) -> list[list[int]]:
    """SCCs as sorted node lists, ordered by their smallest member."""
    if g.n == 0:
        return []
    _, comp = connected_components(g.adjacency(), directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for node, c in enumerate(comp.tolist()):
        groups.setdefault(c, []).append(node)
    return sorted(groups.values(), key=lambda c: c[0])


def largest_scc(g: DirectedGraph) -> list[int]:
    """Largest SCC; ties go to the component holding the smallest index."""
    comps = strongly_connected_components(g)
    if not comps:
        return []
    # comps is sorted by smallest member, and max() keeps the first maximum
    return max(comps, key=len)


def is_strongly_connected(g: DirectedGraph) -> bool:
    return g.n > 0 and len(strongly_connected_components(g)) == 1


def motif_core_nodes(g: DirectedGraph, t) -> tuple[list[int], np.ndarray]:
    """Largest SCC of the motif-edge subgraph, plus the motif-edge mask."""
    mask = t.participating_edges(g)
    if not mask.any():
        raise EmptyCoreError(f"no edge participates in a {t.kind} motif")
    core = largest_scc(g.subgraph(np.arange(g.n), edge_mask=mask))
    if len(core) < 2:
        raise EmptyCoreError("motif subgraph has no nontrivial strongly connected component")
    return core, mask


def filter_to_motif_core(g: DirectedGraph, t) -> DirectedGraph:
    """Keep only edges used by some motif instance of ``t``, then the largest SCC.

    Filtering is applied once. The returned graph's labels are the original
    labels of ``g``.
    """
    core, mask = motif_core_nodes(g, t)
    return g.subgraph(np.arange(g.n), edge_mask=mask).subgraph(core)
