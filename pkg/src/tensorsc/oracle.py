"""Slow, dense reference implementations used to cross-check the fast paths.

Nothing here imports the production tensor, collapse or sweep code; each
function recomputes its answer from the raw edge set. All routines refuse
graphs larger than ``MAX_N`` nodes.
"""

from __future__ import annotations

import itertools

import numpy as np

from .graph import DirectedGraph

MAX_N = 50


class OracleSizeError(ValueError):
    pass


def _guard(n: int, max_n: int = MAX_N):
    if n > max_n:
        raise OracleSizeError(f"oracle limited to n <= {max_n}, got {n}")


def dense_adjacency(g: DirectedGraph) -> np.ndarray:
    A = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v in g.edges:
        A[u, v] = 1
    return A


def brute_scc(g: DirectedGraph) -> list[list[int]]:
    """Components of mutual reachability from a Warshall transitive closure."""
    _guard(g.n)
    R = dense_adjacency(g).astype(bool) | np.eye(g.n, dtype=bool)
    for w in range(g.n):
        R |= R[:, [w]] & R[[w], :]
    seen, comps = set(), []
    for i in range(g.n):
        if i in seen:
            continue
        comp = [j for j in range(g.n) if R[i, j] and R[j, i]]
        seen.update(comp)
        comps.append(comp)
    return comps


def brute_motif_dict(g: DirectedGraph, kind: str) -> dict[tuple[int, int, int], int]:
    """Canonical-triple counts by checking every ordered triple directly."""
    _guard(g.n)
    A = dense_adjacency(g).astype(bool)
    n = g.n
    out: dict[tuple[int, int, int], int] = {}
    if kind == "edge":
        raise ValueError("the edge tensor is not symmetric; use dense_edge_tensor")
    for i, j, k in itertools.product(range(n), repeat=3):
        if len({i, j, k}) == 3:
            if kind == "triangle":
                val = int((A[i, j] or A[j, i]) and (A[j, k] or A[k, j]) and (A[i, k] or A[k, i]))
            else:
                cyc = int(A[i, j] and A[j, k] and A[k, i])
                rev = int(A[j, i] and A[k, j] and A[i, k])
                if kind == "d3c-norecip":
                    val = int(cyc and not rev and not (A[j, i] or A[k, j] or A[i, k])) + \
                        int(rev and not (A[i, j] or A[j, k] or A[k, i]))
                elif kind in ("d3c", "layered"):
                    val = cyc + rev
                else:
                    raise ValueError(kind)
        elif kind == "layered" and len({i, j, k}) == 2:
            if k == j or k == i:
                a, b = (i, j)
            else:
                a, b = (i, k)
            val = int(A[a, b] and A[b, a])
        else:
            val = 0
        if val:
            key = tuple(sorted((i, j, k)))
            prev = out.setdefault(key, val)
            if prev != val:
                raise AssertionError(f"asymmetric value at {(i, j, k)}")
    return out


def brute_motifs(g: DirectedGraph, kind: str):
    """Oracle motif tensor, returned as a ``MotifTensor`` for direct comparison."""
    from .motifs import MotifTensor

    if kind == "edge":
        from .motifs import build_tensor
        return build_tensor(g, "edge")
    d = brute_motif_dict(g, kind)
    keys = sorted(d)
    idx = np.asarray(keys, dtype=np.int64).reshape(-1, 3)
    val = np.asarray([d[k] for k in keys], dtype=np.int64)
    return MotifTensor(g.n, kind, idx, val)


def dense_tensor(t) -> np.ndarray:
    """Full ``n x n x n`` array of a motif tensor, all permutations filled."""
    _guard(t.n)
    n = t.n
    T = np.zeros((n, n, n))
    if t.kind == "edge":
        for u, v in zip(t.edge_src.tolist(), t.edge_dst.tolist()):
            T[v, u, :] = 1.0
        return T
    for (i, j, k), val in t.entries.items():
        for p in itertools.permutations((i, j, k)):
            T[p] = val
    return T


def dense_collapse(tt, x) -> np.ndarray:
    """Materialise ``P[x] = sum_k x_k P(:, :, k)`` column by column."""
    n = tt.n
    _guard(n)
    T = dense_tensor(tt.base)
    x = np.asarray(x, dtype=float)
    M = np.zeros((n, n))
    for j in range(n):
        for k in range(n):
            col = T[:, j, k]
            s = col.sum()
            if s > 0:
                p = col / s
            elif tt.cross is not None and tt.groups[j] != tt.groups[k]:
                p = tt.cross
            else:
                p = tt.fills[tt.groups[j]]
            M[:, j] += x[k] * p
    return M


def dense_mlpr_residual(tt, x, alpha: float, v) -> float:
    P = dense_collapse(tt, x)
    x = np.asarray(x, dtype=float)
    return float(np.abs(alpha * P @ x + (1 - alpha) * np.asarray(v) - x).sum())


def linear_pagerank(P: np.ndarray, alpha: float, v, tol=1e-15, max_iters=1_000_000) -> np.ndarray:
    """Power iteration for ``x = alpha P x + (1 - alpha) v``."""
    v = np.asarray(v, dtype=float)
    x = v.copy()
    for _ in range(max_iters):
        nx = alpha * P @ x + (1 - alpha) * v
        if np.abs(nx - x).sum() <= tol:
            return nx
        x = nx
    return x


def brute_scores(g: DirectedGraph, t, S, T: np.ndarray | None = None) -> dict:
    """Scores of one set by direct summation over edges and ordered triples."""
    n = g.n
    _guard(n)
    S = set(int(s) for s in S)
    Sc = set(range(n)) - S
    if not S or not Sc:
        raise ValueError("S must be a nonempty proper subset")
    cut = sum(1 for u, v in g.edges if (u in S) != (v in S))
    vol = sum(1 for u, v in g.edges for w in (u, v) if w in S)
    vol_c = 2 * g.m - vol
    inside = sum(1 for u, v in g.edges if u in S and v in S)
    inside_c = sum(1 for u, v in g.edges if u in Sc and v in Sc)
    if t.kind == "edge":
        cut3, vol3, vol3_c = cut, vol, vol_c
    else:
        T = dense_tensor(t) if T is None else T
        s = sorted(S)
        c = sorted(Sc)
        total = T.sum()
        within = T[np.ix_(s, s, s)].sum() + T[np.ix_(c, c, c)].sum()
        cut3 = (total - within) / 3
        vol3 = T[s, :, :].sum()
        vol3_c = T[c, :, :].sum()

    def ratio(a, b):
        return a / b if b > 0 else (1.0 if a > 0 else 0.0)

    small = min(len(S), len(Sc))
    side, e_side = (len(S), inside) if len(S) <= len(Sc) else (len(Sc), inside_c)
    return {
        "size": len(S), "cut": cut, "vol": vol, "cut3": cut3, "vol3": vol3,
        "phi": ratio(cut, min(vol, vol_c)),
        "ncut": ratio(cut, vol) + ratio(cut, vol_c),
        "rho": ratio(cut, small),
        "phi3": ratio(cut3, min(vol3, vol3_c)),
        "rho3": ratio(cut3, small),
        "density": ratio(e_side, side * (side - 1)),
    }


def brute_sweep(g: DirectedGraph, t, order, k_min: int = 1) -> list[dict]:
    """Every prefix of ``order`` scored from scratch."""
    T = None if t.kind == "edge" else dense_tensor(t)
    order = list(order)
    return [dict(brute_scores(g, t, order[:k], T), k=k, node=order[k - 1])
            for k in range(k_min, g.n - k_min + 1)]


def dense_eigs(M: np.ndarray):
    """Eigenvalues and left eigenvectors of a small dense matrix.

    Returns ``(lam, W)`` sorted by decreasing real part, with ``W[:, i]``
    satisfying ``W[:, i] @ M = lam[i] * W[:, i]``.
    """
    M = np.asarray(M, dtype=float)
    _guard(M.shape[0])
    lam, W = np.linalg.eig(M.T)
    order = np.lexsort((-np.abs(lam.imag), -lam.real))
    return lam[order], W[:, order]
