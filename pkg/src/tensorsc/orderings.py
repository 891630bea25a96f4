"""Sweep orderings: TSC's second left eigenvector of ``P[x]`` and the baselines.

All spectral vectors come from power iteration on the half-shifted operator
``(I + P^T) / 2`` with the trivial left eigenvector ``e`` projected out after
every step. Because ``P^T e = e`` for a column-stochastic ``P``, the
projected iteration converges to ``w2 - mean(w2) e`` where ``w2`` is the
second left eigenvector; the constant shift leaves the sweep order intact.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from .graph import DirectedGraph, is_strongly_connected
from .mlpr import ConvergenceWarning
from .motifs import MotifTensor, TransitionTensor, build_tensor

logger = logging.getLogger(__name__)

EIG_TOL = 1e-12
EIG_MAX_ITERS = 5000
PI_TOL = 1e-12
PI_FLOOR = 1e-300


class NotStronglyConnectedError(ValueError):
    pass


@dataclass
class OrderingVector:
    scores: np.ndarray
    method: str
    eigen: dict = field(default_factory=dict)

    def order(self) -> np.ndarray:
        """Nodes sorted by ascending score (ties by node index)."""
        return np.argsort(self.scores, kind="stable")

    @property
    def converged(self) -> bool:
        return self.eigen.get("converged", True)


def _start_vector(n: int, seed: int = 0) -> np.ndarray:
    w = np.random.default_rng(seed).standard_normal(n)
    w -= w.mean()
    return w / np.linalg.norm(w)


def _fix_sign(z: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(z)))
    return -z if z[i] < 0 else z


def deflated_residual(left_apply, z: np.ndarray) -> tuple[float, float]:
    """Rayleigh estimate and residual ``||proj(P^T z) - lam z||_2``.

    ``proj`` removes the component along ``e``; for ``z`` orthogonal to ``e``
    this is the eigen-residual of ``P^T`` restricted to that complement.
    """
    pz = left_apply(z)
    lam = float(z @ pz) / float(z @ z)
    pz = pz - pz.mean()
    return lam, float(np.linalg.norm(pz - lam * z))


def second_left_eigenvector(left_apply, n: int, *, tol=EIG_TOL, max_iters=EIG_MAX_ITERS,
                            seed: int = 0, method: str = "") -> OrderingVector:
    """Second left eigenvector of a column-stochastic operator.

    ``left_apply(z)`` must return ``z^T P``.
    """
    if n == 1:
        return OrderingVector(np.ones(1), method, {"eigenvalue": 1.0, "residual": 0.0,
                                                   "iterations": 0, "converged": True})
    w = _start_vector(n, seed)
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        wn = 0.5 * (w + left_apply(w))
        wn -= wn.mean()
        norm = np.linalg.norm(wn)
        if norm == 0:
            # start vector annihilated; the deflated operator is nilpotent here
            converged = True
            wn = w
            break
        wn /= norm
        align = 1.0 - abs(float(wn @ w))
        w = wn
        if align <= tol:
            converged = True
            break
    meta = {"iterations": it, "converged": converged, "solver": "power"}
    if not converged:
        # the half-shift ranks eigenvalues by |1 + lam|, so a complex pair can
        # outrank a real lam2 with larger real part; ask Arnoldi for it directly
        w, meta = _arnoldi_second(left_apply, n, w, meta)
    z = _fix_sign(w)
    lam, res = deflated_residual(left_apply, z)
    meta.update(eigenvalue=lam, residual=res)
    if not meta["converged"]:
        meta["warning"] = "second eigenvalue is complex or the iteration stalled"
        warnings.warn(f"{method or 'power iteration'}: {meta['warning']}", ConvergenceWarning,
                      stacklevel=3)
    return OrderingVector(z, method, meta)


DENSE_FALLBACK_N = 64


def _arnoldi_second(left_apply, n, w0, meta):
    """Eigenvector of largest real part of ``proj P^T proj``, with ``proj`` removing ``e``."""

    def op(w):
        w = np.asarray(w, dtype=float).ravel()
        y = left_apply(w - w.mean())
        return y - y.mean()

    if n <= DENSE_FALLBACK_N:
        M = np.column_stack([op(col) for col in np.eye(n)])
        lam, V = np.linalg.eig(M)
    else:
        L = splinalg.LinearOperator((n, n), matvec=op, dtype=float)
        lam, V = splinalg.eigs(L, k=min(6, n - 2), which="LR", v0=w0, maxiter=10 * n)
    i = int(np.argmax(lam.real))
    v = V[:, i]
    if abs(lam[i].imag) > 1e-10:
        v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
    z = v.real - v.real.mean()
    z /= np.linalg.norm(z)
    meta = dict(meta, solver="arnoldi", eigenvalue_complex=complex(lam[i]),
                converged=bool(abs(lam[i].imag) <= 1e-10))
    return z, meta


# -- transition matrices of plain graphs -------------------------------------------------

class _Walk:
    """``P = A^T D^{-1}`` for a (possibly weighted) adjacency ``A``.

    Rows without out-weight are dangling and jump uniformly.
    """

    def __init__(self, A: sparse.spmatrix):
        self.A = sparse.csr_matrix(A, dtype=float)
        self.AT = self.A.T.tocsr()
        self.n = A.shape[0]
        self.d = np.asarray(self.A.sum(axis=1)).ravel()
        self.dangle = self.d == 0
        self.inv_d = np.where(self.dangle, 0.0, 1.0 / np.where(self.dangle, 1.0, self.d))

    def left(self, z):
        out = (self.A @ z) * self.inv_d
        if self.dangle.any():
            out[self.dangle] = z.mean()
        return out

    def right(self, y):
        out = self.AT @ (y * self.inv_d)
        if self.dangle.any():
            out += y[self.dangle].sum() / self.n
        return out

    def dense(self) -> np.ndarray:
        P = (self.A.toarray() * self.inv_d[:, None]).T
        P[:, self.dangle] = 1.0 / self.n
        return P


def transition_matrix(g: DirectedGraph, undirected: bool = False) -> np.ndarray:
    """Dense column-stochastic ``P = A^T D^{-1}`` (test-scale helper)."""
    A = g.undirected().adjacency() if undirected else g.adjacency()
    return _Walk(A).dense()


def stationary_distribution(g: DirectedGraph, tol=PI_TOL, max_iters=100_000) -> np.ndarray:
    """Stationary vector of the random walk on a strongly connected graph.

    Uses the lazy chain ``(I + P) / 2``: same fixed point, no periodicity.
    """
    walk = _Walk(g.adjacency())
    pi = np.full(g.n, 1.0 / g.n)
    for _ in range(max_iters):
        nxt = 0.5 * (pi + walk.right(pi))
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() <= tol:
            return nxt
        pi = nxt
    warnings.warn("stationary distribution did not reach tolerance", ConvergenceWarning, stacklevel=2)
    return pi


# -- orderings ---------------------------------------------------------------------------

def tsc_ordering(tt: TransitionTensor, x, **kw) -> OrderingVector:
    """Second left eigenvector of the collapsed matrix ``P[x]``."""
    x = np.asarray(x, dtype=float)
    return second_left_eigenvector(lambda z: tt.collapse_left(x, z), tt.n, method="tsc", **kw)


def ul_ordering(g: DirectedGraph, **kw) -> OrderingVector:
    """Undirected Laplacian: random walk on the direction-erased graph."""
    walk = _Walk(g.undirected().adjacency())
    return second_left_eigenvector(walk.left, g.n, method="ul", **kw)


def al_ordering(g: DirectedGraph, **kw) -> OrderingVector:
    """Asymmetric Laplacian: second left eigenvector of the directed walk."""
    walk = _Walk(g.adjacency())
    return second_left_eigenvector(walk.left, g.n, method="al", **kw)


def _require_strong(g: DirectedGraph, method: str):
    if not is_strongly_connected(g):
        raise NotStronglyConnectedError(
            f"{method} needs a strongly connected graph; filter to the largest SCC first"
        )


def dl_ordering(g: DirectedGraph, **kw) -> OrderingVector:
    """Directed Laplacian: second left eigenvector of ``(Pi P^T Pi^-1 + P) / 2``."""
    _require_strong(g, "dl")
    walk = _Walk(g.adjacency())
    pi = np.maximum(stationary_distribution(g), PI_FLOOR)

    def left(z):
        return 0.5 * (walk.right(pi * z) / pi + walk.left(z))

    ov = second_left_eigenvector(left, g.n, method="dl", **kw)
    ov.eigen["stationary"] = pi
    return ov


def co_ordering(g: DirectedGraph, *, tol=EIG_TOL, max_iters=EIG_MAX_ITERS, seed=0):
    """Co-clustering vectors ``D_row^-1/2 u2`` and ``D_col^-1/2 v2``.

    ``u2, v2`` form the second singular triplet of ``D_row^-1/2 A D_col^-1/2``,
    found by power iteration on the Gram operator deflated against the
    leading left vector ``sqrt(d_row)``.
    """
    A = g.adjacency()
    drow = np.asarray(A.sum(axis=1)).ravel()
    dcol = np.asarray(A.sum(axis=0)).ravel()
    if np.any(drow == 0) or np.any(dcol == 0):
        raise ValueError("co-clustering needs every node to have in- and out-edges")
    r, c = 1.0 / np.sqrt(drow), 1.0 / np.sqrt(dcol)
    N = sparse.diags(r) @ A @ sparse.diags(c)
    NT = N.T.tocsr()
    N = N.tocsr()
    u1 = np.sqrt(drow) / np.linalg.norm(np.sqrt(drow))

    def project(w):
        return w - (u1 @ w) * u1

    w = project(np.random.default_rng(seed).standard_normal(g.n))
    w /= np.linalg.norm(w)
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        wn = project(N @ (NT @ w))
        norm = np.linalg.norm(wn)
        if norm == 0:
            converged = True
            break
        wn /= norm
        align = 1.0 - abs(float(wn @ w))
        w = wn
        if align <= tol:
            converged = True
            break
    sigma = float(np.sqrt(max(w @ (N @ (NT @ w)), 0.0)))
    v = NT @ w
    v = v / np.linalg.norm(v) if np.linalg.norm(v) > 0 else v
    res = float(np.linalg.norm(N @ v - sigma * w)) if sigma > 0 else float(np.linalg.norm(N @ v))
    meta = {"singular_value": sigma, "residual": res, "iterations": it, "converged": converged}
    if not converged:
        warnings.warn("co: singular vector iteration stalled", ConvergenceWarning, stacklevel=2)
    out = []
    for name, vec in (("co-left", r * w), ("co-right", c * v)):
        nv = np.linalg.norm(vec)
        vec = _fix_sign(vec / nv) if nv > 0 else vec
        out.append(OrderingVector(vec, name, dict(meta)))
    return tuple(out)


def random_ordering(n: int, seed: int = 0) -> OrderingVector:
    perm = np.random.default_rng(seed).permutation(n)
    scores = np.empty(n)
    scores[perm] = np.arange(n, dtype=float)
    return OrderingVector(scores, "random", {"seed": seed})


# -- sink-augmented operator for two strongly connected components ------------------------

class SpanningMotifError(ValueError):
    pass


def lemma1_operator(g: DirectedGraph, v1, v2, t: MotifTensor | None = None) -> TransitionTensor:
    """Transition tensor on ``n + 1`` states (the last one a sink).

    Columns ``(j, k)`` with ``j`` and ``k`` in different components (the sink
    counting as its own) jump to the sink. Motif-free columns inside a
    component spread uniformly over that component.
    """
    v1 = np.asarray(sorted(v1), dtype=np.int64)
    v2 = np.asarray(sorted(v2), dtype=np.int64)
    n = g.n
    if v1.size + v2.size != n or np.union1d(v1, v2).size != n:
        raise ValueError("v1 and v2 must partition the nodes")
    t = build_tensor(g, "d3c") if t is None else t
    groups = np.full(n + 1, 2, dtype=np.int64)
    groups[v1], groups[v2] = 0, 1
    if t.nnz:
        g_ent = groups[t.idx]
        if np.any(g_ent.min(axis=1) != g_ent.max(axis=1)):
            raise SpanningMotifError("a motif spans both components")
    base = MotifTensor(n + 1, t.kind, t.idx, t.val)
    fills = np.zeros((3, n + 1))
    fills[0, v1] = 1.0 / v1.size
    fills[1, v2] = 1.0 / v2.size
    fills[2, n] = 1.0
    sink = np.zeros(n + 1)
    sink[n] = 1.0
    return TransitionTensor(base, groups=groups, fills=fills, cross=sink)


def lemma1_vector(n1: int, n2: int) -> np.ndarray:
    """``y1 - (n1 + 1) / (n2 + 1) y2`` with ``y1 = [e, 0, 1]``, ``y2 = [0, e, 1]``."""
    r = (n1 + 1) / (n2 + 1)
    return np.concatenate([np.ones(n1), -r * np.ones(n2), [1.0 - r]])
