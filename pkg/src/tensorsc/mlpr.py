"""Multilinear PageRank via the shifted fixed-point iteration."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .motifs import TransitionTensor

logger = logging.getLogger(__name__)


class ConvergenceWarning(UserWarning):
    """An iterative solver hit its iteration cap before reaching tolerance."""


@dataclass(frozen=True)
class MlprConfig:
    alpha: float = 0.99
    gamma: float = 0.01
    v: np.ndarray | None = None  # teleport distribution; None means uniform
    tol: float = 1e-10
    max_iters: int = 10_000

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.v is not None:
            v = np.asarray(self.v, dtype=float)
            if np.any(v < 0) or not np.isclose(v.sum(), 1.0, rtol=0, atol=1e-12):
                raise ValueError("teleport vector v must be a distribution")

    def teleport(self, n: int) -> np.ndarray:
        if self.v is None:
            return np.full(n, 1.0 / n)
        v = np.asarray(self.v, dtype=float)
        if v.shape != (n,):
            raise ValueError(f"teleport vector has length {v.size}, expected {n}")
        return v


@dataclass
class MlprResult:
    x: np.ndarray
    residual_1norm: float
    iterations: int
    converged: bool
    metadata: dict = field(default_factory=dict)


def _fixed_point_map(tt, x, alpha, v):
    return alpha * tt.collapse_apply(x, x) + (1 - alpha) * v


def residual(tt: TransitionTensor, x, cfg: MlprConfig) -> float:
    """``|| alpha R(x kron x) + (1 - alpha) v - x ||_1``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (tt.n,):
        raise ValueError(f"x has shape {x.shape}, expected ({tt.n},)")
    v = cfg.teleport(tt.n)
    return float(np.abs(_fixed_point_map(tt, x, cfg.alpha, v) - x).sum())


STALL_WINDOW = 50


def solve_mlpr(tt: TransitionTensor, cfg: MlprConfig = MlprConfig(), callback=None) -> MlprResult:
    """Solve ``alpha R(x kron x) + (1 - alpha) v = x`` starting from ``x = v``.

    Each step is ``x <- (alpha P[x] x + (1 - alpha) v + gamma x) / (1 + gamma)``
    followed by renormalisation to unit sum. ``callback(x)`` is invoked on
    every iterate before renormalisation.

    The shift does not move the fixed point, only the dynamics. If the
    residual sets no new minimum for ``STALL_WINDOW`` steps (typically a
    period-two oscillation) the shift is doubled; ``metadata["gamma_final"]``
    records the value in use at exit.
    """
    v = cfg.teleport(tt.n)
    x = v.copy()
    gamma = cfg.gamma
    converged = False
    it = 0
    best, since_best = np.inf, 0
    while True:
        fx = _fixed_point_map(tt, x, cfg.alpha, v)
        res = np.abs(fx - x).sum()
        # ||x+ - x|| = ||F(x) - x|| / (1 + gamma), so this bounds the step too
        if res <= cfg.tol:
            converged = True
            break
        if it == cfg.max_iters:
            break
        if res < best:
            best, since_best = res, 0
        else:
            since_best += 1
            if since_best >= STALL_WINDOW:
                gamma = 2 * gamma if gamma > 0 else 0.01
                best, since_best = res, 0
                logger.debug("residual stalled at %.3e; shift raised to %g", res, gamma)
        it += 1
        xn = (fx + gamma * x) / (1.0 + gamma)
        if callback is not None:
            callback(xn)
        np.maximum(xn, 0.0, out=xn)
        x = xn / xn.sum()
    res = residual(tt, x, cfg)
    if not converged:
        warnings.warn(f"multilinear PageRank stopped after {it} iterations (residual {res:.3e})",
                      ConvergenceWarning, stacklevel=2)
    meta = {"alpha": cfg.alpha, "gamma": cfg.gamma, "gamma_final": gamma, "start": "v"}
    if cfg.alpha > 0.5:
        meta["uniqueness"] = "not guaranteed for alpha > 0.5; solution depends on the start vector"
    # iterations counts evaluations of the fixed-point map, including the final check
    return MlprResult(x, res, it + 1, converged, meta)
