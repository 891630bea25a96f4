import numpy as np
import pytest

from tensorsc import ConvergenceWarning, MlprConfig, build_tensor, normalize, residual, solve_mlpr
from tensorsc.motifs import MotifTensor
from tensorsc.oracle import dense_mlpr_residual, linear_pagerank
from tensorsc.orderings import transition_matrix

from conftest import random_digraph, strongly_connected_digraph


def test_fig1_fixed_point(fig1):
    tt = normalize(build_tensor(fig1, "d3c"))
    cfg = MlprConfig()
    res = solve_mlpr(tt, cfg)
    assert res.converged
    assert res.residual_1norm <= 1e-10
    assert dense_mlpr_residual(tt, res.x, cfg.alpha, cfg.teleport(6)) <= 1e-10
    assert abs(residual(tt, res.x, cfg) - res.residual_1norm) <= 1e-12
    assert "uniqueness" in res.metadata


def test_single_node():
    t = MotifTensor(1, "d3c", np.zeros((0, 3), dtype=np.int64), np.zeros(0, dtype=np.int64))
    res = solve_mlpr(normalize(t))
    assert res.x.tolist() == [1.0]
    assert res.iterations == 1


@pytest.mark.parametrize("alpha", [0.5, 0.85, 0.99])
@pytest.mark.parametrize("seed", range(3))
def test_edge_kind_is_linear_pagerank(alpha, seed):
    g = strongly_connected_digraph(np.random.default_rng(seed), 10, 0.2)
    cfg = MlprConfig(alpha=alpha, tol=1e-13)
    res = solve_mlpr(normalize(build_tensor(g, "edge")), cfg)
    ref = linear_pagerank(transition_matrix(g), alpha, cfg.teleport(10))
    assert np.abs(res.x - ref).sum() <= 1e-8


def test_residual_at_v_is_positive(fig1):
    tt = normalize(build_tensor(fig1, "d3c"))
    assert residual(tt, np.full(6, 1 / 6), MlprConfig()) > 0


def test_residual_dimension_check(fig1):
    tt = normalize(build_tensor(fig1, "d3c"))
    with pytest.raises(ValueError):
        residual(tt, np.full(5, 0.2), MlprConfig())


@pytest.mark.parametrize("kw", [{"alpha": 1.0}, {"alpha": 0.0}, {"gamma": -0.1},
                                {"max_iters": 0}, {"v": np.array([0.7, 0.7])}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        MlprConfig(**kw)


@pytest.mark.parametrize("kind", ["triangle", "d3c", "layered"])
@pytest.mark.parametrize("seed", range(4))
def test_iterates_stay_stochastic(kind, seed):
    g = random_digraph(np.random.default_rng(seed), 15, 0.3)
    tt = normalize(build_tensor(g, kind))
    seen = []

    def check(x):
        seen.append((x.min(), x.sum()))

    cfg = MlprConfig()
    res = solve_mlpr(tt, cfg, callback=check)
    assert res.converged and res.residual_1norm <= 1e-10
    assert dense_mlpr_residual(tt, res.x, cfg.alpha, cfg.teleport(15)) <= 1e-10
    assert all(lo >= 0 and abs(s - 1) <= 1e-12 for lo, s in seen)
    assert res.x.min() >= 0 and abs(res.x.sum() - 1) <= 1e-12


def test_tighter_tolerance_never_worse(fig2):
    tt = normalize(build_tensor(fig2, "layered"))
    prev = np.inf
    for tol in (1e-4, 1e-7, 1e-10, 1e-13):
        r = solve_mlpr(tt, MlprConfig(tol=tol)).residual_1norm
        assert r <= prev
        prev = r


def test_non_convergence_is_flagged(fig3):
    tt = normalize(build_tensor(fig3, "d3c-norecip"))
    with pytest.warns(ConvergenceWarning):
        res = solve_mlpr(tt, MlprConfig(max_iters=2))
    assert not res.converged
    assert res.iterations == 3
    assert abs(res.x.sum() - 1) <= 1e-12


def test_custom_teleport(fig1):
    v = np.array([0.5, 0.1, 0.1, 0.1, 0.1, 0.1])
    cfg = MlprConfig(v=v)
    tt = normalize(build_tensor(fig1, "d3c"))
    res = solve_mlpr(tt, cfg)
    assert dense_mlpr_residual(tt, res.x, cfg.alpha, v) <= 1e-10
