"""Acceptance criteria, each reported as one PASS/FAIL line.

The lines are collected by ``ACCEPTANCE`` and echoed in the pytest terminal
summary (see ``conftest.py``), so they appear in a plain ``pytest -v`` log.
"""

import os
import time
import warnings
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import spearmanr

from tensorsc import (
    DirectedGraph,
    MlprConfig,
    TSCConfig,
    al_ordering,
    bisect,
    build_tensor,
    cluster,
    filter_to_motif_core,
    load_fixture,
    normalize,
    read_edge_list,
    score_set,
    solve_mlpr,
    sweep,
    tsc_ordering,
)
from tensorsc.graph import is_strongly_connected
from tensorsc.motifs import KINDS
from tensorsc.oracle import (
    brute_motif_dict,
    brute_sweep,
    dense_collapse,
    dense_eigs,
    dense_mlpr_residual,
    linear_pagerank,
)
from tensorsc.orderings import dl_ordering, lemma1_operator, lemma1_vector, transition_matrix

ACCEPTANCE: list[str] = []


def report(criterion, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def labelled(g, nodes):
    return sorted(int(g.labels[i]) for i in nodes)


def smaller_side(b):
    return b.S if len(b.S) <= len(b.S_bar) else b.S_bar


# a shared randomized suite: 200 digraphs, n <= 25, p in {0.1, 0.3, 0.5}
_rng = np.random.default_rng(20160501)
SUITE = []
for _i in range(200):
    _n = int(_rng.integers(3, 26))
    _p = (0.1, 0.3, 0.5)[_i % 3]
    _A = _rng.random((_n, _n)) < _p
    np.fill_diagonal(_A, False)
    SUITE.append(DirectedGraph.from_edges(_n, np.argwhere(_A)))


# Criterion 1

def test_c1_fig1_tsc():
    g = load_fixture("fig1")
    t0 = time.perf_counter()
    b = bisect(g, "d3c")
    elapsed = time.perf_counter() - t0
    sides = {tuple(labelled(g, b.S)), tuple(labelled(g, b.S_bar))}
    s = score_set(g, build_tensor(g, "d3c"), b.S)
    ok = sides == {(0, 1, 2), (3, 4, 5)} and s["cut3"] == 0 and s["phi3"] == 0 and elapsed < 1
    report("1a Fig.1 TSC bisection {0,1,2}/{3,4,5}, cut3=0, phi3=0, <1s", ok,
           f"sides={sorted(sides)} cut3={s['cut3']} phi3={s['phi3']} t={elapsed:.3f}s")


def test_c1_fig1_dl():
    g = load_fixture("fig1")
    t0 = time.perf_counter()
    order = dl_ordering(g).order()
    elapsed = time.perf_counter() - t0
    S = order[:3]
    s = score_set(g, build_tensor(g, "d3c"), S)
    sides = {tuple(labelled(g, S)), tuple(labelled(g, order[3:]))}
    ok = sides == {(1, 2, 5), (0, 3, 4)} and s["cut3"] > 0 and elapsed < 1
    report("1b Fig.1 DL 3-prefix {1,2,5}/{0,3,4} with cut3>0", ok,
           f"sides={sorted(sides)} cut3={s['cut3']} t={elapsed:.3f}s")


# Criterion 2

FIG2_TSC = [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]]
FIG2_DL = [[0, 4, 5, 8, 9], [1, 2, 3, 6, 7, 10], [11]]
FIG2_SUBDL = [[0, 1, 2, 3, 4, 5, 6, 7], [8, 10, 11], [9]]
BASELINE_CFG = TSCConfig(score="cond")


def _fig2(method, cfg=TSCConfig()):
    g = load_fixture("fig2")
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p = cluster(g, "layered", cfg, C=3, method=method)
    return sorted(p.labelled(g)), time.perf_counter() - t0


def test_c2_fig2_tsc():
    got, elapsed = _fig2("tsc")
    report("2a Fig.2 TSC layered C=3 recovers the three layers, <1s",
           got == FIG2_TSC and elapsed < 1, f"got={got} t={elapsed:.3f}s")


def test_c2_fig2_dl():
    got, elapsed = _fig2("dl", BASELINE_CFG)
    report("2b Fig.2 DL matches the listed communities", got == FIG2_DL and elapsed < 1,
           f"got={got} expected={FIG2_DL}")


def test_c2_fig2_subdl():
    got, elapsed = _fig2("sub-dl", BASELINE_CFG)
    report("2c Fig.2 Sub-DL matches the listed communities", got == FIG2_SUBDL and elapsed < 1,
           f"got={got} expected={FIG2_SUBDL}")


# Criterion 3

FIG3_TSC = [0, 1, 2, 3, 4, 5, 12, 13, 16]


def _fig3(method, cfg=TSCConfig()):
    g = load_fixture("fig3")
    t0 = time.perf_counter()
    b = bisect(g, "d3c-norecip", cfg, method=method)
    return labelled(g, smaller_side(b)), time.perf_counter() - t0


def test_c3_fig3_tsc_exact():
    got, elapsed = _fig3("tsc")
    report("3a Fig.3 TSC smaller side equals {0-5,12,13,16}, <1s",
           got == FIG3_TSC and elapsed < 1, f"got={got} t={elapsed:.3f}s")


def test_c3_fig3_tsc_contains_anomaly():
    got, elapsed = _fig3("tsc")
    report("3b Fig.3 TSC smaller side contains all of 0-5", set(range(6)) <= set(got),
           f"got={got}")


def test_c3_fig3_subdl():
    got, elapsed = _fig3("sub-dl", BASELINE_CFG)
    planted = sorted(set(got) & set(range(6)))
    report("3c Fig.3 Sub-DL smaller side holds 0,1,4,5 but misses 2 and 3",
           planted == [0, 1, 4, 5] and elapsed < 1, f"got={got}")


# Criterion 4

TABLE1 = {
    "email-EuAll": (11_315, 80_211, 183_836),
    "soc-Epinions1": (15_963, 262_779, 738_231),
    "wiki-Talk": (52_411, 957_753, 5_138_613),
    "twitter_combined": (57_959, 1_371_621, 6_921_399),
}


def _snap_file(name):
    base = os.environ.get("TENSORSC_DATA_DIR")
    if not base:
        return None
    for suffix in (".txt", ""):
        p = Path(base) / f"{name}{suffix}"
        if p.exists():
            return p
    return None


@pytest.mark.parametrize("name", list(TABLE1))
def test_c4_table1(name):
    path = _snap_file(name)
    if path is None:
        ACCEPTANCE.append(f"SKIP 4 Table 1 {name}: file not found under $TENSORSC_DATA_DIR")
        pytest.skip(f"{name} not downloaded")
    t0 = time.perf_counter()
    g = read_edge_list(path)
    core = filter_to_motif_core(g, build_tensor(g, "d3c"))
    stats = (core.n, core.m, build_tensor(core, "d3c").total)
    elapsed = time.perf_counter() - t0
    report(f"4 Table 1 {name} statistics, <10min", stats == TABLE1[name] and elapsed < 600,
           f"got={stats} expected={TABLE1[name]} t={elapsed:.1f}s")


# Criterion 5

def _two_scc_instance(rng):
    """Two strongly connected Erdos-Renyi sides joined by edges from side 1 to side 2."""
    n1, n2 = (int(v) for v in rng.integers(4, 13, size=2))
    n = n1 + n2

    def side(size):
        while True:
            A = rng.random((size, size)) < 0.5
            np.fill_diagonal(A, False)
            h = DirectedGraph.from_edges(size, np.argwhere(A))
            if is_strongly_connected(h):
                return np.argwhere(A)

    edges = [side(n1), side(n2) + n1]
    cross = np.argwhere(rng.random((n1, n2)) < 0.2)
    cross[:, 1] += n1
    if cross.size == 0:
        cross = np.array([[0, n1]])
    edges.append(cross)
    g = DirectedGraph.from_edges(n, np.concatenate(edges))
    return g, np.arange(n1), np.arange(n1, n)


LEMMA_CASES = [_two_scc_instance(np.random.default_rng(1000 + i)) for i in range(100)]


def test_c5_lemma1_sign_separation():
    good = 0
    for g, v1, v2 in LEMMA_CASES:
        tt = lemma1_operator(g, v1, v2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            z = tsc_ordering(tt, solve_mlpr(tt).x).scores
        s1, s2 = np.sign(z[v1]), np.sign(z[v2])
        good += bool(np.all(s1 == s1[0]) and np.all(s2 == -s1[0]) and s1[0] != 0)
    report("5a Lemma 1 sign separation on 100 two-SCC instances", good == 100, f"{good}/100")


def test_c5_lemma1_analytic_vector():
    worst = 0.0
    for i, (g, v1, v2) in enumerate(LEMMA_CASES):
        tt = lemma1_operator(g, v1, v2)
        z = lemma1_vector(v1.size, v2.size)
        rng = np.random.default_rng(i)
        for _ in range(10):
            x = rng.dirichlet(np.ones(g.n + 1))
            worst = max(worst, float(np.abs(tt.collapse_left(x, z) - z).max()))
    report("5b analytic eigenvector residual ||z^T P[x] - z^T||_inf <= 1e-10", worst <= 1e-10,
           f"worst residual {worst:.3e}")


# Criterion 6

def test_c6_oracle_equivalence():
    rng = np.random.default_rng(6)
    bad = []
    for gi, g in enumerate(SUITE):
        for kind in KINDS:
            t = build_tensor(g, kind)
            if kind != "edge" and t.entries != brute_motif_dict(g, kind):
                bad.append((gi, kind, "tensor"))
            if t.total:
                tt = normalize(t)
                x = rng.dirichlet(np.ones(g.n))
                P = dense_collapse(tt, x)
                y = rng.standard_normal(g.n)
                if (np.abs(tt.collapse_apply(x, y) - P @ y).max() > 1e-10
                        or np.abs(tt.collapse_left(x, y) - y @ P).max() > 1e-10):
                    bad.append((gi, kind, "collapse"))
            order = rng.permutation(g.n)
            for a, b in zip(sweep(g, t, order).rows, brute_sweep(g, t, order)):
                if any(a[c] != b[c] for c in ("k", "node", "cut", "vol", "cut3", "vol3")) or any(
                        abs(a[c] - b[c]) > 1e-10 for c in ("phi", "ncut", "rho", "phi3", "rho3", "density")):
                    bad.append((gi, kind, f"sweep k={a['k']}"))
                    break
    report("6 oracle equivalence on 200 random digraphs (tensors, P[x], sweep rows)", not bad,
           f"{len(bad)} mismatches {bad[:3]}")


# Criterion 7

def test_c7_edge_kind_generalizes_al():
    rng = np.random.default_rng(7)
    rhos = []
    while len(rhos) < 20:
        n = int(rng.integers(6, 16))
        A = rng.random((n, n)) < 0.3
        perm = rng.permutation(n)
        A[perm, np.roll(perm, -1)] = True
        np.fill_diagonal(A, False)
        g = DirectedGraph.from_edges(n, np.argwhere(A))
        lam, _ = dense_eigs(transition_matrix(g))
        if abs(lam[1].imag) > 1e-9 or abs(lam[1] - lam[2]) < 1e-6:
            continue
        tt = normalize(build_tensor(g, "edge"))
        z = tsc_ordering(tt, solve_mlpr(tt).x).scores
        w = al_ordering(g).scores
        # eigenvector entries that are equal in exact arithmetic count as ties
        rhos.append(float(spearmanr(np.round(z, 9), np.round(w, 9)).statistic))
    worst = min(abs(r) for r in rhos)
    report("7 edge-kind TSC ordering has Spearman +-1 with AL on 20 graphs", worst > 1 - 1e-12,
           f"min |rho| = {worst:.12f}")


# Criterion 8

def test_c8_mlpr_certificates():
    cfg = MlprConfig()
    worst_res, worst_sum, worst_neg, worst_lin = 0.0, 0.0, 0.0, 0.0
    instances = [load_fixture(f) for f in ("fig1", "fig2", "fig3")] + SUITE[:60]
    for g in instances:
        for kind in ("triangle", "d3c", "layered", "d3c-norecip"):
            t = build_tensor(g, kind)
            if t.total == 0:
                continue
            tt = normalize(t)
            iterates = []
            res = solve_mlpr(tt, cfg, callback=lambda x: iterates.append((x.min(), x.sum())))
            worst_res = max(worst_res, dense_mlpr_residual(tt, res.x, cfg.alpha, cfg.teleport(g.n)))
            for lo, s in iterates + [(res.x.min(), res.x.sum())]:
                worst_neg = min(worst_neg, lo)
                worst_sum = max(worst_sum, abs(s - 1))
        if g.m:
            tt = normalize(build_tensor(g, "edge"))
            x = solve_mlpr(tt, MlprConfig(tol=1e-13)).x
            ref = linear_pagerank(transition_matrix(g), cfg.alpha, cfg.teleport(g.n))
            worst_lin = max(worst_lin, float(np.abs(x - ref).sum()))
    ok = worst_res <= 1e-10 and worst_neg >= 0 and worst_sum <= 1e-12 and worst_lin <= 1e-8
    report("8 MLPR residual <=1e-10, iterates stochastic, edge kind = linear PageRank", ok,
           f"residual {worst_res:.2e}, min entry {worst_neg:.1e}, sum err {worst_sum:.1e}, "
           f"linear l1 {worst_lin:.1e}")


# Criterion 9

def test_c9_score_range_and_symmetry():
    rng = np.random.default_rng(9)
    out_of_range, asym, scored = 0, 0, 0
    for g in SUITE:
        if g.n < 2:
            continue
        for kind in ("triangle", "d3c", "layered"):
            t = build_tensor(g, kind)
            phi3 = sweep(g, t, rng.permutation(g.n)).columns["phi3"]
            out_of_range += int(np.count_nonzero((phi3 < 0) | (phi3 > 1)))
            scored += phi3.size
            for _ in range(3):
                S = rng.permutation(g.n)[: int(rng.integers(1, g.n))]
                a = score_set(g, t, S)
                b = score_set(g, t, np.setdiff1d(np.arange(g.n), S))
                scored += 2
                out_of_range += not (0 <= a["phi3"] <= 1)
                asym += any(abs(a[c] - b[c]) > 1e-12 for c in ("phi", "ncut", "phi3", "rho3"))
    report("9 phi3 in [0,1] and complement symmetry", out_of_range == 0 and asym == 0,
           f"{scored} sets scored, {out_of_range} out of range, {asym} asymmetric")
