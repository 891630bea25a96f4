"""``tensorsc`` command line: preprocess, sweep, cluster and verify.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or malformed
input, no motifs, failed verification), 3 non-convergence. On exit code 3
whatever output was requested has still been written.

Inputs are edge-list paths or ``fixture:NAME`` for a bundled network.
Relative paths that do not exist are looked up in ``$TENSORSC_DATA_DIR``.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import FIXTURES, load_fixture
from .baselines import METHODS, run_baseline
from .graph import (
    DirectedGraph,
    EdgeListParseError,
    EmptyCoreError,
    filter_to_motif_core,
    read_edge_list,
    strongly_connected_components,
    write_edge_list,
    write_label_map,
)
from .mlpr import ConvergenceWarning
from .motifs import KINDS, build_tensor, normalize
from .partition import NoMotifError, TSCConfig, cluster, tsc_profile
from .sweep import SCORES, sweep

logger = logging.getLogger("tensorsc")

DATA_DIR_ENV = "TENSORSC_DATA_DIR"
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NONCONVERGED = 0, 1, 2, 3
SWEEP_KMIN = 20


class DataError(Exception):
    """Input problem reported with exit code 2."""


class _UsageError(Exception):
    """Flag combination rejected after parsing (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def resolve_input(spec: str) -> DirectedGraph:
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in FIXTURES:
            raise DataError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
        return load_fixture(name)
    path = Path(spec)
    if not path.exists() and not path.is_absolute() and os.environ.get(DATA_DIR_ENV):
        alt = Path(os.environ[DATA_DIR_ENV]) / path
        if alt.exists():
            path = alt
    try:
        return read_edge_list(path)
    except OSError as exc:
        raise DataError(f"cannot read {spec}: {exc.strerror or exc}") from exc


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _config(args) -> TSCConfig:
    return TSCConfig(alpha=args.alpha, gamma=args.gamma, tol=args.tol, max_iters=args.max_iters,
                     score=args.score, k_min=args.kmin, seed=args.seed)


def cmd_preprocess(args) -> int:
    g = resolve_input(args.input)
    t = build_tensor(g, args.tensor)
    core = filter_to_motif_core(g, t)
    motifs = build_tensor(core, args.tensor).total
    if args.out:
        with open(args.out, "w") as fh:
            write_edge_list(core, fh, header=f"{args.tensor} motif core: n={core.n} m={core.m}")
        with open(args.out + ".map", "w") as fh:
            write_label_map(core, fh)
    print(f"{core.n} {core.m} {motifs}")
    return EXIT_OK


def _sweep_one(g, t, method, cfg, k_min):
    """Profile and extra CSV columns for one method."""
    if method == "tsc":
        prof, _ = tsc_profile(g, t, cfg, k_min)
        return prof, {}
    prof = run_baseline(g, method, t, cfg.score, cfg.seed, k_min)
    extra = {"vector": prof.meta["vector"]} if method == "co" else {}
    return prof, extra


def cmd_sweep(args) -> int:
    methods = args.method or ["tsc"]
    if len(methods) > 1 and not args.out:
        raise _UsageError("--out is required (as a file prefix) when several --method values are given")
    g = resolve_input(args.input)
    t = build_tensor(g, args.tensor)
    k_min = args.kmin if args.kmin is not None else SWEEP_KMIN
    if g.n < 2 * k_min:
        logger.info("n=%d is below 2*kmin; sweeping from k=1", g.n)
        k_min = 1
    cfg = _config(args)
    stalled = False
    for method in methods:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ConvergenceWarning)
            prof, extra = _sweep_one(g, t, method, cfg, k_min)
        for w in caught:
            if issubclass(w.category, ConvergenceWarning):
                stalled = True
                logger.warning("%s: %s", method, w.message)
            else:
                warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
        out = args.out if len(methods) == 1 else f"{args.out}.{method}.{args.format}"
        with _output(out) as fh:
            if args.format == "csv":
                prof.to_csv(fh, labels=g.labels, extra=extra)
            else:
                fh.write(prof.to_json(labels=g.labels, extra=extra) + "\n")
    return EXIT_NONCONVERGED if stalled else EXIT_OK


def cmd_cluster(args) -> int:
    g = resolve_input(args.input)
    cfg = _config(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        part = cluster(g, args.tensor, cfg, args.clusters, method=args.method)
    stalled = False
    for w in caught:
        stalled |= issubclass(w.category, ConvergenceWarning)
        logger.warning("%s", w.message)
    doc = part.to_json(g, args.method, args.tensor, cfg)
    if args.out:
        with open(args.out + ".json", "w") as fh:
            fh.write(doc + "\n")
        with open(args.out + ".tsv", "w") as fh:
            part.to_tsv(g, fh)
    else:
        print(doc)
    return EXIT_NONCONVERGED if stalled else EXIT_OK


def _verify_checks(g: DirectedGraph, seed: int):
    """Yield ``(name, ok, detail)`` for each oracle comparison."""
    from . import oracle

    comps = sorted(sorted(c) for c in oracle.brute_scc(g))
    yield "scc", comps == strongly_connected_components(g), f"{len(comps)} components"
    rng = np.random.default_rng(seed)
    for kind in KINDS:
        t = build_tensor(g, kind)
        if kind != "edge":
            ok = t.entries == oracle.brute_motif_dict(g, kind)
            yield f"motifs[{kind}]", ok, f"{t.nnz} entries, {t.total} instances"
        if t.total == 0:
            continue
        tt = normalize(t)
        x = rng.dirichlet(np.ones(g.n))
        P = oracle.dense_collapse(tt, x)
        y = rng.random(g.n)
        err = float(np.abs(P @ y - tt.collapse_apply(x, y)).max())
        err = max(err, float(np.abs(y @ P - tt.collapse_left(x, y)).max()))
        yield f"collapse[{kind}]", err <= 1e-10, f"max error {err:.1e}"
        order = rng.permutation(g.n)
        fast = sweep(g, t, order).rows
        slow = oracle.brute_sweep(g, t, order)
        bad = 0
        for a, b in zip(fast, slow):
            for col in ("cut", "vol", "cut3", "vol3"):
                bad += a[col] != b[col]
            for col in ("phi", "ncut", "rho", "phi3", "rho3", "density"):
                bad += abs(a[col] - b[col]) > 1e-10
        yield f"sweep[{kind}]", bad == 0, f"{len(fast)} rows, {bad} mismatches"


def cmd_verify(args) -> int:
    g = resolve_input(args.input)
    if g.n > args.max_n:
        raise DataError(f"graph has n={g.n} > --max-n {args.max_n}; refusing brute-force checks")
    failed = 0
    for name, ok, detail in _verify_checks(g, args.seed):
        print(f"{'ok' if ok else 'MISMATCH':8} {name:24} {detail}")
        failed += not ok
    if failed:
        print(f"{failed} checks failed")
        return EXIT_DATA
    print("all checks passed")
    return EXIT_OK


def _add_solver_flags(p, kmin_default):
    p.add_argument("--tensor", choices=KINDS, default="d3c", help="motif tensor kind (default d3c)")
    p.add_argument("--alpha", type=float, default=0.99)
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--tol", type=float, default=1e-10, help="multilinear PageRank residual tolerance")
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--score", choices=sorted(SCORES), default="cond3")
    p.add_argument("--kmin", type=int, default=kmin_default,
                   help="smallest prefix size considered by the sweep")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tensorsc", description="Motif-preserving spectral partitioning of directed graphs.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("preprocess", help="filter to the motif core and print 'n m motifs'")
    p.add_argument("input")
    p.add_argument("--tensor", choices=KINDS, default="d3c")
    p.add_argument("--out", help="core edge list path; a .map sidecar is written next to it")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("sweep", help="write a sweep profile for one or more orderings")
    p.add_argument("input")
    p.add_argument("--method", action="append", choices=("tsc",) + METHODS,
                   help="ordering to sweep; repeat for several (default tsc)")
    _add_solver_flags(p, None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output file, or file prefix with several methods (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cluster", help="recursive bisection into C clusters")
    p.add_argument("input")
    p.add_argument("--clusters", type=int, default=2, metavar="C")
    p.add_argument("--method", choices=("tsc",) + METHODS, default="tsc")
    _add_solver_flags(p, 1)
    p.add_argument("--out", help="prefix for OUT.json and OUT.tsv (default: JSON to stdout)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("verify", help="compare fast paths against brute-force oracles")
    p.add_argument("input")
    p.add_argument("--max-n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(name)s: %(levelname)s: %(message)s")
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"tensorsc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, EdgeListParseError, EmptyCoreError, NoMotifError, OSError, ValueError) as exc:
        print(f"tensorsc: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
