"""Tensor spectral clustering of directed graphs around chosen motifs."""

from importlib import resources

from .graph import (
    DirectedGraph,
    EdgeListParseError,
    EmptyCoreError,
    UndirectedView,
    degrees,
    filter_to_motif_core,
    load_edge_list,
    read_edge_list,
    strongly_connected_components,
    write_edge_list,
)
from .mlpr import ConvergenceWarning, MlprConfig, MlprResult, residual, solve_mlpr
from .motifs import (
    KINDS,
    MotifTensor,
    TransitionTensor,
    build_tensor,
    collapse_matvec,
    enumerate_triangles,
    normalize,
)
from .orderings import (
    OrderingVector,
    al_ordering,
    co_ordering,
    dl_ordering,
    lemma1_operator,
    random_ordering,
    tsc_ordering,
    ul_ordering,
)
from .partition import Partition, TSCConfig, bisect, cluster
from .baselines import run_baseline, sub_dl
from .sweep import CutResult, SweepProfile, best_cut, score_set, sweep

FIXTURES = ("fig1", "fig2", "fig3")


def load_fixture(name: str) -> DirectedGraph:
    """One of the bundled example networks: ``fig1``, ``fig2`` or ``fig3``."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; expected one of {FIXTURES}")
    with resources.files(__package__).joinpath("fixtures", f"{name}.txt").open() as fh:
        return load_edge_list(fh)


__version__ = "0.1.0"
