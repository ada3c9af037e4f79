"""Graphs with prescribed degrees and neighbour degree sums, through stub-star
ensembles: feasibility systems, a small branch-and-propagate solver, and a
constructive assembler."""

from .assembler import (
    ContractError,
    NotConnected,
    SwapInvariantError,
    SwapTrace,
    construct,
    realize,
    swap_reduce,
    verify_realization,
)
from .feasibility import build_system, count_ensembles, enumerate_all, solve_first, validate_ensemble
from .model import (
    ColorDegreeMatrix,
    Ensemble,
    GraphClass,
    Instance,
    LabeledGraph,
    Partition,
    color_degree_matrix,
    ensemble_from_graph,
    enumerate_partitions,
    instance_from_graph,
    instance_from_lists,
    multichromatic_degree,
)

__version__ = "0.1.0"
