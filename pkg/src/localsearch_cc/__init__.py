"""Constructions and verifiers for the communication complexity of local search."""

from .graphs import (
    Explicit,
    GraphError,
    GraphFamily,
    Grid,
    Hypercube,
    OddGraph,
    PebblingDag,
    ReplicationGraph,
    hamiltonian_path,
)
from .search import (
    QueryInstance,
    SimLSInstance,
    SumLSInstance,
    VetoLSInstance,
    distinctify,
    dominates,
    is_local_max,
    local_maxima_bruteforce,
    simls_build,
    veto_to_sum,
)

__version__ = "0.1.0"
