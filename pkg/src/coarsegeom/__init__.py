"""Coarse geometry on finite graph metrics: hyperbolicity, quasigeodesics, subspaces."""
from .families import FamilySpec, SplitMix64, generate
from .hyperbolicity import HyperbolicityReport, delta_four_point, delta_slim, gromov_product
from .metric import (
    DisconnectedGraph,
    EmptySet,
    FiniteMetricSpace,
    Graph,
    InvalidWeight,
    VertexPath,
    build_space,
    dist_point_to_set,
    enumerate_geodesics,
    hausdorff_distance,
    parse_graph,
    read_graph,
    write_graph,
)
from .quasigeodesic import MorseEstimate, ParamPath, QGParams, fit_c, morse_radius, tame, verify_qg
from .subspaces import (
    BoundMissed,
    SpliceWitness,
    Subspace,
    TriangleExperimentRecord,
    certify_qg_subspace,
    splice_union,
    triangle_experiment,
    union_geodesic_check_tree,
)

__version__ = "0.1.0"
