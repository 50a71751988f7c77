"""Higher-rank graph combinatorics and exact arithmetic in their Cuntz-Krieger algebras."""

from . import degree
from .algebra import (
    AlgebraElement,
    BratteliDiagram,
    GaussianRational,
    adjoint,
    af_grading,
    algebra_map_pullback,
    bratteli,
    check_ck_relations,
    cocycle_grading,
    expectation,
    f_block,
    multiply,
    refine,
    star_product,
)
from .constructions import (
    Cocycle,
    GroupAction,
    GroupSpec,
    MonoidMap,
    assemble_2graph,
    coordinate,
    product,
    pullback,
    quotient,
    recover_cocycle,
    skew_product,
    theta_flip,
    theta_identity,
    translation_action,
)
from .core import Edge, KGraph, Morphism, Skeleton, VertexMatrix, compose, factor, morphisms, validate, vertex_matrix
from .dynamics import (
    AnalysisVerdict,
    PathDescriptor,
    Status,
    aperiodicity_check,
    cofinality_check,
    cylinder_partition_check,
    eval_path,
    is_period,
    path_pullback,
    prepend,
    pure_infiniteness_hypothesis,
    shift,
    simplicity_verdict,
)
from .errors import *  # noqa: F401,F403
from .fileio import dumps_kgraph, load_kgraph, loads_kgraph
from .iso import IsoResult, isomorphism_search
from .rep import check_rep, interior_rep

__version__ = "0.1.0"
