"""Multi-hop question decomposition over semantic graphs.

Parse a question into a rooted semantic graph, classify its reasoning type,
segment the graph into single-hop sub-questions, answer them in order
through a pluggable model backend, and combine the answers into a final
answer with an explicit reasoning trace.
"""

from qdamr.backends import Answer, Backend, FixtureBackend, HttpBackend, load_fixtures
from qdamr.graph import (
    AmrGraph,
    Const,
    Literal,
    Var,
    detach_subtree,
    find_nodes_by_concept,
    is_isomorphic,
    parse_penman,
    serialize_penman,
)
from qdamr.linear import LinearSeq, delinearize, linearize, render, sequence_from_text
from qdamr.pipeline import (
    Decomposition,
    DiscreteOp,
    ReasoningTrace,
    answer_multihop,
    decompose,
)
from qdamr.reasoning import ReasoningType, classify
from qdamr.segmentation import (
    SegmentationResult,
    find_secondary_unknown,
    longest_identical_path,
    path_based_segmentation,
    unknowns_based_segmentation,
)

__version__ = "0.1.0"

__all__ = [
    "AmrGraph",
    "Var",
    "Const",
    "Literal",
    "parse_penman",
    "serialize_penman",
    "is_isomorphic",
    "detach_subtree",
    "find_nodes_by_concept",
    "LinearSeq",
    "linearize",
    "delinearize",
    "render",
    "sequence_from_text",
    "ReasoningType",
    "classify",
    "SegmentationResult",
    "find_secondary_unknown",
    "unknowns_based_segmentation",
    "longest_identical_path",
    "path_based_segmentation",
    "Backend",
    "FixtureBackend",
    "HttpBackend",
    "Answer",
    "load_fixtures",
    "Decomposition",
    "DiscreteOp",
    "ReasoningTrace",
    "decompose",
    "answer_multihop",
    "__version__",
]
