"""Matrix graph grammars: Boolean matrix encodings of graph rewriting."""

from .boolalg import ComplexBoolMatrix, Permutation, permute_action, scalar_product
from .derive import Grammar, Match, Strategy, derive, enumerate_matches, run, step
from .graph import SimpleDigraph, complete, is_compatible
from .production import Production, from_static, inverse, nihilation, relabel, to_swap
from .sequence import (
    CompletedSequence,
    classify_determinism,
    coherence_bool,
    coherence_gf2,
    compatibility_w,
    image_closed_form,
    initial_digraph,
    oracle_apply,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexBoolMatrix",
    "Permutation",
    "permute_action",
    "scalar_product",
    "Grammar",
    "Match",
    "Strategy",
    "derive",
    "enumerate_matches",
    "run",
    "step",
    "SimpleDigraph",
    "complete",
    "is_compatible",
    "Production",
    "from_static",
    "inverse",
    "nihilation",
    "relabel",
    "to_swap",
    "CompletedSequence",
    "classify_determinism",
    "coherence_bool",
    "coherence_gf2",
    "compatibility_w",
    "image_closed_form",
    "initial_digraph",
    "oracle_apply",
]
