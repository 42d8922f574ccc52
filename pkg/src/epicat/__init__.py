"""Lattice-based modal logic of categories over formal contexts.

Formulas denote formal concepts; agents' boxes are interpreted by
I-compatible relations and ``C`` by the common relation ``R_C``.
"""

from .context import (
    FormalConcept,
    FormalContext,
    Relation,
    all_concepts,
    concept_join,
    concept_meet,
    concept_of_features,
    concept_of_objects,
    down,
    up,
)
from .errors import (
    ContractError,
    DialectError,
    EnumerationLimitError,
    EpicatError,
    IncompatibleRelationError,
    NotAConceptError,
    ParseError,
    SearchBoundError,
    UnknownNameError,
)
from .relations import common_relation, compatibility_closure, i_product, is_compatible, sequence_relation
from .semantics import EnrichedContext, Evaluator, Model, Valuation, check_sequent, interpret
from .syntax import Dialect, Sequent, parse_formula, parse_sequent, print_formula

__version__ = "0.1.0"
