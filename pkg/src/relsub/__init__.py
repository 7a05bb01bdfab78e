"""Learning context-free grammars of ~-substitutable languages from positive data."""
from .charset import Context, char_set, chi, omega, type_transform
from .errors import (
    GrammarError,
    InvalidSample,
    PremiseViolation,
    RelationError,
    RelsubError,
    SymbolNotInAlphabet,
)
from .grammar import (
    Cfg,
    Production,
    enumerate_language,
    equivalent_up_to,
    format_grammar,
    is_cnf,
    member,
    parse_grammar,
    to_cnf,
    trim,
)
from .learner import LearnerState, Sample, build_hypothesis, contexts, learn_all, learn_step, substrings
from .relation import (
    FiniteMonoid,
    MonoidMorphism,
    RecognizableRelation,
    count_occurrences,
    eval_hom,
    make_count,
    make_kl,
    make_product,
    make_trivial,
    related,
    relation_from_spec,
    validate_relation,
)

__version__ = "0.1.0"
