from .core import (
    UNIT,
    CheckReport,
    MarkovCategory,
    MarkovError,
    Morphism,
    NotDeterministic,
    Obj,
    TypeMismatch,
    permutation_from_swaps,
    tensor_objects,
)
from .diagram import (
    Copy,
    Discard,
    DomainMismatch,
    Gen,
    Id,
    Par,
    Seq,
    Swap,
    Term,
    UnboundGenerator,
    UnboundObject,
    evaluate,
    term_from_json,
    term_to_json,
    typecheck,
)
from .predicates import (
    as_equal,
    causality_sides,
    check_causality_triple,
    check_comonoid_laws,
    check_discard_natural,
    check_multiplicativity,
    displays_ci,
    displays_ci_partition,
    is_deterministic,
    marginalize,
    permute_factors,
)
