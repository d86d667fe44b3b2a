"""Generation, validation and property checks for meta-Fibonacci recursions."""

__version__ = "0.1.0"

from .core import (
    MAX_TERM,
    ArithmeticOverflow,
    Conolly,
    Conway,
    ConwayVariant,
    Diagnostic,
    EvalTrace,
    GeneralConolly,
    InnerComposition,
    OuterArgument,
    SequenceState,
    SpecError,
    UndefinedTerm,
    generate,
    iterate_composition,
    new_state,
)

__all__ = [
    "MAX_TERM",
    "ArithmeticOverflow",
    "Conolly",
    "Conway",
    "ConwayVariant",
    "Diagnostic",
    "EvalTrace",
    "GeneralConolly",
    "InnerComposition",
    "OuterArgument",
    "SequenceState",
    "SpecError",
    "UndefinedTerm",
    "generate",
    "iterate_composition",
    "new_state",
]
