"""Distinguishing-game laboratory for composed ideal block ciphers."""

from .cipher import (
    CipherParams,
    IdealCipherState,
    LazyPermutation,
    eager_sample,
    lazy_eager_equivalence_check,
    new_ideal_cipher,
)
from .errors import (
    BudgetError,
    BudgetViolation,
    ConfigurationError,
    DomainError,
    TranscriptParseError,
)
from .game import (
    DBL,
    SINGLE,
    TRP2,
    Adversary,
    CrucialKeys,
    GameInstance,
    OperatorSpec,
    OracleBudget,
    build_world,
    cascade,
    parse_operator,
    run_adversary,
)
from .transcript import Transcript, bad_event, seen_key_pairs, validate_transcript

__all__ = [
    "Adversary",
    "BudgetError",
    "BudgetViolation",
    "CipherParams",
    "ConfigurationError",
    "CrucialKeys",
    "DBL",
    "DomainError",
    "GameInstance",
    "IdealCipherState",
    "LazyPermutation",
    "OperatorSpec",
    "OracleBudget",
    "SINGLE",
    "TRP2",
    "Transcript",
    "TranscriptParseError",
    "bad_event",
    "build_world",
    "cascade",
    "eager_sample",
    "lazy_eager_equivalence_check",
    "new_ideal_cipher",
    "parse_operator",
    "run_adversary",
    "seen_key_pairs",
    "validate_transcript",
]

__version__ = "0.1.0"
