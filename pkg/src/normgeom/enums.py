from enum import Enum


class NormKind(str, Enum):
    EUCLIDEAN = "euclidean"
    LP = "lp"
    POLYHEDRAL = "polyhedral"


class OrthoMethod(str, Enum):
    EXACT_POLYHEDRAL = "exact-polyhedral"
    BRACKETED_QUOTIENT = "bracketed-quotient"
    CLOSED_FORM_LP = "closed-form-lp"


class ModulusBranch(str, Enum):
    DIRECT = "direct"
    RECIPROCAL = "reciprocal"


class PairClass(str, Enum):
    """Outcome of the rotundity-gap classification of a 2D space."""
    STRICTLY_ROTUND_PAIRS = "strictly-rotund-pairs"
    FLAT_PAIR = "flat-pair"
