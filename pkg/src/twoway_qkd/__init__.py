"""Secret-key rates and security thresholds of two-way Gaussian CV-QKD."""

__version__ = "0.1.0"

from .attacks import AttackParams, classify, eve_mutual_information, validate
from .errors import (
    AttackValidationError,
    DegenerateInputError,
    DomainError,
    InternalConsistencyError,
    NumericError,
    UnsupportedCombinationError,
)
from .keyrates import ProtocolSpec, holevo, key_rate, key_rate_numeric, mutual_info
from .thresholds import postselect, solve_threshold, threshold_curve

__all__ = [
    "AttackParams", "classify", "eve_mutual_information", "validate",
    "AttackValidationError", "DegenerateInputError", "DomainError",
    "InternalConsistencyError", "NumericError", "UnsupportedCombinationError",
    "ProtocolSpec", "holevo", "key_rate", "key_rate_numeric", "mutual_info",
    "postselect", "solve_threshold", "threshold_curve",
]
