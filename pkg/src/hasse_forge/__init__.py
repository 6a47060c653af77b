"""Brauer-Manin counterexamples to the Hasse principle: generalized Mordell and
Fermat curves from rational points on a threefold, with local certificates."""

import sys

from .config import DEFAULT_CAPS, Caps, caps_from_env
from .errors import (CertificateRefuted, HasseForgeError, IncompleteFactorization,
                     InternalContradiction, InvalidArgument, NeedsMorePrecision, NoPrimePossible,
                     NoSolution, PreconditionError, ReduceFirst, SearchBudgetError)

# Certificates carry integers with tens of thousands of digits.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

__version__ = "0.1.0"

__all__ = [
    "Caps", "DEFAULT_CAPS", "caps_from_env",
    "HasseForgeError", "InvalidArgument", "NoSolution", "NoPrimePossible", "ReduceFirst",
    "IncompleteFactorization", "SearchBudgetError", "NeedsMorePrecision",
    "CertificateRefuted", "InternalContradiction", "PreconditionError",
]
