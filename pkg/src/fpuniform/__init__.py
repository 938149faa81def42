"""fpuniform: uniformity norms and linear-form averages over F_p^n.

Exact (full-enumeration) and Monte-Carlo computation of Gowers norms,
correlation norms, averages over systems of linear forms, polynomial-factor
decompositions, and query-based correlation testers on prime-field domains.
"""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    FormatError,
    FpuniformError,
    RetryLimitError,
    ValidationError,
)

__all__ = [
    "BudgetExceededError",
    "FormatError",
    "FpuniformError",
    "RetryLimitError",
    "ValidationError",
    "__version__",
]
