"""chi_index: chi-indices of cyclotomic elements from residual images at split primes."""
from chi_index.errors import ChiIndexError, PreconditionError
from chi_index.fieldspec import FieldSpec, quotient_structure, rational_field, real_cyclotomic_field
from chi_index.search import IndexReport, SearchConfig, full_run

__version__ = "0.1.0"

__all__ = [
    "ChiIndexError",
    "FieldSpec",
    "IndexReport",
    "PreconditionError",
    "SearchConfig",
    "full_run",
    "quotient_structure",
    "rational_field",
    "real_cyclotomic_field",
]
