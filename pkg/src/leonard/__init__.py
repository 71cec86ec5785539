"""Exact computations with Leonard pairs, their parameter arrays and companions."""

from .compat import (
    CompanionResult,
    CompatInput,
    companion_families,
    companion_of,
    compatible,
    materialize_family,
)
from .errors import LeonardError
from .field import FieldDescriptor, FieldElement
from .matrix import Matrix
from .oracle import all_companions_bruteforce, is_leonard_pair
from .parray import ParameterArray, realize, validate
from .typesys import (
    BasicSequence,
    LeonardType,
    array_from_basic,
    basic_from_array,
    classify_type,
)

__all__ = [
    "BasicSequence", "CompanionResult", "CompatInput", "FieldDescriptor", "FieldElement",
    "LeonardError", "LeonardType", "Matrix", "ParameterArray", "all_companions_bruteforce",
    "array_from_basic", "basic_from_array", "classify_type", "companion_families", "companion_of",
    "compatible", "is_leonard_pair", "materialize_family", "realize", "validate",
]
