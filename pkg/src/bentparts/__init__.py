"""Exact construction and verification of bent partitions."""

from .cyclotomic import CycInt
from .errors import (
    BentPartsError,
    BudgetExceededError,
    ConstructionRefusedError,
    DomainError,
    InvariantViolationError,
    ParseError,
    RouteRefusedError,
)
from .fields import FieldDescriptor, SpaceDescriptor, VectorComponent
from .transform import FunctionTable, WalshSpectrum, walsh_full, walsh_point

__all__ = [
    "BentPartsError",
    "BudgetExceededError",
    "ConstructionRefusedError",
    "CycInt",
    "DomainError",
    "FieldDescriptor",
    "FunctionTable",
    "InvariantViolationError",
    "ParseError",
    "RouteRefusedError",
    "SpaceDescriptor",
    "VectorComponent",
    "WalshSpectrum",
    "walsh_full",
    "walsh_point",
]
__version__ = "0.1.0"
