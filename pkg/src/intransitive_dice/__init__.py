"""Combinatorics and simulation of intransitive proper dice."""

from .dice import Comparison, Die, Relation, compare, relation, standard_die, validate_proper
from .errors import ContractError, DiceError, InvalidArgument, InvalidOneStep, ResourceLimitError

__version__ = "0.1.0"

__all__ = [
    "Comparison",
    "ContractError",
    "DiceError",
    "Die",
    "InvalidArgument",
    "InvalidOneStep",
    "Relation",
    "ResourceLimitError",
    "compare",
    "relation",
    "standard_die",
    "validate_proper",
]
