"""Approximate maximin-share allocation of mixed goods and chores."""
from .core import (Allocation, Instance, SolverParams, classify_items,
                   normalize, parse_instance, satisfies_alpha_mms,
                   serialize_instance, welfare)

__version__ = "0.1.0"
