"""Restricted integer partitions: enumeration, graphicality, Boltzmann sampling
and limit-law numerics."""

from respart.restriction import RestrictionMu, builtin, parts_up_to, with_lower_bound

__version__ = "0.1.0"

__all__ = ["RestrictionMu", "builtin", "parts_up_to", "with_lower_bound", "__version__"]
