"""Strongly regular Cayley graphs from three-valued Gauss periods."""
from __future__ import annotations

from .conic import lift_XQ, quotient_and_purity
from .cyclotomy import detect_three_valued_ap, gauss_periods, singer_set
from .field import build_field, subfield_map
from .srg import construct, make_context

__all__ = ["build_field", "construct", "detect_three_valued_ap", "gauss_periods", "lift_XQ",
           "make_context", "quotient_and_purity", "singer_set", "subfield_map"]
__version__ = "0.1.0"
