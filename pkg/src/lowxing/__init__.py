"""Lowest occupied crossings in critical half-plane site percolation."""

__version__ = "0.1.0"

from .crossing import lowest_crossing
from .events import EventSpec, compile_event
from .lattice import Domain, SiteCoord
from .sampling import Configuration, sample

__all__ = [
    "Configuration",
    "Domain",
    "EventSpec",
    "SiteCoord",
    "compile_event",
    "lowest_crossing",
    "sample",
]
