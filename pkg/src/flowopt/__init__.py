"""Flow-preserving ZX-calculus optimisation of Clifford+T circuits."""

from .circuit import Circuit, Gate
from .phase import PhaseExpr
from .zx import OpenGraph, ZxDiagram, count_2q, diagram_stats, toggle_edge, underlying_open_graph

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "Gate",
    "OpenGraph",
    "PhaseExpr",
    "ZxDiagram",
    "count_2q",
    "diagram_stats",
    "toggle_edge",
    "underlying_open_graph",
]
