"""Graph-like ZX-diagrams.

Every spider is a Z-spider and every edge between spiders is a Hadamard edge, so the
diagram is stored as a simple graph plus a phase per vertex. Boundary wires are kept as
ordered lists of the spiders they attach to. A wire may additionally carry a single
Hadamard between the boundary and its spider (``input_had`` / ``output_had``), which is
what the graph-like normal form needs for bare wires and for spiders touching several
boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set, Tuple

from .phase import PhaseExpr, PhaseLike

__all__ = [
    "BOUNDARY",
    "DiagramError",
    "OpenGraph",
    "ZxDiagram",
    "count_2q",
    "diagram_stats",
    "is_graph_like",
    "toggle_edge",
    "underlying_open_graph",
]

# Pseudo-neighbour standing for a spider's boundary wire inside unfusion subsets.
BOUNDARY = -1


class DiagramError(ValueError):
    """Structural error in a diagram (self-loop, missing vertex, bad boundary)."""


class ZxDiagram:
    """Mutable graph-like ZX-diagram with stable vertex ids.

    Module-level operations and the rewrite functions treat diagrams as values and work
    on copies; the methods here mutate in place.
    """

    __slots__ = ("_adj", "_phase", "inputs", "outputs", "input_had", "output_had", "_next", "_n_edges")

    def __init__(self) -> None:
        self._adj: Dict[int, Set[int]] = {}
        self._phase: Dict[int, PhaseExpr] = {}
        self.inputs: List[int] = []
        self.outputs: List[int] = []
        self.input_had: List[bool] = []
        self.output_had: List[bool] = []
        self._next = 0
        self._n_edges = 0

    # construction -----------------------------------------------------------------

    def add_spider(self, phase: PhaseLike = 0) -> int:
        v = self._next
        self._next += 1
        self._adj[v] = set()
        self._phase[v] = PhaseExpr.of(phase)
        return v

    def add_input(self, v: int, hadamard: bool = False) -> int:
        self._check(v)
        self.inputs.append(v)
        self.input_had.append(hadamard)
        return len(self.inputs) - 1

    def add_output(self, v: int, hadamard: bool = False) -> int:
        self._check(v)
        self.outputs.append(v)
        self.output_had.append(hadamard)
        return len(self.outputs) - 1

    def copy(self) -> "ZxDiagram":
        d = ZxDiagram.__new__(ZxDiagram)
        d._adj = {v: set(ns) for v, ns in self._adj.items()}
        d._phase = dict(self._phase)
        d.inputs = list(self.inputs)
        d.outputs = list(self.outputs)
        d.input_had = list(self.input_had)
        d.output_had = list(self.output_had)
        d._next = self._next
        d._n_edges = self._n_edges
        return d

    __copy__ = copy

    # queries ----------------------------------------------------------------------

    def _check(self, v: int) -> None:
        if v not in self._adj:
            raise DiagramError(f"no spider {v}")

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def vertices(self) -> Iterable[int]:
        return self._adj.keys()

    def num_vertices(self) -> int:
        return len(self._adj)

    def num_edges(self) -> int:
        return self._n_edges

    def edges(self) -> Iterator[Tuple[int, int]]:
        for u, ns in self._adj.items():
            for w in ns:
                if u < w:
                    yield (u, w)

    def neighbours(self, v: int) -> Set[int]:
        """The live neighbour set of ``v``. Do not mutate it."""
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def connected(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def phase(self, v: int) -> PhaseExpr:
        return self._phase[v]

    def phases(self) -> Mapping[int, PhaseExpr]:
        return self._phase

    def is_input(self, v: int) -> bool:
        return v in self.inputs

    def is_output(self, v: int) -> bool:
        return v in self.outputs

    def is_boundary(self, v: int) -> bool:
        return v in self.inputs or v in self.outputs

    def is_internal(self, v: int) -> bool:
        return not self.is_boundary(v)

    def boundary_vertices(self) -> Set[int]:
        return set(self.inputs) | set(self.outputs)

    @property
    def next_id(self) -> int:
        return self._next

    # mutation ---------------------------------------------------------------------

    def set_phase(self, v: int, phase: PhaseLike) -> None:
        self._check(v)
        self._phase[v] = PhaseExpr.of(phase)

    def add_to_phase(self, v: int, phase: PhaseLike) -> None:
        self._phase[v] = self._phase[v] + phase

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise DiagramError(f"self-loop on {u}")
        if v in self._adj[u]:
            raise DiagramError(f"edge ({u},{v}) already present")
        self._adj[u].add(v)
        self._adj[v].add(u)
        self._n_edges += 1

    def remove_edge(self, u: int, v: int) -> None:
        self._adj[u].remove(v)
        self._adj[v].remove(u)
        self._n_edges -= 1

    def toggle(self, u: int, v: int) -> None:
        """Toggle the Hadamard edge ``u``--``v`` in place."""
        if u == v:
            raise DiagramError(f"self-loop on {u}")
        au = self._adj[u]
        if v in au:
            au.remove(v)
            self._adj[v].remove(u)
            self._n_edges -= 1
        else:
            self._check(v)
            au.add(v)
            self._adj[v].add(u)
            self._n_edges += 1

    def remove_spider(self, v: int) -> None:
        if self.is_boundary(v):
            raise DiagramError(f"spider {v} still holds a boundary wire")
        for w in self._adj.pop(v):
            self._adj[w].remove(v)
            self._n_edges -= 1
        del self._phase[v]

    def move_boundaries(self, old: int, new: int, toggle_had: bool = False) -> None:
        """Re-attach every boundary wire of ``old`` to ``new``."""
        self._check(new)
        for i, b in enumerate(self.inputs):
            if b == old:
                self.inputs[i] = new
                if toggle_had:
                    self.input_had[i] = not self.input_had[i]
        for i, b in enumerate(self.outputs):
            if b == old:
                self.outputs[i] = new
                if toggle_had:
                    self.output_had[i] = not self.output_had[i]

    # misc -------------------------------------------------------------------------

    def signature(self) -> tuple:
        """Hashable summary of the structure (vertices, edges, boundaries), phases excluded."""
        return (
            tuple(sorted(self._adj)),
            tuple(sorted(self.edges())),
            tuple(self.inputs),
            tuple(self.outputs),
            tuple(self.input_had),
            tuple(self.output_had),
        )

    def __repr__(self) -> str:
        return (
            f"ZxDiagram(V={self.num_vertices()}, E={self.num_edges()}, "
            f"inputs={self.inputs}, outputs={self.outputs})"
        )


def toggle_edge(d: ZxDiagram, u: int, v: int) -> ZxDiagram:
    """Return a copy of ``d`` with the edge ``u``--``v`` toggled."""
    if u == v:
        raise DiagramError(f"self-loop on {u}")
    d._check(u)
    d._check(v)
    out = d.copy()
    out.toggle(u, v)
    return out


def count_2q(d: ZxDiagram) -> int:
    """Two-qubit gate count of the circuit extracted along a causal flow: |E| - |V| + |I|."""
    return d.num_edges() - d.num_vertices() + len(d.inputs)


def diagram_stats(d: ZxDiagram) -> Tuple[int, int, int, int]:
    """``(|V|, |E|, internal spiders, non-Clifford spiders)``."""
    bnd = d.boundary_vertices()
    n_internal = sum(1 for v in d.vertices() if v not in bnd)
    n_nc = sum(1 for p in d.phases().values() if not p.is_clifford())
    return d.num_vertices(), d.num_edges(), n_internal, n_nc


def is_graph_like(d: ZxDiagram) -> bool:
    """Check the structural conditions of a graph-like diagram on the stored representation."""
    adj = d._adj
    edges = 0
    for v, ns in adj.items():
        if v in ns:
            return False
        for w in ns:
            if w not in adj or v not in adj[w]:
                return False
        edges += len(ns)
    if edges != 2 * d.num_edges():
        return False
    if len(d.inputs) != len(d.input_had) or len(d.outputs) != len(d.output_had):
        return False
    seen: Set[int] = set()
    for b in list(d.inputs) + list(d.outputs):
        if b not in adj or b in seen:
            return False
        seen.add(b)
    return set(d.phases()) == set(adj)


@dataclass(frozen=True)
class OpenGraph:
    """An open graph ``(G, I, O)``; ``inputs`` and ``outputs`` keep wire order."""

    adj: Mapping[int, FrozenSet[int]]
    inputs: Tuple[int, ...]
    outputs: Tuple[int, ...]

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[int],
        edges: Iterable[Tuple[int, int]],
        inputs: Iterable[int],
        outputs: Iterable[int],
    ) -> "OpenGraph":
        adj: Dict[int, Set[int]] = {v: set() for v in vertices}
        for u, v in edges:
            if u == v:
                raise DiagramError(f"self-loop on {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls({v: frozenset(ns) for v, ns in adj.items()}, tuple(inputs), tuple(outputs))

    def vertices(self) -> Iterable[int]:
        return self.adj.keys()

    def neighbours(self, v: int) -> FrozenSet[int]:
        return self.adj[v]

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((u, w) for u, ns in self.adj.items() for w in ns if u < w)

    def num_vertices(self) -> int:
        return len(self.adj)

    def num_edges(self) -> int:
        return sum(len(ns) for ns in self.adj.values()) // 2


def underlying_open_graph(d: ZxDiagram) -> OpenGraph:
    """Spiders as vertices, Hadamard edges as edges, boundary spiders as ``I`` and ``O``."""
    if not is_graph_like(d):
        raise DiagramError("diagram is not graph-like")
    return OpenGraph({v: frozenset(ns) for v, ns in d._adj.items()}, tuple(d.inputs), tuple(d.outputs))


def phase_value(d: ZxDiagram, v: int) -> Fraction:
    return d.phase(v).value
