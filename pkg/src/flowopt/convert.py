"""Circuit to ZX translation and graph-like normalisation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

from .circuit import Circuit
from .zx import ZxDiagram

__all__ = ["RawDiagram", "circuit_to_diagram", "to_graph_like"]


@dataclass
class RawDiagram:
    """A general ZX-diagram as produced directly from a circuit.

    ``kinds`` maps each vertex to ``"Z"``, ``"X"`` or ``"B"`` (boundary). Edges are
    ``(u, v, hadamard)`` triples and may repeat; self-loops are allowed.
    """

    n_qubits: int = 0
    kinds: Dict[int, str] = field(default_factory=dict)
    phases: Dict[int, Fraction] = field(default_factory=dict)
    edges: List[Tuple[int, int, bool]] = field(default_factory=list)
    inputs: List[int] = field(default_factory=list)
    outputs: List[int] = field(default_factory=list)

    def add_vertex(self, kind: str, phase: Fraction = Fraction(0)) -> int:
        v = len(self.kinds)
        self.kinds[v] = kind
        self.phases[v] = Fraction(phase) % 2
        return v

    def spiders(self) -> List[int]:
        return [v for v, k in self.kinds.items() if k != "B"]


def circuit_to_diagram(c: Circuit) -> RawDiagram:
    """Translate gate by gate: phases to Z-spiders, X to an X(pi) spider, CNOT to a Z--X pair,
    CZ to two Z-spiders joined by a Hadamard edge, and H to a Hadamard on the wire."""
    d = RawDiagram(c.n_qubits)
    front: List[Tuple[int, bool]] = []
    for _ in range(c.n_qubits):
        b = d.add_vertex("B")
        d.inputs.append(b)
        front.append((b, False))

    def attach(q: int, v: int) -> None:
        u, h = front[q]
        d.edges.append((u, v, h))
        front[q] = (v, False)

    for g in c.gates:
        if g.kind == "H":
            q = g.qubits[0]
            u, h = front[q]
            front[q] = (u, not h)
        elif g.kind == "X":
            attach(g.qubits[0], d.add_vertex("X", Fraction(1)))
        elif g.kind == "CNOT":
            ctrl, tgt = g.qubits
            vc = d.add_vertex("Z")
            vt = d.add_vertex("X")
            attach(ctrl, vc)
            attach(tgt, vt)
            d.edges.append((vc, vt, False))
        elif g.kind == "CZ":
            a, b = g.qubits
            va = d.add_vertex("Z")
            vb = d.add_vertex("Z")
            attach(a, va)
            attach(b, vb)
            d.edges.append((va, vb, True))
        else:
            attach(g.qubits[0], d.add_vertex("Z", g.diagonal_phase()))
    for q in range(c.n_qubits):
        b = d.add_vertex("B")
        attach(q, b)
        d.outputs.append(b)
    return d


def to_graph_like(raw: RawDiagram) -> ZxDiagram:
    """Normalise a raw diagram into graph-like form.

    X-spiders are recoloured by toggling the Hadamard status of their incident edges,
    plain-connected Z-spiders are fused, Hadamard self-loops add pi, plain self-loops vanish,
    and parallel Hadamard edges cancel in pairs. Boundary wires get their own spider when
    they would otherwise share one or connect directly to another boundary.
    """
    kinds = raw.kinds
    parent = {v: v for v in kinds if kinds[v] != "B"}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    norm: List[Tuple[int, int, bool]] = []
    for u, v, h in raw.edges:
        h = h ^ (kinds[u] == "X") ^ (kinds[v] == "X")
        norm.append((u, v, h))
        if not h and kinds[u] != "B" and kinds[v] != "B" and u != v:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)

    group_phase: Dict[int, Fraction] = {}
    for v in parent:
        r = find(v)
        group_phase[r] = group_phase.get(r, Fraction(0)) + raw.phases[v]

    parity: Dict[Tuple[int, int], int] = {}
    boundary_link: Dict[int, Tuple[int, bool, bool]] = {}  # b -> (other, hadamard, other_is_boundary)
    for u, v, h in norm:
        bu, bv = kinds[u] == "B", kinds[v] == "B"
        if bu or bv:
            if bu and bv:
                boundary_link[u] = (v, h, True)
                boundary_link[v] = (u, h, True)
            elif bu:
                boundary_link[u] = (find(v), h, False)
            else:
                boundary_link[v] = (find(u), h, False)
            continue
        ru, rv = find(u), find(v)
        if ru == rv:
            if h:
                group_phase[ru] += 1
            continue
        key = (min(ru, rv), max(ru, rv))
        parity[key] = parity.get(key, 0) ^ 1

    d = ZxDiagram()
    ids: Dict[int, int] = {}
    for r in sorted(group_phase):
        ids[r] = d.add_spider(group_phase[r])
    for (a, b), p in sorted(parity.items()):
        if p:
            d.add_edge(ids[a], ids[b])

    taken = set()
    bare_done: Dict[int, Tuple[int, int]] = {}

    def attach(b: int) -> Tuple[int, bool]:
        other, h, other_b = boundary_link[b]
        if other_b:
            # bare wire between two boundaries: in -- s1 --H-- s2 --(H^h)-- out
            if b not in bare_done:
                s1 = d.add_spider(0)
                s2 = d.add_spider(0)
                d.add_edge(s1, s2)
                bare_done[b] = (s1, s2)
                bare_done[other] = (s2, s1)
                return s1, False
            s_mine, _ = bare_done[b]
            return s_mine, not h
        s = ids[other]
        if s not in taken:
            taken.add(s)
            return s, h
        w = d.add_spider(0)
        d.add_edge(s, w)
        return w, not h

    for b in raw.inputs:
        s, h = attach(b)
        d.add_input(s, h)
    for b in raw.outputs:
        s, h = attach(b)
        d.add_output(s, h)
    return d
