"""Circuit extraction along a causal flow."""

from __future__ import annotations

from typing import Dict, List, Optional

from .circuit import Circuit, Gate
from .flow import CausalFlow, find_cflow, flow_depths, verify_cflow
from .zx import ZxDiagram

__all__ = ["ExtractionError", "extract_circuit", "has_gadgets"]


class ExtractionError(ValueError):
    pass


def has_gadgets(d: ZxDiagram) -> bool:
    """True if an internal spider has degree one (the top of a phase gadget)."""
    bnd = d.boundary_vertices()
    return any(d.degree(v) == 1 and v not in bnd for v in d.vertices())


def _swap(a: int, b: int) -> List[Gate]:
    return [Gate("CNOT", (a, b)), Gate("CNOT", (b, a)), Gate("CNOT", (a, b))]


def extract_circuit(d: ZxDiagram, flow: Optional[CausalFlow] = None) -> Circuit:
    """Read off a {CZ, Rz, H} circuit: dipaths become qubit lines, spiders phase gates,
    path edges Hadamards and the remaining edges CZs.

    Spiders are visited by decreasing flow depth, then qubit, then vertex id. A CZ is
    emitted when the first of its two endpoints is visited. If the dipath from input ``q``
    ends at output ``p != q`` the lines are permuted back with CNOT-built swaps at the end.
    """
    n = len(d.inputs)
    if n != len(d.outputs):
        raise ExtractionError("extraction needs as many inputs as outputs")
    for v, p in d.phases().items():
        if p.is_symbolic:
            raise ExtractionError(f"spider {v} carries an unresolved phase variable")
    if has_gadgets(d):
        raise ExtractionError("diagram contains phase gadgets")
    if flow is None:
        flow = find_cflow(d)
        if flow is None:
            raise ExtractionError("diagram has no causal flow")
    elif not verify_cflow(d, flow):
        raise ExtractionError("supplied successor function is not a causal flow")
    succ = flow.successor
    depth = flow.depth
    if set(depth) != set(d.vertices()):
        depth = flow_depths(d, succ)
        assert depth is not None

    line: Dict[int, int] = {}
    pred: Dict[int, int] = {}
    ends: List[int] = []
    for q, v in enumerate(d.inputs):
        line[v] = q
        while v in succ:
            w = succ[v]
            pred[w] = v
            v = w
            line[v] = q
        ends.append(v)
    if len(line) != d.num_vertices():
        raise ExtractionError("flow dipaths do not cover the diagram")
    out_index = {v: j for j, v in enumerate(d.outputs)}

    c = Circuit(n)
    for q, h in enumerate(d.input_had):
        if h:
            c.append(Gate("H", (q,)))
    done = set()
    for v in sorted(d.vertices(), key=lambda x: (-depth[x], line[x], x)):
        q = line[v]
        p = d.phase(v).value
        if p:
            c.append(Gate("Rz", (q,), p))
        for w in sorted(d.neighbours(v)):
            if w in done or succ.get(v) == w or pred.get(v) == w:
                continue
            c.append(Gate("CZ", (q, line[w])))
        done.add(v)
        if v in succ:
            c.append(Gate("H", (q,)))

    # line q now sits at output out_index[ends[q]]
    perm = [out_index[ends[q]] for q in range(n)]
    where = list(range(n))  # where[q]: physical wire currently holding line q's state
    holder = list(range(n))  # holder[w]: line whose state is on wire w
    for target in range(n):
        q = perm.index(target)
        w = where[q]
        if w != target:
            other = holder[target]
            c.extend(_swap(w, target))
            holder[w], holder[target] = other, q
            where[other], where[q] = w, target
    for j, h in enumerate(d.output_had):
        if h:
            c.append(Gate("H", (j,)))
    return c
