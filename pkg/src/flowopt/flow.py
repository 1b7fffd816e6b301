"""Causal flow: detection, verification, influencing digraphs and local preservation checks.

Graph arguments are duck-typed: anything with ``vertices()``, ``neighbours(v)``, ``inputs``
and ``outputs`` works, so both :class:`~flowopt.zx.OpenGraph` and
:class:`~flowopt.zx.ZxDiagram` can be passed directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union

from .zx import OpenGraph

__all__ = [
    "CausalFlow",
    "FlowError",
    "InfluencingDigraph",
    "LocalVerdict",
    "cflow_with_gadgets",
    "check_local_preservation",
    "edge_bound_ok",
    "find_cflow",
    "flow_depths",
    "influencing_digraph",
    "open_subgraph",
    "transformation_vertex_set",
    "verify_cflow",
]


class FlowError(ValueError):
    """Unsupported input for a flow algorithm."""


@dataclass
class CausalFlow:
    """Successor function on non-outputs plus depth labels.

    ``depth[u] > depth[v]`` whenever ``u`` must come before ``v``; outputs have depth 0.
    """

    successor: Dict[int, int]
    depth: Dict[int, int] = field(default_factory=dict)

    def __getitem__(self, u: int) -> int:
        return self.successor[u]

    def paths(self, inputs: Iterable[int]) -> List[List[int]]:
        """The dipath starting at each input, in input order."""
        out = []
        for i in inputs:
            path = [i]
            while path[-1] in self.successor:
                path.append(self.successor[path[-1]])
            out.append(path)
        return out


def _succ(f: Union[CausalFlow, Mapping[int, int]]) -> Mapping[int, int]:
    return f.successor if isinstance(f, CausalFlow) else f


def find_cflow(g) -> Optional[CausalFlow]:
    """Find a causal flow by backward layering from the outputs, or return ``None``.

    Runs in ``O(|V| + |E|)`` time. Requires ``|I| = |O|``.
    """
    inputs = list(g.inputs)
    outputs = list(g.outputs)
    if len(inputs) != len(outputs):
        raise FlowError(f"causal flow search needs |I| = |O|, got {len(inputs)} and {len(outputs)}")
    in_set = set(inputs)
    solved: Set[int] = set(outputs)
    depth: Dict[int, int] = {v: 0 for v in solved}
    succ: Dict[int, int] = {}
    # count and id-sum of unsolved neighbours; with one left the sum is its id
    remaining: Dict[int, int] = {}
    idsum: Dict[int, int] = {}
    for v in g.vertices():
        nb = g.neighbours(v)
        remaining[v] = len(nb)
        idsum[v] = sum(nb)
    for o in solved:
        for w in g.neighbours(o):
            remaining[w] -= 1
            idsum[w] -= o
    # correctors (solved, unused, non-input) whose single unsolved neighbour is known
    ready = [v for v in solved if v not in in_set and remaining[v] == 1]
    active = {v for v in solved if v not in in_set}
    n = len(remaining)
    k = 1
    while ready and len(solved) < n:
        claimed: Dict[int, int] = {}
        for v in ready:
            u = idsum[v]
            if u in claimed:
                # two correctors share their only unsolved neighbour: no flow
                return None
            claimed[u] = v
        nxt: List[int] = []
        for u, v in claimed.items():
            active.discard(v)
            succ[u] = v
            depth[u] = k
            solved.add(u)
        for u in claimed:
            if u not in in_set:
                active.add(u)
        for u in claimed:
            for w in g.neighbours(u):
                remaining[w] -= 1
                idsum[w] -= u
                if remaining[w] == 1 and w in active:
                    nxt.append(w)
        for u in claimed:
            if remaining[u] == 1 and u in active:
                nxt.append(u)
        ready = sorted(w for w in set(nxt) if remaining[w] == 1)
        k += 1
    if len(solved) < n:
        return None
    return CausalFlow(succ, depth)


@dataclass
class InfluencingDigraph:
    vertices: FrozenSet[int]
    arcs: Dict[int, Set[int]]

    def arc_set(self) -> Set[Tuple[int, int]]:
        return {(u, v) for u, vs in self.arcs.items() for v in vs}

    def topological_order(self) -> Optional[List[int]]:
        """A topological order (Kahn), or ``None`` if there is a cycle. Self-loops count as cycles."""
        indeg = {v: 0 for v in self.vertices}
        for u, vs in self.arcs.items():
            for v in vs:
                indeg[v] += 1
        queue = deque(sorted(v for v, d in indeg.items() if d == 0))
        order = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in self.arcs.get(u, ()):
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        return order if len(order) == len(self.vertices) else None

    def is_acyclic(self) -> bool:
        return self.topological_order() is not None

    def reachable_from(self, u: int) -> Set[int]:
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for y in self.arcs.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen


def influencing_digraph(g, f) -> InfluencingDigraph:
    """Arcs ``u -> f(u)`` and ``u -> w`` for ``w ~ f(u)``, ``w != u``, over every ``u`` in ``f``."""
    s = _succ(f)
    arcs: Dict[int, Set[int]] = {}
    for u, fu in s.items():
        a = set(g.neighbours(fu))
        a.discard(u)
        a.add(fu)
        arcs[u] = a
    return InfluencingDigraph(frozenset(g.vertices()), arcs)


def verify_cflow(g, f) -> bool:
    """Check that ``f`` is a causal flow of the open graph ``g``.

    ``f`` must be defined exactly on the non-outputs, map into non-inputs along edges,
    and give an acyclic influencing digraph (which also forces injectivity).
    """
    s = _succ(f)
    outputs = set(g.outputs)
    inputs = set(g.inputs)
    verts = set(g.vertices())
    if set(s) != verts - outputs:
        return False
    targets: Set[int] = set()
    for u, fu in s.items():
        if fu not in verts or fu in inputs or fu not in g.neighbours(u):
            return False
        if fu in targets:
            return False
        targets.add(fu)
    return influencing_digraph(g, s).is_acyclic()


def flow_depths(g, f) -> Optional[Dict[int, int]]:
    """Longest-path depth labels for a successor function (outputs and sinks at 0)."""
    dig = influencing_digraph(g, f)
    order = dig.topological_order()
    if order is None:
        return None
    depth: Dict[int, int] = {}
    for u in reversed(order):
        nxt = dig.arcs.get(u)
        depth[u] = 1 + max(depth[v] for v in nxt) if nxt else 0
    return depth


def edge_bound_ok(n: int, k: int, m: int) -> bool:
    """Edge-count bound for a flow graph with ``n`` vertices and ``k`` dipaths: ``m <= kn - k(k+1)/2``."""
    if min(n, k, m) < 0:
        raise ValueError("n, k, m must be non-negative")
    return 2 * m <= 2 * k * n - k * (k + 1)


# labelled open graphs ---------------------------------------------------------------

def cflow_with_gadgets(g, labels: Mapping[int, str]) -> Optional[CausalFlow]:
    """Causal flow of a labelled open graph whose non-outputs are in the XY or YZ plane.

    YZ vertices (phase gadgets) get ``f(u) = u``; the rest of the graph must admit an
    ordinary causal flow, and the combined influencing digraph must be acyclic.
    Unlabelled vertices default to XY.
    """
    if any(lab == "XZ" for lab in labels.values()):
        raise FlowError("XZ-plane vertices have no causal flow")
    bad = [lab for lab in labels.values() if lab not in ("XY", "YZ")]
    if bad:
        raise FlowError(f"unknown measurement plane {bad[0]!r}")
    yz = {v for v, lab in labels.items() if lab == "YZ"}
    if yz & (set(g.inputs) | set(g.outputs)):
        raise FlowError("boundary vertices must be in the XY plane")
    rest = [v for v in g.vertices() if v not in yz]
    sub = OpenGraph(
        {v: frozenset(w for w in g.neighbours(v) if w not in yz) for v in rest},
        tuple(g.inputs),
        tuple(g.outputs),
    )
    base = find_cflow(sub)
    if base is None:
        return None
    succ = dict(base.successor)
    arcs: Dict[int, Set[int]] = {}
    for u, fu in succ.items():
        a = set(g.neighbours(fu))
        a.discard(u)
        a.add(fu)
        arcs[u] = a
    for u in yz:
        succ[u] = u
        arcs[u] = set(g.neighbours(u))
    dig = InfluencingDigraph(frozenset(g.vertices()), arcs)
    order = dig.topological_order()
    if order is None:
        return None
    depth: Dict[int, int] = {}
    for u in reversed(order):
        nxt = arcs.get(u)
        depth[u] = 1 + max(depth[v] for v in nxt) if nxt else 0
    return CausalFlow(succ, depth)


# local preservation -----------------------------------------------------------------

def transformation_vertex_set(g, g2) -> Tuple[Set[int], Set[int]]:
    """``(V_T, V'_T)``: endpoints of edges in the symmetric difference, split by graph."""
    e1 = {(min(u, w), max(u, w)) for u in g.vertices() for w in g.neighbours(u)}
    e2 = {(min(u, w), max(u, w)) for u in g2.vertices() for w in g2.neighbours(u)}
    s = {x for e in e1 ^ e2 for x in e}
    v1, v2 = set(g.vertices()), set(g2.vertices())
    return s & v1, s & v2


def open_subgraph(g, f, s: Set[int]) -> OpenGraph:
    """The open subgraph of ``s`` for successor function ``f``."""
    succ = _succ(f)
    inputs = set(g.inputs)
    outputs = set(g.outputs)
    i_s = {v for v in s if v in inputs}
    for u, fu in succ.items():
        if u not in s and fu in s:
            i_s.add(fu)
    o_s = {v for v in s if v in outputs or (v in succ and succ[v] not in s)}
    adj = {v: frozenset(w for w in g.neighbours(v) if w in s) for v in s}
    return OpenGraph(adj, tuple(sorted(i_s)), tuple(sorted(o_s)))


@dataclass
class LocalVerdict:
    preserved: bool
    flow: Optional[CausalFlow] = None
    reason: str = ""


def _relation_acyclic(nodes: Set[int], pairs: Iterable[Tuple[int, int]]) -> bool:
    arcs: Dict[int, Set[int]] = {v: set() for v in nodes}
    for u, v in pairs:
        arcs[u].add(v)
    return InfluencingDigraph(frozenset(nodes), arcs).is_acyclic()


def check_local_preservation(g, g2, f, vt: Optional[Set[int]] = None) -> LocalVerdict:
    """Sufficient local test that ``g2`` (the rewritten graph) still admits a causal flow.

    ``f`` is a causal flow of ``g``. ``vt`` is the image of the transformation vertex set;
    it defaults to the endpoints of changed edges that survive in ``g2``. Returns a verdict
    carrying the stitched flow when all three local conditions hold, else an
    indeterminate verdict (the caller should fall back to :func:`find_cflow`).
    """
    succ = dict(_succ(f))
    if vt is None:
        _, vt = transformation_vertex_set(g, g2)
    s = set(vt)
    outputs2 = set(g2.outputs)
    verts2 = set(g2.vertices())
    # successors pointing at removed vertices must be redefined locally
    kept = {u: fu for u, fu in succ.items() if u in verts2 and fu in verts2}
    sub = open_subgraph(g2, kept, s)
    if len(sub.inputs) != len(sub.outputs):
        return LocalVerdict(False, reason="unbalanced open subgraph")
    local = find_cflow(sub) if s else CausalFlow({})
    if local is None:
        return LocalVerdict(False, reason="no dipath cover in the open subgraph")
    o_s = set(sub.outputs)
    new: Dict[int, int] = {}
    for u in verts2:
        if u in outputs2:
            continue
        if u in s and u not in o_s:
            new[u] = local.successor[u]
        elif u in succ and succ[u] in verts2:
            new[u] = succ[u]
        else:
            return LocalVerdict(False, reason=f"vertex {u} left without a successor")
    # the influencing subdigraph on the extended neighbourhood must be acyclic
    ns = set(s)
    for v in s:
        ns.update(g2.neighbours(v))
    arcs: Dict[int, Set[int]] = {}
    for u in ns:
        if u in new:
            fu = new[u]
            a = {w for w in g2.neighbours(fu) if w in ns and w != u}
            if fu in ns:
                a.add(fu)
            arcs[u] = a
    dig = InfluencingDigraph(frozenset(ns), arcs)
    if not dig.is_acyclic():
        return LocalVerdict(False, reason="cycle near the transformation")
    # relations between points where dipaths of the influencing digraph
    # leave and re-enter N(S). Relating only rim pairs misses cycles that exit straight
    # from an output of the open subgraph, so every exit is related to every entry it
    # reaches through the original digraph. Arcs with both ends outside N(S) are
    # unchanged by the rewrite, so these segments are exactly the original pre-order.
    old = influencing_digraph(g, succ)
    outside: List[Tuple[int, int]] = []
    for u in ns:
        if u not in new:
            continue
        fu = new[u]
        exits = {w for w in g2.neighbours(fu) if w not in ns and w != u}
        if fu not in ns:
            exits.add(fu)
        seen = set(exits)
        stack = list(exits)
        while stack:
            x = stack.pop()
            for y in old.arcs.get(x, ()):
                if y in ns:
                    outside.append((u, y))
                elif y not in seen:
                    seen.add(y)
                    stack.append(y)
    if not _relation_acyclic(ns, dig.arc_set() | set(outside)):
        return LocalVerdict(False, reason="cycle through the rest of the graph")
    depth = flow_depths(g2, new)
    if depth is None:  # pragma: no cover - excluded by the conditions above
        return LocalVerdict(False, reason="stitched flow is cyclic")
    return LocalVerdict(True, CausalFlow(new, depth))
