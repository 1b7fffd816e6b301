"""Greedy flow-preserving optimisation of graph-like diagrams.

Candidate rewrites (identity fusion, local complementation and pivoting, each optionally
preceded by neighbour unfusion) are scored by their exact change in ``|E| - |V|``. The best
acceptable candidate is applied to a copy; it is kept only if the result still has a causal
flow, otherwise it is set aside until the next successful rewrite.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Set, Tuple

from .basic_opt import basic_optimize
from .circuit import Circuit
from .convert import circuit_to_diagram, to_graph_like
from .extract import extract_circuit
from .flow import CausalFlow, check_local_preservation, find_cflow
from .rewrites import (
    BOUNDARY,
    KIND_ORDER,
    RewriteMatch,
    apply_in_place,
    match_id_fuse,
    match_lcomp,
    match_pivot,
)
from .teleport import teleport_diagram
from .zx import ZxDiagram, count_2q

__all__ = [
    "MatchList",
    "OptimizerConfig",
    "OptimizeResult",
    "accept",
    "find_matches",
    "flow_opt",
    "optimize_diagram",
    "run_flow_opt",
    "score",
    "update_matches",
]


@dataclass
class OptimizerConfig:
    s_max_lcomp: int = 2
    s_max_pivot: int = 2
    max_iterations: Optional[int] = None
    rng_seed: int = 0
    # try the local preservation test before falling back to a full flow search
    check_local: bool = False
    # assert the flow invariant after every accepted rewrite
    debug: bool = False

    def __post_init__(self) -> None:
        if self.s_max_lcomp < 0 or self.s_max_pivot < 0:
            raise ValueError("subset size caps must be non-negative")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")


def score(m: RewriteMatch) -> int:
    """``-dN2Q``: positive scores reduce the two-qubit count."""
    return -(m.delta_e - m.delta_v)


def accept(m: RewriteMatch) -> bool:
    """Reductions are taken; neutral moves only if they remove vertices."""
    d2q = m.delta_e - m.delta_v
    return d2q < 0 or (d2q == 0 and m.delta_v < 0)


def sort_key(m: RewriteMatch) -> tuple:
    """Best first: highest score, most vertices removed, lowest ids, kind order, subsets."""
    return (-score(m), m.delta_v, m.vertices, KIND_ORDER[m.kind], m.unfuse)


# enumeration -------------------------------------------------------------------------


def _gadget_part(d: ZxDiagram, v: int) -> bool:
    """Top (internal, degree 1) or base (adjacent to a top) of a phase gadget."""
    if d.is_boundary(v):
        return False
    if d.degree(v) == 1:
        return True
    return any(d.degree(w) == 1 and not d.is_boundary(w) for w in d.neighbours(v))


def _subsets(d: ZxDiagram, v: int, cap: int, exclude: Iterable[int] = ()) -> Iterator[Tuple[int, ...]]:
    """Unfusion subsets of ``v`` of size at most ``cap``; the empty one first.

    A boundary spider must always unfuse its boundary wire, which counts towards ``cap``.
    """
    ex = set(exclude)
    refs = sorted(w for w in d.neighbours(v) if w not in ex)
    if d.is_boundary(v):
        for k in range(0, cap):
            for t in itertools.combinations(refs, k):
                yield (BOUNDARY,) + t
        return
    for k in range(0, cap + 1):
        yield from itertools.combinations(refs, k)


def _vertex_matches(d: ZxDiagram, v: int, cfg: OptimizerConfig) -> Iterator[RewriteMatch]:
    """IdFuse and LComp matches anchored at ``v``."""
    if _gadget_part(d, v):
        return
    m = match_id_fuse(d, v)
    if m is not None:
        yield m
    for s in _subsets(d, v, cfg.s_max_lcomp):
        m = match_lcomp(d, v, s)
        if m is not None:
            yield m


def _edge_matches(d: ZxDiagram, u: int, v: int, cfg: OptimizerConfig) -> Iterator[RewriteMatch]:
    """Pivot matches on the edge ``u < v``."""
    if _gadget_part(d, u) or _gadget_part(d, v):
        return
    sv_all = list(_subsets(d, v, cfg.s_max_pivot, exclude=(u,)))
    for su in _subsets(d, u, cfg.s_max_pivot, exclude=(v,)):
        for sv in sv_all:
            m = match_pivot(d, u, v, su, sv)
            if m is not None:
                yield m


class MatchList:
    """Candidate matches keyed by :attr:`RewriteMatch.key`, indexed by anchor vertex."""

    def __init__(self, accepted_only: bool = False) -> None:
        self.accepted_only = accepted_only
        self._by_key: Dict[tuple, RewriteMatch] = {}
        self._by_vertex: Dict[int, Set[tuple]] = {}

    def add(self, m: RewriteMatch) -> bool:
        if self.accepted_only and not accept(m):
            return False
        self._by_key[m.key] = m
        for x in m.vertices:
            self._by_vertex.setdefault(x, set()).add(m.key)
        return True

    def discard(self, key: tuple) -> None:
        m = self._by_key.pop(key, None)
        if m is None:
            return
        for x in m.vertices:
            ks = self._by_vertex.get(x)
            if ks is not None:
                ks.discard(key)
                if not ks:
                    del self._by_vertex[x]

    def discard_vertex(self, v: int) -> None:
        for key in list(self._by_vertex.get(v, ())):
            self.discard(key)

    def get(self, key: tuple) -> Optional[RewriteMatch]:
        return self._by_key.get(key)

    def __contains__(self, key: object) -> bool:
        return key in self._by_key

    def __len__(self) -> int:
        return len(self._by_key)

    def __iter__(self) -> Iterator[RewriteMatch]:
        return iter(self._by_key.values())

    def snapshot(self) -> Dict[tuple, Tuple[int, int]]:
        """Keys mapped to ``(dE, dV)``; two lists are equal iff their snapshots are."""
        return {k: (m.delta_e, m.delta_v) for k, m in self._by_key.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatchList):
            return NotImplemented
        return self.snapshot() == other.snapshot()

    def best(self) -> Optional[RewriteMatch]:
        acc = [m for m in self if accept(m)]
        return min(acc, key=sort_key) if acc else None

    def copy(self) -> "MatchList":
        out = MatchList(self.accepted_only)
        out._by_key = dict(self._by_key)
        out._by_vertex = {k: set(v) for k, v in self._by_vertex.items()}
        return out


def _add_around(ml: MatchList, d: ZxDiagram, verts: Iterable[int], cfg: OptimizerConfig) -> List[RewriteMatch]:
    """Enumerate every match with an anchor in ``verts``; returns the ones added."""
    added: List[RewriteMatch] = []
    vs = sorted(set(verts))
    vset = set(vs)
    for v in vs:
        for m in _vertex_matches(d, v, cfg):
            if ml.add(m):
                added.append(m)
    for u in vs:
        for w in sorted(d.neighbours(u)):
            # each edge once: from its lower endpoint, or from u if w is outside the set
            if w in vset and w < u:
                continue
            a, b = min(u, w), max(u, w)
            for m in _edge_matches(d, a, b, cfg):
                if ml.add(m):
                    added.append(m)
    return added


def find_matches(d: ZxDiagram, cfg: Optional[OptimizerConfig] = None, accepted_only: bool = False) -> MatchList:
    """All IdFuse, LComp and Pivot matches of ``d`` with unfusion subsets within the caps."""
    cfg = cfg or OptimizerConfig()
    ml = MatchList(accepted_only)
    _add_around(ml, d, d.vertices(), cfg)
    return ml


def _changed_vertices(d: ZxDiagram, d2: ZxDiagram, m: RewriteMatch) -> Set[int]:
    """Vertices whose phase, neighbourhood or boundary status differ between the two."""
    near: Set[int] = set(m.vertices)
    for x in m.vertices:
        near.update(d.neighbours(x))
    region = set(near)
    for x in near:
        region.update(d.neighbours(x))
    region.update(v for v in range(d.next_id, d2.next_id) if v in d2)
    out: Set[int] = set()
    for v in region:
        a, b = v in d, v in d2
        if a != b:
            out.add(v)
        elif a and (
            d.neighbours(v) != d2.neighbours(v)
            or d.phase(v) != d2.phase(v)
            or d.is_boundary(v) != d2.is_boundary(v)
        ):
            out.add(v)
    return out


def update_matches(
    ml: MatchList, applied: RewriteMatch, d: ZxDiagram, d2: ZxDiagram, cfg: Optional[OptimizerConfig] = None
) -> Tuple[MatchList, List[RewriteMatch]]:
    """Refresh ``ml`` (valid for ``d``) after ``applied`` turned ``d`` into ``d2``.

    A match depends only on its anchors, their neighbours and the edges among those, so
    every match anchored at a changed vertex or a neighbour of one (before or after) is
    re-enumerated. Returns the new list and the matches that were (re)added.
    """
    cfg = cfg or OptimizerConfig()
    changed = _changed_vertices(d, d2, applied)
    affected = set(changed)
    for v in changed:
        if v in d:
            affected.update(d.neighbours(v))
        if v in d2:
            affected.update(d2.neighbours(v))
    out = ml.copy()
    for v in affected:
        out.discard_vertex(v)
    added = _add_around(out, d2, (v for v in affected if v in d2), cfg)
    return out, added


# the greedy loop ---------------------------------------------------------------------


def _identity_paths(d: ZxDiagram, flow: CausalFlow) -> bool:
    succ = flow.successor
    for i, o in zip(d.inputs, d.outputs):
        v = i
        while v in succ:
            v = succ[v]
        if v != o:
            return False
    return True


@dataclass
class OptimizeResult:
    diagram: ZxDiagram
    accepted: List[RewriteMatch] = field(default_factory=list)
    rejected: int = 0
    initial_2q: int = 0
    final_2q: int = 0
    circuit: Optional[Circuit] = None


Trace = Callable[[ZxDiagram, RewriteMatch], None]


def optimize_diagram(d: ZxDiagram, cfg: Optional[OptimizerConfig] = None, trace: Optional[Trace] = None) -> OptimizeResult:
    """Run the greedy loop on a copy of ``d``, which must have a causal flow.

    ``trace`` is called with the new diagram and the match after each accepted rewrite.
    """
    cfg = cfg or OptimizerConfig()
    d = d.copy()
    flow = find_cflow(d)
    if flow is None:
        raise ValueError("input diagram has no causal flow")
    res = OptimizeResult(d, initial_2q=count_2q(d))
    ml = find_matches(d, cfg, accepted_only=True)
    heap: List[tuple] = [(sort_key(m), m.key) for m in ml]
    heapq.heapify(heap)
    parked: List[tuple] = []
    while heap:
        if cfg.max_iterations is not None and len(res.accepted) >= cfg.max_iterations:
            break
        entry = heapq.heappop(heap)
        m = ml.get(entry[1])
        if m is None or sort_key(m) != entry[0]:
            continue
        d2 = d.copy()
        apply_in_place(d2, m)
        new_flow: Optional[CausalFlow] = None
        if m.kind == "IdFuse":
            ok = True
        else:
            if cfg.check_local:
                verdict = check_local_preservation(d, d2, flow)
                new_flow = verdict.flow if verdict.preserved else None
            if new_flow is None:
                new_flow = find_cflow(d2)
            ok = new_flow is not None and _identity_paths(d2, new_flow)
        if not ok:
            res.rejected += 1
            parked.append(entry)
            continue
        if new_flow is None or cfg.debug:
            new_flow = find_cflow(d2)
            if new_flow is None:
                raise AssertionError(f"flow lost after {m}")
        ml, added = update_matches(ml, m, d, d2, cfg)
        d, flow = d2, new_flow
        res.accepted.append(m)
        for x in added:
            heapq.heappush(heap, (sort_key(x), x.key))
        for x in parked:
            heapq.heappush(heap, x)
        parked = []
        if len(heap) > 4 * len(ml) + 64:
            heap = [(sort_key(x), x.key) for x in ml]
            heapq.heapify(heap)
        if trace is not None:
            trace(d, m)
    res.diagram = d
    res.final_2q = count_2q(d)
    return res


def run_flow_opt(
    c: Circuit,
    cfg: Optional[OptimizerConfig] = None,
    teleport_only: bool = False,
    trace: Optional[Trace] = None,
) -> OptimizeResult:
    """The full pipeline: diagram, graph-like form, phase teleportation, greedy loop,
    extraction and peephole clean-up."""
    cfg = cfg or OptimizerConfig()
    d = to_graph_like(circuit_to_diagram(c))
    d = teleport_diagram(d, random.Random(cfg.rng_seed))
    if teleport_only:
        res = OptimizeResult(d, initial_2q=count_2q(d), final_2q=count_2q(d))
    else:
        res = optimize_diagram(d, cfg, trace)
    res.circuit = basic_optimize(extract_circuit(res.diagram))
    return res


def flow_opt(c: Circuit, cfg: Optional[OptimizerConfig] = None) -> Circuit:
    """Optimise ``c`` for two-qubit count while preserving a causal flow."""
    res = run_flow_opt(c, cfg)
    assert res.circuit is not None
    return res.circuit
