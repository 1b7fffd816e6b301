"""Phase teleportation.

Every non-Clifford phase of the graph-like diagram becomes a variable. A scratch copy with
concrete phases is simplified to reduced gadget form while recording which variables end
up fused (and with which sign). The fused groups are then resolved on the untouched
original diagram: one member keeps the group's combined phase and the rest become 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from .circuit import Circuit
from .convert import circuit_to_diagram, to_graph_like
from .phase import PhaseExpr
from .rewrites import _id_fuse, _lcomp, _pivot, _unfuse
from .zx import ZxDiagram

__all__ = [
    "PhaseTable",
    "TeleportError",
    "fix_phase",
    "full_reduce",
    "fuse_variables",
    "resolve_all",
    "teleport_diagram",
    "teleport_phases",
]


class TeleportError(RuntimeError):
    pass


@dataclass
class PhaseTable:
    """Original variable values, their multipliers and the fused groups (union-find)."""

    values: Dict[int, Fraction] = field(default_factory=dict)
    mult: Dict[int, int] = field(default_factory=dict)
    parent: Dict[int, int] = field(default_factory=dict)
    hosts: Dict[int, int] = field(default_factory=dict)
    survivors: Dict[int, int] = field(default_factory=dict)  # group root -> preferred variable
    resolved: Dict[int, Fraction] = field(default_factory=dict)

    def add(self, var: int, value: Fraction, host: int) -> None:
        self.values[var] = Fraction(value) % 2
        self.mult[var] = 1
        self.parent[var] = var
        self.hosts[var] = host

    def copy(self) -> "PhaseTable":
        return PhaseTable(
            dict(self.values), dict(self.mult), dict(self.parent), dict(self.hosts),
            dict(self.survivors), dict(self.resolved),
        )

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            raise TeleportError(f"variables {a} and {b} are already in one group")
        lo, hi = min(ra, rb), max(ra, rb)
        self.parent[hi] = lo
        return lo

    def members(self, v: int) -> List[int]:
        r = self.find(v)
        return sorted(x for x in self.parent if self.find(x) == r)

    def groups(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for x in sorted(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return out

    def flip(self, v: int) -> None:
        """Negate the multipliers of every member of ``v``'s group."""
        for x in self.members(v):
            self.mult[x] = -self.mult[x]

    def group_sum(self, v: int) -> Fraction:
        """``sum_j m_j alpha_j`` over the group of ``v`` (mod 2)."""
        return sum((self.mult[x] * self.values[x] for x in self.members(v)), Fraction(0)) % 2


def fuse_variables(table: PhaseTable, group_a: int, group_b: int) -> PhaseTable:
    """Merge two groups (given by any member). Multipliers are left as recorded."""
    out = table.copy()
    out.union(group_a, group_b)
    return out


def fix_phase(table: PhaseTable, group: int, kappa: int, beta: Fraction, survivor: Optional[int] = None) -> PhaseTable:
    """Fix ``alpha_kappa = beta`` in the group of ``group``.

    The survivor ``sigma`` (default: lowest other member) takes
    ``m_sigma * (sum_j m_j alpha_j - m_kappa * beta)`` and any further members take 0.
    """
    members = table.members(group)
    if kappa not in members:
        raise TeleportError(f"variable {kappa} is not in the group of {group}")
    others = [x for x in members if x != kappa]
    out = table.copy()
    beta = Fraction(beta) % 2
    out.resolved[kappa] = beta
    if not others:
        if (table.group_sum(group) - table.mult[kappa] * beta) % 2 != 0:
            raise TeleportError("a singleton group can only be fixed to its own value")
        return out
    sigma = min(others) if survivor is None else survivor
    if sigma not in others:
        raise TeleportError(f"survivor {sigma} must be another member of the group")
    for x in others:
        out.resolved[x] = Fraction(0)
    out.resolved[sigma] = (table.mult[sigma] * (table.group_sum(group) - table.mult[kappa] * beta)) % 2
    return out


# tracked reduction ------------------------------------------------------------------

class _Reducer:
    """In-place simplifier on a concrete diagram that reports fusions to a PhaseTable."""

    def __init__(self, d: ZxDiagram, table: PhaseTable, rng: Optional[random.Random] = None):
        self.d = d
        self.table = table
        self.rng = rng
        self.track: Dict[int, int] = {}

    # bookkeeping

    def _fuse_track(self, keep: int, gone: int) -> None:
        t = self.track.pop(gone, None)
        if t is None:
            return
        mine = self.track.get(keep)
        if mine is None:
            self.track[keep] = t
        else:
            self.track[keep] = self.table.union(mine, t)

    def _drop(self, v: int) -> None:
        self.track.pop(v, None)

    def _root(self, v: int) -> None:
        if v in self.track:
            self.track[v] = self.table.find(self.track[v])

    # helpers

    def _order(self, items: List) -> List:
        if self.rng is not None:
            self.rng.shuffle(items)
        return items

    def _phase(self, v: int) -> Fraction:
        return self.d.phase(v).clifford

    def _is_top(self, v: int) -> bool:
        d = self.d
        return d.degree(v) == 1 and not d.is_boundary(v)

    def _gadget_part(self, v: int) -> bool:
        d = self.d
        if self._is_top(v):
            return True
        return any(self._is_top(w) for w in d.neighbours(v))

    # rules; each returns the number of applications

    def id_simp(self) -> int:
        d = self.d
        n = 0
        for v in self._order(sorted(d.vertices())):
            if v not in d or d.degree(v) != 2 or d.is_boundary(v) or self._phase(v) != 0:
                continue
            a, b = sorted(d.neighbours(v))
            if d.is_boundary(a) and d.is_boundary(b):
                continue
            self._drop(v)
            keep = b if d.is_boundary(b) and not d.is_boundary(a) else a
            gone = a if keep == b else b
            self._fuse_track(keep, gone)
            survivor = _id_fuse(d, v)
            assert survivor == keep
            n += 1
        return n

    def _unfuse_boundary(self, v: int) -> int:
        """Move ``v``'s boundary wire onto a new spider ``v --H-- w``."""
        d = self.d
        w = d.add_spider(0)
        d.add_edge(v, w)
        d.move_boundaries(v, w, toggle_had=True)
        return w

    def _gadgetize(self, v: int) -> None:
        """Move ``v``'s phase onto a new gadget hanging off ``v``."""
        _, top = _unfuse(self.d, v, (), keep=Fraction(0))
        t = self.track.pop(v, None)
        if t is not None:
            self.track[top] = t

    def _pivot(self, u: int, v: int) -> None:
        self._drop(u)
        self._drop(v)
        _pivot(self.d, u, v)

    def pivot_simp(self) -> int:
        d = self.d
        n = 0
        for u, v in self._order(sorted(d.edges())):
            if u not in d or v not in d or not d.connected(u, v):
                continue
            if self._phase(u).denominator != 1 or self._phase(v).denominator != 1:
                continue
            if self._gadget_part(u) or self._gadget_part(v):
                continue
            bu, bv = d.is_boundary(u), d.is_boundary(v)
            if bu and bv:
                continue
            if bu:
                self._unfuse_boundary(u)
            elif bv:
                self._unfuse_boundary(v)
            self._pivot(u, v)
            n += 1
        return n

    def lcomp_simp(self) -> int:
        d = self.d
        n = 0
        for v in self._order(sorted(d.vertices())):
            if v not in d or d.is_boundary(v) or self._phase(v).denominator != 2:
                continue
            self._drop(v)
            _lcomp(d, v)
            n += 1
        return n

    def pivot_gadget_simp(self) -> int:
        d = self.d
        n = 0
        for a, b in self._order(sorted(d.edges())):
            if a not in d or b not in d or not d.connected(a, b):
                continue
            pa, pb = self._phase(a), self._phase(b)
            if pa.denominator == 1 and pb.denominator != 1:
                u, v = a, b
            elif pb.denominator == 1 and pa.denominator != 1:
                u, v = b, a
            else:
                continue
            if d.is_boundary(u) or d.is_boundary(v):
                continue
            if self._gadget_part(u) or self._gadget_part(v):
                continue
            self._gadgetize(v)
            self._pivot(u, v)
            n += 1
        return n

    def pivot_boundary_simp(self) -> int:
        d = self.d
        n = 0
        for a, b in self._order(sorted(d.edges())):
            if a not in d or b not in d or not d.connected(a, b):
                continue
            for u, w in ((a, b), (b, a)):
                if self._phase(u).denominator != 1 or d.is_boundary(u) or not d.is_boundary(w):
                    continue
                if self._phase(w).denominator == 1:
                    continue
                if self._gadget_part(u) or self._gadget_part(w):
                    continue
                self._gadgetize(w)
                self._unfuse_boundary(w)
                self._pivot(u, w)
                n += 1
                break
        return n

    def gadget_simp(self) -> int:
        d = self.d
        n = 0
        # isolated scalar pieces
        for v in sorted(d.vertices()):
            if v in d and not d.is_boundary(v):
                if d.degree(v) == 0:
                    self._drop(v)
                    d.remove_spider(v)
                elif d.degree(v) == 1:
                    (w,) = d.neighbours(v)
                    if d.degree(w) == 1 and not d.is_boundary(w):
                        self._drop(v)
                        self._drop(w)
                        d.remove_spider(v)
                        d.remove_spider(w)
        gadgets: Dict[frozenset, List[Tuple[int, int]]] = {}
        for base in sorted(d.vertices()):
            if base not in d or d.is_boundary(base) or self._phase(base).denominator != 1:
                continue
            tops = [t for t in d.neighbours(base) if self._is_top(t)]
            if len(tops) != 1 or d.degree(base) < 3:
                continue
            top = tops[0]
            if self._phase(base) == 1:
                d.set_phase(base, 0)
                d.set_phase(top, -d.phase(top))
                if top in self.track:
                    self.table.flip(self.track[top])
            legs = frozenset(d.neighbours(base)) - {top}
            if self._phase(top).denominator == 1:
                p = self._phase(top)
                for leg in legs:
                    d.add_to_phase(leg, p)
                self._drop(top)
                d.remove_spider(top)
                d.remove_spider(base)
                n += 1
                continue
            gadgets.setdefault(legs, []).append((base, top))
        for legs, items in sorted(gadgets.items(), key=lambda kv: kv[1][0]):
            if len(items) < 2:
                continue
            base0, top0 = items[0]
            for base, top in items[1:]:
                d.add_to_phase(top0, d.phase(top))
                self._fuse_track(top0, top)
                d.remove_spider(top)
                d.remove_spider(base)
                n += 1
        return n

    # strategies

    def interior_clifford(self) -> int:
        total = 0
        while True:
            k = self.id_simp() + self.pivot_simp() + self.lcomp_simp()
            total += k
            if k == 0:
                return total

    def clifford(self) -> int:
        total = 0
        while True:
            total += self.interior_clifford()
            k = self.pivot_boundary_simp()
            total += k
            if k == 0:
                return total

    def full(self, max_rounds: int = 10_000) -> None:
        self.interior_clifford()
        self.pivot_gadget_simp()
        for _ in range(max_rounds):
            self.clifford()
            i = self.gadget_simp()
            self.interior_clifford()
            j = self.pivot_gadget_simp()
            if i + j == 0:
                return
        raise TeleportError("full reduction did not converge")


def _concrete_copy(d: ZxDiagram, table: PhaseTable) -> Tuple[ZxDiagram, Dict[int, int]]:
    scratch = d.copy()
    track: Dict[int, int] = {}
    # every variable starts in its own group, signed as it appears on its host
    table.parent = {x: x for x in table.parent}
    table.survivors = {}
    for v, p in d.phases().items():
        if p.is_symbolic:
            vid, m = p.var
            if vid not in table.values:
                raise TeleportError(f"variable {vid} missing from the phase table")
            if vid in track.values():
                raise TeleportError(f"variable {vid} appears on more than one spider")
            scratch.set_phase(v, p.clifford + m * table.values[vid])
            table.mult[vid] = m
            track[v] = vid
    return scratch, track


def full_reduce(
    d: ZxDiagram, table: Optional[PhaseTable] = None, rng: Optional[random.Random] = None
) -> Tuple[ZxDiagram, PhaseTable]:
    """Simplify a copy of ``d`` to reduced gadget form, recording fusions in ``table``.

    Variables on ``d`` are evaluated from the table. Returns the reduced scratch diagram
    (concrete phases) and the updated table; the table's ``survivors`` map each group to
    a member whose host spider is still present. ``rng`` randomises rewrite order.
    """
    table = PhaseTable() if table is None else table.copy()
    scratch, track = _concrete_copy(d, table)
    red = _Reducer(scratch, table, rng)
    red.track = track
    red.full()
    live = set(scratch.vertices())
    for root, members in table.groups().items():
        alive = [x for x in members if table.hosts.get(x) in live]
        pool = alive or members
        table.survivors[root] = min(pool, key=lambda x: (table.hosts.get(x, x), x))
    return scratch, table


def resolve_all(table: PhaseTable, d: ZxDiagram) -> ZxDiagram:
    """Replace every variable in ``d`` by its resolved value.

    Explicitly fixed values in ``table.resolved`` win; otherwise the group's survivor takes
    ``m_lambda * sum_j m_j alpha_j`` and the other members take 0.
    """
    out = d.copy()
    for v, p in d.phases().items():
        if not p.is_symbolic:
            continue
        vid, m = p.var
        if vid in table.resolved:
            val = table.resolved[vid]
        else:
            if vid not in table.parent:
                raise TeleportError(f"variable {vid} is unknown to the table")
            root = table.find(vid)
            surv = table.survivors.get(root)
            if surv is None:
                raise TeleportError(f"group of variable {vid} has no survivor")
            val = table.mult[vid] * table.group_sum(vid) if vid == surv else Fraction(0)
        out.set_phase(v, p.clifford + m * val)
    return out


def variable_diagram(d: ZxDiagram) -> Tuple[ZxDiagram, PhaseTable]:
    """Replace every non-Clifford phase of ``d`` by a fresh variable (its spider id)."""
    out = d.copy()
    table = PhaseTable()
    for v in sorted(d.vertices()):
        p = d.phase(v)
        if not p.is_symbolic and not p.is_clifford():
            table.add(v, p.clifford, v)
            out.set_phase(v, PhaseExpr.variable(v))
    return out, table


def teleport_diagram(d: ZxDiagram, rng: Optional[random.Random] = None) -> ZxDiagram:
    """Teleport phases on a graph-like diagram and return it with concrete resolved phases."""
    vd, table = variable_diagram(d)
    _, table = full_reduce(vd, table, rng)
    return resolve_all(table, vd)


def teleport_phases(c: Circuit, rng: Optional[random.Random] = None) -> Tuple[ZxDiagram, PhaseTable]:
    """Graph-like diagram of ``c`` with non-Clifford phases as variables, plus the table
    after reducing a scratch copy."""
    d = to_graph_like(circuit_to_diagram(c))
    vd, table = variable_diagram(d)
    _, table = full_reduce(vd, table, rng)
    return vd, table
