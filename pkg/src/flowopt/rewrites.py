"""Graph-like rewrite rules with exact edge and vertex deltas.

Every public rule takes a diagram and returns a rewritten copy. The ``match_*`` helpers
validate a candidate without touching the diagram and return a :class:`RewriteMatch`
carrying the exact change in edge and vertex count.

Unfusion subsets are collections of neighbour ids; :data:`~flowopt.zx.BOUNDARY` stands for
the vertex's own boundary wire and must be present whenever the vertex holds one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Collection, Iterable, Optional, Set, Tuple

from .phase import PhaseExpr
from .zx import BOUNDARY, ZxDiagram

__all__ = [
    "KIND_ORDER",
    "NoMatchError",
    "RewriteMatch",
    "apply_match",
    "gadget_delete",
    "gadget_fuse",
    "gadget_top",
    "id_fuse",
    "local_comp",
    "match_id_fuse",
    "match_lcomp",
    "match_pivot",
    "neighbour_unfuse",
    "pivot",
]

KIND_ORDER = {"IdFuse": 0, "LComp": 1, "Pivot": 2, "NeighbourUnfuse": 3, "GadgetFuse": 4, "GadgetDelete": 5}

HALF = Fraction(1, 2)


class NoMatchError(ValueError):
    """The rule does not apply at the requested vertices."""


@dataclass(frozen=True)
class RewriteMatch:
    kind: str
    vertices: Tuple[int, ...]
    unfuse: Tuple[Tuple[int, ...], ...] = ()
    delta_e: int = 0
    delta_v: int = 0

    @property
    def delta_2q(self) -> int:
        return self.delta_e - self.delta_v

    @property
    def key(self) -> tuple:
        return (self.kind, self.vertices, self.unfuse)

    def __str__(self) -> str:
        subs = "".join(f" S{i}={set(s) or '{}'}" for i, s in enumerate(self.unfuse))
        return f"{self.kind}{self.vertices}{subs} dE={self.delta_e} dV={self.delta_v}"


def _subset(s: Optional[Iterable[int]]) -> Tuple[int, ...]:
    return tuple(sorted(set(s or ())))


# in-place primitives ----------------------------------------------------------------

def _unfuse(d: ZxDiagram, v: int, subset: Collection[int], keep: Optional[Fraction] = None) -> Tuple[int, int]:
    """Insert ``v --H-- w1 --H-- w2`` and move the edges to ``subset`` onto ``w2``.

    With ``keep`` given, ``v`` is left with phase ``keep`` and ``w2`` takes the rest;
    otherwise ``v`` keeps its phase and ``w2`` gets zero.
    """
    w1 = d.add_spider(0)
    if keep is None:
        w2 = d.add_spider(0)
    else:
        w2 = d.add_spider(d.phase(v) - keep)
        d.set_phase(v, keep)
    d.add_edge(v, w1)
    d.add_edge(w1, w2)
    for s in subset:
        if s == BOUNDARY:
            d.move_boundaries(v, w2)
        else:
            d.remove_edge(v, s)
            d.add_edge(w2, s)
    return w1, w2


def _id_fuse(d: ZxDiagram, v: int) -> int:
    a, b = sorted(d.neighbours(v))
    if d.is_boundary(b) and not d.is_boundary(a):
        a, b = b, a
    d.remove_spider(v)
    if d.connected(a, b):
        d.remove_edge(a, b)
        d.add_to_phase(a, 1)
    for w in list(d.neighbours(b)):
        d.toggle(a, w)
    d.add_to_phase(a, d.phase(b))
    d.move_boundaries(b, a)
    d.remove_spider(b)
    return a


def _lcomp(d: ZxDiagram, v: int) -> None:
    ns = sorted(d.neighbours(v))
    p = d.phase(v)
    for i, x in enumerate(ns):
        for y in ns[i + 1:]:
            d.toggle(x, y)
        d.add_to_phase(x, -p)
    d.remove_spider(v)


def _pivot(d: ZxDiagram, u: int, v: int) -> None:
    nu = set(d.neighbours(u)) - {v}
    nv = set(d.neighbours(v)) - {u}
    a = nu & nv
    b = nu - nv
    c = nv - nu
    pu, pv = d.phase(u), d.phase(v)
    for x in a:
        for y in b:
            d.toggle(x, y)
        for y in c:
            d.toggle(x, y)
    for x in b:
        for y in c:
            d.toggle(x, y)
    for x in b:
        d.add_to_phase(x, pv)
    for x in c:
        d.add_to_phase(x, pu)
    both = pu + pv + 1
    for x in a:
        d.add_to_phase(x, both)
    d.remove_spider(u)
    d.remove_spider(v)


# validation -------------------------------------------------------------------------

def _check_subset(d: ZxDiagram, v: int, subset: Tuple[int, ...], exclude: Collection[int] = ()) -> None:
    for s in subset:
        if s == BOUNDARY:
            if not d.is_boundary(v):
                raise NoMatchError(f"spider {v} has no boundary wire to unfuse")
        elif s not in d.neighbours(v) or s in exclude:
            raise NoMatchError(f"{s} is not an unfusable neighbour of {v}")
    if d.is_boundary(v) and BOUNDARY not in subset:
        raise NoMatchError(f"boundary spider {v} must unfuse its boundary wire")


def _concrete(d: ZxDiagram, v: int) -> Optional[Fraction]:
    p = d.phase(v)
    return None if p.is_symbolic else p.clifford


def match_id_fuse(d: ZxDiagram, v: int) -> Optional[RewriteMatch]:
    if v not in d or d.degree(v) != 2 or d.is_boundary(v) or _concrete(d, v) != 0:
        return None
    a, b = sorted(d.neighbours(v))
    if d.is_boundary(a) and d.is_boundary(b):
        return None
    na, nb = d.neighbours(a), d.neighbours(b)
    if len(na) > len(nb):
        na, nb = nb, na
    common = sum(1 for w in na if w in nb and w != v)
    de = -2 - 2 * common - (1 if b in d.neighbours(a) else 0)
    return RewriteMatch("IdFuse", (v,), (), de, -2)


def _edges_within(d: ZxDiagram, verts: Collection[int]) -> int:
    vs = set(verts)
    return sum(1 for x in vs for y in d.neighbours(x) if y in vs) // 2


def match_lcomp(d: ZxDiagram, v: int, subset: Iterable[int] = ()) -> Optional[RewriteMatch]:
    s = _subset(subset)
    if v not in d:
        return None
    try:
        _check_subset(d, v, s)
    except NoMatchError:
        return None
    if not s:
        p = _concrete(d, v)
        if p is None or p.denominator != 2:
            return None
        nbrs = d.neighbours(v)
        n = len(nbrs)
        m = _edges_within(d, nbrs)
        return RewriteMatch("LComp", (v,), (s,), n * (n - 1) // 2 - 2 * m - n, -1)
    kept = [w for w in d.neighbours(v) if w not in s]
    n = len(kept) + 1
    m = _edges_within(d, kept)
    return RewriteMatch("LComp", (v,), (s,), 2 + n * (n - 1) // 2 - 2 * m - n, 1)


def match_pivot(
    d: ZxDiagram, u: int, v: int, su: Iterable[int] = (), sv: Iterable[int] = ()
) -> Optional[RewriteMatch]:
    su_t, sv_t = _subset(su), _subset(sv)
    if u not in d or v not in d or u == v or not d.connected(u, v):
        return None
    try:
        _check_subset(d, u, su_t, exclude=(v,))
        _check_subset(d, v, sv_t, exclude=(u,))
    except NoMatchError:
        return None
    for x, sx in ((u, su_t), (v, sv_t)):
        if not sx:
            p = _concrete(d, x)
            if p is None or p.denominator != 1:
                return None
    nu = set(d.neighbours(u)) - {v} - set(su_t)
    nv = set(d.neighbours(v)) - {u} - set(sv_t)
    a = nu & nv
    b = nu - nv
    c = nv - nu
    existing = 0
    for x in a:
        nx = d.neighbours(x)
        existing += sum(1 for y in b if y in nx) + sum(1 for y in c if y in nx)
    for x in b:
        nx = d.neighbours(x)
        existing += sum(1 for y in c if y in nx)
    extra_u = 1 if su_t else 0
    extra_v = 1 if sv_t else 0
    # virtual w1 spiders join B and C respectively
    nb = len(b) + extra_u
    nc = len(c) + extra_v
    na = len(a)
    de = (
        2 * (extra_u + extra_v)
        - ((len(nu) + extra_u) + (len(nv) + extra_v) + 1)
        + na * nb + na * nc + nb * nc
        - 2 * existing
    )
    dv = 2 * (extra_u + extra_v) - 2
    if u > v:
        u, v, su_t, sv_t = v, u, sv_t, su_t
    return RewriteMatch("Pivot", (u, v), (su_t, sv_t), de, dv)


# public rules -----------------------------------------------------------------------

def id_fuse(d: ZxDiagram, v: int) -> ZxDiagram:
    """Remove a phase-0 degree-2 internal spider and fuse its two neighbours."""
    if match_id_fuse(d, v) is None:
        raise NoMatchError(f"identity fusion does not apply at {v}")
    out = d.copy()
    _id_fuse(out, v)
    return out


def local_comp(d: ZxDiagram, v: int, subset: Iterable[int] = ()) -> ZxDiagram:
    """Local complementation at ``v``, after unfusing ``subset`` if it is non-empty.

    The unfusion leaves ``v`` with phase pi/2 and moves the remainder onto the new spider.
    """
    s = _subset(subset)
    if v not in d:
        raise NoMatchError(f"no spider {v}")
    _check_subset(d, v, s)
    if match_lcomp(d, v, s) is None:
        raise NoMatchError(f"residual phase at {v} is not +-pi/2")
    out = d.copy()
    if s:
        _unfuse(out, v, s, keep=HALF)
    _lcomp(out, v)
    return out


def pivot(d: ZxDiagram, u: int, v: int, su: Iterable[int] = (), sv: Iterable[int] = ()) -> ZxDiagram:
    """Pivot along the edge ``u--v``, after unfusing ``su`` from ``u`` and ``sv`` from ``v``.

    Unfusion leaves the pivot vertex with phase 0 and moves its phase onto the new spider.
    """
    su_t, sv_t = _subset(su), _subset(sv)
    if u not in d or v not in d or not d.connected(u, v):
        raise NoMatchError(f"{u} and {v} are not adjacent")
    _check_subset(d, u, su_t, exclude=(v,))
    _check_subset(d, v, sv_t, exclude=(u,))
    if match_pivot(d, u, v, su_t, sv_t) is None:
        raise NoMatchError(f"residual phases at {u}, {v} are not Pauli")
    out = d.copy()
    if su_t:
        _unfuse(out, u, su_t, keep=Fraction(0))
    if sv_t:
        _unfuse(out, v, sv_t, keep=Fraction(0))
    _pivot(out, u, v)
    return out


def neighbour_unfuse(
    d: ZxDiagram, v: int, subset: Iterable[int], keep: Optional[Fraction] = None
) -> ZxDiagram:
    """Insert ``v --H-- w1 --H-- w2`` and re-attach ``subset`` (and possibly the boundary) to ``w2``.

    By default ``v`` keeps its phase. Passing ``keep`` leaves ``v`` with that phase and
    gives ``w2`` the difference.
    """
    s = _subset(subset)
    if v not in d:
        raise NoMatchError(f"no spider {v}")
    for x in s:
        if x == BOUNDARY:
            if not d.is_boundary(v):
                raise NoMatchError(f"spider {v} has no boundary wire")
        elif x not in d.neighbours(v):
            raise NoMatchError(f"{x} is not a neighbour of {v}")
    out = d.copy()
    _unfuse(out, v, s, keep=None if keep is None else Fraction(keep))
    return out


# phase gadgets ----------------------------------------------------------------------

def gadget_top(d: ZxDiagram, base: int) -> Optional[int]:
    """The top spider if ``base`` is the Pauli-phase base of a phase gadget, else ``None``."""
    if base not in d or d.is_boundary(base):
        return None
    p = d.phase(base)
    if p.is_symbolic or p.clifford.denominator != 1:
        return None
    tops = [t for t in d.neighbours(base) if d.degree(t) == 1 and not d.is_boundary(t)]
    if len(tops) != 1:
        return None
    return tops[0]


def gadget_legs(d: ZxDiagram, base: int) -> Set[int]:
    t = gadget_top(d, base)
    if t is None:
        raise NoMatchError(f"{base} is not a gadget base")
    return set(d.neighbours(base)) - {t}


def gadget_fuse(d: ZxDiagram, g1: int, g2: int) -> ZxDiagram:
    """Merge the gadget at base ``g2`` into the one at base ``g1`` (same legs, phase-0 bases)."""
    t1, t2 = gadget_top(d, g1), gadget_top(d, g2)
    if t1 is None or t2 is None or g1 == g2:
        raise NoMatchError("both vertices must be distinct gadget bases")
    if not d.phase(g1).is_zero() or not d.phase(g2).is_zero():
        raise NoMatchError("gadget bases must have phase 0")
    if gadget_legs(d, g1) != gadget_legs(d, g2):
        raise NoMatchError("gadgets act on different legs")
    out = d.copy()
    out.add_to_phase(t1, out.phase(t2))
    out.remove_spider(t2)
    out.remove_spider(g2)
    return out


def gadget_delete(d: ZxDiagram, g: int) -> ZxDiagram:
    """Remove or normalise the gadget at base ``g``.

    A single-leg gadget fuses into its leg. A gadget with a Pauli top is removed and its
    phase copied onto every leg. A base with phase pi is reset to 0 by negating the top.
    """
    t = gadget_top(d, g)
    if t is None:
        raise NoMatchError(f"{g} is not a gadget base")
    legs = sorted(gadget_legs(d, g))
    base_pi = d.phase(g).clifford == 1
    top = d.phase(t)
    out = d.copy()
    if len(legs) == 1 or top.is_pauli():
        contribution = -top if base_pi else top
        for leg in legs:
            out.add_to_phase(leg, contribution)
        out.remove_spider(t)
        out.remove_spider(g)
        return out
    if base_pi:
        out.set_phase(g, 0)
        out.set_phase(t, -top)
        return out
    raise NoMatchError(f"gadget at {g} has several legs, a phase-0 base and a non-Pauli top")


def apply_match(d: ZxDiagram, m: RewriteMatch) -> ZxDiagram:
    """Apply a match returned by one of the ``match_*`` helpers to a copy of ``d``."""
    if m.kind == "IdFuse":
        return id_fuse(d, m.vertices[0])
    if m.kind == "LComp":
        return local_comp(d, m.vertices[0], m.unfuse[0] if m.unfuse else ())
    if m.kind == "Pivot":
        su, sv = m.unfuse if m.unfuse else ((), ())
        return pivot(d, m.vertices[0], m.vertices[1], su, sv)
    if m.kind == "NeighbourUnfuse":
        return neighbour_unfuse(d, m.vertices[0], m.unfuse[0])
    if m.kind == "GadgetFuse":
        return gadget_fuse(d, *m.vertices)
    if m.kind == "GadgetDelete":
        return gadget_delete(d, m.vertices[0])
    raise ValueError(f"unknown match kind {m.kind!r}")


def apply_in_place(d: ZxDiagram, m: RewriteMatch) -> None:
    """Apply an optimiser match directly to ``d`` (no validation beyond the match itself)."""
    if m.kind == "IdFuse":
        _id_fuse(d, m.vertices[0])
    elif m.kind == "LComp":
        s = m.unfuse[0]
        v = m.vertices[0]
        if s:
            _unfuse(d, v, s, keep=HALF)
        _lcomp(d, v)
    elif m.kind == "Pivot":
        u, v = m.vertices
        su, sv = m.unfuse
        if su:
            _unfuse(d, u, su, keep=Fraction(0))
        if sv:
            _unfuse(d, v, sv, keep=Fraction(0))
        _pivot(d, u, v)
    else:
        d2 = apply_match(d, m)
        d.__init__()
        for slot in ZxDiagram.__slots__:
            setattr(d, slot, getattr(d2, slot))
