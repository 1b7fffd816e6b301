import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowopt.circuit import Circuit
from flowopt.flow import (
    FlowError,
    cflow_with_gadgets,
    check_local_preservation,
    edge_bound_ok,
    find_cflow,
    influencing_digraph,
    open_subgraph,
    transformation_vertex_set,
    verify_cflow,
)
from flowopt.rewrites import apply_match, id_fuse, match_id_fuse, match_lcomp, match_pivot, neighbour_unfuse
from flowopt.zx import OpenGraph, underlying_open_graph

from _util import brute_force_cflow, graph_like, rand_circuit, random_open_graph


def _flow_satisfies_definition(g, f):
    """Check the causal-flow definition against the depth labels of ``f``."""
    succ, depth = f.successor, f.depth
    for u, fu in succ.items():
        if fu not in g.neighbours(u) or not depth[u] > depth[fu]:
            return False
        if any(v != u and not depth[u] > depth[v] for v in g.neighbours(fu)):
            return False
    return True


def test_identity_flow():
    d = graph_like(Circuit(3))
    f = find_cflow(d)
    assert f.successor == dict(zip(d.inputs, d.outputs))
    assert sorted(set(f.depth.values())) == [0, 1]
    assert verify_cflow(d, f)


def test_shared_successor_has_no_flow():
    a, b, c = 0, 1, 2
    g = OpenGraph.from_edges([a, b, c], [(a, c), (b, c)], [a], [c])
    assert find_cflow(g) is None
    assert brute_force_cflow(g) is None


def test_unbalanced_io_unsupported():
    g = OpenGraph.from_edges([0, 1, 2], [(0, 1), (1, 2)], [0], [1, 2])
    with pytest.raises(FlowError):
        find_cflow(g)


@settings(max_examples=40)
@given(st.integers(0, 2**32))
def test_circuit_diagrams_have_flow(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    pool = ("H", "S", "CNOT", "CZ", "X") if n > 1 else ("H", "S", "X")
    d = graph_like(rand_circuit(rng, n, rng.randint(0, 80), 0.2, pool=pool))
    f = find_cflow(d)
    assert f is not None
    assert verify_cflow(d, f)
    assert _flow_satisfies_definition(d, f)


@settings(max_examples=300)
@given(st.integers(0, 2**32))
def test_find_cflow_agrees_with_brute_force(seed):
    g = random_open_graph(random.Random(seed))
    f = find_cflow(g)
    assert (f is None) == (brute_force_cflow(g) is None)
    if f is not None:
        assert verify_cflow(g, f) and _flow_satisfies_definition(g, f)


def test_verify_rejects_two_cycle():
    # a -> c forces a before N(c) = {a, b}; b -> d forces b before N(d) = {a, b}
    a, b, c, d = range(4)
    g = OpenGraph.from_edges(range(4), [(a, c), (b, d), (a, d), (b, c)], [a, b], [c, d])
    f = {a: c, b: d}
    dig = influencing_digraph(g, f)
    assert (a, b) in dig.arc_set() and (b, a) in dig.arc_set()
    assert not verify_cflow(g, f)
    assert brute_force_cflow(g) is None


def test_verify_rejects_non_injective():
    g = OpenGraph.from_edges(range(3), [(0, 2), (1, 2)], [0, 1], [2, 1])
    assert not verify_cflow(g, {0: 2, 1: 2})


def test_influencing_digraph_examples():
    d = graph_like(Circuit(2))
    f = find_cflow(d)
    assert influencing_digraph(d, f).arc_set() == set(zip(d.inputs, d.outputs))
    d.add_edge(d.inputs[0], d.outputs[1])
    arcs = influencing_digraph(d, f).arc_set()
    assert (d.inputs[1], d.inputs[0]) in arcs
    empty = OpenGraph.from_edges([], [], [], [])
    assert influencing_digraph(empty, {}).arc_set() == set()


def test_edge_bound_examples():
    assert edge_bound_ok(4, 2, 5)
    assert not edge_bound_ok(3, 1, 3)
    assert edge_bound_ok(5, 5, 0)


@settings(max_examples=100)
@given(st.integers(0, 2**32))
def test_edge_bound_holds_for_flow_graphs(seed):
    g = random_open_graph(random.Random(seed))
    if find_cflow(g) is not None:
        assert edge_bound_ok(g.num_vertices(), len(g.inputs), g.num_edges())


@settings(max_examples=60)
@given(st.integers(0, 2**32))
def test_open_subgraphs_inherit_flow(seed):
    rng = random.Random(seed)
    d = graph_like(rand_circuit(rng, rng.randint(2, 4), rng.randint(5, 40), 0.2))
    f = find_cflow(d)
    verts = sorted(d.vertices())
    s = set(rng.sample(verts, rng.randint(1, len(verts))))
    sub = open_subgraph(d, f, s)
    restricted = {u: fu for u, fu in f.successor.items() if u in s and fu in s}
    assert verify_cflow(sub, restricted)


# gadgets ---------------------------------------------------------------------------


def _cnot_graph():
    c = Circuit(2)
    c.add("CNOT", 0, 1)
    return underlying_open_graph(graph_like(c))


def test_gadget_flow_without_gadgets_matches_plain():
    g = _cnot_graph()
    assert cflow_with_gadgets(g, {}).successor == find_cflow(g).successor


def test_gadget_flow_with_one_gadget():
    g = _cnot_graph()
    inner = [v for v in g.vertices() if v not in g.inputs and v not in g.outputs]
    legs = inner or [g.inputs[0], g.inputs[1]]
    u = max(g.vertices()) + 1
    adj = {v: set(g.neighbours(v)) for v in g.vertices()}
    adj[u] = set(legs[:2])
    for leg in legs[:2]:
        adj[leg].add(u)
    lg = OpenGraph({v: frozenset(ns) for v, ns in adj.items()}, g.inputs, g.outputs)
    f = cflow_with_gadgets(lg, {u: "YZ"})
    assert f is not None and f.successor[u] == u
    depth = f.depth
    for v in lg.neighbours(u):
        assert depth[u] > depth[v]
    for x, fx in f.successor.items():
        if fx == x:
            continue
        assert fx in lg.neighbours(x) and depth[x] > depth[fx]
        assert all(depth[x] > depth[v] for v in lg.neighbours(fx) if v != x)


def test_gadget_flow_rejects_xz():
    g = _cnot_graph()
    with pytest.raises(FlowError):
        cflow_with_gadgets(g, {next(iter(g.vertices())): "XZ"})


# local preservation ----------------------------------------------------------------


def test_local_check_accepts_identity_fusion():
    c = Circuit(2)
    for g in ("CNOT", "H", "T", "H", "CNOT"):
        c.add(g, *((0, 1) if g == "CNOT" else (0,)))
    d = graph_like(c)
    v = next(v for v in d.vertices() if not d.is_boundary(v))
    d2 = neighbour_unfuse(d, v, (min(d.neighbours(v)),))
    f2 = find_cflow(d2)
    w1 = next(x for x in d2.vertices() if x not in d and d2.degree(x) == 2)
    assert match_id_fuse(d2, w1) is not None
    d3 = id_fuse(d2, w1)
    verdict = check_local_preservation(d2, d3, f2)
    assert verdict.preserved and verify_cflow(d3, verdict.flow)


def test_local_check_rejects_crossing():
    a, b, c, d = range(4)
    g = OpenGraph.from_edges(range(4), [(a, c), (b, d)], [a, b], [c, d])
    g2 = OpenGraph.from_edges(range(4), [(a, c), (b, d), (a, d), (b, c)], [a, b], [c, d])
    f = find_cflow(g)
    _, vt = transformation_vertex_set(g, g2)
    assert vt == {a, b, c, d}
    assert not check_local_preservation(g, g2, f).preserved


def _random_rewrite(d, rng):
    verts = sorted(d.vertices())
    for _ in range(20):
        v = rng.choice(verts)
        nb = sorted(d.neighbours(v))
        r = rng.random()
        if r < 0.4:
            m = match_lcomp(d, v, (-1,) if d.is_boundary(v) else rng.sample(nb, min(len(nb), rng.randint(0, 1))))
        elif r < 0.8 and nb:
            w = rng.choice(nb)
            su = (-1,) if d.is_boundary(v) else ()
            sw = (-1,) if d.is_boundary(w) else ()
            m = match_pivot(d, v, w, su + tuple(rng.sample([x for x in nb if x != w], min(1, len(nb) - 1))), sw)
        else:
            m = match_id_fuse(d, v)
        if m is not None:
            return apply_match(d, m)
    return None


def test_local_check_soundness_fuzz():
    rng = random.Random(2024)
    trials = preserved = 0
    while trials < 10_000:
        d = graph_like(rand_circuit(rng, rng.randint(2, 4), rng.randint(4, 30), 0.2))
        f = find_cflow(d)
        for _ in range(5):
            d2 = _random_rewrite(d, rng)
            if d2 is None:
                break
            trials += 1
            verdict = check_local_preservation(d, d2, f)
            assert verdict.reason != "stitched flow is cyclic"
            if verdict.preserved:
                preserved += 1
                assert verify_cflow(d2, verdict.flow)
                assert find_cflow(d2) is not None
            f2 = find_cflow(d2)
            if f2 is None:
                break
            d, f = d2, f2
    assert preserved > 100
