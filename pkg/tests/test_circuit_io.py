import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowopt.basic_opt import basic_optimize
from flowopt.circuit import Circuit, CircuitError, Gate
from flowopt.convert import circuit_to_diagram, to_graph_like
from flowopt.extract import ExtractionError, extract_circuit
from flowopt.flow import find_cflow
from flowopt.qasm import QasmError, emit_qasm, load_circuit, parse_qasm, parse_qc
from flowopt.verify import circuit_unitary, diagram_tensor, equal_up_to_global_phase, equivalent
from flowopt.zx import count_2q, is_graph_like

from _util import graph_like, rand_circuit

TOFFOLI = np.eye(8, dtype=complex)
TOFFOLI[[6, 7]] = TOFFOLI[[7, 6]]


# parsing ---------------------------------------------------------------------------


def test_parse_cnot():
    c = parse_qasm("qreg q[2]; cx q[0],q[1];")
    assert c.n_qubits == 2 and c.gates == [Gate("CNOT", (0, 1))]


def test_parse_two_t():
    c = parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\nt q[0]; t q[0];")
    assert [g.kind for g in c.gates] == ["T", "T"] and c.t_count() == 2


def test_ccx_expansion_is_toffoli():
    c = parse_qasm("qreg q[3]; ccx q[0],q[1],q[2];")
    kinds = [g.kind for g in c.gates]
    assert kinds.count("CNOT") == 6 and kinds.count("H") == 2
    assert kinds.count("T") + kinds.count("Tdg") == 7
    assert equal_up_to_global_phase(circuit_unitary(c), TOFFOLI)


def test_ccz_expansion():
    c = parse_qasm("qreg q[3]; ccz q[0],q[1],q[2];")
    assert equal_up_to_global_phase(circuit_unitary(c), np.diag([1, 1, 1, 1, 1, 1, 1, -1]).astype(complex))


def test_rz_exact_and_inexact():
    c = parse_qasm("qreg q[1]; rz(3*pi/4) q[0]; rz(-pi/8) q[0];")
    assert [g.phase for g in c.gates] == [Fraction(3, 4), Fraction(15, 8)]
    with pytest.raises(QasmError):
        parse_qasm("qreg q[1]; rz(0.3) q[0];")


@pytest.mark.parametrize(
    "text, line",
    [
        ("qreg q[2];\nfoo q[0];", 2),
        ("qreg q[2];\ncx q[0],q[5];", 2),
        ("OPENQASM 3.0;\nqreg q[1];", 1),
        ("qreg q[1];\nmeasure q[0] -> c[0];", 2),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(QasmError) as e:
        parse_qasm(text)
    assert e.value.line == line


def test_comments_creg_barrier_ignored():
    c = parse_qasm("// hi\nqreg q[2];\ncreg c[2];\nbarrier q;\nh q[1]; // tail\n")
    assert c.gates == [Gate("H", (1,))]


def test_emit_examples():
    c = Circuit(1)
    c.add("H", 0)
    assert "h q[0];" in emit_qasm(c).splitlines()
    empty = emit_qasm(Circuit(0)).splitlines()
    assert empty == ["OPENQASM 2.0;", 'include "qelib1.inc";']


@settings(max_examples=60)
@given(st.integers(0, 2**32), st.integers(1, 5), st.integers(0, 60))
def test_emit_parse_round_trip(seed, n, g):
    rng = random.Random(seed)
    n = max(n, 2)
    c = rand_circuit(rng, n, g, 0.2, pool=("H", "S", "X", "Z", "CNOT", "CZ", "Rz", "Tdg"))
    assert parse_qasm(emit_qasm(c)).gates == c.gates


def test_qc_reader():
    text = ".v a b c\n.i a b c\nBEGIN\nH a\ncnot a b\ntof a b c\nT* c\nEND\n"
    c = parse_qc(text)
    assert c.n_qubits == 3 and c.twoq_count() == 1 + 6 and c.t_count() == 8


def test_load_circuit_by_suffix(tmp_path):
    p = tmp_path / "x.qasm"
    p.write_text("qreg q[2]; cz q[0],q[1];")
    assert load_circuit(p).gates == [Gate("CZ", (0, 1))]


def test_gate_validation():
    with pytest.raises(CircuitError):
        Circuit(2).add("CNOT", 1, 1)
    with pytest.raises(CircuitError):
        Circuit(2).add("H", 3)


# conversion ------------------------------------------------------------------------


def test_cnot_raw_diagram():
    c = Circuit(2)
    c.add("CNOT", 0, 1)
    raw = circuit_to_diagram(c)
    spiders = [v for v, k in raw.kinds.items() if k != "B"]
    assert sorted(raw.kinds[v] for v in spiders) == ["X", "Z"]
    assert any({u, v} == set(spiders) for u, v, _ in raw.edges)
    assert equivalent(raw, c)


def test_identity_is_bare_wires():
    raw = circuit_to_diagram(Circuit(2))
    assert [k for k in raw.kinds.values()] == ["B"] * 4
    d = to_graph_like(raw)
    assert (d.num_vertices(), d.num_edges()) == (4, 2)


def test_t_gate_spider():
    c = Circuit(1)
    c.add("T", 0)
    raw = circuit_to_diagram(c)
    (z,) = [v for v, k in raw.kinds.items() if k == "Z"]
    assert raw.phases[z] == Fraction(1, 4)
    assert sum(1 for e in raw.edges if z in e[:2]) == 2


def test_graph_like_cnot_structure():
    c = Circuit(2)
    c.add("CNOT", 0, 1)
    d = graph_like(c)
    assert is_graph_like(d)
    assert (d.num_vertices(), d.num_edges(), len(d.inputs)) == (4, 3, 2)
    assert equivalent(d, c)


def test_h_circuit_round_trip():
    c = Circuit(1)
    c.add("H", 0)
    d = graph_like(c)
    assert d.num_vertices() == 2
    out = basic_optimize(extract_circuit(d))
    assert out.gates == [Gate("H", (0,))]


@settings(max_examples=40)
@given(st.integers(0, 2**32))
def test_graph_like_preserves_tensor(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    pool = ("H", "S", "X", "Z", "CNOT", "CZ", "Rz") if n > 1 else ("H", "S", "X", "Z", "Rz")
    c = rand_circuit(rng, n, rng.randint(0, 25), 0.2, pool=pool)
    raw = circuit_to_diagram(c)
    d = to_graph_like(raw)
    assert is_graph_like(d)
    u = circuit_unitary(c)
    assert equal_up_to_global_phase(diagram_tensor(raw), u)
    assert equal_up_to_global_phase(diagram_tensor(d), u)


# extraction ------------------------------------------------------------------------


def test_extract_identity():
    out = extract_circuit(graph_like(Circuit(1)))
    assert basic_optimize(out).gates == []


def test_extract_cnot():
    c = Circuit(2)
    c.add("CNOT", 0, 1)
    out = extract_circuit(graph_like(c))
    assert sum(1 for g in out.gates if g.kind == "CZ") == 1 and out.twoq_count() == 1
    assert equivalent(out, c)


def test_extract_rejects_gadgets():
    c = Circuit(2)
    c.add("CNOT", 0, 1)
    d = graph_like(c)
    base = d.add_spider()
    top = d.add_spider(Fraction(1, 4))
    d.add_edge(base, top)
    d.add_edge(base, d.inputs[0])
    with pytest.raises(ExtractionError):
        extract_circuit(d)


@settings(max_examples=40)
@given(st.integers(0, 2**32))
def test_extraction_round_trip_and_2q_exactness(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    c = rand_circuit(rng, n, rng.randint(0, 60), 0.15, pool=("H", "S", "CNOT", "CZ", "X"))
    d = graph_like(c)
    f = find_cflow(d)
    assert f is not None
    out = extract_circuit(d, f)
    assert out.twoq_count() == count_2q(d)
    assert equivalent(out, c)


# peephole --------------------------------------------------------------------------


def _c(n, *gates):
    c = Circuit(n)
    for g in gates:
        c.add(g[0], *g[1:])
    return c


def test_basic_optimize_examples():
    assert basic_optimize(_c(1, ("H", 0), ("H", 0))).gates == []
    assert basic_optimize(_c(1, ("T", 0), ("T", 0))).gates == [Gate("S", (0,))]
    c = _c(2, ("CZ", 0, 1), ("Z", 0), ("CZ", 0, 1))
    out = basic_optimize(c)
    assert out.gates == [Gate("Z", (0,))]
    assert equivalent(out, c)


@settings(max_examples=60)
@given(st.integers(0, 2**32))
def test_basic_optimize_properties(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    c = rand_circuit(rng, n, rng.randint(0, 50), 0.2, pool=("H", "S", "X", "Z", "CNOT", "CZ", "Rz"))
    out = basic_optimize(c)
    assert out.twoq_count() <= c.twoq_count()
    assert out.t_count() <= c.t_count()
    assert basic_optimize(out).gates == out.gates
    assert equivalent(out, c)
