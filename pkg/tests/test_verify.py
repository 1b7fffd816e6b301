import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from flowopt.circuit import Circuit
from flowopt.verify import MAX_QUBITS, OracleError, circuit_unitary, diagram_tensor, equal_up_to_global_phase
from flowopt.zx import ZxDiagram

from _util import graph_like

H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
X = np.array([[0, 1], [1, 0]])
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def _c(n, *gates):
    c = Circuit(n)
    for g in gates:
        c.add(g[0], *g[1:])
    return c


def test_hadamard_matrix():
    assert np.allclose(circuit_unitary(_c(1, ("H", 0))), H)


def test_cnot_matrix_control_is_most_significant():
    assert np.allclose(circuit_unitary(_c(2, ("CNOT", 0, 1))), CNOT)


def test_tt_equals_s():
    assert equal_up_to_global_phase(circuit_unitary(_c(1, ("T", 0), ("T", 0))), circuit_unitary(_c(1, ("S", 0))))


def test_unitarity():
    u = circuit_unitary(_c(3, ("H", 0), ("CNOT", 0, 2), ("T", 1), ("CZ", 1, 2), ("S", 2)))
    assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-9)


def test_size_cap():
    with pytest.raises(OracleError):
        circuit_unitary(Circuit(MAX_QUBITS + 1))


def test_identity_diagram():
    assert equal_up_to_global_phase(diagram_tensor(graph_like(Circuit(2))), np.eye(4))


def test_cnot_diagram():
    assert equal_up_to_global_phase(diagram_tensor(graph_like(_c(2, ("CNOT", 0, 1)))), CNOT)


def test_single_spider_is_phase_gate():
    d = ZxDiagram()
    v = d.add_spider(Fraction(1, 3))
    d.add_input(v)
    d.add_output(v)
    expect = np.diag([1, cmath.exp(1j * math.pi / 3)])
    assert equal_up_to_global_phase(diagram_tensor(d), expect)


def test_symbolic_phase_rejected():
    from flowopt.phase import PhaseExpr

    d = ZxDiagram()
    v = d.add_spider(PhaseExpr.variable(0))
    d.add_input(v)
    d.add_output(v)
    with pytest.raises(ValueError):
        diagram_tensor(d)


def test_global_phase_comparison():
    a = circuit_unitary(_c(2, ("H", 0), ("CNOT", 0, 1), ("T", 1)))
    assert equal_up_to_global_phase(a, cmath.exp(1j * math.pi / 7) * a)
    assert not equal_up_to_global_phase(H, X)
    hczh = circuit_unitary(_c(2, ("H", 1), ("CZ", 0, 1), ("H", 1)))
    assert equal_up_to_global_phase(hczh, CNOT)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        equal_up_to_global_phase(np.eye(2), np.eye(4))


def test_scaled_matrix_is_not_equal():
    assert not equal_up_to_global_phase(2 * H, H)
