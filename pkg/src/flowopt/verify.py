"""Dense ground truth for small instances: circuit unitaries and ZX-diagram tensors.

This is the only module that uses floating point. Diagram tensors are evaluated by
variable elimination on a factor graph with one binary variable per spider.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from .circuit import Circuit
from .convert import RawDiagram
from .zx import ZxDiagram

__all__ = [
    "MAX_QUBITS",
    "OracleError",
    "circuit_unitary",
    "diagram_tensor",
    "equal_up_to_global_phase",
    "equivalent",
]

MAX_QUBITS = 12

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_DELTA = np.eye(2, dtype=complex)
_HF = np.array([[1, 1], [1, -1]], dtype=complex)  # unnormalised Hadamard factor


class OracleError(ValueError):
    pass


def _phase(p: Fraction) -> complex:
    return complex(np.exp(1j * math.pi * float(p)))


def _apply_1q(state: np.ndarray, m: np.ndarray, q: int) -> np.ndarray:
    state = np.tensordot(m, state, axes=([1], [q]))
    return np.moveaxis(state, 0, q)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """The ``2^n x 2^n`` unitary of ``c``; qubit 0 is the most significant bit."""
    n = c.n_qubits
    if n > MAX_QUBITS:
        raise OracleError(f"{n} qubits exceeds the oracle cap of {MAX_QUBITS}")
    dim = 2**n
    state = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for g in c.gates:
        if g.kind == "H":
            state = _apply_1q(state, _H, g.qubits[0])
        elif g.kind == "X":
            state = _apply_1q(state, _X, g.qubits[0])
        elif g.kind in ("CNOT", "CZ"):
            a, b = g.qubits
            idx_a: List = [slice(None)] * (n + 1)
            idx_a[a] = 1
            sub = state[tuple(idx_a)]
            tgt = b if b < a else b - 1
            if g.kind == "CNOT":
                sub = np.flip(sub, axis=tgt)
            else:
                idx_b: List = [slice(None)] * n
                idx_b[tgt] = 1
                sub = sub.copy()
                sub[tuple(idx_b)] *= -1
            state = state.copy()
            state[tuple(idx_a)] = sub
        else:
            p = g.diagonal_phase()
            idx: List = [slice(None)] * (n + 1)
            idx[g.qubits[0]] = 1
            state = state.copy()
            state[tuple(idx)] *= _phase(p)
    return state.reshape(dim, dim)


# factor graph contraction -----------------------------------------------------------

Factor = Tuple[Tuple[int, ...], np.ndarray]


def _eliminate(factors: List[Factor], keep: Sequence[int]) -> np.ndarray:
    """Sum out every variable not in ``keep`` and return the tensor ordered by ``keep``."""
    keep_set = set(keep)
    by_var: Dict[int, List[int]] = {}
    live: Dict[int, Factor] = {}
    for i, f in enumerate(factors):
        live[i] = f
        for x in f[0]:
            by_var.setdefault(x, []).append(i)
    for x in keep:
        by_var.setdefault(x, [])
    next_id = len(factors)
    elim = [x for x in by_var if x not in keep_set]
    pending = set(elim)

    def scope_size(x: int) -> int:
        s = set()
        for i in by_var[x]:
            s.update(live[i][0])
        return len(s)

    while pending:
        x = min(pending, key=lambda y: (scope_size(y), y))
        pending.remove(x)
        idxs = by_var.pop(x)
        scope: List[int] = []
        for i in idxs:
            for y in live[i][0]:
                if y not in scope:
                    scope.append(y)
        out_vars = [y for y in scope if y != x]
        if len(scope) > 52:
            raise OracleError("contraction too wide for the dense oracle")
        label = {y: k for k, y in enumerate(scope)}
        args: list = []
        for i in idxs:
            vs, arr = live.pop(i)
            args += [arr, [label[y] for y in vs]]
            for y in vs:
                if y != x:
                    by_var[y].remove(i)
        if not idxs:
            # an isolated variable contributes a factor of 2
            arr = np.array(2.0 + 0j)
        else:
            arr = np.einsum(*args, [label[y] for y in out_vars], optimize=True)
        live[next_id] = (tuple(out_vars), arr)
        for y in out_vars:
            by_var[y].append(next_id)
        next_id += 1
    # multiply what is left and order by keep
    label = {y: k for k, y in enumerate(keep)}
    args = []
    for vs, arr in live.values():
        args += [arr, [label[y] for y in vs]]
    if len(keep) > 52:
        raise OracleError("too many open wires for the dense oracle")
    return np.einsum(*args, list(range(len(keep))), optimize=True) if args else np.ones(())


def _normalise(t: np.ndarray, n: int) -> np.ndarray:
    dim = 2**n
    m = t.reshape(dim, dim)
    norm = np.linalg.norm(m)
    if norm < 1e-12:
        return m
    return m * (math.sqrt(dim) / norm)


def diagram_tensor(d: Union[ZxDiagram, RawDiagram]) -> np.ndarray:
    """The linear map of ``d`` as a ``2^n x 2^n`` matrix (outputs as rows).

    Scalars are not tracked, so the result is rescaled to the Frobenius norm of a unitary.
    """
    if isinstance(d, RawDiagram):
        return _raw_tensor(d)
    n = len(d.inputs)
    if n != len(d.outputs):
        raise OracleError("diagram has different numbers of inputs and outputs")
    if n > MAX_QUBITS:
        raise OracleError(f"{n} qubits exceeds the oracle cap of {MAX_QUBITS}")
    factors: List[Factor] = []
    for v, p in d.phases().items():
        factors.append(((v,), np.array([1, _phase(p.value)])))
    for u, w in d.edges():
        factors.append(((u, w), _HF))
    base = d.next_id
    outs = [base + j for j in range(n)]
    ins = [base + n + i for i in range(n)]
    for i, (s, h) in enumerate(zip(d.inputs, d.input_had)):
        factors.append(((ins[i], s), _HF if h else _DELTA))
    for j, (s, h) in enumerate(zip(d.outputs, d.output_had)):
        factors.append(((outs[j], s), _HF if h else _DELTA))
    return _normalise(_eliminate(factors, outs + ins), n)


def _raw_tensor(d: RawDiagram) -> np.ndarray:
    n = len(d.inputs)
    if n != len(d.outputs) or n > MAX_QUBITS:
        raise OracleError("unsupported raw diagram shape")
    factors: List[Factor] = []
    for v, k in d.kinds.items():
        if k != "B":
            factors.append(((v,), np.array([1, _phase(d.phases[v])])))
    for u, v, h in d.edges:
        had = h ^ (d.kinds[u] == "X") ^ (d.kinds[v] == "X")
        if u == v:
            diag = np.diag(_HF if had else _DELTA)
            factors.append(((u,), diag.astype(complex)))
        else:
            factors.append(((u, v), _HF if had else _DELTA))
    keep = list(d.outputs) + list(d.inputs)
    return _normalise(_eliminate(factors, keep), n)


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    """True iff ``a = c b`` for a unit complex ``c``, within ``tol`` in the max norm."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return True
    k = int(np.argmax(np.abs(b)))
    bk = b.flat[k]
    if abs(bk) < tol:
        return bool(np.max(np.abs(a)) <= tol)
    c = a.flat[k] / bk
    if abs(abs(c) - 1) > tol:
        return False
    return bool(np.max(np.abs(a - c * b)) <= tol)


def equivalent(x, y, tol: float = 1e-8) -> bool:
    """Compare any two of Circuit, ZxDiagram or RawDiagram up to global phase."""

    def mat(z):
        return circuit_unitary(z) if isinstance(z, Circuit) else diagram_tensor(z)

    return equal_up_to_global_phase(mat(x), mat(y), tol)
