"""Peephole cancellation and commutation on circuits."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional

from .circuit import Circuit, Gate, phase_gate

__all__ = ["basic_optimize"]


def _commutes_past(g: Gate, h: Gate) -> bool:
    """True if ``g`` may be moved leftwards past the earlier gate ``h``."""
    gs, hs = set(g.qubits), set(h.qubits)
    if not gs & hs:
        return True
    gd, hd = g.diagonal_phase() is not None, h.diagonal_phase() is not None
    if gd or g.kind == "CZ":
        # diagonal in the Z basis on all its qubits
        if hd or h.kind == "CZ":
            return True
        if h.kind == "CNOT":
            return h.qubits[1] not in gs
        return False
    if g.kind == "X":
        return h.kind == "CNOT" and h.qubits[1] == g.qubits[0]
    if g.kind == "CNOT":
        c, t = g.qubits
        if hd:
            return h.qubits[0] == c
        if h.kind == "CZ":
            return t not in hs
        if h.kind == "CNOT":
            return h.qubits[0] == c or h.qubits[1] == t
        if h.kind == "X":
            return h.qubits[0] == t
        return False
    return False


def _merge(g: Gate, h: Gate) -> Optional[List[Gate]]:
    """Replacement for ``h ... g`` when they combine, else ``None``."""
    if g.qubits == h.qubits and g.kind == h.kind and g.kind in ("H", "X", "CNOT"):
        return []
    if g.kind == "CZ" and h.kind == "CZ" and set(g.qubits) == set(h.qubits):
        return []
    pg, ph = g.diagonal_phase(), h.diagonal_phase()
    if pg is not None and ph is not None and g.qubits == h.qubits:
        merged = phase_gate(g.qubits[0], pg + ph)
        return [] if merged is None else [merged]
    return None


def _cancel_pass(gates: List[Gate]) -> List[Gate]:
    out: List[Gate] = []
    for g in gates:
        j = len(out) - 1
        placed = False
        while j >= 0:
            h = out[j]
            m = _merge(g, h)
            if m is not None:
                out[j:j + 1] = m
                placed = True
                break
            if not _commutes_past(g, h):
                break
            j -= 1
        if not placed:
            out.append(g)
    return out


def _cnot_pass(gates: List[Gate]) -> List[Gate]:
    """Rewrite ``H(t) CZ(c,t) H(t)`` (adjacent on ``t``) as ``CNOT(c,t)``."""
    gates = list(gates)
    i = 0
    while i < len(gates):
        g = gates[i]
        if g.kind == "CZ":
            for t in g.qubits:
                c = g.qubits[0] if t == g.qubits[1] else g.qubits[1]
                prev = next((k for k in range(i - 1, -1, -1) if t in gates[k].qubits), None)
                nxt = next((k for k in range(i + 1, len(gates)) if t in gates[k].qubits), None)
                if (
                    prev is not None
                    and nxt is not None
                    and gates[prev].kind == "H"
                    and gates[nxt].kind == "H"
                ):
                    gates[i] = Gate("CNOT", (c, t))
                    del gates[nxt]
                    del gates[prev]
                    i -= 1
                    break
        i += 1
    return gates


def _canonical(g: Gate) -> Optional[Gate]:
    p = g.diagonal_phase()
    if p is None:
        return g
    return phase_gate(g.qubits[0], p)


def basic_optimize(c: Circuit) -> Circuit:
    """Cancel and merge gates to a fixed point.

    Removes ``H H``, ``X X``, repeated CZ/CNOT pairs, fuses diagonal phases (dropping
    zeros), commutes diagonal gates through CZ and CNOT controls, and turns
    Hadamard-conjugated CZs into CNOTs. Never increases 2Q- or T-count.
    """
    gates = [h for h in (_canonical(g) for g in c.gates) if h is not None]
    while True:
        new = _cnot_pass(_cancel_pass(gates))
        if new == gates:
            break
        gates = new
    return Circuit(c.n_qubits, gates)
