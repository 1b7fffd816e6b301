"""Circuits over {H, X, Z, S, Sdg, T, Tdg, Rz, CNOT, CZ}."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

__all__ = ["Circuit", "Gate", "CircuitError", "DIAGONAL_PHASES", "phase_gate"]

# Phase (units of pi) of each named single-qubit diagonal gate.
DIAGONAL_PHASES = {
    "Z": Fraction(1),
    "S": Fraction(1, 2),
    "Sdg": Fraction(3, 2),
    "T": Fraction(1, 4),
    "Tdg": Fraction(7, 4),
}

ONE_QUBIT = {"H", "X", "Z", "S", "Sdg", "T", "Tdg", "Rz"}
TWO_QUBIT = {"CNOT", "CZ"}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: Tuple[int, ...]
    phase: Optional[Fraction] = None  # Rz only, units of pi, in [0, 2)

    def __post_init__(self) -> None:
        if self.kind in ONE_QUBIT:
            arity = 1
        elif self.kind in TWO_QUBIT:
            arity = 2
        else:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != arity:
            raise CircuitError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"{self.kind} needs distinct qubits, got {self.qubits}")
        if self.kind == "Rz":
            if self.phase is None:
                raise CircuitError("Rz needs a phase")
            object.__setattr__(self, "phase", Fraction(self.phase) % 2)
        elif self.phase is not None:
            raise CircuitError(f"{self.kind} takes no phase")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT

    def diagonal_phase(self) -> Optional[Fraction]:
        """Phase of a diagonal single-qubit gate, ``None`` for H, X and two-qubit gates."""
        if self.kind == "Rz":
            return self.phase
        return DIAGONAL_PHASES.get(self.kind)

    def __str__(self) -> str:
        args = ",".join(str(q) for q in self.qubits)
        if self.kind == "Rz":
            return f"Rz({self.phase})({args})"
        return f"{self.kind}({args})"


def phase_gate(q: int, phase: Fraction) -> Optional[Gate]:
    """The named gate for a diagonal phase on ``q``, or ``None`` for phase 0."""
    phase = Fraction(phase) % 2
    if phase == 0:
        return None
    for name, p in DIAGONAL_PHASES.items():
        if p == phase:
            return Gate(name, (q,))
    return Gate("Rz", (q,), phase)


@dataclass
class Circuit:
    n_qubits: int
    gates: List[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.n_qubits < 0:
            raise CircuitError("negative qubit count")
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        for q in g.qubits:
            if not 0 <= q < self.n_qubits:
                raise CircuitError(f"qubit {q} out of range for {self.n_qubits} qubits")

    def add(self, kind: str, *qubits: int, phase: Optional[Fraction] = None) -> "Circuit":
        g = Gate(kind, tuple(qubits), phase)
        self._check(g)
        self.gates.append(g)
        return self

    def append(self, g: Gate) -> None:
        self._check(g)
        self.gates.append(g)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def copy(self) -> "Circuit":
        return Circuit(self.n_qubits, list(self.gates))

    def __len__(self) -> int:
        return len(self.gates)

    def twoq_count(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)

    def t_count(self) -> int:
        n = 0
        for g in self.gates:
            p = g.diagonal_phase()
            if p is not None and p.denominator > 2:
                n += 1
        return n

    def stats(self) -> Tuple[int, int, int]:
        """``(2Q-count, T-count, total gates)``."""
        return self.twoq_count(), self.t_count(), len(self.gates)
