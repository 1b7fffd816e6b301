"""OpenQASM 2.0 subset reader and writer, plus a reader for the ``.qc`` benchmark format."""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Tuple

from .circuit import Circuit, CircuitError, Gate

__all__ = ["QasmError", "parse_qasm", "emit_qasm", "parse_qc", "load_circuit", "format_angle"]


class QasmError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _ccz_gates(a: int, b: int, c: int) -> List[Gate]:
    """Seven-T realisation of CCZ on ``a, b, c``."""
    return [
        Gate("CNOT", (b, c)),
        Gate("Tdg", (c,)),
        Gate("CNOT", (a, c)),
        Gate("T", (c,)),
        Gate("CNOT", (b, c)),
        Gate("Tdg", (c,)),
        Gate("CNOT", (a, c)),
        Gate("T", (b,)),
        Gate("T", (c,)),
        Gate("CNOT", (a, b)),
        Gate("T", (a,)),
        Gate("Tdg", (b,)),
        Gate("CNOT", (a, b)),
    ]


def ccx_gates(a: int, b: int, t: int) -> List[Gate]:
    return [Gate("H", (t,))] + _ccz_gates(a, b, t) + [Gate("H", (t,))]


def ccz_gates(a: int, b: int, c: int) -> List[Gate]:
    return _ccz_gates(a, b, c)


# angle expressions ------------------------------------------------------------------

def _eval_angle(node: ast.AST) -> Tuple[Fraction, Fraction]:
    """Evaluate to ``(coefficient of pi, constant)``."""
    if isinstance(node, ast.Expression):
        return _eval_angle(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return Fraction(0), Fraction(repr(node.value)) if isinstance(node.value, float) else Fraction(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return Fraction(1), Fraction(0)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        p, c = _eval_angle(node.operand)
        return (-p, -c) if isinstance(node.op, ast.USub) else (p, c)
    if isinstance(node, ast.BinOp):
        lp, lc = _eval_angle(node.left)
        rp, rc = _eval_angle(node.right)
        if isinstance(node.op, ast.Add):
            return lp + rp, lc + rc
        if isinstance(node.op, ast.Sub):
            return lp - rp, lc - rc
        if isinstance(node.op, ast.Mult):
            if lp and rp:
                raise ValueError("pi squared")
            if lp:
                return lp * rc, lc * rc
            return rp * lc, rc * lc
        if isinstance(node.op, ast.Div):
            if rp or rc == 0:
                raise ValueError("division by pi or zero")
            return lp / rc, lc / rc
    raise ValueError("unsupported expression")


def parse_angle(text: str) -> Fraction:
    """Parse an angle expression as an exact rational multiple of pi (result in units of pi)."""
    try:
        p, c = _eval_angle(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError) as exc:
        raise ValueError(f"cannot parse angle {text!r}: {exc}") from None
    if c != 0:
        raise ValueError(f"angle {text!r} is not an exact rational multiple of pi")
    return p % 2


def format_angle(phase: Fraction) -> str:
    phase = Fraction(phase) % 2
    if phase == 0:
        return "0"
    num, den = phase.numerator, phase.denominator
    head = "pi" if num == 1 else f"{num}*pi"
    return head if den == 1 else f"{head}/{den}"


# QASM -------------------------------------------------------------------------------

_SIMPLE = {"h": "H", "x": "X", "z": "Z", "s": "S", "sdg": "Sdg", "t": "T", "tdg": "Tdg"}
_STMT = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*(.*)$", re.S)
_ARG = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\[\s*(\d+)\s*\])?$")


def _statements(text: str):
    """Yield ``(line_number, statement)`` with comments removed."""
    buf: List[str] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0]
        while line:
            head, sep, line = line.partition(";")
            if head.strip():
                if start is None:
                    start = lineno
                buf.append(head)
            if sep:
                if buf:
                    yield start, " ".join(s.strip() for s in buf)
                buf, start = [], None
            else:
                break
    if buf:
        yield start, " ".join(s.strip() for s in buf) + "\0"


def parse_qasm(text: str) -> Circuit:
    """Parse an OpenQASM 2.0 program over the supported gate subset."""
    regs: Dict[str, Tuple[int, int]] = {}
    n_qubits = 0
    gates: List[Gate] = []
    first = True
    for lineno, stmt in _statements(text):
        if stmt.endswith("\0"):
            raise QasmError("missing ';'", lineno)
        if stmt.startswith("OPENQASM"):
            if not first or stmt.split()[1:] != ["2.0"]:
                raise QasmError(f"malformed header {stmt!r}", lineno)
            first = False
            continue
        first = False
        if stmt.startswith("include"):
            continue
        m = _STMT.match(stmt)
        if m is None:
            raise QasmError(f"cannot parse statement {stmt!r}", lineno)
        name, params, rest = m.group(1), m.group(2), m.group(3).strip()
        if name in ("qreg", "creg"):
            rm = _ARG.match(rest)
            if rm is None or rm.group(2) is None:
                raise QasmError(f"malformed register declaration {stmt!r}", lineno)
            if name == "qreg":
                if rm.group(1) in regs:
                    raise QasmError(f"register {rm.group(1)} declared twice", lineno)
                size = int(rm.group(2))
                regs[rm.group(1)] = (n_qubits, size)
                n_qubits += size
            continue
        if name == "barrier":
            continue
        if name in ("measure", "reset", "if", "gate", "opaque"):
            raise QasmError(f"unsupported statement {name!r}", lineno)

        qubits: List[List[int]] = []
        for arg in (a.strip() for a in rest.split(",")) if rest else ():
            am = _ARG.match(arg)
            if am is None or am.group(1) not in regs:
                raise QasmError(f"unknown qubit argument {arg!r}", lineno)
            off, size = regs[am.group(1)]
            if am.group(2) is None:
                qubits.append([off + i for i in range(size)])
            else:
                idx = int(am.group(2))
                if idx >= size:
                    raise QasmError(f"index {idx} out of range for {am.group(1)}[{size}]", lineno)
                qubits.append([off + idx])
        try:
            gates.extend(_expand(name, params, qubits, lineno))
        except CircuitError as exc:
            raise QasmError(str(exc), lineno) from None
    return Circuit(n_qubits, gates)


def _expand(name: str, params, qubits: List[List[int]], lineno: int) -> List[Gate]:
    arity = {"cx": 2, "CX": 2, "cz": 2, "ccx": 3, "ccz": 3}.get(name, 1)
    if name not in _SIMPLE and name not in ("y", "rz", "u1", "p", "cx", "CX", "cz", "ccx", "ccz"):
        raise QasmError(f"unknown gate {name!r}", lineno)
    if (params is not None) != (name in ("rz", "u1", "p")):
        raise QasmError(f"bad parameter list for {name}", lineno)
    if len(qubits) != arity:
        raise QasmError(f"{name} expects {arity} argument(s), got {len(qubits)}", lineno)
    # register broadcast: every argument must be a single qubit or share a common length
    width = max(len(q) for q in qubits)
    if any(len(q) not in (1, width) for q in qubits):
        raise QasmError("register size mismatch", lineno)
    out: List[Gate] = []
    for k in range(width):
        qs = [q[0] if len(q) == 1 else q[k] for q in qubits]
        if name in _SIMPLE:
            out.append(Gate(_SIMPLE[name], (qs[0],)))
        elif name == "y":
            out += [Gate("Z", (qs[0],)), Gate("X", (qs[0],))]
        elif name in ("rz", "u1", "p"):
            try:
                phase = parse_angle(params)
            except ValueError as exc:
                raise QasmError(str(exc), lineno) from None
            out.append(Gate("Rz", (qs[0],), phase))
        elif name in ("cx", "CX"):
            out.append(Gate("CNOT", (qs[0], qs[1])))
        elif name == "cz":
            out.append(Gate("CZ", (qs[0], qs[1])))
        else:
            if len(set(qs)) != 3:
                raise QasmError(f"{name} needs distinct qubits", lineno)
            out += ccx_gates(*qs) if name == "ccx" else ccz_gates(*qs)
    return out


_EMIT = {"H": "h", "X": "x", "Z": "z", "S": "s", "Sdg": "sdg", "T": "t", "Tdg": "tdg", "CNOT": "cx", "CZ": "cz"}


def emit_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    if c.n_qubits:
        lines.append(f"qreg q[{c.n_qubits}];")
    for g in c.gates:
        args = ",".join(f"q[{q}]" for q in g.qubits)
        if g.kind == "Rz":
            lines.append(f"rz({format_angle(g.phase)}) {args};")
        else:
            lines.append(f"{_EMIT[g.kind]} {args};")
    return "\n".join(lines) + "\n"


# .qc --------------------------------------------------------------------------------

_QC_SIMPLE = {"H": "H", "X": "X", "Z": "Z", "S": "S", "P": "S", "S*": "Sdg", "P*": "Sdg", "T": "T", "T*": "Tdg"}


def parse_qc(text: str) -> Circuit:
    """Parse the ``.qc`` format (``.v`` wire list, ``BEGIN``/``END`` body).

    Supports H, X, Y, Z, S/P, S*/P*, T, T*, ``cnot``, ``tof`` with up to two controls and
    ``Z`` with up to three arguments.
    """
    names: Dict[str, int] = {}
    gates: List[Gate] = []
    in_body = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == ".v":
            for w in parts[1:]:
                names.setdefault(w, len(names))
            continue
        if head.startswith("."):
            continue
        if head.upper() == "BEGIN":
            in_body = True
            continue
        if head.upper() == "END":
            in_body = False
            continue
        if not in_body:
            raise QasmError(f"gate outside BEGIN/END: {line!r}", lineno)
        try:
            qs = [names[w] for w in parts[1:]]
        except KeyError as exc:
            raise QasmError(f"undeclared wire {exc.args[0]!r}", lineno) from None
        g = head if head in _QC_SIMPLE else head.lower()
        try:
            if g in _QC_SIMPLE and len(qs) == 1:
                gates.append(Gate(_QC_SIMPLE[g], (qs[0],)))
            elif g == "y" and len(qs) == 1:
                gates += [Gate("Z", (qs[0],)), Gate("X", (qs[0],))]
            elif g in ("tof", "cnot", "x", "X") and len(qs) == 2:
                gates.append(Gate("CNOT", (qs[0], qs[1])))
            elif g == "tof" and len(qs) == 3:
                gates += ccx_gates(*qs)
            elif g in ("z", "Z") and len(qs) == 2:
                gates.append(Gate("CZ", (qs[0], qs[1])))
            elif g in ("z", "Z") and len(qs) == 3:
                gates += ccz_gates(*qs)
            else:
                raise QasmError(f"unsupported gate {line!r}", lineno)
        except CircuitError as exc:
            raise QasmError(str(exc), lineno) from None
    return Circuit(len(names), gates)


def load_circuit(path) -> Circuit:
    """Read a circuit from a ``.qasm`` or ``.qc`` file."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".qc":
        return parse_qc(text)
    return parse_qasm(text)
