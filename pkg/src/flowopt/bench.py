"""Benchmark harness: reference numbers, circuit generators and metrics records."""

from __future__ import annotations

import random
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, NamedTuple, Optional, Sequence, Tuple

from .circuit import Circuit
from .qasm import ccx_gates, load_circuit

__all__ = [
    "Reference",
    "REFERENCE",
    "Metrics",
    "barenco_tof",
    "canonical_name",
    "find_benchmarks",
    "mean_reduction",
    "random_circuit",
    "tof_ladder",
]


class Reference(NamedTuple):
    """Reference counts: original (Q, 2Q, T), flow-opt 2Q by strategy, teleported T."""

    qubits: int
    orig_2q: int
    orig_t: int
    g0: int
    c: Tuple[int, int, int, int, int, int]  # c0 .. c5
    t: int


REFERENCE: Dict[str, Reference] = {
    "adder_8": Reference(24, 409, 399, 296, (295, 284, 277, 269, 267, 268), 173),
    "barenco_tof_4": Reference(7, 48, 56, 42, (42, 37, 37, 37, 37, 37), 28),
    "barenco_tof_5": Reference(9, 72, 84, 63, (63, 57, 55, 55, 55, 55), 40),
    "barenco_tof_10": Reference(19, 192, 224, 159, (159, 151, 146, 146, 146, 146), 100),
    "tof_4": Reference(7, 30, 35, 24, (24, 24, 24, 24, 24, 24), 23),
    "tof_5": Reference(9, 42, 49, 33, (33, 33, 33, 33, 33, 33), 31),
    "tof_10": Reference(19, 102, 119, 78, (78, 78, 78, 78, 78, 78), 71),
    "csla_mux_3": Reference(15, 80, 70, 74, (74, 73, 73, 73, 73, 73), 62),
    "csum_mux_9": Reference(30, 168, 196, 151, (152, 150, 140, 140, 140, 140), 84),
    "gf2^4_mult": Reference(12, 99, 112, 98, (99, 99, 94, 94, 94, 94), 68),
    "gf2^5_mult": Reference(15, 154, 175, 153, (154, 154, 146, 146, 146, 146), 115),
    "gf2^6_mult": Reference(18, 221, 252, 217, (221, 221, 209, 209, 209, 209), 150),
    "gf2^7_mult": Reference(21, 300, 343, 293, (300, 300, 283, 283, 283, 283), 217),
    "gf2^8_mult": Reference(24, 405, 448, 395, (405, 405, 383, 383, 383, 383), 264),
    "mod_mult_55": Reference(9, 48, 49, 40, (40, 40, 40, 40, 40, 40), 35),
    "mod_red_21": Reference(11, 105, 119, 85, (87, 86, 83, 83, 83, 83), 73),
    "mod5_4": Reference(5, 28, 28, 23, (25, 23, 21, 21, 21, 21), 8),
    "qcla_adder_10": Reference(36, 233, 238, 200, (200, 189, 182, 180, 174, 175), 162),
    "qcla_com_7": Reference(24, 186, 203, 136, (136, 134, 133, 133, 131, 131), 95),
    "qcla_mod_7": Reference(26, 382, 413, 312, (312, 310, 296, 293, 293, 292), 237),
    "rc_adder_6": Reference(14, 93, 77, 71, (71, 71, 71, 71, 71, 71), 47),
    "vbe_adder_3": Reference(10, 70, 70, 46, (46, 44, 39, 40, 36, 36), 24),
}

#: reference mean 2Q reduction (%) for strategies c0 .. c5
REFERENCE_MEAN_REDUCTION = (14.27, 16.33, 19.24, 19.34, 19.79, 19.77)


def canonical_name(name: str) -> str:
    """Map file stems like ``gf2^4_mult``, ``GF(2^4)-Mult`` or ``mod5-4`` to table keys."""
    s = name.lower()
    s = re.sub(r"\.(qasm|qc)$", "", s)
    s = s.replace("(", "").replace(")", "")
    s = re.sub(r"[-\s.]+", "_", s)
    s = re.sub(r"^gf_?2\^?(\d)_?mult", r"gf2^\1_mult", s)
    s = re.sub(r"_before$|_orig(inal)?$", "", s)
    return s


def find_benchmarks(directory: Path) -> Dict[str, Path]:
    """Benchmark files in ``directory`` keyed by table name (QASM preferred over .qc)."""
    found: Dict[str, Path] = {}
    for p in sorted(directory.iterdir()):
        if p.suffix not in (".qasm", ".qc"):
            continue
        key = canonical_name(p.stem)
        if key not in found or p.suffix == ".qasm":
            found[key] = p
    return found


# generators --------------------------------------------------------------------------


def tof_ladder(n: int) -> Circuit:
    """An ``n``-controlled Toffoli from ``2n - 3`` Toffolis and ``n - 2`` clean ancillas.

    Qubits: controls ``0..n-1``, ancillas ``n..2n-3``, target ``2n-2``.
    """
    if n < 3:
        raise ValueError("need at least three controls")
    ctl = list(range(n))
    anc = list(range(n, 2 * n - 2))
    tgt = 2 * n - 2
    steps = [(ctl[0], ctl[1], anc[0])]
    for k in range(1, n - 2):
        steps.append((ctl[k + 1], anc[k - 1], anc[k]))
    c = Circuit(2 * n - 1)
    for a, b, t in steps:
        c.extend(ccx_gates(a, b, t))
    c.extend(ccx_gates(ctl[n - 1], anc[n - 3], tgt))
    for a, b, t in reversed(steps):
        c.extend(ccx_gates(a, b, t))
    return c


def barenco_tof(n: int) -> Circuit:
    """An ``n``-controlled Toffoli from ``4(n - 2)`` Toffolis and ``n - 2`` dirty ancillas."""
    if n < 3:
        raise ValueError("need at least three controls")
    ctl = list(range(n))
    anc = list(range(n, 2 * n - 2))
    tgt = 2 * n - 2
    top = (ctl[n - 1], anc[n - 3], tgt)
    mids = [(ctl[k + 1], anc[k - 1], anc[k]) for k in range(n - 3, 0, -1)]
    bottom = (ctl[0], ctl[1], anc[0])
    inner = mids + [bottom] + mids[::-1]
    c = Circuit(2 * n - 1)
    for a, b, t in [top] + inner + [top] + inner:
        c.extend(ccx_gates(a, b, t))
    return c


def random_circuit(n_qubits: int, n_gates: int, p_t: float, seed: int) -> Circuit:
    """I.i.d. gates: T with probability ``p_t``, otherwise uniform over H, S and CNOT."""
    if not 0.0 <= p_t <= 1.0:
        raise ValueError(f"p_t must lie in [0, 1], got {p_t}")
    if n_qubits < 2:
        raise ValueError("need at least two qubits for CNOT")
    if n_gates < 0:
        raise ValueError("gate count must be non-negative")
    rng = random.Random(seed)
    c = Circuit(n_qubits)
    for _ in range(n_gates):
        if rng.random() < p_t:
            c.add("T", rng.randrange(n_qubits))
            continue
        kind = rng.choice(("H", "S", "CNOT"))
        if kind == "CNOT":
            a, b = rng.sample(range(n_qubits), 2)
            c.add("CNOT", a, b)
        else:
            c.add(kind, rng.randrange(n_qubits))
    return c


# metrics -----------------------------------------------------------------------------


@dataclass
class Metrics:
    name: str
    qubits: int
    orig_2q: int
    orig_t: int
    orig_total: int
    opt_2q: int
    opt_t: int
    opt_total: int
    seconds: Optional[float] = None
    verified: Optional[bool] = None
    error: Optional[str] = None

    FIELDS = (
        "name", "qubits", "orig_2q", "orig_t", "orig_total",
        "opt_2q", "opt_t", "opt_total", "reduction_2q", "seconds", "verified", "error",
    )

    @property
    def reduction_2q(self) -> Optional[float]:
        if self.error is not None or self.orig_2q == 0:
            return None
        return round(100.0 * (1.0 - self.opt_2q / self.orig_2q), 2)

    def record(self) -> Dict[str, object]:
        """Fields in a fixed order for line-delimited output."""
        return {k: getattr(self, k) for k in self.FIELDS}

    @classmethod
    def failed(cls, name: str, error: str) -> "Metrics":
        return cls(name, 0, 0, 0, 0, 0, 0, 0, error=error)

    @classmethod
    def measure(cls, name: str, before: Circuit, after: Circuit, seconds: Optional[float] = None) -> "Metrics":
        b, a = before.stats(), after.stats()
        return cls(name, before.n_qubits, b[0], b[1], b[2], a[0], a[1], a[2], seconds)


def mean_reduction(rows: Sequence[Metrics]) -> Optional[float]:
    """Mean per-circuit 2Q reduction in percent over rows without errors."""
    vals = [r.reduction_2q for r in rows if r.reduction_2q is not None]
    if not vals:
        return None
    return round(sum(vals) / len(vals), 2)


def load_named(path: Path) -> Tuple[str, Circuit]:
    return canonical_name(path.stem), load_circuit(path)


class Stopwatch:
    def __enter__(self) -> "Stopwatch":
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc) -> None:
        self.seconds = time.perf_counter() - self.start


def family_circuits() -> Dict[str, Circuit]:
    """Benchmarks that can be rebuilt from their definition alone."""
    out: Dict[str, Circuit] = {}
    for n in (4, 5, 10):
        out[f"tof_{n}"] = tof_ladder(n)
        out[f"barenco_tof_{n}"] = barenco_tof(n)
    return out

