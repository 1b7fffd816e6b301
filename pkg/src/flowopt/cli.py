"""Command-line front end.

    flowopt optimize circuit.qasm --smax 2 --out opt.qasm
    flowopt bench benchmarks/ --json
    flowopt random 8 400 0.1 --seed 1
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

from .bench import Metrics, family_circuits, find_benchmarks, mean_reduction, random_circuit
from .circuit import Circuit, CircuitError
from .extract import ExtractionError
from .optimizer import OptimizerConfig, run_flow_opt
from .qasm import QasmError, emit_qasm, load_circuit
from .verify import MAX_QUBITS, equivalent

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3

VERIFY_MAX_QUBITS = 10


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_opt_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--smax", type=int, default=2, help="unfusion subset cap for both rule families")
    p.add_argument("--smax-lcomp", type=int, default=None, help="override the cap for local complementation")
    p.add_argument("--smax-pivot", type=int, default=None, help="override the cap for pivoting")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--teleport-only", action="store_true", help="only teleport phases, keep the structure")
    p.add_argument("--verify", action="store_true", help=f"check the result with the dense oracle (<= {VERIFY_MAX_QUBITS} qubits)")
    p.add_argument("--json", action="store_true", help="emit metrics as JSON lines")
    p.add_argument("--out", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="flowopt", description="Flow-preserving ZX optimisation of Clifford+T circuits.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("optimize", help="optimise one circuit file")
    p.add_argument("input", type=Path)
    _add_opt_flags(p)

    p = sub.add_parser("bench", help="optimise every circuit in a directory")
    p.add_argument("directory", type=Path, nargs="?", default=None)
    p.add_argument("--families", action="store_true", help="include the generated tof and barenco-tof circuits")
    p.add_argument("--timing", action="store_true", help="report wall time (makes output non-deterministic)")
    _add_opt_flags(p)

    p = sub.add_parser("random", help="write a random Clifford+T circuit as QASM")
    p.add_argument("n_qubits", type=int)
    p.add_argument("n_gates", type=int)
    p.add_argument("p_t", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)
    return ap


def _config(args: argparse.Namespace) -> OptimizerConfig:
    if args.smax < 0:
        raise UsageError("--smax must be non-negative")
    lc = args.smax if args.smax_lcomp is None else args.smax_lcomp
    pv = args.smax if args.smax_pivot is None else args.smax_pivot
    try:
        return OptimizerConfig(s_max_lcomp=lc, s_max_pivot=pv, max_iterations=args.max_iterations, rng_seed=args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _optimise(name: str, c: Circuit, cfg: OptimizerConfig, args: argparse.Namespace) -> tuple:
    start = time.perf_counter()
    res = run_flow_opt(c, cfg, teleport_only=args.teleport_only)
    seconds = time.perf_counter() - start
    out = res.circuit
    assert out is not None
    m = Metrics.measure(name, c, out, seconds)
    if args.verify:
        if c.n_qubits <= min(VERIFY_MAX_QUBITS, MAX_QUBITS):
            m.verified = equivalent(out, c)
        else:
            m.verified = None
    return out, m


def _format_row(m: Metrics, timing: bool) -> str:
    if m.error is not None:
        return f"{m.name:<16} error: {m.error}"
    row = (
        f"{m.name:<16} Q={m.qubits:<3} 2Q {m.orig_2q:>4} -> {m.opt_2q:<4}"
        f" T {m.orig_t:>4} -> {m.opt_t:<4} total {m.orig_total:>5} -> {m.opt_total:<5}"
        f" ({m.reduction_2q:.2f}% 2Q)"
    )
    if m.verified is not None:
        row += " verified" if m.verified else " MISMATCH"
    if timing and m.seconds is not None:
        row += f" {m.seconds:.2f}s"
    return row


def _record(m: Metrics, timing: bool) -> str:
    rec = m.record()
    if not timing:
        rec["seconds"] = None
    return json.dumps(rec)


def cmd_optimize(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    cfg = _config(args)
    c = load_circuit(args.input)
    out, m = _optimise(args.input.stem, c, cfg, args)
    text = emit_qasm(out)
    report = _record(m, True) if args.json else _format_row(m, True)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
        print(report, file=stdout)
    else:
        stdout.write(text)
        print(report, file=stderr)
    if m.verified is False:
        raise InvariantError("optimised circuit is not equivalent to the input")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    cfg = _config(args)
    jobs: List[tuple] = []
    if args.directory is not None:
        if not args.directory.is_dir():
            raise UsageError(f"{args.directory} is not a directory")
        for name, path in find_benchmarks(args.directory).items():
            jobs.append((name, path))
    if args.families:
        for name, c in family_circuits().items():
            if name not in {j[0] for j in jobs}:
                jobs.append((name, c))
    rows: List[Metrics] = []
    for name, src in sorted(jobs, key=lambda j: j[0]):
        try:
            c = load_circuit(src) if isinstance(src, Path) else src
            _, m = _optimise(name, c, cfg, args)
        except (OSError, QasmError, CircuitError, ExtractionError, ValueError) as e:
            m = Metrics.failed(name, f"{type(e).__name__}: {e}")
        rows.append(m)
    lines = [_record(m, args.timing) if args.json else _format_row(m, args.timing) for m in rows]
    mean = mean_reduction(rows)
    if args.json:
        lines.append(json.dumps({"name": "<mean>", "circuits": len(rows), "mean_reduction_2q": mean}))
    else:
        lines.append(f"mean 2Q reduction over {len(rows)} circuits: " + ("n/a" if mean is None else f"{mean:.2f}%"))
    text = "\n".join(lines) + "\n"
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    if any(m.verified is False for m in rows):
        print("oracle mismatch in at least one circuit", file=stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_random(args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> int:
    try:
        c = random_circuit(args.n_qubits, args.n_gates, args.p_t, args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from e
    text = emit_qasm(c)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    return EXIT_OK


COMMANDS = {"optimize": cmd_optimize, "bench": cmd_bench, "random": cmd_random}


def main(argv: Optional[Sequence[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, stdout, stderr)
    except UsageError as e:
        print(f"flowopt: error: {e}", file=stderr)
        return EXIT_USAGE
    except (QasmError, CircuitError) as e:
        print(f"flowopt: parse error: {e}", file=stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"flowopt: {e}", file=stderr)
        return EXIT_PARSE
    except (InvariantError, AssertionError, ExtractionError) as e:
        print(f"flowopt: internal invariant violated: {e}", file=stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
