"""Text format for multi-controlled-X circuits.

One gate per line::

    QUBITS 4          # optional, otherwise the widest wire decides
    X 1
    CX 0 3
    CCX 0 1 2
    MCX +0 +1 -3 ; 2  # +w closed control, -w open control, target after ';'
"""
import re
from pathlib import Path
from typing import List, Optional, Tuple, Union

from ...common.errors import CircuitParseError
from .gates import Circuit, CircuitGate

_TOKEN = re.compile(r"[^\s;]+|;")


def _tokens(line: str) -> List[Tuple[str, int]]:
    body = line.split("#", 1)[0]
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(body)]


def _wire(token: str, lineno: int, column: int, source: Optional[str]) -> int:
    if not token.isdigit():
        raise CircuitParseError(f"expected a wire index, got {token!r}", lineno, column, source)
    return int(token)


def _parse_gate(tokens, lineno: int, source: Optional[str]) -> CircuitGate:
    op, col = tokens[0]
    op = op.upper()
    args = tokens[1:]
    arity = {"X": 1, "CX": 2, "CCX": 3}
    if op in arity:
        if len(args) != arity[op]:
            raise CircuitParseError(f"{op} takes {arity[op]} wire(s), got {len(args)}", lineno, col, source)
        wires = [_wire(t, lineno, c, source) for t, c in args]
        try:
            return CircuitGate(wires[-1], tuple((w, 1) for w in wires[:-1]))
        except ValueError as exc:
            raise CircuitParseError(str(exc), lineno, col, source) from exc
    if op != "MCX":
        raise CircuitParseError(f"unknown gate {tokens[0][0]!r}", lineno, col, source)

    semis = [i for i, (t, _) in enumerate(args) if t == ";"]
    if len(semis) != 1:
        raise CircuitParseError("MCX needs exactly one ';' before its target", lineno, col, source)
    split = semis[0]
    target_tokens = args[split + 1:]
    if len(target_tokens) != 1:
        column = target_tokens[1][1] if len(target_tokens) > 1 else args[split][1]
        raise CircuitParseError("MCX takes exactly one target after ';'", lineno, column, source)
    controls = []
    for token, c in args[:split]:
        if token[0] not in "+-":
            raise CircuitParseError(f"control {token!r} must start with '+' or '-'", lineno, c, source)
        controls.append((_wire(token[1:], lineno, c + 1, source), 1 if token[0] == "+" else 0))
    target = _wire(target_tokens[0][0], lineno, target_tokens[0][1], source)
    try:
        return CircuitGate(target, tuple(controls))
    except ValueError as exc:
        raise CircuitParseError(str(exc), lineno, col, source) from exc


def parse_circuit(text: str, source: Optional[str] = None) -> Circuit:
    n = None
    gates: List[CircuitGate] = []
    positions: List[Tuple[int, int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = _tokens(line)
        if not tokens:
            continue
        if tokens[0][0].upper() == "QUBITS":
            if gates or n is not None:
                raise CircuitParseError("QUBITS must come first and only once", lineno, tokens[0][1], source)
            if len(tokens) != 2 or not tokens[1][0].isdigit() or int(tokens[1][0]) < 1:
                raise CircuitParseError("QUBITS takes one positive integer", lineno, tokens[0][1], source)
            n = int(tokens[1][0])
            continue
        gates.append(_parse_gate(tokens, lineno, source))
        positions.append((lineno, tokens[0][1]))

    widest = max((max(g.wires) for g in gates), default=0) + 1
    if n is None:
        n = widest
    for g, (lineno, col) in zip(gates, positions):
        if max(g.wires) >= n:
            raise CircuitParseError(f"wire {max(g.wires)} outside [0, {n})", lineno, col, source)
    return Circuit(n, tuple(gates))


def load_circuit(path: Union[str, Path]) -> Circuit:
    path = Path(path)
    return parse_circuit(path.read_text(encoding="utf-8"), source=str(path))


def format_gate(g: CircuitGate) -> str:
    if g.is_bare:
        return f"X {g.target}"
    if len(g.controls) == 1 and g.controls[0][1] == 1:
        return f"CX {g.controls[0][0]} {g.target}"
    signs = " ".join(("+" if p else "-") + str(w) for w, p in g.controls)
    return f"MCX {signs} ; {g.target}"


def format_circuit(c: Circuit) -> str:
    lines = [f"QUBITS {c.n}"] + [format_gate(g) for g in c.gates]
    return "\n".join(lines) + "\n"
