"""Permutation gates, multi-controlled-X circuits and cycle structures.

Basis state ``x`` is read with qubit 0 as the most significant bit. A circuit
applies its gates to basis states left to right, so ``[A, B]`` is the unitary
``B . A``.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ...common.errors import DimensionMismatchError, InvalidGateError, InvalidPermutationError
from ..gf2_linear.gf2_linear import (AffineMap, BitMatrix, BitVec, affine_rank,
                                     null_space)
from ..pauli_monomial.pauli_monomial import MonomialOperator


def wire_bit(n: int, wire: int) -> int:
    return 1 << (n - 1 - wire)


#region Permutation gates
@dataclass(frozen=True)
class PermutationGate:
    n: int
    table: Tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != 1 << self.n:
            raise DimensionMismatchError(f"table of length {len(self.table)} is not on {self.n} qubits")
        if sorted(self.table) != list(range(1 << self.n)):
            raise InvalidPermutationError("table is not a bijection")
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))

    @classmethod
    def identity(cls, n: int) -> "PermutationGate":
        return cls(n, tuple(range(1 << n)))

    @classmethod
    def from_affine(cls, f: AffineMap) -> "PermutationGate":
        return cls(f.n, tuple(f.apply_int(x) for x in range(1 << f.n)))

    def __call__(self, x: int) -> int:
        return self.table[x]

    def then(self, other: "PermutationGate") -> "PermutationGate":
        """Apply ``self`` first, then ``other``."""
        if other.n != self.n:
            raise DimensionMismatchError(f"gates act on {self.n} and {other.n} qubits")
        return PermutationGate(self.n, tuple(other.table[y] for y in self.table))

    def __matmul__(self, other: "PermutationGate") -> "PermutationGate":
        return other.then(self)

    def inverse(self) -> "PermutationGate":
        inv = [0] * len(self.table)
        for x, y in enumerate(self.table):
            inv[y] = x
        return PermutationGate(self.n, tuple(inv))

    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.table))

    def to_monomial(self) -> MonomialOperator:
        return MonomialOperator.permutation(self.n, self.table)
#endregion


#region Circuits
@dataclass(frozen=True)
class CircuitGate:
    """Multi-controlled X. ``controls`` holds ``(wire, polarity)`` pairs; polarity 0 is an open control."""
    target: int
    controls: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        controls = tuple(sorted((int(w), int(p)) for w, p in self.controls))
        wires = [w for w, _ in controls]
        if len(set(wires)) != len(wires):
            raise InvalidGateError("a wire appears twice among the controls")
        if self.target in wires:
            raise InvalidGateError(f"target wire {self.target} is also a control")
        if any(p not in (0, 1) for _, p in controls):
            raise InvalidGateError("control polarity must be 0 or 1")
        object.__setattr__(self, "controls", controls)

    @property
    def wires(self) -> Tuple[int, ...]:
        return tuple(w for w, _ in self.controls) + (self.target,)

    @property
    def is_bare(self) -> bool:
        return not self.controls

    def apply(self, n: int, x: int) -> int:
        for w, p in self.controls:
            if (x >> (n - 1 - w)) & 1 != p:
                return x
        return x ^ wire_bit(n, self.target)

    def shifted(self, offset: int) -> "CircuitGate":
        return CircuitGate(self.target + offset, tuple((w + offset, p) for w, p in self.controls))


def X(target: int) -> CircuitGate:
    return CircuitGate(target)


def CX(control: int, target: int) -> CircuitGate:
    return CircuitGate(target, ((control, 1),))


def CCX(c0: int, c1: int, target: int) -> CircuitGate:
    return CircuitGate(target, ((c0, 1), (c1, 1)))


def MCX(target: int, on: Iterable[int] = (), off: Iterable[int] = ()) -> CircuitGate:
    return CircuitGate(target, tuple((w, 1) for w in on) + tuple((w, 0) for w in off))


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: Tuple[CircuitGate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n < 1:
            raise DimensionMismatchError("a circuit needs at least one wire")
        for g in self.gates:
            bad = [w for w in g.wires if not 0 <= w < self.n]
            if bad:
                raise DimensionMismatchError(f"wire {bad[0]} outside [0, {self.n})")

    def __len__(self):
        return len(self.gates)


def circuit_to_permutation(c: Circuit) -> PermutationGate:
    table = []
    for x in range(1 << c.n):
        for g in c.gates:
            x = g.apply(c.n, x)
        table.append(x)
    return PermutationGate(c.n, tuple(table))


def circuit_to_monomial(c: Circuit) -> MonomialOperator:
    return circuit_to_permutation(c).to_monomial()


def wire_mismatch(c: Circuit) -> int:
    """Wires carrying both a target and a control; bare X gates are not counted."""
    targets, controls = set(), set()
    for g in c.gates:
        if g.is_bare:
            continue
        targets.add(g.target)
        controls.update(w for w, _ in g.controls)
    return len(targets & controls)
#endregion


#region Cycle structures
def _rotate_max_first(cycle: Sequence[int]) -> Tuple[int, ...]:
    i = max(range(len(cycle)), key=lambda j: cycle[j])
    return tuple(cycle[i:]) + tuple(cycle[:i])


@dataclass(frozen=True)
class CycleStructure:
    """Disjoint cycles of non-fixed states; ``(a, b, c)`` maps a to b, b to c and c to a."""
    n: int
    cycles: Tuple[Tuple[BitVec, ...], ...]

    def __post_init__(self):
        ints = []
        for cycle in self.cycles:
            values = tuple(int(v) if isinstance(v, BitVec) else int(v) for v in cycle)
            if len(values) < 2:
                raise InvalidPermutationError("cycles must have length at least 2")
            if any(not 0 <= v < (1 << self.n) for v in values):
                raise DimensionMismatchError(f"state outside [0, {1 << self.n})")
            ints.append(_rotate_max_first(values))
        flat = [v for c in ints for v in c]
        if len(set(flat)) != len(flat):
            raise InvalidPermutationError("states repeat across cycles")
        ints.sort(key=lambda c: c[0], reverse=True)
        object.__setattr__(self, "cycles", tuple(tuple(BitVec(self.n, v) for v in c) for c in ints))

    @classmethod
    def from_ints(cls, n: int, cycles: Iterable[Sequence[int]]) -> "CycleStructure":
        return cls(n, tuple(tuple(c) for c in cycles))

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[int]], shape: Sequence[int],
                    top_row_is_lsb: bool = False) -> "CycleStructure":
        """Build from a 0/1 matrix whose columns are states, grouped left to right by ``shape``."""
        if top_row_is_lsb:
            rows = list(reversed(rows))
        n = len(rows)
        m = BitMatrix.from_lists(rows)
        if sum(shape) != m.ncols:
            raise DimensionMismatchError(f"shape {tuple(shape)} does not cover {m.ncols} columns")
        columns = m.columns()
        cycles, start = [], 0
        for k in shape:
            cycles.append(columns[start:start + k])
            start += k
        return cls.from_ints(n, cycles)

    @property
    def int_cycles(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(v.value for v in c) for c in self.cycles)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles), reverse=True))

    @property
    def states(self) -> List[int]:
        return [v for c in self.int_cycles for v in c]

    def to_matrix(self) -> BitMatrix:
        return BitMatrix.from_columns(self.n, self.states)

    def encode(self) -> int:
        """Packed integer key of the canonical form, unique per structure at fixed ``n``."""
        key = 0
        for c in self.int_cycles:
            for v in c:
                key = (key << self.n) | v
            key = (key << self.n) | c[0]  # closing marker distinguishes cycle boundaries
        return key

    def __str__(self):
        return canonical_notation(self)


def to_cycle_structure(p: PermutationGate) -> CycleStructure:
    seen = [False] * len(p.table)
    cycles = []
    for start in range(len(p.table)):
        if seen[start] or p.table[start] == start:
            seen[start] = True
            continue
        cycle, x = [], start
        while not seen[x]:
            seen[x] = True
            cycle.append(x)
            x = p.table[x]
        cycles.append(cycle)
    return CycleStructure.from_ints(p.n, cycles)


def from_cycle_structure(cs: CycleStructure) -> PermutationGate:
    table = list(range(1 << cs.n))
    for c in cs.int_cycles:
        for i, v in enumerate(c):
            table[v] = c[(i + 1) % len(c)]
    return PermutationGate(cs.n, tuple(table))


def canonical_notation(cs: CycleStructure) -> str:
    return "".join("(" + ",".join(str(v) for v in c) + ")" for c in cs.int_cycles)


def permutation_order(p) -> int:
    cs = p if isinstance(p, CycleStructure) else to_cycle_structure(p)
    return math.lcm(*(len(c) for c in cs.cycles)) if cs.cycles else 1


def cycle_rank(cs: CycleStructure) -> List[int]:
    """Affine rank of each cycle's columns."""
    return [affine_rank(list(c), cs.n) for c in cs.int_cycles]
#endregion


#region Controls and affine action
def add_control(obj, polarity: int = 1):
    """Prepend a new wire 0 that must equal ``polarity`` for the operation to act."""
    if isinstance(obj, Circuit):
        gates = tuple(CircuitGate(g.target + 1, ((0, polarity),) + tuple((w + 1, p) for w, p in g.controls))
                      for g in obj.gates)
        return Circuit(obj.n + 1, gates)
    if isinstance(obj, PermutationGate):
        n = obj.n
        top = polarity << n
        table = list(range(1 << (n + 1)))
        for x, y in enumerate(obj.table):
            table[top | x] = top | y
        return PermutationGate(n + 1, tuple(table))
    if isinstance(obj, CycleStructure):
        top = polarity << obj.n
        return CycleStructure.from_ints(obj.n + 1, [[top | v for v in c] for c in obj.int_cycles])
    raise TypeError(f"cannot add a control to {type(obj).__name__}")


def affine_conjugate(cs: CycleStructure, f: AffineMap) -> CycleStructure:
    """Cycle structure of ``f . p . f^-1``: every column ``v`` becomes ``Av + b``."""
    if f.n != cs.n:
        raise DimensionMismatchError(f"affine map on {f.n} qubits, structure on {cs.n}")
    return CycleStructure.from_ints(cs.n, [[f.apply_int(v) for v in c] for c in cs.int_cycles])


def controlled_form(cs: CycleStructure) -> Optional[Tuple[AffineMap, int, int]]:
    """An affine map making row 0 of the structure constant, with that row and its value.

    Exists exactly when the states span an affine subspace of dimension below ``n``.
    """
    n = cs.n
    states = cs.states
    if not states:
        return AffineMap.identity(n), 0, 1
    diffs = [v ^ states[0] for v in states[1:]] or [0]
    kernel = null_space(BitMatrix(len(diffs), n, tuple(diffs)))
    if not kernel:
        return None
    functional = kernel[0]
    pivot = n - functional.bit_length()
    rows = (functional,) + tuple(wire_bit(n, j) for j in range(n) if j != pivot)
    linear = BitMatrix(n, n, rows)
    f = AffineMap(linear, BitVec(n, 0))
    polarity = f.apply_int(states[0]) >> (n - 1)
    return f, 0, polarity


def controlled_parent(cs: CycleStructure) -> Optional[Tuple[CycleStructure, int]]:
    """The ``n-1`` qubit structure that the controlled form adds a control to."""
    if cs.n < 2:
        return None
    form = controlled_form(cs)
    if form is None:
        return None
    f, _, polarity = form
    moved = affine_conjugate(cs, f)
    low = (1 << (cs.n - 1)) - 1
    return CycleStructure.from_ints(cs.n - 1, [[v & low for v in c] for c in moved.int_cycles]), polarity
#endregion


#region Family catalogue
@dataclass(frozen=True)
class Family:
    """Generating unitary of a family whose controlled versions stay in the hierarchy."""
    name: str
    shape: Tuple[int, ...]
    circuit: Circuit
    matrix: Tuple[Tuple[int, ...], ...]
    semi_clifford: Optional[bool] = None

    @property
    def structure(self) -> CycleStructure:
        return CycleStructure.from_matrix(self.matrix, self.shape)


FAMILIES: Dict[str, Family] = {f.name: f for f in (
    Family("toffoli", (2,), Circuit(3, (CCX(0, 1, 2),)),
           ((1, 1), (1, 1), (0, 1)), True),
    Family("toffoli_bare_wire", (2, 2), Circuit(4, (CCX(1, 2, 3),)),
           ((1, 1, 0, 0), (1, 1, 1, 1), (1, 1, 1, 1), (0, 1, 0, 1)), True),
    Family("four_cycle", (4,), Circuit(4, (CCX(0, 1, 2), MCX(3, on=(0, 1, 2)))),
           ((1, 1, 1, 1), (1, 1, 1, 1), (0, 1, 0, 1), (0, 0, 1, 1)), False),
    Family("two_two_two", (2, 2, 2), Circuit(4, (
        X(1), X(3), CX(2, 3), MCX(2, on=(0, 1), off=(3,)), MCX(1, on=(0, 3)), CX(2, 3), X(1), X(3))),
           ((1, 1, 1, 1, 1, 1), (0, 1, 0, 0, 0, 1), (0, 0, 1, 0, 1, 1), (0, 0, 0, 1, 1, 1)), False),
    Family("two_two_two_semi_clifford", (2, 2, 2), Circuit(4, (
        CX(3, 2), MCX(3, on=(2,), off=(0, 1)), MCX(3, on=(1,), off=(0, 2)), MCX(3, on=(0,), off=(1, 2)), CX(3, 2))),
           ((0, 0, 1, 1, 0, 0), (1, 1, 0, 0, 0, 0), (0, 1, 0, 1, 0, 1), (0, 1, 0, 1, 1, 0)), True),
    Family("four_two", (4, 2), Circuit(3, (MCX(2, off=(0,)), MCX(1, off=(2,)))),
           ((0, 0, 0, 0, 1, 1), (0, 0, 1, 1, 0, 1), (0, 1, 0, 1, 0, 0)), None),
)}
#endregion
