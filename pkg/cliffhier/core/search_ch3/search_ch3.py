"""Third-level sweep: permutation times diagonal equivalence classes on four qubits.

A diagonal class is a tuple of exponents of multi-controlled phase gates.
Every coordinate puts ``digit / 2**log_root`` of a turn on the basis states
where all of its wires are 1.
"""
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from ...common.settings import ComponentSettings
from ...common.settings_manager import SettingsManager
from ..gates.gates import CCX, Circuit, PermutationGate, canonical_notation, circuit_to_permutation, \
    to_cycle_structure, wire_bit
from ..hierarchy.hierarchy import diagonal_from_terms, diagonal_level, is_semi_clifford, level
from ..pauli_monomial import kernels
from ..pauli_monomial.pauli_monomial import MonomialOperator, compose

logger = logging.getLogger("CH3Sweep")

SPECTRAL = "spectral"
KNOWN_SEMI_CLIFFORD = "known_semi_clifford"
SUPPORT = "support"
INVERSE_SYMMETRY = "inverse_symmetry"
FILTERS = (SPECTRAL, KNOWN_SEMI_CLIFFORD, SUPPORT, INVERSE_SYMMETRY)

# argument behind each exclusion, logged with it
EXCLUSION_REASONS = {
    SPECTRAL: "X d X d^-1 in Diag_3 \\ Diag_2 for some X-string",
    KNOWN_SEMI_CLIFFORD: "CCX . CCZ = CCiY is semi-Clifford",
    SUPPORT: "three-qubit third level is semi-Clifford",
    INVERSE_SYMMETRY: "pi d and pi d^-1 share their level",
}

ALL_SEMI_CLIFFORD = "all semi-Clifford"
NON_SEMI_CLIFFORD_FOUND = "non-semi-Clifford gate found"


def _setting(name: str):
    return ComponentSettings.SEARCH_CH3.get_value(name)


#region Class spaces
@dataclass(frozen=True)
class Coord:
    name: str
    wires: Tuple[int, ...]
    radix: int
    log_root: int

    def mask(self, n: int) -> int:
        return sum(wire_bit(n, w) for w in self.wires)

    @property
    def mirror_exact(self) -> bool:
        """Negating the digit stays in the class up to diagonal Cliffords."""
        if self.radix == 1 << self.log_root:
            return True
        # a radix-2 digit flips sign through the doubled term, which must be Clifford
        return self.radix == 2 and len(self.wires) + self.log_root - 2 <= 2


@dataclass(frozen=True)
class ClassSpace:
    name: str
    n: int
    coords: Tuple[Coord, ...]

    @property
    def size(self) -> int:
        out = 1
        for c in self.coords:
            out *= c.radix
        return out

    def __len__(self):
        return self.size

    @property
    def log_denom(self) -> int:
        return max(c.log_root for c in self.coords)

    @property
    def radices(self) -> np.ndarray:
        return np.array([c.radix for c in self.coords], dtype=np.int64)

    @property
    def mirror_safe(self) -> bool:
        return all(c.mirror_exact for c in self.coords)

    def decode(self, indices: np.ndarray) -> np.ndarray:
        """Mixed-radix digits, first coordinate most significant."""
        rest = np.asarray(indices, dtype=np.int64).copy()
        out = np.zeros((rest.shape[0], len(self.coords)), dtype=np.int64)
        for j in range(len(self.coords) - 1, -1, -1):
            r = self.coords[j].radix
            out[:, j] = rest % r
            rest //= r
        return out

    def encode(self, digits: np.ndarray) -> np.ndarray:
        digits = np.atleast_2d(np.asarray(digits, dtype=np.int64))
        out = np.zeros(digits.shape[0], dtype=np.int64)
        for j, c in enumerate(self.coords):
            out = out * c.radix + digits[:, j]
        return out

    def indicators(self) -> np.ndarray:
        """``(C, 2**n)`` 0/1 matrix: coordinate j acts on state x."""
        xs = np.arange(1 << self.n, dtype=np.int64)
        return np.stack([(xs & c.mask(self.n)) == c.mask(self.n) for c in self.coords]).astype(np.int64)

    def phases(self, digits: np.ndarray) -> np.ndarray:
        """Phase numerators over ``2**log_denom`` for each digit row."""
        M = self.log_denom
        scale = np.array([1 << (M - c.log_root) for c in self.coords], dtype=np.int64)
        return (np.atleast_2d(digits) * scale) @ self.indicators() % (1 << M)

    def support_masks(self, digits: np.ndarray) -> np.ndarray:
        masks = np.array([c.mask(self.n) for c in self.coords], dtype=np.int64)
        out = np.zeros(digits.shape[0], dtype=np.int64)
        for j, m in enumerate(masks):
            out |= np.where(digits[:, j] != 0, m, 0)
        return out

    def mirror(self, digits: np.ndarray) -> np.ndarray:
        out = np.array(digits, dtype=np.int64, copy=True)
        for j, c in enumerate(self.coords):
            out[:, j] = (-out[:, j]) % c.radix
        return out


def target_space(c_log_root: int = 3) -> ClassSpace:
    """Single-target classes on the bottom wire: 4**4 * 2**4 = 4096 points for T columns."""
    a = [(0, 1, 2, 3), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    b = [(0, 3), (1, 3), (2, 3)]
    coords = [Coord(f"a{i + 1}", w, 4, 2) for i, w in enumerate(a)]
    coords += [Coord(f"b{i + 1}", w, 2, 2) for i, w in enumerate(b)]
    coords.append(Coord("c1", (3,), 2, c_log_root))
    return ClassSpace("target" if c_log_root == 3 else f"target_root{c_log_root}", 4, tuple(coords))


def full_space() -> ClassSpace:
    """All 2**20 classes before the target-support reduction."""
    a = [(0, 1, 2, 3), (0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    b = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    coords = [Coord(f"a{i + 1}", w, 4, 2) for i, w in enumerate(a)]
    coords += [Coord(f"b{i + 1}", w, 2, 2) for i, w in enumerate(b)]
    coords += [Coord(f"c{w + 1}", (w,), 2, 3) for w in range(4)]
    return ClassSpace("full", 4, tuple(coords))
#endregion


#region Diagonal classes
@dataclass(frozen=True)
class DiagClass:
    a: Tuple[int, int, int, int] = (0, 0, 0, 0)
    b: Tuple[int, int, int] = (0, 0, 0)
    c: int = 0
    c_log_root: int = 3

    def __post_init__(self):
        if len(self.a) != 4 or any(not 0 <= v < 4 for v in self.a):
            raise ValueError(f"a must be four values in 0..3, got {self.a}")
        if len(self.b) != 3 or any(v not in (0, 1) for v in self.b):
            raise ValueError(f"b must be three bits, got {self.b}")
        if self.c not in (0, 1):
            raise ValueError(f"c must be a bit, got {self.c}")
        if self.c_log_root < 3:
            raise ValueError("the T column needs at least an eighth-turn root")

    @property
    def space(self) -> ClassSpace:
        return target_space(self.c_log_root)

    @property
    def digits(self) -> Tuple[int, ...]:
        return tuple(self.a) + tuple(self.b) + (self.c,)

    @classmethod
    def from_digits(cls, digits: Sequence[int], c_log_root: int = 3) -> "DiagClass":
        d = [int(v) for v in digits]
        return cls(tuple(d[:4]), tuple(d[4:7]), d[7], c_log_root)

    def inverse_class(self) -> "DiagClass":
        return DiagClass(tuple((-v) % 4 for v in self.a), self.b, self.c, self.c_log_root)

    def __str__(self):
        return "a=" + "".join(map(str, self.a)) + " b=" + "".join(map(str, self.b)) + f" c={self.c}"


@dataclass(frozen=True)
class FullDiagClass:
    a: Tuple[int, ...] = (0,) * 5
    b: Tuple[int, ...] = (0,) * 6
    c: Tuple[int, ...] = (0,) * 4

    def __post_init__(self):
        if len(self.a) != 5 or any(not 0 <= v < 4 for v in self.a):
            raise ValueError(f"a must be five values in 0..3, got {self.a}")
        if len(self.b) != 6 or any(v not in (0, 1) for v in self.b):
            raise ValueError(f"b must be six bits, got {self.b}")
        if len(self.c) != 4 or any(v not in (0, 1) for v in self.c):
            raise ValueError(f"c must be four bits, got {self.c}")

    @property
    def space(self) -> ClassSpace:
        return full_space()

    @property
    def digits(self) -> Tuple[int, ...]:
        return tuple(self.a) + tuple(self.b) + tuple(self.c)

    @classmethod
    def from_digits(cls, digits: Sequence[int]) -> "FullDiagClass":
        d = [int(v) for v in digits]
        return cls(tuple(d[:5]), tuple(d[5:11]), tuple(d[11:15]))

    def restrict_to_target_support(self, targets: Iterable[int] = (3,)) -> DiagClass:
        """Keep the terms touching a target wire; for the bottom target this is the 4096-point space."""
        targets = set(targets)
        if targets != {3}:
            raise ValueError("the reduced space is defined for a single target on wire 3")
        a = (self.a[0], self.a[2], self.a[3], self.a[4])
        b = (self.b[2], self.b[4], self.b[5])
        return DiagClass(a, b, self.c[3])

    def off_target_part(self, targets: Iterable[int] = (3,)) -> "FullDiagClass":
        """The factor with no support on the target wires."""
        targets = set(targets)
        space = self.space
        kept = [v if not targets & set(c.wires) else 0 for v, c in zip(self.digits, space.coords)]
        return FullDiagClass.from_digits(kept)


AnyClass = Union[DiagClass, FullDiagClass]


def build_diagonal(dc: AnyClass) -> MonomialOperator:
    space = dc.space
    terms: Dict[int, Fraction] = {}
    for v, c in zip(dc.digits, space.coords):
        if v:
            terms[c.mask(space.n)] = terms.get(c.mask(space.n), Fraction(0)) + Fraction(v, 1 << c.log_root)
    return diagonal_from_terms(space.n, terms)


def fig2_space() -> Iterable[FullDiagClass]:
    space = full_space()
    step = 1 << 14
    for start in range(0, space.size, step):
        for row in space.decode(np.arange(start, min(space.size, start + step))):
            yield FullDiagClass.from_digits(row)


def target_classes(c_log_root: int = 3) -> Iterable[DiagClass]:
    space = target_space(c_log_root)
    for row in space.decode(np.arange(space.size)):
        yield DiagClass.from_digits(row, c_log_root)
#endregion


#region Permutation helpers
def active_wires(p: PermutationGate) -> int:
    """Mask of wires the permutation reads or writes."""
    n = p.n
    mask = 0
    for w in range(n):
        bit = wire_bit(n, w)
        for x in range(1 << n):
            y = p.table[x]
            if (y ^ x) & bit or p.table[x ^ bit] != y ^ bit:
                mask |= bit
                break
    return mask


def target_wires(p: PermutationGate) -> int:
    mask = 0
    for x, y in enumerate(p.table):
        mask |= x ^ y
    return mask


def default_pi_reps() -> List[PermutationGate]:
    """The third-level, non-Clifford four-qubit affine class."""
    return [circuit_to_permutation(Circuit(4, (CCX(1, 2, 3),)))]


def pi_x_d_batch(pi: np.ndarray, phases: np.ndarray, s: int) -> np.ndarray:
    """Phases of ``pi X^s d X^s d^-1 pi^-1`` (diagonal) for each row of ``phases``."""
    xs = np.arange(phases.shape[1], dtype=np.int64)
    g = phases[:, xs ^ s] - phases
    out = np.empty_like(g)
    out[:, pi] = g
    return out
#endregion


#region Filters
def _known_case(space: ClassSpace, pi: PermutationGate) -> np.ndarray:
    """Half turn on the states where every active wire of pi is 1."""
    mask = active_wires(pi)
    xs = np.arange(1 << space.n, dtype=np.int64)
    return np.where(xs & mask == mask, 1 << (space.log_denom - 1), 0)


def filter_masks(space: ClassSpace, digits: np.ndarray, phases: np.ndarray,
                 pi: PermutationGate) -> Dict[str, np.ndarray]:
    """Per-filter exclusion masks for a block of classes."""
    M = space.log_denom
    B, size = phases.shape
    out = {}

    spectral = np.zeros(B, dtype=bool)
    if M > 2:
        xs = np.arange(size, dtype=np.int64)
        quarter = 1 << (M - 2)
        for s in range(1, size):
            g = phases[:, xs ^ s] - phases
            g = (g - g[:, :1]) % (1 << M)
            spectral |= (g % quarter != 0).any(axis=1)
    out[SPECTRAL] = spectral

    known = _known_case(space, pi)
    out[KNOWN_SEMI_CLIFFORD] = ((phases - known[None, :]) % (1 << M) == 0).all(axis=1)

    wires = space.support_masks(digits) | active_wires(pi)
    out[SUPPORT] = np.array([bin(int(w)).count("1") <= 3 for w in wires], dtype=bool)

    if space.mirror_safe:
        out[INVERSE_SYMMETRY] = space.encode(space.mirror(digits)) < space.encode(digits)
    else:
        out[INVERSE_SYMMETRY] = np.zeros(B, dtype=bool)
    return out


def exclusion_filters(dc: AnyClass, pi: PermutationGate,
                      order: Optional[Sequence[str]] = None) -> Optional[str]:
    """First filter that excludes the class, or None."""
    order = list(order if order is not None else _setting("FilterOrder"))
    space = dc.space
    digits = np.array([dc.digits], dtype=np.int64)
    masks = filter_masks(space, digits, space.phases(digits), pi)
    for name in order:
        if masks[name][0]:
            return name
    return None
#endregion


#region Sweep
@dataclass
class SweepReport:
    space: str
    pi: List[str]
    filters_enabled: bool
    classes_total: int
    classes_excluded_by: Dict[str, int]
    classes_checked: int
    survivors: int
    offenders: List[Dict[str, Any]] = field(default_factory=list)
    cross_check_sampled: int = 0
    cross_check_mismatches: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return ALL_SEMI_CLIFFORD if not self.offenders else NON_SEMI_CLIFFORD_FOUND

    @property
    def consistent(self) -> bool:
        return sum(self.classes_excluded_by.values()) + self.classes_checked == self.classes_total

    def to_dict(self) -> Dict[str, Any]:
        return {
            "convention": "qubit 0 is the most significant bit of the state index",
            "space": self.space,
            "pi": self.pi,
            "filters_enabled": self.filters_enabled,
            "classes_total": self.classes_total,
            "classes_excluded_by": dict(self.classes_excluded_by),
            "classes_checked": self.classes_checked,
            "survivors": self.survivors,
            "offenders": self.offenders,
            "cross_check": {"sampled": self.cross_check_sampled, "mismatches": self.cross_check_mismatches},
            "verdict": self.verdict,
        }


def _check_block(space: ClassSpace, digits: np.ndarray, pi: PermutationGate, order: Sequence[str],
                 use_filters: bool) -> Dict[str, Any]:
    """Filters then the X-string Clifford test with early exit, for one block of classes."""
    phases = space.phases(digits)
    B, size = phases.shape
    M = space.log_denom
    indices = space.encode(digits)
    excluded = np.zeros(B, dtype=bool)
    counts = {name: 0 for name in order}
    if use_filters:
        masks = filter_masks(space, digits, phases, pi)
        for name in order:
            hit = masks[name] & ~excluded
            counts[name] = int(hit.sum())
            for i in np.flatnonzero(hit):
                logger.debug("%s class %d excluded by %s (%s)", space.name, indices[i], name, EXCLUSION_REASONS[name])
            excluded |= hit

    alive = np.flatnonzero(~excluded)
    in_ch3 = np.ones(alive.shape[0], dtype=bool)
    pi_arr = np.array(pi.table, dtype=np.int64)
    ident = np.arange(size, dtype=np.int64)
    for s in range(size):
        rows = np.flatnonzero(in_ch3)
        if rows.size == 0:
            break
        conj = pi_x_d_batch(pi_arr, phases[alive[rows]], s)
        perms = np.broadcast_to(ident, conj.shape)
        ok = kernels.is_clifford_batch(perms, conj % (1 << M), M)
        in_ch3[rows[~ok]] = False
    return {
        "counts": counts,
        "checked": [int(indices[i]) for i in alive],
        "in_ch3": [int(indices[i]) for i in alive[in_ch3]],
    }


def _sweep_worker(args):
    space, start, stop, pi_table, order, use_filters = args
    pi = PermutationGate(space.n, pi_table)
    digits = space.decode(np.arange(start, stop, dtype=np.int64))
    return _check_block(space, digits, pi, order, use_filters)


def algorithm1(pi_reps: Optional[Sequence[PermutationGate]] = None, classes: Optional[Iterable[AnyClass]] = None,
               space: Optional[ClassSpace] = None, use_filters: bool = True, workers: int = 1,
               cross_check_fraction: Optional[float] = None, seed: Optional[int] = None,
               progress: bool = False) -> SweepReport:
    """Check every class: all X-string conjugates Clifford means ``pi d`` is third level,
    and each such gate must be semi-Clifford."""
    pi_reps = list(pi_reps) if pi_reps is not None else default_pi_reps()
    order = tuple(_setting("FilterOrder"))
    unknown = [f for f in order if f not in FILTERS]
    if unknown:
        raise ValueError(f"unknown filters {unknown}")
    fraction = float(_setting("CrossCheckFraction")) if cross_check_fraction is None else cross_check_fraction
    rng = random.Random(int(_setting("Seed")) if seed is None else seed)
    chunk = int(_setting("ChunkSize"))

    if classes is not None:
        classes = list(classes)
        space = classes[0].space if classes else (space or target_space())
        blocks = [np.array([c.digits for c in classes], dtype=np.int64)] if classes else []
        total_per_pi = len(classes)
    else:
        space = space or target_space()
        blocks = None
        total_per_pi = space.size

    counts = {name: 0 for name in order}
    checked = survivors = 0
    offenders, mismatches = [], []
    sampled = 0
    for pi in pi_reps:
        if blocks is not None:
            results = [_check_block(space, b, pi, order, use_filters) for b in blocks]
        else:
            tasks = [(space, start, min(space.size, start + chunk), pi.table, order, use_filters)
                     for start in range(0, space.size, chunk)]
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers, initializer=SettingsManager.restore,
                                         initargs=(SettingsManager.get_instance().snapshot(),)) as pool:
                    results = list(tqdm(pool.map(_sweep_worker, tasks, chunksize=4), total=len(tasks),
                                        desc=f"sweep {space.name}", disable=not progress))
            else:
                results = [_sweep_worker(t) for t in tqdm(tasks, desc=f"sweep {space.name}", disable=not progress)]

        pi_name = canonical_notation(to_cycle_structure(pi))
        pi_mono = pi.to_monomial()
        for res in results:
            for name, v in res["counts"].items():
                counts[name] += v
            checked += len(res["checked"])
            for index in res["in_ch3"]:
                survivors += 1
                d = build_diagonal(_class_of(space, index))
                if not is_semi_clifford(compose(pi_mono, d)):
                    offenders.append({"pi": pi_name, "class_index": index,
                                      "digits": [int(v) for v in space.decode(np.array([index]))[0]]})
                    logger.warning("offender: pi=%s class %d is third level and not semi-Clifford", pi_name, index)
            in3 = set(res["in_ch3"])
            for index in res["checked"]:
                if rng.random() >= fraction:
                    continue
                sampled += 1
                d = build_diagonal(_class_of(space, index))
                direct = level(compose(pi_mono, d), cap=3).at_most(3)
                if direct != (index in in3):
                    mismatches.append({"pi": pi_name, "class_index": index, "direct": direct})
                    logger.warning("cross-check mismatch on class %d: direct=%s", index, direct)

    report = SweepReport(space.name, [canonical_notation(to_cycle_structure(p)) for p in pi_reps], use_filters,
                         total_per_pi * len(pi_reps), counts, checked, survivors, offenders, sampled, mismatches)
    logger.info("sweep %s: %d classes, %d checked, %d third level, verdict %s",
                space.name, report.classes_total, checked, survivors, report.verdict)
    return report


def _class_of(space: ClassSpace, index: int) -> AnyClass:
    digits = space.decode(np.array([index]))[0]
    if space.name == "full":
        return FullDiagClass.from_digits(digits)
    return DiagClass.from_digits(digits, space.coords[-1].log_root)
#endregion


#region Target-support reduction
def x_string_test(pi: PermutationGate, d: MonomialOperator) -> bool:
    """True when every ``pi X^s d X^s d^-1 pi^-1`` is Clifford."""
    g = d.gauge_fixed()
    phases = np.array([g.phase_num], dtype=np.int64)
    M = max(g.phase_log_denom, 1)
    phases = phases << (M - g.phase_log_denom)
    pi_arr = np.array(pi.table, dtype=np.int64)
    ident = np.arange(phases.shape[1], dtype=np.int64)
    for s in range(phases.shape[1]):
        conj = pi_x_d_batch(pi_arr, phases, s) % (1 << M)
        if not kernels.is_clifford_batch(np.broadcast_to(ident, conj.shape), conj, M)[0]:
            return False
    return True


def off_target_reduction_agrees(pi: PermutationGate, dc: FullDiagClass) -> bool:
    """When the off-target factor is third level, dropping it leaves the outcome unchanged."""
    targets = [w for w in range(pi.n) if target_wires(pi) & wire_bit(pi.n, w)]
    off = build_diagonal(dc.off_target_part(targets))
    if not diagonal_level(off).at_most(3):
        return True
    on = build_diagonal(dc.restrict_to_target_support(targets))
    return x_string_test(pi, build_diagonal(dc)) == x_string_test(pi, on)
#endregion
