"""Affine equivalence of permutations and of cycle structures.

Two actions are supported: the two-sided action ``P -> L P R`` used for the
full permutation census, and the conjugation action ``P -> L P L^-1`` which
maps every column ``v`` of a cycle structure to ``Av + b``.
"""
import itertools
import logging
import math
import os
import random
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from ...common.errors import DecompositionError, GuardExceededError, VerificationError
from ...common.settings import ComponentSettings
from ...common.settings_manager import SettingsManager
from ..gates.gates import (CCX, MCX, Circuit, CycleStructure, PermutationGate, add_control, affine_conjugate,
                           canonical_notation, circuit_to_permutation, controlled_parent,
                           from_cycle_structure, permutation_order, to_cycle_structure, wire_bit)
from ..gf2_linear.gf2_linear import (AffineMap, BitMatrix, BitVec, affine_map_of_table, affine_map_to_table,
                                     affine_rank, invert_matrix, random_affine_map, rank_of_words)
from ..hierarchy.hierarchy import (Level, LevelOracle, LevelVerdict, NotInCHUpTo, default_cap, is_semi_clifford,
                                   level, verdict_from_dict, verdict_to_dict)
from ..pauli_monomial import kernels
from ..pauli_monomial.pauli_monomial import MonomialOperator, compose, inverse

logger = logging.getLogger("OrbitEnumerator")

UNRESOLVED = "unresolved"

Table = Tuple[int, ...]
Canon = Tuple[Tuple[int, ...], ...]


def _setting(name: str):
    return ComponentSettings.AFFINE_CLASSIFY.get_value(name)


def resolve_workers(workers: Optional[int] = None) -> int:
    workers = int(_setting("Workers")) if workers is None else workers
    return workers if workers > 0 else (os.cpu_count() or 1)


class EquivalenceAction(Enum):
    TWO_SIDED = "two_sided"
    CONJUGATION = "conjugation"


#region Generators
def cnot_table(n: int, control: int, target: int) -> Table:
    c, t = wire_bit(n, control), wire_bit(n, target)
    return tuple(x ^ t if x & c else x for x in range(1 << n))


def x_table(n: int, wire: int) -> Table:
    b = wire_bit(n, wire)
    return tuple(x ^ b for x in range(1 << n))


def shift_table(n: int) -> Table:
    """Wire ``w`` moves to wire ``w + 1 (mod n)``."""
    out = []
    for x in range(1 << n):
        y = 0
        for w in range(n):
            if x & wire_bit(n, w):
                y |= wire_bit(n, (w + 1) % n)
        out.append(y)
    return tuple(out)


def affine_generators(n: int) -> List[PermutationGate]:
    """All CNOTs followed by all single-qubit X permutations."""
    gens = [PermutationGate(n, cnot_table(n, c, t)) for c in range(n) for t in range(n) if c != t]
    gens += [PermutationGate(n, x_table(n, w)) for w in range(n)]
    return gens


def minimal_affine_generators(n: int) -> List[PermutationGate]:
    """X on wire 0, CNOT 0->1 and the cyclic wire shift; they generate AGL(n, 2)."""
    gens = [PermutationGate(n, x_table(n, 0))]
    if n >= 2:
        gens.append(PermutationGate(n, cnot_table(n, 0, 1)))
        gens.append(PermutationGate(n, shift_table(n)))
    return gens


def agl_order(n: int) -> int:
    order = 1 << n
    for i in range(n):
        order *= (1 << n) - (1 << i)
    return order


def group_closure(gens: Sequence[PermutationGate]) -> set:
    n = gens[0].n
    start = tuple(range(1 << n))
    seen = {start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for g in gens:
            nxt = tuple(g.table[y] for y in t)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen
#endregion


#region Invariant profiles
def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis."""
    a = np.array(a, dtype=np.int64, copy=True)
    size = a.shape[-1]
    h = 1
    while h < size:
        v = a.reshape(a.shape[:-1] + (size // (2 * h), 2, h))
        x = v[..., 0, :].copy()
        y = v[..., 1, :]
        v[..., 0, :] += y
        v[..., 1, :] = x - y
        h *= 2
    return a


def difference_distribution_table(table: Sequence[int]) -> np.ndarray:
    t = np.asarray(table, dtype=np.int64)
    size = t.shape[0]
    xs = np.arange(size, dtype=np.int64)
    out = np.zeros((size, size), dtype=np.int64)
    for a in range(size):
        out[a] = np.bincount(t[xs ^ a] ^ t, minlength=size)
    return out


def walsh_table(table: Sequence[int]) -> np.ndarray:
    """``W[b, a] = sum_x (-1)^(b . p(x) + a . x)``."""
    t = np.asarray(table, dtype=np.int64)
    size = t.shape[0]
    par = kernels.parity_table(size)
    signs = 1 - 2 * par[np.arange(size, dtype=np.int64)[:, None] & t[None, :]]
    return fwht(signs)


def degree_spectrum(table: Sequence[int]) -> Tuple[Tuple[int, int], ...]:
    """Multiset of algebraic degrees of the nonzero component functions."""
    t = np.asarray(table, dtype=np.int64)
    size = t.shape[0]
    n = kernels.qubits_of(size)
    par = kernels.parity_table(size)
    anf = par[np.arange(size, dtype=np.int64)[:, None] & t[None, :]].copy()
    for i in range(n):
        v = anf.reshape(size, -1, 2, 1 << i)
        v[:, :, 1, :] ^= v[:, :, 0, :]
    weights = np.array([bin(x).count("1") for x in range(size)], dtype=np.int64)
    degrees = (anf[1:] * weights[None, :]).max(axis=1)
    return _spectrum(degrees)


def _spectrum(values) -> Tuple[Tuple[int, int], ...]:
    counts = Counter(int(v) for v in np.asarray(values).ravel())
    return tuple(sorted(counts.items()))


@dataclass(frozen=True)
class AEInvariantProfile:
    ddt_spectrum: Tuple[Tuple[int, int], ...]
    lat_spectrum: Tuple[Tuple[int, int], ...]
    degree_spectrum: Tuple[Tuple[int, int], ...]
    cycle_type_of_orbit: Optional[Tuple[int, ...]] = None
    cycle_rank_profile: Optional[Tuple[Tuple[int, int], ...]] = None
    level: Optional[LevelVerdict] = None

    def spectra(self):
        return self.ddt_spectrum, self.lat_spectrum, self.degree_spectrum

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "ddt_spectrum": [list(p) for p in self.ddt_spectrum],
            "lat_spectrum": [list(p) for p in self.lat_spectrum],
            "degree_spectrum": [list(p) for p in self.degree_spectrum],
        }
        if self.cycle_type_of_orbit is not None:
            out["cycle_type"] = list(self.cycle_type_of_orbit)
        if self.cycle_rank_profile is not None:
            out["cycle_rank_profile"] = [list(p) for p in self.cycle_rank_profile]
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AEInvariantProfile":
        def pairs(key):
            return tuple(tuple(p) for p in data.get(key, ()))
        cycle_type = data.get("cycle_type")
        ranks = data.get("cycle_rank_profile")
        return cls(pairs("ddt_spectrum"), pairs("lat_spectrum"), pairs("degree_spectrum"),
                   tuple(cycle_type) if cycle_type is not None else None,
                   tuple(tuple(p) for p in ranks) if ranks is not None else None)


def cycle_rank_profile(cs: CycleStructure) -> Tuple[Tuple[int, int], ...]:
    """Sorted ``(length, affine rank)`` per cycle, closed by ``(0, rank of all states)``."""
    per_cycle = sorted((len(c), affine_rank(list(c), cs.n)) for c in cs.int_cycles)
    return tuple(per_cycle) + ((0, affine_rank(cs.states, cs.n) if cs.states else -1),)


def ae_profile(p: PermutationGate, action: EquivalenceAction = EquivalenceAction.TWO_SIDED,
               with_level: bool = False) -> AEInvariantProfile:
    ddt = difference_distribution_table(p.table)
    lat = np.abs(walsh_table(p.table))
    cycle_type = rank_profile = None
    if action is EquivalenceAction.CONJUGATION:
        cs = to_cycle_structure(p)
        cycle_type = cs.shape
        rank_profile = cycle_rank_profile(cs)
    verdict = level(p.to_monomial()) if with_level else None
    return AEInvariantProfile(_spectrum(ddt), _spectrum(lat), degree_spectrum(p.table),
                              cycle_type, rank_profile, verdict)
#endregion


#region Class records
@dataclass
class ClassRecord:
    n: int
    representative: Union[PermutationGate, CycleStructure]
    action: EquivalenceAction
    profile: AEInvariantProfile
    level: LevelVerdict
    semi_clifford: Optional[bool] = None
    size: Optional[int] = None
    in_ch_reason: str = "direct"
    shape: Optional[Tuple[int, ...]] = None

    @property
    def in_ch(self) -> bool:
        return self.level.in_ch

    @property
    def permutation(self) -> PermutationGate:
        rep = self.representative
        return from_cycle_structure(rep) if isinstance(rep, CycleStructure) else rep

    @property
    def structure(self) -> CycleStructure:
        rep = self.representative
        return rep if isinstance(rep, CycleStructure) else to_cycle_structure(rep)

    @property
    def notation(self) -> str:
        return canonical_notation(self.structure)

    @property
    def order(self) -> int:
        return permutation_order(self.structure)

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "representative_cycles": [list(c) for c in self.structure.int_cycles],
            "notation": self.notation,
            "order": self.order,
            "in_ch": self.in_ch,
            "in_ch_reason": self.in_ch_reason,
            "semi_clifford": self.semi_clifford,
            "size": self.size,
        }
        out.update(verdict_to_dict(self.level))
        out.update(self.profile.to_dict())
        if self.action is EquivalenceAction.TWO_SIDED:
            out["table"] = list(self.permutation.table)
        return out

    @classmethod
    def from_dict(cls, n: int, action: EquivalenceAction, data: Dict[str, Any],
                  shape: Optional[Sequence[int]] = None) -> "ClassRecord":
        if "table" in data:
            rep = PermutationGate(n, tuple(data["table"]))
        else:
            rep = CycleStructure.from_ints(n, data["representative_cycles"])
        return cls(n, rep, action, AEInvariantProfile.from_dict(data), verdict_from_dict(data),
                   data.get("semi_clifford"), data.get("size"), data.get("in_ch_reason", "direct"),
                   tuple(shape) if shape is not None else None)
#endregion


#region Two-sided census
@dataclass
class CensusReport:
    n: int
    classes: List[ClassRecord]
    total_permutations: int

    @property
    def in_ch_count(self) -> int:
        return sum(1 for r in self.classes if r.in_ch)


def count_ae_classes_full(n: int, action: EquivalenceAction = EquivalenceAction.TWO_SIDED,
                          progress: bool = False) -> CensusReport:
    """Connected components of all ``(2**n)!`` permutations under left and right generator moves."""
    if action is not EquivalenceAction.TWO_SIDED:
        raise ValueError("the full census uses the two-sided action")
    limit = int(_setting("MaxFullCensusQubits"))
    if n > limit:
        raise GuardExceededError(f"full census on {n} qubits exceeds the limit of {limit}")
    size = 1 << n
    gens = [g.table for g in affine_generators(n)]
    visited = set()
    classes = []
    total = math.factorial(size)
    bar = tqdm(total=total, desc=f"census n={n}", disable=not progress, leave=False)
    for start in itertools.permutations(range(size)):
        if start in visited:
            continue
        visited.add(start)
        queue = deque([start])
        members = 0
        while queue:
            p = queue.popleft()
            members += 1
            for g in gens:
                for nxt in (tuple(g[y] for y in p), tuple(p[y] for y in g)):
                    if nxt not in visited:
                        visited.add(nxt)
                        queue.append(nxt)
        bar.update(members)
        rep = PermutationGate(n, start)
        verdict = level(rep.to_monomial())
        classes.append(ClassRecord(n, rep, action, ae_profile(rep), verdict,
                                   is_semi_clifford(rep.to_monomial()), members))
        logger.info("census n=%d: class %d has %d members, %s", n, len(classes), members, verdict)
    bar.close()
    if sum(r.size for r in classes) != total:
        raise VerificationError(f"census classes cover {sum(r.size for r in classes)} of {total} permutations")
    return CensusReport(n, classes, total)


census_report = count_ae_classes_full
#endregion


#region Membership sampling
def sample_orbit_member(record: ClassRecord, rng: random.Random) -> PermutationGate:
    """A random member of the record's class under its own action."""
    if record.action is EquivalenceAction.CONJUGATION:
        f = random_affine_map(record.n, rng)
        return from_cycle_structure(affine_conjugate(record.structure, f))
    left = PermutationGate.from_affine(random_affine_map(record.n, rng))
    right = PermutationGate.from_affine(random_affine_map(record.n, rng))
    return right.then(record.permutation).then(left)


def check_class_membership(records: Sequence[ClassRecord], sample_size: Optional[int] = None,
                           rng: Optional[random.Random] = None) -> List[str]:
    """Notations of classes where a sampled member disagrees with the representative on CH membership."""
    sample_size = int(_setting("CensusSampleSize")) if sample_size is None else sample_size
    rng = rng or random.Random(0)
    offenders = []
    for record in records:
        for _ in range(sample_size):
            member = sample_orbit_member(record, rng)
            if level(member.to_monomial()).in_ch != record.in_ch:
                offenders.append(record.notation)
                logger.warning("class %s: member %s disagrees on CH membership", record.notation,
                               canonical_notation(to_cycle_structure(member)))
                break
    logger.info("checked %d classes on %d members each, %d offenders", len(records), sample_size, len(offenders))
    return offenders
#endregion


#region Four-qubit representatives
FOUR_QUBIT_REPRESENTATIVES: Tuple[Tuple[str, Circuit, int], ...] = (
    ("identity", Circuit(4, ()), 1),
    ("cccx", Circuit(4, (MCX(3, on=(0, 1, 2)),)), 4),
    ("ccx", Circuit(4, (CCX(1, 2, 3),)), 3),
    ("cccx_ccx", Circuit(4, (MCX(3, on=(0, 1, 2)), CCX(0, 1, 2))), 4),
    ("ccx_ccx", Circuit(4, (CCX(0, 1, 2), CCX(1, 2, 3))), 4),
)


@dataclass
class FourQubitReport:
    names: List[str]
    levels: List[LevelVerdict]
    expected: List[int]
    profiles: List[AEInvariantProfile]
    semi_clifford: List[bool]

    @property
    def levels_match(self) -> bool:
        return all(isinstance(v, Level) and v.k == k for v, k in zip(self.levels, self.expected))

    @property
    def profiles_distinct(self) -> bool:
        spectra = [p.spectra() for p in self.profiles]
        return len(set(spectra)) == len(spectra)

    @property
    def passed(self) -> bool:
        return self.levels_match and self.profiles_distinct


def verify_4q_representatives(raise_on_failure: bool = True) -> FourQubitReport:
    names, levels, expected, profiles, sc = [], [], [], [], []
    for name, circuit, k in FOUR_QUBIT_REPRESENTATIVES:
        p = circuit_to_permutation(circuit)
        u = p.to_monomial()
        names.append(name)
        levels.append(level(u))
        expected.append(k)
        profiles.append(ae_profile(p))
        sc.append(is_semi_clifford(u))
        logger.info("4-qubit representative %s: %s (expected level %d)", name, levels[-1], k)
    report = FourQubitReport(names, levels, expected, profiles, sc)
    if raise_on_failure and not report.passed:
        raise VerificationError(f"4-qubit representatives: levels {[str(v) for v in levels]}, "
                                f"profiles distinct: {report.profiles_distinct}")
    return report
#endregion


#region Cycle structure enumeration
def _canon(cycles: Sequence[Sequence[int]]) -> Canon:
    out = []
    for c in cycles:
        c = tuple(c)
        i = c.index(max(c))
        out.append(c[i:] + c[:i])
    out.sort(reverse=True)
    return tuple(out)


def _pack(canon: Canon, n: int) -> int:
    key = 0
    for c in canon:
        key = (key << 4) | len(c)
        for v in c:
            key = (key << n) | v
    return key


def count_structures(n: int, shape: Sequence[int]) -> int:
    size = 1 << n
    used = sum(shape)
    if used > size:
        return 0
    total = math.factorial(size) // math.factorial(size - used)
    for k in shape:
        total //= k
    for mult in Counter(shape).values():
        total //= math.factorial(mult)
    return total


def enumerate_structures(n: int, shape: Sequence[int]) -> Iterator[Canon]:
    """Every canonical cycle structure of the shape, cycles ordered by decreasing maximum."""
    size = 1 << n

    def rec(remaining: Tuple[int, ...], used: frozenset, bound: int):
        if not remaining:
            yield ()
            return
        for top in range(bound - 1, -1, -1):
            if top in used:
                continue
            for k in sorted(set(remaining), reverse=True):
                rest = list(remaining)
                rest.remove(k)
                pool = [v for v in range(top) if v not in used]
                for tail in itertools.permutations(pool, k - 1):
                    cycle = (top,) + tail
                    for more in rec(tuple(rest), used | set(cycle), top):
                        yield (cycle,) + more

    if sum(shape) > size:
        return
    yield from rec(tuple(sorted(shape, reverse=True)), frozenset(), size)


def conjugate_canon(canon: Canon, table: Sequence[int]) -> Canon:
    return _canon([[table[v] for v in c] for c in canon])
#endregion


#region Hierarchy membership of cycle classes
def structure_verdict(cs: CycleStructure, cap: Optional[int] = None) -> Tuple[LevelVerdict, str]:
    """Level of the permutation with reason ``direct``, ``order`` or ``parent``.

    Controlled structures are settled by the controlled-gate rule: the order
    must be a power of two and the parent on one qubit fewer must be in the
    hierarchy; otherwise the level is computed directly.
    """
    cap = default_cap(cs.n) if cap is None else cap
    memo = LevelOracle.get_instance().structures
    key = (cs.n, _pack(cs.int_cycles, cs.n), cap)
    cached = memo.get(key)
    if cached is not None:
        return cached
    result = None
    if cs.cycles:
        parent = controlled_parent(cs)
        if parent is not None:
            order = permutation_order(cs)
            if order & (order - 1):
                result = NotInCHUpTo(cap), "order"
            else:
                parent_verdict, _ = structure_verdict(parent[0])
                if not parent_verdict.in_ch:
                    result = NotInCHUpTo(cap), "parent"
    if result is None:
        result = level(from_cycle_structure(cs).to_monomial(), cap), "direct"
    return memo.insert_or_get(key, result)


def _record_for(cs: CycleStructure, size: Optional[int], shape: Sequence[int]) -> ClassRecord:
    p = from_cycle_structure(cs)
    verdict, reason = structure_verdict(cs)
    return ClassRecord(cs.n, cs, EquivalenceAction.CONJUGATION,
                       ae_profile(p, EquivalenceAction.CONJUGATION), verdict,
                       is_semi_clifford(p.to_monomial()), size, reason, tuple(shape))
#endregion


#region Cycle-structure classification
def _check_shape(n: int, shape: Sequence[int]):
    max_shape = int(_setting("MaxShapeSize"))
    max_direct = int(_setting("MaxDirectQubits"))
    if sum(shape) > max_shape:
        raise GuardExceededError(f"shape {tuple(shape)} has more than {max_shape} elements")
    if n > max_direct:
        raise GuardExceededError(f"direct enumeration on {n} qubits exceeds the limit of {max_direct}")
    if any(k < 2 for k in shape):
        raise ValueError("cycle lengths must be at least 2")


def classify_cycle_structures(n: int, shape: Sequence[int], progress: bool = False) -> List[ClassRecord]:
    """Orbits of all cycle structures of ``shape`` under affine conjugation, one record per class."""
    shape = tuple(sorted(shape, reverse=True))
    _check_shape(n, shape)
    if not shape:
        return [_record_for(CycleStructure(n, ()), 1, shape)]
    total = count_structures(n, shape)
    if total == 0:
        return []
    gens = [g.table for g in minimal_affine_generators(n)]
    visited = set()
    reps: List[Tuple[Canon, int]] = []
    bar = tqdm(total=total, desc=f"n={n} {shape}", disable=not progress, leave=False)
    for start in enumerate_structures(n, shape):
        key = _pack(start, n)
        if key in visited:
            continue
        visited.add(key)
        queue = deque([start])
        members = 0
        while queue:
            cur = queue.popleft()
            members += 1
            for g in gens:
                nxt = conjugate_canon(cur, g)
                k = _pack(nxt, n)
                if k not in visited:
                    visited.add(k)
                    queue.append(nxt)
        bar.update(members)
        reps.append((start, members))
        logger.debug("n=%d %s: class %d of size %d", n, shape, len(reps), members)
    bar.close()
    covered = sum(size for _, size in reps)
    if covered != total:
        raise VerificationError(f"n={n} {shape}: classes cover {covered} of {total} structures")
    records = [_record_for(CycleStructure.from_ints(n, canon), size, shape) for canon, size in reps]
    records.sort(key=lambda r: r.notation)
    logger.info("n=%d %s: %d classes, %d in CH", n, shape, len(records), sum(r.in_ch for r in records))
    return records


def _classify_cell(args):
    n, shape = args
    return n, shape, [r.to_dict() for r in classify_cycle_structures(n, shape)]


def classify_cells(cells: Sequence[Tuple[int, Tuple[int, ...]]], workers: Optional[int] = None,
                   progress: bool = False) -> Dict[Tuple[int, Tuple[int, ...]], List[ClassRecord]]:
    """Classify independent ``(n, shape)`` cells, in parallel when more than one worker is allowed."""
    workers = min(resolve_workers(workers), max(1, len(cells)))
    if workers == 1:
        results = [_classify_cell(c) for c in tqdm(cells, desc="cells", disable=not progress)]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=SettingsManager.restore,
                                 initargs=(SettingsManager.get_instance().snapshot(),)) as pool:
            results = list(tqdm(pool.map(_classify_cell, cells), total=len(cells), desc="cells",
                                disable=not progress))
    return {(n, shape): [ClassRecord.from_dict(n, EquivalenceAction.CONJUGATION, d, shape) for d in dicts]
            for n, shape, dicts in results}
#endregion


#region Exact conjugation test
def _affine_from_points(a: Sequence[int], b: Sequence[int], n: int) -> Optional[AffineMap]:
    """An affine bijection sending ``a[i]`` to ``b[i]``, if one exists."""
    da = [v ^ a[0] for v in a]
    db = [v ^ b[0] for v in b]
    ra = rank_of_words(da, n)
    if ra != rank_of_words(db, n) or ra != rank_of_words(((x << n) | y for x, y in zip(da, db)), 2 * n):
        return None
    src, dst = [], []
    for x, y in zip(da, db):
        if rank_of_words(src + [x], n) > len(src):
            src.append(x)
            dst.append(y)
    for side in (src, dst):
        for w in range(n):
            if len(side) == n:
                break
            unit = wire_bit(n, w)
            if rank_of_words(side + [unit], n) > len(side):
                side.append(unit)
    linear = BitMatrix.from_columns(n, dst) @ invert_matrix(BitMatrix.from_columns(n, src))
    return AffineMap(linear, BitVec(n, linear.mul_vec(a[0]) ^ b[0]))


def cycle_structures_affinely_equivalent(a: CycleStructure, b: CycleStructure,
                                         budget: Optional[int] = None) -> Union[AffineMap, None, str]:
    """An affine ``f`` with ``f a f^-1 = b``, None when there is none, ``UNRESOLVED`` past the budget."""
    budget = int(_setting("AlignmentBudget")) if budget is None else budget
    if a.n != b.n or a.shape != b.shape:
        return None
    if not a.cycles:
        return AffineMap.identity(a.n)
    by_len_a: Dict[int, List[Tuple[int, ...]]] = {}
    by_len_b: Dict[int, List[Tuple[int, ...]]] = {}
    for c in a.int_cycles:
        by_len_a.setdefault(len(c), []).append(c)
    for c in b.int_cycles:
        by_len_b.setdefault(len(c), []).append(c)
    lengths = sorted(by_len_a)
    src = [v for k in lengths for c in by_len_a[k] for v in c]

    def arrangements(k: int):
        cycles = by_len_b[k]
        for order in itertools.permutations(cycles):
            for shifts in itertools.product(range(k), repeat=len(order)):
                yield [v for c, s in zip(order, shifts) for v in c[s:] + c[:s]]

    tried = 0
    for combo in itertools.product(*(list(arrangements(k)) for k in lengths)):
        tried += 1
        if tried > budget:
            return UNRESOLVED
        dst = [v for part in combo for v in part]
        f = _affine_from_points(src, dst, a.n)
        if f is not None:
            return f
    return None
#endregion


#region Extension to more qubits
def full_rank_class(n: int, shape: Sequence[int]) -> CycleStructure:
    """Cycles laid over the affine basis ``0, e_0, ..., e_{n-1}``; needs ``sum(shape) == n + 1``."""
    if sum(shape) != n + 1:
        raise ValueError(f"a full-rank structure on {n} qubits has {n + 1} states, shape {tuple(shape)} has {sum(shape)}")
    points = [0] + [wire_bit(n, w) for w in range(n)]
    cycles, start = [], 0
    for k in sorted(shape, reverse=True):
        cycles.append(points[start:start + k])
        start += k
    return CycleStructure.from_ints(n, cycles)


class UnionFind:
    def __init__(self, size: int):
        self._parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self._parent[max(rx, ry)] = min(rx, ry)
        return True


@dataclass
class ExtensionReport:
    n: int
    shape: Tuple[int, ...]
    records: List[ClassRecord]
    unresolved_pairs: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def resolved(self) -> bool:
        return not self.unresolved_pairs


def extend_classification(records: Sequence[ClassRecord], budget: Optional[int] = None,
                          progress: bool = False) -> ExtensionReport:
    """Classes on ``n + 1`` qubits from controlled ``n``-qubit representatives plus the full-rank class."""
    if not records:
        raise ValueError("nothing to extend")
    n = records[0].n
    shape = tuple(sorted(records[0].structure.shape, reverse=True))
    if sum(shape) > n + 2:
        # past n + 2 states the full-rank classes are no longer unique
        raise GuardExceededError(f"shape {shape} moves {sum(shape)} states, more than {n + 2} for n={n}")
    candidates = [add_control(r.structure, 1) for r in records]
    if sum(shape) == n + 2:
        candidates.append(full_rank_class(n + 1, shape))
    profiles = [ae_profile(from_cycle_structure(c), EquivalenceAction.CONJUGATION) for c in candidates]

    uf = UnionFind(len(candidates))
    unresolved = []
    pairs = [(i, j) for i in range(len(candidates)) for j in range(i + 1, len(candidates))
             if profiles[i] == profiles[j]]
    for i, j in tqdm(pairs, desc=f"align n={n + 1} {shape}", disable=not progress, leave=False):
        if uf.find(i) == uf.find(j):
            continue
        found = cycle_structures_affinely_equivalent(candidates[i], candidates[j], budget)
        if found == UNRESOLVED:
            unresolved.append((canonical_notation(candidates[i]), canonical_notation(candidates[j])))
            logger.warning("n=%d %s: could not decide %s against %s within budget",
                           n + 1, shape, *unresolved[-1])
        elif found is not None:
            uf.union(i, j)

    out = [_record_for(candidates[i], None, shape) for i in range(len(candidates)) if uf.find(i) == i]
    out.sort(key=lambda r: r.notation)
    logger.info("n=%d %s: %d classes, %d in CH, %d unresolved pairs",
                n + 1, shape, len(out), sum(r.in_ch for r in out), len(unresolved))
    return ExtensionReport(n + 1, shape, out, unresolved)
#endregion


#region Monomial Clifford equivalence
def split_monomial(g: MonomialOperator) -> Tuple[AffineMap, MonomialOperator]:
    """Write ``g = A . D`` with ``A`` an affine permutation and ``D`` diagonal."""
    f = affine_map_of_table(g.perm, g.n)
    if f is None:
        raise DecompositionError("permutation part of the monomial Clifford is not affine")
    d = MonomialOperator.diagonal(g.n, g.phase_num, g.phase_log_denom)
    return f, d


def monomial_equiv_implies_affine(p1: PermutationGate, p2: PermutationGate,
                                  g_left: MonomialOperator, g_right: MonomialOperator) -> bool:
    """Given ``g_left p1 g_right = p2``, the affine parts alone already relate the permutations."""
    product = compose(compose(g_left, p1.to_monomial()), g_right)
    if product.perm != p2.table or product.gauge_fixed().phase_log_denom:
        raise DecompositionError("g_left . p1 . g_right is not the permutation p2")
    a_left, _ = split_monomial(g_left)
    a_right, _ = split_monomial(g_right)
    table = tuple(a_left.apply_int(p1.table[a_right.apply_int(x)]) for x in range(1 << p1.n))
    return table == p2.table


def random_diagonal_clifford(n: int, rng: random.Random) -> MonomialOperator:
    """Random product of S, Z and CZ phases, numerators over 4."""
    phase = []
    s = [rng.randrange(4) for _ in range(n)]
    cz = {(i, j): rng.randrange(2) for i in range(n) for j in range(i + 1, n)}
    for x in range(1 << n):
        bits = [(x >> (n - 1 - w)) & 1 for w in range(n)]
        v = sum(s[w] * bits[w] for w in range(n))
        v += sum(2 * c * bits[i] * bits[j] for (i, j), c in cz.items())
        phase.append(v)
    return MonomialOperator.diagonal(n, phase, 2)


def sample_monomial_clifford_equivalence(p1: PermutationGate, rng: random.Random):
    """Draw ``A_L, D_L, A_R`` freely and fix ``D_R = A_R^-1 P1^-1 D_L^-1 P1 A_R``.

    Returns ``(p2, g_left, g_right)`` with ``g_left = A_L D_L`` and ``g_right = A_R D_R``.
    """
    n = p1.n
    a_left = MonomialOperator.permutation(n, affine_map_to_table(random_affine_map(n, rng)))
    a_right = MonomialOperator.permutation(n, affine_map_to_table(random_affine_map(n, rng)))
    d_left = random_diagonal_clifford(n, rng)
    pm = p1.to_monomial()
    d_right = compose(compose(compose(compose(inverse(a_right), inverse(pm)), inverse(d_left)), pm), a_right)
    g_left = compose(a_left, d_left)
    g_right = compose(a_right, d_right)
    p2_mono = compose(compose(a_left, pm), a_right)
    return PermutationGate(n, p2_mono.perm), g_left, g_right
#endregion
