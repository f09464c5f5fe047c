"""Clifford hierarchy levels of monomial operators and the diagonal groups D_k, Diag_k."""
import itertools
import logging
import threading
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Union

import numpy as np

from ...common.errors import DimensionMismatchError, GuardExceededError
from ...common.memo_table import MemoTable
from ...common.settings import ComponentSettings
from ..gf2_linear.gf2_linear import BitVec, max_isotropic_dim, rref_rows
from ..pauli_monomial import kernels
from ..pauli_monomial.pauli_monomial import MonomialOperator

logger = logging.getLogger("LevelOracle")


#region Verdicts
@dataclass(frozen=True)
class Level:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("levels start at 1")

    @property
    def in_ch(self) -> bool:
        return True

    def at_most(self, k: int) -> bool:
        return self.k <= k

    def __str__(self):
        return f"Level {self.k}"


@dataclass(frozen=True)
class NotInCHUpTo:
    cap: int

    @property
    def in_ch(self) -> bool:
        return False

    def at_most(self, k: int) -> bool:
        return False

    def __str__(self):
        return f"Not in CH up to level {self.cap}"


LevelVerdict = Union[Level, NotInCHUpTo]


def verdict_to_dict(v: LevelVerdict) -> Dict[str, int]:
    return {"level": v.k} if isinstance(v, Level) else {"not_in_ch_up_to": v.cap}


def verdict_from_dict(data: Mapping[str, int]) -> LevelVerdict:
    return Level(data["level"]) if "level" in data else NotInCHUpTo(data["not_in_ch_up_to"])
#endregion


def default_cap(n: int) -> int:
    return n + int(ComponentSettings.HIERARCHY.get_value("LevelCapMargin"))


def _single(u: MonomialOperator):
    return u.perm_array[None, :], u.phase_array[None, :], u.phase_log_denom


#region Clifford recognition
def is_pauli(u: MonomialOperator) -> bool:
    return bool(kernels.is_pauli_batch(*_single(u))[0])


def is_clifford(u: MonomialOperator) -> bool:
    """Every generator X_i, Z_i conjugates to a Pauli."""
    return bool(kernels.is_clifford_batch(*_single(u))[0])


def good_pauli_space(u: MonomialOperator) -> List[int]:
    """Basis of ``{(s|b) : u X^s Z^b u^dagger is a Pauli}`` as packed ``2n``-bit words."""
    cp, cph, M = kernels.conjugate_all(u.perm_array, u.phase_array, u.phase_log_denom)
    good = np.flatnonzero(kernels.is_pauli_batch(cp, cph, M))
    basis, _ = rref_rows((int(i) for i in good), 2 * u.n)
    return basis


def is_semi_clifford(u: MonomialOperator) -> bool:
    """``u`` maps some maximal abelian Pauli subgroup into the Pauli group."""
    basis = good_pauli_space(u)
    if len(basis) < u.n:
        return False
    return max_isotropic_dim([BitVec(2 * u.n, v) for v in basis]) >= u.n
#endregion


#region Level oracle
_EXACT = "exact"
_FLOOR = "floor"


class LevelOracle:
    """Memoized level recursion over gauge-normalized monomials.

    Memo entries are either the exact level or a floor ``f`` meaning level > f.
    ``structures`` holds verdicts of whole cycle structures keyed with their cap.
    """
    _instance = None
    _LOCK = threading.RLock()

    @classmethod
    def get_instance(cls) -> "LevelOracle":
        if cls._instance is None:
            with cls._LOCK:
                if cls._instance is None:
                    cls._instance = cls()
        return cls._instance

    @classmethod
    def reset(cls):
        with cls._LOCK:
            cls._instance = None

    def __init__(self, memo_limit: Optional[int] = None, chunk: Optional[int] = None):
        if memo_limit is None:
            memo_limit = int(ComponentSettings.HIERARCHY.get_value("MemoLimit"))
        self.chunk = int(chunk or ComponentSettings.HIERARCHY.get_value("BatchChunk"))
        self.memo = MemoTable(memo_limit)
        self.structures = MemoTable(memo_limit)

    def level(self, u: MonomialOperator, cap: Optional[int] = None) -> LevelVerdict:
        cap = default_cap(u.n) if cap is None else cap
        if cap < 1:
            raise ValueError("cap must be at least 1")
        found = self._level(u.perm_array, u.phase_array, u.phase_log_denom, cap)
        logger.debug("level of %d-qubit operator under cap %d: %s", u.n, cap, found)
        return NotInCHUpTo(cap) if found is None else Level(found)

    def _level(self, perm: np.ndarray, phase: np.ndarray, m: int, cap: int) -> Optional[int]:
        key = kernels.key_of(perm, phase, m)
        cached = self.memo.get(key)
        if cached is not None:
            kind, value = cached
            if kind == _EXACT:
                return value if value <= cap else None
            if value >= cap:
                return None

        found = self._compute(perm, phase, m, cap)
        if found is None:
            def merge(old):
                if old is not None and (old[0] == _EXACT or old[1] >= cap):
                    return old
                return _FLOOR, cap
            self.memo.update(key, merge)
        else:
            self.memo.update(key, lambda old: (_EXACT, found))
        return found

    def _compute(self, perm: np.ndarray, phase: np.ndarray, m: int, cap: int) -> Optional[int]:
        P, Ph = perm[None, :], phase[None, :]
        if kernels.is_pauli_batch(P, Ph, m)[0]:
            return 1
        if cap < 2:
            return None
        if kernels.is_clifford_batch(P, Ph, m)[0]:
            return 2
        if cap < 3:
            return None
        if (perm == np.arange(perm.shape[0])).all():
            found = _diagonal_level_of_numerators(phase, m)
            return found if found <= cap else None
        in3, _ = kernels.ch3_batch(P, Ph, m, self.chunk)
        if in3[0]:
            return 3
        if cap <= 3:
            return None

        # CH_k is not a group past level 2, so every Pauli conjugate is checked
        cp, cph, M = kernels.conjugate_all(perm, phase, m)
        cp, cph = cp[1:], cph[1:]
        idx = kernels.unique_rows(cp, cph, M)
        cp, cph = cp[idx], cph[idx]
        in3, non_clifford = kernels.ch3_batch(cp, cph, M, self.chunk)
        hard = np.flatnonzero(~in3)
        hard = hard[np.argsort(-non_clifford[hard], kind="stable")]
        best = 3
        for i in hard:
            child = self._level(cp[i], cph[i], M, cap - 1)
            if child is None:
                return None
            best = max(best, child)
        return best + 1


def level(u: MonomialOperator, cap: Optional[int] = None) -> LevelVerdict:
    return LevelOracle.get_instance().level(u, cap)
#endregion


#region Diagonal gates
def diagonal_turns(d: MonomialOperator) -> List[Fraction]:
    if not d.is_diagonal:
        raise ValueError("operator is not diagonal")
    return [d.phase_turns(x) for x in range(1 << d.n)]


def from_turns(turns: Sequence[Fraction]) -> MonomialOperator:
    """Diagonal operator with entry ``x`` equal to ``exp(2 pi i turns[x])``; dyadic turns only."""
    n = kernels.qubits_of(len(turns))
    if len(turns) != 1 << n:
        raise DimensionMismatchError(f"{len(turns)} entries is not a power of two")
    denoms = [Fraction(t).denominator for t in turns]
    if any(q & (q - 1) for q in denoms):
        raise ValueError("phases must be dyadic")
    denom = max(denoms)
    m = denom.bit_length() - 1
    return MonomialOperator.diagonal(n, [int(Fraction(t) * denom) for t in turns], m)


def diagonal_from_terms(n: int, terms: Mapping[int, Fraction]) -> MonomialOperator:
    """``prod_S exp(2 pi i c_S prod_{w in S} x_w)`` with ``S`` given as a packed wire mask."""
    turns = [sum((Fraction(c) for mask, c in terms.items() if x & mask == mask), Fraction(0))
             for x in range(1 << n)]
    return from_turns(turns)


def mobius_coefficients(phase: np.ndarray, m: int) -> np.ndarray:
    """Coefficients ``c_S`` (numerators mod ``2**m``) of the multilinear phase polynomial, indexed by wire mask."""
    a = np.array(phase, dtype=np.int64).copy()
    size = a.shape[0]
    n = kernels.qubits_of(size)
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 1, :] -= view[:, 0, :]
    return a % (1 << m) if m else np.zeros_like(a)


def _two_adic(v: int) -> int:
    return (v & -v).bit_length() - 1


def _diagonal_level_of_numerators(phase: np.ndarray, m: int) -> int:
    coeffs = mobius_coefficients(phase, m)
    best = 1
    for mask in np.flatnonzero(coeffs[1:]) + 1:
        c = int(coeffs[mask])
        j = m - _two_adic(c)
        best = max(best, bin(int(mask)).count("1") + j - 1)
    return best


def diagonal_level(d: Union[MonomialOperator, Sequence[Fraction]], cap: Optional[int] = None) -> LevelVerdict:
    """Level from the multi-controlled phase expansion; a term on wires S with
    rotation ``odd / 2**j`` turns sits at level ``|S| + j - 1``."""
    if isinstance(d, MonomialOperator):
        turns = None
        n = d.n
    else:
        turns = [Fraction(t) for t in d]
        n = kernels.qubits_of(len(turns))
    cap = default_cap(n) if cap is None else cap
    if turns is not None:
        if any(t.denominator & (t.denominator - 1) for t in turns):
            return NotInCHUpTo(cap)
        d = from_turns(turns)
    if not d.is_diagonal:
        raise ValueError("operator is not diagonal")
    g = d.gauge_fixed()
    found = _diagonal_level_of_numerators(g.phase_array, g.phase_log_denom)
    return Level(found) if found <= cap else NotInCHUpTo(cap)


def support(d: MonomialOperator) -> FrozenSet[int]:
    """Wires touched by some nonzero multi-controlled phase term."""
    g = d.gauge_fixed()
    coeffs = mobius_coefficients(g.phase_array, g.phase_log_denom)
    mask = 0
    for s in np.flatnonzero(coeffs):
        mask |= int(s)
    return frozenset(w for w in range(d.n) if mask >> (d.n - 1 - w) & 1)


def conjugate_by_permutation(d: MonomialOperator, table: Sequence[int]) -> MonomialOperator:
    """``P d P^-1`` for the permutation ``x -> table[x]``."""
    phase = [0] * (1 << d.n)
    for x, y in enumerate(table):
        phase[y] = d.phase_num[x]
    return MonomialOperator.diagonal(d.n, phase, d.phase_log_denom)
#endregion


#region Diagonal groups
class DiagKind(Enum):
    D = "D"
    DIAG = "Diag"


@dataclass(frozen=True)
class DiagGroupSpec:
    n: int
    k: int
    kind: DiagKind = DiagKind.D

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be positive")

    def __str__(self):
        return f"{self.kind.value}_{self.k}^{self.n}"


def diag_group_order(n: int, k: int, kind: DiagKind = DiagKind.D) -> int:
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if kind is DiagKind.DIAG:
        return (1 << k) ** ((1 << n) - 1)
    order = 1
    for j in range(min(k - 1, n - 1) + 1):
        order *= (1 << (k - j)) ** math.comb(n, j + 1)
    return order


def in_diag_group(d: Union[MonomialOperator, Sequence[Fraction]], spec: DiagGroupSpec) -> bool:
    if spec.kind is DiagKind.D:
        v = diagonal_level(d, cap=max(spec.k, 1))
        return v.at_most(spec.k)
    if isinstance(d, MonomialOperator):
        if not d.is_diagonal:
            return False
        return d.gauge_fixed().phase_log_denom <= spec.k
    turns = [Fraction(t) for t in d]
    root = 1 << spec.k
    return all(((t - turns[0]) * root).denominator == 1 for t in turns)


def diag_group_generators(spec: DiagGroupSpec) -> List[np.ndarray]:
    """Phase numerators over ``2**k`` of the lowest generators of each column."""
    n, k = spec.n, spec.k
    size = 1 << n
    xs = np.arange(size, dtype=np.int64)
    out = []
    if spec.kind is DiagKind.DIAG:
        for x in range(1, size):
            v = np.zeros(size, dtype=np.int64)
            v[x] = 1
            out.append(v)
        return out
    for r in range(1, min(n, k) + 1):
        for wires in itertools.combinations(range(n), r):
            mask = sum(1 << (n - 1 - w) for w in wires)
            out.append(np.where(xs & mask == mask, 1 << (r - 1), 0).astype(np.int64))
    return out


def generate_diag_group(spec: DiagGroupSpec, guard: Optional[int] = None) -> Set[MonomialOperator]:
    """Closure of the generators; raises before enumerating past the guard."""
    guard = int(ComponentSettings.HIERARCHY.get_value("ClosureGuard")) if guard is None else guard
    expected = diag_group_order(spec.n, spec.k, spec.kind)
    if expected > guard:
        raise GuardExceededError(f"{spec} has {expected} elements, above the closure guard {guard}")
    modulus = 1 << spec.k
    gens = diag_group_generators(spec)
    start = tuple([0] * (1 << spec.n))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for elem in frontier:
            base = np.array(elem, dtype=np.int64)
            for g in gens:
                cand = tuple(int(v) for v in (base + g) % modulus)
                if cand not in seen:
                    seen.add(cand)
                    nxt.append(cand)
            if len(seen) > guard:
                raise GuardExceededError(f"closure of {spec} passed {guard} elements")
        frontier = nxt
    logger.debug("closure of %s has %d elements", spec, len(seen))
    return {MonomialOperator.diagonal(spec.n, elem, spec.k) for elem in seen}
#endregion


def controlled_in_ch_necessary(table: Sequence[int]) -> bool:
    """A controlled permutation can only be in the hierarchy if its order is a power of two."""
    seen = [False] * len(table)
    order = 1
    for start in range(len(table)):
        length, x = 0, start
        while not seen[x]:
            seen[x] = True
            x = table[x]
            length += 1
        if length:
            order = math.lcm(order, length)
    return order & (order - 1) == 0
