"""Pauli strings and monomial operators with dyadic root-of-unity phases.

A :class:`MonomialOperator` acts on basis states as
``U|x> = exp(2 pi i * phase_num[x] / 2**m) |perm[x]>``; qubit 0 is the most
significant bit of the state index ``x``.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from ...common.errors import DimensionMismatchError, InvalidPermutationError
from ..gf2_linear.gf2_linear import BitVec, parity
from . import kernels


#region Pauli strings
@dataclass(frozen=True)
class PauliString:
    """``i**phase_i_power * X^x Z^z`` (X applied after Z on each qubit)."""
    n: int
    x: BitVec
    z: BitVec
    phase_i_power: int = 0

    def __post_init__(self):
        if self.x.n != self.n or self.z.n != self.n:
            raise DimensionMismatchError(f"x/z halves must have length {self.n}")
        object.__setattr__(self, "phase_i_power", self.phase_i_power % 4)

    @classmethod
    def from_masks(cls, n: int, x: int, z: int, phase_i_power: int = 0) -> "PauliString":
        return cls(n, BitVec(n, x), BitVec(n, z), phase_i_power)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels such as ``"-iXYZI"``; qubit 0 is the leftmost letter."""
        power = 0
        body = label.strip()
        if body.startswith("-"):
            power += 2
            body = body[1:]
        elif body.startswith("+"):
            body = body[1:]
        if body.startswith("i"):
            power += 1
            body = body[1:]
        x = z = 0
        for ch in body:
            x <<= 1
            z <<= 1
            if ch in "XY":
                x |= 1
            if ch in "ZY":
                z |= 1
            if ch not in "IXYZ":
                raise ValueError(f"unknown Pauli letter {ch!r} in {label!r}")
            if ch == "Y":
                power += 1
        return cls.from_masks(len(body), x, z, power)

    @property
    def symplectic(self) -> int:
        """Packed ``(x|z)`` vector of length ``2n``."""
        return (self.x.value << self.n) | self.z.value

    def same_up_to_phase(self, other: "PauliString") -> bool:
        return self.n == other.n and self.x == other.x and self.z == other.z

    def label(self) -> str:
        power = self.phase_i_power
        letters = []
        for w in range(self.n):
            xb, zb = self.x[w], self.z[w]
            if xb and zb:
                letters.append("Y")
                power -= 1
            else:
                letters.append("X" if xb else "Z" if zb else "I")
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[power % 4]
        return prefix + "".join(letters)

    def __str__(self):
        return self.label()
#endregion


#region Monomial operators
@dataclass(frozen=True)
class MonomialOperator:
    n: int
    perm: Tuple[int, ...]
    phase_num: Tuple[int, ...]
    phase_log_denom: int = 0

    def __post_init__(self):
        size = 1 << self.n
        if len(self.perm) != size or len(self.phase_num) != size:
            raise DimensionMismatchError(f"expected {size} entries for {self.n} qubits")
        if sorted(self.perm) != list(range(size)):
            raise InvalidPermutationError("perm is not a bijection on the basis states")
        if self.phase_log_denom < 0:
            raise ValueError("phase denominator exponent must be non-negative")
        m = self.phase_log_denom
        nums = [p % (1 << m) for p in self.phase_num] if m else [0] * size
        while m > 0 and all(p % 2 == 0 for p in nums):
            nums = [p // 2 for p in nums]
            m -= 1
        object.__setattr__(self, "perm", tuple(int(p) for p in self.perm))
        object.__setattr__(self, "phase_num", tuple(nums))
        object.__setattr__(self, "phase_log_denom", m)

    @classmethod
    def identity(cls, n: int) -> "MonomialOperator":
        size = 1 << n
        return cls(n, tuple(range(size)), (0,) * size, 0)

    @classmethod
    def permutation(cls, n: int, table: Sequence[int]) -> "MonomialOperator":
        return cls(n, tuple(table), (0,) * len(table), 0)

    @classmethod
    def diagonal(cls, n: int, phase_num: Sequence[int], log_denom: int) -> "MonomialOperator":
        return cls(n, tuple(range(1 << n)), tuple(phase_num), log_denom)

    @classmethod
    def from_arrays(cls, perm: np.ndarray, phase: np.ndarray, m: int) -> "MonomialOperator":
        return cls(kernels.qubits_of(perm.shape[0]), tuple(int(v) for v in perm),
                   tuple(int(v) for v in phase), m)

    @cached_property
    def perm_array(self) -> np.ndarray:
        out = np.array(self.perm, dtype=np.int64)
        out.setflags(write=False)
        return out

    @cached_property
    def phase_array(self) -> np.ndarray:
        out = np.array(self.phase_num, dtype=np.int64)
        out.setflags(write=False)
        return out

    @property
    def is_diagonal(self) -> bool:
        return all(p == x for x, p in enumerate(self.perm))

    def phase_turns(self, column: int) -> Fraction:
        return Fraction(self.phase_num[column], 1 << self.phase_log_denom)

    def gauge_fixed(self) -> "MonomialOperator":
        """Same operator up to global phase with column 0 carrying phase 0."""
        p0 = self.phase_num[0]
        return MonomialOperator(self.n, self.perm, tuple(p - p0 for p in self.phase_num), self.phase_log_denom)

    def __matmul__(self, other: "MonomialOperator") -> "MonomialOperator":
        return compose(self, other)

    def __pow__(self, k: int) -> "MonomialOperator":
        out = MonomialOperator.identity(self.n)
        base = self if k >= 0 else inverse(self)
        for _ in range(abs(k)):
            out = compose(out, base)
        return out


DiagonalGate = MonomialOperator


def _check_same_n(a: MonomialOperator, b: MonomialOperator):
    if a.n != b.n:
        raise DimensionMismatchError(f"operators act on {a.n} and {b.n} qubits")


def compose(a: MonomialOperator, b: MonomialOperator) -> MonomialOperator:
    """Matrix product ``a . b`` (``b`` acts first)."""
    _check_same_n(a, b)
    m = max(a.phase_log_denom, b.phase_log_denom)
    sa = 1 << (m - a.phase_log_denom)
    sb = 1 << (m - b.phase_log_denom)
    perm = tuple(a.perm[y] for y in b.perm)
    phase = tuple(sb * b.phase_num[x] + sa * a.phase_num[b.perm[x]] for x in range(1 << a.n))
    return MonomialOperator(a.n, perm, phase, m)


def inverse(a: MonomialOperator) -> MonomialOperator:
    size = 1 << a.n
    inv = [0] * size
    for x, y in enumerate(a.perm):
        inv[y] = x
    return MonomialOperator(a.n, tuple(inv), tuple(-a.phase_num[inv[y]] for y in range(size)), a.phase_log_denom)


def pauli_to_monomial(p: PauliString) -> MonomialOperator:
    size = 1 << p.n
    x, z = p.x.value, p.z.value
    perm = tuple(j ^ x for j in range(size))
    phase = tuple(p.phase_i_power + 2 * parity(z & j) for j in range(size))
    return MonomialOperator(p.n, perm, phase, 2)


def conjugate(u: MonomialOperator, p: PauliString) -> MonomialOperator:
    """``u p u^dagger``."""
    if u.n != p.n:
        raise DimensionMismatchError(f"operator on {u.n} qubits, Pauli on {p.n}")
    return compose(compose(u, pauli_to_monomial(p)), inverse(u))


def conjugate_fast(u: MonomialOperator, s: int, b: int) -> MonomialOperator:
    """Phase-free ``u X^s Z^b u^dagger`` through the vectorized kernel."""
    cp, cph, M = kernels.conjugate_batch(u.perm_array[None, :], u.phase_array[None, :], u.phase_log_denom,
                                         np.array([s], dtype=np.int64), np.array([b], dtype=np.int64))
    return MonomialOperator.from_arrays(cp[0, 0], cph[0, 0], M)


def as_pauli(u: MonomialOperator) -> Optional[PauliString]:
    """The Pauli string equal to ``u`` up to global phase, or None.

    The i-power is exact when the global phase of ``u`` is a power of i, and 0 otherwise.
    """
    if not kernels.is_pauli_batch(u.perm_array[None, :], u.phase_array[None, :], u.phase_log_denom)[0]:
        return None
    n, m = u.n, u.phase_log_denom
    s = u.perm[0]
    b = 0
    for w in range(n):
        col = 1 << (n - 1 - w)
        if (u.phase_num[col] - u.phase_num[0]) % (1 << m if m else 1):
            b |= col
    # global phase sits on column 0 because X^s Z^b|0> = |s>
    power = 0
    if m <= 2:
        power = (u.phase_num[0] << (2 - m)) % 4
    return PauliString.from_masks(n, s, b, power)


def equal_exact(a: MonomialOperator, b: MonomialOperator) -> bool:
    return a == b


def equal_up_to_phase(a: MonomialOperator, b: MonomialOperator) -> bool:
    _check_same_n(a, b)
    return a.perm == b.perm and a.gauge_fixed() == b.gauge_fixed()


def gauge_key(u: MonomialOperator) -> Tuple[int, bytes, bytes]:
    """Hashable normal form up to global phase."""
    return kernels.key_of(u.perm_array, u.phase_array, u.phase_log_denom)


def to_dense(u: MonomialOperator) -> np.ndarray:
    size = 1 << u.n
    out = np.zeros((size, size), dtype=complex)
    denom = 1 << u.phase_log_denom
    for x, y in enumerate(u.perm):
        out[y, x] = np.exp(2j * np.pi * u.phase_num[x] / denom)
    return out


def pauli_dense(p: PauliString) -> np.ndarray:
    return to_dense(pauli_to_monomial(p))
#endregion
