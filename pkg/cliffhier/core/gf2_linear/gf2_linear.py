"""Bit-packed linear algebra over GF(2).

Bit order is "leftmost is most significant": entry ``i`` of a length-``n``
vector lives at bit ``n - 1 - i`` of the packed word, so that the packed value of
a state vector is its basis-state index with qubit 0 as the most significant bit.
Matrix rows are packed the same way.
"""
import random
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from ...common.errors import DimensionMismatchError, InvalidPermutationError

MAX_BITS = 64


def parity(word: int) -> int:
    return bin(word).count("1") & 1


#region Types
@dataclass(frozen=True)
class BitVec:
    n: int
    value: int = 0

    def __post_init__(self):
        if not 0 < self.n <= 2 * MAX_BITS:
            raise DimensionMismatchError(f"vector length {self.n} outside (0, {2 * MAX_BITS}]")
        if self.value >> self.n:
            raise DimensionMismatchError(f"value {self.value:#x} does not fit in {self.n} bits")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitVec":
        value = 0
        for b in bits:
            value = (value << 1) | (int(b) & 1)
        return cls(len(bits), value)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVec":
        return cls(n, 1 << (n - 1 - i))

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.value >> (self.n - 1 - i)) & 1

    def __len__(self):
        return self.n

    def __int__(self):
        return self.value

    def __xor__(self, other: "BitVec") -> "BitVec":
        _same_length(self.n, other.n)
        return BitVec(self.n, self.value ^ other.value)

    def dot(self, other: "BitVec") -> int:
        _same_length(self.n, other.n)
        return parity(self.value & other.value)

    def bits(self) -> Tuple[int, ...]:
        return tuple(self[i] for i in range(self.n))

    def __str__(self):
        return "".join(map(str, self.bits()))


@dataclass(frozen=True)
class BitMatrix:
    nrows: int
    ncols: int
    rows: Tuple[int, ...]

    def __post_init__(self):
        if self.nrows <= 0 or self.ncols <= 0:
            raise DimensionMismatchError("matrix dimensions must be positive")
        if len(self.rows) != self.nrows:
            raise DimensionMismatchError(f"expected {self.nrows} rows, got {len(self.rows)}")
        for r in self.rows:
            if r >> self.ncols:
                raise DimensionMismatchError(f"row {r:#x} wider than {self.ncols} columns")

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatchError("ragged rows")
        return cls(len(rows), ncols, tuple(BitVec.from_bits(r).value for r in rows))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << (n - 1 - i) for i in range(n)))

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[int]) -> "BitMatrix":
        """Matrix whose ``j``-th column is the packed ``nrows``-bit word ``columns[j]``."""
        ncols = len(columns)
        rows = []
        for i in range(nrows):
            shift = nrows - 1 - i
            row = 0
            for c in columns:
                row = (row << 1) | ((c >> shift) & 1)
            rows.append(row)
        return cls(nrows, ncols, tuple(rows))

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> (self.ncols - 1 - j)) & 1

    def row(self, i: int) -> BitVec:
        return BitVec(self.ncols, self.rows[i])

    def column(self, j: int) -> int:
        shift = self.ncols - 1 - j
        value = 0
        for r in self.rows:
            value = (value << 1) | ((r >> shift) & 1)
        return value

    def columns(self) -> List[int]:
        return [self.column(j) for j in range(self.ncols)]

    def to_lists(self) -> List[List[int]]:
        return [list(self.row(i).bits()) for i in range(self.nrows)]

    def mul_vec(self, v: int) -> int:
        """Packed product ``M v`` for a packed column vector ``v``."""
        out = 0
        for r in self.rows:
            out = (out << 1) | parity(r & v)
        return out

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatchError(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        cols = [self.mul_vec(c) for c in other.columns()]
        return BitMatrix.from_columns(self.nrows, cols)

    def __str__(self):
        return "\n".join(str(self.row(i)) for i in range(self.nrows))


@dataclass(frozen=True)
class AffineMap:
    linear: BitMatrix
    shift: BitVec

    def __post_init__(self):
        n = self.linear.nrows
        if self.linear.ncols != n or self.shift.n != n:
            raise DimensionMismatchError("affine map needs an n x n linear part and a length-n shift")
        if rank(self.linear) != n:
            raise InvalidPermutationError("linear part of an affine map must be invertible")

    @property
    def n(self) -> int:
        return self.linear.nrows

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls(BitMatrix.identity(n), BitVec(n, 0))

    def apply_int(self, x: int) -> int:
        return self.linear.mul_vec(x) ^ self.shift.value

    def __call__(self, v: BitVec) -> BitVec:
        return affine_apply(self, v)
#endregion


def _same_length(a: int, b: int):
    if a != b:
        raise DimensionMismatchError(f"length mismatch: {a} vs {b}")


#region Row reduction
def rref_rows(rows: Iterable[int], ncols: int) -> Tuple[List[int], List[int]]:
    """Reduced row echelon form of packed rows; returns (nonzero rows, pivot columns)."""
    work = [r for r in rows]
    pivots: List[int] = []
    top = 0
    for j in range(ncols):
        bit = 1 << (ncols - 1 - j)
        pick = next((i for i in range(top, len(work)) if work[i] & bit), None)
        if pick is None:
            continue
        work[top], work[pick] = work[pick], work[top]
        for i in range(len(work)):
            if i != top and work[i] & bit:
                work[i] ^= work[top]
        pivots.append(j)
        top += 1
        if top == len(work):
            break
    return work[:top], pivots


def rref(m: BitMatrix) -> Tuple[BitMatrix, int, List[int]]:
    reduced, pivots = rref_rows(m.rows, m.ncols)
    padded = tuple(reduced) + (0,) * (m.nrows - len(reduced))
    return BitMatrix(m.nrows, m.ncols, padded), len(pivots), pivots


def rank(m: BitMatrix) -> int:
    return len(rref_rows(m.rows, m.ncols)[1])


def rank_of_words(words: Iterable[int], width: int) -> int:
    return len(rref_rows(list(words), width)[1])


def transpose(m: BitMatrix) -> BitMatrix:
    return BitMatrix(m.ncols, m.nrows, tuple(m.columns()))


def null_space(m: BitMatrix) -> List[int]:
    """Packed basis of {v : M v = 0}."""
    reduced, pivots = rref_rows(m.rows, m.ncols)
    free = [j for j in range(m.ncols) if j not in pivots]
    basis = []
    for f in free:
        v = 1 << (m.ncols - 1 - f)
        for row, p in zip(reduced, pivots):
            if row & (1 << (m.ncols - 1 - f)):
                v |= 1 << (m.ncols - 1 - p)
        basis.append(v)
    return basis


def affine_rank(points: Sequence[int], n: int) -> int:
    """Dimension of the affine hull of a set of packed ``n``-bit states."""
    if not points:
        return -1
    base = points[0]
    return rank_of_words((p ^ base for p in points[1:]), n)
#endregion


#region Affine maps
def affine_apply(f: AffineMap, v: BitVec) -> BitVec:
    _same_length(f.n, v.n)
    return BitVec(f.n, f.apply_int(v.value))


def affine_compose(f: AffineMap, g: AffineMap) -> AffineMap:
    """``(f o g)(v) = f(g(v))``."""
    _same_length(f.n, g.n)
    return AffineMap(f.linear @ g.linear, BitVec(f.n, f.apply_int(g.shift.value)))


def invert_matrix(m: BitMatrix) -> BitMatrix:
    n = m.nrows
    if m.ncols != n:
        raise DimensionMismatchError("only square matrices are invertible")
    # Gauss-Jordan on [M | I] packed into 2n-bit rows
    aug = [(r << n) | (1 << (n - 1 - i)) for i, r in enumerate(m.rows)]
    reduced, pivots = rref_rows(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise InvalidPermutationError("matrix is singular over GF(2)")
    mask = (1 << n) - 1
    return BitMatrix(n, n, tuple(r & mask for r in reduced[:n]))


def affine_invert(f: AffineMap) -> AffineMap:
    inv = invert_matrix(f.linear)
    return AffineMap(inv, BitVec(f.n, inv.mul_vec(f.shift.value)))


def affine_map_to_table(f: AffineMap) -> Tuple[int, ...]:
    return tuple(f.apply_int(x) for x in range(1 << f.n))


def affine_map_of_table(table: Sequence[int], n: int) -> Optional[AffineMap]:
    """Recover ``x -> Ax + b`` from a truth table, or None if the table is not affine."""
    if len(table) != 1 << n:
        raise DimensionMismatchError(f"table of length {len(table)} is not on {n} qubits")
    b = table[0]
    columns = [table[1 << (n - 1 - j)] ^ b for j in range(n)]
    linear = BitMatrix.from_columns(n, columns)
    if rank(linear) != n:
        return None
    f = AffineMap(linear, BitVec(n, b))
    if any(f.apply_int(x) != table[x] for x in range(1 << n)):
        return None
    return f


def random_affine_map(n: int, rng: random.Random) -> AffineMap:
    while True:
        rows = tuple(rng.getrandbits(n) for _ in range(n))
        m = BitMatrix(n, n, rows)
        if rank(m) == n:
            return AffineMap(m, BitVec(n, rng.getrandbits(n)))
#endregion


#region Symplectic form
def symplectic_form(u: int, v: int, n: int) -> int:
    """``x.z' + x'.z`` for packed ``(x|z)`` vectors of length ``2n``."""
    mask = (1 << n) - 1
    ux, uz = u >> n, u & mask
    vx, vz = v >> n, v & mask
    return parity(ux & vz) ^ parity(vx & uz)


def max_isotropic_dim(v_basis: Sequence[BitVec]) -> int:
    """Dimension of a maximal isotropic subspace of ``span(v_basis)``."""
    if not v_basis:
        return 0
    width = v_basis[0].n
    if width % 2:
        raise DimensionMismatchError("symplectic vectors need even length 2n")
    for v in v_basis:
        _same_length(width, v.n)
    n = width // 2
    basis, _ = rref_rows([v.value for v in v_basis], width)
    dim = len(basis)
    if dim == 0:
        return 0
    gram = BitMatrix(dim, dim, tuple(
        int("".join(str(symplectic_form(a, b, n)) for b in basis), 2) for a in basis
    ))
    return dim - rank(gram) // 2
#endregion
