"""Vectorized monomial kernels.

A batch of monomial operators on ``n`` qubits is a pair of ``(B, N)`` integer
arrays with ``N = 2**n``: ``perms[k, x]`` is the image of column ``x`` and
``phases[k, x]`` the phase numerator over the shared denominator ``2**m``.
"""
from functools import lru_cache
from typing import Tuple

import numpy as np

Batch = Tuple[np.ndarray, np.ndarray, int]


@lru_cache(maxsize=None)
def parity_table(size: int) -> np.ndarray:
    idx = np.arange(size, dtype=np.int64)
    out = np.zeros(size, dtype=np.int64)
    while idx.any():
        out ^= idx & 1
        idx = idx >> 1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def unit_masks(n: int) -> np.ndarray:
    out = np.array([1 << (n - 1 - w) for w in range(n)], dtype=np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def generator_masks(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """(s, b) masks of the 2n generators X_0..X_{n-1}, Z_0..Z_{n-1}."""
    units = unit_masks(n)
    zeros = np.zeros(n, dtype=np.int64)
    return np.concatenate([units, zeros]), np.concatenate([zeros, units])


@lru_cache(maxsize=None)
def all_pauli_masks(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """(s, b) masks of every X^s Z^b, indexed by ``s * 2**n + b``."""
    size = 1 << n
    s = np.repeat(np.arange(size, dtype=np.int64), size)
    b = np.tile(np.arange(size, dtype=np.int64), size)
    return s, b


def qubits_of(size: int) -> int:
    return size.bit_length() - 1


def lift(phases: np.ndarray, m: int, target: int) -> np.ndarray:
    return phases << (target - m) if target > m else phases


def normalize_phases(phases: np.ndarray, m: int) -> Tuple[np.ndarray, int]:
    """Fix the gauge (column 0 carries phase 0) and minimize the denominator row-wise jointly."""
    if m == 0:
        return np.zeros_like(phases), 0
    g = (phases - phases[..., :1]) % (1 << m)
    while m > 0 and not (g & 1).any():
        g = g >> 1
        m -= 1
    return g, m


def conjugate_batch(perms: np.ndarray, phases: np.ndarray, m: int,
                    s: np.ndarray, b: np.ndarray) -> Batch:
    """``U X^s Z^b U^dagger`` for every operator in the batch and every (s, b) pair.

    Returns ``(B, G, N)`` arrays. With ``x = pi^-1(y)`` the conjugate maps column
    ``y`` to ``pi(x ^ s)`` with phase ``phi(x ^ s) - phi(x) + 2**(M-1) * (b . x)``.
    """
    M = max(m, 1)
    ph = lift(phases, m, M)
    half = 1 << (M - 1)
    size = perms.shape[1]
    rows = np.arange(perms.shape[0])[:, None, None]
    inv = np.argsort(perms, axis=1)[:, None, :]
    xs = inv ^ s[None, :, None]
    new_perm = perms[rows, xs]
    new_phase = ph[rows, xs] - ph[rows, inv] + half * parity_table(size)[b[None, :, None] & inv]
    return new_perm, new_phase % (1 << M), M


def conjugate_all(perm: np.ndarray, phase: np.ndarray, m: int) -> Batch:
    """Conjugates of one operator by all ``4**n`` Pauli strings (phase-free), shape ``(4**n, N)``."""
    n = qubits_of(perm.shape[0])
    s, b = all_pauli_masks(n)
    cp, cph, M = conjugate_batch(perm[None, :], phase[None, :], m, s, b)
    return cp[0], cph[0], M


def is_pauli_batch(perms: np.ndarray, phases: np.ndarray, m: int) -> np.ndarray:
    size = perms.shape[1]
    y = np.arange(size, dtype=np.int64)
    shift = perms ^ y
    translation = (shift == shift[:, :1]).all(axis=1)
    if m == 0:
        return translation
    g = (phases - phases[:, :1]) % (1 << m)
    half = 1 << (m - 1)
    units = unit_masks(qubits_of(size))
    bmask = ((g[:, units] == half) * units).sum(axis=1)
    expected = half * parity_table(size)[bmask[:, None] & y]
    return translation & (g == expected).all(axis=1)


def _chunks(total: int, chunk: int):
    chunk = max(1, chunk)
    for start in range(0, total, chunk):
        yield slice(start, min(total, start + chunk))


def generator_pauli_mask(perms: np.ndarray, phases: np.ndarray, m: int) -> np.ndarray:
    """``(B, 2n)`` mask: is the conjugate by generator g a Pauli."""
    n = qubits_of(perms.shape[1])
    s, b = generator_masks(n)
    cp, cph, M = conjugate_batch(perms, phases, m, s, b)
    B, G, size = cp.shape
    return is_pauli_batch(cp.reshape(B * G, size), cph.reshape(B * G, size), M).reshape(B, G)


def is_clifford_batch(perms: np.ndarray, phases: np.ndarray, m: int, chunk: int = 512) -> np.ndarray:
    out = np.empty(perms.shape[0], dtype=bool)
    for sl in _chunks(perms.shape[0], chunk):
        out[sl] = generator_pauli_mask(perms[sl], phases[sl], m).all(axis=1)
    return out


def ch3_batch(perms: np.ndarray, phases: np.ndarray, m: int, chunk: int = 128) -> Tuple[np.ndarray, np.ndarray]:
    """Third-level test through the 2n generators.

    Returns ``(in_ch3, non_clifford_count)`` where the count is the number of
    generator conjugates that fail to be Clifford.
    """
    n = qubits_of(perms.shape[1])
    s, b = generator_masks(n)
    G = s.shape[0]
    in_ch3 = np.empty(perms.shape[0], dtype=bool)
    bad = np.empty(perms.shape[0], dtype=np.int64)
    for sl in _chunks(perms.shape[0], chunk):
        cp, cph, M = conjugate_batch(perms[sl], phases[sl], m, s, b)
        B, _, size = cp.shape
        cliff = is_clifford_batch(cp.reshape(B * G, size), cph.reshape(B * G, size), M,
                                  chunk=chunk * G).reshape(B, G)
        in_ch3[sl] = cliff.all(axis=1)
        bad[sl] = G - cliff.sum(axis=1)
    return in_ch3, bad


def unique_rows(perms: np.ndarray, phases: np.ndarray, m: int) -> np.ndarray:
    """Indices (in first-seen order) of the distinct operators up to global phase."""
    g, _ = normalize_phases(phases, m)
    keys = np.concatenate([perms, g], axis=1)
    _, first = np.unique(keys, axis=0, return_index=True)
    return np.sort(first)


def key_of(perm: np.ndarray, phase: np.ndarray, m: int) -> Tuple[int, bytes, bytes]:
    g, mm = normalize_phases(phase, m)
    return mm, perm.astype(np.int64).tobytes(), g.astype(np.int64).tobytes()
