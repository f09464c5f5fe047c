import itertools

import numpy as np
import pytest

from cliffhier.common.errors import DimensionMismatchError, InvalidPermutationError
from cliffhier.core.pauli_monomial.pauli_monomial import MonomialOperator, PauliString, as_pauli, compose, \
    conjugate, conjugate_fast, equal_exact, equal_up_to_phase, gauge_key, inverse, pauli_dense, \
    pauli_to_monomial, to_dense

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def random_monomial(rng, n, max_log_denom=3):
    size = 1 << n
    perm = list(range(size))
    rng.shuffle(perm)
    m = rng.randrange(max_log_denom + 1)
    phase = [rng.randrange(1 << m) for _ in range(size)]
    return MonomialOperator(n, tuple(perm), tuple(phase), m)


def random_pauli(rng, n):
    return PauliString.from_masks(n, rng.getrandbits(n), rng.getrandbits(n), rng.randrange(4))


def test_label_round_trip():
    for label in ["+XYZI", "-iXYZI", "+iZ", "-Y", "+IIII"]:
        assert PauliString.from_label(label).label() == label
    assert str(PauliString.from_label("XY")) == "+XY"
    with pytest.raises(ValueError, match="unknown Pauli letter"):
        PauliString.from_label("XQ")


def test_pauli_dense_matrices():
    assert np.allclose(pauli_dense(PauliString.from_label("X")), X)
    assert np.allclose(pauli_dense(PauliString.from_label("Y")), Y)
    assert np.allclose(pauli_dense(PauliString.from_label("Z")), Z)
    assert np.allclose(pauli_dense(PauliString.from_label("-iZ")), -1j * Z)


def test_qubit_zero_is_most_significant():
    assert np.allclose(pauli_dense(PauliString.from_label("XI")), np.kron(X, I2))
    assert np.allclose(pauli_dense(PauliString.from_label("IZ")), np.kron(I2, Z))
    assert PauliString.from_label("XI").symplectic == 0b1000


def test_constructor_validation():
    with pytest.raises(InvalidPermutationError):
        MonomialOperator(1, (0, 0), (0, 0), 0)
    with pytest.raises(DimensionMismatchError):
        MonomialOperator(2, (0, 1), (0, 0), 0)


def test_phases_are_normalized():
    d = MonomialOperator.diagonal(1, [0, 4], 3)
    assert d.phase_num == (0, 1)
    assert d.phase_log_denom == 1
    assert d == MonomialOperator.diagonal(1, [8, 1], 1)


def test_power_and_inverse():
    t = MonomialOperator.diagonal(1, [0, 1], 3)
    assert t ** 8 == MonomialOperator.identity(1)
    assert t ** 2 == MonomialOperator.diagonal(1, [0, 1], 2)
    assert t ** -1 == inverse(t)


def test_compose_matches_dense(rng):
    for _ in range(200):
        n = rng.randrange(1, 4)
        a = random_monomial(rng, n)
        b = random_monomial(rng, n)
        assert np.allclose(to_dense(compose(a, b)), to_dense(a) @ to_dense(b))
        assert compose(a, inverse(a)) == MonomialOperator.identity(n)


def test_compose_is_associative(rng):
    for _ in range(200):
        n = rng.randrange(1, 4)
        a, b, c = (random_monomial(rng, n) for _ in range(3))
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_inverse_is_two_sided(rng):
    for _ in range(200):
        n = rng.randrange(1, 4)
        u = random_monomial(rng, n)
        identity = MonomialOperator.identity(n)
        assert compose(u, inverse(u)) == identity
        assert compose(inverse(u), u) == identity
        assert inverse(inverse(u)) == u


def test_conjugation_matches_dense(rng):
    for _ in range(200):
        n = rng.randrange(1, 4)
        u = random_monomial(rng, n)
        p = random_pauli(rng, n)
        dense = to_dense(u) @ pauli_dense(p) @ to_dense(u).conj().T
        assert np.allclose(to_dense(conjugate(u, p)), dense)


def test_conjugate_fast_agrees_with_exact_conjugation(rng):
    for _ in range(200):
        n = rng.randrange(1, 4)
        u = random_monomial(rng, n)
        s, b = rng.getrandbits(n), rng.getrandbits(n)
        exact = conjugate(u, PauliString.from_masks(n, s, b))
        assert equal_exact(conjugate_fast(u, s, b), exact)


def test_as_pauli_round_trip():
    for n in (1, 2, 3):
        for x, z, power in itertools.product(range(1 << n), range(1 << n), range(4)):
            p = PauliString.from_masks(n, x, z, power)
            assert as_pauli(pauli_to_monomial(p)) == p


def test_as_pauli_rejects_non_pauli():
    assert as_pauli(MonomialOperator.diagonal(1, [0, 1], 3)) is None
    cnot = MonomialOperator.permutation(2, (0, 1, 3, 2))
    assert as_pauli(cnot) is None


def test_gauge_key_ignores_global_phase(rng):
    for _ in range(50):
        u = random_monomial(rng, 2)
        shifted = MonomialOperator(2, u.perm, tuple(p + 1 for p in u.phase_num), u.phase_log_denom)
        assert equal_up_to_phase(u, shifted)
        assert gauge_key(u) == gauge_key(shifted)


def test_arrays_are_read_only():
    u = MonomialOperator.identity(2)
    with pytest.raises(ValueError):
        u.phase_array[0] = 1
