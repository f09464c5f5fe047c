import math
from fractions import Fraction

import pytest

from cliffhier.common.errors import GuardExceededError
from cliffhier.common.settings_manager import SettingsManager
from cliffhier.core.affine_classify.affine_classify import random_diagonal_clifford
from cliffhier.core.gates.gates import CCX, CX, FAMILIES, MCX, Circuit, CircuitGate, X, circuit_to_monomial, \
    wire_mismatch
from cliffhier.core.gf2_linear.gf2_linear import affine_map_to_table, random_affine_map
from cliffhier.core.hierarchy.hierarchy import DiagGroupSpec, DiagKind, Level, LevelOracle, NotInCHUpTo, \
    controlled_in_ch_necessary, conjugate_by_permutation, default_cap, diag_group_order, diagonal_from_terms, \
    diagonal_level, diagonal_turns, from_turns, generate_diag_group, in_diag_group, is_clifford, is_pauli, \
    is_semi_clifford, level, support, verdict_from_dict, verdict_to_dict
from cliffhier.core.pauli_monomial.pauli_monomial import MonomialOperator, PauliString, compose, conjugate

T = MonomialOperator.diagonal(1, [0, 1], 3)
S = MonomialOperator.diagonal(1, [0, 1], 2)
CNOT = MonomialOperator.permutation(2, (0, 1, 3, 2))
SWAP = MonomialOperator.permutation(2, (0, 2, 1, 3))


def random_diagonal(rng, n, max_log_denom=3):
    m = rng.randrange(max_log_denom + 1)
    return MonomialOperator.diagonal(n, [rng.randrange(1 << m) for _ in range(1 << n)], m)


def test_verdicts():
    assert str(Level(3)) == "Level 3"
    assert Level(3).at_most(3) and not Level(4).at_most(3)
    assert not NotInCHUpTo(5).in_ch
    for v in (Level(2), NotInCHUpTo(6)):
        assert verdict_from_dict(verdict_to_dict(v)) == v
    with pytest.raises(ValueError):
        Level(0)


def test_default_cap_follows_settings():
    assert default_cap(3) == 5
    SettingsManager.get_instance().override("LevelCapMargin", 1)
    assert default_cap(3) == 4


def test_pauli_and_clifford_recognition():
    assert is_pauli(MonomialOperator.permutation(1, (1, 0)))
    assert not is_pauli(S)
    for u in (S, CNOT, SWAP):
        assert is_clifford(u)
    assert not is_clifford(T)


def test_small_levels():
    assert level(MonomialOperator.identity(2)) == Level(1)
    assert level(S) == Level(2)
    assert level(CNOT) == Level(2)
    assert level(T) == Level(3)
    assert level(circuit_to_monomial(Circuit(3, (CCX(0, 1, 2),)))) == Level(3)


def test_cap_is_reported():
    sqrt_t = MonomialOperator.diagonal(1, [0, 1], 4)
    assert level(sqrt_t) == Level(4)
    assert level(sqrt_t, cap=3) == NotInCHUpTo(3)
    with pytest.raises(ValueError):
        level(sqrt_t, cap=0)


def test_memo_is_filled():
    level(circuit_to_monomial(Circuit(3, (CCX(0, 1, 2),))))
    assert len(LevelOracle.get_instance().memo) > 0


def test_diagonal_level_closed_form():
    assert diagonal_level(T) == Level(3)
    assert diagonal_level(diagonal_from_terms(2, {0b11: Fraction(1, 4)})) == Level(3)
    assert diagonal_level(diagonal_from_terms(3, {0b111: Fraction(1, 2)})) == Level(3)
    assert diagonal_level(diagonal_from_terms(2, {0b11: Fraction(1, 8)})) == Level(4)
    assert diagonal_level(diagonal_from_terms(2, {0b11: Fraction(1, 2)})) == Level(2)
    assert diagonal_level([Fraction(0), Fraction(1, 3)]) == NotInCHUpTo(3)


def test_from_turns_requires_dyadic_phases():
    with pytest.raises(ValueError, match="dyadic"):
        from_turns([Fraction(0), Fraction(1, 3)])
    d = from_turns([Fraction(0), Fraction(1, 8)])
    assert d == T
    assert diagonal_turns(d) == [Fraction(0), Fraction(1, 8)]


def test_diagonal_level_agrees_with_pauli_conjugates(rng):
    for _ in range(200):
        n = rng.randrange(1, 3)
        d = random_diagonal(rng, n)
        k = diagonal_level(d).k
        if k < 2:
            continue
        children = [level(conjugate(d, PauliString.from_masks(n, s, b)))
                    for s in range(1 << n) for b in range(1 << n)]
        assert all(c.in_ch for c in children)
        assert max(c.k for c in children) == k - 1


def test_square_drops_level(rng):
    for _ in range(200):
        n = rng.randrange(1, 4)
        d = random_diagonal(rng, n)
        k = diagonal_level(d).k
        assert diagonal_level(compose(d, d)).k <= max(1, k - 1)


def test_diag_containment_chain():
    for n in (1, 2):
        for k in (1, 2):
            for d in generate_diag_group(DiagGroupSpec(n, k, DiagKind.D)):
                assert in_diag_group(d, DiagGroupSpec(n, k, DiagKind.DIAG))
            for d in generate_diag_group(DiagGroupSpec(n, k, DiagKind.DIAG)):
                assert in_diag_group(d, DiagGroupSpec(n, n + k - 1, DiagKind.D))


def test_spectrum_is_preserved_by_permutation_conjugation(rng):
    for _ in range(200):
        n = rng.randrange(1, 4)
        d = random_diagonal(rng, n)
        table = list(range(1 << n))
        rng.shuffle(table)
        c = conjugate_by_permutation(d, table)
        assert sorted(diagonal_turns(c)) == sorted(diagonal_turns(d))
        for k in (1, 2, 3):
            spec = DiagGroupSpec(n, k, DiagKind.DIAG)
            assert in_diag_group(c, spec) == in_diag_group(d, spec)


@pytest.mark.parametrize("n,k", [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2)])
def test_group_order_matches_closure(n, k):
    for kind in DiagKind:
        assert len(generate_diag_group(DiagGroupSpec(n, k, kind))) == diag_group_order(n, k, kind)


def test_group_orders():
    assert diag_group_order(2, 2) == 32
    assert diag_group_order(1, 3) == 8
    assert diag_group_order(2, 2, DiagKind.DIAG) == 64


def test_closure_guard():
    with pytest.raises(GuardExceededError):
        generate_diag_group(DiagGroupSpec(3, 3), guard=1000)


def test_support():
    ccz = diagonal_from_terms(4, {0b0111: Fraction(1, 2)})
    assert support(ccz) == frozenset({1, 2, 3})
    assert support(MonomialOperator.identity(2)) == frozenset()


def test_semi_clifford():
    assert is_semi_clifford(T)
    assert is_semi_clifford(circuit_to_monomial(Circuit(3, (CCX(0, 1, 2),))))
    assert is_semi_clifford(CNOT)


@pytest.mark.parametrize("name", sorted(n for n, f in FAMILIES.items() if f.semi_clifford is not None))
def test_family_semi_clifford_flags(name):
    family = FAMILIES[name]
    assert is_semi_clifford(circuit_to_monomial(family.circuit)) is family.semi_clifford


def test_controlled_in_ch_necessary():
    assert controlled_in_ch_necessary((0, 1, 2, 3, 4, 5, 7, 6))
    assert not controlled_in_ch_necessary((0, 1, 2, 3, 4, 6, 7, 5))


def random_mismatch_circuit(rng, n, allow_mismatch):
    wires = list(range(n))
    rng.shuffle(wires)
    split = rng.randrange(1, n) if n > 1 else 1
    targets, controls = wires[:split], wires[split:]
    shared = [rng.choice(wires)] if allow_mismatch else []
    gates = []
    for _ in range(rng.randrange(1, 7)):
        if rng.random() < 0.15:
            gates.append(X(rng.randrange(n)))
            continue
        target = rng.choice(targets + shared)
        pool = [w for w in controls + shared if w != target]
        chosen = rng.sample(pool, rng.randrange(0, len(pool) + 1))
        gates.append(CircuitGate(target, tuple((w, rng.randrange(2)) for w in chosen)))
    return Circuit(n, tuple(gates))


def test_zero_wire_mismatch_is_in_hierarchy(rng):
    for _ in range(200):
        c = random_mismatch_circuit(rng, rng.randrange(1, 4), allow_mismatch=False)
        assert wire_mismatch(c) == 0
        assert level(circuit_to_monomial(c)).in_ch


def test_one_wire_mismatch_is_in_hierarchy(rng):
    for _ in range(200):
        c = random_mismatch_circuit(rng, rng.randrange(1, 4), allow_mismatch=True)
        assert wire_mismatch(c) <= 1
        assert level(circuit_to_monomial(c)).in_ch


@pytest.mark.slow
def test_one_wire_mismatch_on_four_qubits(rng):
    for _ in range(200):
        c = random_mismatch_circuit(rng, 4, allow_mismatch=True)
        assert wire_mismatch(c) <= 1
        assert level(circuit_to_monomial(c)).in_ch


@pytest.mark.slow
def test_four_cycle_family_is_in_hierarchy():
    u = circuit_to_monomial(FAMILIES["four_cycle"].circuit)
    assert level(u).in_ch
    assert not is_semi_clifford(u)


def test_cccx_is_fourth_level():
    assert level(circuit_to_monomial(Circuit(4, (MCX(3, on=(0, 1, 2)),)))) == Level(4)


def test_cx_circuit_is_clifford():
    assert level(circuit_to_monomial(Circuit(3, (CX(0, 1), CX(1, 2), X(0))))) == Level(2)


def _random_monomial_clifford(rng, n):
    a = MonomialOperator.permutation(n, affine_map_to_table(random_affine_map(n, rng)))
    return compose(a, random_diagonal_clifford(n, rng))


def test_level_is_unchanged_by_clifford_factors(rng):
    for _ in range(200):
        n = rng.randrange(1, 4)
        if rng.random() < 0.5:
            u = circuit_to_monomial(random_mismatch_circuit(rng, n, allow_mismatch=rng.random() < 0.5))
        else:
            u = random_diagonal(rng, n)
        left, right = _random_monomial_clifford(rng, n), _random_monomial_clifford(rng, n)
        assert level(compose(compose(left, u), right)) == level(u)


def _inject_non_dyadic(rng, turns):
    q = rng.choice([3, 5, 7, 9, 15])
    p = rng.choice([p for p in range(1, q) if math.gcd(p, q) == 1])
    x = rng.randrange(1, len(turns))
    turns = list(turns)
    turns[x] += Fraction(p, (1 << rng.randrange(4)) * q)
    return turns


def _outside_every_diagonal_group(turns, n):
    for k in range(1, default_cap(n) + 1):
        for kind in DiagKind:
            if in_diag_group(turns, DiagGroupSpec(n, k, kind)):
                return False
    return not diagonal_level(turns).in_ch


def test_square_of_non_dyadic_diagonal_stays_outside(rng):
    for _ in range(200):
        n = rng.randrange(1, 4)
        turns = _inject_non_dyadic(rng, diagonal_turns(random_diagonal(rng, n)))
        assert _outside_every_diagonal_group(turns, n)
        assert _outside_every_diagonal_group([2 * t for t in turns], n)


def test_non_dyadic_factor_keeps_product_outside(rng):
    for _ in range(200):
        n = rng.randrange(1, 4)
        outside = _inject_non_dyadic(rng, diagonal_turns(random_diagonal(rng, n)))
        inside = diagonal_turns(random_diagonal(rng, n))
        product = [a + b for a, b in zip(outside, inside)]
        assert _outside_every_diagonal_group(product, n)
