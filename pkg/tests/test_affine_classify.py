import numpy as np
import pytest

from cliffhier.common.errors import DecompositionError, GuardExceededError
from cliffhier.common.settings import ComponentSettings
from cliffhier.common.settings_manager import SettingsManager
from cliffhier.core.affine_classify.affine_classify import UNRESOLVED, EquivalenceAction, UnionFind, ae_profile, \
    affine_generators, agl_order, check_class_membership, classify_cycle_structures, conjugate_canon, \
    count_ae_classes_full, count_structures, cycle_rank_profile, cycle_structures_affinely_equivalent, \
    degree_spectrum, difference_distribution_table, enumerate_structures, extend_classification, full_rank_class, \
    fwht, group_closure, minimal_affine_generators, monomial_equiv_implies_affine, sample_monomial_clifford_equivalence, \
    sample_orbit_member, split_monomial, structure_verdict, verify_4q_representatives, walsh_table
from cliffhier.core.gates.gates import CCX, Circuit, CycleStructure, PermutationGate, affine_conjugate, \
    circuit_to_permutation, controlled_form, from_cycle_structure, to_cycle_structure
from cliffhier.core.gf2_linear.gf2_linear import random_affine_map
from cliffhier.core.hierarchy.hierarchy import Level, LevelOracle, NotInCHUpTo, level
from cliffhier.core.pauli_monomial.pauli_monomial import MonomialOperator

TOFFOLI = circuit_to_permutation(Circuit(3, (CCX(0, 1, 2),)))

# in-CH / total class counts per cycle type, read row by row
DIRECT_CELLS = {
    1: {(2,): (1, 1)},
    2: {(2,): (1, 1), (3,): (1, 1), (4,): (1, 1), (2, 2): (1, 1)},
    3: {(2,): (1, 1), (3,): (0, 1), (4,): (1, 2), (2, 2): (1, 2), (5,): (0, 1), (3, 2): (1, 2),
        (6,): (1, 2), (4, 2): (1, 2), (3, 3): (1, 2), (2, 2, 2): (1, 2)},
    4: {(2,): (1, 1), (3,): (0, 1), (4,): (1, 2), (2, 2): (1, 2), (5,): (0, 2), (3, 2): (0, 3),
        (6,): (0, 9), (4, 2): (1, 9), (3, 3): (0, 6), (2, 2, 2): (2, 6)},
}
EXTENDED_CELLS = {(2,): (1, 1), (3,): (0, 1), (4,): (1, 2), (2, 2): (1, 2), (5,): (0, 2), (3, 2): (0, 3),
                  (6,): (0, 10), (4, 2): (1, 10), (3, 3): (0, 7), (2, 2, 2): (2, 7)}


def _counts(records):
    return sum(1 for r in records if r.in_ch), len(records)


def _random_affine_perm(n, rng):
    return PermutationGate.from_affine(random_affine_map(n, rng))


#region Generators
@pytest.mark.parametrize("n", [1, 2, 3])
def test_generators_close_to_the_affine_group(n):
    assert len(group_closure(minimal_affine_generators(n))) == agl_order(n)
    assert len(group_closure(affine_generators(n))) == agl_order(n)


def test_agl_order():
    assert [agl_order(n) for n in (1, 2, 3, 4)] == [2, 24, 1344, 322560]
#endregion


#region Invariants
def test_fwht():
    assert list(fwht(np.array([1, 0, 0, 0]))) == [1, 1, 1, 1]
    assert list(fwht(np.array([1, 1, 1, 1]))) == [4, 0, 0, 0]


def test_identity_tables():
    identity = tuple(range(8))
    assert (difference_distribution_table(identity) == 8 * np.eye(8, dtype=np.int64)).all()
    assert (np.abs(walsh_table(identity)) == 8 * np.eye(8, dtype=np.int64)).all()
    assert degree_spectrum(identity) == ((1, 7),)


def test_toffoli_degree_spectrum():
    assert degree_spectrum(TOFFOLI.table) == ((1, 3), (2, 4))


def test_profile_is_constant_on_two_sided_orbits(rng):
    for _ in range(200):
        table = list(range(8))
        rng.shuffle(table)
        p = PermutationGate(3, tuple(table))
        q = _random_affine_perm(3, rng).then(p).then(_random_affine_perm(3, rng))
        assert ae_profile(p).spectra() == ae_profile(q).spectra()


def test_toffoli_profile_survives_affine_factors(rng):
    expected = ae_profile(TOFFOLI).spectra()
    for _ in range(100):
        q = _random_affine_perm(3, rng).then(TOFFOLI).then(_random_affine_perm(3, rng))
        assert ae_profile(q).spectra() == expected


def _conjugation_orbit(record):
    gens = [g.table for g in minimal_affine_generators(record.n)]
    start = conjugate_canon(record.structure.int_cycles, tuple(range(1 << record.n)))
    seen = {start}
    queue = [start]
    while queue:
        cur = queue.pop()
        for g in gens:
            nxt = conjugate_canon(cur, g)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def _two_sided_orbit(record):
    gens = [g.table for g in affine_generators(record.n)]
    start = record.permutation.table
    seen = {start}
    queue = [start]
    while queue:
        p = queue.pop()
        for g in gens:
            for nxt in (tuple(g[y] for y in p), tuple(p[y] for y in g)):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return seen


@pytest.mark.parametrize("n, shape", [(n, s) for n in (1, 2, 3) for s in DIRECT_CELLS[n]
                                      if count_structures(n, s) <= 1000])
def test_profile_is_constant_on_conjugation_orbits(n, shape):
    for record in classify_cycle_structures(n, shape):
        orbit = _conjugation_orbit(record)
        assert len(orbit) == record.size
        for canon in orbit:
            member = from_cycle_structure(CycleStructure.from_ints(n, canon))
            assert ae_profile(member, EquivalenceAction.CONJUGATION) == record.profile


@pytest.mark.slow
@pytest.mark.parametrize("shape", [s for s in DIRECT_CELLS[3] if count_structures(3, s) > 1000])
def test_profile_is_constant_on_large_conjugation_orbits(shape):
    for record in classify_cycle_structures(3, shape):
        for canon in _conjugation_orbit(record):
            member = from_cycle_structure(CycleStructure.from_ints(3, canon))
            assert ae_profile(member, EquivalenceAction.CONJUGATION) == record.profile


def test_profile_is_constant_on_small_census_classes():
    for n in (1, 2):
        for record in count_ae_classes_full(n).classes:
            orbit = _two_sided_orbit(record)
            assert len(orbit) == record.size
            for table in orbit:
                assert ae_profile(PermutationGate(n, table)).spectra() == record.profile.spectra()


@pytest.mark.slow
def test_profile_is_constant_on_three_qubit_census_classes():
    for record in count_ae_classes_full(3).classes:
        for table in _two_sided_orbit(record):
            assert ae_profile(PermutationGate(3, table)).spectra() == record.profile.spectra()


def test_conjugation_profile_carries_cycle_data():
    profile = ae_profile(TOFFOLI, EquivalenceAction.CONJUGATION)
    assert profile.cycle_type_of_orbit == (2,)
    assert profile.cycle_rank_profile == ((2, 1), (0, 1))
    assert ae_profile(TOFFOLI).cycle_type_of_orbit is None


def test_cycle_rank_profile_of_full_rank_class():
    cs = full_rank_class(3, (2, 2))
    assert cs.int_cycles == ((4, 0), (2, 1))
    assert cycle_rank_profile(cs)[-1] == (0, 3)
    assert controlled_form(cs) is None
    with pytest.raises(ValueError):
        full_rank_class(3, (2,))
#endregion


#region Two-sided census
@pytest.mark.parametrize("n, classes, in_ch", [(1, 1, 1), (2, 1, 1), (3, 4, 2)])
def test_census(n, classes, in_ch):
    report = count_ae_classes_full(n)
    assert len(report.classes) == classes
    assert report.in_ch_count == in_ch
    assert sum(r.size for r in report.classes) == report.total_permutations


def test_census_identity_class_is_the_affine_group():
    report = count_ae_classes_full(3)
    assert report.classes[0].permutation.is_identity()
    assert report.classes[0].size == agl_order(3)
    assert report.classes[0].level == Level(1)


def test_sampled_members_stay_in_their_class(rng):
    for record in count_ae_classes_full(3).classes:
        for _ in range(10):
            member = sample_orbit_member(record, rng)
            assert ae_profile(member).spectra() == record.profile.spectra()
    for record in classify_cycle_structures(3, (2, 2)):
        orbit = _conjugation_orbit(record)
        for _ in range(10):
            member = sample_orbit_member(record, rng)
            assert to_cycle_structure(member).int_cycles in orbit


def test_sample_size_comes_from_settings():
    assert ComponentSettings.AFFINE_CLASSIFY.get_value("CensusSampleSize") == 50
    SettingsManager.get_instance().set_profile("Quick")
    assert ComponentSettings.AFFINE_CLASSIFY.get_value("CensusSampleSize") == 10


@pytest.mark.slow
def test_census_membership_is_constant_on_classes(rng):
    assert check_class_membership(count_ae_classes_full(3).classes, rng=rng) == []


@pytest.mark.parametrize("n, shape", [(2, (3,)), (2, (2, 2)), (3, (2,)), (3, (4,)), (3, (2, 2))])
def test_cycle_class_membership_is_constant(n, shape, rng):
    assert check_class_membership(classify_cycle_structures(n, shape), rng=rng) == []


def test_census_guard():
    with pytest.raises(GuardExceededError):
        count_ae_classes_full(4)
    with pytest.raises(ValueError):
        count_ae_classes_full(2, EquivalenceAction.CONJUGATION)


@pytest.mark.slow
def test_four_qubit_representatives():
    report = verify_4q_representatives()
    assert [v.k for v in report.levels] == [1, 4, 3, 4, 4]
    assert report.profiles_distinct
    assert report.names[2] == "ccx"
#endregion


#region Cycle structures
@pytest.mark.parametrize("n, shape", [(2, (2,)), (2, (4,)), (3, (2,)), (3, (3,)), (3, (2, 2)), (3, (3, 2))])
def test_enumeration_matches_count(n, shape):
    seen = list(enumerate_structures(n, shape))
    assert len(seen) == len(set(seen)) == count_structures(n, shape)
    assert count_structures(1, (3,)) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_direct_cells(n):
    for shape, expected in DIRECT_CELLS[n].items():
        records = classify_cycle_structures(n, shape)
        assert _counts(records) == expected, shape
        assert sum(r.size for r in records) == count_structures(n, shape)
        assert [r.notation for r in records] == sorted(r.notation for r in records)


@pytest.mark.slow
@pytest.mark.parametrize("shape", sorted(DIRECT_CELLS[4]))
def test_four_qubit_cells(shape):
    records = classify_cycle_structures(4, shape)
    assert _counts(records) == DIRECT_CELLS[4][shape]
    if sum(shape) <= 4:
        assert all(controlled_form(r.structure) is not None for r in records)


def test_small_shapes_are_controlled():
    for shape in ((2,), (3,)):
        for record in classify_cycle_structures(3, shape):
            assert controlled_form(record.structure) is not None


def test_identity_cell():
    records = classify_cycle_structures(3, ())
    assert len(records) == 1 and records[0].level == Level(1)


def test_shape_guard():
    with pytest.raises(GuardExceededError):
        classify_cycle_structures(3, (4, 3))
    with pytest.raises(GuardExceededError):
        classify_cycle_structures(5, (2,))
    SettingsManager.get_instance().override("MaxShapeSize", 7)
    assert classify_cycle_structures(2, (4, 3)) == []


def test_order_rule_for_controlled_structures():
    three_cycle = CycleStructure.from_ints(3, [[5, 6, 7]])
    verdict, reason = structure_verdict(three_cycle)
    assert not verdict.in_ch
    assert reason == "order"
    verdict, reason = structure_verdict(CycleStructure.from_ints(3, [[7, 6]]))
    assert verdict == Level(3)
    assert reason == "direct"


def test_structure_verdict_is_cached_per_cap():
    cccx = CycleStructure.from_ints(4, [[15, 14]])
    assert structure_verdict(cccx, cap=3) == (NotInCHUpTo(3), "direct")
    assert structure_verdict(cccx) == (Level(4), "direct")
    assert structure_verdict(cccx, cap=3) == (NotInCHUpTo(3), "direct")


def test_structure_verdicts_are_dropped_with_the_oracle():
    structure_verdict(CycleStructure.from_ints(3, [[7, 6]]))
    assert len(LevelOracle.get_instance().structures) > 0
    LevelOracle.reset()
    assert len(LevelOracle.get_instance().structures) == 0
#endregion


#region Exact conjugation test
def test_alignment_finds_the_conjugating_map(rng):
    for shape in ((2,), (4,), (2, 2), (3, 2), (2, 2, 2)):
        source = next(iter(enumerate_structures(3, shape)))
        a = CycleStructure.from_ints(3, source)
        for _ in range(5):
            b = affine_conjugate(a, random_affine_map(3, rng))
            f = cycle_structures_affinely_equivalent(a, b)
            assert f is not None and f != UNRESOLVED
            assert affine_conjugate(a, f) == b


def test_alignment_rejects_other_classes():
    plane = CycleStructure.from_ints(3, [[0, 1, 2, 3]])
    spread = CycleStructure.from_ints(3, [[0, 1, 2, 4]])
    assert cycle_structures_affinely_equivalent(plane, spread) is None
    assert cycle_structures_affinely_equivalent(plane, CycleStructure.from_ints(3, [[0, 1], [2, 3]])) is None


def test_alignment_budget():
    a = CycleStructure.from_ints(3, [[0, 1], [2, 4], [3, 5]])
    b = CycleStructure.from_ints(3, [[0, 1], [2, 3], [4, 5]])
    assert cycle_structures_affinely_equivalent(a, b, budget=0) == UNRESOLVED


def test_union_find():
    uf = UnionFind(5)
    assert uf.union(3, 4)
    assert uf.union(1, 4)
    assert not uf.union(3, 1)
    assert uf.find(4) == 1
    assert len({uf.find(i) for i in range(5)}) == 3
#endregion


#region Extension
def test_extension_matches_direct_cells():
    for shape in ((2,), (3,), (2, 2)):
        report = extend_classification(classify_cycle_structures(2, shape))
        assert report.n == 3 and report.resolved
        assert _counts(report.records) == DIRECT_CELLS[3][shape]
    report = extend_classification(classify_cycle_structures(2, (3,)))
    assert report.records[0].in_ch_reason == "order"


def test_extension_needs_records():
    with pytest.raises(ValueError):
        extend_classification([])


def test_extension_refuses_shapes_past_the_full_rank_class():
    for shape in ((2, 2, 2), (3, 3), (4, 2)):
        with pytest.raises(GuardExceededError, match="more than 5"):
            extend_classification(classify_cycle_structures(3, shape))
    report = extend_classification(classify_cycle_structures(3, (3, 2)))
    assert report.n == 4 and report.resolved
    assert _counts(report.records) == DIRECT_CELLS[4][(3, 2)]


@pytest.mark.slow
@pytest.mark.parametrize("shape", sorted(EXTENDED_CELLS))
def test_extension_to_five_qubits(shape):
    report = extend_classification(classify_cycle_structures(4, shape))
    assert report.n == 5
    assert report.resolved
    assert _counts(report.records) == EXTENDED_CELLS[shape]
#endregion


#region Monomial Clifford equivalence
def test_identity_equivalence():
    identity = MonomialOperator.identity(3)
    assert monomial_equiv_implies_affine(TOFFOLI, TOFFOLI, identity, identity)


def test_sampled_monomial_clifford_equivalences(rng):
    for _ in range(200):
        table = list(range(8))
        rng.shuffle(table)
        p1 = PermutationGate(3, tuple(table))
        p2, g_left, g_right = sample_monomial_clifford_equivalence(p1, rng)
        assert monomial_equiv_implies_affine(p1, p2, g_left, g_right)


def test_split_rejects_non_affine_permutation():
    with pytest.raises(DecompositionError):
        split_monomial(TOFFOLI.to_monomial())
    with pytest.raises(DecompositionError):
        identity = MonomialOperator.identity(3)
        monomial_equiv_implies_affine(TOFFOLI, PermutationGate.identity(3), identity, identity)
#endregion
