import numpy as np
import pytest

from engine.categories import STABLE_WITHIN_BOUND, named_table, table_contains
from engine.errors import PreconditionError
from engine.halflib import (
    COMPLEX, REAL, TARGETS, build_F, crossing_partition, emit_relations, exact_compliance, fourier_matrix,
    frame_from_matrix, frame_independence, householder_matrix, relation_compliance, relation_envelope, t_conjugated,
    t_conjugated_numeric, t_explicit, t_mobius, triple_equality,
)
from engine.linmaps import build_map, to_array
from engine.partitions import Partition, format_partition


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("flavor", [REAL, COMPLEX])
def test_frames_satisfy_their_invariants(n, flavor):
    found = build_F(n, flavor).check()
    assert found["holds"], found


def test_exact_frames():
    assert build_F(3, REAL).exact
    assert build_F(4, COMPLEX).exact
    assert not build_F(3, COMPLEX).exact


def test_frame_errors():
    with pytest.raises(PreconditionError):
        householder_matrix(1)
    with pytest.raises(PreconditionError):
        fourier_matrix(1)
    with pytest.raises(ValueError, match="flavor"):
        build_F(3, 'quaternion')
    with pytest.raises(PreconditionError, match="first column"):
        frame_from_matrix(np.eye(3))


def test_crossing_partitions():
    assert format_partition(crossing_partition(3)) == 'ooo|ooo:(1,6)(2,5)(3,4)'
    assert format_partition(crossing_partition(4)) == 'oooo|oooo:(1,7)(2,8)(3,5)(4,6)'
    assert crossing_partition(3, 'obb').lower.letters == 'bbo'
    with pytest.raises(PreconditionError):
        crossing_partition(5)
    with pytest.raises(PreconditionError):
        crossing_partition(3, 'ob')


@pytest.mark.parametrize("n", [2, 3, 4, 5, pytest.param(6, marks=pytest.mark.slow)])
def test_three_forms_of_the_three_leg_crossing_agree(n):
    found = triple_equality(n, 3)
    assert found["conjugated_equals_explicit"]
    assert found["explicit_equals_mobius"]
    assert found["holds"]


@pytest.mark.parametrize("n", [2, 3, 4, pytest.param(5, marks=pytest.mark.slow)])
def test_three_forms_of_the_four_leg_crossing_agree(n):
    assert triple_equality(n, 4)["holds"]


def test_at_n_one_the_crossing_map_vanishes():
    assert not t_conjugated(1, 3)


def test_explicit_form_needs_two_indices():
    with pytest.raises(PreconditionError):
        t_explicit(1)


def test_mobius_form_needs_a_pairing():
    with pytest.raises(PreconditionError, match="pairing"):
        t_mobius(3, base=Partition('oo', 'o', ((0, 1, 2),)))


@pytest.mark.parametrize("flavor", [REAL, COMPLEX])
def test_numeric_conjugation_matches_the_exact_map(flavor):
    pair = build_F(3, flavor)
    assert np.allclose(t_conjugated_numeric(pair, 3), to_array(t_conjugated(3, 3)))


@pytest.mark.parametrize("legs", [3, 4])
def test_crossing_map_does_not_depend_on_the_frame(legs):
    found = frame_independence(3, legs, seed=7)
    assert found["holds"]
    assert found["gap"] < 1e-10


@pytest.mark.parametrize("target, count", [('BNo', 1), ('CNo', 8), ('CNx', 1), ('CNoo', 2), ('UNss', 2)])
def test_relation_counts(target, count):
    relations = emit_relations(target, 3)
    assert len(relations) == count
    assert all(relation.target == target for relation in relations)


def test_unknown_relation_target():
    with pytest.raises(ValueError, match="unknown relation target"):
        emit_relations('ONx', 3)
    assert set(TARGETS) == {'BNo', 'CNo', 'CNx', 'CNoo', 'UNss'}


def test_relation_words_follow_the_colors():
    (relation,) = emit_relations('CNx', 3)
    assert relation.upper.letters == 'obo'
    assert relation.lower.letters == 'obo'
    assert [r.lower.letters for r in emit_relations('UNss', 2)] == ['obob', 'boob']


@pytest.mark.parametrize("target", TARGETS)
def test_classical_groups_satisfy_their_relations(target):
    found = relation_compliance(target, 3, count=5, seed=13)
    assert found["holds"], found["failures"]
    assert found["samples"] == 5


def test_conjugation_changes_the_crossing_map():
    assert build_map(crossing_partition(3), 3) != t_conjugated(3, 3)


@pytest.mark.parametrize("n", [3, 4])
def test_exact_bistochastic_elements_commute_with_the_crossing(n):
    found = exact_compliance(n)
    assert found["holds"]
    assert found["elements"] == 3


def test_exact_compliance_needs_three_indices():
    with pytest.raises(PreconditionError):
        exact_compliance(2)


@pytest.mark.slow
def test_relation_envelope_is_the_noncrossing_singleton_category():
    found = relation_envelope('BNo', 3, 6)
    assert found["expected"] == 'NC12'
    assert found["table"].status == STABLE_WITHIN_BOUND
    assert found["comparison"], found["comparison"]


@pytest.mark.slow
def test_relation_envelope_at_two_contains_the_noncrossing_singleton_category():
    found = relation_envelope('BNo', 2, 6)
    assert table_contains(named_table('NC12', 6, real=True), found["table"])


def test_relation_envelope_is_real_only():
    with pytest.raises(PreconditionError):
        relation_envelope('CNo', 3, 4)
