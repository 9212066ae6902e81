import pytest

from engine.categories import named_table, table_contains, table_equal
from engine.config import RunConfig
from engine.easiness import (
    ALL_CELLS, EQUAL_WITHIN_BOUND, FIXED_POINTS, STRICTLY_SMALLER, bell_bound, brauer_check, brauer_prediction,
    easiness_level_probe, easy_envelope, ep_cell, gp_table, intertwiner_table, presentation_level_probe, und_level_bound,
)
from engine.errors import PreconditionError
from engine.groups import GroupModel, hyperoctahedral, intertwiner_space, reflection, symmetric, trivial
from engine.linmaps import build_map, linear_combination
from engine.partitions import enumerate_partitions, format_partition


@pytest.mark.parametrize("r, expected", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203), (7, 877), (8, 4140)])
def test_bell_bound(r, expected):
    assert bell_bound(r) == expected
    assert len(enumerate_partitions('', 'o' * r)) == expected


def test_bell_bound_rejects_negative_levels():
    with pytest.raises(ValueError):
        bell_bound(-1)


def test_und_level_bound():
    assert und_level_bound(2, 2) == 15


@pytest.mark.parametrize("g, expected", [
    (symmetric(4), 'P'),
    (hyperoctahedral(3, 3), 'Ps(3)'),
    (reflection(3, 4, 2), 'Ps(4)'),
    (reflection(2, 4, 2), 'H242D'),
])
def test_envelopes_match_their_expected_categories(g, expected):
    found = brauer_check(g, 4)
    assert found["expected"] == expected
    assert found["comparison"]


def test_trivial_group_has_no_expected_envelope():
    assert brauer_prediction(trivial(3)) is None
    with pytest.raises(PreconditionError):
        brauer_check(trivial(3), 4)


def test_envelopes_need_the_permutation_matrices():
    with pytest.raises(PreconditionError):
        easy_envelope(trivial(3), 2)


def test_envelope_is_a_category():
    assert easy_envelope(symmetric(3), 3).is_category()


def test_sampled_envelope_of_the_orthogonal_group(fast_config):
    envelope = easy_envelope(GroupModel('ON', 2), 2, fast_config)
    assert table_equal(envelope.table, named_table('P2', 2, real=False))
    assert envelope.sampling["seed"] == fast_config.seed
    assert envelope.to_json()["sampling"]["samples"] == 200


def test_partition_maps_span_the_symmetric_group_intertwiners():
    truth = intertwiner_table(symmetric(3), 3)
    assert truth.size('ooo') == 5
    assert truth.size('ob') == 2


def test_ep_solutions_lie_in_the_intertwiner_space():
    g = hyperoctahedral(2)
    cell = ep_cell(g, '', 'oooo', 2)
    space = intertwiner_space(g, '', 'oooo').basis
    assert len(cell.envelope) == 4
    for solution in cell.solutions:
        maps = [build_map(pi, 2) for pi in solution.partitions]
        for vector in solution.coefficients:
            assert linear_combination(vector, maps) in space
    assert cell.span().issubspace(space)
    assert cell.subsets == 55


def test_ep_cell_at_order_one_is_the_envelope():
    cell = ep_cell(hyperoctahedral(2), '', 'oooo', 1)
    assert cell.subsets == 0
    assert len(cell.solutions) == len(cell.envelope) == 4
    assert all(solution.full_support for solution in cell.solutions)


def test_ep_cell_preconditions():
    with pytest.raises(PreconditionError):
        ep_cell(symmetric(3), '', 'oo', 0)
    with pytest.raises(PreconditionError):
        ep_cell(GroupModel('ON', 2), '', 'oo', 2)


def test_gp_table_bounds_are_ordered():
    with pytest.raises(PreconditionError):
        gp_table(symmetric(3), 2, 4, 3)


@pytest.mark.parametrize("g", [symmetric(4), hyperoctahedral(3, 3), reflection(2, 4, 2)])
def test_easy_groups_have_level_one(g):
    report = easiness_level_probe(g, 1, 4, 4)
    assert report.level == 1
    assert report.per_p[1] == {"verdict": EQUAL_WITHIN_BOUND}


def test_level_report_carries_the_bell_bound():
    report = easiness_level_probe(symmetric(3), 1, 3, 3, presentation_level=3)
    assert report.bell_bound == 5
    assert report.to_json()["level_within_bound"] == 1


def test_two_row_harvest_matches_the_fixed_point_harvest():
    g = symmetric(3)
    assert table_equal(gp_table(g, 2, 2, 3, harvest=ALL_CELLS), gp_table(g, 2, 2, 3, harvest=FIXED_POINTS))


@pytest.mark.slow
def test_reflection_group_is_not_easy_at_level_one():
    report = easiness_level_probe(reflection(3, 4, 2), 1, 4, 6)
    assert report.level is None
    assert report.per_p[1]["verdict"] == STRICTLY_SMALLER
    assert report.per_p[1]["side"] == 'right'


def test_presentation_level_needs_more_than_one_leg():
    report = presentation_level_probe(symmetric(3), 1, 4)
    assert report.level is None
    assert report.tried[1].startswith(STRICTLY_SMALLER)


def test_sampled_envelope_of_the_unitary_group_with_a_determinant_condition():
    envelope = easy_envelope(GroupModel('UNd', 2, d=2), 4, RunConfig())
    assert table_equal(envelope.table, named_table('MatchingP2', 4, real=False))
    members = {format_partition(rho) for word in envelope.table.words() for rho in envelope.cells[word]}
    for text, value in envelope.residuals.items():
        if text in members:
            assert value < 1e-6
        else:
            assert value > 1e-3


def test_gp_tables_increase_with_p_below_the_closure_bound():
    g = symmetric(3)
    tables = [gp_table(g, p, 2, 4) for p in (1, 2, 3)]
    assert table_contains(tables[0], tables[1])
    assert table_contains(tables[1], tables[2])
    assert tables[1].size('oooo') == 14
