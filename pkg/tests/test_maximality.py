import json
from fractions import Fraction

import pytest

from engine.errors import PreconditionError, WordMismatchError
from engine.maximality import (
    REACHES_SPAN_E, STUCK, CappingCertificate, capping_search, erase_leg, order2_check, replay, series_runner,
)
from engine.partitions import Partition, basic_crossing, cup, identity, is_basic_crossing, parse_partition


def test_erase_leg_leaves_the_partner_as_a_singleton(crossing):
    result, loops, augmented = erase_leg(crossing, 0)
    assert result == Partition('o', 'oo', ((0, 1), (2,)))
    assert loops == 0
    assert augmented.lower.letters == 'oo'


def test_capping_a_nested_pair_reaches_the_basic_crossing():
    pi = parse_partition('oo|oooo:(1,4)(2,3)(5,6)')
    certificate = capping_search(pi)
    assert is_basic_crossing(certificate.end)
    assert certificate.steps[0]["op"] == 'cap'
    assert replay(certificate) == {"valid": True, "failed_step": None}


def test_half_crossing_needs_singletons(half_crossing):
    with pytest.raises(PreconditionError, match="no capping certificate"):
        capping_search(half_crossing)
    certificate = capping_search(half_crossing, singletons=True)
    assert [step["op"] for step in certificate.steps[:2]] == ['compose_with', 'compose_with']
    assert replay(certificate)["valid"]


def test_noncrossing_partitions_have_no_descent(identity_oo):
    with pytest.raises(PreconditionError, match="noncrossing"):
        capping_search(identity_oo)


def test_tampered_certificates_fail_replay():
    certificate = capping_search(parse_partition('oo|oooo:(1,4)(2,3)(5,6)'))
    certificate.steps[0]["result"] = 'oo|oo:(1,2)(3,4)'
    assert replay(certificate) == {"valid": False, "failed_step": 0}


def test_certificate_json(half_crossing):
    certificate = capping_search(half_crossing, singletons=True)
    restored = CappingCertificate.from_json(json.dumps(certificate.to_json()))
    assert restored == certificate
    assert restored.to_json()["start"] == 'ooo|ooo:(1,6)(2,5)(3,4)'


def test_crossing_plus_identity_reaches_all_pairings(crossing):
    found = order2_check('NC2', 'P2', crossing, identity('oo'), 1, 1, 3, 4, real=True)
    assert found["real"]
    assert found["verdict"] == REACHES_SPAN_E
    assert found["pi"] == 'oo|oo:(1,4)(2,3)'
    assert found["alpha"] == '1'
    assert "witness" not in found


def test_matching_crossing_minus_identity_reaches_matching_pairings():
    found = order2_check('NC2', 'MatchingP2', basic_crossing('oo'), identity('oo'), 1, -1, 4, 4)
    assert not found["real"]
    assert found["verdict"] == REACHES_SPAN_E, found.get("witness")


def test_colored_noncrossing_pairings_stay_matching(crossing):
    found = order2_check('NC2', 'P2', crossing, identity('oo'), 1, 1, 3, 4)
    assert found["verdict"] == STUCK
    assert found["witness"]["side"] == 'right'


@pytest.mark.parametrize("scale", [1, -2, '1/3'])
def test_order2_verdict_ignores_coefficient_scaling(crossing, scale):
    scale = Fraction(scale)
    found = order2_check('NC2', 'P2', crossing, identity('oo'), 2 * scale, -3 * scale, 3, 4, real=True)
    assert found["verdict"] == REACHES_SPAN_E


def test_order2_preconditions(crossing):
    with pytest.raises(PreconditionError, match="nonzero"):
        order2_check('NC2', 'P2', crossing, identity('oo'), 0, 1, 3, 4)
    with pytest.raises(WordMismatchError):
        order2_check('NC2', 'P2', crossing, cup('oo'), 1, 1, 3, 4)
    with pytest.raises(PreconditionError, match="both lie in"):
        order2_check('NC2', 'P2', identity('oo'), identity('oo'), 1, 1, 3, 4)
    with pytest.raises(PreconditionError, match="vanishes"):
        order2_check('NC2', 'P2', crossing, crossing, 1, -1, 3, 4)


def test_partitions_must_lie_in_the_larger_category(crossing):
    fork = Partition('oo', 'oo', ((0, 1, 2, 3),))
    with pytest.raises(PreconditionError, match="must lie in"):
        order2_check('NC2', 'P2', crossing, fork, 1, 1, 3, 4)


def test_series_budget_limits_the_pairs():
    found = series_runner('O', 3, 4, coefficients=((1, 1),), pair_budget=2, seed=1)
    assert found["pairs"] == 2
    assert found["instances"] == 2
    assert not found["stuck"]
    assert found["counts"] == {REACHES_SPAN_E: 2}


def test_unknown_series():
    with pytest.raises(ValueError, match="unknown series"):
        series_runner('Q', 3, 4)


@pytest.mark.slow
def test_orthogonal_series_has_no_stuck_instances():
    found = series_runner('O', 5, 4)
    assert found["instances"] >= 20
    assert found["counts"].get(STUCK, 0) == 0
    assert found["counts"][REACHES_SPAN_E] > 0
    assert not found["expected_inconclusive"]


def test_series_pairs_cover_every_split():
    found = series_runner('O', 3, 4, coefficients=((1, 1),), pair_budget=100)
    assert found["pairs"] == 15
    words = {(record["pi"].split(':')[0]) for record in found["records"]}
    assert words == {'|oooo', 'o|ooo', 'oo|oo', 'ooo|o', 'oooo|'}
    assert found["counts"] == {REACHES_SPAN_E: 15}


@pytest.mark.slow
@pytest.mark.parametrize("series", ['S', 'B'])
def test_series_reach_the_larger_category(series):
    found = series_runner(series, 5, 4, pair_budget=4)
    assert found["instances"] == 20
    assert not found["stuck"], found["stuck"]
