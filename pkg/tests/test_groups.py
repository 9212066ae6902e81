import numpy as np
import pytest

from engine.config import RunConfig
from engine.errors import BudgetExceededError, ExactnessError, PreconditionError
from engine.groups import (
    EXACT_AVERAGE, GENERATOR_CHECK, SAMPLED, GroupModel, MonomialElement, character_moment, fixed_space,
    generators, group_spec, hyperoctahedral, intertwiner_space, is_homogeneous, moment_sequence,
    monomial_elements, parse_group_spec, reflection, residual, root_of_unity, samples, symmetric, trivial,
)
from engine.linmaps import build_map
from engine.partitions import cup, enumerate_partitions, identity, singleton


@pytest.mark.parametrize("g, order", [
    (symmetric(4), 24),
    (hyperoctahedral(3), 48),
    (hyperoctahedral(2, 4), 32),
    (reflection(3, 4, 2), 192),
    (reflection(2, 4, 4), 32),
    (trivial(3), 1),
])
def test_group_orders(g, order):
    assert g.order == order
    assert len(monomial_elements(g)) == order


def test_reflection_parameters_are_checked():
    with pytest.raises(ValueError, match="lcm"):
        reflection(3, 4, 3)
    with pytest.raises(ValueError, match="unknown group kind"):
        GroupModel('GL', 3)


def test_monomial_composition():
    a = MonomialElement((1, 0, 2), (1, 0, 0), 4)
    b = MonomialElement((0, 2, 1), (0, 0, 3), 4)
    product = a.compose(b)
    assert np.array_equal(product.to_exact(), a.to_exact().dot(b.to_exact()))


def test_roots_of_unity():
    assert root_of_unity(4, 1) ** 2 == root_of_unity(2, 1)
    with pytest.raises(ExactnessError):
        root_of_unity(3, 1)


def test_generators_generate():
    g = reflection(2, 4, 2)
    seen = {MonomialElement((0, 1), (0, 0), 4)}
    frontier = list(seen)
    while frontier:
        element = frontier.pop()
        for generator in generators(g):
            product = generator.compose(element)
            if product not in seen:
                seen.add(product)
                frontier.append(product)
    assert seen == set(monomial_elements(g))


def test_homogeneity():
    assert is_homogeneous(symmetric(3))
    assert is_homogeneous(reflection(3, 4, 2))
    assert not is_homogeneous(trivial(3))
    assert is_homogeneous(trivial(1))
    signs_only = GroupModel('Finite', 2, elements=(np.eye(2, dtype=int), -np.eye(2, dtype=int)))
    assert not is_homogeneous(signs_only)


def test_group_specs():
    text = '{"kind": "HNsd", "N": 2, "s": 4, "d": 2}'
    assert group_spec(parse_group_spec(text)) == {"kind": "HNsd", "N": 2, "s": 4, "d": 2}
    assert parse_group_spec({"kind": "UNd", "N": 2, "d": 3}).label == "U_2^3"
    with pytest.raises(ValueError, match="malformed"):
        parse_group_spec('{"kind": ')
    with pytest.raises(ValueError, match="'kind' and 'N'"):
        parse_group_spec({"kind": "SN"})


@pytest.mark.parametrize("word, dimension", [('', 1), ('o', 1), ('oo', 2), ('ob', 2), ('ooo', 5)])
def test_symmetric_fixed_spaces_have_bell_dimensions(word, dimension):
    assert fixed_space(symmetric(3), word).dimension == dimension


def test_hyperoctahedral_fixed_spaces():
    g = hyperoctahedral(3)
    assert fixed_space(g, 'o').dimension == 0
    assert fixed_space(g, 'oo').dimension == 1
    assert fixed_space(g, 'oooo').dimension == 4


@pytest.mark.parametrize("g, word", [(symmetric(3), 'ooo'), (hyperoctahedral(2, 4), 'obob'), (reflection(2, 4, 2), 'oooo')])
def test_generator_check_agrees_with_exact_average(g, word):
    assert fixed_space(g, word, GENERATOR_CHECK).fixed == fixed_space(g, word, EXACT_AVERAGE).fixed


def test_partition_maps_intertwine_the_symmetric_group():
    space = intertwiner_space(symmetric(3), 'oo', 'o')
    assert all(space.contains(build_map(pi, 3)) for pi in enumerate_partitions('oo', 'o'))
    assert space.basis.rank == 5


def test_exact_residuals():
    g = hyperoctahedral(2)
    assert residual(g, build_map(cup('oo'), 2)) == pytest.approx(0.0, abs=1e-12)
    assert residual(g, build_map(singleton(), 2)) == pytest.approx(1.0)


def test_exact_models_are_not_sampled():
    with pytest.raises(PreconditionError):
        fixed_space(symmetric(3), 'o', SAMPLED)


def test_memory_budget():
    with pytest.raises(BudgetExceededError):
        fixed_space(symmetric(3), 'oooo', config=RunConfig(memory_budget=1000))


def test_unitary_determinants():
    g = GroupModel('UNd', 2, d=2)
    for u in samples(g, 5, seed=3):
        assert np.allclose(u.conj().T @ u, np.eye(2))
        assert np.linalg.det(u) ** 2 == pytest.approx(1.0)


@pytest.mark.parametrize("kind", ['BN', 'CN'])
def test_bistochastic_samples_fix_the_all_ones_vector(kind):
    for g in samples(GroupModel(kind, 3), 5, seed=5):
        assert np.allclose(g @ np.ones(3), np.ones(3))
        assert np.allclose(g.conj().T @ g, np.eye(3))


def test_samples_are_reproducible():
    first = samples(GroupModel('ON', 3), 3, seed=11)
    second = samples(GroupModel('ON', 3), 3, seed=11)
    assert all(np.array_equal(a, b) for a, b in zip(first, second))


def test_sampled_fixed_space_of_the_orthogonal_group(fast_config):
    g = GroupModel('ON', 2)
    space = intertwiner_space(g, 'o', 'o', config=fast_config)
    assert space.dimension == 1
    assert space.contains(build_map(identity('o'), 2), tolerance=1e-6)
    assert intertwiner_space(g, '', 'o', config=fast_config).residual(build_map(singleton(), 2)) == pytest.approx(1.0)
    assert space.to_json()["seed"] == fast_config.seed


def test_symmetric_moments_are_bell_numbers():
    assert moment_sequence(symmetric(5), 4) == [1, 2, 5, 15]


def test_truncated_moments():
    assert float(character_moment(symmetric(4), 1, t="1/2")) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        character_moment(symmetric(4), 1, t=0)
