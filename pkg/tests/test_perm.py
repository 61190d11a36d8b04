import numpy as np
import pytest

from src.group import GeneratedGroup, build_bsgs
from src.perm import (DegreeMismatch, Permutation, PermutationError, PointOutOfRange, RepeatedPoint,
                      commutes, compose, compose_all, conjugate, cycle_containing,
                      cycle_decomposition, cycle_type, cycles_to_lists, fixed_points, format_cycles,
                      inverse, is_even, order, parity, parse_cycles, perm_from_cycles, power, sign)

from .builders import random_perm


def test_compose_applies_left_factor_first():
    g = perm_from_cycles([[1, 2]], 3)
    h = perm_from_cycles([[2, 3]], 3)
    gh = compose(g, h)
    # 1 -> 2 under g, then 2 -> 3 under h
    assert gh(1) == 3
    assert gh == g * h
    assert format_cycles(gh) == "(1,3,2)"


def test_conjugate_is_right_action():
    g = perm_from_cycles([[1, 2, 3]], 4)
    h = perm_from_cycles([[3, 4]], 4)
    c = conjugate(g, h)
    assert c == compose(compose(inverse(h), g), h)
    assert format_cycles(c) == "(1,2,4)"


def test_identity_prints_as_empty_cycle():
    assert format_cycles(Permutation.identity(5)) == "()"
    assert parse_cycles("()", 5).is_identity()
    assert parse_cycles("", 5).is_identity()


def test_parse_round_trip_and_whitespace():
    g = parse_cycles("(1, 4 ,2)(3 5)", 6)
    assert g.images == (4, 1, 5, 2, 3, 6)
    assert parse_cycles(str(g), 6) == g


@pytest.mark.parametrize("text", ["(1,2", "1,2)", "(a,b)", "(1,2)x"])
def test_parse_rejects_garbage(text):
    with pytest.raises(PermutationError):
        parse_cycles(text, 4)


def test_construction_errors():
    with pytest.raises(RepeatedPoint):
        Permutation([1, 1, 2])
    with pytest.raises(PointOutOfRange):
        Permutation([1, 4, 2])
    with pytest.raises(RepeatedPoint):
        perm_from_cycles([[1, 2], [2, 3]], 3)
    with pytest.raises(PointOutOfRange):
        perm_from_cycles([[1, 5]], 4)
    with pytest.raises(DegreeMismatch):
        compose(Permutation.identity(3), Permutation.identity(4))


def test_cycle_decomposition_is_canonical():
    g = perm_from_cycles([[5, 3], [4, 2, 6]], 7)
    assert cycle_decomposition(g) == [(2, 6, 4), (3, 5)]
    assert cycle_type(g) == (3, 2)
    assert cycles_to_lists(g) == [[2, 6, 4], [3, 5]]
    assert fixed_points(g) == {1, 7}


def test_order_sign_parity():
    g = perm_from_cycles([[1, 2, 3], [4, 5]], 6)
    assert order(g) == 6
    assert sign(g) == -1
    assert parity(g) == "odd"
    assert not is_even(g)
    assert is_even(perm_from_cycles([[1, 2, 3, 4, 5]], 5))
    assert order(Permutation.identity(3)) == 1


def test_power_and_inverse():
    g = perm_from_cycles([[1, 2, 3, 4]], 4)
    assert power(g, 2) == compose(g, g)
    assert power(g, -1) == inverse(g)
    assert power(g, 4).is_identity()
    assert compose(g, ~g).is_identity()
    assert g ** 3 == inverse(g)


def test_compose_all_and_commutes():
    a = perm_from_cycles([[1, 2]], 4)
    b = perm_from_cycles([[3, 4]], 4)
    c = perm_from_cycles([[2, 3]], 4)
    assert commutes(a, b)
    assert not commutes(a, c)
    assert compose_all([a, b, c], 4) == compose(compose(a, b), c)
    assert compose_all([], 4).is_identity()


def test_cycle_containing_starts_at_point():
    g = perm_from_cycles([[1, 3, 5, 2]], 6)
    assert cycle_containing(g, 5) == (5, 2, 1, 3)
    assert cycle_containing(g, 6) == (6,)


def test_permutations_hash_and_order():
    g = parse_cycles("(1,2)", 3)
    assert {g, parse_cycles("(1,2)(3)", 3)} == {g}
    assert sorted([g, Permutation.identity(3)])[0].is_identity()


def _random_triples(seed, count=50):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        degree = int(rng.integers(1, 10))
        yield tuple(random_perm(rng, degree) for _ in range(3))


def test_compose_is_associative():
    for g, h, k in _random_triples(1):
        assert compose(compose(g, h), k) == compose(g, compose(h, k))


def test_inverse_reverses_products():
    for g, h, _ in _random_triples(2):
        assert inverse(compose(g, h)) == compose(inverse(h), inverse(g))
        assert compose(g, inverse(g)).is_identity()


def test_sign_is_multiplicative():
    for g, h, _ in _random_triples(3):
        assert sign(compose(g, h)) == sign(g) * sign(h)
        assert is_even(compose(g, h)) == (parity(g) == parity(h))


def test_format_then_parse_gives_back_random_permutations():
    for g, h, k in _random_triples(4):
        for perm in (g, h, k):
            assert parse_cycles(format_cycles(perm), perm.degree) == perm
            assert cycle_decomposition(perm) == [tuple(c) for c in cycles_to_lists(perm)]
            for cycle in cycle_decomposition(perm):
                assert cycle[0] == min(cycle)


def test_element_orders_divide_group_order():
    rng = np.random.default_rng(5)
    for _ in range(20):
        degree = int(rng.integers(2, 9))
        gens = [random_perm(rng, degree) for _ in range(2)]
        group_order = build_bsgs(GeneratedGroup(degree, gens)).order()
        for g in gens + [compose(gens[0], gens[1]), conjugate(gens[0], gens[1])]:
            assert group_order % order(g) == 0
