import itertools
import math

import numpy as np
import pytest

from src.errors import ValidationError
from src.group import (BlockSystem, GeneratedGroup, InvalidBlockSystem, NotABlockSystem, NotTransitive,
                       block_action, build_bsgs, closure, contains, group_order, induced_cell_action,
                       is_abelian, is_alternating, is_block, is_block_system, is_cyclic, is_elementary_abelian,
                       is_primitive, is_symmetric, is_transitive, minimal_block, orbit, orbits, restrict_to_cell)
from src.perm import DegreeMismatch, Permutation, compose, parse_cycles

from .builders import all_set_partitions, random_perm


def group(degree, *gens):
    return GeneratedGroup(degree, [parse_cycles(g, degree) for g in gens])


def test_identity_generators_are_stripped():
    g = group(4, "()", "(1,2)", "(1,2)")
    assert len(g.generators) == 1
    assert GeneratedGroup(3, []).is_trivial()
    with pytest.raises(DegreeMismatch):
        GeneratedGroup(3, [Permutation.identity(4)])


def test_orbit_transversal_maps_point():
    g = group(6, "(1,2,3)", "(3,4)")
    o = orbit(g, 1)
    assert o.as_set() == {1, 2, 3, 4}
    for w, u in o.transversal.items():
        assert u(1) == w
    assert orbits(g) == [(1, 2, 3, 4), (5,), (6,)]
    assert not is_transitive(g)


def test_symmetric_and_alternating_orders():
    s5 = group(5, "(1,2,3,4,5)", "(1,2)")
    a5 = group(5, "(1,2,3)", "(3,4,5)")
    assert build_bsgs(s5).order() == 120
    assert build_bsgs(a5).order() == 60
    assert group_order(build_bsgs(a5)) == 60
    assert contains(build_bsgs(a5), parse_cycles("(1,2)(3,4)", 5))
    assert is_symmetric(s5)
    assert is_alternating(a5)
    assert not is_alternating(s5)
    assert not is_symmetric(a5)


def test_trivial_group_order():
    chain = build_bsgs(GeneratedGroup(4, []))
    assert chain.order() == 1
    assert chain.contains(Permutation.identity(4))
    assert not chain.contains(parse_cycles("(1,2)", 4))


def test_base_prefix_is_respected():
    g = group(6, "(1,2,3,4,5,6)", "(1,2)")
    chain = build_bsgs(g, base_prefix=[4, 2])
    assert chain.base[:2] == (4, 2)
    assert chain.order() == 720
    assert chain.order(1) == 120


def test_membership_rejects_wrong_degree():
    chain = build_bsgs(group(3, "(1,2,3)"))
    with pytest.raises(DegreeMismatch):
        chain.contains(Permutation.identity(4))


def test_bsgs_matches_closure_on_random_groups():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 25:
        degree = int(rng.integers(3, 8))
        gens = [random_perm(rng, degree) for _ in range(int(rng.integers(1, 3)))]
        g = GeneratedGroup(degree, gens)
        elements = closure(g)
        chain = build_bsgs(g)
        assert chain.order() == len(elements)
        for _ in range(20):
            candidate = random_perm(rng, degree)
            assert chain.contains(candidate) == (candidate in elements)
        for e in itertools.islice(elements, 20):
            assert chain.contains(e)
        checked += 1


def test_bsgs_order_of_larger_groups():
    a9 = group(9, "(1,2,3)", "(1,2,3,4,5,6,7,8,9)")
    assert build_bsgs(a9).order() == math.factorial(9) // 2
    # C_2 wr C_3 on 6 points
    w = group(6, "(1,2)", "(1,3,5)(2,4,6)")
    assert build_bsgs(w).order() == 8 * 3


def test_block_system_validation():
    with pytest.raises(InvalidBlockSystem):
        BlockSystem(4, [(1, 2), (2, 3)])
    with pytest.raises(InvalidBlockSystem):
        BlockSystem(4, [(1, 2), (3,)])
    with pytest.raises(InvalidBlockSystem):
        BlockSystem(4, [(1, 2, 3), (4,)])
    with pytest.raises(InvalidBlockSystem):
        BlockSystem(4, [(1, 5), (2, 3)])
    system = BlockSystem(4, [(3, 1), (2, 4)])
    assert system.blocks == ((3, 1), (2, 4))
    assert system.cell_of(1) == 0
    assert system.cell_of(4) == 1
    assert system.cell_size == 2
    assert not system.is_trivial()


def test_minimal_block_of_dihedral_square():
    d4 = group(4, "(1,2,3,4)", "(1,3)")
    assert minimal_block(d4, 1, 3).as_sets() == {frozenset({1, 3}), frozenset({2, 4})}
    assert minimal_block(d4, 1, 2).num_cells == 1
    assert not is_primitive(d4)
    assert is_primitive(group(5, "(1,2,3,4,5)"))


def test_minimal_block_needs_transitivity():
    with pytest.raises(NotTransitive):
        minimal_block(group(4, "(1,2)"), 1, 2)


def _block_systems_by_search(g):
    """Every invariant equal-size partition, by exhaustive enumeration."""
    systems = []
    for partition in all_set_partitions(list(range(1, g.degree + 1))):
        if len({len(c) for c in partition}) != 1:
            continue
        system = BlockSystem(g.degree, partition)
        if is_block_system(g, system):
            systems.append(system)
    return systems


TRANSITIVE_CORPUS = [
    (4, ["(1,2,3,4)"]),
    (4, ["(1,2,3,4)", "(1,3)"]),
    (4, ["(1,2)(3,4)", "(1,3)(2,4)"]),
    (4, ["(1,2,3)", "(2,3,4)"]),
    (6, ["(1,2,3,4,5,6)"]),
    (6, ["(1,2)", "(1,3,5)(2,4,6)"]),
    (6, ["(1,2,3)(4,5,6)", "(1,4)(2,6)(3,5)"]),
    (6, ["(1,2,3,4,5)", "(1,6)(2,5)"]),
    (8, ["(1,2,3,4,5,6,7,8)"]),
    (8, ["(1,2,3,4)(5,6,7,8)", "(1,5)(2,6)(3,7)(4,8)"]),
    (8, ["(1,2,3,4,5,6,7,8)", "(1,5)"]),
    (8, ["(1,3,5,7)(2,4,6,8)", "(1,2)(3,4)(5,6)(7,8)", "(1,5)"]),
]


@pytest.mark.parametrize("degree,gens", TRANSITIVE_CORPUS)
def test_minimal_block_matches_exhaustive_search(degree, gens):
    g = group(degree, *gens)
    assert is_transitive(g)
    systems = _block_systems_by_search(g)
    for b in range(2, degree + 1):
        joined = [s for s in systems if s.cell_of(1) == s.cell_of(b)]
        finest = min(joined, key=lambda s: s.cell_size)
        assert minimal_block(g, 1, b).as_sets() == finest.as_sets()


def test_is_block_matches_definition():
    g = group(6, "(1,2,3,4,5,6)")
    assert is_block(g, [1, 4])
    assert is_block(g, [1, 3, 5])
    assert not is_block(g, [1, 2, 4])
    assert is_block(g, [2])


def test_is_block_system_and_induced_action():
    g = group(6, "(1,2,3,4,5,6)")
    system = BlockSystem(6, [(1, 4), (2, 5), (3, 6)])
    assert is_block_system(g, system)
    assert not is_block_system(g, BlockSystem(6, [(1, 2), (3, 4), (5, 6)]))
    psi = induced_cell_action(g.generators[0], system)
    assert psi == parse_cycles("(1,2,3)", 3)


def test_restrict_to_cell_uses_positions():
    g = parse_cycles("(1,5,3)(2,4)", 6)
    assert restrict_to_cell(g, (5, 3, 1)) == parse_cycles("(1,2,3)", 3)
    with pytest.raises(ValidationError):
        restrict_to_cell(g, (1, 2))


def test_block_action_of_wreath_product():
    # C_2 wr C_3: cells {1,2}, {3,4}, {5,6}
    g = group(6, "(1,2)", "(1,3,5)(2,4,6)")
    system = BlockSystem(6, [(1, 2), (3, 4), (5, 6)])
    data = block_action(g, system)
    assert data.group_order == 24
    assert data.kernel_order == 8
    assert build_bsgs(data.quotient).order() == 3
    assert build_bsgs(data.kernel).order() == 8
    for gens, cell in zip(data.block_stabilizer_schreier_gens, system.blocks):
        for s in gens:
            assert set(s(p) for p in cell) == set(cell)


def test_block_action_rejects_non_blocks():
    g = group(4, "(1,2,3,4)")
    with pytest.raises(NotABlockSystem):
        block_action(g, BlockSystem(4, [(1, 2), (3, 4)]))


def test_kernel_generators_lie_in_kernel():
    g = group(8, "(1,2,3,4)(5,6,7,8)", "(1,5)(2,6)(3,7)(4,8)", "(1,3)")
    system = BlockSystem(8, [(1, 3), (2, 4), (5, 7), (6, 8)])
    data = block_action(g, system)
    chain = build_bsgs(g)
    for k in data.kernel.generators:
        assert chain.contains(k)
        assert induced_cell_action(k, system).is_identity()
    assert data.group_order == chain.order()
    assert data.group_order == build_bsgs(data.quotient).order() * data.kernel_order


def test_recognition_predicates():
    klein = group(4, "(1,2)(3,4)", "(1,3)(2,4)")
    assert is_abelian(klein)
    assert not is_cyclic(klein)
    assert is_elementary_abelian(klein, 2)
    c4 = group(4, "(1,2,3,4)")
    assert is_cyclic(c4)
    assert not is_elementary_abelian(c4, 2)
    assert not is_abelian(group(3, "(1,2)", "(2,3)"))


def test_closure_limit():
    s6 = group(6, "(1,2,3,4,5,6)", "(1,2)")
    with pytest.raises(ValidationError):
        closure(s6, limit=100)
    assert len(closure(group(3, "(1,2,3)"))) == 3
    elements = closure(group(3, "(1,2)", "(2,3)"))
    assert compose(parse_cycles("(1,2)", 3), parse_cycles("(2,3)", 3)) in elements


@pytest.mark.parametrize("degree,gens", TRANSITIVE_CORPUS + [(6, ["(1,2)(3,4)", "(5,6)"])])
def test_stabilizer_chain_structure(degree, gens):
    g = group(degree, *gens)
    chain = build_bsgs(g)
    base = chain.base
    assert math.prod(len(o) for o in chain.basic_orbits) == chain.order()
    for level, (orbit_points, transversal) in enumerate(zip(chain.basic_orbits, chain.transversals)):
        assert orbit_points[0] == base[level]
        assert set(transversal) == set(orbit_points)
        for point, u in transversal.items():
            assert u(base[level]) == point
        for s in chain.level_generators(level):
            assert all(s(b) == b for b in base[:level])
    assert build_bsgs(GeneratedGroup(degree, chain.strong_generators)).order() == chain.order()


@pytest.mark.parametrize("degree,gens,cells", [
    (6, ["(1,2)", "(1,3,5)(2,4,6)"], [(1, 2), (3, 4), (5, 6)]),
    (8, ["(1,2,3,4)(5,6,7,8)", "(1,5)(2,6)(3,7)(4,8)", "(1,3)"], [(1, 3), (2, 4), (5, 7), (6, 8)]),
    (8, ["(1,2,3,4)(5,6,7,8)", "(1,5)(2,6)(3,7)(4,8)"], [(1, 2, 3, 4), (5, 6, 7, 8)]),
    (6, ["(1,2)(3,4)", "(1,3)(2,4)", "(5,6)"], [(1, 2), (3, 4), (5, 6)]),
])
def test_cell_stabilizer_index_is_cell_orbit_length(degree, gens, cells):
    g = group(degree, *gens)
    system = BlockSystem(degree, cells)
    data = block_action(g, system)
    for index, (stab_gens, cell) in enumerate(zip(data.block_stabilizer_schreier_gens, system.blocks)):
        stabilizer_order = build_bsgs(GeneratedGroup(degree, list(stab_gens))).order()
        cell_orbit = orbit(data.quotient, index + 1).as_set()
        assert data.group_order // stabilizer_order == len(cell_orbit)
        assert data.group_order % stabilizer_order == 0
