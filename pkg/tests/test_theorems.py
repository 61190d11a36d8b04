"""Classification of clone and copy-permutation compositions on worked and searched examples."""
import math

import pytest

from src.analyze import CASE1, CASE2, analyze_imprimitivity, classify_thm7, verify_thm8
from src.compose import compose_alpha_beta, compose_clone_p
from src.perm import parse_cycles
from src.triangle import Handle, TrianglePresentation, search_alpha_beta, search_alternating

from .builders import a7_base, a8_base, a9_base, a10_base, wreath_base


@pytest.mark.slow
@pytest.mark.parametrize("build,handle", [
    (a7_base, Handle(4, 5)),
    (a8_base, Handle(5, 6)),
    (a10_base, Handle(6, 7)),
])
def test_clone_of_alternating_diagram_has_augmentation_kernel(build, handle):
    base = build()
    comp = compose_clone_p(base, handle)
    deg = base.degree
    verdict = classify_thm7(comp)
    assert verdict.case == CASE2
    assert verdict.group_order == 3 ** (deg - 1) * (math.factorial(deg) // 2)
    assert verdict.kernel_order == 3 ** (deg - 1)
    assert verdict.fp_dimension == deg - 1
    assert not verdict.flags["maps_onto_cp"] or not verdict.flags["p_divides_deg"]


@pytest.mark.slow
def test_nine_point_clone_has_one_of_the_two_shapes():
    base = a9_base()
    comp = compose_clone_p(base, Handle(4, 5))
    verdict = classify_thm7(comp)
    assert verdict.case in (CASE1, CASE2)
    assert verdict.flags["p_divides_deg"]
    assert verdict.flags["maps_onto_cp"]
    assert verdict.degree == 9


@pytest.mark.slow
def test_clone_report_module_structure():
    comp = compose_clone_p(a7_base(), Handle(4, 5))
    report = analyze_imprimitivity(comp)
    assert report.blocks.blocks[0] == (1, 8, 15)
    assert report.psi_is_alternating
    assert report.kernel_elementary_abelian
    assert report.module_action_ok
    assert report.equivalence_checked
    assert report.p_orders == (3,) * 7


@pytest.mark.slow
def test_copy_permutation_composition_is_full_wreath_product():
    comp = compose_alpha_beta(wreath_base(), Handle(6, 7), Handle(8, 9),
                              parse_cycles("(1,2,3,4,5)", 5), parse_cycles("(1,2,3,5,4)", 5), 5)
    verdict = verify_thm8(comp)
    assert verdict.expected_order == 60 ** 9 * 181440
    assert verdict.found_order == verdict.expected_order
    assert verdict.q_block_is_alternating
    assert verdict.verified


@pytest.mark.parametrize("p,degree", [(3, 7), (5, 8), (7, 10)])
def test_clone_of_searched_alternating_diagram(p, degree):
    hit = search_alternating(TrianglePresentation(p, 1260, 1260), degree, seed=1)
    comp = compose_clone_p(hit.representation, hit.handles[0])
    verdict = classify_thm7(comp)
    assert verdict.case == CASE2
    assert verdict.group_order == p ** (degree - 1) * (math.factorial(degree) // 2)
    assert verdict.fp_dimension == degree - 1
    assert not verdict.flags["p_divides_deg"]


def test_copy_permutations_of_searched_inputs():
    hit = search_alternating(TrianglePresentation(3, 1260, 1260), 9, needed_handles=2, seed=2)
    pair = search_alpha_beta(3, 5, seed=2)
    h1, h2 = hit.handles
    comp = compose_alpha_beta(hit.representation, h1, h2, pair.alpha, pair.beta, 5)
    verdict = verify_thm8(comp)
    assert verdict.expected_order == 60 ** 9 * (math.factorial(9) // 2)
    assert verdict.verified
