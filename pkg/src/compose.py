"""Handle-splicing compositions of triangle-group representations.

Every construction lays its input diagrams side by side (copy ``i`` on
``(i-1)*deg+1 .. i*deg``), keeps the product of the y-images, and multiplies
the product of the x-images by splice cycles ``(a_1,...,a_p)(b_p,...,b_1)``
on the handle points. Handle points are x-fixed, so the splice commutes
with the x-images.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ValidationError
from .group import BlockSystem, GeneratedGroup, NotABlockSystem, is_block, is_block_system, is_transitive
from .perm import Permutation, commutes, compose, cycle_containing, cycle_decomposition, perm_from_cycles
from .triangle import (Handle, RelationReport, Representation, check_relations, disjoint_union,
                       handles_compatible, is_handle, translate, union_offsets)

logger = logging.getLogger(__name__)

GENERAL = "general"
CLONE = "clone"
CENTRALIZER = "centralizer"
ALPHABETA = "alphabeta"
CONSTRUCTIONS = (GENERAL, CLONE, CENTRALIZER, ALPHABETA)


class CompositionError(ValidationError):
    """Base class for invalid composition inputs."""


class InvalidAssignment(CompositionError):
    """Wrong number of handles, diagram index out of range, or bad parameter."""


class PresentationMismatch(CompositionError):
    """Inputs represent different triangle groups."""


class HandleClash(CompositionError):
    """Two handles in one diagram share a point."""


class DiagramUncovered(CompositionError):
    """A diagram receives no handle."""


class MixedK(CompositionError):
    """Handles of one composition use different exponents."""


class NotAHandle(CompositionError):
    """A pair fails the handle predicate in its diagram."""


class NotTransitiveInput(CompositionError):
    """An input representation is intransitive."""


class InterleavedHandles(CompositionError):
    """Two handles' xy-arcs overlap on a shared cycle."""


class NotCommuting(CompositionError):
    """A relabelling permutation does not commute with the representation."""


class PointsNotDistinct(CompositionError):
    """Relabelled handle points coincide."""


class BadIdentityFirst(CompositionError):
    """The first relabelling permutation is not the identity."""


class HandlesNotDisjoint(CompositionError):
    """The two handles share a point."""


class BadCycleType(CompositionError):
    """A permutation has a non-trivial cycle whose length is not p."""


class NotTransitiveAlphaBeta(CompositionError):
    """The two copy permutations generate an intransitive group."""


Splice = Tuple[Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class HandleAssignment:
    """``entries[i] = (diagram, handle)``; diagrams are 1-based, handles in that diagram's labels."""
    entries: Tuple[Tuple[int, Handle], ...]

    def __init__(self, entries: Sequence[Tuple[int, Handle]]):
        object.__setattr__(self, "entries", tuple((int(j), h) for j, h in entries))

    @property
    def handles(self) -> Tuple[Handle, ...]:
        return tuple(h for _, h in self.entries)


@dataclass(frozen=True)
class Provenance:
    construction: str
    base: Optional[Representation] = None
    inputs: Tuple[Representation, ...] = ()
    handles: Tuple[Handle, ...] = ()
    assignment: Optional[HandleAssignment] = None
    hs: Tuple[Permutation, ...] = ()
    alpha: Optional[Permutation] = None
    beta: Optional[Permutation] = None
    copies: int = 1
    splices: Tuple[Splice, ...] = ()


@dataclass(frozen=True)
class CycleLawViolation:
    point: int
    expected_length: int
    found_length: int
    detail: str


@dataclass(frozen=True)
class CentralizerBlockReport:
    """Whether the relabelled cells partition the points and are blocks before and after splicing."""
    partition: bool
    blocks_for_pi: bool
    blocks_for_phi: bool
    splice_closed: bool = True


@dataclass(frozen=True)
class Composition:
    result: Representation
    blocks: Optional[BlockSystem]
    provenance: Provenance
    unspliced: Representation
    relations: RelationReport
    transitive: bool
    law_violations: Tuple[CycleLawViolation, ...] = ()
    block_report: Optional[CentralizerBlockReport] = None

    @property
    def degree(self) -> int:
        return self.result.degree


def _splice_permutation(degree: int, splices: Sequence[Splice]) -> Permutation:
    cycles: List[Tuple[int, ...]] = []
    for a_points, b_points in splices:
        if len(a_points) > 1:
            cycles.append(tuple(a_points))
            cycles.append(tuple(reversed(b_points)))
    return perm_from_cycles(cycles, degree)


def cycle_law_violations(unspliced: Representation, result: Representation,
                         splices: Sequence[Splice]) -> List[CycleLawViolation]:
    """Compare the xy-cycles before and after splicing.

    The cycle through a spliced ``a_i`` keeps the length of the unspliced
    cycle through ``a_i`` and passes through ``b_(i+1)``; a cycle with no
    spliced point is an unspliced cycle.
    """
    before = unspliced.xy
    after = result.xy
    spliced = {pt for a_points, b_points in splices for pt in a_points + b_points}
    violations = []
    for a_points, b_points in splices:
        count = len(a_points)
        for i, a in enumerate(a_points):
            expected = len(cycle_containing(before, a))
            cycle = cycle_containing(after, a)
            if len(cycle) != expected:
                violations.append(CycleLawViolation(a, expected, len(cycle), "length changed at a spliced point"))
            nxt = b_points[(i + 1) % count]
            if nxt not in cycle:
                violations.append(CycleLawViolation(a, expected, len(cycle), f"cycle misses {nxt}"))
    for cycle in cycle_decomposition(after):
        if spliced.intersection(cycle):
            continue
        expected = len(cycle_containing(before, cycle[0]))
        if expected != len(cycle):
            violations.append(CycleLawViolation(cycle[0], expected, len(cycle), "unspliced cycle changed"))
    return violations


def _finish(unspliced: Representation, splices: Sequence[Splice], provenance: Provenance,
            cells: Optional[Sequence[Sequence[int]]] = None,
            block_report: Optional[CentralizerBlockReport] = None) -> Composition:
    sigma = _splice_permutation(unspliced.degree, splices)
    result = Representation(unspliced.presentation, compose(unspliced.x, sigma), unspliced.y)
    relations = check_relations(result)
    transitive = is_transitive(result.image_group())
    violations = tuple(cycle_law_violations(unspliced, result, splices))

    blocks = None
    if cells is not None:
        blocks = BlockSystem(result.degree, cells)
        if not is_block_system(result.image_group(), blocks):
            raise NotABlockSystem(f"{provenance.construction} cells are not blocks of the composed group")

    if not relations.ok:
        logger.warning(f"{provenance.construction} composition breaks {', '.join(relations.failed)}")
    if violations:
        logger.warning(f"{provenance.construction} composition has {len(violations)} cycle-law violations")
    logger.info(f"Built {provenance.construction} composition of degree {result.degree} "
                f"(orders {relations.exact_orders}, transitive={transitive})")
    return Composition(result, blocks, provenance, unspliced, relations, transitive, violations, block_report)


def check_cycle_law(comp: Composition) -> List[CycleLawViolation]:
    return cycle_law_violations(comp.unspliced, comp.result, comp.provenance.splices)


def _local_handle(rep: Representation, handle: Handle) -> Handle:
    if not is_handle(rep, handle):
        raise NotAHandle(f"{handle} is not a {handle.k}-handle of the representation")
    return Handle(rep.local(handle.a), rep.local(handle.b), handle.k)


def _require_compatible(rep: Representation, handles: Sequence[Handle]) -> None:
    for i, h1 in enumerate(handles):
        for h2 in handles[i + 1:]:
            if not h1.is_disjoint(h2):
                raise HandleClash(f"handles {h1} and {h2} share a point")
            if not handles_compatible(rep, h1, h2):
                raise InterleavedHandles(f"handles {h1} and {h2} interleave on one xy-cycle")


def _require_same_k(handles: Sequence[Handle]) -> None:
    if len({h.k for h in handles}) > 1:
        raise MixedK(f"handles use exponents {sorted({h.k for h in handles})}")


def _general_splice(reps: Sequence[Representation],
                    assignment: HandleAssignment) -> Tuple[Representation, Splice]:
    if not reps:
        raise InvalidAssignment("no diagrams to compose")
    presentation = reps[0].presentation
    if any(rep.presentation != presentation for rep in reps[1:]):
        raise PresentationMismatch("all diagrams must represent the same triangle group")
    p, t = presentation.p, len(reps)
    if len(assignment.entries) != p:
        raise InvalidAssignment(f"need exactly {p} handles, got {len(assignment.entries)}")
    if t > p:
        raise InvalidAssignment(f"{t} diagrams but only {p} handles")
    for j, _ in assignment.entries:
        if not 1 <= j <= t:
            raise InvalidAssignment(f"diagram index {j} outside 1..{t}")
    uncovered = sorted(set(range(1, t + 1)) - {j for j, _ in assignment.entries})
    if uncovered:
        raise DiagramUncovered(f"diagrams {uncovered} receive no handle")
    _require_same_k(assignment.handles)

    local: List[Tuple[int, Handle]] = []
    for j, handle in assignment.entries:
        local.append((j, _local_handle(reps[j - 1], handle)))
    for j in range(1, t + 1):
        rep = reps[j - 1]
        _require_compatible(rep.at_origin(), [h for d, h in local if d == j])
        if not is_transitive(rep.image_group()):
            raise NotTransitiveInput(f"diagram {j} is not transitive")

    unspliced = disjoint_union(reps)
    offsets = union_offsets(reps)
    a_points = tuple(offsets[j - 1] + h.a for j, h in local)
    b_points = tuple(offsets[j - 1] + h.b for j, h in local)
    return unspliced, (a_points, b_points)


def compose_general(reps: Sequence[Representation], assignment: HandleAssignment) -> Composition:
    """Splice ``p`` handles spread over ``t <= p`` transitive diagrams."""
    unspliced, splice = _general_splice(reps, assignment)
    provenance = Provenance(GENERAL, inputs=tuple(reps), assignment=assignment,
                            handles=assignment.handles, copies=len(reps), splices=(splice,))
    return _finish(unspliced, [splice], provenance)


def _copy_cells(degree: int, copies: int) -> List[Tuple[int, ...]]:
    return [tuple(omega + i * degree for i in range(copies)) for omega in range(1, degree + 1)]


def compose_clone_p(rep: Representation, handle: Handle) -> Composition:
    """``p`` copies of one diagram spliced at the copies of one handle."""
    h = _local_handle(rep, handle)
    base = rep.at_origin()
    p, deg = base.presentation.p, base.degree
    copies = [translate(base, i * deg) for i in range(p)]
    assignment = HandleAssignment([(i + 1, h.translated(i * deg)) for i in range(p)])
    unspliced, splice = _general_splice(copies, assignment)
    provenance = Provenance(CLONE, base=rep, handles=(handle,), assignment=assignment,
                            copies=p, splices=(splice,))
    return _finish(unspliced, [splice], provenance, cells=_copy_cells(deg, p))


def centralizer_cells(rep: Representation, hs: Sequence[Permutation]) -> List[Tuple[int, ...]]:
    """``B_w = (h_1(w), ..., h_p(w))`` for every local point ``w``."""
    return [tuple(h(omega) for h in hs) for omega in range(1, rep.degree + 1)]


def _splice_closed(cells, splice: Splice) -> bool:
    """Every cell meeting the spliced a- or b-points contains all of them."""
    for points in splice:
        orbit = frozenset(points)
        if any(cell & orbit and cell != orbit for cell in cells):
            return False
    return True


def _block_report(pi: GeneratedGroup, phi: GeneratedGroup, cells: Sequence[Tuple[int, ...]],
                  splice: Splice) -> Tuple[CentralizerBlockReport, Optional[List[Tuple[int, ...]]]]:
    distinct: Dict[frozenset, Tuple[int, ...]] = {}
    for cell in cells:
        distinct.setdefault(frozenset(cell), cell)
    partition = all(len(set(c)) == len(c) for c in cells)
    if partition:
        seen = set()
        for cell in distinct:
            if seen & cell:
                partition = False
                break
            seen |= cell
    report = CentralizerBlockReport(
        partition=partition,
        blocks_for_pi=all(is_block(pi, c) for c in distinct),
        blocks_for_phi=all(is_block(phi, c) for c in distinct),
        splice_closed=_splice_closed(distinct, splice),
    )
    if not partition:
        return report, None
    ordered = sorted(distinct.values(), key=min)
    return report, ordered


def compose_centralizer(rep: Representation, handle: Handle, hs: Sequence[Permutation]) -> Composition:
    """Splice the images of one handle under permutations commuting with the diagram.

    Works on the diagram's own point set; ``hs`` act on local points and
    ``hs[0]`` is the identity. Intransitive diagrams are accepted.
    """
    base = rep.at_origin()
    h = _local_handle(rep, handle)
    p, deg = base.presentation.p, base.degree
    if len(hs) != p:
        raise InvalidAssignment(f"need exactly {p} permutations, got {len(hs)}")
    for g in hs:
        if g.degree != deg:
            raise InvalidAssignment(f"permutation of degree {g.degree} on a diagram of degree {deg}")
    if not hs[0].is_identity():
        raise BadIdentityFirst(f"first permutation must be the identity, got {hs[0]}")
    for g in hs:
        if not (commutes(g, base.x) and commutes(g, base.y)):
            raise NotCommuting(f"{g} does not commute with the diagram")
    a_points = tuple(g(h.a) for g in hs)
    b_points = tuple(g(h.b) for g in hs)
    if len(set(a_points + b_points)) != 2 * p:
        raise PointsNotDistinct(f"handle images {a_points} / {b_points} are not all distinct")
    _require_compatible(base, [Handle(a, b, h.k) for a, b in zip(a_points, b_points)])

    splices = ((a_points, b_points),)
    provenance = Provenance(CENTRALIZER, base=rep, handles=(handle,), hs=tuple(hs), copies=1, splices=splices)
    sigma = _splice_permutation(deg, splices)
    phi = GeneratedGroup(deg, [compose(base.x, sigma), base.y])
    report, cells = _block_report(base.image_group(), phi, centralizer_cells(base, hs), splices[0])
    if cells is not None and not is_block_system(phi, BlockSystem(deg, cells)):
        cells = None
    logger.info(f"Centralizer cells: partition={report.partition}, "
                f"blocks for pi={report.blocks_for_pi}, blocks for phi={report.blocks_for_phi}, "
                f"splice closed={report.splice_closed}")
    return _finish(base, splices, provenance, cells=cells, block_report=report)


def _require_p_cycles(g: Permutation, p: int, name: str) -> None:
    bad = [c for c in cycle_decomposition(g) if len(c) != p]
    if bad:
        raise BadCycleType(f"{name} has cycles {bad} whose length is not {p}")


def compose_alpha_beta(rep: Representation, h1: Handle, h2: Handle,
                       alpha: Permutation, beta: Permutation, m: int) -> Composition:
    """``m`` copies, the first handle spliced along the cycles of ``alpha``, the second along ``beta``."""
    base = rep.at_origin()
    p, deg = base.presentation.p, base.degree
    if alpha.degree != m or beta.degree != m:
        raise InvalidAssignment(f"alpha and beta must act on 1..{m}")
    if h1.k != h2.k:
        raise MixedK(f"handles use exponents {h1.k} and {h2.k}")
    first, second = _local_handle(rep, h1), _local_handle(rep, h2)
    if not first.is_disjoint(second):
        raise HandlesNotDisjoint(f"handles {h1} and {h2} share a point")
    if not handles_compatible(base, first, second):
        raise InterleavedHandles(f"handles {h1} and {h2} interleave on one xy-cycle")
    _require_p_cycles(alpha, p, "alpha")
    _require_p_cycles(beta, p, "beta")
    if not is_transitive(GeneratedGroup(m, [alpha, beta])):
        raise NotTransitiveAlphaBeta(f"<{alpha}, {beta}> is not transitive on 1..{m}")
    if not is_transitive(base.image_group()):
        raise NotTransitiveInput("the diagram is not transitive")

    copies = [translate(base, i * deg) for i in range(m)]
    unspliced = disjoint_union(copies)
    splices: List[Splice] = []
    for permutation, handle in ((alpha, first), (beta, second)):
        for cycle in cycle_decomposition(permutation):
            a_points = tuple((i - 1) * deg + handle.a for i in cycle)
            b_points = tuple((i - 1) * deg + handle.b for i in cycle)
            splices.append((a_points, b_points))
    provenance = Provenance(ALPHABETA, base=rep, handles=(h1, h2), alpha=alpha, beta=beta,
                            copies=m, splices=tuple(splices))
    return _finish(unspliced, splices, provenance, cells=_copy_cells(deg, m))
