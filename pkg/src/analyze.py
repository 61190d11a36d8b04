"""Structure of composed representations.

Block action, kernel and block groups of a composition, the dimension of
the kernel as a module over F_p, and the order checks that decide between
the possible shapes of the composed group.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .compose import ALPHABETA, CLONE, Composition
from .errors import ValidationError
from .group import (BSGS, BlockSystem, GeneratedGroup, NotABlockSystem, block_action, build_bsgs,
                    induced_cell_action, is_alternating, is_block_system, is_cyclic,
                    is_elementary_abelian, is_symmetric, restrict_to_cell)
from .perm import Permutation, conjugate, power
from .triangle import is_prime, maps_onto_cyclic

logger = logging.getLogger(__name__)

CASE1 = "Case1"
CASE2 = "Case2"
INAPPLICABLE = "Inapplicable"
ANOMALOUS = "Anomalous"


class AnalysisError(ValidationError):
    """Base class for analysis failures."""


class BlocksMissing(AnalysisError):
    """The composition carries no block system."""


class NotAPowerOfReferenceCycle(AnalysisError):
    """A kernel element does not rotate a cell along its copy order."""


class WrongProvenance(AnalysisError):
    """The composition was not built by the construction a check requires."""


class HypothesisFailed(AnalysisError):
    """A precondition of a structural check does not hold."""

    def __init__(self, hypothesis: str):
        super().__init__(f"hypothesis failed: {hypothesis}")
        self.hypothesis = hypothesis


def verify_blocks(group: GeneratedGroup, system: BlockSystem) -> bool:
    return is_block_system(group, system)


@dataclass(frozen=True)
class BlockGroupInfo:
    """Recognition flags for the group a cell stabilizer induces on its cell."""
    degree: int
    order: int
    is_alternating: bool
    is_symmetric: bool
    is_cyclic: bool


@dataclass(frozen=True)
class ImprimitivityReport:
    blocks: BlockSystem
    group_order: int
    quotient_order: int
    kernel_order: int
    kernel_elementary_abelian: bool
    kernel_prime: Optional[int]
    fp_dimension: Optional[int]
    q_block: BlockGroupInfo
    q_orders: Tuple[int, ...]
    p_orders: Tuple[int, ...]
    kernel_in_block_product: bool
    psi_is_alternating: bool
    equivalence_checked: Optional[bool]
    module_action_ok: Optional[bool]
    copy_action_matches: Optional[bool]
    kernel_generators: Tuple[Permutation, ...] = field(repr=False, default=())

    def to_dict(self) -> Dict[str, Any]:
        """JSON form; permutations in cycle notation."""
        return {
            "blocks": [list(c) for c in self.blocks.blocks],
            "group_order": self.group_order,
            "quotient_order": self.quotient_order,
            "kernel_order": self.kernel_order,
            "kernel_elementary_abelian": self.kernel_elementary_abelian,
            "kernel_prime": self.kernel_prime,
            "fp_dimension": self.fp_dimension,
            "q_block": asdict(self.q_block),
            "q_orders": list(self.q_orders),
            "p_orders": list(self.p_orders),
            "kernel_in_block_product": self.kernel_in_block_product,
            "psi_is_alternating": self.psi_is_alternating,
            "equivalence_checked": self.equivalence_checked,
            "module_action_ok": self.module_action_ok,
            "copy_action_matches": self.copy_action_matches,
        }


def _smallest_prime_factor(n: int) -> int:
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return d
    return n


def _rank_mod_p(rows: List[List[int]], p: int) -> int:
    if not rows:
        return 0
    a = np.array(rows, dtype=object) % p
    m, n = a.shape
    rank = 0
    for c in range(n):
        pivot = next((i for i in range(rank, m) if a[i, c] % p != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            a[[rank, pivot], :] = a[[pivot, rank], :]
        inv = pow(int(a[rank, c]), -1, p)
        a[rank, :] = (a[rank, :] * inv) % p
        for i in range(rank + 1, m):
            if a[i, c] % p != 0:
                a[i, :] = (a[i, :] - a[i, c] * a[rank, :]) % p
        rank += 1
        if rank == m:
            break
    return rank


def exponent_vector(g: Permutation, blocks: BlockSystem, p: int) -> List[int]:
    """``e`` per cell with ``g`` acting on the cell as the copy-order cycle to the power ``e``."""
    if blocks.cell_size != p:
        raise NotAPowerOfReferenceCycle(f"cells have size {blocks.cell_size}, not {p}")
    reference = Permutation._from_array([(i + 1) % p for i in range(p)])
    vector = []
    for cell in blocks.blocks:
        try:
            local = restrict_to_cell(g, cell)
        except ValidationError:
            raise NotAPowerOfReferenceCycle(f"{g} moves the cell {cell}") from None
        e = local(1) - 1
        if local != power(reference, e):
            raise NotAPowerOfReferenceCycle(f"{g} acts on the cell {cell} as {local}")
        vector.append(e)
    return vector


def fp_module_dimension(kernel: GeneratedGroup, blocks: BlockSystem, p: int) -> int:
    """Rank over F_p of the kernel's exponent vectors."""
    rows = [exponent_vector(g, blocks, p) for g in kernel.generators]
    return _rank_mod_p(rows, p)


def module_action_consistent(group: GeneratedGroup, kernel: GeneratedGroup, kernel_chain: BSGS,
                             blocks: BlockSystem, p: int) -> bool:
    """Conjugating the kernel by the group permutes exponent vectors along the block action."""
    for g in group.generators:
        psi = induced_cell_action(g, blocks)
        for n in kernel.generators:
            c = conjugate(n, g)
            if not kernel_chain.contains(c):
                return False
            try:
                before = exponent_vector(n, blocks, p)
                after = exponent_vector(c, blocks, p)
            except NotAPowerOfReferenceCycle:
                return False
            if any(after[psi(i + 1) - 1] != before[i] for i in range(blocks.num_cells)):
                return False
    return True


def _block_group(gens: Sequence[Permutation], cell: Sequence[int]) -> GeneratedGroup:
    return GeneratedGroup(len(cell), [restrict_to_cell(g, cell) for g in gens])


def _block_group_info(q: GeneratedGroup) -> BlockGroupInfo:
    order = build_bsgs(q).order()
    return BlockGroupInfo(
        degree=q.degree,
        order=order,
        is_alternating=is_alternating(q, order),
        is_symmetric=is_symmetric(q, order),
        is_cyclic=is_cyclic(q, order),
    )


def _copy_action_matches(comp: Composition) -> Optional[bool]:
    prov = comp.provenance
    if prov.construction != ALPHABETA:
        return None
    deg = prov.base.degree
    phi_x = comp.result.x
    for permutation, handle in zip((prov.alpha, prov.beta), prov.handles):
        a = prov.base.local(handle.a)
        cell = [i * deg + a for i in range(prov.copies)]
        if restrict_to_cell(phi_x, cell) != permutation:
            return False
    return True


def analyze_imprimitivity(comp: Composition) -> ImprimitivityReport:
    if comp.blocks is None:
        raise BlocksMissing("the composition carries no block system")
    group = comp.result.image_group()
    system = comp.blocks
    if not verify_blocks(group, system):
        raise NotABlockSystem("stored cells are not blocks of the composed group")

    data = block_action(group, system)
    quotient_order = build_bsgs(data.quotient).order()
    if quotient_order * data.kernel_order != data.group_order:
        raise AnalysisError(f"|psi(H)| * |N| = {quotient_order} * {data.kernel_order} "
                            f"differs from |H| = {data.group_order}")

    kernel = data.kernel
    kernel_order = data.kernel_order
    if kernel_order == 1:
        elementary, prime = True, None
    else:
        prime = _smallest_prime_factor(kernel_order)
        elementary = is_elementary_abelian(kernel, prime, kernel_order)

    fp_dimension = None
    module_ok = None
    if kernel_order == 1:
        fp_dimension = 0
    elif elementary and prime == system.cell_size:
        try:
            fp_dimension = fp_module_dimension(kernel, system, prime)
            if prime ** fp_dimension != kernel_order:
                logger.warning(f"F_{prime} rank {fp_dimension} disagrees with |N| = {kernel_order}")
            module_ok = module_action_consistent(group, kernel, build_bsgs(kernel), system, prime)
        except NotAPowerOfReferenceCycle as e:
            logger.warning(f"kernel is not a module over copy-order cycles: {e}")

    q_groups = [_block_group(gens, cell)
                for gens, cell in zip(data.block_stabilizer_schreier_gens, system.blocks)]
    q_block = _block_group_info(q_groups[0])
    q_orders = (q_block.order,) + tuple(build_bsgs(q).order() for q in q_groups[1:])
    p_orders = tuple(build_bsgs(_block_group(kernel.generators, cell)).order() for cell in system.blocks)

    equivalence = None
    if comp.provenance.construction in (CLONE, ALPHABETA):
        base = comp.provenance.base
        equivalence = (induced_cell_action(comp.result.x, system) == base.x
                       and induced_cell_action(comp.result.y, system) == base.y)

    report = ImprimitivityReport(
        blocks=system,
        group_order=data.group_order,
        quotient_order=quotient_order,
        kernel_order=kernel_order,
        kernel_elementary_abelian=elementary,
        kernel_prime=prime,
        fp_dimension=fp_dimension,
        q_block=q_block,
        q_orders=q_orders,
        p_orders=p_orders,
        kernel_in_block_product=math.prod(p_orders) % kernel_order == 0,
        psi_is_alternating=is_alternating(data.quotient, quotient_order),
        equivalence_checked=equivalence,
        module_action_ok=module_ok,
        copy_action_matches=_copy_action_matches(comp),
        kernel_generators=kernel.generators,
    )
    logger.info(f"Imprimitivity: |H| = {report.group_order}, |psi(H)| = {quotient_order}, "
                f"|N| = {kernel_order}, dim = {fp_dimension}, |Q_1| = {q_block.order}")
    return report


def wreath_embedding_check(comp: Composition, report: Optional[ImprimitivityReport] = None) -> bool:
    """|H| divides |Q_1|^cells * |psi(H)|."""
    report = report or analyze_imprimitivity(comp)
    bound = report.q_block.order ** report.blocks.num_cells * report.quotient_order
    return bound % report.group_order == 0


@dataclass(frozen=True)
class Thm7Verdict:
    case: str
    p: int
    degree: int
    group_order: Optional[int] = None
    kernel_order: Optional[int] = None
    quotient_order: Optional[int] = None
    fp_dimension: Optional[int] = None
    flags: Dict[str, bool] = field(default_factory=dict)
    reason: str = ""
    dump: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if self.dump is None:
            data.pop("dump")
        return data


def _dump(comp: Composition, report: ImprimitivityReport) -> Dict[str, Any]:
    return {
        "x": str(comp.result.x),
        "y": str(comp.result.y),
        "kernel_generators": [str(g) for g in report.kernel_generators],
        "report": report.to_dict(),
    }


def classify_thm7(comp: Composition, report: Optional[ImprimitivityReport] = None) -> Thm7Verdict:
    """Decide which of the two kernel shapes a clone composition over an alternating quotient has.

    ``Case1``: kernel of order p, the diagonal, group order ``p * deg!/2``.
    ``Case2``: kernel of order ``p^(deg-1)``, group order ``p^(deg-1) * deg!/2``.
    Anything else is reported as ``Anomalous`` with a dump.
    """
    prov = comp.provenance
    if prov.construction != CLONE:
        raise WrongProvenance(f"expected a clone composition, got {prov.construction}")
    pres = comp.result.presentation
    p, q, r = pres.exponents
    deg = prov.base.degree
    flags = {
        "p_prime": is_prime(p),
        "deg_gt_6": deg > 6,
        "p_divides_qr": (q * r) % p == 0,
        "p_divides_deg": deg % p == 0,
        "maps_onto_cp": maps_onto_cyclic(pres, p),
    }
    if not flags["p_prime"]:
        return Thm7Verdict(INAPPLICABLE, p, deg, flags=flags, reason="p is not prime")
    if not flags["deg_gt_6"]:
        return Thm7Verdict(INAPPLICABLE, p, deg, flags=flags, reason="degree at most 6")

    report = report or analyze_imprimitivity(comp)
    orders = dict(group_order=report.group_order, kernel_order=report.kernel_order,
                  quotient_order=report.quotient_order, fp_dimension=report.fp_dimension)
    if not report.psi_is_alternating:
        return Thm7Verdict(INAPPLICABLE, p, deg, flags=flags, reason="block action is not alternating", **orders)

    half = math.factorial(deg) // 2
    if report.group_order == p * half and report.kernel_order == p and report.fp_dimension == 1:
        if flags["p_divides_qr"] and flags["p_divides_deg"] and flags["maps_onto_cp"]:
            verdict = Thm7Verdict(CASE1, p, deg, flags=flags, reason="diagonal kernel", **orders)
        else:
            verdict = Thm7Verdict(ANOMALOUS, p, deg, flags=flags,
                                  reason="diagonal kernel without the arithmetic conditions",
                                  dump=_dump(comp, report), **orders)
    elif report.group_order == p ** (deg - 1) * half and report.fp_dimension == deg - 1:
        verdict = Thm7Verdict(CASE2, p, deg, flags=flags, reason="augmentation kernel", **orders)
    else:
        verdict = Thm7Verdict(ANOMALOUS, p, deg, flags=flags, reason="orders match neither shape",
                              dump=_dump(comp, report), **orders)

    if verdict.case == ANOMALOUS:
        logger.warning(f"Anomalous clone composition at degree {deg}, p={p}: {verdict.reason}")
    else:
        logger.info(f"Clone composition at degree {deg}, p={p}: {verdict.case}")
    return verdict


@dataclass(frozen=True)
class Thm8Verdict:
    verified: bool
    expected_order: int
    found_order: int
    q_block_is_alternating: bool
    m: int
    degree: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def verify_thm8(comp: Composition, m: Optional[int] = None,
                report: Optional[ImprimitivityReport] = None) -> Thm8Verdict:
    """Check that a copy-permutation composition has the order of the full wreath product of alternating groups."""
    prov = comp.provenance
    if prov.construction != ALPHABETA:
        raise WrongProvenance(f"expected an alpha/beta composition, got {prov.construction}")
    m = prov.copies if m is None else m
    if m != prov.copies:
        raise HypothesisFailed(f"m = {m} but the composition has {prov.copies} copies")
    p = comp.result.presentation.p
    base = prov.base
    deg = base.degree

    if not is_prime(p):
        raise HypothesisFailed("p is not prime")
    if m < 5:
        raise HypothesisFailed("m < 5")
    if m == deg - 1:
        raise HypothesisFailed("m = deg-1")
    if deg <= 6:
        raise HypothesisFailed("deg <= 6")
    if not is_alternating(GeneratedGroup(m, [prov.alpha, prov.beta])):
        raise HypothesisFailed("<alpha,beta> not alternating")
    if not is_alternating(base.image_group()):
        raise HypothesisFailed("image of the diagram not alternating")

    report = report or analyze_imprimitivity(comp)
    expected = (math.factorial(m) // 2) ** deg * (math.factorial(deg) // 2)
    q_alt = report.q_block.is_alternating and report.q_block.degree == m
    verdict = Thm8Verdict(
        verified=report.group_order == expected and q_alt,
        expected_order=expected,
        found_order=report.group_order,
        q_block_is_alternating=q_alt,
        m=m,
        degree=deg,
    )
    logger.info(f"Wreath check m={m}, degree {deg}: verified={verdict.verified}")
    return verdict
