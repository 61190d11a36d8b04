"""Permutation group algorithms.

Orbits, transitivity, a deterministic Schreier-Sims stabilizer chain
(order and membership), block systems via union-find refinement, and the
action of a group on one of its block systems together with its kernel.

All heavy loops work on 0-based image tuples; ``Permutation`` objects are
only built at the public boundary.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import ValidationError
from .perm import DegreeMismatch, Permutation, PointOutOfRange, is_even, order as perm_order

logger = logging.getLogger(__name__)

Array = Tuple[int, ...]


class NotTransitive(ValidationError):
    """The operation needs a transitive group."""


class InvalidBlockSystem(ValidationError):
    """The cells do not form an equal-size partition of the points."""


class NotABlockSystem(ValidationError):
    """A partition is not invariant under the group."""


def _mul(a: Array, b: Array) -> Array:
    """Apply ``a`` first, then ``b``."""
    return tuple([b[i] for i in a])


def _inv(a: Array) -> Array:
    inv = [0] * len(a)
    for i, v in enumerate(a):
        inv[v] = i
    return tuple(inv)


@dataclass(frozen=True)
class GeneratedGroup:
    """The group generated by ``generators`` acting on {1..degree}.

    Identity generators are stripped, so the trivial group has an empty
    generator list.
    """
    degree: int
    generators: Tuple[Permutation, ...]

    def __init__(self, degree: int, generators: Iterable[Permutation]):
        gens = []
        for g in generators:
            if g.degree != degree:
                raise DegreeMismatch(f"generator of degree {g.degree} in a group of degree {degree}")
            if not g.is_identity() and g not in gens:
                gens.append(g)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "generators", tuple(gens))

    @property
    def arrays(self) -> List[Array]:
        return [g.array_form for g in self.generators]

    def is_trivial(self) -> bool:
        return not self.generators


@dataclass(frozen=True)
class Orbit:
    """Orbit of a point with a Schreier transversal.

    ``transversal[w]`` is a product of generators ``u`` with ``point^u = w``.
    ``points`` lists the orbit in breadth-first order.
    """
    point: int
    points: Tuple[int, ...]
    transversal: Dict[int, Permutation]

    def __contains__(self, point: int) -> bool:
        return point in self.transversal

    def __len__(self) -> int:
        return len(self.points)

    def as_set(self) -> Set[int]:
        return set(self.points)


def _orbit_transversal(gens: Sequence[Array], point: int, identity: Array) -> Dict[int, Array]:
    trans = {point: identity}
    queue = [point]
    for b in queue:
        u = trans[b]
        for g in gens:
            c = g[b]
            if c not in trans:
                trans[c] = _mul(u, g)
                queue.append(c)
    return trans


def _orbit_points(gens: Sequence[Array], point: int) -> List[int]:
    seen = {point}
    queue = [point]
    for b in queue:
        for g in gens:
            c = g[b]
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return queue


def orbit(group: GeneratedGroup, point: int) -> Orbit:
    if not 1 <= point <= group.degree:
        raise PointOutOfRange(f"point {point} outside 1..{group.degree}")
    identity = tuple(range(group.degree))
    trans = _orbit_transversal(group.arrays, point - 1, identity)
    return Orbit(
        point=point,
        points=tuple(b + 1 for b in trans),
        transversal={b + 1: Permutation._from_array(u) for b, u in trans.items()},
    )


def orbits(group: GeneratedGroup) -> List[Tuple[int, ...]]:
    """All orbits, each sorted, ordered by minimum point."""
    seen: Set[int] = set()
    result = []
    gens = group.arrays
    for start in range(group.degree):
        if start in seen:
            continue
        pts = _orbit_points(gens, start)
        seen.update(pts)
        result.append(tuple(sorted(p + 1 for p in pts)))
    return result


def is_transitive(group: GeneratedGroup) -> bool:
    return len(_orbit_points(group.arrays, 0)) == group.degree


class BSGS:
    """Base and strong generating set from deterministic Schreier-Sims.

    New base points are taken in increasing natural order. A base prefix
    may be forced; the chain then starts with exactly those points.
    """

    def __init__(self, degree: int, base: List[int], levels: List[List[Array]],
                 transversals: List[Dict[int, Array]]):
        self.degree = degree
        self._base = base
        self._levels = levels
        self._trans = transversals
        self._inv_cache: List[Dict[int, Array]] = [dict() for _ in base]

    @property
    def base(self) -> Tuple[int, ...]:
        return tuple(b + 1 for b in self._base)

    @property
    def strong_generators(self) -> List[Permutation]:
        seen: Dict[Array, None] = {}
        for level in self._levels:
            for s in level:
                seen.setdefault(s, None)
        return [Permutation._from_array(s) for s in seen]

    def level_generators(self, level: int) -> List[Permutation]:
        """Strong generators fixing the first ``level`` base points."""
        if level >= len(self._levels):
            return []
        return [Permutation._from_array(s) for s in dict.fromkeys(self._levels[level])]

    @property
    def basic_orbits(self) -> List[Tuple[int, ...]]:
        return [tuple(b + 1 for b in t) for t in self._trans]

    @property
    def transversals(self) -> List[Dict[int, Permutation]]:
        return [{b + 1: Permutation._from_array(u) for b, u in t.items()} for t in self._trans]

    def order(self, start_level: int = 0) -> int:
        """Order of the stabilizer of the first ``start_level`` base points."""
        return math.prod(len(t) for t in self._trans[start_level:])

    def _inverse_at(self, level: int, point: int) -> Array:
        cache = self._inv_cache[level]
        inv = cache.get(point)
        if inv is None:
            inv = cache[point] = _inv(self._trans[level][point])
        return inv

    def sift(self, g: Array) -> Tuple[Array, int]:
        """Strip ``g`` through the chain; returns the residue and the level reached."""
        h = g
        for level, b in enumerate(self._base):
            beta = h[b]
            if beta == b:
                continue
            if beta not in self._trans[level]:
                return h, level
            h = _mul(h, self._inverse_at(level, beta))
        return h, len(self._base)

    def contains(self, g: Permutation) -> bool:
        if g.degree != self.degree:
            raise DegreeMismatch(f"permutation of degree {g.degree} against a group of degree {self.degree}")
        h, level = self.sift(g.array_form)
        return level == len(self._base) and all(i == v for i, v in enumerate(h))


def _strip(h: Array, base: List[int], trans: List[Dict[int, Array]], start: int) -> Tuple[Array, int]:
    for level in range(start, len(base)):
        b = base[level]
        beta = h[b]
        if beta == b:
            continue
        if beta not in trans[level]:
            return h, level
        h = _mul(h, _inv(trans[level][beta]))
    return h, len(base)


def _schreier_sims(degree: int, gens: Sequence[Array], base_prefix: Sequence[int] = ()) -> BSGS:
    identity = tuple(range(degree))
    gens = [g for g in dict.fromkeys(gens) if g != identity]
    base = list(base_prefix)
    for g in gens:
        if all(g[b] == b for b in base):
            base.append(next(i for i in range(degree) if g[i] != i))
    levels = [[g for g in gens if all(g[b] == b for b in base[:i])] for i in range(len(base))]
    trans = [_orbit_transversal(levels[i], base[i], identity) for i in range(len(base))]

    restarts = 0
    i = len(base) - 1
    while i >= 0:
        restart = False
        for beta, u_beta in list(trans[i].items()):
            for s in levels[i]:
                g1 = _mul(u_beta, s)
                u_gamma = trans[i][s[beta]]
                if g1 == u_gamma:
                    continue
                h, j = _strip(_mul(g1, _inv(u_gamma)), base, trans, i + 1)
                if j == len(base):
                    if h == identity:
                        continue
                    base.append(next(p for p in range(degree) if h[p] != p))
                    levels.append([])
                    trans.append({base[-1]: identity})
                for level in range(i + 1, j + 1):
                    levels[level].append(h)
                    trans[level] = _orbit_transversal(levels[level], base[level], identity)
                i = j
                restart = True
                restarts += 1
                break
            if restart:
                break
        if not restart:
            i -= 1

    logger.debug(f"Schreier-Sims on degree {degree}: base length {len(base)}, {restarts} chain updates")
    return BSGS(degree, base, levels, trans)


def build_bsgs(group: GeneratedGroup, base_prefix: Sequence[int] = ()) -> BSGS:
    """Stabilizer chain for ``group``; ``base_prefix`` holds 1-based points."""
    prefix = []
    for p in base_prefix:
        if not 1 <= p <= group.degree:
            raise PointOutOfRange(f"base point {p} outside 1..{group.degree}")
        prefix.append(p - 1)
    return _schreier_sims(group.degree, group.arrays, prefix)


def group_order(b: BSGS) -> int:
    return b.order()


def contains(b: BSGS, g: Permutation) -> bool:
    return b.contains(g)


@dataclass(frozen=True)
class BlockSystem:
    """Partition of {1..degree} into equal-size cells.

    Cells keep the order they were given in; for composed representations
    that order is the copy order, which fixes the reference cycle of a cell.
    """
    degree: int
    blocks: Tuple[Tuple[int, ...], ...]
    block_of: Tuple[int, ...] = field(repr=False, compare=False)

    def __init__(self, degree: int, blocks: Iterable[Sequence[int]]):
        cells = tuple(tuple(int(p) for p in cell) for cell in blocks)
        block_of = [-1] * degree
        for index, cell in enumerate(cells):
            if not cell:
                raise InvalidBlockSystem("empty cell")
            for p in cell:
                if not 1 <= p <= degree:
                    raise InvalidBlockSystem(f"point {p} outside 1..{degree}")
                if block_of[p - 1] != -1:
                    raise InvalidBlockSystem(f"point {p} lies in two cells")
                block_of[p - 1] = index
        if -1 in block_of:
            missing = block_of.index(-1) + 1
            raise InvalidBlockSystem(f"point {missing} lies in no cell")
        if len({len(c) for c in cells}) != 1:
            raise InvalidBlockSystem("cells differ in size")
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "blocks", cells)
        object.__setattr__(self, "block_of", tuple(block_of))

    @property
    def cell_size(self) -> int:
        return len(self.blocks[0])

    @property
    def num_cells(self) -> int:
        return len(self.blocks)

    def cell_of(self, point: int) -> int:
        """0-based index of the cell holding ``point``."""
        return self.block_of[point - 1]

    def is_trivial(self) -> bool:
        return self.num_cells == 1 or self.cell_size == 1

    def as_sets(self) -> Set[frozenset]:
        return {frozenset(c) for c in self.blocks}


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if y < x:
            x, y = y, x
        self.parent[y] = x
        return True


def _finest_invariant_partition(gens: Sequence[Array], degree: int,
                                seeds: Sequence[Tuple[int, int]]) -> _UnionFind:
    uf = _UnionFind(degree)
    queue = []
    for a, b in seeds:
        if uf.union(a, b):
            queue.append((a, b))
    for a, b in queue:
        for g in gens:
            c, d = uf.find(g[a]), uf.find(g[b])
            if uf.union(c, d):
                queue.append((c, d))
    return uf


def _classes(uf: _UnionFind, degree: int) -> List[Tuple[int, ...]]:
    cells: Dict[int, List[int]] = {}
    for p in range(degree):
        cells.setdefault(uf.find(p), []).append(p + 1)
    return sorted(tuple(c) for c in cells.values())


def minimal_block(group: GeneratedGroup, a: int, b: int) -> BlockSystem:
    """Finest block system with ``a`` and ``b`` in one cell."""
    if a == b:
        raise ValidationError("minimal_block needs two distinct points")
    for p in (a, b):
        if not 1 <= p <= group.degree:
            raise PointOutOfRange(f"point {p} outside 1..{group.degree}")
    if not is_transitive(group):
        raise NotTransitive("minimal_block needs a transitive group")
    uf = _finest_invariant_partition(group.arrays, group.degree, [(a - 1, b - 1)])
    return BlockSystem(group.degree, _classes(uf, group.degree))


def is_primitive(group: GeneratedGroup) -> bool:
    if not is_transitive(group):
        raise NotTransitive("primitivity is defined for transitive groups")
    for b in range(2, group.degree + 1):
        if minimal_block(group, 1, b).num_cells > 1:
            return False
    return True


def is_block(group: GeneratedGroup, points: Iterable[int]) -> bool:
    """Whether ``points`` is a block: every image equals it or misses it."""
    pts = sorted(set(points))
    if len(pts) <= 1:
        return True
    uf = _finest_invariant_partition(group.arrays, group.degree,
                                     [(pts[0] - 1, p - 1) for p in pts[1:]])
    root = uf.find(pts[0] - 1)
    return sum(1 for p in range(group.degree) if uf.find(p) == root) == len(pts)


def is_block_system(group: GeneratedGroup, system: BlockSystem) -> bool:
    """Every generator maps every cell onto a cell."""
    if system.degree != group.degree:
        return False
    for g in group.arrays:
        for cell in system.blocks:
            target = system.block_of[g[cell[0] - 1]]
            if any(system.block_of[g[p - 1]] != target for p in cell):
                return False
    return True


def induced_cell_action(g: Permutation, system: BlockSystem) -> Permutation:
    """The permutation ``g`` induces on cell indices (1-based)."""
    a = g.array_form
    return Permutation._from_array([system.block_of[a[cell[0] - 1]] for cell in system.blocks])


def restrict_to_cell(g: Permutation, cell: Sequence[int]) -> Permutation:
    """Restriction of ``g`` to a cell it stabilizes, labelled by position in the cell."""
    position = {p: i for i, p in enumerate(cell)}
    a = g.array_form
    try:
        return Permutation._from_array([position[a[p - 1] + 1] for p in cell])
    except KeyError:
        raise ValidationError(f"{g} does not stabilize the cell {tuple(cell)}") from None


@dataclass(frozen=True)
class BlockActionData:
    """Action of a group on a block system.

    ``quotient`` acts on cell indices, ``kernel`` is generated inside the
    original degree, and ``block_stabilizer_schreier_gens[i]`` generates the
    setwise stabilizer of cell ``i``. ``group_order`` and ``kernel_order``
    come from the stabilizer chain of the combined action on points and cells.
    """
    system: BlockSystem
    quotient: GeneratedGroup
    kernel: GeneratedGroup
    block_stabilizer_schreier_gens: Tuple[Tuple[Permutation, ...], ...]
    group_order: int
    kernel_order: int


def _extended_arrays(group: GeneratedGroup, system: BlockSystem) -> List[Array]:
    n = group.degree
    ext = []
    for g in group.arrays:
        cell_img = [n + system.block_of[g[cell[0] - 1]] for cell in system.blocks]
        ext.append(tuple(g) + tuple(cell_img))
    return ext


def _cell_stabilizer_gens(ext: Sequence[Array], cell_point: int, n: int) -> Tuple[Permutation, ...]:
    """Schreier generators for the stabilizer of one cell point of the combined action."""
    identity = tuple(range(len(ext[0]))) if ext else ()
    trans = _orbit_transversal(ext, cell_point, identity)
    inverses: Dict[int, Array] = {}
    found: Dict[Array, None] = {}
    for beta, u_beta in trans.items():
        for s in ext:
            gamma = s[beta]
            if gamma not in inverses:
                inverses[gamma] = _inv(trans[gamma])
            sg = _mul(_mul(u_beta, s), inverses[gamma])[:n]
            if any(i != v for i, v in enumerate(sg)):
                found.setdefault(sg, None)
    return tuple(Permutation._from_array(a) for a in found)


def block_action(group: GeneratedGroup, system: BlockSystem) -> BlockActionData:
    if not is_block_system(group, system):
        raise NotABlockSystem("the partition is not invariant under the group")
    n = group.degree
    d = system.num_cells
    quotient = GeneratedGroup(d, [induced_cell_action(g, system) for g in group.generators])
    if group.is_trivial():
        stab = tuple(() for _ in range(d))
        return BlockActionData(system, quotient, GeneratedGroup(n, []), stab, 1, 1)

    ext = _extended_arrays(group, system)
    chain = _schreier_sims(n + d, ext, base_prefix=range(n, n + d))
    kernel_gens = [Permutation._from_array(s.array_form[:n]) for s in chain.level_generators(d)]
    kernel = GeneratedGroup(n, kernel_gens)
    stabilizers = tuple(_cell_stabilizer_gens(ext, n + i, n) for i in range(d))
    logger.debug(f"block action on {d} cells: |H| = {chain.order()}, |N| = {chain.order(d)}")
    return BlockActionData(
        system=system,
        quotient=quotient,
        kernel=kernel,
        block_stabilizer_schreier_gens=stabilizers,
        group_order=chain.order(),
        kernel_order=chain.order(d),
    )


def is_abelian(group: GeneratedGroup) -> bool:
    gens = group.arrays
    for i, g in enumerate(gens):
        for h in gens[i + 1:]:
            if _mul(g, h) != _mul(h, g):
                return False
    return True


def is_alternating(group: GeneratedGroup, order: Optional[int] = None) -> bool:
    n = group.degree
    if n < 3 or not all(is_even(g) for g in group.generators):
        return False
    if not is_transitive(group):
        return False
    if order is None:
        order = build_bsgs(group).order()
    return order == math.factorial(n) // 2


def is_symmetric(group: GeneratedGroup, order: Optional[int] = None) -> bool:
    n = group.degree
    if n > 1 and not is_transitive(group):
        return False
    if order is None:
        order = build_bsgs(group).order()
    return order == math.factorial(n)


def is_cyclic(group: GeneratedGroup, order: Optional[int] = None) -> bool:
    if not is_abelian(group):
        return False
    if order is None:
        order = build_bsgs(group).order()
    exponent = math.lcm(1, *(perm_order(g) for g in group.generators))
    return exponent == order


def _is_power_of(value: int, p: int) -> bool:
    while value % p == 0 and value > 1:
        value //= p
    return value == 1


def is_elementary_abelian(group: GeneratedGroup, p: int, order: Optional[int] = None) -> bool:
    if any(perm_order(g) != p for g in group.generators):
        return False
    if not is_abelian(group):
        return False
    if order is None:
        order = build_bsgs(group).order()
    return _is_power_of(order, p)


def closure(group: GeneratedGroup, limit: int = 100_000) -> Set[Permutation]:
    """All elements by breadth-first multiplication; for small groups only."""
    identity = tuple(range(group.degree))
    elements = {identity}
    queue = [identity]
    gens = group.arrays
    for e in queue:
        for g in gens:
            h = _mul(e, g)
            if h not in elements:
                elements.add(h)
                queue.append(h)
                if len(elements) > limit:
                    raise ValidationError(f"group has more than {limit} elements")
    return {Permutation._from_array(e) for e in elements}
