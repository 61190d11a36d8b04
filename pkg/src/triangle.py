"""Permutation representations of triangle groups.

A representation of ``Delta(p, q, r) = <x, y | x^p = y^q = (xy)^r = 1>``
is a pair of permutations on consecutive points
``offset+1 .. offset+degree``. Relations are checked by divisibility
unless exact orders are asked for.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import BudgetExhausted, ValidationError
from .group import GeneratedGroup, NotTransitive, is_alternating, is_transitive
from .perm import (DegreeMismatch, Permutation, compose, cycle_containing,
                   is_even, order, perm_from_cycles, power)

logger = logging.getLogger(__name__)


class InvalidPresentation(ValidationError):
    """Exponents below 2, or representations of different triangle groups."""


class InvalidHandle(ValidationError):
    """A handle fails its defining predicate."""


class DomainMismatch(ValidationError):
    """A point or bijection does not match the point set of a representation."""


class DegreeTooLarge(ValidationError):
    """Exhaustive search requested above the configured degree cap."""


class NotFound(BudgetExhausted):
    """Randomized search used its budget without a witness."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class TrianglePresentation:
    p: int
    q: int
    r: int

    def __post_init__(self):
        for name in ("p", "q", "r"):
            if getattr(self, name) < 2:
                raise InvalidPresentation(f"{name} must be at least 2, got {getattr(self, name)}")

    @property
    def exponents(self) -> Tuple[int, int, int]:
        return self.p, self.q, self.r

    def __str__(self) -> str:
        return f"Delta({self.p},{self.q},{self.r})"


@dataclass(frozen=True)
class Representation:
    """Images of ``x`` and ``y``; point ``i`` of the permutations carries label ``offset + i``."""
    presentation: TrianglePresentation
    x: Permutation
    y: Permutation
    offset: int = 0

    def __post_init__(self):
        if self.x.degree != self.y.degree:
            raise DegreeMismatch(f"x has degree {self.x.degree}, y has degree {self.y.degree}")
        if self.offset < 0:
            raise DomainMismatch(f"negative offset {self.offset}")

    @property
    def degree(self) -> int:
        return self.x.degree

    @property
    def points(self) -> range:
        return range(self.offset + 1, self.offset + self.degree + 1)

    @property
    def xy(self) -> Permutation:
        return compose(self.x, self.y)

    def local(self, point: int) -> int:
        """1-based position of a labelled point inside the permutations."""
        i = point - self.offset
        if not 1 <= i <= self.degree:
            raise DomainMismatch(f"point {point} outside {self.offset + 1}..{self.offset + self.degree}")
        return i

    def label(self, local_point: int) -> int:
        return local_point + self.offset

    def act(self, g: Permutation, point: int) -> int:
        """Image of a labelled point under one of this representation's permutations."""
        return self.label(g(self.local(point)))

    def image_group(self) -> GeneratedGroup:
        return GeneratedGroup(self.degree, [self.x, self.y])

    def at_origin(self) -> "Representation":
        if self.offset == 0:
            return self
        return Representation(self.presentation, self.x, self.y)


@dataclass(frozen=True, order=True)
class Handle:
    """Ordered pair of x-fixed points with ``(xy)^k`` sending ``a`` to ``b``."""
    a: int
    b: int
    k: int = 1

    def __post_init__(self):
        if self.a == self.b:
            raise InvalidHandle(f"a handle needs two points, got ({self.a},{self.b})")
        if self.k < 1:
            raise InvalidHandle(f"handle exponent must be positive, got {self.k}")

    @property
    def points(self) -> Set[int]:
        return {self.a, self.b}

    def is_disjoint(self, other: "Handle") -> bool:
        return not self.points & other.points

    def translated(self, offset: int) -> "Handle":
        return Handle(self.a + offset, self.b + offset, self.k)

    def __str__(self) -> str:
        return f"[{self.a},{self.b}]_{self.k}"


@dataclass(frozen=True)
class RelationReport:
    ok: bool
    exact_orders: Tuple[int, int, int]
    exact: bool
    failed: Tuple[str, ...] = ()


def check_relations(rep: Representation, strict: bool = False) -> RelationReport:
    """Divisibility of the three orders, or equality when ``strict``."""
    orders = (order(rep.x), order(rep.y), order(rep.xy))
    names = ("x^p", "y^q", "(xy)^r")
    failed = []
    for name, found, exponent in zip(names, orders, rep.presentation.exponents):
        good = found == exponent if strict else exponent % found == 0
        if not good:
            failed.append(name)
    exact = orders == rep.presentation.exponents
    return RelationReport(ok=not failed, exact_orders=orders, exact=exact, failed=tuple(failed))


def is_handle(rep: Representation, handle: Handle) -> bool:
    try:
        a, b = rep.local(handle.a), rep.local(handle.b)
    except DomainMismatch:
        return False
    if rep.x(a) != a or rep.x(b) != b:
        return False
    return power(rep.xy, handle.k)(a) == b


def find_handles(rep: Representation, k: int = 1) -> List[Handle]:
    """All k-handles in ascending ``(a, b)`` order."""
    if k < 1:
        raise InvalidHandle(f"handle exponent must be positive, got {k}")
    fixed = sorted(i for i in range(1, rep.degree + 1) if rep.x(i) == i)
    zk = power(rep.xy, k)
    handles = []
    for a in fixed:
        b = zk(a)
        if b != a and rep.x(b) == b:
            handles.append(Handle(rep.label(a), rep.label(b), k))
    return handles


def handle_arc(rep: Representation, handle: Handle) -> Tuple[int, ...]:
    """Labelled points ``a, (a)xy, ..., b`` walked forward along the xy-cycle."""
    cycle = cycle_containing(rep.xy, rep.local(handle.a))
    steps = handle.k % len(cycle)
    return tuple(rep.label(cycle[i]) for i in range(steps + 1))


def handles_compatible(rep: Representation, h1: Handle, h2: Handle) -> bool:
    """Disjoint handles whose xy-arcs do not interleave."""
    if not h1.is_disjoint(h2):
        return False
    return not set(handle_arc(rep, h1)) & set(handle_arc(rep, h2))


def select_disjoint_handles(rep: Representation, handles: Sequence[Handle],
                            count: int) -> Optional[Tuple[Handle, ...]]:
    """First ``count`` pairwise compatible handles in list order, or None."""
    chosen: List[Handle] = []

    def extend(start: int) -> bool:
        if len(chosen) == count:
            return True
        for i in range(start, len(handles)):
            if all(handles_compatible(rep, handles[i], h) for h in chosen):
                chosen.append(handles[i])
                if extend(i + 1):
                    return True
                chosen.pop()
        return False

    return tuple(chosen) if extend(0) else None


def translate(rep: Representation, offset: int) -> Representation:
    """Relabel point ``i`` as ``i + offset``."""
    if offset < 0 or rep.offset + offset < 0:
        raise DomainMismatch(f"cannot shift by {offset}")
    return Representation(rep.presentation, rep.x, rep.y, rep.offset + offset)


def is_equivalence(rep1: Representation, rep2: Representation, f: Mapping[int, int]) -> bool:
    """Whether ``f`` intertwines the two actions on ``x`` and ``y``."""
    if set(f) != set(rep1.points):
        raise DomainMismatch("bijection domain differs from the first point set")
    if sorted(f.values()) != list(rep2.points):
        raise DomainMismatch("bijection is not onto the second point set")
    for omega in rep1.points:
        if f[rep1.act(rep1.x, omega)] != rep2.act(rep2.x, f[omega]):
            return False
        if f[rep1.act(rep1.y, omega)] != rep2.act(rep2.y, f[omega]):
            return False
    return True


def centralizer_elements(rep: Representation) -> List[Permutation]:
    """Centralizer of the image group in the symmetric group, on local points.

    The image of point 1 determines an element; each candidate is propagated
    along a Schreier tree and kept if it is a bijection commuting with both
    generators. Ordered by the image of point 1.
    """
    if not is_transitive(rep.image_group()):
        raise NotTransitive("centralizer propagation needs a transitive representation")
    n = rep.degree
    gens = [rep.x.array_form, rep.y.array_form]
    tree: List[Tuple[int, int, int]] = []
    seen = {0}
    queue = [0]
    for w in queue:
        for gi, g in enumerate(gens):
            c = g[w]
            if c not in seen:
                seen.add(c)
                tree.append((c, w, gi))
                queue.append(c)

    result = []
    for gamma in range(n):
        h = [-1] * n
        h[0] = gamma
        for c, parent, gi in tree:
            h[c] = gens[gi][h[parent]]
        if len(set(h)) != n:
            continue
        if all(h[g[w]] == g[h[w]] for g in gens for w in range(n)):
            result.append(Permutation._from_array(h))
    logger.debug(f"centralizer of a degree {n} representation has {len(result)} elements")
    return result


def disjoint_union(reps: Sequence[Representation]) -> Representation:
    """Copies side by side on ``1..sum(degrees)`` in list order."""
    if not reps:
        raise DomainMismatch("disjoint union of no representations")
    presentation = reps[0].presentation
    for rep in reps[1:]:
        if rep.presentation != presentation:
            raise InvalidPresentation(f"cannot combine {presentation} with {rep.presentation}")
    x_images: List[int] = []
    y_images: List[int] = []
    base = 0
    for rep in reps:
        x_images.extend(v + base for v in rep.x.images)
        y_images.extend(v + base for v in rep.y.images)
        base += rep.degree
    return Representation(presentation, Permutation(x_images), Permutation(y_images))


def union_offsets(reps: Sequence[Representation]) -> List[int]:
    offsets = []
    base = 0
    for rep in reps:
        offsets.append(base)
        base += rep.degree
    return offsets


def abelianization_invariants(pres: TrianglePresentation) -> Tuple[int, int]:
    """``(d1, d2)`` with the abelianisation isomorphic to ``C_d1 x C_d2``."""
    p, q, r = pres.exponents
    d1 = math.gcd(p, q, r)
    d2 = math.gcd(p * q, p * r, q * r) // d1
    return d1, d2


def maps_onto_cyclic(pres: TrianglePresentation, n: int) -> bool:
    return abelianization_invariants(pres)[1] % n == 0


def _chain_ok(fwd: List[int], back: List[int], i: int, exponent: int) -> bool:
    length = 1
    cur = fwd[i]
    while cur != -1 and cur != i:
        length += 1
        cur = fwd[cur]
    if cur == i:
        return exponent % length == 0
    cur = back[i]
    while cur != -1:
        length += 1
        cur = back[cur]
    return length <= exponent


def _backtrack_pairs(pres: TrianglePresentation, n: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """(x, y) as 0-based image tuples, lexicographic, relations by divisibility."""
    p, q, r = pres.exponents
    x = [-1] * n
    x_back = [-1] * n
    y = [-1] * n
    y_back = [-1] * n
    z = [-1] * n
    z_back = [-1] * n

    def assign_y(i: int) -> Iterator[Tuple[int, ...]]:
        if i == n:
            yield tuple(y)
            return
        j = x_back[i]
        for v in range(n):
            if y_back[v] != -1:
                continue
            y[i], y_back[v] = v, i
            z[j], z_back[v] = v, j
            if _chain_ok(y, y_back, i, q) and _chain_ok(z, z_back, j, r):
                yield from assign_y(i + 1)
            y[i] = y_back[v] = -1
            z[j] = z_back[v] = -1

    def assign_x(i: int) -> Iterator[Tuple[int, ...]]:
        if i == n:
            yield tuple(x)
            return
        for v in range(n):
            if x_back[v] != -1:
                continue
            x[i], x_back[v] = v, i
            if _chain_ok(x, x_back, i, p):
                yield from assign_x(i + 1)
            x[i] = x_back[v] = -1

    for xs in assign_x(0):
        for ys in assign_y(0):
            yield xs, ys


def search_backtrack(pres: TrianglePresentation, degree: int, *, require_transitive: bool = False,
                     require_handle_k: Optional[int] = None, max_solutions: Optional[int] = None,
                     strict_orders: bool = False, degree_cap: int = 9) -> List[Representation]:
    """Every representation of the given degree, ordered by ``(x, y)`` images."""
    if degree > degree_cap:
        raise DegreeTooLarge(f"degree {degree} exceeds the exhaustive search cap {degree_cap}")
    if degree < 1:
        raise DomainMismatch("degree must be positive")
    found: List[Representation] = []
    visited = 0
    for xs, ys in _backtrack_pairs(pres, degree):
        visited += 1
        rep = Representation(pres, Permutation._from_array(xs), Permutation._from_array(ys))
        if strict_orders and not check_relations(rep, strict=True).ok:
            continue
        if require_transitive and not is_transitive(rep.image_group()):
            continue
        if require_handle_k is not None and not find_handles(rep, require_handle_k):
            continue
        found.append(rep)
        if max_solutions is not None and len(found) >= max_solutions:
            break
    logger.info(f"Backtrack search {pres} degree {degree}: {len(found)} solutions from {visited} candidates")
    return found


def even_cycle_types(exponent: int, max_moved: int) -> List[Tuple[int, ...]]:
    """Non-trivial even cycle types with parts dividing ``exponent``, moving at most ``max_moved`` points."""
    parts = [d for d in range(max_moved, 1, -1) if exponent % d == 0]
    types: List[Tuple[int, ...]] = []

    def extend(prefix: List[int], smallest_index: int, moved: int) -> None:
        if prefix and sum(d - 1 for d in prefix) % 2 == 0:
            types.append(tuple(prefix))
        for i in range(smallest_index, len(parts)):
            if moved + parts[i] <= max_moved:
                prefix.append(parts[i])
                extend(prefix, i, moved + parts[i])
                prefix.pop()

    extend([], 0, 0)
    return types


def random_with_cycle_type(rng: np.random.Generator, degree: int, cycle_type: Sequence[int]) -> Permutation:
    points = [int(v) + 1 for v in rng.permutation(degree)]
    cycles = []
    start = 0
    for length in cycle_type:
        cycles.append(points[start:start + length])
        start += length
    return perm_from_cycles(cycles, degree)


@dataclass(frozen=True)
class AlternatingHit:
    representation: Representation
    handles: Tuple[Handle, ...]
    attempts: int
    seed: int


def search_alternating(pres: TrianglePresentation, degree: int, needed_handles: int = 1, k: int = 1,
                       seed: int = 0, max_attempts: int = 20000,
                       strict_orders: bool = False) -> AlternatingHit:
    """Random search for a representation onto the alternating group with handles.

    Draws ``x`` and ``y`` with a uniformly chosen admissible even cycle type
    and a uniform placement from ``numpy.random.default_rng(seed)``. With
    two handles only non-interleaving pairs count.
    """
    if degree < 5:
        raise DomainMismatch(f"alternating search needs degree >= 5, got {degree}")
    if needed_handles not in (1, 2):
        raise InvalidHandle(f"needed_handles must be 1 or 2, got {needed_handles}")
    x_types = even_cycle_types(pres.p, degree - 2 * needed_handles)
    y_types = even_cycle_types(pres.q, degree)
    if not x_types or not y_types:
        raise NotFound(f"{pres} has no admissible even cycle types at degree {degree} "
                       f"with {2 * needed_handles} x-fixed points")

    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        x = random_with_cycle_type(rng, degree, x_types[int(rng.integers(len(x_types)))])
        y = random_with_cycle_type(rng, degree, y_types[int(rng.integers(len(y_types)))])
        rep = Representation(pres, x, y)
        if not check_relations(rep, strict=strict_orders).ok:
            continue
        handles = find_handles(rep, k)
        chosen = select_disjoint_handles(rep, handles, needed_handles)
        if chosen is None:
            continue
        group = rep.image_group()
        if not is_transitive(group) or not is_alternating(group):
            continue
        logger.info(f"Alternating search {pres} degree {degree}: hit after {attempt} attempts")
        return AlternatingHit(rep, chosen, attempt, seed)
    raise NotFound(f"no witness within {max_attempts} attempts for {pres} at degree {degree}")


@dataclass(frozen=True)
class AlphaBetaHit:
    alpha: Permutation
    beta: Permutation
    attempts: int
    seed: int


def _random_p_cycle_product(rng: np.random.Generator, p: int, m: int) -> Permutation:
    count = int(rng.integers(1, m // p + 1))
    return random_with_cycle_type(rng, m, [p] * count)


def search_alpha_beta(p: int, m: int, seed: int = 0, max_attempts: int = 20000) -> AlphaBetaHit:
    """Random products of disjoint p-cycles generating the alternating group on ``1..m``."""
    if m < p:
        raise DomainMismatch(f"need m >= p, got m={m}, p={p}")
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        alpha = _random_p_cycle_product(rng, p, m)
        beta = _random_p_cycle_product(rng, p, m)
        if not (is_even(alpha) and is_even(beta)):
            continue
        if is_alternating(GeneratedGroup(m, [alpha, beta])):
            logger.info(f"alpha/beta search p={p} m={m}: hit after {attempt} attempts")
            return AlphaBetaHit(alpha, beta, attempt, seed)
    raise NotFound(f"no generating pair of {p}-cycle products on {m} points within {max_attempts} attempts")
