"""Finite permutations under the right action.

Points are 1-based at every interface. ``compose(g, h)`` applies ``g`` first
and then ``h``, so ``i`` is sent to ``h(g(i))``, and conjugation reads
``x^y = y^-1 x y``. Internally images are stored 0-based.

A permutation prints as a product of cycles, e.g. ``(1,2,3)(4,5)``; the
identity prints as ``()``.
"""

import math
import re
from typing import Iterable, List, Sequence, Set, Tuple

from .errors import ValidationError

Cycle = Tuple[int, ...]

EVEN = "even"
ODD = "odd"


class PermutationError(ValidationError):
    """Base class for permutation errors."""


class RepeatedPoint(PermutationError):
    """A point occurs twice where a bijection is required."""


class PointOutOfRange(PermutationError):
    """A point lies outside {1..degree}."""


class DegreeMismatch(PermutationError):
    """Two permutations act on sets of different size."""


class Permutation:
    """Immutable bijection of {1..degree}."""

    __slots__ = ("_a", "_hash")

    def __init__(self, images: Sequence[int]):
        degree = len(images)
        if degree < 1:
            raise PermutationError("a permutation needs degree >= 1")
        seen = [False] * degree
        arr = []
        for value in images:
            v = int(value)
            if not 1 <= v <= degree:
                raise PointOutOfRange(f"image {v} outside 1..{degree}")
            if seen[v - 1]:
                raise RepeatedPoint(f"image {v} occurs twice")
            seen[v - 1] = True
            arr.append(v - 1)
        self._a = tuple(arr)
        self._hash = None

    @classmethod
    def _from_array(cls, arr: Sequence[int]) -> "Permutation":
        """Wrap a trusted 0-based image tuple without validation."""
        perm = cls.__new__(cls)
        perm._a = tuple(arr)
        perm._hash = None
        return perm

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        if degree < 1:
            raise PermutationError("a permutation needs degree >= 1")
        return cls._from_array(range(degree))

    @property
    def degree(self) -> int:
        return len(self._a)

    @property
    def images(self) -> Tuple[int, ...]:
        """1-based images: ``images[i-1]`` is the image of point ``i``."""
        return tuple(v + 1 for v in self._a)

    @property
    def array_form(self) -> Tuple[int, ...]:
        """0-based images, shared with the group algorithms."""
        return self._a

    def __call__(self, point: int) -> int:
        return apply(self, point)

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __pow__(self, n: int) -> "Permutation":
        return power(self, n)

    def __invert__(self) -> "Permutation":
        return inverse(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._a == other._a

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._a)
        return self._hash

    def __lt__(self, other: "Permutation") -> bool:
        return (self.degree, self._a) < (other.degree, other._a)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)}, degree={self.degree})"

    def __str__(self) -> str:
        return format_cycles(self)

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self._a))


def _check_point(point: int, degree: int) -> None:
    if not 1 <= point <= degree:
        raise PointOutOfRange(f"point {point} outside 1..{degree}")


def perm_from_cycles(cycles: Iterable[Sequence[int]], degree: int) -> Permutation:
    """Product of pairwise disjoint cycles as a permutation of {1..degree}."""
    if degree < 1:
        raise PermutationError("a permutation needs degree >= 1")
    arr = list(range(degree))
    used: Set[int] = set()
    for cycle in cycles:
        pts = [int(p) for p in cycle]
        for p in pts:
            _check_point(p, degree)
            if p in used:
                raise RepeatedPoint(f"point {p} occurs twice in the cycle list")
            used.add(p)
        for i, p in enumerate(pts):
            arr[p - 1] = pts[(i + 1) % len(pts)] - 1
    return Permutation._from_array(arr)


def compose(g: Permutation, h: Permutation) -> Permutation:
    """Apply ``g`` first, then ``h``."""
    if g.degree != h.degree:
        raise DegreeMismatch(f"cannot compose degree {g.degree} with degree {h.degree}")
    b = h._a
    return Permutation._from_array([b[i] for i in g._a])


def compose_all(perms: Iterable[Permutation], degree: int) -> Permutation:
    result = Permutation.identity(degree)
    for g in perms:
        result = compose(result, g)
    return result


def inverse(g: Permutation) -> Permutation:
    inv = [0] * g.degree
    for i, v in enumerate(g._a):
        inv[v] = i
    return Permutation._from_array(inv)


def power(g: Permutation, n: int) -> Permutation:
    """``g`` to the ``n``-th power; negative ``n`` goes through the inverse."""
    arr = list(range(g.degree))
    for cycle in cycle_decomposition(g):
        length = len(cycle)
        shift = n % length
        for i, p in enumerate(cycle):
            arr[p - 1] = cycle[(i + shift) % length] - 1
    return Permutation._from_array(arr)


def apply(g: Permutation, point: int) -> int:
    _check_point(point, g.degree)
    return g._a[point - 1] + 1


def conjugate(g: Permutation, h: Permutation) -> Permutation:
    """``g^h = h^-1 g h``."""
    return compose(compose(inverse(h), g), h)


def commutes(g: Permutation, h: Permutation) -> bool:
    return compose(g, h) == compose(h, g)


def cycle_decomposition(g: Permutation) -> List[Cycle]:
    """Disjoint non-trivial cycles, each minimum-first, sorted by minimum."""
    arr = g._a
    seen = [False] * len(arr)
    cycles = []
    for start in range(len(arr)):
        if seen[start] or arr[start] == start:
            continue
        cycle = []
        i = start
        while not seen[i]:
            seen[i] = True
            cycle.append(i + 1)
            i = arr[i]
        cycles.append(tuple(cycle))
    return cycles


def cycle_type(g: Permutation) -> Tuple[int, ...]:
    """Non-trivial cycle lengths in non-increasing order."""
    return tuple(sorted((len(c) for c in cycle_decomposition(g)), reverse=True))


def order(g: Permutation) -> int:
    return math.lcm(1, *(len(c) for c in cycle_decomposition(g)))


def sign(g: Permutation) -> int:
    transpositions = sum(len(c) - 1 for c in cycle_decomposition(g))
    return -1 if transpositions % 2 else 1


def parity(g: Permutation) -> str:
    return EVEN if sign(g) == 1 else ODD


def is_even(g: Permutation) -> bool:
    return sign(g) == 1


def fixed_points(g: Permutation) -> Set[int]:
    return {i + 1 for i, v in enumerate(g._a) if i == v}


def cycle_containing(g: Permutation, point: int) -> Cycle:
    """The cycle of ``g`` through ``point``, starting at ``point``."""
    _check_point(point, g.degree)
    cycle = [point]
    nxt = g._a[point - 1] + 1
    while nxt != point:
        cycle.append(nxt)
        nxt = g._a[nxt - 1] + 1
    return tuple(cycle)


def format_cycles(g: Permutation) -> str:
    cycles = cycle_decomposition(g)
    if not cycles:
        return "()"
    return "".join("(" + ",".join(str(p) for p in c) + ")" for c in cycles)


def cycles_to_lists(g: Permutation) -> List[List[int]]:
    """Cycle list in the JSON file form, e.g. ``[[1, 2, 3], [4, 5]]``."""
    return [list(c) for c in cycle_decomposition(g)]


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse ``"(1,2,3)(4,5)"``; ``"()"`` and ``""`` give the identity."""
    if _CYCLE_RE.sub("", text).strip():
        raise PermutationError(f"could not parse permutation {text!r}")
    cycles = []
    for match in _CYCLE_RE.finditer(text):
        body = match.group(1).strip()
        if not body:
            continue
        try:
            cycles.append([int(tok) for tok in re.split(r"[,\s]+", body)])
        except ValueError:
            raise PermutationError(f"could not parse permutation {text!r}") from None
    return perm_from_cycles(cycles, degree)
