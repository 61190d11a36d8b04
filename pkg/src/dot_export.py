"""Coset diagrams as Graphviz DOT text."""

from typing import Iterator, Optional

from .group import BlockSystem
from .perm import Permutation, cycle_decomposition, fixed_points
from .triangle import Representation

X_STYLE = 'color="black", style=solid'
Y_STYLE = 'color="blue", style=dashed'


def _quote(s: str) -> str:
    return '"{}"'.format(s.replace('"', r'\"'))


def _edges(g: Permutation, label: str, style: str, offset: int) -> Iterator[str]:
    for cycle in cycle_decomposition(g):
        if len(cycle) == 2:
            a, b = cycle
            yield f'  {a + offset} -> {b + offset} [label="{label}", dir=both, {style}];\n'
            continue
        for i, a in enumerate(cycle):
            b = cycle[(i + 1) % len(cycle)]
            yield f'  {a + offset} -> {b + offset} [label="{label}", {style}];\n'


def coset_diagram(rep: Representation, name: str = "coset_diagram",
                  blocks: Optional[BlockSystem] = None) -> Iterator[str]:
    """
    Produce the coset diagram of a representation as DOT lines.

    Fixed points are noted in the vertex ``xlabel`` instead of drawn as
    loops; 2-cycles become one two-headed edge. When ``blocks`` is given
    each cell is drawn as a cluster.
    """
    fixed_x = fixed_points(rep.x)
    fixed_y = fixed_points(rep.y)
    yield f"digraph {_quote(name)} {{\n"
    yield f'  label={_quote(str(rep.presentation))};\n'
    yield "  node [shape=circle];\n"
    for i in range(1, rep.degree + 1):
        marks = [s for s, fixed in (("x", fixed_x), ("y", fixed_y)) if i in fixed]
        attrs = f'label="{rep.label(i)}"'
        if marks:
            attrs += f', xlabel={_quote("fixed " + ",".join(marks))}'
        yield f"  {rep.label(i)} [{attrs}];\n"
    if blocks is not None:
        for index, cell in enumerate(blocks.blocks):
            members = " ".join(str(rep.label(p)) for p in cell)
            yield f'  subgraph cluster_{index} {{ style=dotted; {members}; }}\n'
    yield from _edges(rep.x, "x", X_STYLE, rep.offset)
    yield from _edges(rep.y, "y", Y_STYLE, rep.offset)
    yield "}\n"


def to_dot(rep: Representation, name: str = "coset_diagram", blocks: Optional[BlockSystem] = None) -> str:
    return "".join(coset_diagram(rep, name, blocks))
