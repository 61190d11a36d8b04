"""Reading and writing representation files.

A file holds ``p, q, r, degree, x, y`` and optionally ``handles`` and
``provenance``. Composed files record how they were built; loading one
replays the construction and requires the replay to reproduce ``x`` and
``y``.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .compose import (CENTRALIZER, CLONE, CONSTRUCTIONS, GENERAL, Composition,
                      HandleAssignment, compose_alpha_beta, compose_centralizer, compose_clone_p,
                      compose_general)
from .errors import MalformedFile, ValidationError
from .models import RepFile
from .perm import Permutation, PermutationError, cycles_to_lists, perm_from_cycles
from .triangle import Handle, Representation, TrianglePresentation, check_relations, is_handle, translate

logger = logging.getLogger(__name__)


class RelationsViolated(ValidationError):
    """A loaded representation breaks a defining relation."""


class ReplayMismatch(ValidationError):
    """Replaying a stored construction gives different permutations."""


def _perm(cycles: Any, degree: int, what: str) -> Permutation:
    if not isinstance(cycles, list) or not all(isinstance(c, list) for c in cycles):
        raise MalformedFile(f"{what} must be a list of cycles")
    try:
        return perm_from_cycles(cycles, degree)
    except (PermutationError, TypeError, ValueError) as e:
        raise MalformedFile(f"bad cycle list for {what}: {e}") from None


def _handle(entry: Any) -> Handle:
    if not isinstance(entry, list) or len(entry) not in (2, 3):
        raise MalformedFile(f"handle entry {entry!r} must be [a, b] or [a, b, k]")
    try:
        return Handle(*(int(v) for v in entry))
    except (TypeError, ValueError) as e:
        raise MalformedFile(f"bad handle {entry!r}: {e}") from None


def _handle_list(h: Handle) -> List[int]:
    return [h.a, h.b, h.k]


def representation_to_repfile(rep: Representation, handles: Optional[Sequence[Handle]] = None,
                              provenance: Optional[Dict[str, Any]] = None) -> RepFile:
    base = rep.at_origin()
    pres = base.presentation
    return RepFile(
        p=pres.p, q=pres.q, r=pres.r, degree=base.degree,
        x=cycles_to_lists(base.x), y=cycles_to_lists(base.y),
        handles=[_handle_list(h) for h in handles] if handles else None,
        provenance=provenance,
    )


def repfile_to_representation(rf: RepFile, strict: bool = False) -> Tuple[Representation, List[Handle]]:
    """Domain objects for a file, with relations and handles re-validated."""
    try:
        pres = TrianglePresentation(int(rf.p), int(rf.q), int(rf.r))
        degree = int(rf.degree)
    except (TypeError, ValueError) as e:
        raise MalformedFile(f"bad header: {e}") from None
    if degree < 1:
        raise MalformedFile(f"degree must be positive, got {degree}")
    rep = Representation(pres, _perm(rf.x, degree, "x"), _perm(rf.y, degree, "y"))
    report = check_relations(rep, strict=strict)
    if not report.ok:
        raise RelationsViolated(f"{pres} relations fail ({', '.join(report.failed)}); "
                                f"orders {report.exact_orders}")
    handles = [_handle(h) for h in rf.handles or []]
    for h in handles:
        if not is_handle(rep, h):
            raise ValidationError(f"{h} is not a {h.k}-handle of the stored representation")
    return rep, handles


def _rep_dict(rep: Representation) -> Dict[str, Any]:
    """Nested form at the origin; the labels' offset is kept beside it."""
    data = representation_to_repfile(rep).to_dict(encode_json=True)
    if rep.offset:
        data["offset"] = rep.offset
    return data


def _rep_from_dict(data: Any) -> Representation:
    if not isinstance(data, dict):
        raise MalformedFile("nested representation must be an object")
    try:
        offset = int(data.get("offset", 0))
        rf = RepFile.from_dict({k: v for k, v in data.items() if k != "offset"})
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedFile(f"bad nested representation: {e}") from None
    if offset < 0:
        raise MalformedFile(f"negative offset {offset} in nested representation")
    return translate(repfile_to_representation(rf)[0], offset)


def provenance_dict(comp: Composition, seed: Optional[int] = None) -> Dict[str, Any]:
    prov = comp.provenance
    data: Dict[str, Any] = {"construction": prov.construction, "copies": prov.copies}
    if comp.blocks is not None:
        data["blocks"] = [list(c) for c in comp.blocks.blocks]
    if prov.base is not None:
        data["base"] = _rep_dict(prov.base)
    if prov.inputs:
        data["inputs"] = [_rep_dict(r) for r in prov.inputs]
    if prov.handles:
        data["handles"] = [_handle_list(h) for h in prov.handles]
    if prov.assignment is not None and prov.construction == GENERAL:
        data["assignment"] = [[j, h.a, h.b, h.k] for j, h in prov.assignment.entries]
    if prov.hs:
        data["hs"] = [cycles_to_lists(h) for h in prov.hs]
    if prov.alpha is not None:
        data["alpha"] = cycles_to_lists(prov.alpha)
        data["beta"] = cycles_to_lists(prov.beta)
    if seed is not None:
        data["seed"] = seed
    return data


def composition_to_repfile(comp: Composition, seed: Optional[int] = None) -> RepFile:
    return representation_to_repfile(comp.result, provenance=provenance_dict(comp, seed))


def replay_composition(prov: Dict[str, Any]) -> Composition:
    """Rebuild a composition from its provenance record."""
    construction = prov.get("construction")
    if construction not in CONSTRUCTIONS:
        raise MalformedFile(f"unknown construction {construction!r}")
    try:
        if construction == GENERAL:
            inputs = [_rep_from_dict(d) for d in prov["inputs"]]
            entries = [(int(e[0]), Handle(int(e[1]), int(e[2]), int(e[3]))) for e in prov["assignment"]]
            return compose_general(inputs, HandleAssignment(entries))
        base = _rep_from_dict(prov["base"])
        handles = [_handle(h) for h in prov["handles"]]
        if construction == CLONE:
            return compose_clone_p(base, handles[0])
        if construction == CENTRALIZER:
            hs = [_perm(h, base.degree, "hs") for h in prov["hs"]]
            return compose_centralizer(base, handles[0], hs)
        m = int(prov["copies"])
        alpha = _perm(prov["alpha"], m, "alpha")
        beta = _perm(prov["beta"], m, "beta")
        return compose_alpha_beta(base, handles[0], handles[1], alpha, beta, m)
    except (KeyError, IndexError, TypeError) as e:
        raise MalformedFile(f"incomplete {construction} provenance: {e}") from None


def load_composition(rf: RepFile) -> Composition:
    """Replay a composed file and check it reproduces the stored permutations."""
    rep, _ = repfile_to_representation(rf)
    if not rf.provenance:
        raise MalformedFile("file carries no provenance")
    comp = replay_composition(rf.provenance)
    if comp.result.x != rep.x or comp.result.y != rep.y:
        raise ReplayMismatch("replayed construction does not reproduce the stored x and y")
    stored_blocks = rf.provenance.get("blocks")
    if stored_blocks is not None and comp.blocks is not None:
        if [list(c) for c in comp.blocks.blocks] != stored_blocks:
            raise ReplayMismatch("replayed block system differs from the stored one")
    return comp


def read_repfile(path: Union[str, Path]) -> RepFile:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise MalformedFile(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise MalformedFile(f"{path} is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise MalformedFile(f"{path} must hold a JSON object")
    missing = [k for k in ("p", "q", "r", "degree", "x", "y") if k not in data]
    if missing:
        raise MalformedFile(f"{path} lacks fields {missing}")
    try:
        rf = RepFile.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedFile(f"{path}: {e}") from None
    logger.debug(f"Read representation file {path}")
    return rf


def repfile_text(rf: RepFile) -> str:
    return rf.to_json(indent=2) + "\n"


def write_repfile(path: Union[str, Path], rf: RepFile) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(repfile_text(rf))
    logger.info(f"Wrote representation file {path}")
