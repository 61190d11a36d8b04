import json

import pytest

from src.compose import (CLONE, HandleAssignment, compose_alpha_beta, compose_centralizer, compose_clone_p,
                         compose_general)
from src.errors import MalformedFile, ValidationError
from src.models import RepFile
from src.perm import parse_cycles
from src.rep_io import (RelationsViolated, ReplayMismatch, composition_to_repfile, load_composition,
                        read_repfile, replay_composition, repfile_to_representation,
                        representation_to_repfile, write_repfile)
from src.triangle import Handle, translate

from .builders import a7_base, identity_first, klein_base, small_wreath_base, two_cycle_pair


def test_representation_file_round_trip(tmp_path):
    d = a7_base()
    path = tmp_path / "a7.json"
    write_repfile(path, representation_to_repfile(d, [Handle(4, 5), Handle(6, 7)]))
    data = json.loads(path.read_text())
    assert data["x"] == [[1, 2, 3]]
    assert data["handles"] == [[4, 5, 1], [6, 7, 1]]
    assert "provenance" not in data
    loaded, handles = repfile_to_representation(read_repfile(path))
    assert loaded == d
    assert handles == [Handle(4, 5), Handle(6, 7)]


def test_translated_diagram_is_stored_at_origin():
    rf = representation_to_repfile(translate(small_wreath_base(), 6))
    assert rf.degree == 6
    assert rf.y == [[1, 2, 3, 4, 5]]


def _compositions():
    base = klein_base()
    return [
        compose_clone_p(a7_base(), Handle(4, 5)),
        compose_general([base, base], HandleAssignment([(1, Handle(1, 2)), (2, Handle(1, 2))])),
        compose_centralizer(two_cycle_pair(), Handle(1, 2), identity_first(4, "(1,3)(2,4)")),
        compose_alpha_beta(small_wreath_base(), Handle(1, 2), Handle(3, 4),
                           parse_cycles("(1,2)", 3), parse_cycles("(2,3)", 3), 3),
    ]


@pytest.mark.parametrize("index", range(4))
def test_composed_files_replay(tmp_path, index):
    comp = _compositions()[index]
    path = tmp_path / "composed.json"
    write_repfile(path, composition_to_repfile(comp, seed=3))
    rf = read_repfile(path)
    assert rf.provenance["construction"] == comp.provenance.construction
    assert rf.provenance["seed"] == 3
    again = load_composition(rf)
    assert again.result.x == comp.result.x
    assert again.result.y == comp.result.y
    assert again.blocks == comp.blocks


def test_tampered_file_fails_replay():
    comp = compose_clone_p(klein_base(), Handle(1, 2))
    rf = composition_to_repfile(comp)
    assert rf.provenance["construction"] == CLONE
    rf.x = [[1, 4], [2, 3]]
    with pytest.raises(ReplayMismatch):
        load_composition(rf)


def test_tampered_blocks_fail_replay():
    rf = composition_to_repfile(compose_clone_p(klein_base(), Handle(1, 2)))
    rf.provenance["blocks"] = [[1, 2], [3, 4]]
    with pytest.raises(ReplayMismatch):
        load_composition(rf)


def test_replay_needs_known_and_complete_provenance():
    with pytest.raises(MalformedFile):
        replay_composition({"construction": "bogus"})
    with pytest.raises(MalformedFile):
        replay_composition({"construction": CLONE})
    rf = representation_to_repfile(klein_base())
    with pytest.raises(MalformedFile):
        load_composition(rf)


def test_relations_are_checked_on_load():
    rf = RepFile(p=2, q=2, r=2, degree=3, x=[[1, 2]], y=[[1, 2, 3]])
    with pytest.raises(RelationsViolated):
        repfile_to_representation(rf)


def test_stored_handles_are_checked_on_load():
    rf = representation_to_repfile(a7_base())
    rf.handles = [[1, 2, 1]]
    with pytest.raises(ValidationError):
        repfile_to_representation(rf)
    rf.handles = [[4]]
    with pytest.raises(MalformedFile):
        repfile_to_representation(rf)


@pytest.mark.parametrize("text", [
    "{not json",
    "[1, 2, 3]",
    '{"p": 2, "q": 2, "r": 2, "degree": 2, "x": []}',
])
def test_malformed_files(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(MalformedFile):
        read_repfile(path)


def test_missing_file_is_malformed(tmp_path):
    with pytest.raises(MalformedFile):
        read_repfile(tmp_path / "absent.json")


def test_bad_cycle_lists_are_malformed():
    rf = RepFile(p=2, q=2, r=2, degree=2, x=[[1, 3]], y=[])
    with pytest.raises(MalformedFile):
        repfile_to_representation(rf)
    rf = RepFile(p=2, q=2, r=2, degree=2, x="(1,2)", y=[])
    with pytest.raises(MalformedFile):
        repfile_to_representation(rf)


def test_compositions_of_translated_inputs_replay():
    klein = klein_base()
    general = compose_general([klein, translate(klein, 2)],
                              HandleAssignment([(1, Handle(1, 2)), (2, Handle(3, 4))]))
    clone = compose_clone_p(translate(small_wreath_base(), 6), Handle(7, 8))
    for comp in (general, clone):
        rf = composition_to_repfile(comp)
        again = load_composition(rf)
        assert again.result.x == comp.result.x
        assert again.result.y == comp.result.y
        assert again.blocks == comp.blocks
    assert composition_to_repfile(clone).provenance["base"]["offset"] == 6
    assert composition_to_repfile(general).provenance["inputs"][1]["offset"] == 2


def test_negative_nested_offset_is_malformed():
    rf = composition_to_repfile(compose_clone_p(translate(klein_base(), 3), Handle(4, 5)))
    rf.provenance["base"]["offset"] = -1
    with pytest.raises(MalformedFile):
        load_composition(rf)
