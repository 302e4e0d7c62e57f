import json

import numpy as np
import pytest

from bargmann.documents import (
    dumps,
    gram_to_dict,
    load_document,
    parse_document,
    serialize_document,
    tuple_document,
)
from bargmann.errors import DocumentError, InputError
from bargmann.gram import reconstruct_gram
from bargmann.states import StateTuple, random_mixed_state, random_pure_state

PAULI_DOC = {
    "version": 1,
    "dim": 2,
    "labels": ["x", "y", "z"],
    "states": [
        {"type": "pure", "amplitudes": [[0.7071067811865476, 0], [0.7071067811865476, 0]]},
        {"type": "pure", "amplitudes": [[0.7071067811865476, 0], [0, 0.7071067811865476]]},
        {"type": "pure", "amplitudes": [[1, 0], [0, 0]]},
    ],
}


def test_parse_pauli(triple):
    doc = parse_document(json.dumps(PAULI_DOC))
    assert doc.labels == ["x", "y", "z"] and doc.dim == 2
    for a, b in zip(doc.states, triple):
        assert np.allclose(a.amplitudes, b.amplitudes)


def test_round_trip(rng):
    states = StateTuple([random_pure_state(3, rng), random_mixed_state(3, rng)])
    text = serialize_document(tuple_document(states, ["a", "b"]))
    again = parse_document(text)
    assert serialize_document(again) == text
    assert np.array_equal(again.states[1].rho, states[1].rho)
    assert text.endswith("\n")


def test_extra_fields_preserved():
    data = dict(PAULI_DOC, note="kept")
    assert json.loads(serialize_document(parse_document(data)))["note"] == "kept"


def test_load_from_disk(tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps(PAULI_DOC))
    assert load_document(path).states.n == 3
    with pytest.raises(DocumentError) as err:
        load_document(tmp_path / "missing.json")
    assert "missing.json" in err.value.path


def _with(**changes):
    data = json.loads(json.dumps(PAULI_DOC))
    for path, value in changes.items():
        target = data
        *head, last = path.split("__")
        for key in head:
            target = target[int(key)] if key.isdigit() else target[key]
        if value is KeyError:
            del target[int(last) if last.isdigit() else last]
        else:
            target[int(last) if last.isdigit() else last] = value
    return data


@pytest.mark.parametrize(
    "data, where",
    [
        (_with(version=2), "version"),
        (_with(dim=KeyError), "dim"),
        (_with(dim=0), "dim"),
        (_with(states=[]), "states"),
        (_with(states__0__type="bra"), "states[0].type"),
        (_with(states__1__amplitudes__1="oops"), "states[1].amplitudes[1]"),
        (_with(states__1__amplitudes=[[1, 0]]), "states[1].amplitudes"),
        (_with(states__2__amplitudes=KeyError), "states[2].amplitudes"),
        (_with(labels=["x"]), "labels"),
        ([1, 2], "$"),
    ],
)
def test_structural_errors(data, where):
    with pytest.raises(DocumentError) as err:
        parse_document(data)
    assert err.value.path == where
    assert str(err.value).startswith(f"{where}: ")


def test_json_syntax_error():
    with pytest.raises(DocumentError) as err:
        parse_document('{"version": 1,\n "dim": }')
    assert err.value.path.startswith("line 2 column")


def test_physics_errors_carry_path():
    data = _with(states__0__amplitudes=[[1, 0], [1, 0]])
    with pytest.raises(InputError, match=r"states\[0\]"):
        parse_document(data)
    mixed = _with(states__0={"type": "mixed", "rho": [[[0.6, 0], [0, 0]], [[0, 0], [0.6, 0]]]})
    with pytest.raises(InputError, match=r"states\[0\].*trace"):
        parse_document(mixed)


def test_dumps_is_deterministic():
    assert dumps({"b": 1, "a": [0.1, 2]}) == '{\n  "a": [\n    0.1,\n    2\n  ],\n  "b": 1\n}\n'
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})


def test_gram_to_dict(triple):
    out = gram_to_dict(reconstruct_gram(triple))
    assert out["provenance"]["2,3"] == [3, 1, 2]
    assert out["frame_edges"] == [[1, 2], [1, 3], [2, 3]]
    assert out["trees"] == [{"root": 1, "edges": [[1, 2], [1, 3]]}]
    assert out["entries"][1][2] == pytest.approx([0.5, 0.5])
    json.dumps(out)
