"""JSON documents for state tuples and reports.

A tuple document::

    {
      "version": 1,
      "dim": 2,
      "states": [
        {"type": "pure", "amplitudes": [[0.7071, 0.0], [0.7071, 0.0]]},
        {"type": "mixed", "rho": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}
      ],
      "labels": ["plus", "maximally mixed"]
    }

Complex numbers are ``[re, im]`` pairs.  Structural problems raise
:class:`DocumentError` naming the field path (``states[1].rho[0][1]``);
physically invalid states (not normalized, not PSD) raise
:class:`InputError` from the state constructors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DocumentError, InputError
from .states import MixedState, PureState, StateTuple

VERSION = 1


@dataclass
class TupleDocument:
    states: StateTuple
    labels: list[str] | None = None
    version: int = VERSION
    extra: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.states.dim


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return complex_pair(a)
    return [complex_array(x) for x in a]


def _complex(value, path):
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise DocumentError(f"expected a [re, im] pair of numbers, got {json.dumps(value)}", path)
    return complex(value[0], value[1])


def _vector(value, path):
    if not isinstance(value, list) or not value:
        raise DocumentError("expected a nonempty list of [re, im] pairs", path)
    return np.array([_complex(v, f"{path}[{k}]") for k, v in enumerate(value)])


def _matrix(value, path):
    if not isinstance(value, list) or not value:
        raise DocumentError("expected a nonempty list of rows", path)
    rows = [_vector(r, f"{path}[{k}]") for k, r in enumerate(value)]
    if any(len(r) != len(rows) for r in rows):
        raise DocumentError("matrix must be square", path)
    return np.array(rows)


def _state(entry, path, dim):
    if not isinstance(entry, dict):
        raise DocumentError("state must be an object", path)
    kind = entry.get("type")
    if kind == "pure":
        if "amplitudes" not in entry:
            raise DocumentError("missing field", f"{path}.amplitudes")
        vec = _vector(entry["amplitudes"], f"{path}.amplitudes")
        if len(vec) != dim:
            raise DocumentError(f"has {len(vec)} amplitudes, dim is {dim}", f"{path}.amplitudes")
        make = lambda: PureState(vec)
    elif kind == "mixed":
        if "rho" not in entry:
            raise DocumentError("missing field", f"{path}.rho")
        rho = _matrix(entry["rho"], f"{path}.rho")
        if len(rho) != dim:
            raise DocumentError(f"is {len(rho)}x{len(rho)}, dim is {dim}", f"{path}.rho")
        make = lambda: MixedState(rho)
    else:
        raise DocumentError(f"type must be 'pure' or 'mixed', got {kind!r}", f"{path}.type")
    try:
        return make()
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def parse_document(data) -> TupleDocument:
    """Parse a tuple document from JSON text or an already-decoded object."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise DocumentError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(data, dict):
        raise DocumentError("top level must be an object", "$")
    for key in ("version", "dim", "states"):
        if key not in data:
            raise DocumentError("missing required field", key)
    if data["version"] != VERSION:
        raise DocumentError(f"unsupported version {data['version']!r}", "version")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DocumentError("dim must be a positive integer", "dim")
    states = data["states"]
    if not isinstance(states, list) or not states:
        raise DocumentError("expected a nonempty list", "states")
    parsed = [_state(s, f"states[{k}]", dim) for k, s in enumerate(states)]
    labels = data.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != len(parsed) or not all(isinstance(x, str) for x in labels):
            raise DocumentError("labels must be one string per state", "labels")
    extra = {k: v for k, v in data.items() if k not in ("version", "dim", "states", "labels")}
    return TupleDocument(StateTuple(parsed), labels, VERSION, extra)


def document_to_dict(doc: TupleDocument) -> dict:
    states = []
    for s in doc.states:
        if s.is_pure:
            states.append({"type": "pure", "amplitudes": complex_array(s.amplitudes)})
        else:
            states.append({"type": "mixed", "rho": complex_array(s.rho)})
    out = {"version": doc.version, "dim": doc.dim, "states": states}
    if doc.labels is not None:
        out["labels"] = list(doc.labels)
    out.update(doc.extra)
    return out


def tuple_document(states: StateTuple, labels=None) -> TupleDocument:
    return TupleDocument(states, None if labels is None else list(labels))


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, shortest round-trip floats."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def serialize_document(doc: TupleDocument) -> str:
    return dumps(document_to_dict(doc))


def load_document(path) -> TupleDocument:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(exc.strerror or str(exc), str(path)) from None
    return parse_document(text)


def gram_to_dict(gram) -> dict:
    """GramMatrix as JSON: entries as [re, im] pairs plus provenance and invariant list."""
    return {
        "n": gram.n,
        "entries": complex_array(gram.entries),
        "provenance": {f"{i},{j}": list(seq) for (i, j), seq in sorted(gram.provenance.items())},
        "invariants_used": [
            {"indices": list(inv.indices), "value": complex_pair(inv.value)} for inv in gram.invariants_used
        ],
        "counts": {k: ({str(d): c for d, c in v.items()} if isinstance(v, dict) else v) for k, v in gram.counts().items()},
        "blocks": gram.blocks,
        "frame_edges": [list(e) for e in sorted(gram.graph.edges)],
        "trees": [{"root": t.root, "edges": [list(e) for e in sorted(t.edges)]} for t in gram.trees],
    }
