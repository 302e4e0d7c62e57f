import io
import json
import subprocess
import sys

import numpy as np
import pytest

from bargmann.circuits import cycle_permutation, verify_permutation
from bargmann.cli import main, run
from bargmann.documents import serialize_document, tuple_document
from bargmann.formats import parse_circuit
from bargmann.states import StateTuple, random_unitary
from builders import prescribed_frame_tuple


def call(*argv):
    out = io.StringIO()
    try:
        code = run(list(argv), stdout=out)
    except SystemExit as exc:
        code = exc.code
    return code, out.getvalue()


def _write(path, states, labels=None):
    path.write_text(serialize_document(tuple_document(states, labels)))
    return str(path)


@pytest.fixture
def pauli_file(tmp_path, triple):
    return _write(tmp_path / "pauli.json", triple, ["x", "y", "z"])


def _gate_lines(text):
    return [line for line in text.splitlines() if line and not line.startswith("#")]


def test_invariants(pauli_file):
    code, out = call("invariants", "--input", pauli_file, "--sequence", "1,2,3", "--sequence", "1,2")
    assert code == 0
    rows = json.loads(out)["invariants"]
    assert rows[0]["value"] == pytest.approx([0.25, 0.25])
    assert rows[1]["value"] == pytest.approx([0.5, 0.0])


def test_fingerprint_and_budget(pauli_file):
    code, out = call("invariants", "--input", pauli_file, "--degree-cap", "2")
    assert code == 0 and len(json.loads(out)["fingerprint"]["entries"]) == 3 + 6
    code, _ = call("invariants", "--input", pauli_file, "--degree-cap", "20")
    assert code == 4


def test_simulate_exact_and_gate_level(pauli_file):
    code, out = call("simulate", "--input", pauli_file, "--indices", "1,2,3", "--branch", "imag", "--gate-level", "controlled-nn")
    data = json.loads(out)
    assert code == 0
    assert data["p0_exact"] == pytest.approx(0.625)
    assert data["p0_gate_level"] == pytest.approx(0.625)


def test_simulate_is_byte_identical(pauli_file):
    argv = ("simulate", "--input", pauli_file, "--indices", "1,2,3", "--shots", "1000", "--seed", "17")
    first, second = call(*argv), call(*argv)
    assert first[0] == 0 and first[1] == second[1]
    assert json.loads(first[1])["seed"] == 17


def test_simulate_generates_seed(pauli_file):
    code, out = call("simulate", "--input", pauli_file, "--indices", "1,2", "--shots", "100")
    assert code == 0 and isinstance(json.loads(out)["seed"], int)


def test_synth_line_counts():
    code, out = call("synth", "--m", "2")
    assert code == 0 and _gate_lines(out) == ["SWAP 1 2"]
    code, out = call("synth", "--m", "16", "--family", "nn")
    assert len(_gate_lines(out)) == 15


@pytest.mark.parametrize("fmt", ["lines", "qasm"])
def test_synth_parses_back(fmt):
    code, out = call("synth", "--m", "8", "--family", "parallel", "--format", fmt, "--verify")
    assert code == 0
    assert verify_permutation(parse_circuit(out), cycle_permutation(8))


def test_gram_all_pairs(tmp_path, rng):
    path = _write(tmp_path / "nine.json", prescribed_frame_tuple(rng))
    counts = json.loads(call("gram", "--input", path, "--all-pairs")[1])["counts"]
    assert (counts["overlaps"], counts["closing"], counts["closing_nonzero"]) == (36, 28, 10)
    counts = json.loads(call("gram", "--input", path)[1])["counts"]
    assert (counts["overlaps"], counts["closing"]) == (36, 10)


def test_equiv(tmp_path, triple, rng):
    a = _write(tmp_path / "a.json", triple)
    b = _write(tmp_path / "b.json", triple.transformed(random_unitary(2, rng)))
    c = _write(tmp_path / "c.json", triple.conjugate())
    data = json.loads(call("equiv", "--input", a, "--other", b, "--align")[1])
    assert data["equivalent"] and data["mode"] == "pure" and data["bound_applicable"]
    assert not json.loads(call("equiv", "--input", a, "--other", c)[1])["equivalent"]
    data = json.loads(call("equiv", "--input", a, "--other", b, "--mode", "mixed")[1])
    assert data["equivalent"] and data["complete"]


def test_witnesses(pauli_file, tmp_path):
    out = json.loads(call("witness", "coherence", "--values", "0.25", "0.25", "0.25", "-0.125")[1])
    assert out["triggered"] and out["details"] == ["posd1"]
    assert json.loads(call("witness", "coherence", "--values", "1", "1", "1", "1")[1])["triggered"] is False
    out = json.loads(call("witness", "imaginarity", "--input", pauli_file)[1])
    assert out["triggered"] and out["margin"] == pytest.approx(0.25)
    out = json.loads(call("witness", "imaginarity", "--input", pauli_file, "--shots", "100000", "--seed", "3")[1])
    assert out["triggered"] and out["threshold"] > 0
    out = json.loads(call("witness", "li", "--input", pauli_file)[1])
    assert not out["triggered"] and out["rank"] == 2
    basis = _write(tmp_path / "basis.json", StateTuple.pure(list(np.eye(3))))
    assert json.loads(call("witness", "li", "--input", basis)[1])["triggered"]


def test_exit_codes(tmp_path, pauli_file):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text('{"version": 1, "dim": 2, "states": [{"type": "pure", "amplitudes": [[1, 0], "x"]}]}')
    assert call("invariants", "--input", str(bad_json))[0] == 2
    unnormalized = tmp_path / "un.json"
    unnormalized.write_text('{"version": 1, "dim": 2, "states": [{"type": "pure", "amplitudes": [[1, 0], [1, 0]]}]}')
    assert call("invariants", "--input", str(unnormalized))[0] == 3
    assert call("invariants", "--input", str(tmp_path / "nope.json"))[0] == 2
    assert call("simulate", "--input", pauli_file, "--indices", "1,9")[0] == 3
    assert call("simulate", "--input", pauli_file)[0] == 2
    assert call("synth", "--m", "3", "--family", "parallel")[0] == 3
    assert call("witness", "imaginarity", "--input", pauli_file, "--sequence", "1,2")[0] == 3
    assert call("witness", "coherence", "--values", "1", "2")[0] == 2
    assert call("bogus")[0] == 2


def test_parse_error_names_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 1, "dim": 2, "states": [{"type": "pure", "amplitudes": [[1, 0], "x"]}]}')
    assert main(["invariants", "--input", str(bad)]) == 2
    assert "states[0].amplitudes[1]" in capsys.readouterr().err


def test_module_entry_point(pauli_file):
    proc = subprocess.run(
        [sys.executable, "-m", "bargmann", "invariants", "--input", pauli_file, "--sequence", "1,2,3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["invariants"][0]["value"] == pytest.approx([0.25, 0.25])
