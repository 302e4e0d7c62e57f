"""Text formats for circuits.

Line format, one gate per line with 1-based wire labels::

    #! wires <n_control> <n_ancilla> <n_registers>
    #! output-control <wire>
    #! output-registers <w1> <w2> ...
    #! chain <w1> <w2> ...
    #! declared-depth <k>
    #! name <text>
    SWAP 1 2
    FREDKIN 1 2 3

Lines starting with ``#!`` are pragmas, other ``#`` text is a comment.
All pragmas are optional; without ``wires`` the circuit is read as
registers only, sized by the largest wire label.

QASM dialect: OpenQASM 2 syntax with one register ``q`` and 0-based
indices, gates ``h``, ``s`` (P), ``sdg`` (P dagger), ``swap``, ``cswap``
(Fredkin, control first) and ``cx``.  The pragmas above are carried in
``// @`` comments (``// @wires 1 0 3``).  Register wires are listed in
``q`` like qubits even though they may carry qudits.
"""

from __future__ import annotations

import re

from .circuits import Circuit, Gate, GateKind
from .errors import DocumentError, InputError

_QASM_NAMES = {
    GateKind.H: "h",
    GateKind.P: "s",
    GateKind.PDAG: "sdg",
    GateKind.SWAP: "swap",
    GateKind.FREDKIN: "cswap",
    GateKind.CNOT: "cx",
}
_QASM_KINDS = {v: k for k, v in _QASM_NAMES.items()}


def _pragmas(circuit: Circuit) -> list[str]:
    out = [f"wires {circuit.n_control} {circuit.n_ancilla} {circuit.n_registers}"]
    if circuit.n_control and circuit.output_control != circuit.control_wire:
        out.append(f"output-control {circuit.output_control}")
    if tuple(circuit.output_registers) != tuple(circuit.register_wires):
        out.append("output-registers " + " ".join(map(str, circuit.output_registers)))
    if circuit.chain:
        out.append("chain " + " ".join(map(str, circuit.chain)))
    if circuit.declared_depth is not None:
        out.append(f"declared-depth {circuit.declared_depth}")
    if circuit.name:
        out.append(f"name {circuit.name}")
    return out


class _Header:
    def __init__(self):
        self.wires = None
        self.meta = {}

    def read(self, text: str, where: str):
        key, _, rest = text.strip().partition(" ")
        rest = rest.strip()
        if key == "name":
            self.meta["name"] = rest
            return
        try:
            nums = [int(tok) for tok in rest.split()]
        except ValueError:
            raise DocumentError(f"pragma {key!r} needs integer arguments", where) from None
        if key == "wires":
            if len(nums) != 3:
                raise DocumentError("pragma 'wires' takes three counts", where)
            self.wires = tuple(nums)
        elif key == "output-control":
            self.meta["output_control"] = nums[0] if nums else None
        elif key == "output-registers":
            self.meta["output_registers"] = tuple(nums)
        elif key == "chain":
            self.meta["chain"] = tuple(nums)
        elif key == "declared-depth":
            self.meta["declared_depth"] = nums[0] if nums else None
        else:
            raise DocumentError(f"unknown pragma {key!r}", where)

    def build(self, gates: list[Gate]) -> Circuit:
        if self.wires is None:
            top = max((w for g in gates for w in g.wires), default=0)
            self.wires = (0, 0, top)
        try:
            return Circuit(*self.wires, gates=gates, **self.meta)
        except InputError as exc:
            raise DocumentError(str(exc), "header") from None


def to_lines(circuit: Circuit) -> str:
    body = ["#! " + p for p in _pragmas(circuit)]
    body += [str(g) for g in circuit.gates]
    return "\n".join(body) + "\n"


def from_lines(text: str) -> Circuit:
    header, gates = _Header(), []
    for no, raw in enumerate(text.splitlines(), start=1):
        where = f"line {no}"
        line = raw.strip()
        if line.startswith("#!"):
            header.read(line[2:], where)
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        kind, *ops = line.split()
        try:
            gates.append(Gate(GateKind(kind.upper()), tuple(int(o) for o in ops)))
        except ValueError as exc:
            msg = str(exc) if isinstance(exc, InputError) else f"cannot parse gate {line!r}"
            raise DocumentError(msg, where) from None
    return header.build(gates)


def to_qasm(circuit: Circuit) -> str:
    out = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    out += ["// @" + p for p in _pragmas(circuit)]
    out.append(f"qreg q[{circuit.n_wires}];")
    for g in circuit.gates:
        args = ",".join(f"q[{w - 1}]" for w in g.wires)
        out.append(f"{_QASM_NAMES[g.kind]} {args};")
    return "\n".join(out) + "\n"


_QASM_GATE = re.compile(r"^([a-z]+)\s+(.+);$")
_QASM_ARG = re.compile(r"^q\[(\d+)\]$")


def from_qasm(text: str) -> Circuit:
    header, gates = _Header(), []
    n_qreg = None
    for no, raw in enumerate(text.splitlines(), start=1):
        where = f"line {no}"
        line = raw.strip()
        if line.startswith("// @"):
            header.read(line[4:], where)
            continue
        line = line.split("//", 1)[0].strip()
        if not line or line.startswith(("OPENQASM", "include")):
            continue
        m = re.match(r"^qreg\s+q\[(\d+)\];$", line)
        if m:
            n_qreg = int(m.group(1))
            continue
        m = _QASM_GATE.match(line)
        if not m or m.group(1) not in _QASM_KINDS:
            raise DocumentError(f"unsupported statement {line!r}", where)
        wires = []
        for arg in m.group(2).split(","):
            am = _QASM_ARG.match(arg.strip())
            if not am:
                raise DocumentError(f"bad qubit argument {arg.strip()!r}", where)
            wires.append(int(am.group(1)) + 1)
        try:
            gates.append(Gate(_QASM_KINDS[m.group(1)], tuple(wires)))
        except InputError as exc:
            raise DocumentError(str(exc), where) from None
    circuit = header.build(gates)
    if n_qreg is not None and n_qreg != circuit.n_wires:
        raise DocumentError(f"qreg has {n_qreg} qubits but the header declares {circuit.n_wires} wires", "qreg")
    return circuit


def parse_circuit(text: str) -> Circuit:
    """Read either format, detected from the OPENQASM preamble."""
    if text.lstrip().startswith("OPENQASM"):
        return from_qasm(text)
    return from_lines(text)
