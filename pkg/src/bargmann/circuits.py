"""Synthesis and verification of (controlled) cyclic-permutation circuits.

Wires are numbered from 1: the control qubit (if any) comes first, then the
ancilla qubits, then the m registers.  Register ``k`` starts on wire
``n_control + n_ancilla + k``.

Permutations are written as destination maps: ``perm[k-1]`` is the register
that receives the content of register ``k``.  The cycle ``(1 2 ... m)``
therefore moves labels ``(a, b, c, d, e) -> (e, a, b, c, d)``.  Products
of transpositions are applied right to left, so ``(1 2 ... k) =
(1,2)(2,3)...(k-1,k)`` is emitted starting with ``SWAP k-1 k``.

Depth is the length of the greedy as-soon-as-possible layering in which
two gates conflict iff they share a wire.

Depth guarantees of the constructions:

* :func:`nn_cycle` -- exactly ``m - 1``.
* :func:`log_depth_cycle` -- at most ``ceil(log2 m)``, which is below
  ``LOG_DEPTH_CONSTANT * log2 m`` for every ``m >= 4``.
* :func:`controlled_nn_cycle` -- ``2m - 3`` (Fredkins and moves alternate).
* :func:`ghz_circuit` -- ``1 + ceil(log2 k)``.
* :func:`parallel_controlled_cycle` -- ``2 ceil(log2 w) + ceil(log2 m)`` for
  a widest layer of ``w <= ceil(m/2)`` SWAPs, hence at most
  ``PARALLEL_DEPTH_CONSTANT * ceil(log2 m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .errors import InputError

LOG_DEPTH_CONSTANT = 1.5
PARALLEL_DEPTH_CONSTANT = 3


class GateKind(str, Enum):
    SWAP = "SWAP"
    FREDKIN = "FREDKIN"
    CNOT = "CNOT"
    H = "H"
    P = "P"
    PDAG = "PDAG"

    @property
    def arity(self) -> int:
        return _ARITY[self]


_ARITY = {
    GateKind.SWAP: 2,
    GateKind.FREDKIN: 3,
    GateKind.CNOT: 2,
    GateKind.H: 1,
    GateKind.P: 1,
    GateKind.PDAG: 1,
}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    wires: tuple[int, ...]

    def __post_init__(self):
        kind = GateKind(self.kind)
        wires = tuple(int(w) for w in self.wires)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "wires", wires)
        if len(wires) != kind.arity:
            raise InputError(f"{kind.value} takes {kind.arity} wires, got {len(wires)}")
        if len(set(wires)) != len(wires):
            raise InputError(f"{kind.value} wires must be distinct, got {wires}")

    def __str__(self):
        return " ".join([self.kind.value, *map(str, self.wires)])


@dataclass
class Circuit:
    """Gate list over control, ancilla and register wires.

    ``output_control`` and ``output_registers`` say on which wire the
    control qubit and each logical register end up; they differ from the
    input wires when uncontrolled SWAPs move the control along a chain.
    ``chain`` is the linear layout for nearest-neighbour circuits.
    """

    n_control: int
    n_ancilla: int
    n_registers: int
    gates: list[Gate] = field(default_factory=list)
    declared_depth: int | None = None
    output_control: int | None = None
    output_registers: tuple[int, ...] | None = None
    chain: tuple[int, ...] | None = None
    name: str = ""

    def __post_init__(self):
        if self.n_control not in (0, 1):
            raise InputError("n_control must be 0 or 1")
        if self.n_ancilla < 0 or self.n_registers < 0:
            raise InputError("wire counts must be nonnegative")
        if self.output_control is None and self.n_control:
            self.output_control = 1
        if self.output_registers is None:
            self.output_registers = tuple(self.register_wires)
        self.output_registers = tuple(self.output_registers)
        for g in self.gates:
            self._check_gate(g)

    def _check_gate(self, gate: Gate):
        bad = [w for w in gate.wires if not 1 <= w <= self.n_wires]
        if bad:
            raise InputError(f"gate {gate} uses wires {bad} outside 1..{self.n_wires}")

    @property
    def n_wires(self) -> int:
        return self.n_control + self.n_ancilla + self.n_registers

    @property
    def control_wire(self) -> int | None:
        return 1 if self.n_control else None

    @property
    def ancilla_wires(self) -> list[int]:
        start = self.n_control + 1
        return list(range(start, start + self.n_ancilla))

    @property
    def qubit_wires(self) -> list[int]:
        return list(range(1, self.n_control + self.n_ancilla + 1))

    @property
    def register_wires(self) -> list[int]:
        start = self.n_control + self.n_ancilla + 1
        return list(range(start, start + self.n_registers))

    def register_wire(self, k: int) -> int:
        return self.n_control + self.n_ancilla + k

    def append(self, kind: GateKind | str, *wires: int):
        gate = Gate(GateKind(kind), wires)
        self._check_gate(gate)
        self.gates.append(gate)

    def layers(self) -> list[list[Gate]]:
        """Greedy ASAP layering; gates sharing a wire never share a layer."""
        last = {}
        layers: list[list[Gate]] = []
        for g in self.gates:
            level = max((last.get(w, 0) for w in g.wires), default=0) + 1
            for w in g.wires:
                last[w] = level
            if level > len(layers):
                layers.append([])
            layers[level - 1].append(g)
        return layers

    def depth(self) -> int:
        return len(self.layers())

    def count(self, kind: GateKind | str) -> int:
        kind = GateKind(kind)
        return sum(g.kind is kind for g in self.gates)

    def is_nearest_neighbour(self) -> bool:
        """True when every gate touches consecutive sites of ``chain``.

        Moving SWAPs are taken into account: sites are fixed, wires are
        fixed, so adjacency is a static property of the wire labels.
        """
        if self.chain is None:
            return False
        pos = {w: i for i, w in enumerate(self.chain)}
        for g in self.gates:
            sites = sorted(pos[w] for w in g.wires)
            if sites[-1] - sites[0] != len(sites) - 1:
                return False
        return True


def cycle_permutation(m: int) -> tuple[int, ...]:
    """Destination map of the cycle (1 2 ... m)."""
    return tuple(k % m + 1 for k in range(1, m + 1))


def compose(*perms: Sequence[int]) -> tuple[int, ...]:
    """Product of destination maps, applied right to left."""
    n = len(perms[0])
    result = list(range(1, n + 1))
    for p in reversed(perms):
        result = [p[r - 1] for r in result]
    return tuple(result)


def cycle_on(elements: Sequence[int], n: int) -> tuple[int, ...]:
    """Destination map on 1..n of the cycle through ``elements`` in order."""
    perm = list(range(1, n + 1))
    k = len(elements)
    for a, b in zip(elements, list(elements[1:]) + list(elements[:1])):
        if k > 1:
            perm[a - 1] = b
    return tuple(perm)


def _require_m(m: int, minimum: int = 2):
    if int(m) != m or m < minimum:
        raise InputError(f"m must be an integer >= {minimum}, got {m!r}")


def nn_cycle(m: int) -> Circuit:
    """Cycle (1 2 ... m) from m-1 adjacent SWAPs, depth m-1."""
    _require_m(m)
    circ = Circuit(0, 0, m, declared_depth=m - 1, chain=tuple(range(1, m + 1)), name=f"nn_cycle({m})")
    for k in range(m - 1, 0, -1):
        circ.append(GateKind.SWAP, k, k + 1)
    return circ


def _split_cycle(wires: list[int]) -> list[tuple[int, int]]:
    # (w1 .. wn) = (w1, w_{k+1}) (w1 .. wk) (w_{k+1} .. wn), with k = ceil(n/2)
    n = len(wires)
    if n < 2:
        return []
    if n == 2:
        return [(wires[0], wires[1])]
    k = (n + 1) // 2
    return _split_cycle(wires[k:]) + _split_cycle(wires[:k]) + [(wires[0], wires[k])]


def log_depth_cycle(m: int) -> Circuit:
    """Cycle (1 2 ... m) by recursive halving, depth at most ceil(log2 m).

    Odd lengths split as ceil(m/2) + floor(m/2).
    """
    _require_m(m)
    circ = Circuit(0, 0, m, declared_depth=math.ceil(math.log2(m)), name=f"log_depth_cycle({m})")
    for a, b in _split_cycle(list(range(1, m + 1))):
        circ.append(GateKind.SWAP, a, b)
    return circ


def controlled_nn_cycle(m: int) -> Circuit:
    """Controlled cycle on a line using nearest-neighbour SWAP and Fredkin gates.

    The chain is ``control, reg_m, reg_{m-1}, ..., reg_1``.  The control
    applies a Fredkin to the two sites ahead of it and is then moved one
    site along by an uncontrolled SWAP, so it ends displaced; its final
    wire is ``output_control``.  Register contents shift along with it and
    their final wires are recorded in ``output_registers``.
    """
    _require_m(m)
    chain = (1,) + tuple(range(m + 1, 1, -1))
    circ = Circuit(1, 0, m, chain=chain, declared_depth=2 * m - 3, name=f"controlled_nn_cycle({m})")
    for j in range(1, m):
        circ.append(GateKind.FREDKIN, chain[j - 1], chain[j], chain[j + 1])
        if j < m - 1:
            circ.append(GateKind.SWAP, chain[j - 1], chain[j])
    control_out, registers_out = _track_outputs(circ)
    circ.output_control = control_out
    circ.output_registers = registers_out
    return circ


def _fanout_pairs(k: int) -> list[list[tuple[int, int]]]:
    # CNOT layers copying qubit 1 onto qubits 2..k by doubling the flipped set
    layers = []
    flipped = [1]
    while len(flipped) < k:
        n_new = min(len(flipped), k - len(flipped))
        targets = list(range(len(flipped) + 1, len(flipped) + n_new + 1))
        layers.append(list(zip(flipped[:n_new], targets)))
        flipped.extend(targets)
    return layers


def ghz_circuit(k: int) -> Circuit:
    """One Hadamard and k-1 CNOTs preparing the k-qubit GHZ state."""
    if int(k) != k or k < 1:
        raise InputError(f"k must be a positive integer, got {k!r}")
    fan = _fanout_pairs(k)
    circ = Circuit(1, k - 1, 0, declared_depth=1 + len(fan), name=f"ghz_circuit({k})")
    circ.append(GateKind.H, 1)
    for layer in fan:
        for c, t in layer:
            circ.append(GateKind.CNOT, c, t)
    return circ


def parallel_controlled_cycle(m: int) -> Circuit:
    """Log-depth controlled cycle using a GHZ fan-out of the control.

    The control is copied onto ``w - 1`` ancillas, where ``w`` is the widest
    layer of :func:`log_depth_cycle`; each SWAP in a layer becomes a Fredkin
    controlled by its own GHZ qubit; the fan-out is then undone, returning
    the ancillas to ``|0>``.
    """
    _require_m(m, minimum=4)
    base = log_depth_cycle(m)
    layers = base.layers()
    width = max(len(layer) for layer in layers)
    fan = _fanout_pairs(width)
    circ = Circuit(
        1,
        width - 1,
        m,
        declared_depth=2 * len(fan) + len(layers),
        name=f"parallel_controlled_cycle({m})",
    )
    for layer in fan:
        for c, t in layer:
            circ.append(GateKind.CNOT, c, t)
    for layer in layers:
        for ghz_qubit, gate in zip(range(1, width + 1), layer):
            a, b = (circ.register_wire(w) for w in gate.wires)
            circ.append(GateKind.FREDKIN, ghz_qubit, a, b)
    for layer in reversed(fan):
        for c, t in layer:
            circ.append(GateKind.CNOT, c, t)
    return circ


def add_control(circuit: Circuit) -> Circuit:
    """Promote an uncontrolled SWAP circuit to a controlled one.

    Every SWAP becomes a Fredkin on a new control wire 1, so the gates run
    sequentially; this is the naive construction.
    """
    if circuit.n_control:
        raise InputError("circuit already has a control qubit")
    if any(g.kind is not GateKind.SWAP for g in circuit.gates):
        raise InputError("only SWAP circuits can be promoted")
    shift = 1
    out = Circuit(
        1,
        circuit.n_ancilla,
        circuit.n_registers,
        output_registers=tuple(w + shift for w in circuit.output_registers),
        name=f"controlled {circuit.name}".strip(),
    )
    for g in circuit.gates:
        out.append(GateKind.FREDKIN, 1, *(w + shift for w in g.wires))
    out.declared_depth = out.depth()
    return out


def cycle_test_circuit(controlled: Circuit, imaginary: bool = False) -> Circuit:
    """Wrap a controlled cycle as ``H - controlled cycle - [P] - H`` on the control."""
    if controlled.n_control != 1:
        raise InputError("cycle test needs a controlled circuit")
    c_out = controlled.output_control
    circ = Circuit(
        1,
        controlled.n_ancilla,
        controlled.n_registers,
        gates=[Gate(GateKind.H, (1,)), *controlled.gates],
        output_control=c_out,
        output_registers=controlled.output_registers,
        chain=controlled.chain,
        name=f"cycle_test[{'imag' if imaginary else 'real'}] {controlled.name}".strip(),
    )
    if imaginary:
        circ.append(GateKind.P, c_out)
    circ.append(GateKind.H, c_out)
    return circ


def _run_labels(circuit: Circuit, control_value: int):
    """Classical label tracking: qubit wires carry bits, registers carry labels."""
    content: dict[int, object] = {}
    for w in circuit.qubit_wires:
        content[w] = 0
    if circuit.n_control:
        content[1] = control_value
    for k, w in enumerate(circuit.register_wires, start=1):
        content[w] = f"r{k}"
    for g in circuit.gates:
        if g.kind is GateKind.SWAP:
            a, b = g.wires
            content[a], content[b] = content[b], content[a]
        elif g.kind is GateKind.FREDKIN:
            c, a, b = g.wires
            if not isinstance(content[c], int):
                raise InputError(f"{g}: control wire carries register content {content[c]!r}")
            if content[c]:
                content[a], content[b] = content[b], content[a]
        elif g.kind is GateKind.CNOT:
            c, t = g.wires
            if not (isinstance(content[c], int) and isinstance(content[t], int)):
                raise InputError(f"{g}: CNOT on register content")
            content[t] ^= content[c]
        else:
            raise InputError(f"{g}: gate is not a basis permutation; cannot track labels")
    return content


def _track_outputs(circuit: Circuit) -> tuple[int | None, tuple[int, ...]]:
    # only uncontrolled SWAPs move contents in the control=0 branch
    origin = {w: w for w in range(1, circuit.n_wires + 1)}
    for g in circuit.gates:
        if g.kind is GateKind.SWAP:
            a, b = g.wires
            origin[a], origin[b] = origin[b], origin[a]
    where = {o: w for w, o in origin.items()}
    control = where[1] if circuit.n_control else None
    return control, tuple(where[w] for w in circuit.register_wires)


@dataclass
class VerificationReport:
    passed: bool
    gate_count: int
    depth: int
    declared_depth: int | None
    failure: str | None = None
    control_value: int | None = None
    offending_label: str | None = None

    def __bool__(self):
        return self.passed


def verify_permutation(circuit: Circuit, expected: Sequence[int]) -> VerificationReport:
    """Check by label tracking that the circuit realizes ``expected``.

    For controlled circuits control value 0 must give the identity and 1
    must give ``expected``; the control must come out unchanged on
    ``output_control`` and every other qubit must come out as 0.
    """
    expected = tuple(expected)
    m = circuit.n_registers
    report = VerificationReport(True, len(circuit.gates), circuit.depth(), circuit.declared_depth)
    if sorted(expected) != list(range(1, m + 1)):
        raise InputError(f"expected {expected} is not a permutation of 1..{m}")
    values = (0, 1) if circuit.n_control else (None,)
    for b in values:
        content = _run_labels(circuit, b or 0)
        target = expected if b in (1, None) else tuple(range(1, m + 1))
        for k in range(1, m + 1):
            wire = circuit.output_registers[target[k - 1] - 1]
            if content.get(wire) != f"r{k}":
                report.passed = False
                report.control_value = b
                report.offending_label = f"r{k}"
                report.failure = (
                    f"label r{k} expected on register {target[k - 1]} (wire {wire}), "
                    f"found {content.get(wire)!r}"
                )
                return report
        for w, v in content.items():
            if isinstance(v, str) or w in circuit.output_registers:
                continue
            want = b if w == circuit.output_control else 0
            if v != want:
                report.passed = False
                report.control_value = b
                report.failure = f"qubit wire {w} ends in {v}, expected {want}"
                return report
    return report
