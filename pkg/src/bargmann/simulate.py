"""Simulation of SWAP/cycle tests.

Two independent routes give the outcome-0 probability of the control
qubit: the formula ``p0 = (1 + Re D)/2`` (or ``(1 + Im D)/2`` with the
phase gate ``P = diag(1, i)``) using the trace-product invariant ``D``,
and a gate-level state-vector simulation of an actual circuit.

State-vector layout: one tensor axis per physical system, control first,
then ancillas, then registers 1..m.  Qubits have dimension 2, registers
the dimension of the input states.  An uncontrolled SWAP only relabels
which wire a system sits on, so it is valid between systems of different
dimensions (this is how the control travels along a chain).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .circuits import Circuit, GateKind, add_control, cycle_test_circuit
from .errors import CircuitMismatchError, InputError
from .invariants import InvariantTable, canonical_rotation
from .states import StateTuple, bargmann


class Branch(str, Enum):
    REAL = "real"
    IMAG = "imag"


@dataclass(frozen=True, eq=False)
class CycleTestSpec:
    states: StateTuple
    indices: tuple[int, ...]
    branch: Branch = Branch.REAL
    shots: int = 0
    seed: int | None = None

    def __post_init__(self):
        idx = self.states.check_indices(self.indices)
        if len(idx) < 2:
            raise InputError("a cycle test needs at least two registers")
        if int(self.shots) != self.shots or self.shots < 0:
            raise InputError("shots must be a nonnegative integer")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "branch", Branch(self.branch))

    @property
    def m(self) -> int:
        return len(self.indices)


@dataclass
class CycleTestResult:
    p0_exact: float
    implied_invariant_part: float
    branch: Branch
    indices: tuple[int, ...]
    p0_estimate: float | None = None
    counts: tuple[int, int] | None = None
    stderr: float | None = None
    shots: int = 0
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "branch": self.branch.value,
            "indices": list(self.indices),
            "shots": self.shots,
            "seed": self.seed,
            "p0_exact": self.p0_exact,
            "p0_estimate": self.p0_estimate,
            "counts": list(self.counts) if self.counts is not None else None,
            "stderr": self.stderr,
            "implied_invariant_part": self.implied_invariant_part,
        }


def _p0_from_invariant(value: complex, branch: Branch) -> float:
    part = value.real if branch is Branch.REAL else value.imag
    return (1.0 + part) / 2.0


def exact_probability(spec: CycleTestSpec) -> CycleTestResult:
    """Outcome-0 probability from the trace-product invariant."""
    value = bargmann(spec.states, spec.indices).value
    p0 = _p0_from_invariant(value, spec.branch)
    return CycleTestResult(
        p0_exact=p0,
        implied_invariant_part=2 * p0 - 1,
        branch=spec.branch,
        indices=spec.indices,
        seed=spec.seed,
    )


def sample(spec: CycleTestSpec) -> CycleTestResult:
    """Binomial shot sampling of the control outcome.

    Counts are a deterministic function of ``(seed, shots, p0)``; each call
    builds its own generator.
    """
    if spec.shots < 1:
        raise InputError("sampling needs shots >= 1; use exact_probability for shots = 0")
    result = exact_probability(spec)
    rng = np.random.default_rng(spec.seed)
    p = min(max(result.p0_exact, 0.0), 1.0)
    n0 = int(rng.binomial(spec.shots, p))
    p_hat = n0 / spec.shots
    result.counts = (n0, spec.shots - n0)
    result.p0_estimate = p_hat
    result.stderr = float(np.sqrt(p_hat * (1 - p_hat) / spec.shots))
    result.implied_invariant_part = 2 * p_hat - 1
    result.shots = spec.shots
    return result


@dataclass
class StateVector:
    """Joint state of all systems plus the wire -> system assignment."""

    tensor: np.ndarray
    system_of_wire: dict[int, int]
    dims: tuple[int, ...] = field(default=())

    def probability(self, wire: int, outcome: int) -> float:
        ax = self.system_of_wire[wire]
        return float(np.sum(np.abs(np.take(self.tensor, outcome, axis=ax)) ** 2))

    def zero_probability(self, wires: Sequence[int]) -> float:
        """Probability that every listed qubit wire reads 0."""
        idx = [slice(None)] * self.tensor.ndim
        for w in wires:
            idx[self.system_of_wire[w]] = 0
        return float(np.sum(np.abs(self.tensor[tuple(idx)]) ** 2))


_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_SINGLE = {
    GateKind.H: _H,
    GateKind.P: np.diag([1, 1j]),
    GateKind.PDAG: np.diag([1, -1j]),
}


def _controlled_slice(ndim, ax):
    idx = [slice(None)] * ndim
    idx[ax] = 1
    return tuple(idx)


def apply_circuit(circuit: Circuit, register_vectors: Sequence[np.ndarray], qubit_init: Sequence[int] | None = None) -> StateVector:
    """Run a circuit on product inputs; qubits start in ``|0>`` unless given."""
    if len(register_vectors) != circuit.n_registers:
        raise CircuitMismatchError(
            f"circuit has {circuit.n_registers} registers, got {len(register_vectors)} states"
        )
    n_qubits = circuit.n_control + circuit.n_ancilla
    qubit_init = [0] * n_qubits if qubit_init is None else list(qubit_init)
    factors = [np.eye(2, dtype=complex)[b] for b in qubit_init] + [np.asarray(v, dtype=complex) for v in register_vectors]
    dims = tuple(len(f) for f in factors)
    psi = factors[0]
    for f in factors[1:]:
        psi = np.multiply.outer(psi, f)
    psi = np.asarray(psi).reshape(dims)
    system = {w: w - 1 for w in range(1, circuit.n_wires + 1)}

    for g in circuit.gates:
        axes = [system[w] for w in g.wires]
        if g.kind is GateKind.SWAP:
            a, b = g.wires
            system[a], system[b] = system[b], system[a]
            continue
        if g.kind in _SINGLE:
            (ax,) = axes
            if dims[ax] != 2:
                raise CircuitMismatchError(f"{g} applied to a dimension-{dims[ax]} system")
            psi = np.moveaxis(np.tensordot(_SINGLE[g.kind], psi, axes=([1], [ax])), 0, ax)
            continue
        c = axes[0]
        if dims[c] != 2:
            raise CircuitMismatchError(f"{g}: control is a dimension-{dims[c]} system")
        sel = _controlled_slice(psi.ndim, c)
        rest = [a if a < c else a - 1 for a in axes[1:]]
        psi = psi.copy()
        if g.kind is GateKind.CNOT:
            if dims[axes[1]] != 2:
                raise CircuitMismatchError(f"{g}: target is not a qubit")
            psi[sel] = np.flip(psi[sel], axis=rest[0])
        else:  # FREDKIN
            if dims[axes[1]] != dims[axes[2]]:
                raise CircuitMismatchError(f"{g}: swapped systems differ in dimension")
            psi[sel] = np.swapaxes(psi[sel], rest[0], rest[1])
    return StateVector(psi, system, dims)


def _ensemble(state, rho_tol=1e-14):
    if state.is_pure:
        return [(1.0, state.amplitudes)]
    vals, vecs = np.linalg.eigh(state.rho)
    return [(float(w), vecs[:, k]) for k, w in enumerate(vals) if w > rho_tol]


def gate_level_simulate(spec: CycleTestSpec, circuit: Circuit, ensembles=None) -> CycleTestResult:
    """Outcome-0 probability from a state-vector run of the cycle test.

    ``circuit`` is a controlled cycle (an uncontrolled SWAP circuit is
    promoted with :func:`add_control`).  Mixed registers are handled as an
    ensemble average: by default over each density matrix's eigenvectors,
    or over ``ensembles[k] = [(weight, vector), ...]`` for register k.
    """
    if circuit.n_control == 0:
        circuit = add_control(circuit)
    if circuit.n_registers != spec.m:
        raise CircuitMismatchError(f"circuit acts on {circuit.n_registers} registers, spec needs {spec.m}")
    full = cycle_test_circuit(circuit, imaginary=spec.branch is Branch.IMAG)
    members = [spec.states[i - 1] for i in spec.indices]
    if ensembles is None:
        ensembles = [_ensemble(s) for s in members]
    elif len(ensembles) != spec.m:
        raise CircuitMismatchError("one ensemble per register is required")
    for ens in ensembles:
        for _, vec in ens:
            if len(vec) != spec.states.dim:
                raise CircuitMismatchError("ensemble vector dimension does not match the tuple")

    p0 = 0.0
    for combo in itertools.product(*ensembles):
        weight = float(np.prod([w for w, _ in combo]))
        final = apply_circuit(full, [v for _, v in combo])
        p0 += weight * final.probability(full.output_control, 0)
    return CycleTestResult(
        p0_exact=p0,
        implied_invariant_part=2 * p0 - 1,
        branch=spec.branch,
        indices=spec.indices,
        seed=spec.seed,
    )


def measure_invariants(
    states: StateTuple,
    sequences: Sequence[Sequence[int]],
    shots: int,
    seed: int | None = None,
) -> InvariantTable:
    """Estimate invariants by sampling both branches of each cycle test.

    Degree-2 invariants are real, so only the real branch is run for them.
    Standard errors are attached, which makes downstream edge decisions
    statistical.
    """
    seeds = np.random.SeedSequence(seed)
    values, errs = {}, {}
    for seq in sequences:
        key = canonical_rotation(states.check_indices(seq))
        if key in values:
            continue
        if len(key) == 1:
            values[key], errs[key] = 1.0, 0.0
            continue
        re_child, im_child = seeds.spawn(2)
        re = sample(CycleTestSpec(states, key, Branch.REAL, shots, int(re_child.generate_state(1)[0])))
        value, var = re.implied_invariant_part, (2 * re.stderr) ** 2
        if len(key) > 2:
            im = sample(CycleTestSpec(states, key, Branch.IMAG, shots, int(im_child.generate_state(1)[0])))
            value = complex(value, im.implied_invariant_part)
            var += (2 * im.stderr) ** 2
        values[key], errs[key] = value, float(np.sqrt(var))
    return InvariantTable(states.n, values, errs, pure=states.is_pure)
