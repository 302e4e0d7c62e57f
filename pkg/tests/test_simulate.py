import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bargmann.circuits import (
    controlled_nn_cycle,
    cycle_test_circuit,
    log_depth_cycle,
    nn_cycle,
    parallel_controlled_cycle,
)
from bargmann.errors import CircuitMismatchError, InputError
from bargmann.simulate import (
    Branch,
    CycleTestSpec,
    apply_circuit,
    exact_probability,
    gate_level_simulate,
    measure_invariants,
    sample,
)
from bargmann.states import (
    StateTuple,
    bargmann,
    pauli_eigenstate,
    random_mixed_tuple,
    random_pure_tuple,
)

FAMILIES = [nn_cycle, log_depth_cycle, controlled_nn_cycle, parallel_controlled_cycle]


def _families_for(m):
    return [f for f in FAMILIES if not (f is parallel_controlled_cycle and m < 4)]


def test_identical_states_swap_test():
    s = pauli_eigenstate("x")
    spec = CycleTestSpec(StateTuple([s, s]), (1, 2))
    assert exact_probability(spec).p0_exact == pytest.approx(1.0)


@pytest.mark.parametrize("branch", list(Branch))
def test_pauli_triple_both_branches(triple, branch):
    spec = CycleTestSpec(triple, (1, 2, 3), branch)
    assert exact_probability(spec).p0_exact == pytest.approx(0.625, abs=1e-12)
    for family in _families_for(3):
        assert gate_level_simulate(spec, family(3)).p0_exact == pytest.approx(0.625, abs=1e-12)


def test_orthogonal_swap_test_gate_level():
    t = StateTuple([pauli_eigenstate("z"), pauli_eigenstate("z", -1)])
    spec = CycleTestSpec(t, (1, 2))
    assert gate_level_simulate(spec, nn_cycle(2)).p0_exact == pytest.approx(0.5, abs=1e-12)


def test_implied_part_reproduces_invariant(rng):
    t = random_mixed_tuple(4, 3, rng)
    for seq in [(1, 2), (1, 2, 3), (4, 2, 1, 3)]:
        value = bargmann(t, seq).value
        assert exact_probability(CycleTestSpec(t, seq, Branch.REAL)).implied_invariant_part == pytest.approx(value.real, abs=1e-12)
        assert exact_probability(CycleTestSpec(t, seq, Branch.IMAG)).implied_invariant_part == pytest.approx(value.imag, abs=1e-12)


def test_spec_validation(triple):
    with pytest.raises(InputError):
        CycleTestSpec(triple, (1,))
    with pytest.raises(InputError):
        CycleTestSpec(triple, (1, 2), shots=-1)
    with pytest.raises(InputError):
        CycleTestSpec(triple, (1, 5))


def test_sample_rejects_zero_shots(triple):
    with pytest.raises(InputError):
        sample(CycleTestSpec(triple, (1, 2, 3)))


def test_sample_within_five_sigma(triple):
    res = sample(CycleTestSpec(triple, (1, 2, 3), Branch.IMAG, shots=10_000, seed=7))
    sigma = np.sqrt(0.625 * 0.375 / 10_000)
    assert abs(res.p0_estimate - 0.625) < 5 * sigma
    assert sum(res.counts) == 10_000
    assert res.stderr == pytest.approx(np.sqrt(res.p0_estimate * (1 - res.p0_estimate) / 10_000))


def test_sample_degenerate_probability_one():
    s = pauli_eigenstate("y")
    res = sample(CycleTestSpec(StateTuple([s, s, s]), (1, 2, 3), shots=5000, seed=1))
    assert res.counts[1] == 0


def test_sample_is_deterministic(triple):
    a = sample(CycleTestSpec(triple, (1, 2, 3), shots=1000, seed=42)).to_dict()
    b = sample(CycleTestSpec(triple, (1, 2, 3), shots=1000, seed=42)).to_dict()
    assert a == b


def test_binomial_oracle(triple):
    # counts come from one binomial draw of the seeded generator
    res = sample(CycleTestSpec(triple, (1, 2, 3), shots=4321, seed=99))
    assert res.counts[0] == np.random.default_rng(99).binomial(4321, 0.625)


def test_shot_convergence_rate(triple):
    spec_p0 = 0.625
    errors = {}
    for shots in (10**2, 10**4, 10**6):
        errs = [
            abs(sample(CycleTestSpec(triple, (1, 2, 3), shots=shots, seed=s)).p0_estimate - spec_p0)
            for s in range(200)
        ]
        errors[shots] = np.sqrt(np.mean(np.square(errs)))
    for lo, hi in [(10**2, 10**4), (10**4, 10**6)]:
        ratio = errors[lo] / errors[hi]
        assert 10 / 3 <= ratio <= 10 * 3


@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.sampled_from([2, 3]), st.booleans(), st.sampled_from(list(Branch)))
@settings(max_examples=40, deadline=None)
def test_gate_matches_formula(seed, m, dim, mixed, branch):
    rng = np.random.default_rng(seed)
    n = 3
    t = random_mixed_tuple(n, dim, rng) if mixed else random_pure_tuple(n, dim, rng)
    seq = tuple(int(i) for i in rng.integers(1, n + 1, size=m))
    spec = CycleTestSpec(t, seq, branch)
    ref = exact_probability(spec).p0_exact
    for family in _families_for(m):
        assert abs(gate_level_simulate(spec, family(m)).p0_exact - ref) <= 1e-9


def test_custom_ensemble(rng):
    plus, minus = pauli_eigenstate("x").amplitudes, pauli_eigenstate("x", -1).amplitudes
    zero, one = np.eye(2, dtype=complex)
    rho = np.eye(2) / 2
    t = StateTuple.mixed([rho, rho])
    spec = CycleTestSpec(t, (1, 2))
    ens = [[(0.5, plus), (0.5, minus)], [(0.5, zero), (0.5, one)]]
    assert gate_level_simulate(spec, nn_cycle(2), ensembles=ens).p0_exact == pytest.approx(0.75)
    assert exact_probability(spec).p0_exact == pytest.approx(0.75)


def test_circuit_mismatch(triple):
    spec = CycleTestSpec(triple, (1, 2, 3))
    with pytest.raises(CircuitMismatchError):
        gate_level_simulate(spec, nn_cycle(4))
    with pytest.raises(CircuitMismatchError):
        gate_level_simulate(spec, nn_cycle(3), ensembles=[[(1.0, np.array([1, 0, 0]))]] * 3)


def test_ancillas_disentangled(rng):
    m = 8
    c = parallel_controlled_cycle(m)
    t = random_pure_tuple(m, 2, rng)
    for imaginary in (False, True):
        full = cycle_test_circuit(c, imaginary)
        sv = apply_circuit(full, [s.amplitudes for s in t])
        anc = c.ancilla_wires
        p0 = sv.probability(full.output_control, 0)
        p0_and_clean = sv.zero_probability([full.output_control, *anc])
        p1_and_clean = sv.zero_probability(anc) - p0_and_clean
        # conditioned on either control outcome the ancillas read |0...0>
        assert p0_and_clean == pytest.approx(p0, abs=1e-9)
        assert p1_and_clean == pytest.approx(1 - p0, abs=1e-9)


def test_measure_invariants_table(triple):
    table = measure_invariants(triple, [(1, 2), (1, 3), (2, 3), (1, 2, 3)], shots=200_000, seed=5)
    assert table.heuristic
    est = table.value((1, 2, 3))
    err = table.stderr((1, 2, 3))
    assert abs(est - (1 + 1j) / 4) < 5 * err
    assert table.value((3, 2, 1)) == pytest.approx(est.conjugate())
    assert table.value((1, 2)).imag == 0.0
