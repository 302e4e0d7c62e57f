"""Bargmann invariants of quantum state tuples.

Measure them with cycle tests, rebuild gauge-fixed Gram matrices from
them, decide projective-unitary equivalence, and evaluate basis-independent
witnesses of linear independence, imaginarity and coherence.
"""

from .circuits import (
    Circuit,
    Gate,
    GateKind,
    VerificationReport,
    add_control,
    controlled_nn_cycle,
    cycle_permutation,
    cycle_test_circuit,
    ghz_circuit,
    log_depth_cycle,
    nn_cycle,
    parallel_controlled_cycle,
    verify_permutation,
)
from .documents import TupleDocument, load_document, parse_document, serialize_document
from .equivalence import (
    EquivalenceReport,
    InvariantFingerprint,
    mixed_equivalent,
    mixed_fingerprint,
    procrustes_align,
    pure_equivalent,
)
from .errors import BargmannError, CircuitMismatchError, DocumentError, InputError, ResourceBudgetError
from .formats import from_lines, from_qasm, parse_circuit, to_lines, to_qasm
from .gram import (
    FrameGraph,
    GramMatrix,
    SpanningTree,
    build_frame_graph,
    choose_spanning_tree,
    reconstruct_gram,
    required_invariants,
    spanning_forest,
)
from .invariants import ExactInvariants, InvariantTable, canonical_rotation, necklaces
from .simulate import (
    Branch,
    CycleTestResult,
    CycleTestSpec,
    exact_probability,
    gate_level_simulate,
    measure_invariants,
    sample,
)
from .states import (
    BargmannInvariant,
    MixedState,
    PureState,
    StateTuple,
    bargmann,
    dominant_projector,
    ngon_invariant,
    ngon_states,
    overlap,
    pauli_eigenstate,
)
from .witnesses import (
    WitnessKind,
    WitnessVerdict,
    coherence_polytope_check,
    imaginarity_witness,
    li_closed_form,
    linear_independence,
    max_imaginarity_search,
    overlap_lower_bound,
)

__version__ = "0.1.0"
