"""Deciding projective-unitary equivalence of state tuples.

Pure tuples are compared through their gauge-fixed Gram matrices, with a
Procrustes alignment and its stability bound for approximate
equivalence.  Mixed tuples are compared through all invariants up to a
degree cap; a cap of d**2 makes the comparison complete.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InputError, ResourceBudgetError
from .gram import (
    DEFAULT_ZERO_THRESHOLD,
    build_frame_graph,
    gauge_fixed_vectors,
    reconstruct_gram,
    representatives,
    spanning_forest,
)
from .invariants import as_source, invariant_products, necklace_count, sequence_key
from .states import StateTuple

RANK_TOL = 1e-10
PROCRUSTES_FACTOR = (1 + np.sqrt(2)) ** 2
DEFAULT_SEQUENCE_BUDGET = 200_000


@dataclass
class EquivalenceReport:
    equivalent: bool
    gram_distance: float | None = None
    aligning_unitary: np.ndarray | None = None
    avg_infidelity: float | None = None
    avg_infidelity_states: float | None = None
    bound_value: float | None = None
    bound_applicable: bool = False
    c_psi: float | None = None
    reason: str = ""
    complete: bool | None = None
    degree_cap: int | None = None
    max_invariant_difference: float | None = None
    invariant_count: int | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        u = out.pop("aligning_unitary")
        if u is not None:
            out["aligning_unitary"] = [[[z.real, z.imag] for z in row] for row in np.asarray(u)]
        return out


def _check_pair(psi, phi):
    if psi.n != phi.n:
        raise InputError(f"tuples have different lengths ({psi.n} vs {phi.n})")


def _matched_grams(psi, phi, zero_threshold):
    """Gram matrices of both tuples on the first tuple's spanning forest.

    Returns None (with a reason) when the frame graphs differ.
    """
    g_psi = build_frame_graph(psi, zero_threshold)
    g_phi = build_frame_graph(phi, zero_threshold)
    if g_psi.edges != g_phi.edges:
        diff = sorted(g_psi.edges ^ g_phi.edges)
        return None, f"frame graphs differ on pairs {diff}"
    forest = spanning_forest(g_psi)
    a = reconstruct_gram(psi, forest, graph=g_psi)
    b = reconstruct_gram(phi, forest, graph=g_phi)
    return (a, b), ""


def pure_equivalent(psi, phi, tol: float = 1e-9, zero_threshold: float = DEFAULT_ZERO_THRESHOLD) -> EquivalenceReport:
    """Exact-comparison decider: equivalent iff the Gram matrices agree within ``tol``."""
    psi, phi = as_source(psi), as_source(phi)
    _check_pair(psi, phi)
    grams, reason = _matched_grams(psi, phi, zero_threshold)
    if grams is None:
        return EquivalenceReport(False, reason=reason)
    a, b = grams
    dist = float(np.linalg.norm(a.entries - b.entries))
    ok = dist <= tol
    return EquivalenceReport(
        ok,
        gram_distance=dist,
        reason="Gram matrices agree" if ok else f"Gram distance {dist:.3g} exceeds {tol:g}",
    )


def pseudo_inverse_norm(gram: np.ndarray, rel_tol: float = RANK_TOL) -> float:
    """Operator norm of the Moore-Penrose pseudo-inverse: 1 / smallest kept eigenvalue."""
    vals = np.linalg.eigvalsh(gram)
    kept = vals[vals > rel_tol * vals.max()]
    return float(1.0 / kept.min())


def _polar_unitary(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # unitary U minimising ||U a - b||_F
    x, _, yh = np.linalg.svd(b @ a.conj().T)
    return x @ yh


def _pad_rows(v: np.ndarray, rows: int) -> np.ndarray:
    return np.vstack([v, np.zeros((rows - v.shape[0], v.shape[1]), dtype=complex)])


def average_infidelity(u: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """``(1/N) sum_i 1 - |<b_i|U a_i>|^2`` for normalized columns."""
    fid = np.abs(np.sum(b.conj() * (u @ a), axis=0)) ** 2
    return float(np.mean(1.0 - fid))


def procrustes_align(psi, phi, zero_threshold: float = DEFAULT_ZERO_THRESHOLD, tol: float = 1e-9) -> EquivalenceReport:
    """Best aligning unitary between two pure tuples and the stability bound.

    Representative vectors are extracted from each Gram matrix, the unitary
    comes from the SVD of their cross matrix, and the bound is
    ``C * ||G_psi - G_phi||_F**2 / N`` with
    ``C = (1 + sqrt 2)**2 * ||pinv(G_psi)||``.  It is applicable when
    ``rank G_psi >= rank G_phi`` and
    ``||G_psi - G_phi||_F * ||pinv(G_psi)||**0.5 <= 1/2``.
    """
    src_psi, src_phi = as_source(psi), as_source(phi)
    _check_pair(src_psi, src_phi)
    grams, reason = _matched_grams(src_psi, src_phi, zero_threshold)
    if grams is None:
        return EquivalenceReport(False, reason=reason)
    ga, gb = grams[0].entries, grams[1].entries
    n = ga.shape[0]
    diff = float(np.linalg.norm(ga - gb))
    pinv_norm = pseudo_inverse_norm(ga)
    c_psi = PROCRUSTES_FACTOR * pinv_norm
    rank_a, rank_b = grams[0].rank(RANK_TOL), grams[1].rank(RANK_TOL)
    applicable = rank_a >= rank_b and diff * np.sqrt(pinv_norm) <= 0.5

    va, vb = representatives(ga, RANK_TOL), representatives(gb, RANK_TOL)
    rows = max(va.shape[0], vb.shape[0])
    va, vb = _pad_rows(va, rows), _pad_rows(vb, rows)
    u = _polar_unitary(va, vb)
    report = EquivalenceReport(
        diff <= tol,
        gram_distance=diff,
        aligning_unitary=u,
        avg_infidelity=average_infidelity(u, va, vb),
        bound_value=c_psi * diff**2 / n,
        bound_applicable=bool(applicable),
        c_psi=c_psi,
        reason="" if applicable else "bound preconditions not met; alignment is best effort",
    )
    if isinstance(psi, StateTuple) and isinstance(phi, StateTuple):
        forest = grams[0].trees
        xa, xb = gauge_fixed_vectors(psi, forest), gauge_fixed_vectors(phi, forest)
        rows = max(xa.shape[0], xb.shape[0])
        xa, xb = _pad_rows(xa, rows), _pad_rows(xb, rows)
        report.avg_infidelity_states = average_infidelity(_polar_unitary(xa, xb), xa, xb)
    return report


@dataclass
class InvariantFingerprint:
    """Values of every cyclic class of index sequences up to ``degree_cap``."""

    degree_cap: int
    n: int
    dim: int
    entries: dict[tuple[int, ...], complex] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "degree_cap": self.degree_cap,
            "n": self.n,
            "dim": self.dim,
            "entries": {sequence_key(k): [v.real, v.imag] for k, v in self.entries.items()},
        }

    def __len__(self):
        return len(self.entries)


def fingerprint_size(n: int, degree_cap: int) -> int:
    return sum(necklace_count(n, m) for m in range(1, degree_cap + 1))


def mixed_fingerprint(states: StateTuple, degree_cap: int | None = None, budget: int = DEFAULT_SEQUENCE_BUDGET) -> InvariantFingerprint:
    """All invariants of canonical (least-rotation) sequences up to ``degree_cap``.

    The default cap is ``d**2``.  Raises :class:`ResourceBudgetError` when
    the number of cyclic classes exceeds ``budget``.
    """
    cap = states.dim**2 if degree_cap is None else int(degree_cap)
    if cap < 1:
        raise InputError("degree_cap must be at least 1")
    count = fingerprint_size(states.n, cap)
    if count > budget:
        raise ResourceBudgetError(
            f"{count} invariant classes up to degree {cap} exceed the budget of {budget}", count
        )
    entries = dict(invariant_products(states.rhos, cap))
    return InvariantFingerprint(cap, states.n, states.dim, entries)


def mixed_equivalent(
    s: StateTuple,
    s_prime: StateTuple,
    tol: float = 1e-9,
    degree_cap: int | None = None,
    budget: int = DEFAULT_SEQUENCE_BUDGET,
) -> EquivalenceReport:
    """Equivalent iff all invariants up to the cap agree within ``tol``.

    Complete at ``degree_cap >= d**2``; lower caps only test a necessary
    condition and the report says so.
    """
    _check_pair(s, s_prime)
    if s.dim != s_prime.dim:
        raise InputError(f"tuples live in different dimensions ({s.dim} vs {s_prime.dim})")
    fa = mixed_fingerprint(s, degree_cap, budget)
    fb = mixed_fingerprint(s_prime, degree_cap, budget)
    worst_key, worst = None, 0.0
    for key, val in fa.entries.items():
        delta = abs(val - fb.entries[key])
        if delta > worst:
            worst_key, worst = key, delta
    complete = fa.degree_cap >= s.dim**2
    ok = worst <= tol
    if ok:
        reason = "all invariants agree" + ("" if complete else " (necessary condition only: cap below d^2)")
    else:
        reason = f"invariant {sequence_key(worst_key)} differs by {worst:.3g}"
    return EquivalenceReport(
        ok,
        reason=reason,
        complete=complete,
        degree_cap=fa.degree_cap,
        max_invariant_difference=worst,
        invariant_count=len(fa),
    )
