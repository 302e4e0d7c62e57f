"""Basis-independent witnesses built from invariant values.

Linear independence is read off the determinant of a gauge-fixed Gram
matrix, imaginarity from a nonzero imaginary part of a degree >= 3
invariant, and coherence from the polytope of invariant values reachable
by simultaneously diagonal (incoherent) triples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np
from scipy import optimize, stats

from .errors import InputError
from .gram import GramMatrix
from .states import BargmannInvariant, StateTuple, bargmann, ngon_invariant, overlap

STATISTICAL_SIGMAS = 5.0
COHERENCE_THRESHOLD = 1e-12


class WitnessKind(str, Enum):
    LINEAR_INDEPENDENCE = "LINEAR_INDEPENDENCE"
    IMAGINARITY = "IMAGINARITY"
    COHERENCE = "COHERENCE"


@dataclass
class WitnessVerdict:
    """``triggered`` means the margin crossed the decision boundary ``threshold``."""

    kind: WitnessKind
    triggered: bool
    margin: float
    threshold: float
    details: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "triggered": self.triggered,
            "margin": self.margin,
            "threshold": self.threshold,
            "details": list(self.details),
        }


def _verdict(kind, margin, threshold, details=()):
    margin = float(margin) + 0.0
    return WitnessVerdict(kind, bool(margin > threshold), margin, float(threshold), list(details))


# linear independence

def linear_independence(gram, tol: float = 1e-10) -> WitnessVerdict:
    """Independent iff ``det(G) > tol``; the margin is the determinant itself."""
    g = gram.entries if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=complex)
    det = float(np.linalg.det(g).real)
    return _verdict(WitnessKind.LINEAR_INDEPENDENCE, det, tol, [f"det={det:.6g}"])


def _pair(mapping, i, j):
    for key in ((i, j), (j, i), f"{i}{j}", f"{j}{i}"):
        if key in mapping:
            return float(mapping[key])
    raise InputError(f"missing value for pair {i}{j}")


def li_closed_form(overlaps: Mapping, phases: Mapping, m: int) -> float:
    """Explicit polynomial for ``det(G)`` of 3 or 4 states without null overlaps.

    ``overlaps[(i, j)]`` is the overlap of states i and j and
    ``phases[(i, j)]`` (2 <= i < j) is the argument of the triple
    invariant ``D_{1ij}``; in the gauge where row 1 of the Gram matrix is
    real these are exactly the phases of ``G_ij``.
    """
    if m not in (3, 4):
        raise InputError("closed forms exist for m = 3 and m = 4 only")
    d = {(i, j): _pair(overlaps, i, j) for i, j in itertools.combinations(range(1, m + 1), 2)}
    if any(v <= 0 for v in d.values()):
        raise InputError("closed-form determinant assumes no null overlaps")
    p = {(i, j): _pair(phases, i, j) for i, j in itertools.combinations(range(2, m + 1), 2)}
    r = {k: np.sqrt(v) for k, v in d.items()}
    if m == 3:
        return float(1 - sum(d.values()) + 2 * r[1, 2] * r[1, 3] * r[2, 3] * np.cos(p[2, 3]))
    triangles = (
        r[1, 2] * r[1, 3] * r[2, 3] * np.cos(p[2, 3])
        + r[1, 2] * r[1, 4] * r[2, 4] * np.cos(p[2, 4])
        + r[1, 3] * r[1, 4] * r[3, 4] * np.cos(p[3, 4])
        + r[2, 3] * r[2, 4] * r[3, 4] * np.cos(p[2, 3] + p[3, 4] - p[2, 4])
    )
    squares = (
        r[1, 2] * r[2, 3] * r[3, 4] * r[1, 4] * np.cos(p[2, 3] + p[3, 4])
        + r[1, 2] * r[2, 4] * r[3, 4] * r[1, 3] * np.cos(p[2, 4] - p[3, 4])
        + r[1, 3] * r[2, 3] * r[2, 4] * r[1, 4] * np.cos(p[2, 4] - p[2, 3])
    )
    pairs = d[1, 2] * d[3, 4] + d[1, 3] * d[2, 4] + d[1, 4] * d[2, 3]
    return float(1 - sum(d.values()) + pairs + 2 * triangles - 2 * squares)


def closed_form_inputs(states: StateTuple) -> tuple[dict, dict]:
    """Overlaps and triple-invariant phases of a 3- or 4-tuple, as ``li_closed_form`` expects."""
    m = states.n
    overlaps = {(i, j): overlap(states, i, j) for i, j in itertools.combinations(range(1, m + 1), 2)}
    phases = {
        (i, j): float(np.angle(bargmann(states, (1, i, j)).value))
        for i, j in itertools.combinations(range(2, m + 1), 2)
    }
    return overlaps, phases


# imaginarity

def statistical_threshold(stderr: float, sigmas: float = STATISTICAL_SIGMAS, alpha: float | None = None) -> float:
    """Decision threshold for a shot-estimated imaginary part.

    With ``alpha`` the two-sided normal quantile for that false-positive
    rate replaces ``sigmas``.
    """
    if alpha is not None:
        if not 0 < alpha < 1:
            raise InputError("alpha must lie in (0, 1)")
        sigmas = float(stats.norm.isf(alpha / 2))
    return float(sigmas * stderr)


def imaginarity_witness(inv: BargmannInvariant, threshold: float = 0.0) -> WitnessVerdict:
    """Triggered iff ``|Im D| > threshold``: some state must have complex amplitudes."""
    if inv.degree < 3:
        raise InputError(
            "imaginarity needs an invariant of degree >= 3; overlaps Tr(rho_i rho_j) are always real"
        )
    im = complex(inv.value).imag
    margin = abs(im) - threshold
    return WitnessVerdict(WitnessKind.IMAGINARITY, bool(margin > 0), float(margin), float(threshold), [f"Im={im:.6g}"])


# coherence

COHERENCE_COORDINATES = ("d12", "d13", "d23", "d123")

INCOHERENT_VERTICES = np.array(
    [
        [0, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [1, 0, 0, 0],
        [1, 1, 1, 1],
    ],
    dtype=float,
)

# facet name -> (a, b) meaning a . (d12, d13, d23, d123) + b >= 0
COHERENCE_FACETS = {
    "posd1": (np.array([0.0, 0.0, 0.0, 1.0]), 0.0),
    "posd2_12": (np.array([1.0, 0.0, 0.0, -1.0]), 0.0),
    "posd2_13": (np.array([0.0, 1.0, 0.0, -1.0]), 0.0),
    "posd2_23": (np.array([0.0, 0.0, 1.0, -1.0]), 0.0),
    "posd3": (np.array([-0.5, -0.5, -0.5, 1.0]), 0.5),
}


def _normalized(a, b):
    scale = np.linalg.norm(np.append(a, b))
    return np.append(a, b) / scale


def derive_facets(vertices: np.ndarray, tol: float = 1e-9) -> list[np.ndarray]:
    """Facets of the convex hull of full-dimensional ``vertices`` by brute force.

    Every affinely independent subset of ``dim`` vertices spans a candidate
    hyperplane; it is a facet when all vertices lie on one side.  Each
    facet is returned as a unit vector ``(a, b)`` with ``a.x + b >= 0``
    inside.
    """
    v = np.asarray(vertices, dtype=float)
    dim = v.shape[1]
    found = []
    for subset in itertools.combinations(range(len(v)), dim):
        pts = v[list(subset)]
        system = np.hstack([pts, np.ones((dim, 1))])
        if np.linalg.matrix_rank(system, tol) < dim:
            continue
        normal = np.linalg.svd(system)[2][-1]
        a, b = normal[:dim], normal[dim]
        if np.linalg.norm(a) < tol:
            continue
        side = v @ a + b
        if np.all(side >= -tol):
            cand = _normalized(a, b)
        elif np.all(side <= tol):
            cand = _normalized(-a, -b)
        else:
            continue
        if not any(np.allclose(cand, f, atol=1e-9) for f in found):
            found.append(cand)
    return found


def facets_match(derived: Sequence[np.ndarray], facets: Mapping = COHERENCE_FACETS) -> bool:
    """True iff the derived hull facets are exactly the named facet set."""
    named = [_normalized(a, b) for a, b in facets.values()]
    if len(named) != len(derived):
        return False
    return all(any(np.allclose(f, g, atol=1e-9) for g in derived) for f in named)


def coherence_polytope_check(d12, d13, d23, d123, threshold: float = COHERENCE_THRESHOLD) -> WitnessVerdict:
    """Coherence is witnessed when the invariants leave the incoherent polytope.

    A non-real ``d123`` is reported as facet ``imaginary``.  The margin is
    the largest violation (negative: distance inside the nearest facet);
    details list every violated facet.
    """
    d123 = complex(d123)
    for name, val in (("d12", d12), ("d13", d13), ("d23", d23)):
        if abs(complex(val).imag) > 1e-9:
            raise InputError(f"overlap {name} must be real")
    x = np.array([complex(d12).real, complex(d13).real, complex(d23).real, d123.real])
    violations = {name: -(a @ x + b) for name, (a, b) in COHERENCE_FACETS.items()}
    margin = max(violations.values())
    if abs(d123.imag) > threshold:
        violations["imaginary"] = abs(d123.imag)
        margin = max(margin, abs(d123.imag))
    details = [name for name, amount in violations.items() if amount > threshold]
    return _verdict(WitnessKind.COHERENCE, margin, threshold, details)


def coherence_check_states(states: StateTuple, threshold: float = COHERENCE_THRESHOLD) -> WitnessVerdict:
    if states.n != 3:
        raise InputError("the coherence polytope concerns exactly three states")
    return coherence_polytope_check(
        overlap(states, 1, 2),
        overlap(states, 1, 3),
        overlap(states, 2, 3),
        bargmann(states, (1, 2, 3)).value,
        threshold,
    )


# indistinguishability

def overlap_lower_bound(inv: BargmannInvariant) -> float:
    """``|D|**2``, a lower bound on every cyclically neighbouring pure-state overlap."""
    return float(abs(complex(inv.value)) ** 2)


def neighbor_overlaps(states: StateTuple, indices: Sequence[int]) -> list[float]:
    idx = states.check_indices(indices)
    return [overlap(states, a, b) for a, b in zip(idx, idx[1:] + idx[:1])]


# imaginarity maximisation

@dataclass
class ImaginaritySearch:
    n: int
    best_value: float
    best_vectors: np.ndarray
    ngon_value: float
    ngon_theta: float
    evaluations: int


def _qubits_from_params(params, n):
    # state 1 at the north pole, state 2 on the xz half-plane, by unitary gauge
    thetas = np.concatenate([[0.0], params[: n - 1]])
    phis = np.concatenate([[0.0, 0.0], params[n - 1 :]])
    return np.stack([np.cos(thetas / 2), np.sin(thetas / 2) * np.exp(1j * phis)], axis=1)


def _cyclic_imag(params, n):
    v = _qubits_from_params(params, n)
    inner = np.sum(v.conj() * np.roll(v, -1, axis=0), axis=1)
    return float(np.prod(inner).imag)


def best_ngon(n: int) -> tuple[float, float]:
    """Largest ``Im D`` over the regular n-gon family and its polar angle."""
    res = optimize.minimize_scalar(
        lambda t: -ngon_invariant(n, t).imag, bounds=(1e-6, np.pi / 2), method="bounded",
        options={"xatol": 1e-10},
    )
    return float(-res.fun), float(res.x)


def max_imaginarity_search(
    n: int,
    grid: int = 16,
    starts: int = 64,
    refine: int = 16,
    seed: int | None = 0,
) -> ImaginaritySearch:
    """Search qubit n-tuples for the largest ``Im`` of the cyclic invariant.

    Uses a full grid over the ``2n - 3`` gauge-fixed angles when that has
    at most three dimensions, random starts otherwise, then refines the
    best ``refine`` candidates by local optimisation.
    """
    if n < 3:
        raise InputError("degree-2 invariants are real; n must be at least 3")
    n_params = 2 * n - 3
    lower = np.array([0.0] * (n - 1) + [-np.pi] * (n - 2))
    upper = np.array([np.pi] * (n - 1) + [np.pi] * (n - 2))
    if n_params <= 3:
        axes = [np.linspace(lo, hi, grid) for lo, hi in zip(lower, upper)]
        candidates = np.array(list(itertools.product(*axes)))
    else:
        rng = np.random.default_rng(seed)
        candidates = rng.uniform(lower, upper, size=(starts, n_params))
    scores = np.array([_cyclic_imag(c, n) for c in candidates])
    evaluations = len(candidates)
    best_val, best_params = -np.inf, None
    for k in np.argsort(-scores)[:refine]:
        res = optimize.minimize(lambda x: -_cyclic_imag(x, n), candidates[k], method="L-BFGS-B",
                                bounds=list(zip(lower - np.pi, upper + np.pi)))
        evaluations += res.nfev
        if -res.fun > best_val:
            best_val, best_params = float(-res.fun), res.x
    ngon_val, ngon_theta = best_ngon(n)
    return ImaginaritySearch(n, best_val, _qubits_from_params(best_params, n), ngon_val, ngon_theta, evaluations)
