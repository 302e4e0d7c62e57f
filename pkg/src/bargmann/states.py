"""State types and direct evaluation of Bargmann invariants.

A Bargmann invariant of a tuple of density matrices is the trace of an
ordered product ``Tr(rho_i1 rho_i2 ... rho_im)``.  Index sequences are
1-based throughout the public API.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import InputError

STRUCTURE_TOL = 1e-10
PSD_TOL = 1e-9


def _as_complex_array(data, ndim: int, what: str) -> np.ndarray:
    arr = np.array(data, dtype=complex)
    if arr.ndim != ndim:
        raise InputError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} contains NaN or Inf")
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector; the projector is what the physics uses."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _as_complex_array(self.amplitudes, 1, "amplitudes")
        if amps.size == 0:
            raise InputError("amplitudes must be nonempty")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > STRUCTURE_TOL:
            raise InputError(f"state is not normalized (norm^2 = {float(norm):.12g})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec, normalize: bool = True) -> "PureState":
        vec = _as_complex_array(vec, 1, "amplitudes")
        if normalize:
            n = np.linalg.norm(vec)
            if n == 0:
                raise InputError("zero vector cannot be normalized")
            vec = vec / n
        return cls(vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def rho(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    is_pure = True

    def canonical(self) -> np.ndarray:
        """Amplitudes with the first nonzero entry made real positive."""
        amps = self.amplitudes
        nz = np.flatnonzero(np.abs(amps) > STRUCTURE_TOL)
        phase = amps[nz[0]] / abs(amps[nz[0]])
        return amps / phase


@dataclass(frozen=True, eq=False)
class MixedState:
    """Density matrix: Hermitian, unit trace, positive semidefinite."""

    rho: np.ndarray

    def __post_init__(self):
        rho = _as_complex_array(self.rho, 2, "rho")
        if rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
            raise InputError(f"rho must be square and nonempty, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > STRUCTURE_TOL:
            raise InputError("rho is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > STRUCTURE_TOL:
            raise InputError(f"rho does not have unit trace (trace = {float(tr):.12g})")
        if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
            raise InputError("rho is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    is_pure = False

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))


class StateTuple:
    """Ordered tuple of states on a common Hilbert space.

    Members may be :class:`PureState` or :class:`MixedState`; ``is_pure``
    records purity by construction (a rank-1 ``MixedState`` counts as mixed).
    """

    def __init__(self, states: Iterable[PureState | MixedState]):
        states = tuple(states)
        if not states:
            raise InputError("a state tuple needs at least one state")
        for s in states:
            if not isinstance(s, (PureState, MixedState)):
                raise InputError(f"unsupported member type {type(s).__name__}")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise InputError(f"states have mismatched dimensions {sorted(dims)}")
        self.states = states
        self.dim = dims.pop()
        self._rhos = np.array([s.rho for s in states])
        self._rhos.setflags(write=False)

    @classmethod
    def pure(cls, vectors, normalize: bool = False) -> "StateTuple":
        return cls(PureState.from_vector(v, normalize=normalize) for v in vectors)

    @classmethod
    def mixed(cls, rhos) -> "StateTuple":
        return cls(MixedState(r) for r in rhos)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, k):
        return self.states[k]

    def __iter__(self):
        return iter(self.states)

    def __repr__(self):
        kind = "pure" if self.is_pure else "mixed"
        return f"StateTuple(N={len(self)}, dim={self.dim}, {kind})"

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def rhos(self) -> np.ndarray:
        """Array of shape (N, d, d)."""
        return self._rhos

    @property
    def is_pure(self) -> bool:
        return all(s.is_pure for s in self.states)

    def vectors(self) -> np.ndarray:
        """Matrix whose columns are the member amplitude vectors (pure only)."""
        if not self.is_pure:
            raise InputError("tuple contains mixed states")
        return np.column_stack([s.amplitudes for s in self.states])

    def conjugate(self) -> "StateTuple":
        """Entrywise complex conjugate (equivalently the transpose) of every member."""
        return StateTuple(
            PureState(s.amplitudes.conj()) if s.is_pure else MixedState(s.rho.conj())
            for s in self.states
        )

    def transformed(self, unitary) -> "StateTuple":
        """The tuple ``(U rho_i U^dagger)_i`` for a common unitary U."""
        u = np.asarray(unitary, dtype=complex)
        return StateTuple(
            PureState(u @ s.amplitudes) if s.is_pure else MixedState(u @ s.rho @ u.conj().T)
            for s in self.states
        )

    def check_indices(self, indices: Sequence[int]) -> tuple[int, ...]:
        idx = tuple(int(i) for i in indices)
        if not idx:
            raise InputError("index sequence must be nonempty")
        bad = [i for i in idx if not 1 <= i <= self.n]
        if bad:
            raise InputError(f"indices {bad} out of range [1, {self.n}]")
        return idx


@dataclass(frozen=True)
class BargmannInvariant:
    indices: tuple[int, ...]
    value: complex

    @property
    def degree(self) -> int:
        return len(self.indices)


def bargmann(states: StateTuple, indices: Sequence[int]) -> BargmannInvariant:
    """Return ``Tr(rho_i1 ... rho_im)`` for a 1-based index sequence."""
    idx = states.check_indices(indices)
    rhos = states.rhos
    product = reduce(np.matmul, (rhos[i - 1] for i in idx))
    return BargmannInvariant(idx, complex(np.trace(product)))


def overlap(states: StateTuple, i: int, j: int) -> float:
    """Degree-2 invariant ``Tr(rho_i rho_j)``, clipped to ``[0, 1 + 1e-9]``."""
    value = bargmann(states, (i, j)).value
    return float(np.clip(value.real, 0.0, 1.0 + PSD_TOL))


def ngon_states(n: int, theta: float) -> StateTuple:
    """Qubit states at the vertices of a regular spherical n-gon.

    ``|psi_k> = cos(theta/2)|0> + sin(theta/2) exp(2 pi i k / n)|1>`` for
    ``k = 0 .. n-1``.
    """
    if n < 3:
        raise InputError("an n-gon needs n >= 3")
    if not 0.0 <= theta <= np.pi:
        raise InputError("theta must lie in [0, pi]")
    k = np.arange(n)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return StateTuple(PureState(np.array([c, s * np.exp(2j * np.pi * kk / n)])) for kk in k)


def ngon_invariant(n: int, theta: float) -> complex:
    """Closed form of the degree-n invariant of :func:`ngon_states`."""
    if n < 3:
        raise InputError("an n-gon needs n >= 3")
    return complex((1 + np.sin(theta / 2) ** 2 * (np.exp(2j * np.pi / n) - 1)) ** n)


@dataclass(frozen=True, eq=False)
class DominantProjector:
    state: PureState
    eigenvalue: float
    gap: float
    degenerate: bool


def dominant_projector(rho: MixedState | np.ndarray, gap_tol: float = 1e-9) -> DominantProjector:
    """Eigenvector of the largest eigenvalue of ``rho``.

    When the top two eigenvalues are closer than ``gap_tol`` the returned
    eigenvector is whatever the eigensolver picked and ``degenerate`` is set.
    """
    if not isinstance(rho, MixedState):
        rho = MixedState(rho)
    vals, vecs = np.linalg.eigh(rho.rho)
    gap = float(vals[-1] - vals[-2]) if len(vals) > 1 else float("inf")
    vec = vecs[:, -1]
    return DominantProjector(
        state=PureState(vec / np.linalg.norm(vec)),
        eigenvalue=float(vals[-1]),
        gap=gap,
        degenerate=gap < gap_tol,
    )


def trace_norm(x: np.ndarray) -> float:
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(x, compute_uv=False)))


def pauli_eigenstate(axis: str, sign: int = 1) -> PureState:
    """Eigenstate of X, Y or Z with eigenvalue ``sign``."""
    r = 1 / np.sqrt(2)
    table = {
        ("x", 1): [r, r],
        ("x", -1): [r, -r],
        ("y", 1): [r, 1j * r],
        ("y", -1): [r, -1j * r],
        ("z", 1): [1, 0],
        ("z", -1): [0, 1],
    }
    try:
        return PureState(np.array(table[axis.lower(), sign], dtype=complex))
    except KeyError:
        raise InputError(f"no Pauli eigenstate for axis={axis!r}, sign={sign!r}") from None


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.exp(2j * np.pi * rng.random()).reshape(1, 1)


def random_pure_state(dim: int, rng: np.random.Generator, real: bool = False) -> PureState:
    vec = rng.normal(size=dim) + (0 if real else 1j * rng.normal(size=dim))
    return PureState.from_vector(vec)


def random_mixed_state(dim: int, rng: np.random.Generator, rank: int | None = None) -> MixedState:
    """Density matrix drawn from the induced (Ginibre) measure."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return MixedState(rho / np.trace(rho).real)


def random_pure_tuple(n: int, dim: int, rng: np.random.Generator, real: bool = False) -> StateTuple:
    return StateTuple(random_pure_state(dim, rng, real=real) for _ in range(n))


def random_mixed_tuple(n: int, dim: int, rng: np.random.Generator) -> StateTuple:
    return StateTuple(random_mixed_state(dim, rng) for _ in range(n))
