"""Sources of Bargmann invariant values and index-sequence utilities.

Gram reconstruction and the equivalence deciders only ever ask for
invariant values by index sequence, so they work the same whether the
values are computed from known states or have been measured.
"""

from __future__ import annotations

import math
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import InputError
from .states import StateTuple, bargmann


def canonical_rotation(indices: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically least cyclic rotation."""
    seq = tuple(indices)
    return min(seq[k:] + seq[:k] for k in range(len(seq))) if seq else seq


def sequence_key(indices: Sequence[int]) -> str:
    return ",".join(str(i) for i in indices)


def parse_sequence(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok)
    except ValueError:
        raise InputError(f"cannot parse index sequence {text!r}") from None


def necklaces(n_symbols: int, max_length: int) -> Iterator[tuple[int, ...]]:
    """Every necklace over ``1..n_symbols`` of length ``1..max_length``.

    Necklaces are represented by their least rotation and generated by the
    Fredricksen-Kessler-Maiorana recursion over prenecklaces, in
    depth-first lexicographic order.
    """
    a = [0] * (max_length + 1)

    def extend(t, p):
        for j in range(a[t - p] if t > 1 else 1, n_symbols + 1):
            a[t] = j
            q = p if (t > 1 and j == a[t - p]) else t
            if t % q == 0:
                yield tuple(a[1 : t + 1])
            if t < max_length:
                yield from extend(t + 1, q)

    if max_length >= 1 and n_symbols >= 1:
        yield from extend(1, 1)


def necklace_count(n_symbols: int, length: int) -> int:
    """Number of necklaces of the given length (cyclic classes of sequences)."""
    total = 0
    for d in range(1, length + 1):
        if length % d == 0:
            total += _totient(d) * n_symbols ** (length // d)
    return total // length


def _totient(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


class ExactInvariants:
    """Invariants computed by trace products from known states."""

    heuristic = False

    def __init__(self, states: StateTuple):
        self.states = states
        self.n = states.n

    def value(self, indices: Sequence[int]) -> complex:
        return bargmann(self.states, indices).value

    def stderr(self, indices: Sequence[int]) -> float:
        return 0.0

    def is_pure(self) -> bool:
        return self.states.is_pure


class InvariantTable:
    """Tabulated invariant values, e.g. from experiment or shot estimates.

    Lookups fall back to the cyclic rotation class and to the reversed
    sequence (whose value is the complex conjugate).  A table with nonzero
    standard errors makes frame-graph edge decisions statistical.
    """

    def __init__(
        self,
        n: int,
        values: Mapping[Sequence[int], complex],
        stderrs: Mapping[Sequence[int], float] | None = None,
        pure: bool = True,
    ):
        self.n = int(n)
        self._values = {}
        self._stderrs = {}
        self.pure = pure
        for seq, val in values.items():
            key = canonical_rotation(self._check(seq))
            self._values[key] = complex(val)
        for seq, err in (stderrs or {}).items():
            self._stderrs[canonical_rotation(self._check(seq))] = float(err)
        self.heuristic = any(e > 0 for e in self._stderrs.values())

    def _check(self, seq):
        seq = tuple(int(i) for i in seq)
        if not seq or any(not 1 <= i <= self.n for i in seq):
            raise InputError(f"index sequence {seq} invalid for N={self.n}")
        return seq

    def _lookup(self, table, indices):
        seq = self._check(indices)
        key = canonical_rotation(seq)
        if key in table:
            return table[key], False
        rkey = canonical_rotation(seq[::-1])
        if rkey in table:
            return table[rkey], True
        raise InputError(f"invariant {sequence_key(seq)} is not in the table")

    def value(self, indices: Sequence[int]) -> complex:
        val, reversed_ = self._lookup(self._values, indices)
        return val.conjugate() if reversed_ else val

    def stderr(self, indices: Sequence[int]) -> float:
        try:
            return self._lookup(self._stderrs, indices)[0]
        except InputError:
            return 0.0

    def is_pure(self) -> bool:
        return self.pure

    def __len__(self):
        return len(self._values)


def as_source(obj) -> ExactInvariants | InvariantTable:
    if isinstance(obj, StateTuple):
        return ExactInvariants(obj)
    if hasattr(obj, "value") and hasattr(obj, "n"):
        return obj
    raise InputError(f"cannot read invariants from {type(obj).__name__}")


def invariant_products(rhos: np.ndarray, max_degree: int) -> Iterator[tuple[tuple[int, ...], complex]]:
    """Yield ``(necklace, Tr(product))`` for all necklaces up to ``max_degree``.

    Prefix products are shared along the prenecklace recursion, so each
    necklace costs one matrix product.
    """
    k = rhos.shape[0]
    a = [0] * (max_degree + 1)
    prefix = [None] * (max_degree + 1)

    def extend(t, p):
        start = a[t - p] if t > 1 else 1
        for j in range(start, k + 1):
            a[t] = j
            q = p if (t > 1 and j == a[t - p]) else t
            prefix[t] = rhos[j - 1] if t == 1 else prefix[t - 1] @ rhos[j - 1]
            if t % q == 0:
                yield tuple(a[1 : t + 1]), complex(np.trace(prefix[t]))
            if t < max_degree:
                yield from extend(t + 1, q)

    yield from extend(1, 1)
