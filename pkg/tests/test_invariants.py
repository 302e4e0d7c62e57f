import itertools

import numpy as np
import pytest

from bargmann.errors import InputError
from bargmann.invariants import (
    ExactInvariants,
    InvariantTable,
    as_source,
    canonical_rotation,
    invariant_products,
    necklace_count,
    necklaces,
    parse_sequence,
    sequence_key,
)
from bargmann.states import bargmann, random_mixed_tuple


def _brute_necklaces(n, max_len):
    out = set()
    for length in range(1, max_len + 1):
        for seq in itertools.product(range(1, n + 1), repeat=length):
            out.add(canonical_rotation(seq))
    return out


@pytest.mark.parametrize("n, max_len", [(1, 5), (2, 6), (3, 5), (4, 4)])
def test_necklaces_match_brute_force(n, max_len):
    got = list(necklaces(n, max_len))
    assert len(got) == len(set(got))
    assert set(got) == _brute_necklaces(n, max_len)
    for length in range(1, max_len + 1):
        assert sum(len(s) == length for s in got) == necklace_count(n, length)


def test_canonical_rotation():
    assert canonical_rotation((2, 3, 1)) == (1, 2, 3)
    assert canonical_rotation((3, 1, 1, 2)) == (1, 1, 2, 3)
    assert canonical_rotation(()) == ()


def test_sequence_text():
    assert sequence_key((1, 2, 3)) == "1,2,3"
    assert parse_sequence(" 1, 2,3") == (1, 2, 3)
    with pytest.raises(InputError):
        parse_sequence("1,a")


def test_invariant_products_match_direct(rng):
    t = random_mixed_tuple(3, 2, rng)
    seen = 0
    for seq, value in invariant_products(t.rhos, 5):
        assert abs(value - bargmann(t, seq).value) < 1e-12
        seen += 1
    assert seen == sum(necklace_count(3, m) for m in range(1, 6))


def test_table_lookup_rules():
    table = InvariantTable(3, {(1, 2): 0.5, (2, 3, 1): 0.25 + 0.25j})
    assert table.value((2, 1)) == 0.5
    assert table.value((1, 2, 3)) == 0.25 + 0.25j
    assert table.value((3, 2, 1)) == 0.25 - 0.25j
    assert not table.heuristic
    with pytest.raises(InputError):
        table.value((1, 3))
    with pytest.raises(InputError):
        InvariantTable(2, {(1, 3): 0.1})


def test_as_source(triple):
    assert isinstance(as_source(triple), ExactInvariants)
    table = InvariantTable(1, {})
    assert as_source(table) is table
    with pytest.raises(InputError):
        as_source(np.eye(2))
