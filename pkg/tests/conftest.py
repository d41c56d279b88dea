"""Shared brute-force oracles, kept independent of the library's DP and search."""

from __future__ import annotations

import itertools

import pytest

from zerosum.group import AbelianGroup, make_group
from zerosum.sequence import Sequence


_ADD_TABLES: dict[tuple[int, ...], list[list[int]]] = {}


def _add_table(group: AbelianGroup) -> list[list[int]]:
    table = _ADD_TABLES.get(group.moduli)
    if table is None:
        table = [
            [group.index_add(i, j) for j in range(group.order)]
            for i in range(group.order)
        ]
        _ADD_TABLES[group.moduli] = table
    return table


def naive_profile(seq: Sequence) -> dict[int, set[int]]:
    """Sums of all nonempty subsequences, grouped by exact length.

    Enumerates every subset of the expanded term list directly; usable for
    |S| <= ~14.
    """
    table = _add_table(seq.group)
    terms = seq.term_indices()
    n = len(terms)
    sums = [0] * (1 << n)
    sizes = [0] * (1 << n)
    profile: dict[int, set[int]] = {}
    for mask in range(1, 1 << n):
        low = mask & (-mask)
        rest = mask ^ low
        i = low.bit_length() - 1
        s = table[sums[rest]][terms[i]]
        sums[mask] = s
        size = sizes[rest] + 1
        sizes[mask] = size
        profile.setdefault(size, set()).add(s)
    return profile


def naive_bounded_sums(seq: Sequence, r: int) -> set[int]:
    profile = naive_profile(seq)
    out: set[int] = set()
    for c in range(1, r + 1):
        out |= profile.get(c, set())
    return out


def naive_has_zero_sum_in(seq: Sequence, a: int, b: int) -> bool:
    profile = naive_profile(seq)
    return any(0 in profile.get(c, set()) for c in range(a, b + 1))


def naive_is_short_free(seq: Sequence) -> bool:
    if seq.length == 0:
        return True
    return not naive_has_zero_sum_in(seq, 1, min(seq.group.exponent, seq.length))


def naive_is_zero_sum_free(seq: Sequence) -> bool:
    if seq.length == 0:
        return True
    return not naive_has_zero_sum_in(seq, 1, seq.length)


def multisets_of_length(group: AbelianGroup, length: int):
    """All multisets of the given length over the whole element set."""
    for combo in itertools.combinations_with_replacement(range(group.order), length):
        yield Sequence.from_items(group, ((i, 1) for i in combo))


def brute_max_length(group: AbelianGroup, upper: int, keep) -> int:
    """Largest length <= upper admitting a multiset with property `keep`."""
    for length in range(upper, 0, -1):
        for seq in multisets_of_length(group, length):
            if keep(seq):
                return length
    return 0


@pytest.fixture(scope="session")
def c33():
    return make_group([3, 3, 3])


@pytest.fixture(scope="session")
def c32():
    return make_group([3, 3])
