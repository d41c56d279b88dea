"""Decision kernel: subsequence-sum reachability with bounded length.

The dynamic program tracks, for each count c in [1, cap] and each group
element x, whether some subsequence of exactly c terms sums to x.  Terms are
processed in deterministic order (sorted by element index, multiplicities
expanded), and one predecessor per newly reached state is stored, so witness
reconstruction is reproducible: the same input always yields the same witness.
"""

from __future__ import annotations

from .group import AbelianGroup
from .sequence import Sequence


def _add_row(group: AbelianGroup, g_index: int) -> list[int]:
    base = group.coords_of(g_index)
    row = []
    for x in range(group.order):
        row.append(group.index_of(a + b for a, b in zip(group.coords_of(x), base)))
    return row


class ReachTable:
    """Exact-count reachability of subsequence sums, with parent links."""

    def __init__(self, seq: Sequence, cap: int) -> None:
        if cap < 1:
            raise ValueError("cap must be >= 1")
        seq.group.require_table_capacity()
        self.group = seq.group
        self.seq = seq
        self.cap = cap = min(cap, seq.length) if seq.length else 0
        self.terms = seq.term_indices()
        # reach[c] = set of sums over subsequences of exactly c terms
        self.reach: list[set[int]] = [set() for _ in range(cap + 1)]
        self.reach[0].add(0)
        # parent[(c, x)] = (term position, predecessor sum)
        self.parent: dict[tuple[int, int], tuple[int, int]] = {}
        rows: dict[int, list[int]] = {}
        for pos, g in enumerate(self.terms):
            row = rows.get(g)
            if row is None:
                row = rows[g] = _add_row(self.group, g)
            top = min(pos, cap - 1)
            for c in range(top, -1, -1):
                dst = self.reach[c + 1]
                for x in self.reach[c]:
                    y = row[x]
                    if y not in dst:
                        dst.add(y)
                        self.parent[(c + 1, y)] = (pos, x)

    def reachable(self, x_index: int, count: int) -> bool:
        return 0 < count <= self.cap and x_index in self.reach[count]

    def sums_with_count_at_most(self, r: int) -> set[int]:
        out: set[int] = set()
        for c in range(1, min(r, self.cap) + 1):
            out |= self.reach[c]
        return out

    def witness(self, x_index: int, count: int) -> Sequence:
        """Reconstruct one subsequence of exactly `count` terms summing to x."""
        if not self.reachable(x_index, count):
            raise ValueError(f"state (count={count}, x={x_index}) is not reachable")
        positions = []
        c, x = count, x_index
        while c > 0:
            pos, prev = self.parent[(c, x)]
            positions.append(pos)
            c, x = c - 1, prev
        witness = Sequence.from_items(
            self.group, ((self.terms[p], 1) for p in positions)
        )
        _validate_witness(witness, self.seq, x_index, count)
        return witness


def _validate_witness(witness: Sequence, seq: Sequence, x_index: int, count: int) -> None:
    # independent of the parent links: re-check the three defining properties
    if witness.length != count:
        raise AssertionError("witness length mismatch")
    if witness.sum.index != x_index:
        raise AssertionError("witness sum mismatch")
    if not witness.divides(seq):
        raise AssertionError("witness is not a subsequence")


def bounded_sums(seq: Sequence, r: int) -> set:
    """The set of sums over nonempty subsequences of length at most r."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if seq.length == 0:
        return set()
    table = ReachTable(seq, min(r, seq.length))
    return {seq.group.element_by_index(i) for i in table.sums_with_count_at_most(r)}


def find_short_zero_sum(seq: Sequence) -> Sequence | None:
    """A zero-sum subsequence of length in [1, exp(G)], or None if short free."""
    if seq.length == 0:
        return None
    cap = min(seq.group.exponent, seq.length)
    table = ReachTable(seq, cap)
    for c in range(1, cap + 1):
        if 0 in table.reach[c]:
            return table.witness(0, c)
    return None


def find_zero_sum_exact_length(seq: Sequence, n: int) -> Sequence | None:
    """A zero-sum subsequence of length exactly n, or None.

    The table is capped at n, keeping memory O(order * n).
    """
    if not 1 <= n <= seq.length:
        raise ValueError(f"n must lie in [1, {seq.length}]")
    table = ReachTable(seq, n)
    if 0 in table.reach[n]:
        return table.witness(0, n)
    return None


def find_nonempty_zero_sum(seq: Sequence) -> Sequence | None:
    """A nonempty zero-sum subsequence, or None if seq is zero-sum free."""
    if seq.length == 0:
        return None
    group = seq.group
    group.require_table_capacity()
    terms = seq.term_indices()
    reach: set[int] = set()
    parent: dict[int, tuple[int, int]] = {}  # sum -> (term position, prev sum or -1)
    rows: dict[int, list[int]] = {}
    for pos, g in enumerate(terms):
        row = rows.get(g)
        if row is None:
            row = rows[g] = _add_row(group, g)
        # row is a permutation, so distinct x map to distinct y and the
        # parent assignment is independent of set iteration order.
        fresh = [(row[x], x) for x in reach if row[x] not in reach]
        for y, x in fresh:
            reach.add(y)
            parent[y] = (pos, x)
        if g not in reach:
            reach.add(g)
            parent[g] = (pos, -1)
        if 0 in reach:
            break
    if 0 not in reach:
        return None
    positions = []
    x = 0
    while x != -1:
        pos, prev = parent[x]
        positions.append(pos)
        x = prev
    witness = Sequence.from_items(group, ((terms[p], 1) for p in positions))
    if witness.sum.index != 0 or witness.length == 0 or not witness.divides(seq):
        raise AssertionError("invalid zero-sum witness")
    return witness


def has_zero_sum_with_length_in(seq: Sequence, a: int, b: int) -> bool:
    """True iff some zero-sum subsequence has length in [a, b]."""
    if not 1 <= a <= b:
        raise ValueError("need 1 <= a <= b")
    if seq.length == 0 or a > seq.length:
        return False
    table = ReachTable(seq, min(b, seq.length))
    return any(0 in table.reach[c] for c in range(a, min(b, seq.length) + 1))


def is_short_free(seq: Sequence) -> bool:
    return find_short_zero_sum(seq) is None


def is_zero_sum_free(seq: Sequence) -> bool:
    return find_nonempty_zero_sum(seq) is None
