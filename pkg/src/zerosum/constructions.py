"""Generators for explicit extremal sequences and zero-sum short-free families.

Each family pairs a lazy member generator with the claimed properties of its
members (zero-sum, short-free, realized length window).  verify_family checks
every claim against the DP kernel instead of trusting the construction, so a
transcription or generation bug fails loudly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .group import AbelianGroup, GroupElement, make_group
from .sequence import Sequence
from .subsum import find_short_zero_sum, find_zero_sum_exact_length


@dataclass(frozen=True)
class AlphaR:
    """Residue of -2^(r-1) modulo n, normalized to [0, n-1]."""

    n: int
    r: int
    value: int


def alpha_r(n: int, r: int) -> AlphaR:
    if n < 2 or r < 1:
        raise ValueError("need n >= 2 and r >= 1")
    return AlphaR(n, r, (-(2 ** (r - 1))) % n)


def _cube_group(n: int, r: int) -> AbelianGroup:
    group = make_group([n] * r)
    group.require_table_capacity()
    return group


def _basis_sum(group: AbelianGroup, positions: Iterable[int]) -> GroupElement:
    coords = [0] * group.rank
    for p in positions:
        coords[p] = 1
    return group.element(coords)


def build_span_sequence(n: int, r: int) -> Sequence:
    """All nonzero 0/1-combinations of the basis, each with multiplicity n-1.

    Length (2^r - 1)(n - 1); sum alpha_r * (e_1 + ... + e_r); short free.
    """
    group = _cube_group(n, r)
    items = []
    for mask in range(1, 2**r):
        coords = [(mask >> (r - 1 - i)) & 1 for i in range(r)]
        items.append((group.index_of(coords), n - 1))
    return Sequence.from_items(group, items)


def build_span_merged(n: int, r: int, axis: int, m: int) -> Sequence:
    """Span sequence with m copies of basis vector `axis` (1-based) merged into m*e_axis."""
    if not 1 <= axis <= r:
        raise ValueError(f"axis must lie in [1, {r}]")
    if not 1 <= m <= n - 1:
        raise ValueError(f"m must lie in [1, {n - 1}]")
    seq = build_span_sequence(n, r)
    e = seq.group.basis(axis - 1)
    return seq.remove(Sequence.from_items(seq.group, [(e.index, m)])).concat(
        Sequence.from_terms(seq.group, [m * e])
    )


# -- the two cap tables -------------------------------------------------------

_CAP_RANK3 = (
    (0, 1, 0),
    (0, 0, 1),
    (0, 1, 1),
    (1, 0, 0),
    (1, 2, 0),
    (1, 1, 1),
    (1, 1, 2),
    (2, 0, 1),
)

_CAP_RANK4 = (
    (0, 0, 0, 0),
    (2, 0, 0, 0),
    (0, 2, 0, 0),
    (2, 2, 0, 0),
    (1, 0, 2, 0),
    (0, 1, 2, 0),
    (1, 2, 2, 0),
    (2, 1, 2, 0),
    (1, 1, 1, 0),
    (1, 1, 0, 1),
    (0, 0, 2, 2),
    (2, 0, 2, 2),
    (0, 2, 2, 2),
    (2, 2, 2, 2),
    (1, 0, 0, 2),
    (0, 1, 0, 2),
    (1, 2, 0, 2),
    (2, 1, 0, 2),
    (1, 1, 1, 2),
    (1, 1, 2, 1),
)


def ternary_cap_rank3() -> Sequence:
    """Square-free short-free 8-term sequence over C3^3 (an 8-cap avoiding 0)."""
    group = make_group([3, 3, 3])
    return Sequence.from_terms(group, [group.element(c) for c in _CAP_RANK3])


def ternary_cap_rank4() -> Sequence:
    """Square-free 20-term sequence over C3^4 with no zero-sum of length 3."""
    group = make_group([3, 3, 3, 3])
    return Sequence.from_terms(group, [group.element(c) for c in _CAP_RANK4])


_RANK4_TRIMS = {
    2: ((2, 2, 2, 2), (2, 2, 2, 2)),
    3: ((2, 2, 0, 0), (0, 0, 2, 2), (2, 2, 2, 2)),
    4: ((2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 2, 2), (2, 2, 2, 2)),
    5: ((2, 0, 0, 0), (2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 2, 2), (0, 2, 2, 2)),
    6: ((0, 2, 0, 0), (2, 2, 2, 2), (2, 2, 2, 2), (0, 1, 0, 2), (1, 2, 0, 2), (2, 1, 0, 2)),
    7: (
        (2, 0, 0, 0),
        (0, 2, 0, 0),
        (1, 0, 2, 0),
        (0, 1, 2, 0),
        (1, 2, 2, 0),
        (0, 0, 2, 2),
        (0, 2, 2, 2),
    ),
    8: (
        (2, 0, 0, 0),
        (0, 2, 0, 0),
        (0, 2, 0, 0),
        (1, 0, 2, 0),
        (0, 1, 2, 0),
        (1, 2, 2, 0),
        (0, 0, 2, 2),
        (0, 0, 2, 2),
    ),
}


def excluded_window_witnesses() -> list[tuple[int, Sequence]]:
    """Zero-sum short-free sequences over C3^4 of every length in [30, 36].

    Built by doubling the 20-term cap, dropping the two zero terms, and
    trimming one of seven fixed blocks whose sizes run from 2 to 8.
    """
    cap = ternary_cap_rank4()
    group = cap.group
    base = cap.power(2).remove(Sequence.from_items(group, [(0, 2)]))
    out = []
    for i in sorted(_RANK4_TRIMS):
        trim = Sequence.from_terms(group, [group.element(c) for c in _RANK4_TRIMS[i]])
        out.append((base.length - i, base.remove(trim)))
    return out


# -- families -------------------------------------------------------------------


@dataclass
class FamilySpec:
    """A named family of zero-sum short-free sequences with a claimed length window."""

    name: str
    group: AbelianGroup
    parameters: dict[str, int]
    member_factory: Callable[[], Iterator[Sequence]] = field(repr=False)
    claimed_lengths: tuple[int, int] | None = None  # inclusive window, None for lift

    def members(self) -> Iterator[Sequence]:
        return self.member_factory()

    def realized_lengths(self) -> set[int]:
        return {s.length for s in self.members()}


def _zero_block_members(n: int, group: AbelianGroup) -> Iterator[Sequence]:
    e1, e2 = group.basis(0), group.basis(1)
    e12 = e1 + e2
    for c in range(1, n):
        yield Sequence.from_items(
            group, [(e1.index, n - c), (e2.index, n - c), (e12.index, c)]
        )


def _slide_members(n: int, group: AbelianGroup) -> Iterator[Sequence]:
    e1, e2, e3 = group.basis(0), group.basis(1), group.basis(2)
    for m in range(1, n):
        yield Sequence.from_items(
            group,
            [
                ((e1 + e3).index, n - m),
                (e1.index, m - 1),
                (e2.index, n - 1),
                ((e1 + e2).index, 1),
                (e3.index, m),
            ],
        )


def _pivot_members(n: int, group: AbelianGroup) -> Iterator[Sequence]:
    e1, e2, e3 = group.basis(0), group.basis(1), group.basis(2)
    yield Sequence.from_items(
        group,
        [
            ((e1 + e2).index, 2),
            ((e1 + e3).index, n - 1),
            (e1.index, n - 1),
            (e2.index, n - 2),
            (e3.index, 1),
        ],
    )


def _braid_members(n: int, group: AbelianGroup) -> Iterator[Sequence]:
    e1, e2, e3 = group.basis(0), group.basis(1), group.basis(2)
    for m in range(2, n):
        yield Sequence.from_items(
            group,
            [
                ((e1 + e2 + e3).index, 1),
                ((e1 + e2).index, n - 1),
                ((e1 + e3).index, n - m),
                ((e2 + e3).index, 1),
                (e1.index, m),
                (e2.index, n - 1),
                (e3.index, m - 2),
            ],
        )


def _carve_block_members(n: int, r: int, group: AbelianGroup) -> Iterator[Sequence]:
    span = build_span_sequence(n, r)
    alpha = alpha_r(n, r).value
    all_ones = _basis_sum(group, range(r))
    e1, e2, e3 = group.basis(0), group.basis(1), group.basis(2)
    e12 = e1 + e2
    for c in range(1, n):
        for m in range(1, n):
            removal = Sequence.from_items(
                group,
                [
                    (all_ones.index, alpha),
                    (e1.index, n - c),
                    (e2.index, n - c),
                    (e12.index, c),
                    (e3.index, m),
                ],
            )
            yield span.remove(removal).concat(Sequence.from_terms(group, [m * e3]))


def _carve_axes_members(n: int, r: int, group: AbelianGroup) -> Iterator[Sequence]:
    span = build_span_sequence(n, r)
    alpha = alpha_r(n, r).value
    e1 = group.basis(0)
    diag = [( (group.basis(0) + group.basis(1)).index, alpha)]
    diag += [(group.basis(i).index, alpha) for i in range(2, r)]
    for m in range(1, n):
        removal = Sequence.from_items(group, diag + [(e1.index, m)])
        yield span.remove(removal).concat(Sequence.from_terms(group, [m * e1]))


def _carve_axes_extra_members(n: int, r: int, group: AbelianGroup) -> Iterator[Sequence]:
    span = build_span_sequence(n, r)
    alpha = alpha_r(n, r).value
    e1, e3 = group.basis(0), group.basis(2)
    items = [((group.basis(0) + group.basis(1)).index, alpha)]
    items.append(((e1 + e3).index, 1))
    items.append((e3.index, alpha - 1))
    items += [(group.basis(i).index, alpha) for i in range(3, r)]
    items.append((e1.index, n - 1))
    yield span.remove(Sequence.from_items(group, items))


def _carve_mixed_members(n: int, r: int, group: AbelianGroup) -> Iterator[Sequence]:
    span = build_span_sequence(n, r)
    alpha = alpha_r(n, r).value
    all_ones = _basis_sum(group, range(r))
    for k2 in range(0, alpha):
        k1 = alpha - 1 - k2
        for k3 in range(1, r + 1):
            items = [(all_ones.index, k1)]
            items += [(group.basis(i).index, k2) for i in range(r)]
            items.append((_basis_sum(group, range(k3)).index, 1))
            items += [(group.basis(i).index, 1) for i in range(k3, r)]
            yield span.remove(Sequence.from_items(group, items))


def _lift_members(n: int, r: int, group: AbelianGroup) -> Iterator[Sequence]:
    swatch = length_swatch(n, r - 1)
    er = group.basis(r - 1)

    def embed(seq: Sequence) -> Sequence:
        return Sequence.from_items(
            group,
            (
                (group.index_of(seq.group.coords_of(idx) + (0,)), v)
                for idx, v in seq.items
            ),
        )

    for a in sorted(swatch):
        w1 = embed(swatch[a])
        ell = (-a) % n
        shifted = w1.translate(er)
        tail = shifted.concat(Sequence.from_items(group, [(er.index, ell)]))
        for b in sorted(swatch):
            yield embed(swatch[b]).concat(tail)


_FAMILY_ORDER = (
    "zero-block",
    "slide",
    "pivot",
    "braid",
    "span-carve-block",
    "span-carve-axes",
    "span-carve-axes-x",
    "span-carve-mixed",
    "lift",
)


def build_family(name: str, n: int, r: int) -> FamilySpec:
    """Instantiate a named family over C_n^r, refusing out-of-context parameters."""
    alpha = alpha_r(n, r).value
    span_len = (2**r - 1) * (n - 1)
    params = {"n": n, "r": r}

    def spec(factory, lo, hi, min_n=3, min_r=3, need_alpha=False):
        if n < min_n:
            raise ValueError(f"family {name!r} requires n >= {min_n}")
        if r < min_r:
            raise ValueError(f"family {name!r} requires r >= {min_r}")
        if need_alpha and alpha == 0:
            raise ValueError(f"family {name!r} requires alpha_r(n, r) != 0")
        group = _cube_group(n, r)
        return FamilySpec(name, group, params, lambda: factory(group), (lo, hi))

    if name == "zero-block":
        if n < 2 or r < 2:
            raise ValueError("zero-block requires n >= 2 and r >= 2")
        group = _cube_group(n, r)
        return FamilySpec(
            name, group, params, lambda: _zero_block_members(n, group), (n + 1, 2 * n - 1)
        )
    if name == "slide":
        return spec(lambda g: _slide_members(n, g), 2 * n, 3 * n - 2)
    if name == "pivot":
        return spec(lambda g: _pivot_members(n, g), 3 * n - 1, 3 * n - 1)
    if name == "braid":
        return spec(lambda g: _braid_members(n, g), 3 * n, 4 * n - 3)
    if name == "span-carve-block":
        return spec(
            lambda g: _carve_block_members(n, r, g),
            span_len - (3 * n - 3) - alpha,
            span_len - (n + 1) - alpha,
        )
    if name == "span-carve-axes":
        return spec(
            lambda g: _carve_axes_members(n, r, g),
            span_len - (r - 1) * alpha - n + 2,
            span_len - (r - 1) * alpha,
            need_alpha=True,
        )
    if name == "span-carve-axes-x":
        return spec(
            lambda g: _carve_axes_extra_members(n, r, g),
            span_len - (r - 1) * alpha - n + 1,
            span_len - (r - 1) * alpha - n + 1,
            need_alpha=True,
        )
    if name == "span-carve-mixed":
        return spec(
            lambda g: _carve_mixed_members(n, r, g),
            span_len - r * alpha,
            span_len - alpha,
            need_alpha=True,
        )
    if name == "lift":
        if r < 4:
            raise ValueError("lift requires r >= 4")
        group = _cube_group(n, r)
        return FamilySpec(name, group, params, lambda: _lift_members(n, r, group), None)
    raise ValueError(f"unknown family {name!r}; known: {', '.join(_FAMILY_ORDER)}")


def verify_family(spec: FamilySpec, *, sample_stride: int = 1) -> set[int]:
    """Check every claimed property of the family's members; returns realized lengths.

    Raises AssertionError on any violation.  sample_stride > 1 verifies every
    k-th member (deterministic), for large parameterizations.
    """
    lengths: set[int] = set()
    for pos, member in enumerate(spec.members()):
        lengths.add(member.length)
        if sample_stride > 1 and pos % sample_stride:
            continue
        if not member.is_zero_sum():
            raise AssertionError(f"{spec.name} member {member!r} is not zero-sum")
        bad = find_short_zero_sum(member)
        if bad is not None:
            raise AssertionError(
                f"{spec.name} member of length {member.length} has short zero-sum {bad!r}"
            )
    if spec.claimed_lengths is not None:
        lo, hi = spec.claimed_lengths
        if lengths != set(range(lo, hi + 1)):
            raise AssertionError(
                f"{spec.name} realized lengths {sorted(lengths)} != claimed [{lo}, {hi}]"
            )
    return lengths


def length_swatch(n: int, r: int) -> dict[int, Sequence]:
    """One zero-sum short-free sequence per realized length, from all applicable families."""
    out: dict[int, Sequence] = {}
    for name in _FAMILY_ORDER:
        try:
            fam = build_family(name, n, r)
        except ValueError:
            continue
        for member in fam.members():
            out.setdefault(member.length, member)
    span = build_span_sequence(n, r)
    if span.is_zero_sum():
        out.setdefault(span.length, span)
    return out


def known_witnesses(group: AbelianGroup, t: int) -> Iterator[Sequence]:
    """Construction-derived candidates for a zero-sum short-free sequence of length t.

    Candidates are generated cheaply and must be re-validated by the caller.
    """
    if len(set(group.moduli)) != 1:
        return
    n, r = group.moduli[0], group.rank
    if (n, r) == (3, 3) and t == 16:
        yield ternary_cap_rank3().power(2)
    if (n, r) == (3, 4):
        for length, w in excluded_window_witnesses():
            if length == t:
                yield w
    if r >= 2:
        for name in _FAMILY_ORDER:
            try:
                fam = build_family(name, n, r)
            except ValueError:
                continue
            lo_hi = fam.claimed_lengths
            if lo_hi is not None and not lo_hi[0] <= t <= lo_hi[1]:
                continue
            for member in fam.members():
                if member.length == t:
                    yield member
        span = build_span_sequence(n, r)
        if span.length == t and span.is_zero_sum():
            yield span


def verify_rank4_cap_claims() -> None:
    """Re-check the transcribed cap tables against their stated properties."""
    cap3 = ternary_cap_rank3()
    assert cap3.length == 8 and cap3.is_squarefree()
    assert find_short_zero_sum(cap3) is None
    cap4 = ternary_cap_rank4()
    assert cap4.length == 20 and cap4.is_squarefree()
    assert find_zero_sum_exact_length(cap4, 3) is None
