"""Multichannel conflict-avoiding codes.

Codewords are w-subsets of {1..M} x Z_L (channel, slot).  Each codeword
carries an M x M array of difference sets: diagonal entries hold the
nonzero within-channel differences, off-diagonal entries the full
cross-channel differences including 0.  A code is conflict-avoiding when
these arrays are pairwise entry-wise disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Collection, Iterable, Sequence

from .ring import ResidueSet, crt_combine, prime_factorization
from .single import (
    ConstructionError,
    SingleCode,
    qr_generator_set,
    unit_lift_generator_set,
    verify_cac,
)


@dataclass(frozen=True)
class MultiCodeword:
    """A transmission pattern: distinct (channel, slot) cells, channels 1-based."""

    channels: int
    modulus: int
    cells: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.channels < 1:
            raise ValueError("need at least one channel")
        seen = set()
        for ch, slot in self.cells:
            if not 1 <= ch <= self.channels:
                raise ValueError(f"channel {ch} out of range 1..{self.channels}")
            if not 0 <= slot < self.modulus:
                raise ValueError(f"slot {slot} out of range [0, {self.modulus})")
            if (ch, slot) in seen:
                raise ValueError(f"duplicate cell {(ch, slot)}")
            seen.add((ch, slot))
        if tuple(sorted(self.cells)) != self.cells:
            raise ValueError("cells must be sorted")
        if not self.cells:
            raise ValueError("codeword must be non-empty")

    @classmethod
    def of(cls, channels: int, modulus: int, cells: Iterable[tuple[int, int]]) -> "MultiCodeword":
        return cls(channels, modulus, tuple(sorted((ch, s % modulus) for ch, s in cells)))

    @property
    def weight(self) -> int:
        return len(self.cells)

    def slot_sets(self) -> dict[int, ResidueSet]:
        """Per-channel slot sets, non-empty channels only."""
        by: dict[int, list[int]] = {}
        for ch, slot in self.cells:
            by.setdefault(ch, []).append(slot)
        return {ch: ResidueSet.of(self.modulus, slots) for ch, slots in by.items()}

    @property
    def occupied_channels(self) -> int:
        return len({ch for ch, _ in self.cells})

    def shift(self, delta: int) -> "MultiCodeword":
        """Cyclically shift every cell's slot; difference arrays are invariant."""
        return MultiCodeword.of(
            self.channels, self.modulus, ((ch, s + delta) for ch, s in self.cells)
        )


@dataclass(frozen=True)
class DifferenceArray:
    """M x M grid of difference sets for one codeword."""

    channels: int
    modulus: int
    entries: tuple[tuple[ResidueSet, ...], ...]

    def entry(self, i: int, j: int) -> ResidueSet:
        return self.entries[i - 1][j - 1]


def difference_array(cw: MultiCodeword) -> DifferenceArray:
    """Compute D(i,j) = S_i - S_j, dropping 0 on the diagonal only."""
    L = cw.modulus
    sets = cw.slot_sets()
    rows = []
    for i in range(1, cw.channels + 1):
        row = []
        for j in range(1, cw.channels + 1):
            si = sets.get(i)
            sj = sets.get(j)
            if si is None or sj is None:
                row.append(ResidueSet(L, ()))
                continue
            vals = {(a - b) % L for a in si.elements for b in sj.elements}
            if i == j:
                vals.discard(0)
            row.append(ResidueSet.of(L, vals))
        rows.append(tuple(row))
    return DifferenceArray(cw.channels, L, tuple(rows))


@dataclass
class MultiCode:
    """A family of multichannel codewords plus metadata."""

    channels: int
    modulus: int
    weights: tuple[int, ...]
    codewords: list[MultiCodeword]
    provenance: dict = field(default_factory=dict)
    am_oppts: bool = False

    def __post_init__(self) -> None:
        for cw in self.codewords:
            if cw.channels != self.channels or cw.modulus != self.modulus:
                raise ValueError("codeword shape mismatch")
            if cw.weight not in self.weights:
                raise ValueError(f"codeword weight {cw.weight} not in {self.weights}")

    def __len__(self) -> int:
        return len(self.codewords)


@dataclass(frozen=True)
class MultiConflict:
    """First conflict in lexicographic (pair, entry, residue) order."""

    first: int
    second: int
    entry: tuple[int, int]
    residue: int


@dataclass(frozen=True)
class MultiVerificationReport:
    ok: bool
    conflict: MultiConflict | None = None


def verify_mccac(code: MultiCode) -> MultiVerificationReport:
    """Check pairwise entry-wise disjointness of the difference arrays."""
    arrays = [difference_array(cw) for cw in code.codewords]
    M = code.channels
    n = len(arrays)
    for x in range(n):
        for y in range(x + 1, n):
            for i in range(1, M + 1):
                for j in range(1, M + 1):
                    shared = set(arrays[x].entry(i, j).elements) & set(
                        arrays[y].entry(i, j).elements
                    )
                    if shared:
                        return MultiVerificationReport(
                            False, MultiConflict(x, y, (i, j), min(shared))
                        )
    return MultiVerificationReport(True, None)


def verify_amoppts(code: MultiCode) -> bool:
    """True iff every codeword transmits in each time slot on at most one channel."""
    if code.modulus < max(code.weights):
        raise ValueError("at-most-one-packet-per-slot needs L >= max weight")
    for cw in code.codewords:
        slots = [s for _, s in cw.cells]
        if len(set(slots)) != len(slots):
            return False
    return True


def verify_mixed_weight_mccac(code: MultiCode, weight_set: Collection[int]) -> bool:
    """True iff all codeword weights lie in the given set and the code verifies."""
    allowed = set(weight_set)
    if any(cw.weight not in allowed for cw in code.codewords):
        return False
    return verify_mccac(code).ok


def embed_single(code: SingleCode, channel: int, channels: int) -> MultiCode:
    """Place a single-channel code onto one channel of an M-channel system."""
    if not 1 <= channel <= channels:
        raise ValueError(f"channel {channel} out of range 1..{channels}")
    cws = [
        MultiCodeword.of(channels, code.modulus, ((channel, a) for a in cw.elements))
        for cw in code.codewords
    ]
    return MultiCode(
        channels,
        code.modulus,
        code.weights,
        cws,
        provenance={"embedded": {"channel": channel, "from": dict(code.provenance)}},
    )


# ---------------------------------------------------------------------------
# Constructions.


def construct_two_channel(
    w: int,
    prime_powers: Sequence[tuple[int, int]],
    base_generators: Sequence[Collection[int]],
    am_oppts: bool = False,
) -> MultiCode:
    """Two-channel code of length (w-1) * L' built from three codeword classes.

    Class one pairs each quadratic-residue generator g with the codewords
    that put the negated generator on one channel and the first w-1
    multiples on the other; class two embeds the lifted base code on each
    channel separately; class three is a single codeword whose differences
    are exactly the multiples of L'.  With am_oppts=True the class-three
    codeword (the only one reusing a time slot) is omitted.

    Note: the published display of the class-one codewords puts (1, -g)
    rather than -(1, g) on the lone channel; that variant contradicts the
    accompanying difference arrays and fails verification, so the arrays
    win here.
    """
    if w < 2:
        raise ValueError("weight must be >= 2")
    qhat = qr_generator_set(w, prime_powers)
    ghat = unit_lift_generator_set(prime_powers, base_generators, [w] * len(prime_powers))
    lp = prod(p**r for p, r in prime_powers)
    L = (w - 1) * lp
    cws: list[MultiCodeword] = []
    for a in qhat:
        g = crt_combine([(1 % (w - 1), w - 1), (a, lp)])
        neg = (-g) % L
        multiples = [(j * g) % L for j in range(w - 1)]
        cws.append(MultiCodeword.of(2, L, [(1, neg)] + [(2, s) for s in multiples]))
        cws.append(MultiCodeword.of(2, L, [(1, s) for s in multiples] + [(2, neg)]))
    for a, _ in ghat:
        h = crt_combine([(0, w - 1), (a, lp)])
        for ch in (1, 2):
            cws.append(MultiCodeword.of(2, L, [(ch, (j * h) % L) for j in range(w)]))
    if not am_oppts:
        tail = [(1, crt_combine([(j % (w - 1), w - 1), (0, lp)])) for j in range(w - 1)]
        cws.append(MultiCodeword.of(2, L, tail + [(2, 0)]))
    code = MultiCode(
        2,
        L,
        (w,),
        cws,
        provenance={
            "construction": "two-channel",
            "w": w,
            "prime_powers": [list(pr) for pr in prime_powers],
            "base_generators": [sorted(set(g)) for g in base_generators],
            "am_oppts": am_oppts,
        },
        am_oppts=am_oppts,
    )
    expected = lp + 2 * len(ghat) - (1 if am_oppts else 0)
    assert len(code) == expected
    report = verify_mccac(code)
    if not report.ok:
        raise ConstructionError(f"constructed code failed verification: {report.conflict}")
    if am_oppts and not verify_amoppts(code):
        raise ConstructionError("am-oppts variant reuses a time slot")
    return code


def construct_m_channel(
    channels: int, w: int, lprime: int, base_code: SingleCode
) -> MultiCode:
    """M-channel code of length (2w/M - 1) * L' for M >= 3 dividing w.

    Class one embeds each base codeword on every channel in the coordinates
    that vanish mod 2w/M - 1; class two runs, for each g in Z_{L'}, the
    multiples of the element congruent to (1, g) in blocks of w/M
    consecutive multiples per channel.

    The class-two codeword for g = 0 confines its slots to the (2w/M - 1)
    multiples of L', so it necessarily reuses time slots across channels:
    the constructed code verifies as a multichannel code but is not
    at-most-one-packet-per-slot.
    """
    M = channels
    if not (w > M >= 3):
        raise ConstructionError(f"need w > M >= 3, got M={M}, w={w}")
    if w % M != 0:
        raise ConstructionError(f"{M} does not divide w={w}")
    t = w // M
    if base_code.modulus != lprime:
        raise ConstructionError("base code modulus must equal L'")
    if base_code.weights != (w,):
        raise ConstructionError(f"base code weight set {base_code.weights} != ({w},)")
    for p in prime_factorization(lprime):
        if p < 2 * w - 1:
            raise ConstructionError(f"prime factor {p} of L'={lprime} is below 2w-1")
    if (lprime - 1) % (2 * w - 2) != 0 or len(base_code) != (lprime - 1) // (2 * w - 2):
        raise ConstructionError(
            f"base code must have (L'-1)/(2w-2) codewords, got {len(base_code)} "
            f"for L'={lprime}, w={w}"
        )
    if not verify_cac(base_code).ok:
        raise ConstructionError("base code does not verify")
    L = (2 * t - 1) * lprime
    cws: list[MultiCodeword] = []
    for cw in base_code.codewords:
        for m in range(1, M + 1):
            cells = [(m, crt_combine([(0, 2 * t - 1), (a, lprime)])) for a in cw.elements]
            cws.append(MultiCodeword.of(M, L, cells))
    for g in range(lprime):
        a = crt_combine([(1 % (2 * t - 1), 2 * t - 1), (g, lprime)])
        cells = [
            (m, (k * a) % L)
            for m in range(1, M + 1)
            for k in range((m - 1) * t, m * t)
        ]
        cws.append(MultiCodeword.of(M, L, cells))
    code = MultiCode(
        M,
        L,
        (w,),
        cws,
        provenance={
            "construction": "m-channel",
            "M": M,
            "w": w,
            "lprime": lprime,
            "base": dict(base_code.provenance),
        },
    )
    assert len(code) == M * (lprime - 1) // (2 * w - 2) + lprime
    report = verify_mccac(code)
    if not report.ok:
        raise ConstructionError(f"constructed code failed verification: {report.conflict}")
    return code
