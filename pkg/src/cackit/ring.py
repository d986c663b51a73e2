"""Arithmetic substrate for conflict-avoiding codes.

Everything in this module lives in the ring of residues Z_L: difference
sets, sumsets, stabilizer subgroups, the Kneser sumset inequality,
exceptionality predicates, Legendre symbols, quadratic residues, p-ary
layer decompositions of prime-power rings, and CRT coordinates.

All values are immutable and all operations are pure functions on exact
integers, so results are bit-reproducible and safe to share across
parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod
from typing import Iterable, Iterator, Mapping, Sequence


# ---------------------------------------------------------------------------
# Elementary number theory (trial division is plenty at workbench scale).


def is_prime(n: int) -> bool:
    """True iff n is a prime number."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factorization(n: int) -> dict[int, int]:
    """Map prime -> exponent for n >= 1 (empty dict for n = 1)."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    out = [1]
    for p, e in prime_factorization(n).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def tau(n: int) -> int:
    """Number of positive divisors of n."""
    return prod(e + 1 for e in prime_factorization(n).values())


def smallest_prime_factor(n: int) -> int | None:
    """Smallest prime factor of n, or None when n == 1."""
    facs = prime_factorization(n)
    return min(facs) if facs else None


# ---------------------------------------------------------------------------
# Residue sets.


@dataclass(frozen=True)
class ResidueSet:
    """A finite subset of Z_L, stored as a sorted tuple of residues."""

    modulus: int
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        prev = -1
        for e in self.elements:
            if not 0 <= e < self.modulus:
                raise ValueError(f"element {e} out of range [0, {self.modulus})")
            if e <= prev:
                raise ValueError("elements must be strictly increasing")
            prev = e

    @classmethod
    def of(cls, modulus: int, elements: Iterable[int]) -> "ResidueSet":
        """Build a set from arbitrary integers, reducing mod the modulus."""
        return cls(modulus, tuple(sorted({e % modulus for e in elements})))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, x: int) -> bool:
        return x % self.modulus in set(self.elements)

    def translate(self, x: int) -> "ResidueSet":
        return ResidueSet.of(self.modulus, ((e + x) for e in self.elements))

    def negate(self) -> "ResidueSet":
        return ResidueSet.of(self.modulus, ((-e) for e in self.elements))

    def union(self, other: "ResidueSet") -> "ResidueSet":
        _same_modulus(self, other)
        return ResidueSet.of(self.modulus, self.elements + other.elements)


def _same_modulus(a: ResidueSet, b: ResidueSet) -> None:
    if a.modulus != b.modulus:
        raise ValueError(f"modulus mismatch: {a.modulus} != {b.modulus}")


def diff_set(s: ResidueSet) -> ResidueSet:
    """Set of nonzero differences {a - b mod L : a, b in S, a != b}."""
    L = s.modulus
    els = s.elements
    return ResidueSet.of(L, ((a - b) % L for a in els for b in els if a != b))


def signed_diff(a: ResidueSet, b: ResidueSet) -> ResidueSet:
    """Full difference set A - B = {x - y mod L}; contains 0 iff A and B meet."""
    _same_modulus(a, b)
    L = a.modulus
    return ResidueSet.of(L, ((x - y) % L for x in a.elements for y in b.elements))


def sumset(a: ResidueSet, b: ResidueSet) -> ResidueSet:
    """A + B = {x + y mod L}."""
    _same_modulus(a, b)
    L = a.modulus
    return ResidueSet.of(L, ((x + y) % L for x in a.elements for y in b.elements))


# ---------------------------------------------------------------------------
# Subgroups and stabilizers.


@dataclass(frozen=True)
class SubgroupDescriptor:
    """The unique subgroup of Z_L of a given order d | L: multiples of L/d."""

    modulus: int
    order: int
    elements: tuple[int, ...]

    def as_residue_set(self) -> ResidueSet:
        return ResidueSet(self.modulus, self.elements)


def subgroup_of_order(d: int, modulus: int) -> SubgroupDescriptor:
    """The subgroup {0, L/d, 2L/d, ...} of order d; requires d | L."""
    if d < 1 or modulus % d != 0:
        raise ValueError(f"{d} does not divide {modulus}")
    step = modulus // d
    return SubgroupDescriptor(modulus, d, tuple(range(0, modulus, step)))


def stabilizer(t: ResidueSet) -> SubgroupDescriptor:
    """The stabilizer H(T) = {h : h + T = T}, always a subgroup of Z_L.

    Since every subgroup of Z_L is the unique one of its order, it suffices
    to test the cyclic generator L/d of each candidate order d, largest
    first; the first order whose generator fixes T is |H(T)|.
    """
    if len(t) == 0:
        raise ValueError("stabilizer of the empty set is undefined")
    L = t.modulus
    members = frozenset(t.elements)
    for d in reversed(divisors(L)):
        g = L // d
        if all((e + g) % L in members for e in t.elements):
            return subgroup_of_order(d, L)
    return subgroup_of_order(1, L)  # unreachable: d = 1 always passes


@dataclass(frozen=True)
class KneserReport:
    """Outcome of checking the Kneser sumset inequality on one pair (A, B).

    lhs is |A+B|; H is the stabilizer of A+B; strong_rhs is
    |A+H| + |B+H| - |H| and weak_rhs is |A| + |B| - |H|.  Both verdicts
    must hold for every input, so this operation doubles as a self-test.
    """

    stabilizer: SubgroupDescriptor
    lhs: int
    strong_rhs: int
    weak_rhs: int
    strong_holds: bool
    weak_holds: bool


def kneser_check(a: ResidueSet, b: ResidueSet) -> KneserReport:
    """Evaluate both forms of the Kneser inequality for |A + B|."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("Kneser check requires non-empty sets")
    _same_modulus(a, b)
    c = sumset(a, b)
    h = stabilizer(c)
    hs = h.as_residue_set()
    strong = len(sumset(a, hs)) + len(sumset(b, hs)) - h.order
    weak = len(a) + len(b) - h.order
    return KneserReport(h, len(c), strong, weak, len(c) >= strong, len(c) >= weak)


# ---------------------------------------------------------------------------
# Exceptionality predicates.


def is_exceptional_set(a: ResidueSet) -> bool:
    """True iff |A - A| <= 2|A| - 2, i.e. A has fewer differences than generic."""
    if len(a) == 0:
        raise ValueError("exceptionality of the empty set is undefined")
    return len(signed_diff(a, a)) <= 2 * len(a) - 2


def is_exceptional_pair(a: ResidueSet, b: ResidueSet) -> bool:
    """True iff |A - B| <= |A| + |B| - 2."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("exceptionality requires non-empty sets")
    _same_modulus(a, b)
    return len(signed_diff(a, b)) <= len(a) + len(b) - 2


@dataclass(frozen=True)
class ExceptionalityReport:
    """Verdict for a multichannel pattern, with the first offending witness.

    witness is a channel index when a single per-channel slot set is
    exceptional, a pair (i, j) when a cross-channel pair is, scanning
    single channels in ascending order before pairs in lexicographic order.
    """

    exceptional: bool
    witness: int | tuple[int, int] | None


def is_exceptional_pattern(pattern) -> ExceptionalityReport:
    """Check a multichannel codeword for exceptional slot sets or pairs.

    `pattern` is anything exposing slot_sets() -> {channel: ResidueSet}
    over the non-empty channels (see cackit.multi.MultiCodeword).
    """
    sets: Mapping[int, ResidueSet] = pattern.slot_sets()
    channels = sorted(sets)
    for i in channels:
        if is_exceptional_set(sets[i]):
            return ExceptionalityReport(True, i)
    for x, i in enumerate(channels):
        for j in channels[x + 1 :]:
            if is_exceptional_pair(sets[i], sets[j]):
                return ExceptionalityReport(True, (i, j))
    return ExceptionalityReport(False, None)


# ---------------------------------------------------------------------------
# Quadratic residues.


def _require_odd_prime(p: int) -> None:
    if p == 2 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) in {-1, 0, +1}, by Euler's criterion."""
    _require_odd_prime(p)
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return -1 if r == p - 1 else 1


def quadratic_residues(p: int) -> ResidueSet:
    """The (p-1)/2 nonzero squares modulo an odd prime p."""
    _require_odd_prime(p)
    return ResidueSet.of(p, (x * x % p for x in range(1, p)))


# ---------------------------------------------------------------------------
# p-ary layers of Z*_{p^r}.


@dataclass(frozen=True)
class LayerView:
    """Layer structure of Z*_{p^r} by least significant nonzero p-ary digit.

    Layer t collects the c with p^t | c and p^(t+1) does not divide c; its
    digit is the coefficient of p^t.  The layers partition Z*_{p^r}, layer t
    holding (p-1) * p^(r-t-1) elements.
    """

    prime: int
    exponent: int

    def __post_init__(self) -> None:
        if not is_prime(self.prime):
            raise ValueError(f"{self.prime} is not prime")
        if self.exponent < 1:
            raise ValueError("exponent must be >= 1")

    @property
    def modulus(self) -> int:
        return self.prime**self.exponent


def layer_of(c: int, view: LayerView) -> tuple[int, int]:
    """Return (layer index t, digit c_t) for c in Z*_{p^r}."""
    if not 1 <= c < view.modulus:
        raise ValueError(f"{c} is not a nonzero residue mod {view.modulus}")
    t = 0
    while c % view.prime == 0:
        c //= view.prime
        t += 1
    return t, c % view.prime


def lift_layers(digits: Iterable[int], p: int, r: int) -> ResidueSet:
    """Spread a digit set A in Z*_p across every layer of Z*_{p^r}.

    Returns the set of all c in Z*_{p^r} whose least significant nonzero
    digit lies in A; its size is |A| * (p^r - 1) / (p - 1).
    """
    view = LayerView(p, r)
    a = sorted(set(digits))
    if not a:
        raise ValueError("digit set must be non-empty")
    if any(not 1 <= d <= p - 1 for d in a):
        raise ValueError(f"digits must lie in 1..{p - 1}")
    out = []
    for t in range(r):
        base = p**t
        for m in range(p ** (r - 1 - t)):
            for d in a:
                out.append(base * (d + p * m))
    return ResidueSet.of(view.modulus, out)


# ---------------------------------------------------------------------------
# CRT coordinates.


def crt_combine(components: Sequence[tuple[int, int]]) -> int:
    """Solve x = r_i (mod m_i) for pairwise coprime moduli; returns x mod prod.

    Components with modulus 1 are allowed and contribute nothing.
    """
    x, m = 0, 1
    for r, mm in components:
        if mm < 1:
            raise ValueError(f"modulus {mm} must be positive")
        if mm == 1:
            continue
        if gcd(m, mm) != 1:
            raise ValueError("moduli are not pairwise coprime")
        inv = pow(m % mm, -1, mm)
        x = x + m * ((r - x) * inv % mm)
        m *= mm
    return x % m


@dataclass(frozen=True)
class CrtSystem:
    """Coordinates Z_L = Z_c x Z_{p1^r1} x ... x Z_{pn^rn}, cofactor first.

    The cofactor component is present only when c > 1; primes are strictly
    ascending and coprime to the cofactor.
    """

    cofactor: int
    prime_powers: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.cofactor < 1:
            raise ValueError("cofactor must be >= 1")
        prev = 1
        for p, r in self.prime_powers:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            if p <= prev:
                raise ValueError("primes must be strictly increasing")
            if r < 1:
                raise ValueError("exponents must be >= 1")
            prev = p
        rest = prod(p**r for p, r in self.prime_powers)
        if self.cofactor > 1 and gcd(self.cofactor, rest) != 1:
            raise ValueError("cofactor must be coprime to the prime part")

    @property
    def component_moduli(self) -> tuple[int, ...]:
        head = (self.cofactor,) if self.cofactor > 1 else ()
        return head + tuple(p**r for p, r in self.prime_powers)

    @property
    def modulus(self) -> int:
        return self.cofactor * prod(p**r for p, r in self.prime_powers)


def crt_encode(coords: Sequence[int], system: CrtSystem) -> int:
    """Inverse of crt_decode: coordinates -> element of Z_L."""
    mods = system.component_moduli
    if len(coords) != len(mods):
        raise ValueError(f"expected {len(mods)} coordinates, got {len(coords)}")
    for c, m in zip(coords, mods):
        if not 0 <= c < m:
            raise ValueError(f"coordinate {c} out of range [0, {m})")
    return crt_combine(list(zip(coords, mods)))


def crt_decode(x: int, system: CrtSystem) -> tuple[int, ...]:
    """Element of Z_L -> coordinate tuple, cofactor component first."""
    L = system.modulus
    if not 0 <= x < L:
        raise ValueError(f"{x} out of range [0, {L})")
    return tuple(x % m for m in system.component_moduli)
