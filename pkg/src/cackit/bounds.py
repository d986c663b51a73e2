"""Closed-form upper bounds and optimality certification.

Every bound is computed in exact rational arithmetic (fractions.Fraction);
the integer bound is the exact floor.  Number-theoretic applicability
conditions (all prime factors of the length at least 2w-1) are reported as
data rather than raised, so parameter sweeps can tabulate where each bound
applies.  Structurally impossible parameters (e.g. M >= w where M < w is
required) raise ValueError.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd

from .ring import prime_factorization, tau
from .single import (
    SingleCode,
    optimality_condition_w1,
    qr_conditions,
    verify_cac,
)
from .multi import MultiCode, verify_amoppts, verify_mccac


@dataclass(frozen=True)
class BoundReport:
    """One bound evaluated at one parameter point."""

    name: str
    params: dict
    applicable: bool
    note: str | None = None
    raw_value: Fraction | None = None
    int_bound: int | None = None

    def __post_init__(self) -> None:
        if self.applicable:
            assert self.raw_value is not None
            assert self.int_bound == floor(self.raw_value)
        else:
            assert self.int_bound is None


def _length_condition(L: int, w: int) -> str | None:
    """None if every prime factor of L is >= 2w-1, else a failure note."""
    for p in prime_factorization(L):
        if p < 2 * w - 1:
            return f"prime factor {p} of L={L} is below 2w-1 = {2 * w - 1}"
    return None


def _report(name: str, params: dict, note: str | None, value: Fraction | None) -> BoundReport:
    if note is not None:
        return BoundReport(name, params, False, note)
    assert value is not None
    return BoundReport(name, params, True, None, value, floor(value))


def ub_single(L: int, w: int) -> BoundReport:
    """K(L, w) <= (L-1)/(2w-2) when all prime factors of L are >= 2w-1."""
    params = {"L": L, "w": w}
    if w < 2:
        return _report("single", params, "requires weight w >= 2", None)
    note = _length_condition(L, w)
    value = None if note else Fraction(L - 1, 2 * w - 2)
    return _report("single", params, note, value)


def ub_general(M: int, L: int, w: int) -> BoundReport:
    """K(M, L, w) <= M(M-1)L / (w(w-1)) + M(L-1)/(2w-2), any M."""
    params = {"M": M, "L": L, "w": w}
    if w < 2:
        return _report("general", params, "requires weight w >= 2", None)
    note = _length_condition(L, w)
    value = (
        None
        if note
        else Fraction(M * (M - 1) * L, w * (w - 1)) + Fraction(M * (L - 1), 2 * w - 2)
    )
    return _report("general", params, note, value)


def ub_small_channels(M: int, L: int, w: int) -> BoundReport:
    """Sharper form for M < w: M(M-1)L / ((2w-M)(w-1)) + M(L-1)/(2w-2)."""
    if M >= w:
        raise ValueError(f"small-channel bound needs M < w, got M={M}, w={w}")
    params = {"M": M, "L": L, "w": w}
    note = _length_condition(L, w)
    value = (
        None
        if note
        else Fraction(M * (M - 1) * L, (2 * w - M) * (w - 1))
        + Fraction(M * (L - 1), 2 * w - 2)
    )
    return _report("small-channels", params, note, value)


def ub_two_channel(lprime: int, w: int) -> BoundReport:
    """K(2, (w-1)L', w) <= L' + floor((L' + w - 3) / (w - 1))."""
    params = {"Lprime": lprime, "w": w, "L": (w - 1) * lprime}
    if w < 2:
        return _report("two-channel", params, "requires weight w >= 2", None)
    note = _length_condition(lprime, w)
    value = None if note else lprime + Fraction(lprime + w - 3, w - 1)
    return _report("two-channel", params, note, value)


def ub_m_channel_tau(M: int, L: int, lprime: int, w: int) -> BoundReport:
    """Divisor-count bound for M >= 3 channels at length L = (2w/M - 1) L'."""
    if not (w > M >= 3):
        raise ValueError(f"need w > M >= 3, got M={M}, w={w}")
    if w % M != 0:
        raise ValueError(f"{M} does not divide w={w}")
    t = w // M
    if L != (2 * t - 1) * lprime:
        raise ValueError(f"need L = (2w/M - 1) * L' = {(2 * t - 1) * lprime}, got {L}")
    params = {"M": M, "L": L, "Lprime": lprime, "w": w}
    note = _length_condition(lprime, w)
    if note:
        return _report("m-channel-tau", params, note, None)
    spread = (tau(2 * t - 1) - 1) * (L - lprime)
    value = Fraction(M * (M - 1) * (L + spread), (2 * w - M) * (w - 1)) + Fraction(
        M * (L - 1) + 2 * (w - M), 2 * w - 2
    )
    return _report("m-channel-tau", params, note, value)


def ub_amoppts_general(M: int, L: int, w: int) -> BoundReport:
    """A(M, L, w) <= M(M-1)(L-1) / (w(w-1)) + M(L-1)/(2w-2)."""
    params = {"M": M, "L": L, "w": w}
    if w < 2:
        return _report("amoppts-general", params, "requires weight w >= 2", None)
    note = _length_condition(L, w)
    value = (
        None
        if note
        else Fraction(M * (M - 1) * (L - 1), w * (w - 1))
        + Fraction(M * (L - 1), 2 * w - 2)
    )
    return _report("amoppts-general", params, note, value)


def ub_amoppts_small_channels(M: int, L: int, w: int) -> BoundReport:
    """A(M, L, w) <= M(M-1)(L-1) / ((2w-M)(w-1)) + M(L-1)/(2w-2) for M < w."""
    if M >= w:
        raise ValueError(f"small-channel bound needs M < w, got M={M}, w={w}")
    params = {"M": M, "L": L, "w": w}
    note = _length_condition(L, w)
    value = (
        None
        if note
        else Fraction(M * (M - 1) * (L - 1), (2 * w - M) * (w - 1))
        + Fraction(M * (L - 1), 2 * w - 2)
    )
    return _report("amoppts-small-channels", params, note, value)


def conjectured_ratio(M: int, w: int) -> Fraction:
    """Conjectured limiting density of K(M, L, w) / L; reported, never asserted."""
    if not w >= M >= 1:
        raise ValueError(f"need w >= M >= 1, got M={M}, w={w}")
    if w < 2:
        raise ValueError("requires weight w >= 2")
    return Fraction(M * (M - 1), (2 * w - M) * (w - 1)) + Fraction(M, 2 * w - 2)


def all_bounds(
    M: int, L: int, w: int, lprime: int | None = None, am_oppts: bool = False
) -> list[BoundReport]:
    """Every bound meaningful at (M, L, w), inapplicable ones flagged.

    lprime defaults to L / (w-1) for the two-channel bound and to
    L / (2w/M - 1) for the divisor-count bound whenever those divisions
    are exact.
    """
    reports: list[BoundReport] = []
    if M == 1:
        reports.append(ub_single(L, w))
    reports.append(ub_general(M, L, w))
    if 1 <= M < w:
        reports.append(ub_small_channels(M, L, w))
    if M == 2 and w >= 2:
        lp = lprime if lprime is not None else (L // (w - 1) if L % (w - 1) == 0 else None)
        if lp is not None and (w - 1) * lp == L:
            reports.append(ub_two_channel(lp, w))
    if M >= 3 and w > M and w % M == 0:
        t = w // M
        lp = lprime if lprime is not None else (L // (2 * t - 1) if L % (2 * t - 1) == 0 else None)
        if lp is not None and (2 * t - 1) * lp == L:
            reports.append(ub_m_channel_tau(M, L, lp, w))
    if am_oppts and w >= 2:
        reports.append(ub_amoppts_general(M, L, w))
        if M < w:
            reports.append(ub_amoppts_small_channels(M, L, w))
    return reports


# ---------------------------------------------------------------------------
# Certification.


@dataclass(frozen=True)
class Certificate:
    """Result of matching a verified code against the optimality theorems.

    matched names the theorem whose hypotheses were re-verified and whose
    optimal value equals the achieved size; otherwise gap pairs the
    achieved size with the best applicable upper bound.  For two-channel
    codes built under the at-most-one-packet restriction, interval gives
    the proven [lower, upper] range of the maximum.  For three or more
    channels, census counts codewords by number of occupied channels;
    meeting the bound requires every codeword to occupy either one channel
    or all of them.
    """

    achieved_size: int
    matched: str | None = None
    optimal_value: int | None = None
    interval: tuple[int, int] | None = None
    best_bound: int | None = None
    gap: tuple[int, int] | None = None
    census: dict | None = None
    notes: tuple[str, ...] = ()


def _single_qr_hypotheses(L: int, w: int) -> tuple[bool, list[int], list[str]]:
    """Check the residue-construction optimality hypotheses at (L, w)."""
    notes: list[str] = []
    if w < 2 or L % (w - 1) != 0:
        return False, [], [f"L={L} is not a multiple of w-1"]
    lp = L // (w - 1)
    if gcd(w - 1, lp) != 1:
        return False, [], [f"w-1 and L'={lp} share a factor"]
    primes = sorted(prime_factorization(lp))
    if not primes:
        return False, [], ["L' = 1 has no prime factors"]
    if primes[0] < w:
        return False, primes, [f"prime {primes[0]} of L' is below w"]
    for p in primes:
        rep = qr_conditions(w, p)
        if not rep.all_hold:
            notes.append(f"sign conditions fail at p={p}")
            return False, primes, notes
    if not optimality_condition_w1(w, primes):
        return False, primes, ["small-prime deficiency condition fails"]
    return True, primes, notes


def _equidiff_base_count(p: int, w: int, base_witnesses: dict | None) -> int:
    """Largest known equi-difference base code size at prime p, by search."""
    if base_witnesses and p in base_witnesses:
        return len(set(base_witnesses[p]))
    from .search import search_equidiff  # deferred: search imports bounds

    return search_equidiff(p, w).max_count


def _lifted_hypotheses(
    L: int, w: int, base_witnesses: dict | None
) -> tuple[bool, list[str]]:
    """Check the unit-lift optimality hypotheses at (L, w)."""
    if w < 2:
        return False, ["weight below 2"]
    primes = sorted(prime_factorization(L))
    if not primes:
        return False, ["L = 1"]
    for p in primes:
        if (p - 1) % (2 * w - 2) != 0:
            return False, [f"2w-2 does not divide p-1 at p={p}"]
    for p in primes:
        need = (p - 1) // (2 * w - 2)
        have = _equidiff_base_count(p, w, base_witnesses)
        if have < need:
            return False, [f"no equi-difference base of size {need} at p={p}"]
    return True, []


def certify(code: SingleCode | MultiCode, base_witnesses: dict | None = None) -> Certificate:
    """Re-verify a code and match it against the optimality theorems.

    base_witnesses optionally maps a prime p to a collection of generators
    witnessing an equi-difference code over Z_p; otherwise existence is
    confirmed by exhaustive search.
    """
    if isinstance(code, SingleCode):
        return _certify_single(code, base_witnesses)
    return _certify_multi(code, base_witnesses)


def _certify_single(code: SingleCode, base_witnesses: dict | None) -> Certificate:
    report = verify_cac(code)
    if not report.ok:
        raise ValueError(f"cannot certify an unverified code: {report.conflict}")
    if len(code.weights) != 1:
        return Certificate(len(code), notes=("mixed-weight code: no optimality theorem",))
    L, w = code.modulus, code.weights[0]
    size = len(code)
    notes: list[str] = []

    ok_qr, _, qr_notes = _single_qr_hypotheses(L, w)
    if ok_qr:
        opt = (L // (w - 1) - 1) // 2
        if size == opt:
            return Certificate(size, matched="single-channel-qr-optimal", optimal_value=opt)
        notes.append(f"qr-optimal value is {opt}, achieved {size}")
    else:
        notes.extend(qr_notes)

    ok_lift, lift_notes = _lifted_hypotheses(L, w, base_witnesses)
    if ok_lift:
        opt = (L - 1) // (2 * w - 2)
        if size == opt:
            return Certificate(
                size, matched="single-channel-lifted-optimal", optimal_value=opt
            )
        notes.append(f"lifted-optimal value is {opt}, achieved {size}")
    else:
        notes.extend(lift_notes)

    best = ub_single(L, w)
    bound = best.int_bound if best.applicable else None
    return Certificate(
        size,
        best_bound=bound,
        gap=(size, bound) if bound is not None else None,
        notes=tuple(notes),
    )


def _two_channel_hypotheses(
    L: int, w: int, base_witnesses: dict | None
) -> tuple[bool, int | None, list[str]]:
    if w < 2 or L % (w - 1) != 0:
        return False, None, [f"L={L} is not a multiple of w-1"]
    lp = L // (w - 1)
    if gcd(w - 1, lp) != 1:
        return False, None, [f"w-1 and L'={lp} share a factor"]
    primes = sorted(prime_factorization(lp))
    if not primes:
        return False, None, ["L' = 1"]
    for p in primes:
        if (p - 1) % (2 * w - 2) != 0:
            return False, None, [f"2w-2 does not divide p-1 at p={p}"]
        if not qr_conditions(w, p).all_hold:
            return False, None, [f"sign conditions fail at p={p}"]
        need = (p - 1) // (2 * w - 2)
        if _equidiff_base_count(p, w, base_witnesses) < need:
            return False, None, [f"no equi-difference base of size {need} at p={p}"]
    return True, lp + (lp - 1) // (w - 1), []


def _census(code: MultiCode) -> dict:
    counts = {"one_channel": 0, "all_channels": 0, "intermediate": 0}
    for cw in code.codewords:
        e = cw.occupied_channels
        if e == 1:
            counts["one_channel"] += 1
        elif e == code.channels:
            counts["all_channels"] += 1
        else:
            counts["intermediate"] += 1
    return counts


def _certify_multi(code: MultiCode, base_witnesses: dict | None) -> Certificate:
    report = verify_mccac(code)
    if not report.ok:
        raise ValueError(f"cannot certify an unverified code: {report.conflict}")
    if len(code.weights) != 1:
        return Certificate(len(code), notes=("mixed-weight code: no optimality theorem",))
    M, L, w = code.channels, code.modulus, code.weights[0]
    size = len(code)
    notes: list[str] = []

    if code.am_oppts and not verify_amoppts(code):
        raise ValueError("code is flagged am-oppts but reuses a time slot")

    if M == 2:
        ok, opt, hyp_notes = _two_channel_hypotheses(L, w, base_witnesses)
        if ok:
            assert opt is not None
            if code.am_oppts:
                interval = (opt - 1, opt)
                matched = "two-channel-am-oppts-max" if size == opt else None
                return Certificate(
                    size,
                    matched=matched,
                    optimal_value=opt if matched else None,
                    interval=interval,
                    best_bound=opt,
                    gap=None if matched else (size, opt),
                )
            if size == opt:
                return Certificate(size, matched="two-channel-optimal", optimal_value=opt)
            notes.append(f"two-channel optimal value is {opt}, achieved {size}")
        else:
            notes.extend(hyp_notes)

    candidates = all_bounds(M, L, w, am_oppts=code.am_oppts)
    bounds = [b.int_bound for b in candidates if b.applicable]
    best = min(bounds) if bounds else None
    census = _census(code) if M >= 3 else None
    if census is not None and census["intermediate"] > 0:
        notes.append(
            "bound cannot be met: some codewords occupy an intermediate "
            "number of channels"
        )
    return Certificate(
        size,
        best_bound=best,
        gap=(size, best) if best is not None else None,
        census=census,
        notes=tuple(notes),
    )
