"""Exact maxima by exhaustive search.

The searches here are the independent oracle for everything else in the
package: maximum code sizes K(L, w), K(M, L, w) and A(M, L, w) by
branch-and-bound set packing over candidate difference footprints,
maximum equi-difference generator families at a prime, and exhaustive
enumeration of exceptional sets and pairs.

Candidate reduction leans on two facts checked in the test suite: a
difference set (or array) is invariant under translating the codeword,
and two distinct codewords of weight >= 2 can never share one, so
candidates are canonicalized to a translation representative and
deduplicated by footprint.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

from . import bounds as _bounds
from .ring import ResidueSet, prime_factorization, signed_diff, stabilizer, is_prime
from .single import SingleCode, SingleCodeword, verify_cac
from .multi import MultiCode, MultiCodeword, verify_amoppts, verify_mccac


@dataclass(frozen=True)
class SearchOptions:
    """Knobs for the branch-and-bound searches.

    node_budget caps the number of explored tree nodes; exceeding it
    downgrades the result to a lower bound instead of failing.
    symmetry_reduction toggles translation canonicalization of candidates;
    bound_pruning toggles both the closed-form cap and the
    difference-budget prune.
    """

    node_budget: int = 10**8
    symmetry_reduction: bool = True
    bound_pruning: bool = True


@dataclass(frozen=True)
class SearchResult:
    max_size: int
    witness: SingleCode | MultiCode
    nodes_explored: int
    exhaustive: bool


# ---------------------------------------------------------------------------
# Core packing solver.


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _pack_max(
    fps: Sequence[int],
    cap: int | None,
    node_budget: int,
    use_budget_prune: bool,
) -> tuple[list[int], int, bool]:
    """Maximum pairwise-disjoint subfamily of footprint masks.

    Returns (chosen indices, nodes explored, exhausted).  The cap prune is
    sound because the caller only passes proven upper bounds on the
    packing size; the budget prune divides the uncovered universe by the
    smallest footprint size.
    """
    n = len(fps)
    universe = 0
    for fp in fps:
        universe |= fp
    minfp = min((_popcount(fp) for fp in fps), default=1) or 1

    # Greedy first fit seeds the incumbent and the witness deterministically.
    best_sel: list[int] = []
    used = 0
    for i, fp in enumerate(fps):
        if not fp & used:
            best_sel.append(i)
            used |= fp
    best = len(best_sel)

    nodes = 0
    exhausted = True

    def dfs(used: int, chosen: list[int], rem: list[int]) -> None:
        nonlocal best, best_sel, nodes, exhausted
        nodes += 1
        if nodes > node_budget:
            exhausted = False
            return
        if len(chosen) > best:
            best = len(chosen)
            best_sel = list(chosen)
        if cap is not None and best >= cap:
            return
        if len(chosen) + len(rem) <= best:
            return
        if use_budget_prune:
            free = _popcount(universe & ~used)
            if len(chosen) + free // minfp <= best:
                return
        for idx, i in enumerate(rem):
            if len(chosen) + len(rem) - idx <= best:
                return
            if not exhausted:
                return
            fp = fps[i]
            if fp & used:
                continue
            nxt = used | fp
            chosen.append(i)
            dfs(nxt, chosen, [j for j in rem[idx + 1 :] if not fps[j] & nxt])
            chosen.pop()
            if cap is not None and best >= cap:
                return

    if cap is None or best < cap:
        dfs(0, [], list(range(n)))
    return best_sel, nodes, exhausted


# ---------------------------------------------------------------------------
# Single-channel maximum.


def _single_candidates(L: int, w: int, symmetry: bool) -> list[tuple[int, tuple[int, ...]]]:
    """(footprint, codeword) candidates, deduplicated when symmetry is on."""
    out: dict[int, tuple[int, ...]] = {}
    plain: list[tuple[int, tuple[int, ...]]] = []
    if symmetry:
        pools = combinations(range(1, L), w - 1)
        make = lambda rest: (0,) + rest
    else:
        pools = combinations(range(L), w)
        make = lambda els: els
    for item in pools:
        els = make(item)
        fp = 0
        for a in els:
            for b in els:
                if a != b:
                    fp |= 1 << ((a - b) % L)
        if symmetry:
            if fp not in out or els < out[fp]:
                out[fp] = els
        else:
            plain.append((fp, els))
    if symmetry:
        return sorted(((fp, els) for fp, els in out.items()), key=lambda t: t[1])
    return plain


def _single_cap(L: int, w: int) -> int | None:
    rep = _bounds.ub_single(L, w)
    return rep.int_bound if rep.applicable else None


def max_cac(L: int, w: int, opts: SearchOptions | None = None) -> SearchResult:
    """Exact maximum size of a conflict-avoiding code of length L, weight w."""
    opts = opts or SearchOptions()
    if not L >= w >= 1:
        raise ValueError(f"need L >= w >= 1, got L={L}, w={w}")
    if w == 1:
        code = SingleCode(
            L, (1,), [SingleCodeword(L, (t,)) for t in range(L)], {"search": {"w": 1}}
        )
        return SearchResult(L, code, 0, True)
    cands = _single_candidates(L, w, opts.symmetry_reduction)
    fps = [fp for fp, _ in cands]
    cap = _single_cap(L, w) if opts.bound_pruning else None
    sel, nodes, exhausted = _pack_max(fps, cap, opts.node_budget, opts.bound_pruning)
    codewords = [SingleCodeword(L, cands[i][1]) for i in sel]
    witness = SingleCode(
        L,
        (w,),
        codewords,
        provenance={"search": {"L": L, "w": w, "exhaustive": exhausted}},
    )
    assert verify_cac(witness).ok
    return SearchResult(len(sel), witness, nodes, exhausted)


# ---------------------------------------------------------------------------
# Multichannel maxima.


def _canonical_rotation(
    cells: tuple[tuple[int, int], ...], L: int
) -> tuple[tuple[int, int], ...]:
    """Lexicographically smallest slot rotation of a pattern.

    The minimal form starts with a slot-0 cell on the smallest occupied
    channel, so only rotations landing that channel's slots on 0 compete.
    """
    ch0 = min(ch for ch, _ in cells)
    best = None
    for ch, t in cells:
        if ch != ch0:
            continue
        cand = tuple(sorted((c, (s - t) % L) for c, s in cells))
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


def _multi_footprint(cells: Sequence[tuple[int, int]], M: int, L: int) -> int:
    by: dict[int, list[int]] = {}
    for ch, s in cells:
        by.setdefault(ch, []).append(s)
    fp = 0
    for i, si in by.items():
        for j, sj in by.items():
            plane = ((i - 1) * M + (j - 1)) * L
            for a in si:
                for b in sj:
                    d = (a - b) % L
                    if i == j and d == 0:
                        continue
                    fp |= 1 << (plane + d)
    return fp


def _multi_candidates(
    M: int, L: int, w: int, amoppts: bool, symmetry: bool
) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
    cells = [(i, t) for i in range(1, M + 1) for t in range(L)]
    out: dict[int, tuple[tuple[int, int], ...]] = {}
    plain: list[tuple[int, tuple[tuple[int, int], ...]]] = []
    seen: set[tuple[tuple[int, int], ...]] = set()
    for pat in combinations(cells, w):
        if amoppts:
            slots = [s for _, s in pat]
            if len(set(slots)) != len(slots):
                continue
        if symmetry:
            # Every rotation class has a member using slot 0 somewhere.
            if all(s != 0 for _, s in pat):
                continue
            canon = _canonical_rotation(pat, L)
            if canon in seen:
                continue
            seen.add(canon)
            fp = _multi_footprint(canon, M, L)
            if fp not in out or canon < out[fp]:
                out[fp] = canon
        else:
            plain.append((_multi_footprint(pat, M, L), tuple(sorted(pat))))
    if symmetry:
        return sorted(((fp, c) for fp, c in out.items()), key=lambda t: t[1])
    return plain


def _multi_cap(M: int, L: int, w: int, amoppts: bool) -> int | None:
    reports = _bounds.all_bounds(M, L, w, am_oppts=amoppts)
    values = [r.int_bound for r in reports if r.applicable]
    return min(values) if values else None


def _max_multi(
    M: int, L: int, w: int, amoppts: bool, opts: SearchOptions
) -> SearchResult:
    if not (M >= 1 and L >= 1 and w >= 1):
        raise ValueError("need M, L, w >= 1")
    if amoppts and L < w:
        raise ValueError("at-most-one-packet-per-slot needs L >= w")
    kind = "amoppts" if amoppts else "mccac"
    if w == 1:
        cws = [MultiCodeword(M, L, ((i, t),)) for i in range(1, M + 1) for t in range(L)]
        code = MultiCode(M, L, (1,), cws, {"search": {"kind": kind}}, am_oppts=amoppts)
        return SearchResult(M * L, code, 0, True)
    cands = _multi_candidates(M, L, w, amoppts, opts.symmetry_reduction)
    fps = [fp for fp, _ in cands]
    cap = _multi_cap(M, L, w, amoppts) if opts.bound_pruning else None
    sel, nodes, exhausted = _pack_max(fps, cap, opts.node_budget, opts.bound_pruning)
    cws = [MultiCodeword(M, L, cands[i][1]) for i in sel]
    witness = MultiCode(
        M,
        L,
        (w,),
        cws,
        provenance={"search": {"kind": kind, "M": M, "L": L, "w": w, "exhaustive": exhausted}},
        am_oppts=amoppts,
    )
    assert verify_mccac(witness).ok
    if amoppts:
        assert verify_amoppts(witness)
    return SearchResult(len(sel), witness, nodes, exhausted)


def max_mccac(M: int, L: int, w: int, opts: SearchOptions | None = None) -> SearchResult:
    """Exact maximum size of a multichannel conflict-avoiding code."""
    return _max_multi(M, L, w, False, opts or SearchOptions())


def max_amoppts(M: int, L: int, w: int, opts: SearchOptions | None = None) -> SearchResult:
    """Exact maximum size under the at-most-one-packet-per-slot restriction."""
    return _max_multi(M, L, w, True, opts or SearchOptions())


# ---------------------------------------------------------------------------
# Equi-difference generator families.


@dataclass(frozen=True)
class EquidiffSearchResult:
    """All maximum generator families at a prime, up to g ~ -g."""

    prime: int
    weight: int
    max_count: int
    families: tuple[tuple[int, ...], ...]


def search_equidiff(p: int, w: int) -> EquidiffSearchResult:
    """Maximum families of generators with pairwise disjoint difference sets.

    A generator g stands for the codeword {0, g, ..., (w-1)g} over Z_p;
    g and -g generate the same differences, so generators are reduced to
    min(g, p-g).  Returns every maximum-size family.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if w < 2:
        raise ValueError("weight must be >= 2")
    if p < w:
        return EquidiffSearchResult(p, w, 0, ())
    reps: list[tuple[int, int]] = []
    for g in range(1, p // 2 + 1):
        fp = 0
        for j in range(1, w):
            fp |= 1 << (j * g % p)
            fp |= 1 << (-j * g % p)
        reps.append((g, fp))

    # Phase one: maximum family size, greedy seed plus full backtracking.
    best = 0
    n = len(reps)

    def size_dfs(i: int, count: int, used: int) -> None:
        nonlocal best
        if count > best:
            best = count
        for j in range(i, n):
            if count + (n - j) <= best:
                return
            g, fp = reps[j]
            if not fp & used:
                size_dfs(j + 1, count + 1, used | fp)

    size_dfs(0, 0, 0)

    # Phase two: enumerate every family of the maximum size.
    families: list[tuple[int, ...]] = []

    def enum_dfs(i: int, cur: list[int], used: int) -> None:
        if len(cur) == best:
            families.append(tuple(cur))
            return
        for j in range(i, n):
            if len(cur) + (n - j) < best:
                return
            g, fp = reps[j]
            if not fp & used:
                cur.append(g)
                enum_dfs(j + 1, cur, used | fp)
                cur.pop()

    if best > 0:
        enum_dfs(0, [], 0)
    return EquidiffSearchResult(p, w, best, tuple(families))


# ---------------------------------------------------------------------------
# Exceptional sets and pairs, exhaustively.


@dataclass(frozen=True)
class ExceptionalRecord:
    """One exceptional set or pair, with the stabilizer order of its differences."""

    kind: str  # "set" or "pair"
    members: tuple[ResidueSet, ...]
    stabilizer_order: int


def _mask(els, L: int) -> int:
    m = 0
    for e in els:
        m |= 1 << (e % L)
    return m


def _mask_els(m: int) -> list[int]:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return out


def _rot(m: int, s: int, L: int, full: int) -> int:
    s %= L
    if s == 0:
        return m
    return ((m << s) | (m >> (L - s))) & full


def _diff_mask(A: int, B: int, L: int, full: int) -> int:
    out = 0
    for b in _mask_els(B):
        out |= _rot(A, (L - b) % L, L, full)
    return out


def _canon_set_mask(A: int, L: int, full: int) -> int:
    """Smallest mask among all translates of A: translation representative."""
    best = None
    for a in _mask_els(A):
        t = _rot(A, (L - a) % L, L, full)
        if best is None or t < best:
            best = t
    assert best is not None
    return best


def _exceptional_pair_masks(L: int, size_max: int) -> set[tuple[int, int]]:
    """All exceptional pairs as canonical (maskA <= maskB) with 0 in each.

    Any exceptional pair's difference set is periodic, so it is saturated
    by a subgroup of prime order q | L with q <= |A| + |B| - 2.  Pairs are
    therefore found by enumerating small image pairs in the quotient
    Z_{L/q} and lifting through the fibers, which is exhaustive and far
    cheaper than scanning all pairs; the test suite cross-checks this
    against a naive scan at small L.
    """
    full = (1 << L) - 1
    budget = 2 * size_max - 2
    qs = [q for q in prime_factorization(L) if q <= budget]
    found: set[tuple[int, int]] = set()
    for q in qs:
        Lq = L // q
        fullq = (1 << Lq) - 1
        img_size_cap = min(size_max, budget // q)
        images: list[int] = []
        for size in range(1, img_size_cap + 1):
            for rest in combinations(range(1, Lq), size - 1):
                images.append(_mask((0,) + rest, Lq))

        def lifts(E: int) -> list[tuple[int, int]]:
            """(mask, size) of every A with image E, 0 in A, |A| <= size_max."""
            fibers = [[e + k * Lq for k in range(q)] for e in _mask_els(E)]
            options: list[list[list[int]]] = []
            for f in fibers:
                opts = []
                for sel_bits in range(1, 1 << q):
                    sel = [f[i] for i in range(q) if sel_bits >> i & 1]
                    if 0 in f and 0 not in sel:
                        continue
                    opts.append(sel)
                options.append(opts)
            out: list[tuple[int, int]] = []

            def rec(i: int, cur: list[int]) -> None:
                if len(cur) > size_max:
                    return
                if i == len(options):
                    if len(cur) >= 2:
                        out.append((_mask(cur, L), len(cur)))
                    return
                for sel in options[i]:
                    rec(i + 1, cur + sel)

            rec(0, [])
            return out

        lift_cache: dict[int, list[tuple[int, int]]] = {}
        for EA in images:
            for EB in images:
                if q * _popcount(_diff_mask(EA, EB, Lq, fullq)) > budget:
                    continue
                if EA not in lift_cache:
                    lift_cache[EA] = lifts(EA)
                if EB not in lift_cache:
                    lift_cache[EB] = lifts(EB)
                for A, sa in lift_cache[EA]:
                    for B, sb in lift_cache[EB]:
                        if _popcount(_diff_mask(A, B, L, full)) <= sa + sb - 2:
                            ca = _canon_set_mask(A, L, full)
                            cb = _canon_set_mask(B, L, full)
                            found.add((ca, cb) if ca <= cb else (cb, ca))
    return found


def enumerate_exceptional(
    L: int, size_max: int, limit: int = 64
) -> Iterator[ExceptionalRecord]:
    """Yield every exceptional set and pair, up to translation.

    Sets come first (by size, then lexicographically), then pairs; the
    stabilizer order recorded is that of the full signed difference set.
    """
    if L > limit:
        raise ValueError(f"L={L} exceeds the exhaustive limit {limit}")
    if size_max < 1:
        raise ValueError("size_max must be >= 1")
    full = (1 << L) - 1

    sets: set[int] = set()
    for size in range(2, size_max + 1):
        for rest in combinations(range(1, L), size - 1):
            A = _mask((0,) + rest, L)
            if _popcount(_diff_mask(A, A, L, full)) <= 2 * size - 2:
                sets.add(_canon_set_mask(A, L, full))
    for A in sorted(sets, key=lambda m: (_popcount(m), _mask_els(m))):
        rs = ResidueSet.of(L, _mask_els(A))
        order = stabilizer(signed_diff(rs, rs)).order
        yield ExceptionalRecord("set", (rs,), order)

    for A, B in sorted(_exceptional_pair_masks(L, size_max)):
        ra = ResidueSet.of(L, _mask_els(A))
        rb = ResidueSet.of(L, _mask_els(B))
        order = stabilizer(signed_diff(ra, rb)).order
        yield ExceptionalRecord("pair", (ra, rb), order)
