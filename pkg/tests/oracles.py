"""Naive reference implementations used as independent oracles.

Everything here recomputes quantities by direct enumeration, without any
of the library's shortcuts (canonicalization, footprint dedup, quotient
acceleration), so tests can compare the two paths.
"""

from __future__ import annotations

from itertools import combinations


def naive_diff_set(elements, L):
    return {(a - b) % L for a in elements for b in elements if a != b}


def naive_signed_diff(a, b, L):
    return {(x - y) % L for x in a for y in b}


def naive_stabilizer(t, L):
    members = {e % L for e in t}
    return {h for h in range(L) if {(e + h) % L for e in members} == members}


def naive_sumset(a, b, L):
    return {(x + y) % L for x in a for y in b}


def naive_exceptional_sets(L, size_max):
    """Canonical (0-anchored, min-translate) exceptional sets, exhaustively."""
    found = set()
    for size in range(2, size_max + 1):
        for rest in combinations(range(1, L), size - 1):
            A = (0,) + rest
            if len(naive_diff_set(A, L)) + 1 <= 2 * size - 2:
                canon = min(
                    tuple(sorted((e - a) % L for e in A)) for a in A
                )
                found.add(canon)
    return found


def naive_exceptional_pairs(L, size_max):
    """Canonical exceptional pairs by scanning all 0-anchored subset pairs."""
    subsets = []
    for size in range(2, size_max + 1):
        for rest in combinations(range(1, L), size - 1):
            subsets.append((0,) + rest)
    found = set()
    for i, A in enumerate(subsets):
        for B in subsets[i:]:
            if len(naive_signed_diff(A, B, L)) <= len(A) + len(B) - 2:
                ca = min(tuple(sorted((e - a) % L for e in A)) for a in A)
                cb = min(tuple(sorted((e - b) % L for e in B)) for b in B)
                found.add((ca, cb) if ca <= cb else (cb, ca))
    return found


def naive_max_cac(L, w):
    """Exact K(L, w) by raw backtracking over all w-subsets, no reductions."""
    cands = [frozenset(naive_diff_set(c, L)) for c in combinations(range(L), w)]
    best = 0

    def rec(i, used, count):
        nonlocal best
        best = max(best, count)
        for j in range(i, len(cands)):
            if count + (len(cands) - j) <= best:
                return
            if not cands[j] & used:
                rec(j + 1, used | cands[j], count + 1)

    rec(0, frozenset(), 0)
    return best


def naive_frame_successes(code, activations):
    """Per-user success counts by direct cell placement."""
    L = code.modulus
    placed = []
    for idx, off in activations:
        cw = code.codewords[idx]
        placed.append({(ch, (s + off) % L) for ch, s in cw.cells})
    occupancy = {}
    for cells in placed:
        for cell in cells:
            occupancy[cell] = occupancy.get(cell, 0) + 1
    return [sum(1 for cell in cells if occupancy[cell] == 1) for cells in placed]
