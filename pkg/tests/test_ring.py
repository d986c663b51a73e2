"""Ring substrate: difference sets, stabilizers, Kneser, layers, CRT."""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from cackit.ring import (
    CrtSystem,
    LayerView,
    ResidueSet,
    crt_decode,
    crt_encode,
    diff_set,
    is_exceptional_pair,
    is_exceptional_pattern,
    is_exceptional_set,
    kneser_check,
    layer_of,
    legendre,
    lift_layers,
    quadratic_residues,
    signed_diff,
    stabilizer,
    subgroup_of_order,
    sumset,
    tau,
)
from cackit.multi import MultiCodeword

from oracles import naive_diff_set, naive_signed_diff, naive_stabilizer


def rs(L, els):
    return ResidueSet.of(L, els)


class TestResidueSet:
    def test_canonicalizes(self):
        s = rs(9, [10, 1, -2])
        assert s.elements == (1, 7)

    def test_rejects_bad_elements(self):
        with pytest.raises(ValueError):
            ResidueSet(5, (5,))
        with pytest.raises(ValueError):
            ResidueSet(5, (2, 1))

    def test_empty_allowed(self):
        assert len(rs(7, [])) == 0


class TestDiffSet:
    def test_singleton_empty(self):
        assert diff_set(rs(9, [0])).elements == ()

    def test_three_elements_mod7(self):
        assert set(diff_set(rs(7, [0, 1, 3]))) == {1, 2, 3, 4, 5, 6}

    def test_progression_mod21(self):
        assert set(diff_set(rs(21, [0, 1, 2, 3]))) == {1, 2, 3, 18, 19, 20}

    def test_symmetric_under_negation(self):
        d = diff_set(rs(12, [0, 3, 5, 11]))
        assert set(d) == {(-x) % 12 for x in d}

    @given(st.integers(2, 30), st.data())
    def test_matches_naive_and_translation_invariant(self, L, data):
        els = data.draw(st.sets(st.integers(0, L - 1), min_size=1, max_size=5))
        shift = data.draw(st.integers(0, L - 1))
        s = rs(L, els)
        assert set(diff_set(s)) == naive_diff_set(s.elements, L)
        assert diff_set(s.translate(shift)) == diff_set(s)


class TestSignedDiff:
    def test_empty(self):
        assert signed_diff(rs(5, []), rs(5, [1])).elements == ()

    def test_equal_sets_mod6(self):
        assert set(signed_diff(rs(6, [0, 3]), rs(6, [0, 3]))) == {0, 3}

    def test_mod5(self):
        assert set(signed_diff(rs(5, [0, 1]), rs(5, [0, 2]))) == {0, 1, 3, 4}

    def test_modulus_mismatch(self):
        with pytest.raises(ValueError):
            signed_diff(rs(5, [0]), rs(6, [0]))

    @given(st.integers(2, 25), st.data())
    def test_size_symmetric(self, L, data):
        a = rs(L, data.draw(st.sets(st.integers(0, L - 1), min_size=1, max_size=4)))
        b = rs(L, data.draw(st.sets(st.integers(0, L - 1), min_size=1, max_size=4)))
        assert len(signed_diff(a, b)) == len(signed_diff(b, a))
        assert set(signed_diff(a, b)) == naive_signed_diff(a.elements, b.elements, L)


class TestStabilizer:
    def test_whole_ring(self):
        h = stabilizer(rs(6, range(6)))
        assert h.order == 6 and set(h.elements) == set(range(6))

    def test_even_triple_mod6(self):
        assert set(stabilizer(rs(6, [0, 2, 4])).elements) == {0, 2, 4}

    def test_trivial(self):
        assert stabilizer(rs(5, [0, 1])).order == 1

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            stabilizer(rs(5, []))

    @given(st.integers(1, 16), st.data())
    def test_matches_naive(self, L, data):
        els = data.draw(st.sets(st.integers(0, L - 1), min_size=1, max_size=L))
        t = rs(L, els)
        h = stabilizer(t)
        assert set(h.elements) == naive_stabilizer(t.elements, L)

    def test_periodic_structure_exhaustive_small(self):
        # A periodic set is a union of cosets of its stabilizer, whose order
        # then divides the set size; checked on every subset for L <= 16.
        for L in range(2, 17):
            for bits in range(1, 1 << L):
                els = [i for i in range(L) if bits >> i & 1]
                t = rs(L, els)
                h = stabilizer(t)
                if h.order > 1:
                    assert len(t) % h.order == 0
                    cosets = {tuple(sorted((e + x) % L for x in h.elements)) for e in els}
                    assert sum(len(c) for c in cosets) == len(t)


class TestSubgroupOfOrder:
    def test_trivial(self):
        assert subgroup_of_order(1, 21).elements == (0,)

    def test_order3_mod21(self):
        assert subgroup_of_order(3, 21).elements == (0, 7, 14)

    def test_order7_mod21(self):
        assert subgroup_of_order(7, 21).elements == tuple(range(0, 21, 3))

    def test_nondivisor_rejected(self):
        with pytest.raises(ValueError):
            subgroup_of_order(4, 21)


class TestKneser:
    def test_trivial_singletons(self):
        rep = kneser_check(rs(5, [0]), rs(5, [0]))
        assert rep.lhs == 1 and rep.stabilizer.order == 1
        assert rep.strong_holds and rep.weak_holds

    def test_periodic_sum_mod6(self):
        rep = kneser_check(rs(6, [0, 2, 4]), rs(6, [0, 2]))
        assert rep.lhs == 3
        assert rep.stabilizer.order == 3
        assert rep.strong_holds and rep.weak_holds

    def test_interval_mod7(self):
        rep = kneser_check(rs(7, [0, 1]), rs(7, [0, 1]))
        assert rep.lhs == 3 and rep.weak_rhs == 3

    @settings(max_examples=300)
    @given(st.integers(2, 40), st.data())
    def test_always_holds(self, L, data):
        a = rs(L, data.draw(st.sets(st.integers(0, L - 1), min_size=1, max_size=6)))
        b = rs(L, data.draw(st.sets(st.integers(0, L - 1), min_size=1, max_size=6)))
        rep = kneser_check(a, b)
        assert rep.strong_holds and rep.weak_holds
        assert rep.strong_rhs >= rep.weak_rhs


class TestExceptionality:
    def test_set_examples(self):
        assert is_exceptional_set(rs(6, [0, 2, 4])) is True
        assert is_exceptional_set(rs(5, [0, 1])) is False
        assert is_exceptional_set(rs(9, [0])) is False

    def test_pair_examples(self):
        assert is_exceptional_pair(rs(6, [0, 3]), rs(6, [0, 3])) is True
        assert is_exceptional_pair(rs(5, [0]), rs(5, [0])) is False
        assert is_exceptional_pair(rs(5, [0, 1]), rs(5, [0, 2])) is False

    def test_pattern_single_channel(self):
        cw = MultiCodeword.of(2, 6, [(1, 0), (1, 2), (1, 4)])
        rep = is_exceptional_pattern(cw)
        assert rep.exceptional and rep.witness == 1

    def test_pattern_singletons(self):
        cw = MultiCodeword.of(2, 5, [(1, 0), (2, 0)])
        rep = is_exceptional_pattern(cw)
        assert not rep.exceptional and rep.witness is None

    def test_pattern_pair_witness(self):
        cw = MultiCodeword.of(3, 6, [(1, 0), (1, 3), (3, 0), (3, 3)])
        rep = is_exceptional_pattern(cw)
        assert rep.exceptional and rep.witness == (1, 3)

    @settings(max_examples=200)
    @given(st.sampled_from([7, 11, 13]), st.integers(1, 3), st.data())
    def test_large_prime_patterns_never_exceptional(self, p, M, data):
        # w-subsets of an M x Z_p grid with p >= 2w-1 have full difference
        # spread on and across channels.
        w = data.draw(st.integers(1, (p + 1) // 2))
        cells = data.draw(
            st.sets(
                st.tuples(st.integers(1, M), st.integers(0, p - 1)),
                min_size=w,
                max_size=w,
            )
        )
        cw = MultiCodeword.of(M, p, cells)
        assert not is_exceptional_pattern(cw).exceptional


class TestLegendre:
    def test_one_is_square(self):
        for p in (3, 7, 11, 97):
            assert legendre(1, p) == 1

    def test_examples_mod7(self):
        assert legendre(3, 7) == -1
        assert legendre(2, 7) == 1

    def test_zero(self):
        assert legendre(14, 7) == 0

    def test_requires_odd_prime(self):
        with pytest.raises(ValueError):
            legendre(1, 8)
        with pytest.raises(ValueError):
            legendre(1, 2)

    def test_multiplicative_all_small_primes(self):
        for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59,
                  61, 67, 71, 73, 79, 83, 89, 97):
            squares = {x * x % p for x in range(1, p)}
            for a in range(p):
                expected = 0 if a == 0 else (1 if a in squares else -1)
                assert legendre(a, p) == expected
            for a in range(p):
                for b in range(p):
                    assert legendre(a * b, p) == legendre(a, p) * legendre(b, p)


class TestQuadraticResidues:
    def test_examples(self):
        assert quadratic_residues(3).elements == (1,)
        assert quadratic_residues(7).elements == (1, 2, 4)
        assert quadratic_residues(11).elements == (1, 3, 4, 5, 9)

    def test_count(self):
        for p in (13, 17, 19, 23):
            assert len(quadratic_residues(p)) == (p - 1) // 2


class TestLayers:
    def test_examples(self):
        view = LayerView(5, 2)
        assert layer_of(6, view) == (0, 1)
        assert layer_of(5, view) == (1, 1)
        assert layer_of(20, view) == (1, 4)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            layer_of(0, LayerView(5, 2))
        with pytest.raises(ValueError):
            layer_of(25, LayerView(5, 2))

    def test_layer_sizes_partition(self):
        for p, r in ((3, 3), (5, 2), (7, 3)):
            view = LayerView(p, r)
            layers = {}
            for c in range(1, p**r):
                t, digit = layer_of(c, view)
                assert 1 <= digit <= p - 1
                layers.setdefault(t, []).append(c)
            for t in range(r):
                assert len(layers[t]) == (p - 1) * p ** (r - t - 1)

    def test_unit_multiplication_law(self):
        # Multiplying by a unit j preserves the layer and multiplies the
        # digit by j's unit digit, for every prime power up to 343.
        for p, r in ((3, 1), (3, 2), (3, 4), (5, 2), (7, 2), (7, 3), (2, 3)):
            if p == 2:
                continue
            n = p**r
            view = LayerView(p, r)
            units = [j for j in range(1, n) if j % p != 0]
            for j in units[:: max(1, len(units) // 40)]:
                j0 = j % p
                for c in range(1, n):
                    t, ct = layer_of(c, view)
                    t2, d2 = layer_of(j * c % n, view)
                    assert t2 == t and d2 == j0 * ct % p


class TestLiftLayers:
    def test_identity_at_r1(self):
        assert lift_layers([1], 5, 1).elements == (1,)

    def test_example_r2(self):
        assert set(lift_layers([1], 5, 2)) == {1, 5, 6, 11, 16, 21}

    def test_size_formula(self):
        assert len(lift_layers([1, 2, 4], 7, 1)) == 3
        for p, r, a in ((5, 3, {1, 2}), (3, 4, {1}), (7, 2, {1, 2, 4})):
            assert len(lift_layers(a, p, r)) == len(a) * (p**r - 1) // (p - 1)

    def test_rejects_bad_digits(self):
        with pytest.raises(ValueError):
            lift_layers([], 5, 2)
        with pytest.raises(ValueError):
            lift_layers([0], 5, 2)


class TestCrt:
    def test_fixed_point(self):
        sys37 = CrtSystem(3, ((7, 1),))
        assert crt_encode((1, 1), sys37) == 1

    def test_example_16(self):
        sys37 = CrtSystem(3, ((7, 1),))
        assert crt_encode((1, 2), sys37) == 16

    def test_decode_13(self):
        sys37 = CrtSystem(3, ((7, 1),))
        assert crt_decode(13, sys37) == (1, 6)

    def test_roundtrip_and_linearity(self):
        system = CrtSystem(4, ((3, 2), (5, 1)))
        L = system.modulus
        for x in range(L):
            assert crt_encode(crt_decode(x, system), system) == x
        mods = system.component_moduli
        for x in range(0, L, 7):
            for y in range(0, L, 11):
                cx, cy = crt_decode(x, system), crt_decode(y, system)
                summed = tuple((a + b) % m for a, b, m in zip(cx, cy, mods))
                assert crt_encode(summed, system) == (x + y) % L

    def test_cofactor_one_has_no_coordinate(self):
        system = CrtSystem(1, ((3, 1), (7, 1)))
        assert system.component_moduli == (3, 7)
        assert crt_decode(16, system) == (1, 2)

    def test_out_of_range(self):
        system = CrtSystem(3, ((7, 1),))
        with pytest.raises(ValueError):
            crt_encode((3, 0), system)


class TestTau:
    def test_examples(self):
        assert tau(1) == 1
        assert tau(3) == 2
        assert tau(12) == 6

    def test_against_enumeration(self):
        for n in range(1, 200):
            assert tau(n) == sum(1 for d in range(1, n + 1) if n % d == 0)


class TestSumset:
    @given(st.integers(2, 20), st.data())
    def test_matches_naive(self, L, data):
        a = rs(L, data.draw(st.sets(st.integers(0, L - 1), min_size=1, max_size=4)))
        b = rs(L, data.draw(st.sets(st.integers(0, L - 1), min_size=1, max_size=4)))
        expected = {(x + y) % L for x in a for y in b}
        assert set(sumset(a, b)) == expected
