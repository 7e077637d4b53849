"""Finite-set layer: sumsets, divisibility witnesses, atoms, factorization."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finpow.backend import Budget, MonoidSpec
from finpow.power import (
    FinSet,
    NOT_ATOMIC,
    augment_indecomposable,
    decompositions,
    divides_in_P,
    is_indecomposable,
    is_p_atom,
    p_factorize,
    parse_finset,
    singleton,
    sumset,
    sumset_all,
    zero_set,
)

N23 = MonoidSpec.numerical(2, 3)
N0 = MonoidSpec.numerical(1)

int_sets = st.lists(st.integers(0, 30), min_size=1, max_size=5).map(
    lambda xs: FinSet(tuple(xs))
)


class TestFinSet:
    def test_dedup_and_sort(self):
        s = FinSet((3, 1, 2, 1))
        assert s.elems == (1, 2, 3)
        assert len(s) == 3
        assert s.min == 1 and s.max == 3
        assert 2 in s and 4 not in s

    def test_translate(self):
        assert FinSet((0, 2)).translate(5) == FinSet((5, 7))

    def test_parse_render_roundtrip(self):
        s = parse_finset("{0, 1/2, 3/4}")
        assert s.elems == (0, Fraction(1, 2), Fraction(3, 4))
        assert parse_finset(s.render()) == s

    def test_parse_rejects_empty(self):
        with pytest.raises(Exception):
            parse_finset("{}")


class TestSumset:
    @given(int_sets, int_sets)
    def test_commutative(self, s, t):
        assert sumset(s, t) == sumset(t, s)

    @given(int_sets, int_sets, int_sets)
    @settings(max_examples=50)
    def test_associative(self, s, t, u):
        assert sumset(sumset(s, t), u) == sumset(s, sumset(t, u))

    @given(int_sets, int_sets)
    def test_min_max_additive(self, s, t):
        r = sumset(s, t)
        assert r.min == s.min + t.min
        assert r.max == s.max + t.max

    @given(int_sets, int_sets)
    def test_cardinality_lower_bound(self, s, t):
        assert len(sumset(s, t)) >= len(s) + len(t) - 1

    @given(int_sets)
    def test_zero_set_is_identity(self, s):
        assert sumset(s, zero_set(N0)) == s

    def test_sumset_all(self):
        sets = [FinSet((0, 2)), FinSet((0, 3)), FinSet((2,))]
        assert sumset_all(sets, N23) == FinSet((2, 4, 5, 7))
        assert sumset_all([], N23) == zero_set(N23)


class TestDividesInP:
    def test_witness(self):
        d = divides_in_P(FinSet((0, 2)), FinSet((0, 2, 3, 4, 5)), N23)
        assert d == FinSet((0, 2, 3))
        assert sumset(FinSet((0, 2)), d) == FinSet((0, 2, 3, 4, 5))

    def test_non_divisor(self):
        assert divides_in_P(FinSet((0, 3)), FinSet((0, 2)), N23) is None

    def test_singleton_divides_translate(self):
        d = divides_in_P(singleton(2), FinSet((4, 5)), N23)
        assert d == FinSet((2, 3))

    @given(int_sets, int_sets)
    @settings(max_examples=50)
    def test_sumsets_are_divisible(self, s, t):
        r = sumset(s, t)
        d = divides_in_P(s, r, N0)
        assert d is not None and sumset(s, d) == r


class TestDecompositions:
    def test_all_resume(self):
        s = FinSet((4, 5, 6, 7))
        decs = decompositions(s, N23)
        assert decs
        for dec in decs:
            assert dec.resums_to(s)
            assert len(dec.left) > 1 or dec.left != zero_set(N23)

    def test_atom_has_none(self):
        assert decompositions(FinSet((2, 3)), N23) == []

    def test_both_nonsingleton_filter(self):
        s = FinSet((4, 5, 6, 7))
        decs = decompositions(s, N23, both_nonsingleton=True)
        for dec in decs:
            assert len(dec.left) >= 2 and len(dec.right) >= 2


class TestAtoms:
    def test_2_3_is_atom(self):
        cert = is_p_atom(FinSet((2, 3)), N23)
        assert cert.is_atom and cert.counterexample is None

    def test_0_1_is_atom_over_n0(self):
        assert is_p_atom(FinSet((0, 1)), N0).is_atom

    def test_non_atom_with_counterexample(self):
        cert = is_p_atom(FinSet((0, 1, 2)), N0)
        assert not cert.is_atom
        assert cert.counterexample.resums_to(FinSet((0, 1, 2)))

    def test_identity_rejected(self):
        with pytest.raises(Exception):
            is_p_atom(zero_set(N23), N23)

    def test_indecomposable(self):
        assert is_indecomposable(FinSet((2, 3)), N23)
        assert not is_indecomposable(FinSet((4, 5, 6, 7, 8)), N23)

    def test_augment_forces_indecomposable(self):
        s = FinSet((2, 3, 4))
        aug = augment_indecomposable(s)
        assert aug.elems == (2, 3, 4, 16)
        assert is_indecomposable(aug, N23)


class TestPFactorize:
    def test_identity_is_empty_product(self):
        assert p_factorize(zero_set(N23), N23) == []

    def test_atom_factors_as_itself(self):
        assert p_factorize(FinSet((2, 3)), N23) == [FinSet((2, 3))]

    def test_resums_and_certified(self):
        s = FinSet((4, 5, 6, 7))
        facs = p_factorize(s, N23)
        assert facs is not NOT_ATOMIC
        assert sumset_all(facs, N23) == s
        for a in facs:
            assert is_p_atom(a, N23).is_atom

    def test_budget_is_tracked(self):
        bud = Budget(10**6)
        p_factorize(FinSet((4, 5, 6, 7)), N23, bud)
        assert bud.used > 0
