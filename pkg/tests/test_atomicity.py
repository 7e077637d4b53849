"""Chains, atom divisors, canonical decompositions, and the rank-2 machinery."""

import random
from fractions import Fraction as F

import pytest

from finpow.arith import InvalidInputError, QPoint2
from finpow.atomicity import (
    PROJECTION_GAP,
    PROJECTION_HEADS,
    UNATTAINABLE_OFFSET,
    accp_chain_explore,
    atom_divisors,
    canonical_decomp_Q,
    ffm_count,
    is_furstenberg_sample,
    k_of,
    lemma54_sum_witness,
    p_accp_chain_explore,
    p_furstenberg_divisor,
    rank2_atom,
    thm55_projection_check,
    tidf_implies_atomic_check,
)
from finpow.backend import MonoidSpec, divides
from finpow.power import FinSet, is_p_atom, singleton, sumset

N23 = MonoidSpec.numerical(2, 3)


class TestAccpChains:
    def test_numerical_chain(self):
        rep = accp_chain_explore(6, N23)
        assert rep.chain == (6, 4, 2, 0)
        assert rep.stabilized
        assert rep.length == 4

    def test_chain_steps_are_proper_divisors(self):
        rep = accp_chain_explore(12, N23)
        for a, b in zip(rep.chain, rep.chain[1:]):
            assert b != a and divides(b, a, N23)

    def test_maxlen_truncation(self):
        rep = accp_chain_explore(30, N23, maxlen=2)
        assert not rep.stabilized
        assert rep.length == 3  # the start plus maxlen descent steps

    def test_set_chain(self):
        rep = p_accp_chain_explore(FinSet((4, 5, 6, 7)), N23)
        assert rep.stabilized
        profile = rep.cardinality_profile
        assert all(a >= b for a, b in zip(profile, profile[1:]))
        assert rep.chain[-1] == FinSet((0,))

    def test_cardinality_profile_rejects_element_chain(self):
        rep = accp_chain_explore(6, N23)
        with pytest.raises(InvalidInputError):
            rep.cardinality_profile


class TestFurstenberg:
    def test_numerical_sample(self):
        rep = is_furstenberg_sample(N23, 50)
        assert rep.ok and bool(rep)

    def test_bound_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            is_furstenberg_sample(N23, 0)

    def test_p_divisor_of_atom_is_itself(self):
        assert p_furstenberg_divisor(FinSet((2, 3)), N23) == FinSet((2, 3))

    def test_p_divisor_via_singleton(self):
        d = p_furstenberg_divisor(singleton(4), N23)
        assert d == singleton(2)

    def test_p_divisor_is_certified_atom_divisor(self):
        s = FinSet((4, 5, 6, 7))
        d = p_furstenberg_divisor(s, N23)
        assert is_p_atom(d, N23).is_atom
        from finpow.power import divides_in_P

        assert divides_in_P(d, s, N23) is not None

    def test_zero_set_rejected(self):
        with pytest.raises(InvalidInputError):
            p_furstenberg_divisor(singleton(0), N23)


class TestAtomDivisorsAndCounts:
    def test_atom_divisors(self):
        assert atom_divisors(6, N23) == [2, 3]
        assert atom_divisors(2, N23) == [2]

    def test_ffm_counts(self):
        assert ffm_count(6, N23) == 2  # 2+2+2 and 3+3
        assert ffm_count(7, N23) == 1  # 2+2+3
        assert ffm_count(0, N23) == 1  # the empty product

    def test_descent_check(self):
        rep = tidf_implies_atomic_check(N23, 30)
        assert rep.ok
        assert 0 < rep.max_descent <= 15


class TestCanonicalDecomp:
    def test_k_values(self):
        assert k_of(F(7, 3)) == 0
        assert k_of(F(32, 15)) == 1
        assert k_of(F(38, 15)) == 0

    def test_decomp_32_15(self):
        d = canonical_decomp_Q(F(32, 15))
        assert d.ell == 1
        assert d.coeffs == ((3, 1), (5, 4))
        assert d.value == F(32, 15)

    def test_decomp_38_15(self):
        d = canonical_decomp_Q(F(38, 15))
        assert d.ell == 2
        assert d.coeffs == ((3, 1), (5, 1))

    def test_integer_decomp(self):
        d = canonical_decomp_Q(F(3))
        assert d.ell == 3 and d.coeffs == ()

    def test_even_denominator_rejected(self):
        with pytest.raises(InvalidInputError):
            canonical_decomp_Q(F(1, 2))

    def test_repeated_prime_rejected(self):
        with pytest.raises(InvalidInputError):
            canonical_decomp_Q(F(1, 9))

    def test_random_reconstruction(self):
        rng = random.Random(20260826)
        primes = (3, 5, 7, 11, 13)
        for _ in range(200):
            ell = rng.randrange(-3, 4)
            chosen = rng.sample(primes, rng.randrange(0, 4))
            q = F(ell) + sum((F(rng.randrange(0, p), p) for p in chosen), F(0))
            d = canonical_decomp_Q(q)
            assert d.value == q
            assert all(0 < c < p for p, c in d.coeffs)


class TestRank2Atoms:
    def test_branch_heads(self):
        a = rank2_atom(F(7, 3), "A")
        assert a == QPoint2(F(1, 5), F(7, 3) + F(1))
        b = rank2_atom(F(7, 3), "B")
        assert b.x == F(1, 7)

    def test_k_shifts_second_coordinate(self):
        # k(32/15) = 1, so the dyadic tail is 1/2.
        a = rank2_atom(F(32, 15), "A")
        assert a.y == F(32, 15) + F(1, 2)

    def test_domain_and_branch_validation(self):
        with pytest.raises(InvalidInputError):
            rank2_atom(F(7, 2), "A")
        with pytest.raises(InvalidInputError):
            rank2_atom(F(7, 3), "C")


class TestLemma54:
    def test_baseline_identity(self):
        cert = lemma54_sum_witness(F(7, 3), F(7, 3), branches=("A", "B"))
        assert cert.p == 5
        assert cert.right[0] == rank2_atom(F(32, 15), "A")
        assert cert.right[1] == rank2_atom(F(38, 15), "B")
        assert cert.increment == QPoint2(F(0), F(1, 2))
        assert cert.multiplicity == 1
        assert cert.resums_exactly()

    def test_same_branch_identity(self):
        cert = lemma54_sum_witness(F(7, 3), F(7, 3), branches=("A", "A"))
        assert cert.increment == QPoint2(F(0), F(1, 2))
        assert cert.resums_exactly()

    def test_random_inputs(self):
        rng = random.Random(99)
        primes = (3, 5, 7, 11)
        for _ in range(25):
            def draw():
                while True:
                    ps = rng.sample(primes, rng.randrange(1, 3))
                    q = F(2) + sum((F(rng.randrange(1, p), p) for p in ps), F(0))
                    if F(2) < q < F(3):
                        return q

            cert = lemma54_sum_witness(draw(), draw())
            assert cert.resums_exactly()

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidInputError):
            lemma54_sum_witness(F(1, 3), F(7, 3))


class TestThm55Projection:
    SPEC = MonoidSpec.rank2(
        QPoint2(F(0), F(1, 2)),
        QPoint2(F(0), F(1, 4)),
        rank2_atom(F(7, 3), "A"),
        rank2_atom(F(7, 3), "B"),
    )

    def test_constants(self):
        assert PROJECTION_HEADS == (F(0), F(1, 5), F(1, 7))
        assert PROJECTION_GAP == F(2, 35)
        assert UNATTAINABLE_OFFSET == F(1, 35)

    def test_vacuous(self):
        assert thm55_projection_check([], self.SPEC).ok

    def test_structural_atoms_pass(self):
        g = rank2_atom(F(7, 3), "A")
        h = rank2_atom(F(7, 3), "B")
        zero = QPoint2(F(0), F(0))
        atoms = [
            FinSet((g,)),
            FinSet((zero, g)),
            FinSet((QPoint2(F(0), F(1, 4)), h)),
        ]
        rep = thm55_projection_check(atoms, self.SPEC)
        assert rep.ok, rep.detail

    def test_trichotomy_violation(self):
        bad = FinSet((QPoint2(F(2, 35), F(1)),))
        rep = thm55_projection_check([bad], self.SPEC)
        assert not rep.ok
        assert rep.detail == "first-coordinate trichotomy violated"
