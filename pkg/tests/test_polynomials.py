"""Exact polynomial algebra: spec'd examples plus randomized oracle checks."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcflab.errors import NotDivisible
from pcflab.polynomials import (
    IntPolynomial,
    compose,
    deserialize,
    divide_exact,
    evaluate_exact,
    gcd,
    resultant,
    serialize,
    squarefree_part,
)

from oracles import horner_fraction, naive_compose, naive_gcd, naive_mul, sylvester_resultant

P = IntPolynomial

small_polys = st.builds(
    P,
    st.lists(st.integers(min_value=-9, max_value=9), min_size=0, max_size=9),
)
nonzero_polys = small_polys.filter(lambda p: not p.is_zero)


class TestBasics:
    def test_canonical_trim(self):
        assert P([1, 2, 0, 0]).coeffs == (1, 2)
        assert P([]).is_zero and P([0, 0]).is_zero
        assert P([0, 0]).degree == -1

    def test_immutable_and_hashable(self):
        p = P([1, 2])
        with pytest.raises(AttributeError):
            p.coeffs = (3,)
        assert hash(p) == hash(P([1, 2]))

    def test_mul_matches_schoolbook_oracle(self):
        rng = random.Random(7)
        for _ in range(60):
            a = [rng.randint(-50, 50) for _ in range(rng.randint(1, 30))]
            b = [rng.randint(-50, 50) for _ in range(rng.randint(1, 30))]
            assert (P(a) * P(b)).coeffs == tuple(naive_mul(a, b))

    def test_mul_kronecker_path_large(self):
        # force the packed path with sizes above the cutoff and mixed signs
        rng = random.Random(11)
        a = [rng.randint(-(10**12), 10**12) for _ in range(90)]
        b = [rng.randint(-(10**12), 10**12) for _ in range(77)]
        assert (P(a) * P(b)).coeffs == tuple(naive_mul(a, b))

    def test_pow(self):
        p = P([1, 1])
        assert (p**4).coeffs == (1, 4, 6, 4, 1)
        assert (P([]) ** 0).coeffs == (1,)
        assert (p**0).coeffs == (1,)


class TestCompose:
    def test_binomial_expansion(self):
        # compose(t^2, t+1) = (t+1)^2
        assert compose(P([0, 0, 1]), P([1, 1])).coeffs == (1, 2, 1)

    def test_identity_left(self):
        p = P([3, 0, -2, 1])
        assert compose(P([0, 1]), p) == p

    def test_self_composition_of_t2_plus_t(self):
        # q(q(t)) for q = t^2 + t, frozen from the schoolbook oracle
        q = [0, 1, 1]
        expected = naive_compose(q, q)
        assert expected == [0, 1, 2, 2, 1]
        assert compose(P(q), P(q)).coeffs == tuple(expected)

    @settings(max_examples=60)
    @given(small_polys, small_polys, st.fractions(min_value=-4, max_value=4))
    def test_compose_evaluate_commute(self, p, q, a):
        assert evaluate_exact(compose(p, q), a) == evaluate_exact(p, evaluate_exact(q, a))


class TestEvaluate:
    def test_simple_points(self):
        assert evaluate_exact(P([0, 1, 1]), 3) == 12
        assert evaluate_exact(P([0, 1]), 0) == 0

    def test_quartic_at_one_oracle(self):
        coeffs = [0, 1, 1, 2, 1]
        assert horner_fraction(coeffs, Fraction(1)) == 5
        assert evaluate_exact(P(coeffs), 1) == 5

    def test_rational_point(self):
        p = P([1, 0, 4])  # 4t^2 + 1
        assert evaluate_exact(p, Fraction(1, 2)) == 2


class TestDivideExact:
    def test_linear_factor(self):
        assert divide_exact(P([0, 1, 1]), P([0, 1])).coeffs == (1, 1)

    def test_quartic_by_t_oracle(self):
        assert divide_exact(P([0, 1, 1, 2, 1]), P([0, 1])).coeffs == (1, 1, 2, 1)

    def test_not_divisible(self):
        with pytest.raises(NotDivisible):
            divide_exact(P([1, 0, 1]), P([-1, 1]))  # (t^2+1)/(t-1), remainder 2

    @settings(max_examples=60)
    @given(nonzero_polys, nonzero_polys)
    def test_roundtrip(self, p, q):
        assert divide_exact(p * q, q) == p


class TestResultant:
    def test_spec_small_cases(self):
        assert resultant(P([0, 1]), P([-1, 1])) == -1  # Res(t, t-1)
        assert abs(resultant(P([1, 0, 1]), P([-1, 1]))) == 2
        p = P([2, 0, 3, 1])
        assert resultant(p, p) == 0

    def test_sign_convention_matches_sylvester_determinant(self):
        rng = random.Random(3)
        for _ in range(120):
            a = [rng.randint(-6, 6) for _ in range(rng.randint(1, 7))]
            b = [rng.randint(-6, 6) for _ in range(rng.randint(1, 7))]
            pa, pb = P(a), P(b)
            if pa.is_zero or pb.is_zero:
                continue
            want = sylvester_resultant(list(pa.coeffs), list(pb.coeffs))
            assert want.denominator == 1
            assert resultant(pa, pb) == want.numerator

    def test_constant_edges(self):
        assert resultant(P([5]), P([1, 2, 3])) == 25  # 5^deg q
        assert resultant(P([1, 2, 3]), P([5])) == 25
        assert resultant(P([4]), P([7])) == 1  # empty Sylvester matrix

    @settings(max_examples=80)
    @given(nonzero_polys, nonzero_polys)
    def test_antisymmetry(self, p, q):
        sign = -1 if (p.degree * q.degree) % 2 else 1
        assert resultant(p, q) == sign * resultant(q, p)

    def test_monic_linear_is_evaluation(self):
        rng = random.Random(17)
        for _ in range(40):
            coeffs = [rng.randint(-9, 9) for _ in range(rng.randint(1, 8))]
            p = P(coeffs)
            if p.is_zero:
                continue
            a = rng.randint(-5, 5)
            q = P([-a, 1])
            # q monic linear with root a: |Res(p, q)| = |p(a)|
            assert abs(resultant(p, q)) == abs(evaluate_exact(p, a))


class TestGcdAndSquarefree:
    def test_squarefree_examples(self):
        assert squarefree_part(P([0, 0, 1])).coeffs == (0, 1)  # t^2 -> t
        assert squarefree_part(P([0, 1, 1])).coeffs == (0, 1, 1)
        sq = P([1, 1]) * P([1, 1]) * P([-2, 1])  # (t+1)^2 (t-2)
        assert squarefree_part(sq).coeffs == (-2, -1, 1)

    def test_gcd_matches_oracle(self):
        rng = random.Random(23)
        for _ in range(50):
            a = [rng.randint(-8, 8) for _ in range(rng.randint(1, 6))]
            b = [rng.randint(-8, 8) for _ in range(rng.randint(1, 6))]
            common = [rng.randint(-4, 4) for _ in range(rng.randint(1, 4))]
            pa, pb, pc = P(a), P(b), P(common)
            if pa.is_zero or pb.is_zero or pc.is_zero:
                continue
            g_lib = gcd(pa * pc, pb * pc).primitive_part()
            g_ora = naive_gcd(list((pa * pc).coeffs), list((pb * pc).coeffs))
            assert g_lib.coeffs == tuple(g_ora)

    def test_gcd_content_handling(self):
        assert gcd(P([6]), P([2, 4])).coeffs == (2,)
        assert gcd(P([]), P([-3, -6])).coeffs == (3, 6)


class TestSerialization:
    def test_roundtrip(self):
        p = P([-3, 0, 7, 120])
        text = serialize(p)
        assert text.splitlines()[0] == "deg=3"
        assert deserialize(text) == p

    def test_zero_poly(self):
        assert serialize(P([])) == "deg=-1\n"
        assert deserialize("deg=-1\n").is_zero

    def test_rejects_noncanonical(self):
        with pytest.raises(ValueError):
            deserialize("deg=2\n1\n1\n0\n")


class TestResultantRootsCrosscheck:
    def test_resultant_matches_root_product(self):
        # |Res(p, q)| = |lead(q)|^deg(p) * prod |p(beta_j)| over the roots of q,
        # cross-validated against certified numeric roots at 256 bits
        import random

        import mpmath as mp

        from pcflab.rootfinder import all_roots

        rng = random.Random(61)
        done = 0
        while done < 10:
            p = P([rng.randint(-9, 9) for _ in range(rng.randint(2, 6))])
            q = P([rng.randint(-9, 9) for _ in range(rng.randint(3, 6))])
            if p.is_zero or q.is_zero or q.degree < 1:
                continue
            q = squarefree_part(q)
            if q.degree < 1:
                continue
            r = resultant(p, q)
            if r == 0:
                continue
            roots = all_roots(q, 256)
            with mp.workprec(360):
                acc = mp.mpf(abs(q.lead)) ** p.degree
                for b in roots.roots:
                    val = mp.mpc(0)
                    for c in reversed(p.coeffs):
                        val = val * b.center + c
                    acc *= abs(val)
                assert abs(acc - abs(r)) / abs(r) < mp.mpf(10) ** -20
            done += 1
