"""Outward-rounded ball arithmetic: containment under random expressions."""

from __future__ import annotations

import random
from fractions import Fraction

import mpmath as mp
import pytest

import pcflab.balls as bl


def contains(ball: bl.ComplexBall, exact: mp.mpc) -> bool:
    return abs(ball.center - exact) <= ball.radius


class TestContainment:
    def test_random_expressions(self):
        # evaluate random op chains both in ball arithmetic at 64 bits and in
        # plain mpmath at 400 bits: the high-precision value must stay inside
        rng = random.Random(13)
        for _ in range(60):
            qs = [
                Fraction(rng.randint(-50, 50), rng.randint(1, 20))
                for _ in range(6)
            ]
            ops = [rng.choice("ams") for _ in range(5)]
            with mp.workprec(64):
                acc_b = bl.exact_ball(qs[0])
                for q, op in zip(qs[1:], ops):
                    other = bl.exact_ball(q)
                    if op == "a":
                        acc_b = bl.badd(acc_b, other)
                    elif op == "m":
                        acc_b = bl.bmul(acc_b, other)
                    else:
                        acc_b = bl.badd(bl.bsqr(acc_b), other)
            with mp.workprec(400):
                acc = mp.mpf(qs[0].numerator) / qs[0].denominator
                for q, op in zip(qs[1:], ops):
                    v = mp.mpf(q.numerator) / q.denominator
                    if op == "a":
                        acc = acc + v
                    elif op == "m":
                        acc = acc * v
                    else:
                        acc = acc * acc + v
                assert contains(acc_b, mp.mpc(acc))

    def test_div_containment(self):
        with mp.workprec(64):
            a = bl.exact_ball(Fraction(22, 7))
            b = bl.exact_ball(Fraction(355, 113))
            q = bl.bdiv(a, b)
        with mp.workprec(300):
            exact = (mp.mpf(22) / 7) / (mp.mpf(355) / 113)
            assert contains(q, mp.mpc(exact))

    def test_div_by_zero_ball(self):
        with mp.workprec(64):
            z = bl.ball(0, 0.5)
            with pytest.raises(ZeroDivisionError):
                bl.bdiv(bl.exact_ball(1), z)

    def test_abs_bounds_order(self):
        with mp.workprec(64):
            b = bl.ball(mp.mpc(3, 4), mp.mpf("0.25"))
            lo, hi = b.abs_bounds()
            assert lo <= 5 <= hi
            assert 4.7 < lo and hi < 5.3

    def test_log_plus_interval(self):
        with mp.workprec(64):
            inside = bl.ball(mp.mpc("0.5"), mp.mpf("0.1"))
            assert bl.log_plus_interval(inside) == (0, 0)
            straddle = bl.ball(mp.mpc("1.0"), mp.mpf("0.5"))
            lo, hi = bl.log_plus_interval(straddle)
            assert lo == 0 and hi >= mp.log(mp.mpf("1.5")) * (1 - mp.mpf(2) ** -40)

    def test_dist_bounds(self):
        with mp.workprec(64):
            a = bl.ball(0, mp.mpf("0.125"))
            b = bl.ball(1, mp.mpf("0.25"))
            lo, hi = bl.dist_bounds(a, b)
            assert float(lo) == pytest.approx(0.625, abs=1e-12)
            assert float(hi) == pytest.approx(1.375, abs=1e-12)
            assert bl.disjoint(a, b)
            assert not bl.disjoint(a, bl.ball(0.25, mp.mpf("0.5")))

    def test_pow_int(self):
        with mp.workprec(96):
            b = bl.exact_ball(Fraction(3, 2))
            p = bl.bpow_int(b, 7)
        with mp.workprec(300):
            assert contains(p, mp.mpc(mp.mpf(3) / 2) ** 7)
        with mp.workprec(96):
            assert bl.bpow_int(b, 0).center == 1
