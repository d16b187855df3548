import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from summa import (
    FormalPowerSeries,
    GaussianRational,
    MomentWeight,
    Recursion,
    borel_transform,
    generate_from_recursion,
    gevrey_order_estimate,
)
from summa.errors import (
    IndexOutOfRange,
    InsufficientData,
    SeedLengthMismatch,
)

from conftest import euler_coeffs, gr


class TestCoeffAccess:
    def test_euler_coeff(self):
        f = FormalPowerSeries.from_coefficients(euler_coeffs(10))
        assert f.coeff(3) == gr(-6)

    def test_zero_series(self):
        f = FormalPowerSeries.zero(order=10)
        assert f.coeff(5) == gr(0)

    def test_recursion_generated(self):
        # f_j = -j f_{j-1} from f_1 = -1, iterated by hand
        rec = Recursion([gr(-1)], MomentWeight.factorial(1))
        f = generate_from_recursion(rec, [gr(-1)], order=6)
        assert f.coeff(4) == gr(24)

    def test_out_of_range(self):
        f = FormalPowerSeries.from_coefficients([gr(1), gr(2)])
        with pytest.raises(IndexOutOfRange):
            f.coeff(3)
        with pytest.raises(IndexOutOfRange):
            f.coeff(0)

    def test_coeff_idempotent(self):
        calls = []

        def fn(p):
            calls.append(p)
            return gr(p)

        f = FormalPowerSeries.from_function(fn, order=5, exact=True)
        first = f.coeff(3)
        second = f.coeff(3)
        assert first is second
        assert calls == [3]

    def test_split_constant(self):
        f = FormalPowerSeries.from_coefficients([gr(7), gr(1), gr(2)], start=0)
        c0, tail = f.split_constant()
        assert c0 == gr(7)
        assert tail.start == 1
        assert tail.coeff(1) == gr(1)


class TestMomentWeight:
    def test_w0_is_one(self):
        for w in (MomentWeight.factorial(2), MomentWeight.qpower(2),
                  MomentWeight.ones()):
            assert w.value(0) == 1

    def test_factorial_one_exact(self):
        w = MomentWeight.factorial(1)
        assert [w.value(p) for p in range(6)] == [1, 1, 2, 6, 24, 120]

    def test_qpower_exact_fraction(self):
        w = MomentWeight.qpower(Fraction(3, 2))
        assert w.value(3) == Fraction(27, 8)

    def test_custom_positivity_enforced(self):
        w = MomentWeight.custom(values=[1, 2, -3])
        with pytest.raises(ValueError):
            w.value(2)

    def test_custom_w0_enforced(self):
        with pytest.raises(ValueError):
            MomentWeight.custom(values=[2, 3])


class TestBorelTransform:
    def test_euler_becomes_alternating(self):
        f = FormalPowerSeries.from_coefficients(euler_coeffs(12))
        b = borel_transform(f, MomentWeight.factorial(1))
        assert [b.coeff(p) for p in range(1, 6)] == \
            [gr(-1), gr(1), gr(-1), gr(1), gr(-1)]

    def test_identity_weight(self):
        f = FormalPowerSeries.from_coefficients([gr(3), gr(1, 2), gr(-5)])
        b = borel_transform(f, MomentWeight.ones())
        assert b.coefficients() == f.coefficients()

    def test_qpower_cancellation(self):
        q = Fraction(2)
        coeffs = [gr(q ** (p * (p - 1) // 2) * 2 ** p) for p in range(1, 9)]
        f = FormalPowerSeries.from_coefficients(coeffs)
        b = borel_transform(f, MomentWeight.qpower(q))
        assert [b.coeff(p) for p in range(1, 9)] == \
            [gr(2 ** p) for p in range(1, 9)]

    def test_exactness_preserved(self):
        f = FormalPowerSeries.from_coefficients(euler_coeffs(8))
        assert borel_transform(f, MomentWeight.factorial(1)).exact

    @given(st.lists(st.fractions(min_value=-5, max_value=5,
                                 max_denominator=9),
                    min_size=6, max_size=12))
    @settings(max_examples=40, deadline=None)
    def test_double_factorial_equals_squared_custom(self, vals):
        f = FormalPowerSeries.from_coefficients([gr(v) for v in vals])
        w1 = MomentWeight.factorial(1)
        twice = borel_transform(borel_transform(f, w1), w1)
        squared = MomentWeight.custom(
            values=[Fraction(math.factorial(p)) ** 2
                    for p in range(len(vals) + 1)])
        direct = borel_transform(f, squared)
        assert twice.coefficients() == direct.coefficients()


class TestGenerateFromRecursion:
    def test_euler_example(self):
        rec = Recursion([gr(-1)], MomentWeight.factorial(1))
        f = generate_from_recursion(rec, [gr(-1)], order=5)
        assert f.coefficients() == [gr(-1), gr(2), gr(-6), gr(24), gr(-120)]

    def test_annihilating_recursion(self):
        rec = Recursion([gr(0)], MomentWeight.factorial(1))
        f = generate_from_recursion(rec, [gr(3)], order=5)
        assert f.coefficients() == [gr(3), gr(0), gr(0), gr(0), gr(0)]

    def test_order_two_hand_iteration(self):
        # f_3 = 3!*(2*f_1/1!) = 12, f_4 = 4!*2*f_2/2! = 0, f_5 = 5!*2*f_3/3! = 480
        rec = Recursion([gr(0), gr(2)], MomentWeight.factorial(1))
        f = generate_from_recursion(rec, [gr(1), gr(0)], order=5)
        assert [f.coeff(3), f.coeff(4), f.coeff(5)] == [gr(12), gr(0), gr(480)]

    def test_seed_length_mismatch(self):
        rec = Recursion([gr(0), gr(2)], MomentWeight.factorial(1))
        with pytest.raises(SeedLengthMismatch):
            generate_from_recursion(rec, [gr(1)], order=5)

    @given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=7),
                    min_size=2, max_size=3),
           st.fractions(min_value=-4, max_value=4, max_denominator=7).filter(bool))
    @settings(max_examples=30, deadline=None)
    def test_borel_of_generated_satisfies_unweighted_recursion(self, a_head, a_top):
        a = [gr(v) for v in a_head] + [gr(a_top)]
        rec = Recursion(a, MomentWeight.factorial(1))
        seeds = [gr(1)] * len(a)
        f = generate_from_recursion(rec, seeds, order=4 * len(a) + 4)
        d = borel_transform(f, MomentWeight.factorial(1)).coefficients()
        r = len(a)
        for j in range(r + 1, len(d) + 1):
            acc = gr(0)
            for k in range(1, r + 1):
                acc = acc + a[k - 1] * d[j - 1 - k]
            assert d[j - 1] == acc


class TestGevreyEstimate:
    def test_factorial_growth(self):
        f = FormalPowerSeries.from_function(
            lambda p: gr(math.factorial(p)), order=200, exact=True)
        assert abs(gevrey_order_estimate(f, 200) - 1.0) < 0.05

    def test_bounded_coefficients(self):
        f = FormalPowerSeries.from_function(lambda p: gr(1), order=50,
                                            exact=True)
        assert gevrey_order_estimate(f, 50) == 0.0

    def test_squared_factorial(self):
        f = FormalPowerSeries.from_function(
            lambda p: gr(math.factorial(p) ** 2), order=200, exact=True)
        assert abs(gevrey_order_estimate(f, 200) - 2.0) < 0.05

    def test_insufficient_data(self):
        f = FormalPowerSeries.from_coefficients([gr(1)] * 5)
        with pytest.raises(InsufficientData):
            gevrey_order_estimate(f, 5)
