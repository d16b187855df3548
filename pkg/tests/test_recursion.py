import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from summa import (
    FormalPowerSeries,
    GaussianRational,
    MomentWeight,
    NotFound,
    Recursion,
    approx_recursion,
    borel_transform,
    generate_from_recursion,
    hankel_det,
    hankel_report,
    min_recursion,
    rational_reconstruct,
    verify_recursion,
)
from summa.errors import (
    EmptyInput,
    InsufficientCoefficients,
    RecursionNotVerified,
)

from conftest import (
    cofactor_det,
    euler_coeffs,
    gr,
    random_exact_recursion,
    random_gaussian_rational,
    taylor_times_denominator,
    unweighted_sequence,
)


def alternating(n):
    return [gr((-1) ** p) for p in range(1, n + 1)]


class TestHankelDet:
    def test_two_by_two_alternating(self):
        # H_2 = [[-1, 1], [1, -1]]
        assert hankel_det(alternating(3), 2) == gr(0)

    def test_one_by_one(self):
        assert hankel_det(alternating(1), 1) == gr(-1)

    def test_arithmetic_progression_rank_two(self):
        d = [gr(k) for k in (1, 2, 3, 4, 5)]
        det = hankel_det(d, 3)
        assert det == cofactor_det([[d[i + j] for j in range(3)]
                                    for i in range(3)])
        assert det == gr(0)

    def test_insufficient(self):
        with pytest.raises(InsufficientCoefficients):
            hankel_det(alternating(4), 3)

    def test_against_cofactor_oracle(self, rng):
        for _ in range(15):
            n = rng.randint(1, 4)
            d = [random_gaussian_rational(rng, 9) for _ in range(2 * n - 1)]
            m = [[d[i + j] for j in range(n)] for i in range(n)]
            assert hankel_det(d, n) == cofactor_det(m)

    def test_float_mode_zero(self):
        d = [float(k) for k in (1, 2, 3, 4, 5)]
        assert abs(hankel_det(d, 3)) < 1e-10


class TestMinRecursion:
    def test_euler(self):
        rec = min_recursion(alternating(20))
        assert (rec.r, rec.a) == (1, (gr(-1),))

    def test_zero_sequence(self):
        out = min_recursion([gr(0)] * 18)
        assert isinstance(out, NotFound)
        assert out.reason == "zero_sequence"

    def test_two_step_pattern(self):
        # d_{2p+1} = 2^p, d_{2p} = 0: satisfies d_j = 2 d_{j-2}
        d = [gr(2 ** (j // 2)) if j % 2 == 1 else gr(0)
             for j in range(1, 21)]
        rec = min_recursion(d)
        assert (rec.r, rec.a) == (2, (gr(0), gr(2)))

    def test_insufficient_window(self):
        rec = Recursion([gr(0), gr(0), gr(1)], MomentWeight.ones())
        d = unweighted_sequence(rec, [gr(1), gr(2), gr(3)], 5)
        out = min_recursion(d)
        assert isinstance(out, NotFound)
        assert out.reason == "insufficient_window"

    def test_polynomial_sequence_reports_rank(self):
        d = [gr(1), gr(2)] + [gr(0)] * 16
        out = min_recursion(d)
        assert isinstance(out, NotFound)
        assert out.reason == "zero_top_coefficient"
        assert out.rank == 2

    def test_empty(self):
        with pytest.raises(EmptyInput):
            min_recursion([])

    def test_float_mode(self):
        d = [float((-1) ** p) for p in range(1, 25)]
        rec = min_recursion(d)
        assert rec.r == 1
        assert abs(rec.a[0] - (-1.0)) < 1e-9

    @given(st.integers(min_value=0, max_value=10 ** 6))
    @settings(max_examples=25, deadline=None)
    def test_roundtrip_random_exact(self, seed):
        rng = random.Random(seed)
        r = rng.randint(1, 5)
        rec = random_exact_recursion(rng, r, bound=9)
        seeds = [random_gaussian_rational(rng, 9) for _ in range(r)]
        d = unweighted_sequence(rec, seeds, 4 * r + 4)
        try:
            if not hankel_det(d, r):
                return  # degenerate draw: true rank below r
        except InsufficientCoefficients:
            return
        out = min_recursion(d)
        assert isinstance(out, Recursion)
        assert out.a == rec.a

    def test_scale_invariance(self, rng):
        rec = random_exact_recursion(rng, 3, bound=7)
        seeds = [gr(1), gr(2), gr(Fraction(1, 3))]
        d = unweighted_sequence(rec, seeds, 16)
        c = gr(Fraction(7, 3), Fraction(-2, 5))
        scaled = [c * x for x in d]
        out1 = min_recursion(d)
        out2 = min_recursion(scaled)
        assert isinstance(out1, Recursion) and isinstance(out2, Recursion)
        assert out1.a == out2.a


class TestHankelReport:
    def test_pattern_on_roundtrip_data(self, rng):
        rec = random_exact_recursion(rng, 3, bound=5)
        seeds = [gr(1), gr(-1), gr(2)]
        d = unweighted_sequence(rec, seeds, 40)
        if not hankel_det(d, 3):
            pytest.skip("degenerate draw")
        rep = hankel_report(d, 3, extra=3)
        assert rep.rank == 3
        dets = dict(rep.determinants)
        assert dets[3]
        assert not dets[4] and not dets[5] and not dets[6]
        assert rep.extra_zero_checks == 3


class TestVerifyRecursion:
    def test_euler_holds(self):
        rec = Recursion([gr(-1)], MomentWeight.ones())
        rep = verify_recursion(alternating(12), rec)
        assert rep.exact_hold
        assert all(v == gr(0) for _, v in rep.residuals)

    def test_wrong_sign_residual(self):
        rec = Recursion([gr(1)], MomentWeight.ones())
        rep = verify_recursion(alternating(12), rec)
        assert dict(rep.residuals)[2] == gr(2)

    def test_window_edge(self):
        d = alternating(5)
        rec = Recursion([gr(0)] * 3 + [gr(1)], MomentWeight.ones())
        rep = verify_recursion(d, rec)
        assert len(rep.residuals) == 1


class TestRationalReconstruct:
    def test_euler(self):
        d = alternating(20)
        rec = min_recursion(d)
        rf = rational_reconstruct(d, rec)
        assert rf.num.coeffs == (gr(0), gr(-1))
        assert rf.den.coeffs == (gr(1), gr(1))
        # brute-force Taylor check: den * sum d_p z^p == num through order 8
        taylor = [gr(0)] + d[:8]
        prod = taylor_times_denominator(taylor, list(rf.den.coeffs), 8)
        num = list(rf.num.coeffs) + [gr(0)] * 7
        assert prod == num[:9]

    def test_geometric(self):
        c = gr(Fraction(3, 2))
        d = [c ** p for p in range(1, 15)]
        rec = min_recursion(d)
        rf = rational_reconstruct(d, rec)
        assert rf.num.coeffs == (gr(0), c)
        assert rf.den.coeffs == (gr(1), -c)

    def test_two_step(self):
        d = [gr(2 ** (j // 2)) if j % 2 == 1 else gr(0)
             for j in range(1, 21)]
        rec = min_recursion(d)
        rf = rational_reconstruct(d, rec)
        assert rf.num.coeffs == (gr(0), gr(1))
        assert rf.den.coeffs == (gr(1), gr(0), gr(-2))
        taylor = [gr(0)] + d[:8]
        prod = taylor_times_denominator(taylor, list(rf.den.coeffs), 8)
        assert prod == [gr(0), gr(1)] + [gr(0)] * 7

    def test_taylor_roundtrip(self, rng):
        rec = random_exact_recursion(rng, 2, bound=6)
        d = unweighted_sequence(rec, [gr(1), gr(1, 2)], 14)
        out = min_recursion(d)
        if isinstance(out, NotFound):
            pytest.skip("degenerate draw")
        rf = rational_reconstruct(d, out)
        tay = rf.taylor(14)
        assert tay[0] == gr(0)
        assert tay[1:] == d[:14]

    def test_unverified_recursion_rejected(self):
        rec = Recursion([gr(1)], MomentWeight.ones())
        with pytest.raises(RecursionNotVerified):
            rational_reconstruct(alternating(10), rec)


class TestApproxRecursion:
    def test_perturbed_euler(self):
        # f_j = -j f_{j-1} + 2^j: equation residual ledger b_j = 2^j
        f = [-1.0]
        for j in range(2, 37):
            f.append(-j * f[-1] + 2.0 ** j)
        cert = approx_recursion(f, MomentWeight.factorial(1), r_max=3)
        assert cert.rec.r == 1
        assert abs(cert.rec.a[0] + 1.0) < 0.05
        assert cert.M == 2.0
        assert math.isfinite(cert.C) and cert.C > 0

    def test_exact_data_zero_residual(self):
        rec = Recursion([gr(-1)], MomentWeight.factorial(1))
        f = generate_from_recursion(rec, [gr(-1)], order=30)
        cert = approx_recursion(
            [complex(c) for c in f.floatified().coefficients()],
            MomentWeight.factorial(1), r_max=2)
        assert cert.max_normalized_residual == 0.0
        assert cert.rec.r == 1

    def test_white_noise_not_found(self):
        rng = random.Random(7)
        d = [rng.uniform(1.0, 2.0) for _ in range(40)]
        out = approx_recursion(d, MomentWeight.ones(), r_max=3,
                               M_grid=(1.0,), cap=1e-6)
        assert isinstance(out, NotFound)
