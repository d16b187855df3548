"""Shared helpers: exact-coefficient builders and brute-force oracles.

The oracles here are deliberately independent of the library paths they
check: determinants by cofactor expansion, Taylor coefficients by direct
series convolution, operator images by the closed m-fold formulas.
"""

import math
import random
from fractions import Fraction

import pytest

from summa import GaussianRational, MomentWeight, Recursion


def gr(re, im=0):
    return GaussianRational(Fraction(re), Fraction(im))


def euler_coeffs(order, start=1):
    """f_p = (-1)^p p! as exact coefficients for p = start..order."""
    return [gr((-1) ** p * math.factorial(p)) for p in range(start, order + 1)]


def cofactor_det(m):
    """Reference determinant by cofactor expansion (exact, O(n!))."""
    n = len(m)
    if n == 1:
        return m[0][0]
    total = gr(0)
    sign = gr(1)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total = total + sign * m[0][j] * cofactor_det(minor)
        sign = -sign
    return total


def taylor_times_denominator(taylor, den, order):
    """Convolution (sum_p c_p z^p) * den(z) truncated at `order`.

    Brute-force oracle: a correct reconstruction satisfies
    taylor * den == num through the window.
    """
    out = []
    for p in range(order + 1):
        acc = gr(0)
        for k in range(min(p, len(den) - 1) + 1):
            c = taylor[p - k] if p - k < len(taylor) else gr(0)
            acc = acc + den[k] * c
        out.append(acc)
    return out


def random_fraction(rng, bound=20, nonzero=False):
    while True:
        num = rng.randint(-bound, bound)
        den = rng.randint(1, bound)
        if not nonzero or num != 0:
            return Fraction(num, den)


def random_gaussian_rational(rng, bound=20, nonzero=False):
    while True:
        v = GaussianRational(random_fraction(rng, bound),
                            random_fraction(rng, bound))
        if not nonzero or v:
            return v


def random_exact_recursion(rng, r, weight=None, bound=20):
    """Recursion with random Gaussian-rational a_i, a_r nonzero."""
    a = [random_gaussian_rational(rng, bound) for _ in range(r - 1)]
    a.append(random_gaussian_rational(rng, bound, nonzero=True))
    return Recursion(a, weight or MomentWeight.ones())


def unweighted_sequence(rec, seeds, n):
    """d_j = sum a_k d_{j-k}, exact, independent of the library generator."""
    d = list(seeds)
    a = list(rec.a)
    for j in range(len(seeds) + 1, n + 1):
        acc = gr(0)
        for k in range(1, rec.r + 1):
            acc = acc + a[k - 1] * d[j - 1 - k]
        d.append(acc)
    return d


@pytest.fixture
def rng():
    return random.Random(20240817)
