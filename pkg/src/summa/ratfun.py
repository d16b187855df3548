"""Polynomials, rational functions, singular directions, growth checks.

Rational functions are kept normalized with h(0) = 1; in exact mode the
numerator and denominator are reduced by their exact gcd.  Root finding
goes through the companion matrix with Newton polishing, which meets the
residual target comfortably at the degrees this library produces.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .coeffs import exactify, floatify, is_exact, zero_like
from .errors import (
    DegreeZero,
    Failure,
    NearPole,
    RootsNotConverged,
)

TWO_PI = 2.0 * math.pi


class Polynomial:
    """Dense polynomial, coefficients ascending, trailing zeros trimmed."""

    __slots__ = ("coeffs", "exact")

    def __init__(self, coeffs, exact=None):
        coeffs = list(coeffs)
        if exact is None:
            exact = all(is_exact(c) for c in coeffs)
        if exact:
            coeffs = [exactify(c) for c in coeffs]
            while coeffs and not coeffs[-1]:
                coeffs.pop()
        else:
            coeffs = [floatify(c) for c in coeffs]
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
        self.coeffs = tuple(coeffs)
        self.exact = exact

    @property
    def degree(self) -> int:
        # zero polynomial reports degree -1
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, z):
        if not self.coeffs:
            return zero_like(self.exact) if is_exact(z) else 0j
        if self.exact and is_exact(z):
            acc = self.coeffs[-1]
            for c in reversed(self.coeffs[:-1]):
                acc = acc * exactify(z) + c
            return acc
        zc = complex(floatify(z))
        acc = complex(floatify(self.coeffs[-1]))
        for c in reversed(self.coeffs[:-1]):
            acc = acc * zc + complex(floatify(c))
        return acc

    def deriv(self):
        if len(self.coeffs) <= 1:
            return Polynomial([], exact=self.exact)
        return Polynomial(
            [c * (i + 1) for i, c in enumerate(self.coeffs[1:])],
            exact=self.exact,
        )

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Polynomial([], exact=self.exact and other.exact)
        exact = self.exact and other.exact
        a = self.coeffs if exact else [floatify(c) for c in self.coeffs]
        b = other.coeffs if exact else [floatify(c) for c in other.coeffs]
        out = [zero_like(exact)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return Polynomial(out, exact=exact)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        exact = self.exact and other.exact
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for i in range(n):
            a = self.coeffs[i] if i < len(self.coeffs) else zero_like(self.exact)
            b = other.coeffs[i] if i < len(other.coeffs) else zero_like(other.exact)
            if not exact:
                a, b = floatify(a), floatify(b)
            out.append(a + b)
        return Polynomial(out, exact=exact)

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], exact=self.exact)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Polynomial([x * c for x in self.coeffs], exact=None)

    def norm_inf(self) -> float:
        return max((abs(floatify(c)) for c in self.coeffs), default=0.0)

    def floatified(self):
        return Polynomial([floatify(c) for c in self.coeffs], exact=False)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"


def _poly_divmod_exact(a: Polynomial, b: Polynomial):
    if b.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    q = [exactify(0)] * max(0, a.degree - b.degree + 1)
    rem = list(a.coeffs)
    bn = b.coeffs[-1]
    for i in range(len(rem) - 1, b.degree - 1, -1):
        if len(rem) <= i or not rem[i]:
            continue
        f = rem[i] / bn
        q[i - b.degree] = f
        for j, bc in enumerate(b.coeffs):
            rem[i - b.degree + j] = rem[i - b.degree + j] - f * bc
    return Polynomial(q), Polynomial(rem)


def poly_gcd_exact(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd over the Gaussian rationals."""
    if not (a.exact and b.exact):
        raise TypeError("exact gcd needs exact polynomials")
    while not b.is_zero:
        _, r = _poly_divmod_exact(a, b)
        a, b = b, r
    if a.is_zero:
        return a
    top = a.coeffs[-1]
    return Polynomial([c / top for c in a.coeffs])


# ---------------------------------------------------------------------------
# Root finding


def roots(p: Polynomial, residual_tol: float = 1e-12,
          cluster_tol: float = 1e-8, polish_iters: int = 12):
    """All complex roots with multiplicities (clustered within cluster_tol).

    Companion-matrix eigenvalues followed by Newton polishing; residuals
    are required to satisfy |p(root)| <= residual_tol * ||p|| scaled by
    max(1, |root|)^deg.
    """
    if p.degree < 1:
        raise DegreeZero("root finding needs degree >= 1")
    pf = p.floatified()
    dpf = pf.deriv()
    cs = [complex(c) for c in pf.coeffs]
    rts = [complex(r) for r in np.roots(cs[::-1])]
    for idx, r in enumerate(rts):
        x = r
        for _ in range(polish_iters):
            fx = pf(x)
            dfx = dpf(x)
            if abs(dfx) < 1e-300:
                break
            step = fx / dfx
            if abs(step) < 1e-17 * max(1.0, abs(x)):
                break
            x -= step
        # keep the polish only if it did not drift to a worse residual
        rts[idx] = x if abs(pf(x)) <= abs(pf(r)) else r

    norm = pf.norm_inf()
    for r in rts:
        bound = residual_tol * norm * max(1.0, abs(r)) ** p.degree
        if abs(pf(r)) > max(bound, 1e-250):
            raise RootsNotConverged(
                f"residual {abs(pf(r)):.3e} at root {r:.6g} exceeds {bound:.3e}"
            )

    clusters = []  # [sum, count]
    for r in sorted(rts, key=lambda z: (z.real, z.imag)):
        for cl in clusters:
            c = cl[0] / cl[1]
            if abs(r - c) <= cluster_tol * max(1.0, abs(c)):
                cl[0] += r
                cl[1] += 1
                break
        else:
            clusters.append([r, 1])
    out = [(cl[0] / cl[1], cl[1]) for cl in clusters]
    out.sort(key=lambda t: (cmath.phase(t[0]) % TWO_PI, abs(t[0])))
    return out


# ---------------------------------------------------------------------------
# Rational functions


class RationalFunction:
    """num/den with den(0) = 1; exact mode reduces by the exact gcd."""

    __slots__ = ("num", "den", "_pole_cache")

    def __init__(self, num: Polynomial, den: Polynomial):
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        d0 = den.coeffs[0] if den.coeffs else None
        if d0 is None or (not d0 if is_exact(d0) else d0 == 0):
            raise ValueError("denominator must not vanish at the origin")
        exact = num.exact and den.exact
        if exact and not num.is_zero:
            g = poly_gcd_exact(num, den)
            if g.degree >= 1:
                num, _ = _poly_divmod_exact(num, g)
                den, _ = _poly_divmod_exact(den, g)
            d0 = den.coeffs[0]
            num = Polynomial([c / d0 for c in num.coeffs])
            den = Polynomial([c / d0 for c in den.coeffs])
        else:
            d0 = den.coeffs[0]
            if is_exact(d0) and exact:
                num = Polynomial([c / d0 for c in num.coeffs])
                den = Polynomial([c / d0 for c in den.coeffs])
            else:
                d0 = floatify(d0)
                num = Polynomial([floatify(c) / d0 for c in num.coeffs], exact=False)
                den = Polynomial([floatify(c) / d0 for c in den.coeffs], exact=False)
        self.num = num
        self.den = den
        self._pole_cache = None

    @property
    def exact(self):
        return self.num.exact and self.den.exact

    def poles(self):
        if self._pole_cache is None:
            if self.den.degree < 1:
                self._pole_cache = []
            else:
                self._pole_cache = roots(self.den)
        return self._pole_cache

    def eval(self, z, pole_distance: float = 1e-14):
        """g(z)/h(z) by Horner; NearPole when z is within 1e-14 of a pole."""
        zc = complex(floatify(z))
        for root, _ in self.poles():
            if abs(zc - root) < pole_distance:
                raise NearPole(f"z = {zc:.6g} within {pole_distance} of pole {root:.6g}")
        return complex(floatify(self.num(zc))) / complex(floatify(self.den(zc)))

    __call__ = eval

    def taylor(self, order: int):
        """Coefficients c_0..c_order of the expansion at 0 (h(0) = 1):

            c_p = g_p - sum_{k>=1} h_k c_{p-k}
        """
        exact = self.exact
        g = self.num.coeffs
        h = self.den.coeffs
        c = []
        for p in range(order + 1):
            acc = g[p] if p < len(g) else zero_like(exact)
            for k in range(1, min(p, len(h) - 1) + 1):
                acc = acc - h[k] * c[p - k]
            c.append(acc)
        return c

    def __repr__(self):
        return f"RationalFunction(num={self.num!r}, den={self.den!r})"


# ---------------------------------------------------------------------------
# Singular directions


@dataclass(frozen=True)
class DirectionSet:
    """Arguments (mod 2*pi) of denominator roots, with multiplicity."""

    args: tuple
    multiplicities: tuple
    roots: tuple

    def __iter__(self):
        return iter(self.args)


def singular_directions(rec, merge_tol: float = 1e-9) -> DirectionSet:
    """Arguments of the roots of h(z) = 1 - a_1 z - ... - a_r z^r.

    Roots sharing an argument (different moduli) merge into one direction
    with summed multiplicity; the individual roots stay listed.
    """
    h = Polynomial([floatify(c) for c in rec.h_coefficients()], exact=False)
    rts = roots(h)
    merged = []  # [arg, mult, [roots]]
    for root, mult in rts:
        arg = cmath.phase(root) % TWO_PI
        for m in merged:
            d = abs(arg - m[0])
            if min(d, TWO_PI - d) <= merge_tol:
                m[1] += mult
                m[2].append(root)
                break
        else:
            merged.append([arg, mult, [root]])
    merged.sort(key=lambda m: m[0])
    return DirectionSet(
        args=tuple(m[0] for m in merged),
        multiplicities=tuple(m[1] for m in merged),
        roots=tuple(r for m in merged for r in m[2]),
    )


def angular_distance(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def is_direction_summable(d: float, dirs: DirectionSet, delta: float) -> bool:
    """True iff d stays more than delta (mod 2*pi) from every singular arg."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return all(angular_distance(d, a) > delta for a in dirs.args)


# ---------------------------------------------------------------------------
# Growth certification


@dataclass(frozen=True)
class ExpOrder:
    k: float


@dataclass(frozen=True)
class MGrowth:
    m_of_t: object  # callable t -> M(t)


@dataclass(frozen=True)
class GrowthCertificate:
    c1: float
    c2: float
    samples: int


def _as_evaluator(b):
    if callable(b):
        return b
    if isinstance(b, RationalFunction):
        return b.eval
    # formal power series: partial sums of the available window
    def ev(z):
        zc = complex(z)
        acc = 0j
        zp = zc ** b.start
        for p in range(b.start, b.order + 1):
            acc += complex(floatify(b.coeff(p))) * zp
            zp *= zc
        return acc
    return ev


def growth_certificate(b, sector, kind, samples: int = 48,
                       r_min: float = 0.1, r_max: float = 10.0):
    """Fit (c1, c2) with |b(z)| <= c1 * exp(c2 |z|^k) on rays in the sector
    (or c1 * exp(M(c2 |z|)) for MGrowth).

    This certifies the bound on the sampled grid only: when the residual
    against the fitted envelope keeps growing toward the largest radii,
    the claimed order is rejected with Failure.
    """
    d, opening = sector
    ev = _as_evaluator(b)
    ray_angles = [d - 0.45 * opening, d, d + 0.45 * opening]
    radii = [r_min * (r_max / r_min) ** (i / (samples - 1))
             for i in range(samples)]

    per_ray = []
    for ang in ray_angles:
        pts = []
        for r in radii:
            z = r * cmath.exp(1j * ang)
            try:
                v = abs(ev(z))
            except NearPole:
                continue
            if v <= 0 or not math.isfinite(v):
                continue
            pts.append((r, math.log(v)))
        per_ray.append(pts)

    if isinstance(kind, ExpOrder):
        xfun = lambda r: r ** kind.k
    elif isinstance(kind, MGrowth):
        return _growth_certificate_mgrowth(per_ray, kind)
    else:
        raise TypeError(f"unknown growth kind {kind!r}")

    # slope per ray; the certificate must cover the steepest ray
    c2 = 0.0
    for pts in per_ray:
        if len(pts) < 4:
            continue
        xs = [xfun(r) for r, _ in pts]
        ys = [y for _, y in pts]
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        sxx = sum((x - mx) ** 2 for x in xs)
        if sxx == 0:
            continue
        slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
        c2 = max(c2, slope)

    resid = []
    n_used = 0
    for pts in per_ray:
        for r, y in pts:
            resid.append((r, y - c2 * xfun(r)))
            n_used += 1
    if not resid:
        return Failure("no usable samples")
    resid.sort(key=lambda t: t[0])
    quarter = max(1, len(resid) // 4)
    head = sum(v for _, v in resid[:quarter]) / quarter
    tail = sum(v for _, v in resid[-quarter:]) / quarter
    if tail > head + math.log(10.0):
        return Failure("residual grows with |z|; claimed order rejected",
                       details={"head": head, "tail": tail})
    c1 = math.exp(max(v for _, v in resid))
    return GrowthCertificate(c1=c1, c2=max(c2, 0.0), samples=n_used)


def _growth_certificate_mgrowth(per_ray, kind):
    m = kind.m_of_t
    for c2 in [2.0 ** e for e in range(-6, 7)]:
        resid = []
        for pts in per_ray:
            for r, y in pts:
                resid.append((r, y - m(c2 * r)))
        if not resid:
            return Failure("no usable samples")
        resid.sort(key=lambda t: t[0])
        quarter = max(1, len(resid) // 4)
        head = sum(v for _, v in resid[:quarter]) / quarter
        tail = sum(v for _, v in resid[-quarter:]) / quarter
        if tail <= head + math.log(10.0):
            c1 = math.exp(max(v for _, v in resid))
            return GrowthCertificate(c1=c1, c2=c2, samples=len(resid))
    return Failure("no (c1, c2) on the grid bounds the samples")
