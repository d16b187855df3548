"""Formal power series and moment-weight sequences.

A series is a finite window of coefficients f_start .. f_order together
with the mode (exact / float) they are stored in.  All transforms are
termwise; there is no composition or inversion here.  Series are
canonically indexed from p = 1 with f_0 implicitly zero; a start-0 series
can be split into its constant term and a canonical tail with
:meth:`FormalPowerSeries.split_constant`.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .coeffs import (
    GaussianRational,
    divide_by_weight,
    exactify,
    floatify,
    is_exact,
    log_abs,
    multiply_by_weight,
    nearly_zero,
    zero_like,
)
from .errors import (
    EmptyInput,
    IndexOutOfRange,
    InsufficientData,
    SeedLengthMismatch,
)


class MomentWeight:
    """Positive weight sequence w_p with w_0 = 1 dividing series coefficients.

    Kinds:
      * ``factorial(s)`` -- w_p = (p!)**s, exact integers;
      * ``qpower(q)``    -- w_p = q**(p(p-1)/2) with q > 1, kept as an exact
        Fraction power so large orders never overflow;
      * ``custom``       -- explicit values or a generator, exact when the
        values are ints/Fractions.
    """

    __slots__ = ("kind", "s", "q", "exact", "_fn", "_values")

    def __init__(self, kind, s=None, q=None, values=None, fn=None, exact=None):
        self.kind = kind
        self.s = s
        self.q = q
        self._fn = fn
        self._values = list(values) if values is not None else []
        if kind == "factorial":
            if not isinstance(s, int) or s < 1:
                raise ValueError("factorial weight needs integer s >= 1")
            self.exact = True
        elif kind == "qpower":
            if q is None or q <= 1:
                raise ValueError("qpower weight needs q > 1")
            self.q = Fraction(q)
            self.exact = True
        elif kind == "custom":
            if fn is None and not self._values:
                raise ValueError("custom weight needs values or a generator")
            if exact is None:
                exact = all(is_exact(v) for v in self._values) and fn is None
            self.exact = bool(exact)
            if self._values and self._values[0] != 1:
                raise ValueError("custom weight must have w_0 = 1")
        else:
            raise ValueError(f"unknown weight kind {kind!r}")

    @classmethod
    def factorial(cls, s=1):
        return cls("factorial", s=s)

    @classmethod
    def qpower(cls, q):
        return cls("qpower", q=q)

    @classmethod
    def custom(cls, values=None, fn=None, exact=None):
        return cls("custom", values=values, fn=fn, exact=exact)

    @classmethod
    def ones(cls):
        return cls("custom", fn=lambda p: 1, exact=True)

    def value(self, p: int):
        if p < 0:
            raise IndexOutOfRange(f"weight index {p} < 0")
        if self.kind == "factorial":
            return math.factorial(p) ** self.s
        if self.kind == "qpower":
            return self.q ** (p * (p - 1) // 2)
        while len(self._values) <= p:
            if self._fn is None:
                raise IndexOutOfRange(
                    f"custom weight has only {len(self._values)} values"
                )
            self._values.append(self._fn(len(self._values)))
        v = self._values[p]
        if p == 0 and v != 1:
            raise ValueError("custom weight must have w_0 = 1")
        if is_exact(v):
            if v <= 0:
                raise ValueError(f"weight w_{p} = {v} not positive")
        elif not (float(v) > 0):
            raise ValueError(f"weight w_{p} = {v} not positive")
        return v

    def ratio(self, p: int):
        """w_p / w_{p-1}; exact when the weight is exact."""
        a, b = self.value(p), self.value(p - 1)
        if is_exact(a) and is_exact(b):
            return Fraction(a) / Fraction(b)
        return float(a) / float(b)

    def __eq__(self, other):
        if not isinstance(other, MomentWeight):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.kind == "factorial":
            return self.s == other.s
        if self.kind == "qpower":
            return self.q == other.q
        if self._fn is not None or other._fn is not None:
            return self._fn is other._fn
        return self._values == other._values

    def __hash__(self):
        if self.kind == "factorial":
            return hash(("factorial", self.s))
        if self.kind == "qpower":
            return hash(("qpower", self.q))
        return hash(("custom", id(self._fn), tuple(map(str, self._values))))

    def __repr__(self):
        if self.kind == "factorial":
            return f"MomentWeight.factorial({self.s})"
        if self.kind == "qpower":
            return f"MomentWeight.qpower({self.q})"
        return "MomentWeight.custom(...)"


class FormalPowerSeries:
    """Coefficient window f_start .. f_order with deterministic access.

    ``coeff(p)`` is cached, so repeated calls return the identical value.
    ``is_polynomial`` marks series whose coefficients above ``order`` are
    known to be exactly zero (rhs ledgers, explicit polynomials).
    """

    __slots__ = ("start", "order", "exact", "tol", "is_polynomial", "source",
                 "_fn", "_cache")

    def __init__(self, fn, start, order, exact, tol=1e-12,
                 source="closed-form", is_polynomial=False):
        if start < 0:
            raise ValueError("start index must be >= 0")
        if order < start:
            raise ValueError("available order below start index")
        self.start = int(start)
        self.order = int(order)
        self.exact = bool(exact)
        self.tol = float(tol)
        self.is_polynomial = bool(is_polynomial)
        self.source = source
        self._fn = fn
        self._cache = {}

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_coefficients(cls, coeffs, start=1, exact=None, tol=1e-12,
                          is_polynomial=False):
        coeffs = list(coeffs)
        if not coeffs:
            raise EmptyInput("no coefficients supplied")
        if exact is None:
            exact = all(is_exact(c) for c in coeffs)
        if exact:
            coeffs = [exactify(c) for c in coeffs]
        else:
            coeffs = [floatify(c) for c in coeffs]
        s = cls(None, start, start + len(coeffs) - 1, exact, tol,
                source="explicit", is_polynomial=is_polynomial)
        s._cache = {start + i: c for i, c in enumerate(coeffs)}
        return s

    @classmethod
    def from_function(cls, fn, order, start=1, exact=False, tol=1e-12,
                      source="closed-form"):
        return cls(fn, start, order, exact, tol, source=source)

    @classmethod
    def zero(cls, order, start=1, exact=True, tol=1e-12):
        z = zero_like(exact)
        return cls(lambda p: z, start, order, exact, tol,
                   source="zero", is_polynomial=True)

    # -- access -----------------------------------------------------------

    def coeff(self, p: int):
        if p < self.start or p > self.order:
            raise IndexOutOfRange(
                f"index {p} outside window [{self.start}, {self.order}]"
            )
        if p not in self._cache:
            v = self._fn(p)
            self._cache[p] = exactify(v) if self.exact else floatify(v)
        return self._cache[p]

    def coeff_or_zero(self, p: int):
        """Like coeff, but 0 below start and (for polynomials) above order."""
        if p < self.start:
            return zero_like(self.exact)
        if p > self.order and self.is_polynomial:
            return zero_like(self.exact)
        return self.coeff(p)

    def coefficients(self, lo=None, hi=None):
        lo = self.start if lo is None else lo
        hi = self.order if hi is None else hi
        return [self.coeff(p) for p in range(lo, hi + 1)]

    @property
    def zero_coeff(self):
        return zero_like(self.exact)

    def max_abs(self, lo=None, hi=None) -> float:
        vals = self.coefficients(lo, hi)
        return max((abs(floatify(v)) for v in vals), default=0.0)

    def split_constant(self):
        """Return (f_0, canonical tail starting at p = max(start, 1))."""
        if self.start >= 1:
            return zero_like(self.exact), self
        c0 = self.coeff(0)
        tail = FormalPowerSeries(
            self.coeff, 1, self.order, self.exact, self.tol,
            source=self.source, is_polynomial=self.is_polynomial,
        )
        return c0, tail

    def floatified(self):
        if not self.exact:
            return self
        return FormalPowerSeries(
            lambda p: floatify(self.coeff(p)), self.start, self.order,
            False, self.tol, source=self.source,
            is_polynomial=self.is_polynomial,
        )

    def __repr__(self):
        return (f"FormalPowerSeries(start={self.start}, order={self.order}, "
                f"mode={'exact' if self.exact else 'float'}, source={self.source!r})")


def borel_transform(series: FormalPowerSeries, weight: MomentWeight) -> FormalPowerSeries:
    """Termwise transform f_p -> f_p / w_p.

    Exactness is preserved when both the series and the weight values are
    exact.  The identity weight returns an equal series.
    """
    exact = series.exact and weight.exact

    def fn(p):
        c = series.coeff(p)
        if series.exact and not exact:
            c = floatify(c)
        return divide_by_weight(c, weight.value(p))

    return FormalPowerSeries(
        fn, series.start, series.order, exact, series.tol,
        source="transform:borel", is_polynomial=series.is_polynomial,
    )


def generate_from_recursion(rec, seeds, weight: MomentWeight | None = None,
                            order: int | None = None) -> FormalPowerSeries:
    """Series with f_1..f_r = seeds and the weighted recursion beyond:

        f_j = w_j * sum_{k=j-r}^{j-1} a_{j-k} f_k / w_k,   r < j <= order.
    """
    w = weight if weight is not None else rec.weight
    r = rec.r
    if len(seeds) != r:
        raise SeedLengthMismatch(f"expected {r} seeds, got {len(seeds)}")
    if order is None:
        order = 2 * r + 2
    if order < r:
        raise ValueError("order must be at least the recursion order")

    exact = rec.exact and w.exact and all(is_exact(s) for s in seeds)
    if exact:
        a = [exactify(x) for x in rec.a]
        f = [exactify(s) for s in seeds]
    else:
        a = [floatify(x) for x in rec.a]
        f = [floatify(s) for s in seeds]

    for j in range(r + 1, order + 1):
        acc = zero_like(exact)
        for k in range(j - r, j):
            acc = acc + a[j - k - 1] * divide_by_weight(f[k - 1], w.value(k))
        f.append(multiply_by_weight(acc, w.value(j)))

    out = FormalPowerSeries.from_coefficients(f, start=1, exact=exact)
    out.source = "recursion"
    return out


def gevrey_order_estimate(series: FormalPowerSeries, p_max: int) -> float:
    """Least-squares slope of log|f_p| against log p! over nonzero terms.

    Slopes within 0.02 of zero are clamped to 0 (convergent series).
    """
    if p_max > series.order:
        raise IndexOutOfRange("p_max beyond available order")
    scale = series.max_abs(None, p_max) if not series.exact else 1.0
    xs, ys = [], []
    for p in range(max(series.start, 1), p_max + 1):
        c = series.coeff(p)
        if nearly_zero(c, series.tol, scale):
            continue
        xs.append(math.lgamma(p + 1))
        ys.append(log_abs(c))
    if len(xs) < 10:
        raise InsufficientData(
            f"need at least 10 nonzero coefficients, found {len(xs)}"
        )
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return 0.0 if abs(slope) < 0.02 else slope
