"""Coefficient arithmetic in the two supported modes.

Exact mode stores Gaussian rationals (complex numbers with ``Fraction``
real and imaginary parts), so equality-to-zero is decidable with no
tolerance.  Float mode stores plain ``complex``; zero tests there take a
relative tolerance supplied by the owning series.  The two modes never
mix silently: arithmetic between a GaussianRational and a float raises.
"""

from __future__ import annotations

import math
from fractions import Fraction

_EXACT_SCALARS = (int, Fraction)


class GaussianRational:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, _EXACT_SCALARS):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / n,
            (self.im * o.re - self.re * o.im) / n,
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- predicates and conversions ------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(self.re, self.im)

    def __abs__(self):
        return math.sqrt(float(self.norm2()))

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


GR_ZERO = GaussianRational(0)
GR_ONE = GaussianRational(1)


def is_exact(x) -> bool:
    return isinstance(x, (GaussianRational,) + _EXACT_SCALARS)


def exactify(x) -> GaussianRational:
    """Coerce an exact scalar to GaussianRational; raise on floats."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, _EXACT_SCALARS):
        return GaussianRational(x)
    raise TypeError(f"not an exact coefficient: {x!r}")


def floatify(x) -> complex:
    if isinstance(x, GaussianRational):
        return complex(x)
    return complex(x)


def zero_like(exact: bool):
    return GR_ZERO if exact else 0j


def abs_value(x) -> float:
    return abs(x) if not isinstance(x, GaussianRational) else x.__abs__()


def log_abs(x) -> float:
    """log|x|, overflow-safe for huge exact values; -inf at zero."""
    if isinstance(x, GaussianRational):
        n2 = x.norm2()
        if n2 == 0:
            return -math.inf
        return 0.5 * (_log_int(n2.numerator) - _log_int(n2.denominator))
    if isinstance(x, _EXACT_SCALARS):
        f = Fraction(x)
        if f == 0:
            return -math.inf
        return _log_int(abs(f.numerator)) - _log_int(f.denominator)
    a = abs(complex(x))
    return math.log(a) if a > 0 else -math.inf


def _log_int(n: int) -> float:
    # math.log handles arbitrary-size ints exactly enough for slopes
    return math.log(n)


def nearly_zero(x, tol: float, scale: float = 1.0) -> bool:
    """Mode-aware zero test: exact equality, or |x| <= tol*scale."""
    if isinstance(x, GaussianRational):
        return not x
    if isinstance(x, _EXACT_SCALARS):
        return x == 0
    return abs(x) <= tol * max(scale, 1e-300)


def divide_by_weight(c, w):
    """c / w with overflow-safe handling of huge exact weights in float mode."""
    if isinstance(c, GaussianRational):
        if isinstance(w, _EXACT_SCALARS):
            return GaussianRational(c.re / w, c.im / w)
        raise TypeError("exact coefficient divided by inexact weight")
    if isinstance(w, _EXACT_SCALARS):
        # route through Fraction so w beyond float range still works
        wf = Fraction(w)
        return complex(
            float(Fraction(c.real) / wf), float(Fraction(c.imag) / wf)
        )
    return complex(c) / w


def multiply_by_weight(c, w):
    if isinstance(c, GaussianRational):
        if isinstance(w, _EXACT_SCALARS):
            return GaussianRational(c.re * w, c.im * w)
        raise TypeError("exact coefficient multiplied by inexact weight")
    if isinstance(w, _EXACT_SCALARS):
        wf = Fraction(w)
        return complex(
            float(Fraction(c.real) * wf), float(Fraction(c.imag) * wf)
        )
    return complex(c) * w
