"""Minimal linear recursions via Hankel analysis and LFSR synthesis.

The central question: given d_1..d_N, is there a minimal r and a_1..a_r
with d_j = a_1 d_{j-1} + ... + a_r d_{j-r} for all r < j <= N?  Detection
runs Berlekamp-Massey style synthesis over the exact Gaussian-rational
field (or tolerance-thresholded over complex floats); the Hankel
determinant pattern det H_r != 0, det H_{r+1} = ... = 0 certifies rank.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeffs import (
    GaussianRational,
    exactify,
    floatify,
    is_exact,
    nearly_zero,
    zero_like,
)
from .errors import (
    EmptyInput,
    InsufficientCoefficients,
    RecursionNotVerified,
)
from .series import MomentWeight


class Recursion:
    """Order-r recursion coefficients a_1..a_r plus the weight they hold under.

    The top coefficient must be nonzero (minimality), except for the pure
    annihilator where every a_i = 0 (used for eventually-zero tails).
    """

    __slots__ = ("a", "weight")

    def __init__(self, a, weight: MomentWeight | None = None):
        a = tuple(a)
        if not a:
            raise ValueError("recursion needs at least one coefficient")
        exact = all(is_exact(x) for x in a)
        a = tuple(exactify(x) for x in a) if exact else tuple(floatify(x) for x in a)
        top = a[-1]
        any_nonzero = any(bool(x) if is_exact(x) else x != 0 for x in a)
        top_zero = (not top) if is_exact(top) else top == 0
        if top_zero and any_nonzero:
            raise ValueError("top coefficient a_r must be nonzero")
        self.a = a
        self.weight = weight if weight is not None else MomentWeight.ones()

    @property
    def r(self) -> int:
        return len(self.a)

    @property
    def exact(self) -> bool:
        return all(is_exact(x) for x in self.a)

    def h_coefficients(self):
        """Coefficients of h(z) = 1 - a_1 z - ... - a_r z^r, ascending."""
        one = exactify(1) if self.exact else 1.0 + 0j
        return [one] + [-x for x in self.a]

    def __eq__(self, other):
        if not isinstance(other, Recursion):
            return NotImplemented
        return self.a == other.a and self.weight == other.weight

    def __hash__(self):
        return hash((self.a, self.weight))

    def __repr__(self):
        return f"Recursion(r={self.r}, a={list(self.a)!r})"


@dataclass(frozen=True)
class NotFound:
    """Detection verdict: no admissible recursion in the given window."""

    reason: str
    rank: int | None = None

    def __bool__(self):
        return False


@dataclass(frozen=True)
class HankelReport:
    rank: int
    determinants: tuple  # ((n, det), ...)
    extra_zero_checks: int


@dataclass(frozen=True)
class ApproxRecursionCertificate:
    rec: Recursion
    C: float
    M: float
    max_normalized_residual: float


@dataclass(frozen=True)
class VerifyReport:
    residuals: tuple  # ((j, residual), ...)
    exact_hold: bool
    max_abs: float


# ---------------------------------------------------------------------------
# Hankel determinants


def hankel_det(d, n: int):
    """Determinant of the n x n Hankel matrix with entry (i, j) = d_{i+j-1}.

    Exact mode uses fraction-free (Bareiss) elimination; float mode uses
    pivoted LU via numpy.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    if len(d) < 2 * n - 1:
        raise InsufficientCoefficients(
            f"need d_1..d_{2 * n - 1}, got {len(d)} coefficients"
        )
    if all(is_exact(x) for x in d[: 2 * n - 1]):
        m = [[exactify(d[i + j]) for j in range(n)] for i in range(n)]
        return _bareiss_det(m)
    m = np.array(
        [[complex(floatify(d[i + j])) for j in range(n)] for i in range(n)]
    )
    return complex(np.linalg.det(m))


def _bareiss_det(m):
    """Fraction-free elimination; exact over the Gaussian rationals."""
    n = len(m)
    sign = 1
    prev = exactify(1)
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return zero_like(True)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


def _float_det_threshold(d, n, tol=1e-8):
    # condition-aware zero test: relative to the product of max-row norms
    prod = 1.0
    for i in range(n):
        row = max(abs(floatify(d[i + j])) for j in range(n))
        prod *= max(row, 1e-300)
    return tol * prod


def hankel_report(d, rank: int, extra: int = 3, tol: float = 1e-8) -> HankelReport:
    """Determinants H_1..H_{rank+extra} with zero checks beyond the rank."""
    dets = []
    max_n = min(rank + extra, (len(d) + 1) // 2)
    zero_checks = 0
    for n in range(1, max_n + 1):
        det = hankel_det(d, n)
        dets.append((n, det))
        if n > rank:
            ok = (not det) if is_exact(det) else (
                abs(det) <= _float_det_threshold(d, n, tol)
            )
            if ok:
                zero_checks += 1
    return HankelReport(rank=rank, determinants=tuple(dets),
                        extra_zero_checks=zero_checks)


# ---------------------------------------------------------------------------
# Minimal recursion synthesis


def _lfsr_synthesize(d, iszero):
    """Berlekamp-Massey over a field; returns (L, connection poly C).

    C has C[0] = 1 and d_n + sum_{i=1}^{L} C_i d_{n-i} = 0 for all
    synthesized positions, so a_i = -C_i.
    """
    one = d[0] / d[0] if not iszero(d[0]) else None
    if one is None:
        # find any nonzero element to build the field's 1 from
        for x in d:
            if not iszero(x):
                one = x / x
                break
        else:
            return 0, None
    C = [one]
    B = [one]
    L, m, b = 0, 1, one
    for n in range(len(d)):
        delta = d[n]
        for i in range(1, L + 1):
            delta = delta + C[i] * d[n - i]
        if iszero(delta):
            m += 1
            continue
        coef = delta / b
        if 2 * L <= n:
            T = list(C)
            C = _poly_combine(C, B, coef, m)
            L = n + 1 - L
            B = T
            b = delta
            m = 1
        else:
            C = _poly_combine(C, B, coef, m)
            m += 1
    return L, C


def _poly_combine(C, B, coef, shift):
    # C - coef * x^shift * B
    out = list(C) + [C[0] - C[0]] * max(0, shift + len(B) - len(C))
    for i, bi in enumerate(B):
        out[shift + i] = out[shift + i] - coef * bi
    return out


def min_recursion(d, weight: MomentWeight | None = None, tol: float = 1e-10):
    """Minimal (r, a_1..a_r) with d_j = sum a_k d_{j-k} for all r < j <= N.

    Returns a Recursion, or NotFound when the sequence is zero, the window
    is too short to confirm the candidate (r > floor((N-1)/2)), or the
    minimal recursion has zero top coefficient (eventually-zero /
    polynomial-part sequences; the Hankel rank is reported in that case).
    """
    d = list(d)
    if not d:
        raise EmptyInput("empty coefficient sequence")
    exact = all(is_exact(x) for x in d)
    if exact:
        d = [exactify(x) for x in d]
        iszero = lambda x: not x
    else:
        d = [floatify(x) for x in d]
        scale = max(abs(x) for x in d)
        iszero = lambda x: abs(x) <= tol * max(scale, 1e-300)

    if all(iszero(x) for x in d):
        return NotFound("zero_sequence")
    L, C = _lfsr_synthesize(d, iszero)
    if L == 0:
        return NotFound("zero_sequence")
    if L > (len(d) - 1) // 2:
        return NotFound("insufficient_window", rank=L)

    a = [-(C[i] if i < len(C) else zero_like(exact)) for i in range(1, L + 1)]

    if not exact:
        amax = max(abs(x) for x in a)
        if abs(a[-1]) <= tol * max(amax, 1e-300):
            retry = _fixed_order_fit(d, L - 1, tol)
            if retry is not None:
                a, L = retry, L - 1
            else:
                return NotFound("zero_top_coefficient", rank=L)
    elif not a[-1]:
        return NotFound("zero_top_coefficient", rank=L)

    rec = Recursion(a, weight)
    rep = verify_recursion(d, rec, tol=tol)
    if exact and not rep.exact_hold:
        return NotFound("verification_failed", rank=L)
    if not exact:
        scale = max(abs(x) for x in d)
        if rep.max_abs > tol * max(scale, 1e-300) * 10:
            return NotFound("verification_failed", rank=L)
    return rec


def _fixed_order_fit(d, r, tol):
    """Least-squares fit of a fixed-order recursion; None unless it verifies."""
    if r < 1:
        return None
    rows = []
    rhs = []
    for j in range(r + 1, len(d) + 1):
        rows.append([d[j - 1 - k] for k in range(1, r + 1)])
        rhs.append(d[j - 1])
    a, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    a = [complex(x) for x in a]
    scale = max(abs(x) for x in d)
    for j in range(r + 1, len(d) + 1):
        resid = d[j - 1] - sum(a[k - 1] * d[j - 1 - k] for k in range(1, r + 1))
        if abs(resid) > tol * max(scale, 1e-300) * 10:
            return None
    if abs(a[-1]) <= tol * max(max(abs(x) for x in a), 1e-300):
        return None
    return a


def verify_recursion(d, rec: Recursion, tol: float = 0.0) -> VerifyReport:
    """Residuals d_j - sum a_{j-k} d_k for each j in (r, N]."""
    d = list(d)
    r = rec.r
    exact = rec.exact and all(is_exact(x) for x in d)
    if exact:
        dd = [exactify(x) for x in d]
        a = list(rec.a)
    else:
        dd = [floatify(x) for x in d]
        a = [floatify(x) for x in rec.a]
    residuals = []
    for j in range(r + 1, len(dd) + 1):
        acc = dd[j - 1]
        for k in range(1, r + 1):
            acc = acc - a[k - 1] * dd[j - 1 - k]
        residuals.append((j, acc))
    max_abs = max((abs(floatify(v)) for _, v in residuals), default=0.0)
    if exact:
        hold = all(not v for _, v in residuals)
    else:
        scale = max((abs(x) for x in dd), default=0.0)
        hold = max_abs <= tol * max(scale, 1e-300)
    return VerifyReport(tuple(residuals), hold, max_abs)


def rational_reconstruct(d, rec: Recursion, tol: float = 1e-8):
    """Rational function with Taylor expansion sum d_p z^p at 0:

        R(z) = (d_1 z + (d_2 - d_1 a_1) z^2 + ...) / (1 - a_1 z - ... - a_r z^r)

    The recursion must verify on the data first.
    """
    from .ratfun import Polynomial, RationalFunction

    rep = verify_recursion(d, rec, tol=tol)
    if not rep.exact_hold:
        raise RecursionNotVerified(
            f"max recursion residual {rep.max_abs:.3e} on the window"
        )
    exact = rec.exact and all(is_exact(x) for x in d)
    dd = [exactify(x) for x in d] if exact else [floatify(x) for x in d]
    a = list(rec.a) if exact else [floatify(x) for x in rec.a]
    r = rec.r
    num = [zero_like(exact)]
    for j in range(1, r + 1):
        c = dd[j - 1]
        for k in range(1, j):
            c = c - a[k - 1] * dd[j - 1 - k]
        num.append(c)
    den = rec.h_coefficients()
    return RationalFunction(Polynomial(num), Polynomial(den))


# ---------------------------------------------------------------------------
# Approximate recursions with growth certificates


def _growth_bound(values, M, clip=None):
    """Minimal C with |values_j| <= C * M**j, plus a tail-growth verdict.

    values maps j -> magnitude (f-scale).  Entries at or below ``clip``
    (float noise floor) are ignored.  Returns (C, stable) where stable is
    False when the per-index ratio |v_j|/M^j peaks at the window edge,
    i.e. the window gives no evidence the bound extends.
    """
    ratios = []
    for j, v in values:
        if clip is not None and v <= clip[j]:
            continue
        ratios.append((j, v / M ** j))
    if not ratios:
        return 0.0, True
    C = max(r for _, r in ratios)
    if len(ratios) < 4:
        return C, True
    cut = ratios[int(len(ratios) * 0.75)][0]
    head = max(r for j, r in ratios if j <= cut)
    tail = max(r for j, r in ratios if j > cut)
    return C, tail <= head * 1.01


def _snap_rational(x: complex, max_den: int = 32, tol: float = 0.06):
    """Nearest small-denominator Gaussian rational, or None if not close."""
    from fractions import Fraction

    fr = Fraction(x.real).limit_denominator(max_den)
    fi = Fraction(x.imag).limit_denominator(max_den)
    if abs(complex(fr, fi) - x) <= tol * max(1.0, abs(x)):
        return GaussianRational(fr, fi)
    return None


def approx_recursion(f, weight: MomentWeight, r_max: int,
                     M_grid=(1.0, 2.0, 4.0, 8.0), cap: float | None = None,
                     fit_tail: int | None = None, noise_floor: float = 1e-13):
    """Least-squares recursion fit on the weighted sequence with a
    (C, M)-growth certificate for the residuals:

        |f_j - w_j sum a_{j-k} f_k / w_k| <= C * M**j    for all j > r.

    A fitted coefficient vector is snapped to nearby small rationals when
    that strictly helps the late-window residuals (float least squares
    alone cannot reach the accuracy the reweighted bound needs).
    Residuals below the float noise floor are treated as zero.  The
    certificate with smallest r (then smallest C) wins; the normalized
    residual compares residual growth against the data's own C at the
    same M, and NotFound is returned when it exceeds ``cap`` for every
    candidate.
    """
    from .coeffs import divide_by_weight

    f = list(f)
    N = len(f)
    if N == 0:
        raise EmptyInput("empty coefficient sequence")
    # divide through Fractions so huge exact weights cannot overflow
    d = [divide_by_weight(complex(floatify(x)), weight.value(j + 1))
         for j, x in enumerate(f)]
    wfloat = [_weight_float(weight, j) for j in range(N + 1)]

    tail = fit_tail if fit_tail is not None else max(1, N // 5)
    candidates = []
    for r in range(1, r_max + 1):
        hi = N - tail
        if hi - r < max(r, 2):
            break
        rows = [[d[j - 1 - k] for k in range(1, r + 1)]
                for j in range(r + 1, hi + 1)]
        rhs = [d[j - 1] for j in range(r + 1, hi + 1)]
        a, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        a = [complex(x) for x in a]
        if abs(a[-1]) <= 1e-12 * max(max(abs(x) for x in a), 1e-300):
            continue
        a = _prefer_snapped(a, d, r, N)

        resid = []
        clip = {}
        for j in range(r + 1, N + 1):
            e = d[j - 1] - sum(a[k - 1] * d[j - 1 - k] for k in range(1, r + 1))
            scale_j = abs(d[j - 1]) + sum(
                abs(a[k - 1]) * abs(d[j - 1 - k]) for k in range(1, r + 1)
            )
            bj = abs(e) * wfloat[j]
            resid.append((j, bj))
            clip[j] = noise_floor * scale_j * wfloat[j]

        data_mag = [(j + 1, abs(floatify(v))) for j, v in enumerate(f)]

        for M in M_grid:
            C, stable = _growth_bound(resid, M, clip)
            if not stable:
                continue
            Cdata, _ = _growth_bound(data_mag, M)
            norm = C / Cdata if Cdata > 0 else 0.0
            if cap is not None and norm > cap:
                break
            rec = Recursion(a, weight)
            candidates.append((r, C, M, norm, rec))
            break

    if not candidates:
        return NotFound("no_viable_certificate")
    r, C, M, norm, rec = min(candidates, key=lambda t: (t[0], t[1]))
    return ApproxRecursionCertificate(rec=rec, C=C, M=M,
                                      max_normalized_residual=norm)


def _prefer_snapped(a, d, r, N):
    """Adopt small-rational coefficients when they fit the tail at least
    as well as the raw least-squares values."""
    snapped = [_snap_rational(x) for x in a]
    if any(s is None for s in snapped):
        return a
    sc = [complex(s) for s in snapped]

    def tail_resid(coeffs):
        worst = 0.0
        for j in range(max(r + 1, N - N // 3), N + 1):
            e = d[j - 1] - sum(coeffs[k - 1] * d[j - 1 - k]
                               for k in range(1, r + 1))
            worst = max(worst, abs(e))
        return worst

    if tail_resid(sc) <= tail_resid(a) * 1.2 + 1e-300:
        return sc
    return a


def _weight_float(weight, j):
    v = weight.value(j)
    if is_exact(v):
        from fractions import Fraction
        return float(Fraction(v))
    return float(v)
