"""The four operator families on formal power series.

Each kind applies as a one-step weighted shift on coefficients and is
implemented from its definition (derivative + multiplications, iterated
(z d/dz + 1), moment shift-and-scale, dilation), not from the closed
m-fold formulas -- those serve as independent test oracles.  All
transformations are exact in exact mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coeffs import (
    exactify,
    floatify,
    is_exact,
    multiply_by_weight,
    nearly_zero,
    zero_like,
)
from .errors import NotAFormalSolution, WeightKindMismatch
from .ratfun import Polynomial
from .recursion import (
    ApproxRecursionCertificate,
    NotFound,
    Recursion,
    _growth_bound,
    _weight_float,
)
from .series import FormalPowerSeries, MomentWeight, generate_from_recursion


@dataclass(frozen=True)
class Diff1:
    """z^2 d/dz + z."""


@dataclass(frozen=True)
class DiffS:
    """z (z d/dz + 1)^s for integer s >= 2."""

    s: int

    def __post_init__(self):
        if self.s < 2:
            raise ValueError("DiffS needs s >= 2; use Diff1 for s = 1")


@dataclass(frozen=True)
class Moment:
    """z d_m (z * .) for a moment weight m."""

    weight: MomentWeight


@dataclass(frozen=True)
class QDilation:
    """z sigma_q with (sigma_q f)(z) = f(qz), q > 1."""

    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q <= 1:
            raise ValueError("QDilation needs q > 1")


OperatorKind = Diff1 | DiffS | Moment | QDilation


def diff_power(s: int):
    """Canonical constructor: s = 1 gives Diff1, s >= 2 gives DiffS(s)."""
    if s == 1:
        return Diff1()
    return DiffS(s)


def weight_for(kind: OperatorKind) -> MomentWeight:
    if isinstance(kind, Diff1):
        return MomentWeight.factorial(1)
    if isinstance(kind, DiffS):
        return MomentWeight.factorial(kind.s)
    if isinstance(kind, Moment):
        return kind.weight
    if isinstance(kind, QDilation):
        return MomentWeight.qpower(kind.q)
    raise WeightKindMismatch(f"unknown operator kind {kind!r}")


def kind_for_weight(weight: MomentWeight) -> OperatorKind:
    if weight.kind == "factorial":
        return diff_power(weight.s)
    if weight.kind == "qpower":
        return QDilation(weight.q)
    if weight.kind == "custom":
        return Moment(weight)
    raise WeightKindMismatch(f"no operator kind for weight {weight!r}")


# ---------------------------------------------------------------------------
# elementary termwise pieces


def _termwise(series, factor_fn, start, order, exact, source):
    def fn(p):
        return factor_fn(p)

    return FormalPowerSeries(fn, start, order, exact, series.tol,
                             source=source,
                             is_polynomial=series.is_polynomial)


def _z_shift(series: FormalPowerSeries) -> FormalPowerSeries:
    """Multiply by z: coefficient p becomes f_{p-1}."""
    return _termwise(
        series, lambda p: series.coeff_or_zero(p - 1),
        series.start + 1, series.order + 1, series.exact, series.source,
    )


def _z_dz(series: FormalPowerSeries) -> FormalPowerSeries:
    """z d/dz: coefficient p becomes p * f_p."""
    return _termwise(
        series, lambda p: series.coeff_or_zero(p) * p,
        series.start, series.order, series.exact, series.source,
    )


def _deriv(series: FormalPowerSeries) -> FormalPowerSeries:
    """d/dz: coefficient p becomes (p+1) f_{p+1}."""
    return _termwise(
        series, lambda p: series.coeff_or_zero(p + 1) * (p + 1),
        max(series.start - 1, 0), series.order - 1, series.exact, series.source,
    )


def _sigma_q(series: FormalPowerSeries, q) -> FormalPowerSeries:
    """Dilation f(z) -> f(qz): coefficient p picks up q^p."""
    qq = Fraction(q) if series.exact else float(q)

    def factor(p):
        c = series.coeff_or_zero(p)
        return multiply_by_weight(c, qq ** p) if series.exact else c * qq ** p

    return _termwise(series, factor, series.start, series.order,
                     series.exact, series.source)


def _series_add(a: FormalPowerSeries, b: FormalPowerSeries) -> FormalPowerSeries:
    exact = a.exact and b.exact
    start = min(a.start, b.start)
    poly = a.is_polynomial and b.is_polynomial
    # a polynomial side has known (zero) coefficients at every order
    if poly:
        order = max(a.order, b.order)
    elif a.is_polynomial:
        order = b.order
    elif b.is_polynomial:
        order = a.order
    else:
        order = min(a.order, b.order)

    def fn(p):
        x = a.coeff_or_zero(p)
        y = b.coeff_or_zero(p)
        if not exact:
            x, y = floatify(x), floatify(y)
        return x + y

    return FormalPowerSeries(fn, start, order, exact, min(a.tol, b.tol),
                             source="sum", is_polynomial=poly)


def _series_scale(series: FormalPowerSeries, c) -> FormalPowerSeries:
    exact = series.exact and is_exact(c)

    def fn(p):
        x = series.coeff_or_zero(p)
        if exact:
            return exactify(x) * exactify(c)
        return floatify(x) * floatify(c)

    return FormalPowerSeries(fn, series.start, series.order, exact,
                             series.tol, source=series.source,
                             is_polynomial=series.is_polynomial)


# ---------------------------------------------------------------------------
# operator application


def moment_derivative(series: FormalPowerSeries,
                      weight: MomentWeight) -> FormalPowerSeries:
    """d_m: sum c_p z^p  ->  sum (m(p+1)/m(p)) c_{p+1} z^p.

    With m(p) = p! this is the ordinary derivative.
    """
    exact = series.exact and weight.exact

    def fn(p):
        c = series.coeff_or_zero(p + 1)
        if series.exact and not exact:
            c = floatify(c)
        ratio = weight.ratio(p + 1)
        return multiply_by_weight(c, ratio) if is_exact(ratio) else floatify(c) * ratio

    return FormalPowerSeries(fn, max(series.start - 1, 0), series.order - 1,
                             exact, series.tol, source="moment-derivative",
                             is_polynomial=series.is_polynomial)


def _apply_once(kind: OperatorKind, series: FormalPowerSeries) -> FormalPowerSeries:
    if isinstance(kind, Diff1):
        # z^2 f' + z f
        return _series_add(_z_shift(_z_shift(_deriv(series))), _z_shift(series))
    if isinstance(kind, DiffS):
        tmp = series
        for _ in range(kind.s):
            tmp = _series_add(_z_dz(tmp), tmp)
        return _z_shift(tmp)
    if isinstance(kind, Moment):
        return _z_shift(moment_derivative(_z_shift(series), kind.weight))
    if isinstance(kind, QDilation):
        return _z_shift(_sigma_q(series, kind.q))
    raise WeightKindMismatch(f"unknown operator kind {kind!r}")


def apply_operator(kind: OperatorKind, series: FormalPowerSeries,
                   times: int = 1) -> FormalPowerSeries:
    """Apply the family operator `times` times (0 is the identity)."""
    if times < 0:
        raise ValueError("times must be >= 0")
    out = series
    for _ in range(times):
        out = _apply_once(kind, out)
    return out


# ---------------------------------------------------------------------------
# recursion <-> equation


class OdeSpec:
    """Equation P(op) y = rhs with P(0) = 1 after normalization."""

    __slots__ = ("kind", "P", "rhs")

    def __init__(self, kind: OperatorKind, P: Polynomial, rhs: FormalPowerSeries):
        p0 = P.coeffs[0] if P.coeffs else None
        if p0 is None or (not p0 if is_exact(p0) else p0 == 0):
            raise ValueError("P(0) must be nonzero")
        if P.exact:
            if p0 != exactify(1):
                P = Polynomial([c / p0 for c in P.coeffs])
        else:
            p0 = floatify(p0)
            if p0 != 1:
                P = Polynomial([floatify(c) / p0 for c in P.coeffs], exact=False)
        self.kind = kind
        self.P = P
        self.rhs = rhs

    def __repr__(self):
        return f"OdeSpec(kind={self.kind!r}, P={self.P!r})"


def recursion_to_ode(rec: Recursion, seeds, n_rhs: int | None = None) -> OdeSpec:
    """Equation solved by the series the recursion generates:

        P(z) = 1 - a_1 z - ... - a_r z^r,
        b_j  = f_j - w_j sum_{k=j-r}^{j-1} a_{j-k} f_k / w_k,  1 <= j <= n_rhs,

    so the rhs is the polynomial carrying the seed discrepancies (zero
    beyond r when the recursion is exact).
    """
    kind = kind_for_weight(rec.weight)
    r = rec.r
    if n_rhs is None:
        n_rhs = r
    n_gen = max(n_rhs, r)
    f = generate_from_recursion(rec, seeds, order=n_gen)
    b = _recursion_residuals(f, rec, n_rhs)
    P = Polynomial(rec.h_coefficients())
    rhs = FormalPowerSeries.from_coefficients(b, start=1, is_polynomial=True)
    return OdeSpec(kind, P, rhs)


def _recursion_residuals(f: FormalPowerSeries, rec: Recursion, n: int):
    """b_j = f_j - w_j sum a_{j-k} f_k / w_k for j = 1..n (f_k = 0, k < 1)."""
    w = rec.weight
    exact = f.exact and rec.exact and w.exact
    a = list(rec.a) if exact else [floatify(x) for x in rec.a]
    from .coeffs import divide_by_weight

    out = []
    for j in range(1, n + 1):
        acc = zero_like(exact)
        for k in range(max(j - rec.r, 1), j):
            fk = f.coeff_or_zero(k)
            if not exact:
                fk = floatify(fk)
            acc = acc + a[j - k - 1] * divide_by_weight(fk, w.value(k))
        fj = f.coeff_or_zero(j)
        if not exact:
            fj = floatify(fj)
        out.append(fj - multiply_by_weight(acc, w.value(j)))
    return out


def formal_residual(spec: OdeSpec, f: FormalPowerSeries,
                    order: int) -> FormalPowerSeries:
    """Coefficients of P(op) f - rhs through the given order."""
    if f.order < order and not f.is_polynomial:
        raise ValueError("series not available to the requested order")
    if spec.rhs.order < order and not spec.rhs.is_polynomial:
        raise ValueError("rhs not available to the requested order")
    powers = [f]
    for _ in range(spec.P.degree):
        powers.append(_apply_once(spec.kind, powers[-1]))
    acc = None
    for k, pk in enumerate(spec.P.coeffs):
        term = _series_scale(powers[k], pk)
        acc = term if acc is None else _series_add(acc, term)
    resid = _series_add(acc, _series_scale(spec.rhs, -1))
    # clamp the window to the requested order
    return FormalPowerSeries(
        resid.coeff_or_zero, min(resid.start, 1), order, resid.exact,
        f.tol, source="residual",
        is_polynomial=resid.is_polynomial,
    )


def formal_solution(spec: OdeSpec, order: int) -> FormalPowerSeries:
    """The unique formal solution of P(op) y = rhs through the order:

        f_j = w_j sum_{k=j-r}^{j-1} a_{j-k} f_k / w_k + b_j.
    """
    w = weight_for(spec.kind)
    r = spec.P.degree
    a = [-c for c in spec.P.coeffs[1:]]
    exact = spec.P.exact and spec.rhs.exact and w.exact
    if not exact:
        a = [floatify(x) for x in a]
    from .coeffs import divide_by_weight

    f = []
    for j in range(1, order + 1):
        acc = zero_like(exact)
        for k in range(max(j - r, 1), j):
            acc = acc + a[j - k - 1] * divide_by_weight(f[k - 1], w.value(k))
        bj = spec.rhs.coeff_or_zero(j)
        if not exact:
            bj = floatify(bj)
        f.append(multiply_by_weight(acc, w.value(j)) + bj)
    return FormalPowerSeries.from_coefficients(f, start=1, exact=exact)


def ode_to_recursion(spec: OdeSpec, f: FormalPowerSeries, order: int,
                     tol: float = 1e-9,
                     M_grid=(1.0, 2.0, 4.0, 8.0)):
    """Certificate (r, a, C, M) extracted from an equation and its formal
    solution: a_k = -P_k, and |b_j| <= C M^j fitted on the rhs ledger.

    Raises NotAFormalSolution when P(op) f - rhs is not (numerically) the
    zero series through the order; returns NotFound("convergent_case")
    for deg P = 0.
    """
    r = spec.P.degree
    if r == 0:
        return NotFound("convergent_case")
    resid = formal_residual(spec, f, order)
    scale = f.max_abs() if not f.exact else 1.0
    for p in range(resid.start, order + 1):
        v = resid.coeff_or_zero(p)
        if not nearly_zero(v, tol, scale):
            raise NotAFormalSolution(
                f"residual coefficient {floatify(v):.3e} at order {p}"
            )

    w = weight_for(spec.kind)
    a = [-c for c in spec.P.coeffs[1:]]
    rec = Recursion(a, w)
    b = _recursion_residuals(f, rec, order)
    mags = [(j + 1, abs(floatify(v))) for j, v in enumerate(b)]
    clip = None
    if not (f.exact and rec.exact and w.exact):
        clip = {j + 1: 1e-13 * abs(floatify(f.coeff_or_zero(j + 1)))
                for j in range(len(b))}
    chosen = None
    for M in M_grid:
        C, stable = _growth_bound(mags, M, clip)
        if stable:
            chosen = (C, M)
            break
    if chosen is None:
        M = max(M_grid)
        C, _ = _growth_bound(mags, M, clip)
        chosen = (C, M)
    C, M = chosen
    data = [(p, abs(floatify(f.coeff_or_zero(p)))) for p in range(1, order + 1)]
    Cdata, _ = _growth_bound(data, M)
    norm = C / Cdata if Cdata > 0 else 0.0
    return ApproxRecursionCertificate(rec=rec, C=C, M=M,
                                      max_normalized_residual=norm)
