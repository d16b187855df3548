"""Laplace and q-theta summation along rays, with residual verification.

The classical sum of a rational Borel transform G along direction d is

    f(z) = z^{-k} int_0^{inf(d)} G(u) e^{-(u/z)^k} k u^{k-1} du,

evaluated by adaptive Gauss panels on [0, R] with R from the kernel-decay
truncation rule.  The q-analog integrates Phi(xi) / theta(xi/z) dxi/xi;
the kernel is normalized so that the transform inverts the termwise
q-Borel division exactly on monomials,

    int_0^inf w^{p-1} / theta(w) dw = ln(q) * q^{p(p-1)/2},

a identity checked numerically in the test suite.  Derivatives of
Laplace sums come from differentiating the kernel under the integral; no
finite differences anywhere.
"""

from __future__ import annotations

import cmath
import heapq
import math
from dataclasses import dataclass

import numpy as np

from .coeffs import floatify
from .errors import (
    DenominatorHitsRoot,
    DirectionNotSummable,
    Failure,
    KernelNonDecaying,
    SampleOutsideDomain,
    ThetaZeroOnRay,
    ToleranceNotMet,
    UnsupportedKind,
    WeightKindMismatch,
    ZeroArgument,
)
from .operators import Diff1, DiffS, Moment, OdeSpec, QDilation
from .ratfun import (
    Polynomial,
    RationalFunction,
    angular_distance,
    is_direction_summable,
    singular_directions,
)
from .series import FormalPowerSeries, MomentWeight


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets for ray quadrature.

    Truncation rule: the radius R is grown until the kernel magnitude
    times a sampled integrand bound drops below abs_tol.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 60
    direction_margin: float = 0.01

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class SumResult:
    value: complex
    error_estimate: float
    nodes_used: int
    truncation_radius: float


# ---------------------------------------------------------------------------
# adaptive panel quadrature

_GL_LO = np.polynomial.legendre.leggauss(15)
_GL_HI = np.polynomial.legendre.leggauss(31)


def _panel(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    lo = half * sum(w * f(mid + half * x) for x, w in zip(*_GL_LO))
    hi = half * sum(w * f(mid + half * x) for x, w in zip(*_GL_HI))
    return hi, abs(hi - lo), len(_GL_LO[0]) + len(_GL_HI[0])


def _adaptive_quad(f, a, b, cfg: QuadratureConfig, initial_splits: int = 12):
    """Adaptive bisection with a 15/31-point Gauss pair per panel."""
    breaks = [a + (b - a) * 2.0 ** (-j) for j in range(initial_splits, 0, -1)]
    breaks = [a] + breaks + [b]
    heap = []
    total = 0.0 + 0.0j
    err = 0.0
    nodes = 0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        v, e, n = _panel(f, lo, hi)
        total += v
        err += e
        nodes += n
        heapq.heappush(heap, (-e, lo, hi, v))

    splits = 0
    budget = max(64, cfg.max_subdivisions * 16)
    while err > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        if splits >= budget or not heap:
            raise ToleranceNotMet(
                f"error estimate {err:.3e} after {splits} subdivisions"
            )
        ne, lo, hi, v = heapq.heappop(heap)
        e = -ne
        mid = 0.5 * (lo + hi)
        v1, e1, n1 = _panel(f, lo, mid)
        v2, e2, n2 = _panel(f, mid, hi)
        total += v1 + v2 - v
        err += e1 + e2 - e
        nodes += n1 + n2
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        splits += 1
    return total, err, nodes


# ---------------------------------------------------------------------------
# classical Borel-Laplace sums


def _as_g_evaluator(G):
    if isinstance(G, RationalFunction):
        return G.eval
    if callable(G):
        return G
    raise TypeError("G must be a RationalFunction or a callable")


def _check_direction(G, d, cfg):
    if isinstance(G, RationalFunction) and G.den.degree >= 1:
        dirs = singular_directions(_DenRec(G.den))
        if not is_direction_summable(d, dirs, cfg.direction_margin):
            raise DirectionNotSummable(
                f"direction {d} within {cfg.direction_margin} of a pole argument"
            )


class _DenRec:
    """Adapter: expose a denominator polynomial as recursion coefficients."""

    def __init__(self, den: Polynomial):
        self._h = [floatify(c) for c in den.coeffs]

    def h_coefficients(self):
        return self._h


def _decay_rate(d, z, k):
    # w = (e^{id}/z)^k along the ray u = s e^{id}; need Re(w) > 0
    w = cmath.exp(k * (1j * d - cmath.log(z)))
    if w.real <= 0.05 * abs(w):
        raise KernelNonDecaying(
            f"arg(z) = {cmath.phase(z):.4f} too far from d = {d:.4f} for k = {k}"
        )
    return w


def _truncation_radius(gev, d, z, k, w, cfg):
    gamma = w.real
    R = (max(math.log(1.0 / cfg.abs_tol), 1.0) * 1.5 / gamma) ** (1.0 / k)
    for _ in range(2):
        bound = max(
            abs(gev(s * cmath.exp(1j * d)))
            for s in np.geomspace(max(R * 1e-4, 1e-12), R, 24)
        )
        target = (bound + 1.0) * k * (1.0 + R) ** max(k - 1.0, 0.0) / (
            cfg.abs_tol * abs(z) ** k
        )
        R = (math.log(max(target, math.e)) / gamma) ** (1.0 / k)
    return R


def laplace_sum(G, d: float, z: complex, k: float = 1.0,
                cfg: QuadratureConfig = DEFAULT_CONFIG) -> SumResult:
    """k-sum of the analytically continued Borel transform G at z.

    Integrates G(s e^{id}) e^{-(s e^{id}/z)^k} k s^{k-1} w ds over
    s in (0, R], w = (e^{id}/z)^k, with R from the truncation rule.
    """
    gev = _as_g_evaluator(G)
    _check_direction(G, d, cfg)
    w = _decay_rate(d, z, k)
    R = _truncation_radius(gev, d, z, k, w, cfg)
    phase = cmath.exp(1j * d)

    def integrand(s):
        if s <= 0.0:
            return 0.0j
        return gev(s * phase) * cmath.exp(-w * s ** k) * k * s ** (k - 1.0) * w

    value, err, nodes = _adaptive_quad(integrand, 0.0, R, cfg)
    return SumResult(value=value, error_estimate=err, nodes_used=nodes,
                     truncation_radius=R)


def _kernel_terms(n: int):
    """Derivative ledger for the k=1 kernel e^{-u/z}/z.

    d^n/dz^n [e^{-u/z} z^{-1}] = sum c * u^m * z^{-l} * e^{-u/z};
    returns the list of (c, m, l) for order n.
    """
    terms = {(0, 1): 1.0}
    for _ in range(n):
        nxt = {}
        for (m, l), c in terms.items():
            nxt[(m, l + 1)] = nxt.get((m, l + 1), 0.0) - c * l
            nxt[(m + 1, l + 2)] = nxt.get((m + 1, l + 2), 0.0) + c
        terms = nxt
    return [(c, m, l) for (m, l), c in terms.items()]


class LaplaceEvaluator:
    """Point evaluator for a k=1 Laplace sum with exact kernel derivatives."""

    def __init__(self, G, d: float, cfg: QuadratureConfig = DEFAULT_CONFIG):
        self.G = G
        self.d = d
        self.cfg = cfg

    def __call__(self, z) -> complex:
        return laplace_sum(self.G, self.d, z, 1.0, self.cfg).value

    def derivatives(self, z, n: int):
        """[f(z), f'(z), ..., f^(n)(z)] by kernel differentiation."""
        gev = _as_g_evaluator(self.G)
        _check_direction(self.G, self.d, self.cfg)
        w = _decay_rate(self.d, z, 1.0)
        R = _truncation_radius(gev, self.d, z, 1.0, w, self.cfg)
        phase = cmath.exp(1j * self.d)
        zc = complex(z)

        moments = {}

        def moment(m):
            if m not in moments:
                def integrand(s):
                    if s <= 0.0:
                        return 0.0j
                    u = s * phase
                    return gev(u) * u ** m * cmath.exp(-w * s) * phase

                moments[m] = _adaptive_quad(integrand, 0.0, R, self.cfg)[0]
            return moments[m]

        out = []
        for i in range(n + 1):
            acc = 0.0j
            for c, m, l in _kernel_terms(i):
                acc += c * zc ** (-l) * moment(m)
            out.append(acc)
        return out


# ---------------------------------------------------------------------------
# theta kernel and q-Laplace sums


def theta(z: complex, q: float) -> complex:
    """Jacobi theta sum_{p in Z} q^{-p(p-1)/2} z^p, q > 1, z != 0.

    Satisfies theta(qz) = qz theta(z).  Terms are produced outward from
    the dominant index and accumulated until both tails fall below 1e-18
    of the running maximum.
    """
    if q <= 1:
        raise ValueError("theta needs q > 1")
    zc = complex(z)
    if zc == 0:
        raise ZeroArgument("theta is undefined at 0")
    lnq = math.log(q)
    logz = cmath.log(zc)
    center = int(round(logz.real / lnq + 0.5))

    def term(p):
        return cmath.exp(-0.5 * p * (p - 1) * lnq + p * logz)

    total = term(center)
    biggest = abs(total)
    m = 1
    while True:
        hi = term(center + m)
        lo = term(center - m)
        total += hi + lo
        biggest = max(biggest, abs(hi), abs(lo), 1e-300)
        if m >= 4 and abs(hi) < 1e-18 * biggest and abs(lo) < 1e-18 * biggest:
            break
        m += 1
        if m > 4000:
            break
    return total


def theta_growth_envelope(t: float, q: float) -> float:
    """(1 + t) exp(log^2(t) / (2 log q)) -- the certified growth shape."""
    return (1.0 + t) * math.exp(math.log(t) ** 2 / (2.0 * math.log(q)))


def pi_q(q: float) -> float:
    """ln(q) * prod_{p>=0} (1 - q^{-p-1})^{-1}, truncated at 1e-16."""
    if q <= 1:
        raise ValueError("pi_q needs q > 1")
    prod = 1.0
    p = 0
    while True:
        x = q ** (-(p + 1.0))
        prod *= 1.0 - x
        if x < 1e-16:
            break
        p += 1
    return math.log(q) / prod


def q_laplace_sum(Phi, d: float, z: complex, q: float,
                  cfg: QuadratureConfig = DEFAULT_CONFIG) -> SumResult:
    """q-sum (1/ln q) int_0^{inf(d)} Phi(xi) / theta(xi/z) dxi/xi.

    Normalized by 1/ln(q): with this constant the transform reproduces
    q-Borel monomials exactly (see module docstring).  Rays on which the
    theta kernel comes close to one of its zeros (all on -q^Z scaled by
    z) are rejected.
    """
    pev = _as_g_evaluator(Phi)
    _check_direction(Phi, d, cfg)
    zc = complex(z)
    if zc == 0:
        raise ZeroArgument("evaluation point 0")
    lnq = math.log(q)

    # truncation: theta growth beats any polynomial; R = |z| q^m
    bound = 1.0
    m = math.sqrt(2.0 * max(math.log((bound + 1.0) / cfg.abs_tol), 1.0) / lnq)
    for _ in range(2):
        R = abs(zc) * q ** (m + 2.0)
        bound = max(
            abs(pev(s * cmath.exp(1j * d)))
            for s in np.geomspace(max(R * 1e-8, 1e-12), R, 24)
        )
        m = math.sqrt(2.0 * max(math.log((bound + 1.0) / cfg.abs_tol), 1.0) / lnq)
    R = abs(zc) * q ** (m + 2.0)

    phase = cmath.exp(1j * d)
    # reject rays passing near theta zeros (arguments pi relative to z)
    probes = np.geomspace(max(R * 1e-10, 1e-14), R, 64)
    for s in probes:
        wpt = s * phase / zc
        th = theta(wpt, q)
        env = theta_growth_envelope(abs(wpt), q)
        if abs(th) < 1e-8 or abs(th) < 1e-8 * env:
            raise ThetaZeroOnRay(
                f"theta kernel magnitude {abs(th):.3e} at |xi| = {s:.3e}"
            )

    def integrand(s):
        if s <= 0.0:
            return 0.0j
        xi = s * phase
        return pev(xi) / theta(xi / zc, q) / s

    value, err, nodes = _adaptive_quad(integrand, 0.0, R, cfg, initial_splits=18)
    scale = 1.0 / lnq
    return SumResult(value=value * scale, error_estimate=err * scale,
                     nodes_used=nodes, truncation_radius=R)


class QLaplaceEvaluator:
    def __init__(self, Phi, d: float, q: float,
                 cfg: QuadratureConfig = DEFAULT_CONFIG):
        self.Phi = Phi
        self.d = d
        self.q = q
        self.cfg = cfg

    def __call__(self, z) -> complex:
        return q_laplace_sum(self.Phi, self.d, z, self.q, self.cfg).value


# ---------------------------------------------------------------------------
# variation identity


def variation_check(rec, b, x_samples, n_window: int = 40) -> float:
    """Max modulus over samples of the lattice variation sum

        V(x) = sum_{n in Z} (-1)^n q^{-n(n+1)/2} b(-q^n x),

    truncated to the window {-n_window-1, ..., n_window} and accumulated
    in the (n, -n-1) pairing order.  b is the Borel-domain inhomogeneity
    (entire; a polynomial for exact recursions); V vanishes for actual
    solutions.  Samples for which a root of h(z) = 1 - sum a_k z^k lies
    on the lattice -q^Z x (within 1e-9 relative) are rejected, since the
    Borel transform has a pole there and the identity's derivation fails.
    """
    if rec.weight.kind != "qpower":
        raise WeightKindMismatch("variation check needs a qpower-weight recursion")
    q = float(rec.weight.q)
    lnq = math.log(q)
    b_eval = _b_evaluator(b)

    from .ratfun import roots as _roots

    h = Polynomial([floatify(c) for c in rec.h_coefficients()], exact=False)
    h_roots = [r for r, _ in _roots(h)] if h.degree >= 1 else []

    worst = 0.0
    for x in x_samples:
        xc = complex(x)
        if xc == 0:
            raise ZeroArgument("variation sample at 0")
        for root in h_roots:
            # root on -q^Z x  <=>  log_q |root / (-x)| integral and args match
            ratio = root / (-xc)
            if abs(ratio) > 0:
                kk = round(math.log(abs(ratio)) / lnq)
                if abs(ratio - q ** kk) <= 1e-9 * max(abs(ratio), 1.0):
                    raise DenominatorHitsRoot(
                        f"root {root:.6g} lies on -q^Z * {xc:.6g}"
                    )
        total = 0.0j
        for n in range(0, n_window + 1):
            for nn in (n, -n - 1):
                pref = (-1.0) ** (nn % 2) * math.exp(-0.5 * nn * (nn + 1) * lnq)
                if pref == 0.0:
                    continue
                total += pref * b_eval(-(q ** nn) * xc)
        worst = max(worst, abs(total))
    return worst


def _b_evaluator(b):
    if callable(b) and not isinstance(b, (Polynomial, FormalPowerSeries)):
        return b
    if isinstance(b, Polynomial):
        return lambda z: complex(floatify(b(complex(z))))
    if isinstance(b, FormalPowerSeries):
        coeffs = [(p, complex(floatify(b.coeff(p))))
                  for p in range(b.start, b.order + 1)]

        def ev(z):
            zc = complex(z)
            return sum(c * zc ** p for p, c in coeffs)

        return ev
    raise TypeError("b must be a polynomial, series or callable")


# ---------------------------------------------------------------------------
# asymptotic-expansion and analytic-equation checks


@dataclass(frozen=True)
class AsymptoticFit:
    C: float
    A: float


def asymptotic_check(f_eval, series: FormalPowerSeries, sector_samples,
                     weight: MomentWeight, n_max: int,
                     a_grid=(0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 64.0)):
    """Fit minimal (A, then C) with

        |f(z) - sum_{p<N} f_p z^p| <= C * A^N * w_N * |z|^N

    on the samples for N = 1..n_max.  For each A (ascending) the
    normalized remainders q_N / A^N must not grow toward N = n_max; the
    first non-growing A wins.  Failure when every grid A shows growth.
    """
    from .recursion import _weight_float

    samples = [complex(s) for s in sector_samples]
    fvals = [complex(f_eval(z)) for z in samples]

    qmax = []
    for N in range(1, n_max + 1):
        wN = _weight_float(weight, N)
        worst = 0.0
        for z, fz in zip(samples, fvals):
            partial = 0.0j
            zp = z ** series.start
            for p in range(series.start, min(N - 1, series.order) + 1):
                partial += complex(floatify(series.coeff(p))) * zp
                zp *= z
            rem = abs(fz - partial)
            worst = max(worst, rem / (wN * abs(z) ** N))
        qmax.append(worst)

    for A in a_grid:
        t = [qm / A ** N for N, qm in enumerate(qmax, start=1)]
        half = len(t) // 2
        head = max(t[:half]) if half else t[0]
        tail = max(t[half:])
        if tail <= head * 1.05 + 1e-300:
            return AsymptoticFit(C=max(t), A=A)
    return Failure("normalized remainder grows for every A on the grid",
                   details={"q_max": qmax})


class _Jet:
    """Truncated Taylor jet at a point: coeffs[i] = f^(i)(z0)/i!."""

    __slots__ = ("z0", "coeffs")

    def __init__(self, z0, coeffs):
        self.z0 = z0
        self.coeffs = list(coeffs)

    @classmethod
    def variable(cls, z0, order):
        c = [complex(z0), 1.0 + 0j] + [0.0j] * max(0, order - 1)
        return cls(z0, c[: order + 1])

    @property
    def value(self):
        return self.coeffs[0]

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [0.0j] * (n - len(self.coeffs))
        b = other.coeffs + [0.0j] * (n - len(other.coeffs))
        return _Jet(self.z0, [x + y for x, y in zip(a, b)])

    def __mul__(self, other):
        if isinstance(other, _Jet):
            n = min(len(self.coeffs), len(other.coeffs))
            out = [0.0j] * n
            for i in range(n):
                for j in range(n - i):
                    out[i + j] += self.coeffs[i] * other.coeffs[j]
            return _Jet(self.z0, out)
        return _Jet(self.z0, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def deriv(self):
        return _Jet(self.z0, [
            (i + 1) * c for i, c in enumerate(self.coeffs[1:])
        ]) if len(self.coeffs) > 1 else _Jet(self.z0, [0.0j])


def _op_on_jet(kind, jet, zvar):
    if isinstance(kind, Diff1):
        return zvar * zvar * jet.deriv() + zvar * jet
    if isinstance(kind, DiffS):
        tmp = jet
        for _ in range(kind.s):
            tmp = zvar * tmp.deriv() + tmp
        return zvar * tmp
    raise UnsupportedKind(f"jet application undefined for {kind!r}")


def analytic_residual(spec: OdeSpec, f_eval, samples,
                      rhs_eval=None) -> float:
    """Max over samples of |P(op) f(z) - g(z)| with op acting analytically.

    Differential kinds need ``f_eval.derivatives(z, n)``; the dilation
    kind evaluates f at q^j z.  The moment kind has no analytic action
    here (no kernel is constructed) and raises UnsupportedKind.
    """
    if isinstance(spec.kind, Moment):
        raise UnsupportedKind(
            "analytic moment-operator evaluation needs a summation kernel"
        )
    if rhs_eval is None:
        rhs_eval = _b_evaluator(spec.rhs)
    P = [complex(floatify(c)) for c in spec.P.coeffs]
    deg = len(P) - 1
    worst = 0.0
    for z in samples:
        zc = complex(z)
        try:
            if isinstance(spec.kind, QDilation):
                qv = float(spec.kind.q)
                acc = 0.0j
                for kdx, pk in enumerate(P):
                    pref = qv ** (kdx * (kdx - 1) // 2) * zc ** kdx
                    acc += pk * pref * complex(f_eval(qv ** kdx * zc))
            else:
                # each operator application consumes one jet order
                # (s orders for DiffS), so request enough derivatives
                per_op = spec.kind.s if isinstance(spec.kind, DiffS) else 1
                n_der = deg * per_op
                derivs = f_eval.derivatives(zc, n_der)
                jet = _Jet(zc, [dv / math.factorial(i)
                                for i, dv in enumerate(derivs)])
                zvar = _Jet.variable(zc, n_der)
                acc = 0.0j
                cur = jet
                acc += P[0] * cur.value
                for kdx in range(1, deg + 1):
                    cur = _op_on_jet(spec.kind, cur, zvar)
                    acc += P[kdx] * cur.value
        except (KernelNonDecaying, ZeroArgument) as exc:
            raise SampleOutsideDomain(str(exc)) from exc
        worst = max(worst, abs(acc - complex(rhs_eval(zc))))
    return worst
