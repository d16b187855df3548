"""Diagnostics for candidate strongly regular weight sequences M_p.

Everything works in log space (L_p = log M_p), so factorial-power
sequences stay usable far past float overflow.  Every check is a
finite-window certificate plus a trend flag, never a proof for all p:
the definitions quantify over all of N, and a desk-scale scan cannot
settle them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    Failure,
    NotYetPositive,
    SupAtWindowEdge,
    WindowExceeded,
)


class Inconclusive:
    """Verdict for checks whose tail cannot be bounded from the window."""

    __slots__ = ("reason",)

    def __init__(self, reason):
        self.reason = reason

    def __bool__(self):
        return False

    def __repr__(self):
        return f"Inconclusive({self.reason!r})"


class SequenceM:
    """Window of a positive sequence with M_0 = 1, held as log-values."""

    __slots__ = ("max_index", "_log_fn", "_cache", "lc_hint")

    def __init__(self, log_fn, max_index: int, lc_hint: bool = False):
        self.max_index = int(max_index)
        self._log_fn = log_fn
        self._cache = {}
        self.lc_hint = bool(lc_hint)
        if abs(self.log(0)) > 1e-12:
            raise ValueError("sequence must have M_0 = 1")

    @classmethod
    def factorial_power(cls, s: float, max_index: int = 10 ** 9):
        return cls(lambda p: s * math.lgamma(p + 1), max_index, lc_hint=True)

    @classmethod
    def qpower(cls, q: float, max_index: int = 10 ** 9):
        if q <= 1:
            raise ValueError("qpower sequence needs q > 1")
        lnq = math.log(q)
        return cls(lambda p: 0.5 * p * (p - 1) * lnq, max_index, lc_hint=True)

    @classmethod
    def from_values(cls, values, lc_hint: bool | None = None):
        values = [float(v) for v in values]
        if not values or values[0] != 1.0:
            raise ValueError("values must start with M_0 = 1")
        if any(v <= 0 for v in values):
            raise ValueError("sequence values must be positive")
        logs = [math.log(v) for v in values]
        if lc_hint is None:
            lc_hint = all(
                2 * logs[p] <= logs[p - 1] + logs[p + 1] + 1e-12
                for p in range(1, len(logs) - 1)
            )
        return cls(lambda p: logs[p], len(values) - 1, lc_hint=lc_hint)

    @classmethod
    def from_log_values(cls, log_fn, max_index: int, lc_hint: bool = False):
        return cls(log_fn, max_index, lc_hint=lc_hint)

    def log(self, p: int) -> float:
        if p < 0 or p > self.max_index:
            raise WindowExceeded(f"index {p} outside [0, {self.max_index}]")
        if p not in self._cache:
            v = float(self._log_fn(p))
            if not math.isfinite(v):
                raise ValueError(f"log M_{p} not finite")
            self._cache[p] = v
        return self._cache[p]

    def value(self, p: int) -> float:
        return math.exp(self.log(p))


@dataclass(frozen=True)
class Diagnostics:
    lc_ok: bool
    mg: object        # minimal A (float) or Failure
    snq: object       # minimal B (float) or Inconclusive
    omega_estimate: float   # math.inf when flagged
    proximate_order_ok: bool
    proximate_spread: float


def check_lc(M: SequenceM, N: int) -> bool:
    """Log convexity M_p^2 <= M_{p-1} M_{p+1} for 1 <= p <= N."""
    if N + 1 > M.max_index:
        raise WindowExceeded("lc check needs indices up to N + 1")
    for p in range(1, N + 1):
        a, b, c = M.log(p - 1), M.log(p), M.log(p + 1)
        slack = 1e-14 * max(1.0, abs(a), abs(b), abs(c))
        if 2 * b > a + c + slack:
            return False
    return True


def check_mg(M: SequenceM, N: int):
    """Minimal A with M_{p+q} <= A^{p+q} M_p M_q over p + q <= 2N.

    Returns Failure when the per-sum maximum is still climbing at the
    window edge (evidence the sequence is not of moderate growth).
    """
    if 2 * N > M.max_index:
        raise WindowExceeded("mg check needs indices up to 2N")
    if N < 4:
        raise ValueError("mg check needs N >= 4")
    best = 0.0
    per_sum = []
    for s in range(2, 2 * N + 1):
        m = max(
            (M.log(s) - M.log(p) - M.log(s - p)) / s
            for p in range(1, s // 2 + 1)
        )
        per_sum.append(m)
        best = max(best, m)
    a_half = math.exp(max(per_sum[: len(per_sum) // 2]))
    a_full = math.exp(best)
    if a_full > a_half * 1.05:
        return Failure("per-sum ratio still growing at the window edge",
                       details={"A_half": a_half, "A_full": a_full})
    return a_full


def check_snq(M: SequenceM, N: int, tail_horizon: int = 200):
    """Minimal B with sum_{q>=p} M_q / ((q+1) M_{q+1}) <= B M_p / M_{p+1}.

    The tail beyond p + tail_horizon is bounded by a geometric comparison
    using the lc-implied monotonicity of r_q = M_q / M_{q+1}; when the
    observed ratio does not decay, the tail diverges or cannot be bounded
    and the check is Inconclusive.
    """
    if N + tail_horizon + 1 > M.max_index:
        raise WindowExceeded("snq check needs indices up to N + horizon + 1")

    def r(qq):
        return math.exp(M.log(qq) - M.log(qq + 1))

    # lc gives r nonincreasing; verify on the window before using it
    for qq in range(1, N + tail_horizon):
        if r(qq) > r(qq - 1) * (1 + 1e-12):
            return Inconclusive("M_q/M_{q+1} not nonincreasing on the window")

    B = 0.0
    for p in range(0, N + 1):
        partial = 0.0
        for qq in range(p, p + tail_horizon):
            partial += r(qq) / (qq + 1)
        edge = p + tail_horizon
        rho = r(edge) / r(edge - 1)
        if rho > 1 - 1e-9:
            return Inconclusive("tail ratio does not decay; tail may diverge")
        tail = r(edge) / ((edge + 1) * (1 - rho))
        B = max(B, (partial + tail) / r(p))
    return B


def omega(M: SequenceM, N: int, ceiling: float = 50.0) -> float:
    """Growth index: running infimum of log(M_{p+1}/M_p)/log(p) over the
    tail half-window.  Returns math.inf when the quantity exceeds the
    ceiling and is still increasing.
    """
    if N + 1 > M.max_index:
        raise WindowExceeded("omega needs indices up to N + 1")
    if N < 10:
        raise ValueError("omega needs N >= 10")
    lo = max(2, N // 2)
    vals = [(M.log(p + 1) - M.log(p)) / math.log(p) for p in range(lo, N + 1)]
    est = min(vals)
    if est > ceiling and vals[-1] >= vals[0]:
        return math.inf
    return est


def m_of_t(M: SequenceM, t: float) -> float:
    """Associated function M(t) = sup_p log(t^p / M_p) = sup_p (p log t - L_p).

    For log-convex sequences the objective is concave in p, so a ternary
    search locates the sup; otherwise the window is scanned.  The sup
    must be attained strictly inside the window.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    logt = math.log(t)

    def phi(p):
        return p * logt - M.log(p)

    hi = M.max_index
    if M.lc_hint:
        lo_i, hi_i = 0, hi
        while hi_i - lo_i > 2:
            m1 = lo_i + (hi_i - lo_i) // 3
            m2 = hi_i - (hi_i - lo_i) // 3
            if phi(m1) < phi(m2):
                lo_i = m1 + 1
            else:
                hi_i = m2
        best_p = max(range(lo_i, hi_i + 1), key=phi)
    else:
        scan_hi = min(hi, 200000)
        best_p = max(range(0, scan_hi + 1), key=phi)
        hi = scan_hi
    if best_p >= hi - 1 and hi >= 2:
        raise SupAtWindowEdge(
            f"sup attained at p = {best_p} with window edge {hi}"
        )
    return phi(best_p)


def d_m(M: SequenceM, t: float) -> float:
    """log(M(t)) / log(t); needs M(t) > 1 (and t > 1)."""
    if t <= 1:
        raise NotYetPositive("t must exceed 1")
    v = m_of_t(M, t)
    if v <= 1.0:
        raise NotYetPositive(f"M(t) = {v:.4g} <= 1 at t = {t:.4g}")
    return math.log(v) / math.log(t)


@dataclass(frozen=True)
class ProximateOrderReport:
    ok: bool
    spread: float
    limit_estimate: float


def proximate_order_check(M: SequenceM, N: int,
                          eps: float = 0.05) -> ProximateOrderReport:
    """Spread of log(M_{p+1}/M_p)/log(p) over the tail window.

    A small spread is evidence that the limit exists (and equals the
    growth index), which is the usable criterion for the associated
    function to be a proximate order.
    """
    if N < 100:
        raise ValueError("proximate order check needs N >= 100")
    if N + 1 > M.max_index:
        raise WindowExceeded("check needs indices up to N + 1")
    lo = max(2, N // 2)
    vals = [(M.log(p + 1) - M.log(p)) / math.log(p) for p in range(lo, N + 1)]
    spread = max(vals) - min(vals)
    return ProximateOrderReport(ok=spread < eps, spread=spread,
                                limit_estimate=sum(vals) / len(vals))


def diagnose(M: SequenceM, N: int, tail_horizon: int = 200) -> Diagnostics:
    """Run the full battery at a common window size."""
    lc_ok = check_lc(M, min(N, M.max_index - 1))
    mg = check_mg(M, min(N, M.max_index // 2))
    if lc_ok:
        snq = check_snq(M, min(N, M.max_index - tail_horizon - 1), tail_horizon)
    else:
        snq = Inconclusive("lc fails; no tail bound available")
    om = omega(M, min(N, M.max_index - 1))
    prox = proximate_order_check(M, min(max(N, 100), M.max_index - 1))
    return Diagnostics(
        lc_ok=lc_ok, mg=mg, snq=snq, omega_estimate=om,
        proximate_order_ok=prox.ok, proximate_spread=prox.spread,
    )
