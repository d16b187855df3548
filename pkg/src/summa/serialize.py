"""JSON encoding of the library's data types (schema "summa/1").

Coefficients: exact mode uses 4-int lists [re_num, re_den, im_num, im_den];
float mode uses [re, im].  Series: {"start", "mode", "coeffs"}.  Output is
deterministic: no timestamps, stable key order left to the emitter.
"""

from __future__ import annotations

from fractions import Fraction

from .coeffs import GaussianRational, floatify, is_exact
from .errors import ParseError
from .ratfun import Polynomial, RationalFunction
from .recursion import (
    ApproxRecursionCertificate,
    HankelReport,
    NotFound,
    Recursion,
)
from .series import FormalPowerSeries, MomentWeight

SCHEMA = "summa/1"


def encode_coeff(c, exact: bool):
    if exact:
        g = c if isinstance(c, GaussianRational) else GaussianRational(c)
        return [g.re.numerator, g.re.denominator,
                g.im.numerator, g.im.denominator]
    z = floatify(c)
    return [z.real, z.imag]


def decode_coeff(obj, mode: str):
    try:
        if mode == "exact":
            rn, rd, im, id_ = obj
            return GaussianRational(Fraction(rn, rd), Fraction(im, id_))
        re, im = obj
        return complex(re, im)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad coefficient entry {obj!r}: {exc}") from exc


def series_to_json(s: FormalPowerSeries) -> dict:
    mode = "exact" if s.exact else "float"
    out = {
        "start": s.start,
        "mode": mode,
        "coeffs": [encode_coeff(c, s.exact) for c in s.coefficients()],
    }
    if s.is_polynomial:
        out["polynomial"] = True
    return out


def series_from_json(obj) -> FormalPowerSeries:
    try:
        mode = obj["mode"]
        start = int(obj["start"])
        coeffs = [decode_coeff(c, mode) for c in obj["coeffs"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad series object: {exc}") from exc
    if mode not in ("exact", "float"):
        raise ParseError(f"unknown series mode {mode!r}")
    return FormalPowerSeries.from_coefficients(
        coeffs, start=start, exact=(mode == "exact"),
        is_polynomial=bool(obj.get("polynomial", False)),
    )


def weight_to_json(w: MomentWeight, order: int = 0) -> dict:
    if w.kind == "factorial":
        return {"kind": "factorial", "s": w.s}
    if w.kind == "qpower":
        return {"kind": "qpower", "q": [w.q.numerator, w.q.denominator]}
    values = [w.value(p) for p in range(order + 1)]
    if w.exact:
        enc = [[Fraction(v).numerator, Fraction(v).denominator] for v in values]
    else:
        enc = [float(v) for v in values]
    return {"kind": "custom", "exact": w.exact, "values": enc}


def weight_from_json(obj) -> MomentWeight:
    try:
        kind = obj["kind"]
        if kind == "factorial":
            return MomentWeight.factorial(int(obj["s"]))
        if kind == "qpower":
            q = obj["q"]
            q = Fraction(q[0], q[1]) if isinstance(q, list) else Fraction(q)
            return MomentWeight.qpower(q)
        if kind == "custom":
            vals = obj["values"]
            if obj.get("exact", False):
                vals = [Fraction(v[0], v[1]) if isinstance(v, list) else Fraction(v)
                        for v in vals]
            else:
                vals = [float(v) for v in vals]
            return MomentWeight.custom(values=vals)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad weight object: {exc}") from exc
    raise ParseError(f"unknown weight kind {obj.get('kind')!r}")


def recursion_to_json(rec: Recursion, weight_order: int | None = None) -> dict:
    mode = "exact" if rec.exact else "float"
    return {
        "r": rec.r,
        "mode": mode,
        "a": [encode_coeff(c, rec.exact) for c in rec.a],
        "weight": weight_to_json(rec.weight, weight_order or rec.r),
    }


def recursion_from_json(obj) -> Recursion:
    try:
        mode = obj.get("mode", "exact")
        a = [decode_coeff(c, mode) for c in obj["a"]]
        weight = weight_from_json(obj["weight"]) if "weight" in obj else None
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad recursion object: {exc}") from exc
    return Recursion(a, weight)


def polynomial_to_json(p: Polynomial) -> list:
    return [encode_coeff(c, p.exact) for c in p.coeffs]


def polynomial_from_json(obj, mode: str) -> Polynomial:
    if not isinstance(obj, list):
        raise ParseError("polynomial must be a coefficient array")
    return Polynomial([decode_coeff(c, mode) for c in obj],
                      exact=(mode == "exact"))


def rational_to_json(rf: RationalFunction) -> dict:
    mode = "exact" if rf.exact else "float"
    return {
        "mode": mode,
        "num": polynomial_to_json(rf.num),
        "den": polynomial_to_json(rf.den),
    }


def rational_from_json(obj) -> RationalFunction:
    try:
        mode = obj.get("mode", "float")
        num = polynomial_from_json(obj["num"], mode)
        den = polynomial_from_json(obj["den"], mode)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad rational object: {exc}") from exc
    return RationalFunction(num, den)


def odespec_to_json(spec) -> dict:
    from .operators import Diff1, DiffS, Moment, QDilation

    mode = "exact" if spec.P.exact else "float"
    out = {"P": polynomial_to_json(spec.P), "mode": mode,
           "rhs": series_to_json(spec.rhs)}
    k = spec.kind
    if isinstance(k, Diff1):
        out["kind"] = "diff1"
    elif isinstance(k, DiffS):
        out["kind"] = "diffs"
        out["s"] = k.s
    elif isinstance(k, Moment):
        out["kind"] = "moment"
        out["moments"] = weight_to_json(k.weight, spec.rhs.order)
    elif isinstance(k, QDilation):
        out["kind"] = "qdilation"
        out["q"] = [k.q.numerator, k.q.denominator]
    return out


def odespec_from_json(obj):
    from .operators import Diff1, DiffS, Moment, OdeSpec, QDilation

    try:
        kname = obj["kind"]
        mode = obj.get("mode", "exact")
        P = polynomial_from_json(obj["P"], mode)
        rhs = series_from_json(obj["rhs"])
        if kname == "diff1":
            kind = Diff1()
        elif kname == "diffs":
            kind = DiffS(int(obj["s"]))
        elif kname == "moment":
            kind = Moment(weight_from_json(obj["moments"]))
        elif kname == "qdilation":
            q = obj["q"]
            kind = QDilation(Fraction(q[0], q[1]) if isinstance(q, list)
                             else Fraction(q))
        else:
            raise ParseError(f"unknown operator kind {kname!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad equation object: {exc}") from exc
    return OdeSpec(kind, P, rhs)


def hankel_report_to_json(rep: HankelReport) -> dict:
    dets = []
    for n, det in rep.determinants:
        if is_exact(det) or isinstance(det, GaussianRational):
            dets.append([n, str(det)])
        else:
            z = floatify(det)
            dets.append([n, [z.real, z.imag]])
    return {"rank": rep.rank, "determinants": dets,
            "extra_zero_checks": rep.extra_zero_checks}


def certificate_to_json(cert: ApproxRecursionCertificate) -> dict:
    return {
        "recursion": recursion_to_json(cert.rec),
        "C": cert.C,
        "M": cert.M,
        "max_normalized_residual": cert.max_normalized_residual,
    }


def notfound_to_json(nf: NotFound) -> dict:
    out = {"not_found": nf.reason}
    if nf.rank is not None:
        out["rank"] = nf.rank
    return out
