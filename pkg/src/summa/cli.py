"""Command-line front end.

One batch-oriented process; commands map 1:1 onto library operations.
Output is deterministic JSON (schema "summa/1") or CSV; every payload
echoes the fully resolved parameter set.  Exit codes: 0 success, 2 a
NotFound/Failure verdict, 1 errors.  Angles are radians; prefix with
"deg:" for degrees.  SUMMA_LOG sets the log level (stderr only).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import serialize as ser
from .errors import Failure, ParseError, SummaError
from .operators import (
    formal_residual,
    kind_for_weight,
    ode_to_recursion,
    recursion_to_ode,
)
from .ratfun import singular_directions
from .recursion import (
    NotFound,
    approx_recursion,
    hankel_report,
    min_recursion,
    rational_reconstruct,
)
from .regular import SequenceM, diagnose
from .regular import Inconclusive
from .series import (
    FormalPowerSeries,
    MomentWeight,
    borel_transform,
    generate_from_recursion,
    gevrey_order_estimate,
)
from .summation import (
    LaplaceEvaluator,
    QLaplaceEvaluator,
    QuadratureConfig,
    analytic_residual,
    asymptotic_check,
    laplace_sum,
    q_laplace_sum,
    variation_check,
)

log = logging.getLogger("summa")


def _parse_angle(text: str) -> float:
    if text.startswith("deg:"):
        return math.radians(float(text[4:]))
    return float(text)


def _parse_weight(text: str) -> MomentWeight:
    kind, _, arg = text.partition(":")
    if kind == "factorial":
        return MomentWeight.factorial(int(arg or 1))
    if kind == "qpower":
        if "/" in arg:
            n, d = arg.split("/")
            return MomentWeight.qpower(Fraction(int(n), int(d)))
        return MomentWeight.qpower(Fraction(arg))
    if kind == "custom":
        with open(arg) as fh:
            obj = _load_json(fh.read())
        return ser.weight_from_json(obj if "kind" in obj
                                    else {"kind": "custom", **obj})
    raise ParseError(f"unknown weight spec {text!r}")


def _parse_zgrid(text: str):
    parts = text.split(",")
    if len(parts) not in (3, 4):
        raise ParseError("zgrid must be start,stop,count[,arg]")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    arg = _parse_angle(parts[3]) if len(parts) == 4 else 0.0
    if count < 1:
        raise ParseError("zgrid count must be >= 1")
    if count == 1:
        radii = [start]
    else:
        step = (stop - start) / (count - 1)
        radii = [start + i * step for i in range(count)]
    phase = complex(math.cos(arg), math.sin(arg))
    return [r * phase for r in radii]


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _read_input(args):
    if args.input == "-":
        return _load_json(sys.stdin.read())
    if args.input.lstrip().startswith(("{", "[")):
        return _load_json(args.input)
    with open(args.input) as fh:
        return _load_json(fh.read())


def _emit(args, payload: dict | str):
    if isinstance(payload, dict):
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        text = payload
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _envelope(command: str, params: dict, result) -> dict:
    return {"schema": ser.SCHEMA, "command": command,
            "params": params, "result": result}


def _weight_param(args):
    return args.weight


def _detect(series: FormalPowerSeries, weight: MomentWeight, args):
    """Shared pipeline: canonicalize, borel-divide, synthesize."""
    _, tail = series.split_constant()
    d = borel_transform(tail, weight).coefficients()
    if args.approx or not tail.exact:
        cap = args.cap if args.cap is not None else None
        return approx_recursion(
            [c for c in tail.coefficients()], weight,
            r_max=args.rmax, cap=cap,
        )
    return min_recursion(d, weight=weight, tol=args.tol)


# ---------------------------------------------------------------------------
# command handlers; each returns (exit_code, payload)


def _cmd_gen(args):
    obj = _read_input(args)
    rec = ser.recursion_from_json(obj)
    seeds = [ser.decode_coeff(c, obj.get("mode", "exact"))
             for c in obj["seeds"]]
    s = generate_from_recursion(rec, seeds, order=args.order)
    params = {"command": "gen", "order": args.order}
    return 0, _envelope("gen", params, ser.series_to_json(s))


def _cmd_detect(args):
    series = ser.series_from_json(_read_input(args))
    weight = _parse_weight(args.weight)
    out = _detect(series, weight, args)
    params = {"weight": args.weight, "tol": args.tol, "approx": args.approx,
              "rmax": args.rmax, "cap": args.cap,
              "hankel_extra": args.hankel_extra}
    if isinstance(out, NotFound):
        return 2, _envelope("detect", params, ser.notfound_to_json(out))
    if hasattr(out, "rec"):  # approx certificate
        return 0, _envelope("detect", params, ser.certificate_to_json(out))
    result = ser.recursion_to_json(out)
    if args.hankel_extra > 0:
        _, tail = series.split_constant()
        d = borel_transform(tail, weight).coefficients()
        result["hankel"] = ser.hankel_report_to_json(
            hankel_report(d, out.r, extra=args.hankel_extra)
        )
    return 0, _envelope("detect", params, result)


def _cmd_reconstruct(args):
    series = ser.series_from_json(_read_input(args))
    weight = _parse_weight(args.weight)
    rec = _detect(series, weight, args)
    params = {"weight": args.weight, "tol": args.tol}
    if isinstance(rec, NotFound):
        return 2, _envelope("reconstruct", params, ser.notfound_to_json(rec))
    if hasattr(rec, "rec"):
        rec = rec.rec
    _, tail = series.split_constant()
    d = borel_transform(tail, weight).coefficients()
    rf = rational_reconstruct(d, rec, tol=args.tol)
    return 0, _envelope("reconstruct", params, ser.rational_to_json(rf))


def _cmd_directions(args):
    rec = ser.recursion_from_json(_read_input(args))
    dirs = singular_directions(rec)
    result = {
        "args_radians": list(dirs.args),
        "multiplicities": list(dirs.multiplicities),
        "roots": [[r.real, r.imag] for r in dirs.roots],
    }
    return 0, _envelope("directions", {}, result)


def _cmd_ode(args):
    obj = _read_input(args)
    params = {"from": args.source, "order": args.order}
    if args.source == "recursion":
        rec = ser.recursion_from_json(obj)
        seeds = [ser.decode_coeff(c, obj.get("mode", "exact"))
                 for c in obj["seeds"]]
        spec = recursion_to_ode(rec, seeds, n_rhs=args.order)
        return 0, _envelope("ode", params, ser.odespec_to_json(spec))
    spec = ser.odespec_from_json(obj["equation"])
    series = ser.series_from_json(obj["series"])
    cert = ode_to_recursion(spec, series, order=args.order, tol=args.tol)
    if isinstance(cert, NotFound):
        return 2, _envelope("ode", params, ser.notfound_to_json(cert))
    return 0, _envelope("ode", params, ser.certificate_to_json(cert))


def _batch_rows(evaluator, zgrid, jobs):
    def one(z):
        res = evaluator(z)
        return (z, res)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, zgrid))
    return [one(z) for z in zgrid]


def _rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["z_re", "z_im", "sum_re", "sum_im", "err_est", "nodes"])
    for z, res in rows:
        w.writerow([repr(z.real), repr(z.imag), repr(res.value.real),
                    repr(res.value.imag), repr(res.error_estimate),
                    res.nodes_used])
    return buf.getvalue()


def _rows_to_json(rows) -> list:
    return [
        {"z": [z.real, z.imag], "value": [r.value.real, r.value.imag],
         "error_estimate": r.error_estimate, "nodes": r.nodes_used,
         "truncation_radius": r.truncation_radius}
        for z, r in rows
    ]


class _ShiftedSum:
    """Adds the recorded constant term to each batch result."""

    def __init__(self, inner, constant):
        self.inner = inner
        self.constant = complex(constant)

    def __call__(self, z):
        res = self.inner(z)
        return type(res)(value=res.value + self.constant,
                         error_estimate=res.error_estimate,
                         nodes_used=res.nodes_used,
                         truncation_radius=res.truncation_radius)


def _sum_input(args, q_mode=False):
    """Resolve a `sum`/`qsum` input into (rational_G, constant, extras)."""
    obj = _read_input(args)
    constant = 0j
    extras = {}
    if "rational" in obj:
        rf = ser.rational_from_json(obj["rational"])
        if "constant" in obj:
            c = obj["constant"]
            constant = complex(c[0], c[1]) if isinstance(c, list) else complex(c)
        return rf, constant, extras
    series = ser.series_from_json(obj)
    weight = _parse_weight(args.weight)
    c0, tail = series.split_constant()
    from .coeffs import floatify
    constant = complex(floatify(c0))
    d = borel_transform(tail, weight).coefficients()
    rec = min_recursion(d, weight=weight, tol=args.tol)
    if isinstance(rec, NotFound):
        raise SummaError(f"no recursion found: {rec.reason}")
    rf = rational_reconstruct(d, rec, tol=args.tol)
    extras["recursion"] = rec
    return rf, constant, extras


def _cmd_sum(args):
    cfg = QuadratureConfig(rel_tol=args.tol or 1e-10)
    rf, constant, _ = _sum_input(args)
    d = _parse_angle(args.direction)
    zgrid = _parse_zgrid(args.zgrid)
    ev = _ShiftedSum(lambda z: laplace_sum(rf, d, z, args.k, cfg), constant)
    rows = _batch_rows(ev, zgrid, args.jobs)
    params = {"direction": d, "zgrid": args.zgrid, "k": args.k,
              "jobs": args.jobs, "constant": [constant.real, constant.imag]}
    if args.format == "csv":
        return 0, _rows_to_csv(rows)
    return 0, _envelope("sum", params, _rows_to_json(rows))


def _cmd_qsum(args):
    cfg = QuadratureConfig(rel_tol=args.tol or 1e-10)
    rf, constant, extras = _sum_input(args, q_mode=True)
    weight = _parse_weight(args.weight)
    if weight.kind != "qpower":
        raise ParseError("qsum needs --weight qpower:q")
    q = float(weight.q)
    d = _parse_angle(args.direction)
    zgrid = _parse_zgrid(args.zgrid)
    ev = _ShiftedSum(lambda z: q_laplace_sum(rf, d, z, q, cfg), constant)
    rows = _batch_rows(ev, zgrid, args.jobs)
    params = {"direction": d, "zgrid": args.zgrid, "q": q, "jobs": args.jobs}
    variation = None
    if "recursion" in extras:
        rec = extras["recursion"]
        spec = recursion_to_ode(
            rec, _first_seeds(args, rec), n_rhs=rec.r)
        b = borel_transform(spec.rhs, weight)
        xs = [abs(z) for z in zgrid if abs(z) > 0][:3] or [0.3]
        variation = variation_check(rec, b, xs, n_window=40)
    if args.format == "csv":
        return 0, _rows_to_csv(rows)
    result = _rows_to_json(rows)
    payload = _envelope("qsum", params, result)
    if variation is not None:
        payload["variation_residual"] = variation
    return 0, payload


def _first_seeds(args, rec):
    series = ser.series_from_json(_read_input(args))
    _, tail = series.split_constant()
    return [tail.coeff(p) for p in range(1, rec.r + 1)]


def _cmd_verify(args):
    obj = _read_input(args)
    spec = ser.odespec_from_json(obj["equation"])
    series = ser.series_from_json(obj["series"])
    order = min(series.order, args.order)
    resid = formal_residual(spec, series, order)
    from .coeffs import floatify
    formal_max = max(
        (abs(floatify(resid.coeff_or_zero(p)))
         for p in range(resid.start, order + 1)), default=0.0,
    )
    result = {"formal_residual_max": formal_max, "order": order}
    params = {"order": order, "direction": args.direction,
              "zgrid": args.zgrid, "tol": args.tol}

    weight = kind_weight = None
    from .operators import Diff1, QDilation, weight_for
    kind_weight = weight_for(spec.kind)
    code = 0
    if args.zgrid and isinstance(spec.kind, (Diff1, QDilation)):
        d = _parse_angle(args.direction)
        zgrid = _parse_zgrid(args.zgrid)
        cfg = QuadratureConfig(rel_tol=args.tol or 1e-10)
        _, tail = series.split_constant()
        dseq = borel_transform(tail, kind_weight).coefficients()
        rec = min_recursion(dseq, weight=kind_weight, tol=args.tol or 1e-10)
        if isinstance(rec, NotFound):
            result["analytic"] = {"not_found": rec.reason}
            code = 2
        else:
            rf = rational_reconstruct(dseq, rec, tol=args.tol or 1e-8)
            if isinstance(spec.kind, Diff1):
                ev = LaplaceEvaluator(rf, d, cfg)
            else:
                ev = QLaplaceEvaluator(rf, d, float(kind_weight.q), cfg)
            result["analytic_residual_max"] = analytic_residual(
                spec, ev, zgrid)
            fit = asymptotic_check(
                lambda z: ev(z), tail, zgrid, kind_weight,
                n_max=min(10, order),
            )
            if isinstance(fit, Failure):
                result["asymptotic"] = {"failure": fit.reason}
                code = 2
            else:
                result["asymptotic"] = {"C": fit.C, "A": fit.A}
    return code, _envelope("verify", params, result)


def _cmd_seqdiag(args):
    kind, _, arg = args.mseq.partition(":")
    if kind == "factorial":
        M = SequenceM.factorial_power(float(arg or 1))
    elif kind == "qpower":
        M = SequenceM.qpower(float(arg))
    elif kind == "custom":
        with open(arg) as fh:
            vals = _load_json(fh.read())
        M = SequenceM.from_values(vals)
    else:
        raise ParseError(f"unknown sequence spec {args.mseq!r}")
    diag = diagnose(M, args.order, tail_horizon=args.horizon)
    params = {"mseq": args.mseq, "N": args.order, "horizon": args.horizon}

    def verdict(v):
        if isinstance(v, Failure):
            return {"failure": v.reason}
        if isinstance(v, Inconclusive):
            return {"inconclusive": v.reason}
        return v

    result = {
        "lc_ok": diag.lc_ok,
        "mg": verdict(diag.mg),
        "snq": verdict(diag.snq),
        "omega": "inf" if math.isinf(diag.omega_estimate)
                 else diag.omega_estimate,
        "proximate_order_ok": diag.proximate_order_ok,
        "proximate_spread": diag.proximate_spread,
    }
    code = 2 if (isinstance(diag.mg, Failure)
                 or isinstance(diag.snq, Inconclusive)) else 0
    return code, _envelope("seqdiag", params, result)


def _cmd_gevrey(args):
    series = ser.series_from_json(_read_input(args))
    est = gevrey_order_estimate(series, p_max=min(series.order, args.order))
    return 0, _envelope("gevrey", {"p_max": args.order}, {"order": est})


# ---------------------------------------------------------------------------


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="summa",
        description="Moment-recursion detection and ray summation toolkit",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, weight=True):
        p.add_argument("--input", "-i", required=True,
                       help="path, inline JSON, or - for stdin")
        p.add_argument("--output", "-o", default="-")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--jobs", type=int, default=1)
        if weight:
            p.add_argument("--weight", default="factorial:1",
                           help="factorial:s | qpower:q | custom:path")

    p = sub.add_parser("gen", help="generate a series from a recursion")
    common(p, weight=False)
    p.add_argument("--order", "-N", type=int, default=20)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("detect", help="minimal weighted recursion")
    common(p)
    p.add_argument("--approx", action="store_true")
    p.add_argument("--rmax", type=int, default=6)
    p.add_argument("--cap", type=float, default=None)
    p.add_argument("--hankel-extra", type=int, default=0)
    p.set_defaults(fn=_cmd_detect)

    p = sub.add_parser("reconstruct", help="rational Borel transform")
    common(p)
    p.add_argument("--approx", action="store_true")
    p.add_argument("--rmax", type=int, default=6)
    p.add_argument("--cap", type=float, default=None)
    p.set_defaults(fn=_cmd_reconstruct)

    p = sub.add_parser("directions", help="singular directions of a recursion")
    common(p, weight=False)
    p.set_defaults(fn=_cmd_directions)

    p = sub.add_parser("ode", help="recursion <-> equation conversion")
    common(p, weight=False)
    p.add_argument("--from", dest="source", choices=("recursion", "equation"),
                   default="recursion")
    p.add_argument("--order", "-N", type=int, default=20)
    p.set_defaults(fn=_cmd_ode)

    p = sub.add_parser("sum", help="Borel-Laplace sum over a z grid")
    common(p)
    p.add_argument("--direction", "-d", default="0.0")
    p.add_argument("--zgrid", required=True, help="start,stop,count[,arg]")
    p.add_argument("-k", type=float, default=1.0)
    p.set_defaults(fn=_cmd_sum)

    p = sub.add_parser("qsum", help="q-theta sum over a z grid")
    common(p)
    p.add_argument("--direction", "-d", default="0.0")
    p.add_argument("--zgrid", required=True)
    p.set_defaults(fn=_cmd_qsum)

    p = sub.add_parser("verify", help="formal + analytic + asymptotic checks")
    common(p, weight=False)
    p.add_argument("--order", "-N", type=int, default=40)
    p.add_argument("--direction", "-d", default="0.0")
    p.add_argument("--zgrid", default=None)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("seqdiag", help="strongly-regular sequence diagnostics")
    p.add_argument("--mseq", required=True,
                   help="factorial:s | qpower:q | custom:path")
    p.add_argument("--order", "-N", type=int, default=400)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--output", "-o", default="-")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(fn=_cmd_seqdiag)

    p = sub.add_parser("gevrey", help="coefficient growth order estimate")
    common(p, weight=False)
    p.add_argument("--order", "-N", type=int, default=200)
    p.set_defaults(fn=_cmd_gevrey)

    return ap


def main(argv=None) -> int:
    level = os.environ.get("SUMMA_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr,
                        level=getattr(logging, level, logging.WARNING))
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; map every usage error to 1
        return 0 if exc.code in (0, None) else 1
    try:
        code, payload = args.fn(args)
    except ParseError as exc:
        log.error("parse error: %s", exc)
        sys.stderr.write(f"ParseError: {exc}\n")
        return 1
    except SummaError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1
    _emit(args, payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
