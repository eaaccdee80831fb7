"""Command-line front end.

One subcommand per library entry point; every run emits a JSON record
(default), a key/value text rendering, or CSV rows where the result is
naturally tabular.  Exit codes: 0 computed or certified, 2 when a
certification is inconclusive or a verification fails, 1 for usage and
runtime errors.  All numeric output carries 17 significant digits.
With ``--figures DIR`` the report paths also render PNG companions.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import certopt, metrics
from .metrics import VerificationError
from .polyalg import format_float, pullback_torus
from .symcore import (BOUNDARY_TOL, RootFindingError, classify_point,
                      membership_via_flambda)

GRID_GATE_EVALS = 1.0e8


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this interface reserves 2 for
    inconclusive certifications, so usage errors are remapped to 1."""

    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _parse_complex(s: str) -> complex:
    parts = s.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ValueError(f"bad complex literal {s!r}; want 're' or 're,im'")


def _parse_point(s: str) -> tuple:
    entries = [e for e in s.split(";") if e.strip()]
    if not entries:
        raise ValueError("empty point")
    return tuple(_parse_complex(e) for e in entries)


def _flatten(obj, prefix: str = "") -> list:
    out = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.extend(_flatten(v, f"{prefix}{k}." if prefix else f"{k}."))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            out.extend(_flatten(v, f"{prefix}{i}."))
    else:
        out.append((prefix[:-1], obj))
    return out


def _emit(args, payload: dict, rows: list | None = None) -> None:
    fmt = args.format
    if fmt == "json":
        text = json.dumps(payload, indent=2)
    elif fmt == "csv":
        buf = io.StringIO()
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        else:
            writer = csv.writer(buf)
            writer.writerow(["key", "value"])
            writer.writerows(_flatten(payload))
        text = buf.getvalue().rstrip("\n")
    else:
        lines = []
        chain = payload.get("chain_text")
        if chain:
            lines.append(chain)
            lines.append("")
        lines.extend(f"{k} = {v}" for k, v in _flatten(payload)
                     if k != "chain_text")
        text = "\n".join(lines)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _verdict_dict(v) -> dict:
    return {"kind": v.kind, "margin": format_float(v.margin),
            "tolerance": format_float(v.tolerance),
            "diagnostic": v.diagnostic}


# ----------------------------------------------------------------------
# subcommand handlers; each returns (exit_code, payload, rows)
# ----------------------------------------------------------------------

def _cmd_member(args):
    z = _parse_point(args.z)
    v1 = classify_point(z, tolerance=args.tolerance)
    v2 = membership_via_flambda(z, tolerance=args.slice_tolerance)
    hard_disagree = {v1.kind, v2.kind} == {"inside", "outside"}
    payload = {"command": "member",
               "point": [{"re": format_float(w.real),
                          "im": format_float(w.imag)} for w in z],
               "root_oracle": _verdict_dict(v1),
               "slice_oracle": _verdict_dict(v2),
               "agree": not hard_disagree}
    return (2 if hard_disagree else 0), payload, None


def _cmd_rho(args):
    X = _parse_point(args.X)
    n = args.n if args.n is not None else len(X)
    value = metrics.rho(n, X)
    support = sum(1 for x in X if x != 0)
    payload = {"command": "rho", "n": n, "value": format_float(value),
               "method": ("two-index closed form, cross-checked"
                          if support <= 2 else
                          "circle critical-point enumeration")}
    figs = []
    if args.figures:
        th = np.linspace(0.0, 2 * math.pi, 2048)
        num = np.array([j * complex(x) for j, x in enumerate(X, start=1)])
        vals = np.abs(np.polyval(num[::-1], np.exp(1j * th))) / n
        from . import figures as figmod
        figs.append(figmod.curve(
            th, vals, f"{args.figures}/rho_curve.png",
            marks=[(float(th[int(np.argmax(vals))]), float(np.max(vals)),
                    "max")],
            xlabel="theta", ylabel="|N(e^{i theta})|/n",
            title="slice-derivative modulus"))
        payload["figures"] = figs
    return 0, payload, None


def _cmd_pdist(args):
    if args.sweep:
        if args.direction is None or args.n is None:
            raise ValueError("--sweep needs -n and --direction")
        n, k = args.n, args.direction
        if not 1 <= k <= n:
            raise ValueError("need 1 <= direction <= n")
        ts = [float(t) for t in args.sweep.split(",") if t.strip()]
        rows = []
        for t in ts:
            w = [0.0] * n
            w[k - 1] = t
            est = metrics.p_distance([0.0] * n, w,
                                     refine_tol=args.refine_tol)
            rows.append({"t": format_float(t),
                         "estimate": format_float(est),
                         "slope": format_float(est / t)})
        payload = {"command": "pdist", "sweep": rows,
                   "direction": k, "n": n,
                   "slope_limit": format_float(k / n)}
        figs = []
        if args.figures:
            from . import figures as figmod
            figs.append(figmod.curve(
                [float(r["t"]) for r in rows],
                [float(r["slope"]) for r in rows],
                f"{args.figures}/pdist_sweep.png",
                marks=[(float(rows[-1]["t"]), k / n, f"k/n = {k}/{n}")],
                xlabel="t", ylabel="estimate / t",
                title="distance estimate slope toward k/n"))
            payload["figures"] = figs
        return 0, payload, rows
    if not args.z or not args.w:
        raise ValueError("pdist needs -z and -w (or --sweep)")
    z = _parse_point(args.z)
    w = _parse_point(args.w)
    value, wit = metrics.p_distance_witness(z, w, refine_tol=args.refine_tol)
    payload = {"command": "pdist", "value": format_float(value),
               "witness_angles": [format_float(a) for a in wit],
               "refine_tol": format_float(args.refine_tol),
               "note": "lower estimate, monotone under refinement"}
    return 0, payload, None


def _cmd_mnc(args):
    c = _parse_complex(args.c)
    res = metrics.boundary_quad_max(args.n, c, tol=args.tol,
                                    certify=not args.estimate)
    payload = {"command": "mnc", **res.to_json_dict()}
    code = 0
    if res.certificate is not None \
            and res.certificate.conclusion == "inconclusive":
        code = 2
    if args.figures and args.n == 3:
        from . import figures as figmod
        F = pullback_torus(metrics._quad_poly(args.n, c), reduce=True)
        payload["figures"] = [figmod.heatmap_t2(
            F, f"{args.figures}/mnc_heatmap.png",
            marks=[res.witness] if len(res.witness) == 2 else [],
            title=f"|z2 + c z1^2| pullback, c = {c}")]
    return code, payload, None


def _cmd_gamma2(args):
    gb = metrics.gamma2_bounds(args.n, tol=args.tol)
    payload = {"command": "gamma2", **gb.to_json_dict()}
    code = 0
    if gb.certificate is not None \
            and gb.certificate.conclusion == "inconclusive":
        code = 2
    if args.figures and args.n % 2 == 1 and args.n <= 5:
        from . import figures as figmod
        cs = np.linspace(0.0, 0.5, 41)
        ms = [metrics.boundary_quad_max(args.n, float(c),
                                        certify=False).value for c in cs]
        payload["figures"] = [figmod.curve(
            cs, ms, f"{args.figures}/gamma2_scan.png",
            marks=[(gb.c_star, gb.m_star, "c*")],
            xlabel="c", ylabel="m(n, c)",
            title=f"quadratic family maximum, n = {args.n}")]
    return code, payload, None


def _cmd_verify_prop2(args):
    res = metrics.verify_taylor_strict(args.n, args.k, tol=args.tol)
    payload = {"command": "verify prop2", **res.to_json_dict()}
    return (2 if res.inconclusive else 0), payload, None


def _cmd_verify_prop4_lower(args):
    res = metrics.verify_gamma2_lower(args.n, eps=args.eps, tol=args.tol)
    payload = {"command": "verify prop4-lower", **res.to_json_dict()}
    if args.figures and args.n == 3:
        from . import figures as figmod
        F = pullback_torus(metrics._lower_family_poly(args.n, args.eps),
                           reduce=True)
        payload["figures"] = [figmod.heatmap_t2(
            F, f"{args.figures}/prop4_lower_heatmap.png",
            marks=[res.witness_angles],
            title=f"lower-bound family pullback, eps = {args.eps}")]
    return (0 if res.ok else 2), payload, None


def _cmd_verify_prop4_upper(args):
    res = metrics.verify_gamma2_upper(args.n)
    payload = {"command": "verify prop4-upper", **res.to_json_dict()}
    return (0 if res.ok else 2), payload, None


def _cmd_verify_prop8(args):
    g2 = args.gamma2 if args.gamma2 is not None else None
    res = metrics.reiffen2_cross_bound(args.n, _parse_complex(args.x1),
                                       _parse_complex(args.xn),
                                       gamma2_estimate=g2)
    payload = {"command": "verify prop8", **res.to_json_dict()}
    return 0, payload, None


def _cmd_verify_even(args):
    res = metrics.verify_even_extremals(args.n, tol=args.tol)
    payload = {"command": "verify even-extremals", **res.to_json_dict()}
    return (0 if res.ok else 2), payload, None


def _cmd_lemma6(args):
    consts = metrics.quad_min_closed_form()
    checks = {"at_c0": metrics.quad_slice_identity(consts.c0),
              "at_0.3": metrics.quad_slice_identity(0.3)}
    if args.fc_c is not None:
        checks[f"at_{args.fc_c:g}"] = metrics.quad_slice_identity(args.fc_c)
    ok = all(c.ok for c in checks.values())
    payload = {"command": "lemma6", "constants": consts.to_json_dict(),
               "slice_identity": {k: v.to_json_dict()
                                  for k, v in checks.items()},
               "ok": ok}
    if args.figures:
        from . import figures as figmod
        cs = np.linspace(0.10, 0.30, 400)
        gs = [metrics.quad_family_max(float(c)) for c in cs]
        payload["figures"] = [figmod.curve(
            cs, gs, f"{args.figures}/lemma6_family.png",
            marks=[(consts.c0, consts.g_min, "c0"),
                   (consts.delta_hi, consts.endpoint_value, "Delta edge")],
            xlabel="c", ylabel="max of f_c on [-1, 1]",
            title="quadratic family maximum near its minimum")]
    return (0 if ok else 2), payload, None


def _grid_evals_estimate(step: float) -> float:
    npts = int(round(6.2832 / step)) + 1 if abs(step - 4e-5) < 1e-18 \
        else int(math.floor(2 * math.pi / step)) + 2
    return float(npts) ** 2


def _cmd_lemma7(args):
    mode = args.mode
    if mode in ("grid", "paper-grid"):
        step = args.step if args.step is not None else 4e-5
        est = _grid_evals_estimate(step)
        if est > GRID_GATE_EVALS and not args.yes:
            print(f"grid mode at step {step:g} needs about {est:.3g} "
                  "evaluations (hours of compute); rerun with --yes to "
                  "proceed or use --mode bb", file=sys.stderr)
            return 1, None, None
    res = metrics.certify_quartic_competitor(
        mode=mode, step=args.step, threads=args.threads, tol=args.tol)
    cert = res.certificate
    payload = {"command": "lemma7", "mode": mode, **res.to_json_dict()}
    if args.figures:
        from . import figures as figmod
        F = pullback_torus(res.polynomial, reduce=True)
        payload["figures"] = [figmod.heatmap_t2(
            F, f"{args.figures}/lemma7_heatmap.png",
            marks=[w[0] for w in res.witnesses],
            title="weight-4 competitor pullback |g|")]
    return (0 if cert.conclusion == "certified_below" else 2), payload, None


def _cmd_hscan(args):
    c = args.c if args.c is not None else metrics.quad_min_closed_form().c0
    pts = certopt.critical_scan(c, grid_n=args.grid_n,
                                newton_tol=args.newton_tol)
    rows = [{"alpha": format_float(p.angles[0]),
             "beta": format_float(p.angles[1]),
             "gamma": format_float(p.angles[2]),
             "value": format_float(p.value),
             "grad_norm": format_float(p.grad_norm)} for p in pts]
    payload = {"command": "hscan", "c": format_float(c),
               "count": len(pts),
               "max_value": format_float(pts[0].value) if pts else None,
               "points": rows}
    if args.figures:
        from . import figures as figmod
        payload["figures"] = [figmod.critical_points_figure(
            pts, f"{args.figures}/hscan_points.png",
            title=f"critical points of the three-angle objective, "
                  f"c = {c:.7f}")]
    return 0, payload, rows


def _cmd_report_g3(args):
    if args.mode in ("grid", "paper-grid") and not args.yes:
        print("report g3 in grid mode re-runs the full historical grid; "
              "pass --yes to confirm or use --mode bb", file=sys.stderr)
        return 1, None, None
    rep = metrics.g3_separation_report(mode=args.mode, tol=args.tol)
    payload = {"command": "report g3", **rep.to_json_dict()}
    figs = []
    if args.figures:
        from . import figures as figmod
        figs.append(figmod.separation_figure(
            rep.C0, rep.C1, f"{args.figures}/g3_separation.png"))
        F = pullback_torus(rep.competitor.polynomial, reduce=True)
        figs.append(figmod.heatmap_t2(
            F, f"{args.figures}/g3_heatmap.png",
            marks=[w[0] for w in rep.competitor.witnesses],
            title="certified competitor pullback |g|"))
        payload["figures"] = figs
    if args.format == "json":
        print(rep.chain_text, file=sys.stderr)
    return (0 if rep.valid else 2), payload, None


# ----------------------------------------------------------------------
# parser assembly
# ----------------------------------------------------------------------

def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"],
                        default="json")
    common.add_argument("--output", default=None, metavar="PATH")
    common.add_argument("--figures", default=None, metavar="DIR",
                        help="also render PNG figures into DIR")
    common.add_argument("--threads", type=int, default=1)

    p = _Parser(prog="symdisc",
                description="certified metric computations on the "
                            "symmetrized polydisc")
    sub = p.add_subparsers(dest="command", required=True,
                           parser_class=_Parser)

    q = sub.add_parser("member", parents=[common],
                       help="two-oracle membership test")
    q.add_argument("-z", required=True,
                   help="point 're,im;re,im;...' (n entries)")
    q.add_argument("--tolerance", type=float, default=BOUNDARY_TOL)
    q.add_argument("--slice-tolerance", type=float, default=1e-6)
    q.set_defaults(fn=_cmd_member)

    q = sub.add_parser("rho", parents=[common],
                       help="slice-derivative bound in a direction")
    q.add_argument("-n", type=int, default=None)
    q.add_argument("-X", required=True, help="direction 're,im;...'")
    q.set_defaults(fn=_cmd_rho)

    q = sub.add_parser("pdist", parents=[common],
                       help="reduction-map distance estimate")
    q.add_argument("-z", default=None)
    q.add_argument("-w", default=None)
    q.add_argument("-n", type=int, default=None)
    q.add_argument("--refine-tol", type=float, default=1e-6)
    q.add_argument("--sweep", default=None,
                   help="comma list of t values for 0 vs t*e_k")
    q.add_argument("--direction", type=int, default=None, metavar="K")
    q.set_defaults(fn=_cmd_pdist)

    q = sub.add_parser("mnc", parents=[common],
                       help="certified max of |z2 + c z1^2| on the torus")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("-c", required=True, help="complex 're,im'")
    q.add_argument("--tol", type=float, default=1e-7)
    q.add_argument("--estimate", action="store_true",
                   help="multistart estimate instead of a certificate")
    q.set_defaults(fn=_cmd_mnc)

    q = sub.add_parser("gamma2", parents=[common],
                       help="bounds and estimate for gamma(0;e_2)")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--tol", type=float, default=None)
    q.set_defaults(fn=_cmd_gamma2)

    v = sub.add_parser("verify", help="claim verifiers")
    vsub = v.add_subparsers(dest="claim", required=True,
                            parser_class=_Parser)

    q = vsub.add_parser("prop2", parents=[common],
                        help="strict Taylor-coefficient gap")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("-k", type=int, required=True)
    q.add_argument("--tol", type=float, default=1e-4)
    q.set_defaults(fn=_cmd_verify_prop2)

    q = vsub.add_parser("prop4-lower", parents=[common],
                        help="lower-bound family maximum and structure")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--eps", type=float, default=0.0)
    q.add_argument("--tol", type=float, default=1e-6)
    q.set_defaults(fn=_cmd_verify_prop4_lower)

    q = vsub.add_parser("prop4-upper", parents=[common],
                        help="boundary-point threshold identities")
    q.add_argument("-n", type=int, required=True)
    q.set_defaults(fn=_cmd_verify_prop4_upper)

    q = vsub.add_parser("prop8", parents=[common],
                        help="order-2 cross-direction bounds")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--x1", default="1", help="complex 're,im'")
    q.add_argument("--xn", default="1", help="complex 're,im'")
    q.add_argument("--gamma2", type=float, default=None,
                   help="override the gamma2 estimate (skips the scan)")
    q.set_defaults(fn=_cmd_verify_prop8)

    q = vsub.add_parser("even-extremals", parents=[common],
                        help="both even-n extremal polynomials hit max 1")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--tol", type=float, default=1e-6)
    q.set_defaults(fn=_cmd_verify_even)

    q = sub.add_parser("lemma6", parents=[common],
                       help="closed-form family constants and identities")
    q.add_argument("--fc-c", type=float, default=None,
                   help="extra slice-identity check at this c")
    q.set_defaults(fn=_cmd_lemma6)

    q = sub.add_parser("lemma7", parents=[common],
                       help="certify the weight-4 competitor below 1")
    q.add_argument("--mode", choices=["bb", "grid", "paper-grid"],
                   default="bb")
    q.add_argument("--step", type=float, default=None)
    q.add_argument("--tol", type=float, default=1e-6)
    q.add_argument("--yes", action="store_true",
                   help="confirm very large grid runs")
    q.set_defaults(fn=_cmd_lemma7)

    q = sub.add_parser("hscan", parents=[common],
                       help="critical points of the three-angle objective")
    q.add_argument("--c", type=float, default=None,
                   help="family parameter (default: the minimizing c0)")
    q.add_argument("--grid-n", type=int, default=24)
    q.add_argument("--newton-tol", type=float, default=1e-10)
    q.set_defaults(fn=_cmd_hscan)

    r = sub.add_parser("report", help="assembled reports")
    rsub = r.add_subparsers(dest="which", required=True,
                            parser_class=_Parser)
    q = rsub.add_parser("g3", parents=[common],
                        help="the separation C1 > C0 on G_3")
    q.add_argument("--mode", choices=["bb", "grid", "paper-grid"],
                   default="bb")
    q.add_argument("--tol", type=float, default=1e-6)
    q.add_argument("--yes", action="store_true")
    q.set_defaults(fn=_cmd_report_g3)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        code, payload, rows = args.fn(args)
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 2
    except (ValueError, RootFindingError, ZeroDivisionError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if payload is not None:
        _emit(args, payload, rows)
    return code


if __name__ == "__main__":
    sys.exit(main())
