"""Command-line front end.

Subcommands: analyze | certify | verify | search | bounds | audit.
Exit codes: 0 ok, 1 negative verdict, 2 input error, 3 resource cap,
4 numerical non-convergence.  Machine-readable output (--json) is a stable,
versioned schema: identical invocations produce byte-identical documents.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from fractions import Fraction

from . import audit as audit_mod
from . import bounds as bounds_mod
from . import formats
from . import forms as forms_mod
from . import multiplier as mult

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_NUMERICAL = 4


def _emit(args, payload: dict, human_lines: list[str]) -> None:
    if args.json:
        print(formats.dumps_stable({"format_version": formats.FORMAT_VERSION, **payload}))
    else:
        for line in human_lines:
            print(line)


def _load_form(path):
    form = formats.load_form(path)
    problems = forms_mod.validate(form)
    if problems:
        raise problems[0]
    return form


def cmd_analyze(args) -> int:
    form = _load_form(args.form)
    lam = forms_mod.lambda_min(form, tol=args.tolerance)
    sharp = forms_mod.lambda_sharp(form, tol=args.tolerance)
    big = forms_mod.big_lambda(form)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", forms_mod.NotDiagonalWarning)
        lt = forms_mod.lambda_tilde(form)
    diagonal = forms_mod.is_diagonal(form)
    payload = {
        "command": "analyze",
        "n": form.n,
        "m": form.m,
        "terms": len(form.coeffs),
        "diagonal": diagonal,
        "lambda": lam.value,
        "lambda_uncertainty": lam.uncertainty if math.isfinite(lam.uncertainty) else None,
        "lambda_certified": lam.certified,
        "big_lambda": big,
        "big_lambda_sq": formats.format_rational(forms_mod.big_lambda_sq(form)),
        "lambda_tilde": formats.format_rational(lt),
        "lambda_sharp": sharp.value,
        "converged": lam.converged and sharp.converged,
    }
    unc = f" (+- {lam.uncertainty:.3e} certified)" if lam.certified else " (uncertified)"
    _emit(
        args,
        payload,
        [
            f"form: n = {form.n}, m = {form.m}, {len(form.coeffs)} coefficient(s), "
            f"{'diagonal' if diagonal else 'non-diagonal'}",
            f"lambda       (sphere min)      = {lam.value:.12g}{unc}",
            f"Lambda       (weighted Frob.)  = {big:.12g}  [Lambda^2 = {forms_mod.big_lambda_sq(form)}]",
            f"Lambda-tilde (diagonal max)    = {float(lt):.12g}  [= {lt}]",
            f"Lambda-sharp (sphere sup |f|)  = {sharp.value:.12g}",
        ],
    )
    if not (lam.converged and sharp.converged):
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_certify(args) -> int:
    form = _load_form(args.form)
    try:
        cert = mult.sos_decompose(form, args.N, mode=args.mode, size_cap=args.size_cap)
    except mult.NotPsdError as exc:
        verdict = mult.is_psd(
            mult.multiplier_matrix(form, args.N, size_cap=args.size_cap), mode="exact"
        )
        witness_note = ""
        if verdict.witness is not None:
            support = [
                (i, str(w)) for i, w in enumerate(verdict.witness) if not w.is_zero
            ]
            witness_note = f"; witness support {support}, value {verdict.witness_value}"
        _emit(
            args,
            {
                "command": "certify",
                "N": args.N,
                "psd": False,
                "witness_value": str(verdict.witness_value),
            },
            [f"not a sum of squares at N = {args.N}: {exc}{witness_note}"],
        )
        return EXIT_NEGATIVE
    if args.out:
        formats.save_certificate(cert, args.out, form=form)
    payload = {
        "command": "certify",
        "N": args.N,
        "psd": True,
        "mode": cert.mode,
        "squares": cert.num_squares(),
        "verified": cert.verified,
        "residual": cert.residual,
        "out": args.out,
    }
    _emit(
        args,
        payload,
        [
            f"PSD at N = {args.N}: {cert.num_squares()} squares, verification {cert.verified}"
            + (f" (residual {cert.residual:.3e})" if cert.mode == "float" else ""),
            f"certificate written to {args.out}" if args.out else "no --out given; certificate not saved",
        ],
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    cert, form = formats.load_certificate(args.certificate)
    if form is None:
        if not args.form:
            raise formats.ParseError("certificate has no embedded form; pass --form")
        form = _load_form(args.form)
    status, residual = mult.verify_certificate(form, cert, size_cap=args.size_cap)
    payload = {
        "command": "verify",
        "N": cert.N,
        "mode": cert.mode,
        "status": status,
        "residual": residual,
    }
    _emit(
        args,
        payload,
        [
            f"certificate at N = {cert.N} ({cert.mode} mode): {status}"
            + (f", residual {residual:.3e}" if residual is not None and cert.mode == "float" else "")
        ],
    )
    return EXIT_OK if status in ("exact-pass", "float-pass") else EXIT_NEGATIVE


def cmd_search(args) -> int:
    form = _load_form(args.form)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        found = mult.minimal_sos_N(form, args.n_max, size_cap=args.size_cap)
    payload = {"command": "search", "n_max": args.n_max, "minimal_N": found}
    if found is None:
        _emit(args, payload, [f"no PSD multiplier matrix up to N = {args.n_max}"])
        return EXIT_NEGATIVE
    _emit(args, payload, [f"minimal N = {found}"])
    return EXIT_OK


def cmd_bounds(args) -> int:
    form = _load_form(args.form)
    report = bounds_mod.bound_report(
        form,
        C=Fraction(args.C).limit_denominator(10**9),
        n_max=args.n_max,
        size_cap=args.size_cap,
    )

    def show(x, overflow=False):
        if overflow:
            return "overflow"
        return "n/a" if x is None else str(x)

    payload = {
        "command": "bounds",
        "lambda": report.lambda_value,
        "big_lambda": report.big_lambda,
        "lambda_tilde": report.lambda_tilde,
        "lambda_sharp": report.lambda_sharp,
        "diagonal": report.diagonal,
        "empirical_minimal_N": report.empirical_minimal_N,
        "certified_N": report.certified_N,
        "powers_resnick_N": report.powers_resnick_N,
        "to_yeung_N": report.to_yeung_N,
        "nie_schweighofer_N": str(report.nie_schweighofer_N)
        if report.nie_schweighofer_N is not None
        else None,
        "nie_schweighofer_overflow": report.nie_schweighofer_overflow,
        "universal_C_used": formats.format_rational(report.universal_C_used),
        "smallest_sufficient_C": formats.format_rational(report.smallest_sufficient_C)
        if report.smallest_sufficient_C is not None
        else None,
        "checks": report.checks,
        "notes": report.notes,
    }
    lines = [
        f"invariants: lambda = {report.lambda_value:.6g}, Lambda = {report.big_lambda:.6g}, "
        f"Lambda-tilde = {report.lambda_tilde:.6g}, Lambda-sharp = {report.lambda_sharp:.6g}",
        f"{'bound':<28}{'N':>16}",
        f"{'empirical minimal':<28}{show(report.empirical_minimal_N):>16}",
        f"{'semiclassical (C=' + str(report.universal_C_used) + ')':<28}{show(report.certified_N):>16}",
        f"{'Powers-Resnick (diagonal)':<28}{show(report.powers_resnick_N):>16}",
        f"{'To-Yeung':<28}{show(report.to_yeung_N):>16}",
        f"{'Nie-Schweighofer':<28}{show(report.nie_schweighofer_N, report.nie_schweighofer_overflow):>16}",
        f"smallest sufficient C (1/64 grid): {show(report.smallest_sufficient_C)}",
    ]
    if report.notes:
        lines.append("notes: " + "; ".join(f"{k}: {v}" for k, v in sorted(report.notes.items())))
    if report.checks:
        bad = [k for k, ok in report.checks.items() if not ok]
        lines.append("cross-checks: " + ("all hold" if not bad else f"FAILED: {bad}"))
    _emit(args, payload, lines)
    if report.checks and not all(report.checks.values()):
        return EXIT_NEGATIVE
    return EXIT_OK


def _audit_reports(args) -> list[audit_mod.AuditReport]:
    reports: list[audit_mod.AuditReport] = []
    suite = args.suite
    form = _load_form(args.form) if args.form else None

    if suite in ("laplacian", "all"):
        if form is None:
            if suite == "laplacian":
                raise formats.ParseError("--suite laplacian requires --form")
        else:
            reports.extend(audit_mod.check_laplacian_powers(form, samples=args.samples))

    if suite in ("radial", "all"):
        for M in [0, 1, 5, 10, 25, 50] if args.M is None else [args.M]:
            for n in [1, 2, 3, 6] if args.n is None else [args.n]:
                reports.append(audit_mod.radial_I1(args.h or 0.01, M, n))

    if suite in ("tails", "all"):
        rhos = [args.rho] if args.rho is not None else [5, 10, 20, 50, 100]
        deltas = [args.delta] if args.delta is not None else [0.1, 0.3, 0.5, 0.7, 0.9]
        for rho in rhos:
            for delta in deltas:
                reports.append(audit_mod.tail_J(rho, delta))
        reports.append(audit_mod.tail_delta_inequality())

    if suite in ("localization", "all"):
        n = args.n or 2
        m = args.m or 2
        N = args.N or 320
        h = args.h or 1.0 / N
        eps = args.epsilon or audit_mod.default_epsilon(h)
        params = audit_mod.RegimeParams(h=h, N=N, m=m, n=n, epsilon=eps)
        reports.append(audit_mod.check_sigma_window(params))
        ks = [args.k] if args.k is not None else list(range(m + 1))
        for k in ks:
            try:
                reports.append(audit_mod.localization_report(params, k))
            except audit_mod.WindowViolated as exc:
                reports.append(
                    audit_mod.AuditReport(
                        "localization-E",
                        {"h": h, "M": params.M, "k": k, "epsilon": eps, "n": n},
                        math.nan,
                        math.nan,
                        math.nan,
                        False,
                        notes=f"window violated: {exc}",
                    )
                )
        mc_samples = min(args.samples if args.samples != 10_000 else 200_000, 2_000_000)
        reports.append(
            audit_mod.mc_localization_check(
                2, 6, 2, h=1.0 / 6.0, epsilon=0.3, samples=mc_samples, seed=args.seed
            )
        )

    if suite in ("basic", "all"):
        if form is None:
            if suite == "basic":
                raise formats.ParseError("--suite basic requires --form")
        else:
            lam = forms_mod.lambda_min(form).value
            big = forms_mod.big_lambda(form)
            if args.h is not None:
                N = args.N or max(1, math.ceil(1.0 / args.h))
                eps = args.epsilon or audit_mod.default_epsilon(args.h)
                params = audit_mod.RegimeParams(h=args.h, N=N, m=form.m, n=form.n, epsilon=eps)
                value, rep = audit_mod.basic_rhs(form, params, lam, big)
                reports.append(rep)
            else:
                scan = audit_mod.empirical_h0(form, lambda_value=lam, big_lambda_value=big)
                notes = (
                    f"h0 = {scan.h0}, implied N = {scan.implied_N}"
                    if scan.found
                    else f"no positive RHS ({scan.note})"
                )
                reports.append(
                    audit_mod.AuditReport(
                        "empirical-h0",
                        {"grid_points": len(scan.entries)},
                        scan.h0 if scan.h0 is not None else math.nan,
                        0.0,
                        math.nan,
                        scan.found,
                        notes=notes,
                    )
                )
    return reports


def cmd_audit(args) -> int:
    try:
        reports = _audit_reports(args)
    except audit_mod.QuadratureNonConvergence as exc:
        print(f"quadrature failed to converge: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.json:
        payload = {
            "command": "audit",
            "suite": args.suite,
            "reports": [
                {
                    "check": r.check_name,
                    "parameters": {k: (str(v) if isinstance(v, Fraction) else v) for k, v in r.parameters.items()},
                    "lhs": None if isinstance(r.lhs, float) and math.isnan(r.lhs) else r.lhs,
                    "rhs": None if isinstance(r.rhs, float) and math.isnan(r.rhs) else r.rhs,
                    "ratio": None if isinstance(r.ratio, float) and math.isnan(r.ratio) else r.ratio,
                    "pass": r.passed,
                    "notes": r.notes,
                }
                for r in reports
            ],
        }
        print(formats.dumps_stable({"format_version": formats.FORMAT_VERSION, **payload}))
    else:
        for r in reports:
            print(r.line())
        total = len(reports)
        good = sum(r.passed for r in reports)
        print(f"{good}/{total} checks passed")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsos",
        description="Hermitian sum-of-squares certificates, shift bounds, and numerical audits",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--seed", type=int, default=20240, help="seed for stochastic audit components")
    parser.add_argument("--size-cap", type=int, default=mult.DEFAULT_SIZE_CAP, help="matrix dimension cap")
    parser.add_argument("--tolerance", type=float, default=1e-9, help="optimizer relative tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="scalar invariants of a form")
    p.add_argument("form")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("certify", help="extract and verify an SOS certificate at shift N")
    p.add_argument("form")
    p.add_argument("N", type=int)
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.add_argument("--out", help="write the certificate file here")
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("verify", help="re-verify a stored certificate")
    p.add_argument("certificate")
    p.add_argument("--form", help="form file when the certificate does not embed one")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("search", help="minimal shift N with a PSD multiplier matrix")
    p.add_argument("form")
    p.add_argument("--n-max", type=int, default=10)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("bounds", help="evaluate all published sufficient bounds")
    p.add_argument("form")
    p.add_argument("--C", type=float, default=1.0, help="universal constant of the semiclassical bound")
    p.add_argument("--n-max", type=int, default=10)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("audit", help="numerical verification suites")
    p.add_argument(
        "--suite",
        choices=["laplacian", "radial", "tails", "localization", "basic", "all"],
        default="all",
    )
    p.add_argument("--form", help="form file (laplacian and basic suites)")
    p.add_argument("--rho", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--M", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(fn=cmd_audit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except formats.ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except forms_mod.FormError as exc:
        print(f"invalid form: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except mult.SizeCapExceeded as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (mult.NumericalIndeterminate, audit_mod.QuadratureNonConvergence) as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except audit_mod.WindowViolated as exc:
        print(f"sigma window violated: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
