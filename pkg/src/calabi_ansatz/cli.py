"""Command-line entry point: ``calabi-ansatz <command> [options]``.

Exit codes: 0 success or solvable, 2 certified no-solution, 1 usage or
internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .checks import CHECK_IDS, run_checks
from .exact import decimal_string, enclose, format_scalar, to_json
from .geometry import gauge_volume, pde_residual, reconstruct, to_csv
from .profile import SolvabilityReport, solvability
from .scenario import Case, ConstantSet, InvalidScenario, Scenario, constants
from .svgplot import Series, line_chart

EXIT_OK, EXIT_ERROR, EXIT_NO_SOLUTION = 0, 1, 2
PRECISION_ENV = "ANSATZ_PRECISION_EXP"


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational p/q, got {text!r}") from None
    return v


def _positive_fraction(text: str) -> Fraction:
    v = _fraction(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV, "30")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None
    if n <= 0:
        raise UsageError(f"{PRECISION_ENV} must be positive")
    return n


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit code 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--case", choices=[c.value for c in Case], default=Case.EVEN.value)
    common.add_argument("--k", type=int, default=2)
    common.add_argument("--m1", type=int, default=0)
    common.add_argument("--m2", type=int, default=1)
    common.add_argument("--alpha1", type=_positive_fraction, default=Fraction(1), metavar="P/Q")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--csv", metavar="PATH", help="write per-node reconstruction table")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--tol", type=_positive_fraction, default=Fraction(1, 10**12), metavar="P/Q")
    common.add_argument("--eps", type=_positive_fraction, default=Fraction(1, 100), metavar="P/Q")
    common.add_argument("--nodes", type=int, default=512)
    common.add_argument("--precision-exp", type=int, default=None, metavar="N",
                        help=f"enclosure width 10^-N (default from {PRECISION_ENV}, else 30)")

    p = _Parser(prog="calabi-ansatz", description="Exact coupled KE/HYM solutions on P(L+O) over (P^1)^k.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("constants", parents=[common], help="topological constants and coupling constraint")
    sub.add_parser("solve", parents=[common], help="solvability verdict and momentum profile")
    v = sub.add_parser("verify", parents=[common], help="run the verification suite")
    v.add_argument("ids", nargs="*", metavar="CHECK", help=f"one or more of: {', '.join(CHECK_IDS)}")
    v.add_argument("--all", action="store_true")
    v.add_argument("--acceptance-id", action="append", default=[], metavar="CHECK",
                   help="same as a positional CHECK; repeatable")
    sw = sub.add_parser("sweep", parents=[common], help="verdicts over a range of k")
    sw.add_argument("--k-min", type=int, default=1)
    sw.add_argument("--k-max", type=int, default=8)
    sw.add_argument("--jobs", type=int, default=1)
    pl = sub.add_parser("plot", parents=[common], help="SVG of phi, scaled Q and s")
    pl.add_argument("--no-s", action="store_true", help="omit the reconstructed s(tau)")
    sub.add_parser("export", parents=[common], help="scenario, constants and report as JSON")
    return p


def _scenario(args: argparse.Namespace) -> Scenario:
    return Scenario(Case(args.case), args.k, args.m1, args.m2, args.alpha1)


def _width(args: argparse.Namespace) -> Fraction:
    n = args.precision_exp if args.precision_exp is not None else _default_precision()
    if n <= 0:
        raise UsageError("--precision-exp must be positive")
    return Fraction(1, 10**n)


def _emit(text: str, args: argparse.Namespace) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _decimal(x: Any, width: Fraction) -> str:
    places = len(str(width.denominator)) - 1
    return f"{float(enclose(x, Fraction(1, 10**17))):.12g}  {decimal_string(x, places)}"


# --------------------------------------------------------------------------
# constants


def constants_json(cs: ConstantSet, width: Fraction) -> dict:
    out: dict = {"scenario": cs.scenario.to_json()}
    for key, val in _constant_items(cs):
        out[key] = {"exact": to_json(val), "text": format_scalar(val), "enclosure": to_json(enclose(val, width))}
    out["flags"] = cs.flags
    return out


def _constant_items(cs: ConstantSet) -> list[tuple[str, Any]]:
    items: list[tuple[str, Any]] = [
        ("C_k", cs.C_k),
        ("lambda", cs.lam),
        ("C_tilde", cs.C_tilde),
        ("R_k", cs.R_k),
        ("alpha0_over_alpha1", cs.ratio),
    ]
    if cs.a_k is not None:
        items += [("a_k", cs.a_k), ("b_k", cs.b_k)]
    return items


def cmd_constants(args: argparse.Namespace) -> int:
    s = _scenario(args)
    width = _width(args)
    cs = constants(s)
    if args.json:
        _emit(json.dumps(constants_json(cs, width), indent=2) + "\n", args)
        return EXIT_OK
    names = {"C_k": f"C_{s.k}", "lambda": "lambda", "C_tilde": f"C~_{s.k}", "R_k": f"R_{s.k}",
             "alpha0_over_alpha1": "alpha0/alpha1", "a_k": f"a_{s.k}", "b_k": f"b_{s.k}"}
    lines = [s.label]
    for key, val in _constant_items(cs):
        lines.append(f"  {names[key]} = {format_scalar(val)}")
        lines.append(f"  {' ' * len(names[key])}   ~ {_decimal(val, width)}")
    for flag in cs.flags:
        lines.append(f"  note: {flag}")
    _emit("\n".join(lines) + "\n", args)
    return EXIT_OK


# --------------------------------------------------------------------------
# solve


def report_text(rep: SolvabilityReport, width: Fraction) -> str:
    lines = [rep.scenario.label, f"  verdict: {rep.status.value}", f"  reason: {rep.reason}",
             f"  alpha0/alpha1 = {format_scalar(rep.ratio)}", f"                ~ {_decimal(rep.ratio, width)}"]
    if rep.printed_ratio is not None:
        lines.append(f"  matches published constraint: {rep.printed_ratio == rep.ratio}")
    lines.append(f"  Q = ({format_scalar(rep.Q.unit)}) * [{rep.Q.poly}],  u = 1 + tau")
    if rep.certificate is not None:
        c = rep.certificate
        lines.append(f"  sign of Q on u in [1,3]: {c.verdict.value} ({c.method})")
        if c.witness is not None:
            lo, hi = c.witness
            lines.append(f"  witness bracket: u in [{lo}, {hi}] ~ [{float(lo):.12f}, {float(hi):.12f}]")
    if rep.boundary is not None:
        for b in rep.boundary.conditions:
            lines.append(f"  {b.name} = {format_scalar(b.value)}  [{'ok' if b.passed else 'FAIL'}]")
    if rep.profile is not None:
        coeffs = rep.profile.tau_coefficients()
        if coeffs is not None:
            lines.append("  phi tau-coefficients: [" + ", ".join(format_scalar(c) for c in coeffs) + "]")
        else:
            p = rep.profile
            lines.append(f"  phi = N/Q with N = {p.numerator}" + (f" + ({format_scalar(p.log_coeff)})*ln(u)" if p.has_log else ""))
    if rep.interior_checked:
        lines.append(f"  phi > 0 at {rep.interior_checked} interior rational samples")
    return "\n".join(lines) + "\n"


def _reconstruction_json(rep: SolvabilityReport, args: argparse.Namespace) -> tuple[dict, str]:
    r = reconstruct(rep.profile, args.eps, args.tol, args.nodes)
    alpha0 = rep.ratio * rep.scenario.alpha1
    info = {
        "eps": str(args.eps), "tol": str(args.tol), "nodes": args.nodes, "backend": r.backend,
        "pde_residual": pde_residual(r, rep.Q),
        "legendre_defect": r.legendre_defect(),
        "gauge_volume_C_prime": gauge_volume(r, rep.Q, rep.scenario.k, alpha0),
    }
    return info, to_csv(r, rep.Q)


def cmd_solve(args: argparse.Namespace) -> int:
    s = _scenario(args)
    width = _width(args)
    rep = solvability(s)
    csv_text = None
    recon = None
    if rep.solvable and args.csv:
        recon, csv_text = _reconstruction_json(rep, args)
        Path(args.csv).write_text(csv_text)
    if args.json:
        doc = rep.to_json()
        if recon is not None:
            doc["reconstruction"] = recon
        _emit(json.dumps(doc, indent=2) + "\n", args)
    else:
        text = report_text(rep, width)
        if recon is not None:
            text += f"  reconstruction residual max|rho/rho(1)-1| = {recon['pde_residual']:.3e} ({args.csv})\n"
        _emit(text, args)
    return EXIT_OK if rep.solvable else EXIT_NO_SOLUTION


# --------------------------------------------------------------------------
# verify


def cmd_verify(args: argparse.Namespace) -> int:
    ids = [] if args.all else args.ids + args.acceptance_id
    unknown = [i for i in ids if i not in CHECK_IDS]
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(unknown)}; known: {', '.join(CHECK_IDS)}")
    if not args.all and not ids:
        raise UsageError("name one or more checks, or pass --all")
    results = run_checks(ids or None)
    if args.json:
        _emit(json.dumps({"passed": all(r.passed for r in results), "checks": [r.to_json() for r in results]}, indent=2) + "\n", args)
    else:
        lines = []
        for r in results:
            lines.append(r.line)
            lines.extend(f"      {d}" for d in r.details)
        n = sum(r.passed for r in results)
        lines.append(f"{n}/{len(results)} checks passed")
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


# --------------------------------------------------------------------------
# sweep


def _sweep_row(s: Scenario) -> dict:
    rep = solvability(s)
    row = {"scenario": s.to_json(), "label": s.label, "verdict": rep.status.value,
           "alpha0_over_alpha1": format_scalar(rep.ratio),
           "alpha0_over_alpha1_approx": float(enclose(rep.ratio, Fraction(1, 10**20)).mid),
           "reason": rep.reason}
    if rep.certificate is not None and rep.certificate.witness is not None:
        row["witness_u"] = [float(x) for x in rep.certificate.witness]
    return row


def sweep_scenarios(args: argparse.Namespace) -> list[Scenario]:
    case = Case(args.case)
    out = []
    for k in range(args.k_min, args.k_max + 1):
        try:
            out.append(Scenario(case, k, args.m1, args.m2, args.alpha1))
        except InvalidScenario:
            continue
    return sorted(out, key=lambda s: s.sort_key)


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.k_min < 1 or args.k_max < args.k_min:
        raise UsageError("need 1 <= --k-min <= --k-max")
    scenarios = sweep_scenarios(args)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_row, scenarios))
    else:
        rows = [_sweep_row(s) for s in scenarios]
    if args.csv:
        import csv

        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["case", "k", "m1", "m2", "verdict", "alpha0_over_alpha1", "approx"])
            for r in rows:
                sc = r["scenario"]
                w.writerow([sc["case"], sc["k"], sc["m1"], sc["m2"], r["verdict"], r["alpha0_over_alpha1"],
                            repr(r["alpha0_over_alpha1_approx"])])
    if args.json:
        _emit(json.dumps(rows, indent=2) + "\n", args)
    else:
        lines = [f"{r['label']:<32} {r['verdict']:<11} alpha0/alpha1 = {r['alpha0_over_alpha1']}  (~{r['alpha0_over_alpha1_approx']:.10g})"
                 for r in rows]
        _emit("\n".join(lines) + "\n", args)
    return EXIT_OK


# --------------------------------------------------------------------------
# plot / export


def plot_svg(rep: SolvabilityReport, args: argparse.Namespace, with_s: bool = True) -> str:
    p = rep.profile
    tau = np.linspace(0.0, 2.0, 201)
    arrays = p.float_arrays()
    from . import _kernels

    phi = _kernels.phi_eval(tau, *arrays)
    coefs, lo = rep.Q.poly.float_coeffs()
    q = _kernels.laurent_eval(coefs, lo, 1.0 + tau)
    q_scaled = q * (float(np.max(phi)) / float(np.max(np.abs(q))))
    series = [Series("phi(tau)", tau, phi), Series("Q(tau), scaled", tau, q_scaled)]
    if with_s:
        r = reconstruct(p, args.eps, args.tol, min(args.nodes, 201))
        series.append(Series("s(tau), right axis", r.tau, r.s, right_axis=True))
    title = f"{rep.scenario.label}: alpha0/alpha1 = {format_scalar(rep.ratio)}"
    return line_chart(series, title, "tau", "phi, scaled Q", "s" if with_s else None)


def cmd_plot(args: argparse.Namespace) -> int:
    s = _scenario(args)
    rep = solvability(s, samples=0)
    if not rep.solvable:
        sys.stderr.write(report_text(rep, _width(args)))
        return EXIT_NO_SOLUTION
    svg = plot_svg(rep, args, with_s=not args.no_s)
    _emit(svg, args)
    return EXIT_OK


def export_document(s: Scenario, width: Fraction) -> dict:
    rep = solvability(s)
    return {"scenario": s.to_json(), "constants": constants_json(constants(s), width), "solvability": rep.to_json()}


def cmd_export(args: argparse.Namespace) -> int:
    s = _scenario(args)
    doc = export_document(s, _width(args))
    _emit(json.dumps(doc, indent=2) + "\n", args)
    return EXIT_OK


COMMANDS = {
    "constants": cmd_constants,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
    "export": cmd_export,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.nodes < 3:
            raise UsageError("--nodes must be at least 3")
        if not 0 < args.eps < 1:
            raise UsageError("--eps must lie in (0, 1)")
        return COMMANDS[args.command](args)
    except (InvalidScenario, UsageError) as exc:
        sys.stderr.write(f"calabi-ansatz: error: {exc}\n")
        return EXIT_ERROR
    except Exception as exc:  # noqa: BLE001 - the exit-code contract covers internal errors
        sys.stderr.write(f"calabi-ansatz: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
