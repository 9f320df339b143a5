"""Command-line interface: JSON reports on stdout, a one-line summary on stderr.

Exit codes: 0 success, 1 input error, 2 analytic/oracle mismatch on a strict verdict.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import re
import sys
import warnings
from fractions import Fraction
from typing import Any, Callable

from .angles import DEFAULT_PRECISION, AngleExpr, decimal_string
from .exppoly import (
    ExpPolynomial,
    ExpressionSyntaxError,
    format_exppoly,
    katz_slope,
    parse_exppoly,
    positive_proportionality,
    ramify,
    twist_add,
)
from .growth import (
    HypothesisError,
    Verdict,
    distinguishing_witness,
    sector_verdict,
    stokes_directions,
    support_arcs,
    twisted_witness,
)
from .models import GoodModel, SchemaError, tempered_iso_good_models, tempered_iso_twisted
from .oracle import EmptyRegionError, OracleConfig, oracle_verdict
from .puiseux import TracerWarning, level_curve_branches, polylines_to_csv, polylines_to_svg
from .regions import ParabolicU1, ParabolicU2, RegionSpec, Sector, Sublevel

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MISMATCH = 2

# float angles are snapped to k/d * pi with d up to this bound
SNAP_DENOMINATOR = 360
SNAP_TOLERANCE = 1e-3


class InputError(ValueError):
    pass


@dataclasses.dataclass
class Outcome:
    inputs: dict
    result: Any
    diagnostics: list[str]
    summary: str
    code: int = EXIT_OK


# --------------------------------------------------------------------------
# argument parsing helpers

def _parse_phi(text: str) -> ExpPolynomial:
    return parse_exppoly(text)


def _parse_rational(text: str, what: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{what}: cannot read {text!r} as a rational number") from exc


_PI_FORM = re.compile(r"^\s*([+-]?[0-9./]*)\s*\*?\s*pi\s*(?:/\s*([0-9]+))?\s*$")


def parse_pi_multiple(text: str, diagnostics: list[str] | None = None) -> Fraction:
    """Read an angle as a rational multiple of pi.

    Accepts ``pi``, ``3pi/4``, ``3*pi/4``, ``0.25pi`` or a float in radians; the
    float is snapped to the simplest ``k/d * pi`` within ``SNAP_TOLERANCE``.
    """
    t = text.strip().replace("π", "pi")
    m = _PI_FORM.match(t)
    if m:
        coef = m.group(1)
        if coef in ("", "+"):
            c = Fraction(1)
        elif coef == "-":
            c = Fraction(-1)
        else:
            c = _parse_rational(coef, "angle")
        if m.group(2):
            c /= int(m.group(2))
        return c
    try:
        x = float(t)
    except ValueError as exc:
        raise InputError(f"cannot read angle {text!r}") from exc
    if not math.isfinite(x):
        raise InputError(f"angle {text!r} is not finite")
    for d in range(1, SNAP_DENOMINATOR + 1):
        k = round(x * d / math.pi)
        if abs(k * math.pi / d - x) < SNAP_TOLERANCE:
            q = Fraction(k, d)
            if diagnostics is not None and k * math.pi / d != x:
                diagnostics.append(f"angle {text} snapped to {q}·π")
            return q
    raise InputError(f"angle {text!r} is not within {SNAP_TOLERANCE} of k/d·π with d <= {SNAP_DENOMINATOR}")


def parse_region(spec: str, phi: ExpPolynomial, diagnostics: list[str]) -> RegionSpec:
    """``builtin:U1``, ``builtin:U2``, ``sector:center,eps,radius`` or ``sublevel:A,radius``."""
    kind, _, args = spec.partition(":")
    kind = kind.strip().lower()
    parts = [p.strip() for p in args.split(",")] if args.strip() else []
    try:
        if kind == "builtin":
            name = args.strip().upper()
            if name == "U1":
                return ParabolicU1()
            if name == "U2":
                return ParabolicU2()
            raise InputError(f"unknown builtin region {args!r} (choose U1 or U2)")
        if kind == "sector":
            if len(parts) not in (2, 3):
                raise InputError("sector needs center,half_amplitude[,radius]")
            center = parse_pi_multiple(parts[0], diagnostics)
            eps = parse_pi_multiple(parts[1], diagnostics)
            radius = _parse_rational(parts[2], "radius") if len(parts) == 3 else Fraction(1)
            return Sector(AngleExpr.from_pi(center, phi.ram_index), eps, radius)
        if kind == "sublevel":
            if len(parts) not in (1, 2):
                raise InputError("sublevel needs A[,radius]")
            A = _parse_rational(parts[0], "A")
            radius = _parse_rational(parts[1], "radius") if len(parts) == 2 else Fraction(1)
            return Sublevel(phi, A, radius)
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"region {spec!r}: {exc}") from exc
    raise InputError(f"unknown region kind {kind!r} (builtin, sector, sublevel)")


# --------------------------------------------------------------------------
# commands

def cmd_analyze(args) -> Outcome:
    phi = _parse_phi(args.expr)
    inputs = {"expr": args.expr.strip(), "parsed": format_exppoly(phi)}
    diags: list[str] = []
    if phi.is_zero():
        result = {"katz": "0", "arcs": None, "stokes": [], "leading_coefficient": None,
                  "note": "phi = 0: exp(phi) = 1 is tempered in every direction, no arcs"}
        return Outcome(inputs, result, diags, "katz 0 (phi = 0)")
    bits = args.precision
    arcs = support_arcs(phi)
    stokes = stokes_directions(phi)
    result = {
        "katz": str(katz_slope(phi)),
        "pole_order": phi.pole_order,
        "ramification": phi.ram_index,
        "leading_coefficient": str(phi.leading_coefficient),
        "arcs": arcs.to_json(bits),
        "arc_count": len(arcs),
        "stokes": [a.to_json(bits) for a in stokes],
        "stokes_count": len(stokes),
    }
    if phi.ram_index != 1:
        result["ramified"] = {"l": phi.ram_index}
        diags.append(f"ramified input: angles are read on [0, 2π·{phi.ram_index})")
    summary = f"katz {result['katz']}, {len(arcs)} arcs, {len(stokes)} Stokes directions"
    return Outcome(inputs, result, diags, summary)


def cmd_compare(args) -> Outcome:
    phi1, phi2 = _parse_phi(args.expr1), _parse_phi(args.expr2)
    inputs: dict = {"expr1": format_exppoly(phi1), "expr2": format_exppoly(phi2)}
    diags: list[str] = []
    l = args.ram
    if l is not None:
        if l < 1:
            raise InputError("--ram must be a positive integer")
        inputs["ram"] = l
    if args.omega is not None:
        omega = _parse_phi(args.omega)
        inputs["omega"] = format_exppoly(omega)
        k = l or 1
        left = twist_add(ramify(phi1, k), omega)
        right = twist_add(ramify(phi2, k), omega)
        lam = positive_proportionality(right, left)
        witness = None if lam is not None else twisted_witness(phi1, phi2, omega, k)
    else:
        left, right = (ramify(phi1, l), ramify(phi2, l)) if l else (phi1, phi2)
        lam = positive_proportionality(right, left)
        witness = None if lam is not None else distinguishing_witness(left, right)
    result: dict = {"proportional": lam is not None, "compared": [format_exppoly(left), format_exppoly(right)]}
    if lam is not None:
        result["lambda"] = str(lam)
        result["relation"] = "expr2 = lambda * expr1"
        summary = f"positively proportional, lambda = {lam}"
    elif witness is not None:
        result["witness"] = witness.to_json(args.precision)
        summary = (f"witness at {witness.direction} "
                   f"(exp of input {witness.tempered_side} tempered there)")
    else:
        diags.append("no witness found")
        summary = "not proportional; no witness found"
    return Outcome(inputs, result, diags, summary)


def cmd_classify(args) -> Outcome:
    try:
        m1, m2 = GoodModel.load(args.model1), GoodModel.load(args.model2)
    except OSError as exc:
        raise InputError(str(exc)) from exc
    inputs: dict = {"model1": m1.to_json(), "model2": m2.to_json()}
    if args.twisted:
        omega = _parse_phi(args.twisted[0])
        try:
            k = int(args.twisted[1])
        except ValueError as exc:
            raise InputError("--twisted needs OMEGA and an integer katz bound K") from exc
        inputs["twisted"] = {"omega": format_exppoly(omega), "k": k}
        decision = tempered_iso_twisted(m1, m2, omega, k)
    else:
        decision = tempered_iso_good_models(m1, m2)
    result = decision.to_json()
    summary = "isomorphic" if decision.isomorphic else f"not isomorphic ({decision.failing_condition})"
    return Outcome(inputs, result, [], summary)


def cmd_region(args) -> Outcome:
    phi = _parse_phi(args.expr)
    A = _parse_rational(args.A, "A")
    inputs: dict = {"expr": format_exppoly(phi), "A": str(A), "samples": args.samples}
    if phi.is_zero():
        raise InputError("the level set of phi = 0 is empty or everything; pick a nonzero phi")
    if phi.ram_index != 1:
        raise InputError("region tracing needs an unramified phi")
    diags: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TracerWarning)
        polylines = level_curve_branches(phi, A, samples=args.samples)
    diags.extend(str(w.message) for w in caught if issubclass(w.category, TracerWarning))
    n = phi.pole_order
    an = phi.leading_coefficient
    branches = []
    for pl in polylines:
        tangent = AngleExpr(an, Fraction(1, 2) + pl.branch_index, Fraction(n))
        entry = {"branch": pl.branch_index, "points": len(pl.points),
                 "tangent_rad": decimal_string(tangent.value(), DEFAULT_PRECISION),
                 "tangent_expr": str(tangent)}
        if pl.points:
            entry["innermost"] = list(pl.points[-1])
            entry["outermost"] = list(pl.points[0])
        branches.append(entry)
    result: dict = {"branch_count": len(polylines), "branches": branches}
    if n == 1 and len(phi.coeffs) == 1:
        # Re(c/z) = A is the circle through 0 of diameter |c|/A toward arg c
        c = complex(an)
        diameter = abs(c) / float(A)
        centre = c / abs(c) * diameter / 2
        dev = max((abs(abs(complex(x, y) - centre) - diameter / 2)
                   for pl in polylines for x, y in pl.points), default=0.0)
        result["circle"] = {"center": [centre.real, centre.imag], "diameter": diameter,
                            "max_deviation": dev}
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(polylines_to_csv(polylines))
        result["csv"] = args.csv
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(polylines_to_svg(polylines))
        result["svg"] = args.svg
    return Outcome(inputs, result, diags, f"{len(polylines)} branches of Re phi = {A}")


def cmd_verify(args) -> Outcome:
    phi = _parse_phi(args.expr)
    diags: list[str] = []
    region = parse_region(args.region, phi, diags)
    cfg = OracleConfig.from_file(args.config) if args.config else OracleConfig()
    overrides = {k: v for k, v in (("threads", args.threads), ("seed", args.seed)) if v is not None}
    cfg = dataclasses.replace(cfg, **overrides)
    budget = args.budget if args.budget is not None else cfg.samples
    inputs = {"expr": format_exppoly(phi), "region": region.to_json(), "budget": budget,
              "seed": cfg.seed, "threads": cfg.threads}
    analytic = None
    if isinstance(region, Sector):
        if phi.is_zero():
            analytic = Verdict.Tempered
        else:
            analytic = sector_verdict(phi, region)
        if analytic is Verdict.Boundary:
            diags.append("analytic verdict is Boundary: a sector edge lies on a Stokes direction")
    try:
        report = oracle_verdict(phi, region, budget=budget, seed=cfg.seed, config=cfg)
    except EmptyRegionError as exc:
        raise InputError(str(exc)) from exc
    diags.extend(report.diagnostics)
    result: dict = {"oracle": report.to_json(),
                    "analytic": analytic.value if analytic is not None else None}
    code = EXIT_OK
    strict = (Verdict.Tempered, Verdict.NotTempered)
    if analytic in strict and report.verdict in strict:
        result["agree"] = analytic is report.verdict
        if analytic is not report.verdict:
            code = EXIT_MISMATCH
            diags.append("analytic and oracle verdicts disagree")
    summary = f"oracle {report.verdict.value}"
    if analytic is not None:
        summary += f", analytic {analytic.value}"
    if report.fit.fitted_M is not None:
        summary += f", M ~ {report.fit.fitted_M:.3g}"
    return Outcome(inputs, result, diags, summary, code)


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tempgrowth", description=__doc__.splitlines()[0])
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                   help="bits used for decimal angle output (default 128)")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="Katz slope, support arcs and Stokes directions")
    a.add_argument("expr")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("compare", help="proportionality test or distinguishing witness")
    c.add_argument("expr1")
    c.add_argument("expr2")
    c.add_argument("--omega", help="twist both sides by exp(omega)")
    c.add_argument("--ram", type=int, help="ramification index applied to both inputs")
    c.set_defaults(func=cmd_compare)

    k = sub.add_parser("classify", help="decide tempered isomorphism of two good models (JSON files)")
    k.add_argument("model1")
    k.add_argument("model2")
    k.add_argument("--twisted", nargs=2, metavar=("OMEGA", "K"),
                   help="decide the omega-twisted problem for models of katz invariant < K")
    k.set_defaults(func=cmd_classify)

    r = sub.add_parser("region", help="trace the level curve Re phi = A near the origin")
    r.add_argument("expr")
    r.add_argument("A")
    r.add_argument("--svg")
    r.add_argument("--csv")
    r.add_argument("--samples", type=int, default=64)
    r.set_defaults(func=cmd_region)

    v = sub.add_parser("verify", help="cross-check temperedness with the sampling oracle")
    v.add_argument("expr")
    v.add_argument("--region", required=True,
                   help="builtin:U1 | builtin:U2 | sector:CENTER,EPS[,R] | sublevel:A[,R]")
    v.add_argument("--budget", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--threads", type=int)
    v.add_argument("--config", help="TOML file with oracle thresholds")
    v.set_defaults(func=cmd_verify)
    return p


def _error_payload(exc: Exception) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc).splitlines()[0]}
    if isinstance(exc, ExpressionSyntaxError):
        out["position"] = exc.position
        out["text"] = exc.text
    return out


def _emit(command: str, outcome: Outcome, stream=None) -> None:
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": outcome.inputs,
        "result": outcome.result,
        "diagnostics": outcome.diagnostics,
    }
    json.dump(report, stream or sys.stdout, indent=2, ensure_ascii=False)
    (stream or sys.stdout).write("\n")


_NEGATIVE_EXPR = re.compile(r"^-[0-9.(iz]")


def _shield_negative(argv: list[str]) -> list[str]:
    """Keep argparse from reading expressions such as ``-1/z`` as options."""
    return [" " + a if _NEGATIVE_EXPR.match(a) else a for a in argv]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    raw = list(argv) if argv is not None else sys.argv[1:]
    args = parser.parse_args(_shield_negative(raw))
    func: Callable[[Any], Outcome] = args.func
    try:
        outcome = func(args)
    except (InputError, ExpressionSyntaxError, SchemaError, HypothesisError, ValueError, OSError) as exc:
        err = _error_payload(exc)
        outcome = Outcome({"argv": raw},
                          None, [err["message"]], str(exc), EXIT_INPUT)
        outcome.result = {"error": err}
        _emit(args.command, outcome)
        print(f"tempgrowth {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(args.command, outcome)
    print(f"tempgrowth {args.command}: {outcome.summary}", file=sys.stderr)
    return outcome.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
