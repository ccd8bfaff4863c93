"""Command-line front end: verify, audit, enumerate, map, coeff.

Exit codes: 0 = verified / ok, 1 = a mathematical mismatch was found,
2 = usage or configuration error.  JSON reports are deterministic except
for the ``volatile`` section (durations, version), so runs can be diffed.

JSON schema for ``verify``:

    {case, mode, caps, assignment?, status,
     mismatches: [{monomial: {a, b, t, q}, lhs: "p/q", rhs: "p/q"}],
     details: {...}, volatile: {duration_ms, version}}

Monomials on the command line are concatenated variable-exponent tokens,
e.g. ``a1b1t1q2``; omitted variables have exponent 0.  Rational parameters
are exact ``p/q`` strings; no floats anywhere.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Dict, List, Optional

from . import __version__
from .bijections import (
    AuditReport,
    BijectionBox,
    MapAudit,
    PropertyCount,
    audit_bijection,
    gamma,
    gamma_inverse,
    sigma_gamma,
    two_modular_conjugate,
)
from .identities import (
    CASES,
    Mismatch,
    VerificationReport,
    build_eq31_side,
    build_f_series,
    build_thm11_side,
    build_thm31_side,
    run_case,
)
from .partitions import ConstraintSet, Partition, enumerate_partitions
from .rational import RationalAssignment
from .series import (
    Monomial,
    SeriesError,
    TruncationProfile,
    coefficient,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2

_MONOMIAL_TOKEN = re.compile(r"([abtq])(\d+)")


def parse_monomial(text: str) -> Monomial:
    """Parse concatenated tokens like a1b1t1q2 (missing variables mean 0)."""
    text = text.strip()
    if text and not re.fullmatch(r"(?:[abtq]\d+)+", text):
        raise SeriesError(f"cannot parse monomial {text!r}; expected tokens like a1b2q3")
    exps = {"a": 0, "b": 0, "t": 0, "q": 0}
    for var, num in _MONOMIAL_TOKEN.findall(text):
        exps[var] += int(num)
    return Monomial(exps["a"], exps["b"], exps["t"], exps["q"])


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SeriesError(f"cannot parse rational {text!r}: {exc}") from None


# ------------------------------------------------------------- serialization


def _monomial_dict(m: Monomial) -> Dict[str, int]:
    return {"a": m.e_a, "b": m.e_b, "t": m.e_t, "q": m.e_q}


def _mismatch_dict(row: Mismatch) -> Dict[str, object]:
    return {
        "monomial": _monomial_dict(row.monomial),
        "lhs": str(row.lhs),
        "rhs": str(row.rhs),
    }


def verification_report_to_dict(r: VerificationReport) -> Dict[str, object]:
    out: Dict[str, object] = {
        "case": r.case,
        "mode": r.mode,
        "caps": r.caps,
    }
    if r.assignment is not None:
        out["assignment"] = r.assignment
    out["status"] = r.status
    out["mismatches"] = [_mismatch_dict(m) for m in r.mismatches]
    out["details"] = r.details
    out["volatile"] = {"duration_ms": round(r.duration_ms, 3), "version": __version__}
    return out


def verification_report_from_dict(d: Dict[str, object]) -> VerificationReport:
    mismatches = [
        Mismatch(
            Monomial(
                row["monomial"]["a"],
                row["monomial"]["b"],
                row["monomial"]["t"],
                row["monomial"]["q"],
            ),
            Fraction(row["lhs"]),
            Fraction(row["rhs"]),
        )
        for row in d.get("mismatches", [])
    ]
    return VerificationReport(
        case=d["case"],
        mode=d["mode"],
        caps=dict(d["caps"]),
        assignment=dict(d["assignment"]) if "assignment" in d else None,
        status=d["status"],
        mismatches=mismatches,
        details=dict(d.get("details", {})),
        duration_ms=float(d.get("volatile", {}).get("duration_ms", 0.0)),
    )


def _property_dict(pc: PropertyCount) -> Dict[str, object]:
    return {
        "passed": pc.passed,
        "failed": pc.failed,
        "failures": [list(row) for row in pc.failures],
    }


def _genpoly_rows(rows) -> List[Dict[str, object]]:
    return [
        {"monomial": {"a": k[0], "q": k[1]}, "domain": x, "codomain": y}
        for k, x, y in rows
    ]


def _map_audit_dict(audit: MapAudit) -> Dict[str, object]:
    return {
        "variant": audit.variant,
        "domain_size": audit.domain_size,
        "codomain_size": audit.codomain_size,
        "weight_preserved": _property_dict(audit.weight_preserved),
        "odd_count_preserved": _property_dict(audit.odd_count_preserved),
        "codomain_membership": _property_dict(audit.codomain_membership),
        "statistic_exchange": _property_dict(audit.statistic_exchange),
        "gamma_roundtrip": _property_dict(audit.gamma_roundtrip),
        "sigma_involution": _property_dict(audit.sigma_involution),
        "middle_bounds": _property_dict(audit.middle_bounds),
        "injective": audit.injective,
        "collisions": [
            {"image": image, "preimages": pre} for image, pre in audit.collisions
        ],
        "surjective": audit.surjective,
        "unhit": audit.unhit,
        "genpoly_equal": audit.genpoly_equal,
        "genpoly_mismatches": _genpoly_rows(audit.genpoly_mismatches),
        "middle_multiset_distinct": audit.middle_multiset_distinct,
        "middle_equals_domain": audit.middle_equals_domain,
        "middle_equals_codomain": audit.middle_equals_codomain,
    }


def audit_report_to_dict(r: AuditReport) -> Dict[str, object]:
    return {
        "box": {"j": r.j, "M": r.M, "variant": r.variant},
        "passed": r.passed,
        "exact": _map_audit_dict(r.exact),
        "printed": _map_audit_dict(r.printed),
        "printed_genpoly_strict_empty": {
            "equal": r.printed_genpoly_strict_equal,
            "mismatches": _genpoly_rows(r.printed_genpoly_strict_mismatches),
        },
        "le_adds_domain": [
            {"monomial": {"a": k[0], "q": k[1]}, "count": n} for k, n in r.le_adds_domain
        ],
        "le_adds_codomain": [
            {"monomial": {"a": k[0], "q": k[1]}, "count": n}
            for k, n in r.le_adds_codomain
        ],
        "enum_limit": r.enum_limit,
        "volatile": {"duration_ms": round(r.duration_ms, 3), "version": __version__},
    }


def _property_from_dict(d: Dict[str, object]) -> PropertyCount:
    return PropertyCount(
        passed=int(d["passed"]),
        failed=int(d["failed"]),
        failures=[tuple(row) for row in d.get("failures", [])],
    )


def _genpoly_rows_from_dicts(rows) -> List[tuple]:
    return [
        ((row["monomial"]["a"], row["monomial"]["q"]), row["domain"], row["codomain"])
        for row in rows
    ]


def _map_audit_from_dict(d: Dict[str, object]) -> MapAudit:
    return MapAudit(
        variant=d["variant"],
        domain_size=d["domain_size"],
        codomain_size=d["codomain_size"],
        weight_preserved=_property_from_dict(d["weight_preserved"]),
        odd_count_preserved=_property_from_dict(d["odd_count_preserved"]),
        codomain_membership=_property_from_dict(d["codomain_membership"]),
        statistic_exchange=_property_from_dict(d["statistic_exchange"]),
        gamma_roundtrip=_property_from_dict(d["gamma_roundtrip"]),
        sigma_involution=_property_from_dict(d["sigma_involution"]),
        middle_bounds=_property_from_dict(d["middle_bounds"]),
        injective=d["injective"],
        collisions=[(row["image"], list(row["preimages"])) for row in d["collisions"]],
        surjective=d["surjective"],
        unhit=list(d["unhit"]),
        genpoly_equal=d["genpoly_equal"],
        genpoly_mismatches=_genpoly_rows_from_dicts(d["genpoly_mismatches"]),
        middle_multiset_distinct=d["middle_multiset_distinct"],
        middle_equals_domain=d["middle_equals_domain"],
        middle_equals_codomain=d["middle_equals_codomain"],
    )


def audit_report_from_dict(d: Dict[str, object]) -> AuditReport:
    return AuditReport(
        j=d["box"]["j"],
        M=d["box"]["M"],
        variant=d["box"]["variant"],
        exact=_map_audit_from_dict(d["exact"]),
        printed=_map_audit_from_dict(d["printed"]),
        printed_genpoly_strict_equal=d["printed_genpoly_strict_empty"]["equal"],
        printed_genpoly_strict_mismatches=_genpoly_rows_from_dicts(
            d["printed_genpoly_strict_empty"]["mismatches"]
        ),
        le_adds_domain=[
            ((row["monomial"]["a"], row["monomial"]["q"]), row["count"])
            for row in d["le_adds_domain"]
        ],
        le_adds_codomain=[
            ((row["monomial"]["a"], row["monomial"]["q"]), row["count"])
            for row in d["le_adds_codomain"]
        ],
        enum_limit=d["enum_limit"],
        duration_ms=float(d.get("volatile", {}).get("duration_ms", 0.0)),
    )


def strip_volatile(d: Dict[str, object]) -> Dict[str, object]:
    """Copy of a report dict without the volatile section (for diffing)."""
    return {k: v for k, v in d.items() if k != "volatile"}


def _emit(payload: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)


# ------------------------------------------------------------------ commands


def _profile_from_args(args) -> TruncationProfile:
    amax = max(args.bmax, args.tmax) if args.amax is None else args.amax
    return TruncationProfile(amax, args.bmax, args.tmax, args.qmax)


def _assignment_from_args(args) -> RationalAssignment:
    return RationalAssignment.make(
        a=args.a,
        b=args.b,
        t=args.t,
        c=args.c,
        alpha=args.alpha,
        beta=args.beta,
        x_exp=args.k1,
        y_exp=args.k2,
        N=args.N,
    )


def _format_verification_text(report: VerificationReport, limit: int = 25) -> str:
    lines = [
        f"case: {report.case} (mode {report.mode})",
        f"caps: {report.caps}",
    ]
    if report.assignment:
        lines.append(f"assignment: {report.assignment}")
    lines.append(f"status: {report.status}")
    for key, value in sorted(report.details.items()):
        lines.append(f"  {key}: {value}")
    if report.mismatches:
        lines.append(f"mismatches ({len(report.mismatches)} shown up to {limit}):")
        for row in report.mismatches[:limit]:
            lines.append(f"  {row.monomial}: lhs={row.lhs} rhs={row.rhs}")
    return "\n".join(lines)


def cmd_verify(args) -> int:
    if args.identity not in CASES:
        print(f"unknown identity {args.identity!r}; known: {', '.join(sorted(CASES))}",
              file=sys.stderr)
        return EXIT_USAGE
    mode = args.mode or ("rational" if "formal" not in CASES[args.identity].modes else "formal")
    try:
        report = run_case(
            args.identity,
            mode=mode,
            profile=_profile_from_args(args),
            assign=_assignment_from_args(args),
            cap_q=args.qmax,
            workers=args.workers,
        )
    except SeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        _emit(json.dumps(verification_report_to_dict(report), indent=2), args.output)
    else:
        _emit(_format_verification_text(report), args.output)
    if report.status == "verified":
        return EXIT_OK
    if report.status == "mismatch":
        return EXIT_MISMATCH
    return EXIT_USAGE


def _format_audit_text(report: AuditReport) -> str:
    e = report.exact
    lines = [
        f"box: j={report.j} M={report.M} (variant requested: {report.variant})",
        f"exact-length audit: |D|={e.domain_size} |C|={e.codomain_size}",
        f"  weight preserved:    {e.weight_preserved.passed}/{e.domain_size}",
        f"  odd count preserved: {e.odd_count_preserved.passed}/{e.domain_size}",
        f"  codomain membership: {e.codomain_membership.passed}/{e.domain_size}",
        f"  statistic exchange:  {e.statistic_exchange.passed}/{e.domain_size}",
        f"  inverse roundtrip:   {e.gamma_roundtrip.passed}/{e.domain_size}",
        f"  conjugate involution:{e.sigma_involution.passed}/{e.domain_size}",
        f"  injective: {e.injective}  surjective: {e.surjective}",
        f"  generating polynomials equal: {e.genpoly_equal}",
        f"printed (<=) variant: |D|={report.printed.domain_size} "
        f"|C|={report.printed.codomain_size}",
        f"  generating polynomials equal (vacuous empty): {report.printed.genpoly_equal}",
        f"  generating polynomials equal (strict empty):  "
        f"{report.printed_genpoly_strict_equal}",
    ]
    if report.printed.genpoly_mismatches:
        rows = ", ".join(
            f"a^{k[0]}q^{k[1]}: {x} vs {y}"
            for k, x, y in report.printed.genpoly_mismatches
        )
        lines.append(f"  printed-variant mismatches: {rows}")
    if report.le_adds_codomain:
        rows = ", ".join(f"a^{k[0]}q^{k[1]}" for k, _ in report.le_adds_codomain)
        lines.append(f"  <= reading adds to codomain side: {rows}")
    if report.le_adds_domain:
        rows = ", ".join(f"a^{k[0]}q^{k[1]}" for k, _ in report.le_adds_domain)
        lines.append(f"  <= reading adds to domain side: {rows}")
    lines.append(f"result: {'pass' if report.passed else 'FAIL'}")
    return "\n".join(lines)


def cmd_audit(args) -> int:
    try:
        box = BijectionBox(args.j, args.M, args.variant)
        report = audit_bijection(box, enum_limit=args.limit, workers=args.workers)
    except SeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        _emit(json.dumps(audit_report_to_dict(report), indent=2), args.output)
    else:
        _emit(_format_audit_text(report), args.output)
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_enumerate(args) -> int:
    try:
        constraints = ConstraintSet(
            weight=args.weight,
            weight_min=args.min_weight,
            weight_max=args.max_weight,
            min_part=args.min_part,
            max_part=args.max_part,
            length=args.length,
            max_length=args.max_length,
            odd_parts_distinct=args.odd_distinct,
        )
        found = enumerate_partitions(constraints)
    except SeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        payload = {
            "count": len(found),
            "partitions": [list(p.parts) for p in found],
        }
        _emit(json.dumps(payload, indent=2), args.output)
    else:
        _emit("\n".join(p.text() for p in found) if found else "", args.output)
    return EXIT_OK


_MAP_OPS = ("gamma", "gamma-inverse", "sigma", "gamma-sigma")


def cmd_map(args) -> int:
    try:
        p = Partition.parse(args.partition)
        if args.op == "gamma":
            if args.M is None:
                raise SeriesError("--M is required for gamma")
            image = gamma(p, args.M)
        elif args.op == "gamma-inverse":
            if args.M is None or args.j is None:
                raise SeriesError("--M and --j are required for gamma-inverse")
            image = gamma_inverse(p, args.j, args.M)
        elif args.op == "sigma":
            image = two_modular_conjugate(p)
        elif args.op == "gamma-sigma":
            if args.M is None:
                raise SeriesError("--M is required for gamma-sigma")
            image = sigma_gamma(p, args.M)
        else:
            raise SeriesError(f"unknown map {args.op!r}")
    except SeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    preserved = []
    if image.weight == p.weight:
        preserved.append("weight")
    if image.odd_count == p.odd_count:
        preserved.append("odd-count")
    stats = (
        f"weight={image.weight} parts={image.length} odd={image.odd_count} "
        f"largest={image.largest}"
        + (f" (preserved: {', '.join(preserved)})" if preserved else "")
    )
    if args.format == "json":
        payload = {
            "op": args.op,
            "input": list(p.parts),
            "output": list(image.parts),
            "stats": {
                "weight": image.weight,
                "parts": image.length,
                "odd": image.odd_count,
                "largest": image.largest,
            },
            "preserved": {
                "weight": image.weight == p.weight,
                "odd": image.odd_count == p.odd_count,
            },
        }
        _emit(json.dumps(payload, indent=2), args.output)
    else:
        _emit(f"{image.text()}\n{stats}", args.output)
    return EXIT_OK


_SIDES = {
    "thm1_1:left": lambda prof: build_thm11_side("left", prof),
    "thm1_1:right": lambda prof: build_thm11_side("right", prof),
    "eq3_1:left": lambda prof: build_eq31_side("left", prof),
    "eq3_1:right": lambda prof: build_eq31_side("right", prof),
    "thm3_4:left": lambda prof: build_thm31_side("3_4_left", prof),
    "thm3_4:right": lambda prof: build_thm31_side("3_4_right", prof),
    "thm3_5:left": lambda prof: build_thm31_side("3_5_left", prof),
    "thm3_5:right": lambda prof: build_thm31_side("3_5_right", prof),
    "f_sym:left": lambda prof: build_f_series("b", prof),
    "f_sym:right": lambda prof: build_f_series("t", prof),
}


def cmd_coeff(args) -> int:
    if args.side not in _SIDES:
        print(
            f"unknown side {args.side!r}; known: {', '.join(sorted(_SIDES))}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    try:
        mono = parse_monomial(args.monomial)
        series = _SIDES[args.side](_profile_from_args(args))
        value = coefficient(series, mono)
    except SeriesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        payload = {
            "side": args.side,
            "monomial": _monomial_dict(mono),
            "coefficient": str(Fraction(value)),
        }
        _emit(json.dumps(payload, indent=2), args.output)
    else:
        _emit(str(Fraction(value)), args.output)
    return EXIT_OK


# -------------------------------------------------------------------- parser


def _add_common(sub) -> None:
    sub.add_argument("--format", choices=("text", "json"), default="text")
    sub.add_argument("--output", help="write the report to this path instead of stdout")


def _add_caps(sub) -> None:
    sub.add_argument(
        "--amax", type=int, default=None,
        help="degree cap for a (default: max of --bmax/--tmax; every cataloged "
        "series has a-degree bounded by its b- or t-degree)",
    )
    sub.add_argument("--bmax", type=int, default=6, help="degree cap for b")
    sub.add_argument("--tmax", type=int, default=6, help="degree cap for t")
    sub.add_argument("--qmax", type=int, default=16, help="degree cap for q")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsid",
        description="Exact q-series identity verification and partition bijection audits",
    )
    parser.add_argument("--version", action="version", version=f"qsid {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    verify = subs.add_parser("verify", help="verify one identity from the catalog")
    verify.add_argument("--identity", required=True)
    verify.add_argument("--mode", choices=("formal", "rational"))
    _add_caps(verify)
    verify.add_argument("--workers", type=int, default=1)
    for name in ("a", "b", "t", "c", "alpha", "beta"):
        verify.add_argument(f"--{name}", type=parse_fraction, default=None,
                            help=f"rational value for {name} (e.g. 1/3)")
    verify.add_argument("--k1", type=int, default=None, help="first base as q^k1")
    verify.add_argument("--k2", type=int, default=None, help="second base as q^k2")
    verify.add_argument("--N", type=int, default=None, help="terminating index")
    _add_common(verify)
    verify.set_defaults(func=cmd_verify)

    audit = subs.add_parser("audit", help="audit the bijection over a finite box")
    audit.add_argument("--j", type=int, required=True)
    audit.add_argument("--M", type=int, required=True)
    audit.add_argument("--variant", choices=("exact", "printed"), default="exact")
    audit.add_argument("--limit", type=int, default=None,
                       help="enumeration guard (default from QSID_ENUM_LIMIT)")
    audit.add_argument("--workers", type=int, default=1)
    _add_common(audit)
    audit.set_defaults(func=cmd_audit)

    enum = subs.add_parser("enumerate", help="list partitions under constraints")
    enum.add_argument("--weight", type=int, default=None)
    enum.add_argument("--min-weight", type=int, default=None)
    enum.add_argument("--max-weight", type=int, default=None)
    enum.add_argument("--min-part", type=int, default=None)
    enum.add_argument("--max-part", type=int, default=None)
    enum.add_argument("--length", type=int, default=None)
    enum.add_argument("--max-length", type=int, default=None)
    enum.add_argument("--odd-distinct", action="store_true")
    _add_common(enum)
    enum.set_defaults(func=cmd_enumerate)

    mp = subs.add_parser("map", help="apply a partition map")
    mp.add_argument("--op", choices=_MAP_OPS, required=True)
    mp.add_argument("--partition", required=True,
                    help="comma-separated parts; '' or '()' for empty")
    mp.add_argument("--M", type=int, default=None)
    mp.add_argument("--j", type=int, default=None)
    _add_common(mp)
    mp.set_defaults(func=cmd_map)

    coeff = subs.add_parser("coeff", help="print one exact coefficient of a side")
    coeff.add_argument("--side", required=True, help="case:side, e.g. thm1_1:left")
    coeff.add_argument("--monomial", required=True, help="e.g. a1b1t1q2")
    _add_caps(coeff)
    _add_common(coeff)
    coeff.set_defaults(func=cmd_coeff)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
