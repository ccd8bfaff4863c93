"""Builders and checkers for the identity catalog.

Each catalog entry names a q-series identity; its two (or three) sides are
built independently, so a mismatch localizes a defect to one side.  Formal
mode builds both sides as truncated series in a, b, t, q; rational mode
fixes the parameters at exact rationals and compares series in q alone.

The flagship identity is the symmetric double series

    sum_{n>=0} (-a*b*q^(n+1); q)_n * t^n / (b*q^n; q)_{n+1}
        = the same expression with b and t exchanged,

where (x; q)_n is the q-shifted factorial with n factors.  The catalog
also covers its a = 0 reduction (the classical two-variable symmetric
function), the q -> q^2, a -> a/q variant whose coefficients count
partitions, the terminating q-Pfaff-Saalschuetz summation with the
rewriting chain that proves the flagship identity, and two companion
series evaluations, one of which is checked in adjudication mode (the
checker reports what it finds rather than asserting the printed form).

Checkers return a ``VerificationReport``; they raise for configuration
problems (bad caps, missing or degenerate parameters) and never raise for
a plain mathematical mismatch.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .parallel import parallel_map
from .rational import (
    DegenerateParameterError,
    Factor,
    RationalAssignment,
    cached_poch_series,
    geometric_inverse_factor,
    pochhammer_factors,
    product_series,
    sum_with_geometric_tail,
)
from .series import (
    Monomial,
    ProfileMismatchError,
    SeriesError,
    TruncatedSeries,
    TruncationProfile,
    compare_series,
    invert_one_minus,
    pochhammer_finite,
    q_only_profile,
    shift_a_by_q,
    substitute_q_power,
    sum_series,
    swap_b_t,
)

__all__ = [
    "CASES",
    "IdentityCase",
    "Mismatch",
    "VerificationReport",
    "build_eq31_side",
    "build_f_series",
    "build_thm11_side",
    "build_thm31_side",
    "eq31_substitution_path",
    "rational_series_eval",
    "run_case",
    "verify_chain",
    "verify_eq22",
    "verify_eq23",
    "verify_eq31",
    "verify_f_sym_formal",
    "verify_f_sym_rational",
    "verify_qps",
    "verify_reduction_a0",
    "verify_thm11",
    "verify_thm31",
]


# --------------------------------------------------------------------- reports


@dataclass(frozen=True)
class Mismatch:
    """One disagreeing monomial with the two coefficient values."""

    monomial: Monomial
    lhs: Fraction
    rhs: Fraction


@dataclass
class VerificationReport:
    """Outcome of one identity check.

    ``status`` is "verified" when the mismatch table is empty on the joint
    validity region, "mismatch" otherwise, and "error" when the check could
    not be carried out.  ``details`` holds deterministic diagnostics only
    (summation bounds, which printed variant matched, joint validity);
    wall-clock time lives in the volatile section of serialized output.
    """

    case: str
    mode: str
    caps: Dict[str, int]
    assignment: Optional[Dict[str, str]]
    status: str
    mismatches: List[Mismatch] = field(default_factory=list)
    details: Dict[str, object] = field(default_factory=dict)
    duration_ms: float = 0.0

    @property
    def verified(self) -> bool:
        return self.status == "verified"


def _rows_to_mismatches(rows) -> List[Mismatch]:
    return [Mismatch(m, Fraction(x), Fraction(y)) for m, x, y in rows]


def _finish(report: VerificationReport, started: float) -> VerificationReport:
    report.duration_ms = (time.perf_counter() - started) * 1000.0
    return report


def _caps_dict(profile: TruncationProfile) -> Dict[str, int]:
    return {
        "a": profile.cap_a,
        "b": profile.cap_b,
        "t": profile.cap_t,
        "q": profile.cap_q,
    }


# ---------------------------------------------------------------- formal sides


def _sum_side(
    profile: TruncationProfile,
    outer: str,
    inner: str,
    q_mult: int,
    with_numerator: bool,
    workers: int = 1,
) -> TruncatedSeries:
    """Common shape of the symmetric sides.

    Term n is  [numerator] * outer^n / prod_{k=0..n} (1 - inner * q^(q_mult*(n+k)))
    with numerator prod_{k=0..n-1} (1 + a * inner * q^(q_mult*(n+k) + 1)).
    The n-th term's lowest outer-degree is n, so summing n up to the outer
    cap is exact.
    """
    n_max = profile.cap_of(outer)
    numer_base = Monomial(
        e_a=1, e_b=1 if inner == "b" else 0, e_t=1 if inner == "t" else 0
    )

    def one_term(n: int) -> TruncatedSeries:
        term = TruncatedSeries.term(profile, 1, **{f"e_{outer}": n})
        if term.is_zero():
            return term
        if with_numerator:
            term = term * pochhammer_finite(
                -1, numer_base, q_mult * n + 1, q_mult, n, profile
            )
        for k in range(n + 1):
            denom_factor = TruncatedSeries.term(
                profile, 1, **{f"e_{inner}": 1, "e_q": q_mult * (n + k)}
            )
            term = term * invert_one_minus(denom_factor)
        return term

    return sum_series(parallel_map(one_term, range(n_max + 1), workers), profile)


def build_thm11_side(side: str, profile: TruncationProfile, workers: int = 1) -> TruncatedSeries:
    """One side of the flagship symmetric identity.

    left  = sum_n (-a*b*q^(n+1); q)_n t^n / (b*q^n; q)_{n+1}
    right = the same with b and t exchanged.
    """
    if side == "left":
        return _sum_side(profile, "t", "b", 1, True, workers)
    if side == "right":
        return _sum_side(profile, "b", "t", 1, True, workers)
    raise SeriesError(f"side must be 'left' or 'right', got {side!r}")


def build_f_series(alpha_var: str, profile: TruncationProfile, workers: int = 1) -> TruncatedSeries:
    """Two-variable symmetric function at the (q, q^2) specialization.

    f(alpha, beta) = sum_n beta^n / (alpha*q^n; q)_{n+1}; ``alpha_var``
    names which of b, t plays alpha.  Equals the flagship left side with
    the a-cap set to zero.
    """
    if alpha_var == "b":
        return _sum_side(profile, "t", "b", 1, False, workers)
    if alpha_var == "t":
        return _sum_side(profile, "b", "t", 1, False, workers)
    raise SeriesError(f"alpha_var must be 'b' or 't', got {alpha_var!r}")


def build_eq31_side(side: str, profile: TruncationProfile, workers: int = 1) -> TruncatedSeries:
    """One side of the even-step variant (q -> q^2, a -> a/q applied to the flagship).

    left = sum_n (-a*b*q^(2n+1); q^2)_n t^n / (b*q^2n; q^2)_{n+1}.
    """
    if side == "left":
        return _sum_side(profile, "t", "b", 2, True, workers)
    if side == "right":
        return _sum_side(profile, "b", "t", 2, True, workers)
    raise SeriesError(f"side must be 'left' or 'right', got {side!r}")


def eq31_substitution_path(profile: TruncationProfile, workers: int = 1) -> TruncatedSeries:
    """Even-step left side obtained by substitution instead of direct build."""
    base = build_thm11_side("left", profile, workers)
    return shift_a_by_q(substitute_q_power(base, 2), -1)


def build_thm31_side(which: str, profile: TruncationProfile) -> TruncatedSeries:
    """Sides of the two companion series evaluations (variables a, b, q only).

    3_4_left  = sum_{N>=0} (1 - (a*b*q^(N+1); q)_N / (b*q^N; q)_N)
    3_4_right = -sum_{n>=1} (a*q^(n+1); q)_n b^n / (q^n; q)_{n+1}
    3_5_left  = sum_{N>=0} (1 - (b*q^(N+1); q)_N)
    3_5_right = -sum_{n>=1} (-b)^n q^(n(3n+1)/2) / (q^n; q)_{n+1}

    Every 3_4_left / 3_5_left summand has minimal q-order >= N, so summing
    N up to cap_q is exact; the right sides carry b^n and (for 3_5) the
    pentagonal q-power, bounding n by cap_b and cap_q.
    """
    one = TruncatedSeries.one(profile)
    ab = Monomial(e_a=1, e_b=1)
    a_only = Monomial(e_a=1)
    b_only = Monomial(e_b=1)

    if which == "3_4_left":
        total = TruncatedSeries.zero(profile)
        for n in range(1, profile.cap_q + 1):
            ratio = pochhammer_finite(1, ab, n + 1, 1, n, profile)
            for k in range(n):
                ratio = ratio * invert_one_minus(
                    TruncatedSeries.term(profile, 1, e_b=1, e_q=n + k)
                )
            total = total + (one - ratio)
        return total
    if which == "3_4_right":
        total = TruncatedSeries.zero(profile)
        for n in range(1, profile.cap_b + 1):
            term = pochhammer_finite(1, a_only, n + 1, 1, n, profile)
            term = term * TruncatedSeries.term(profile, 1, e_b=n)
            for k in range(n + 1):
                term = term * invert_one_minus(
                    TruncatedSeries.term(profile, 1, e_q=n + k)
                )
            total = total + term
        return -total
    if which == "3_5_left":
        total = TruncatedSeries.zero(profile)
        for n in range(1, profile.cap_q + 1):
            total = total + (one - pochhammer_finite(1, b_only, n + 1, 1, n, profile))
        return total
    if which == "3_5_right":
        total = TruncatedSeries.zero(profile)
        n = 1
        while n <= profile.cap_b and n * (3 * n + 1) // 2 <= profile.cap_q:
            term = TruncatedSeries.term(
                profile, (-1) ** n, e_b=n, e_q=n * (3 * n + 1) // 2
            )
            for k in range(n + 1):
                term = term * invert_one_minus(
                    TruncatedSeries.term(profile, 1, e_q=n + k)
                )
            total = total + term
            n += 1
        return -total
    raise SeriesError(
        f"side must be one of 3_4_left, 3_4_right, 3_5_left, 3_5_right; got {which!r}"
    )


# ------------------------------------------------------------- formal checkers


def verify_thm11(profile: TruncationProfile, workers: int = 1) -> VerificationReport:
    """Flagship identity: left vs right, plus left as a b<->t fixed point."""
    started = time.perf_counter()
    if profile.cap_b != profile.cap_t:
        raise ProfileMismatchError(
            f"needs cap_b == cap_t, got {profile.cap_b} and {profile.cap_t}"
        )
    left = build_thm11_side("left", profile, workers)
    right = build_thm11_side("right", profile, workers)
    rows = compare_series(left, right)
    swap_rows = compare_series(left, swap_b_t(left))
    status = "verified" if not rows and not swap_rows else "mismatch"
    report = VerificationReport(
        case="thm1_1",
        mode="formal",
        caps=_caps_dict(profile),
        assignment=None,
        status=status,
        mismatches=_rows_to_mismatches(rows),
        details={
            "joint_valid_to_q": min(left.valid_to_q, right.valid_to_q),
            "swap_fixed_point": not swap_rows,
            "swap_mismatch_count": len(swap_rows),
            "term_bound": "outer index n <= cap of its series variable (t left, b right)",
        },
    )
    return _finish(report, started)


def verify_reduction_a0(profile: TruncationProfile, workers: int = 1) -> VerificationReport:
    """a = 0 stratum of the flagship left side equals f(b, t) exactly."""
    started = time.perf_counter()
    reduced = TruncationProfile(0, profile.cap_b, profile.cap_t, profile.cap_q)
    lhs = build_thm11_side("left", reduced, workers)
    rhs = build_f_series("b", reduced, workers)
    rows = compare_series(lhs, rhs)
    report = VerificationReport(
        case="reduction_a0",
        mode="formal",
        caps=_caps_dict(reduced),
        assignment=None,
        status="verified" if not rows else "mismatch",
        mismatches=_rows_to_mismatches(rows),
        details={"joint_valid_to_q": min(lhs.valid_to_q, rhs.valid_to_q)},
    )
    return _finish(report, started)


def verify_f_sym_formal(profile: TruncationProfile, workers: int = 1) -> VerificationReport:
    """Symmetry f(b, t) = f(t, b) at the (q, q^2) specialization."""
    started = time.perf_counter()
    if profile.cap_b != profile.cap_t:
        raise ProfileMismatchError(
            f"needs cap_b == cap_t, got {profile.cap_b} and {profile.cap_t}"
        )
    lhs = build_f_series("b", profile, workers)
    rhs = build_f_series("t", profile, workers)
    rows = compare_series(lhs, rhs)
    report = VerificationReport(
        case="f_sym",
        mode="formal",
        caps=_caps_dict(profile),
        assignment=None,
        status="verified" if not rows else "mismatch",
        mismatches=_rows_to_mismatches(rows),
        details={"joint_valid_to_q": min(lhs.valid_to_q, rhs.valid_to_q)},
    )
    return _finish(report, started)


def verify_eq31(profile: TruncationProfile, workers: int = 1) -> VerificationReport:
    """Even-step variant: substitution path vs direct build, plus symmetry.

    The substitution path is valid to 2*cap_q + 1 - cap_a after the shift,
    so the construction comparison runs on the joint validity region; the
    left/right symmetry comparison uses the full profile.
    """
    started = time.perf_counter()
    if profile.cap_b != profile.cap_t:
        raise ProfileMismatchError(
            f"needs cap_b == cap_t, got {profile.cap_b} and {profile.cap_t}"
        )
    direct = build_eq31_side("left", profile, workers)
    substituted = eq31_substitution_path(profile, workers)
    joint = min(direct.valid_to_q, substituted.valid_to_q)
    if joint < 0:
        report = VerificationReport(
            case="eq3_1_consistency",
            mode="formal",
            caps=_caps_dict(profile),
            assignment=None,
            status="error",
            details={
                "error": "substitution path has empty validity region; "
                f"cap_q must exceed cap_a (valid_to_q = {substituted.valid_to_q})",
            },
        )
        return _finish(report, started)
    construction_rows = compare_series(direct, substituted)
    right = build_eq31_side("right", profile, workers)
    symmetry_rows = compare_series(direct, right)
    status = "verified" if not construction_rows and not symmetry_rows else "mismatch"
    report = VerificationReport(
        case="eq3_1_consistency",
        mode="formal",
        caps=_caps_dict(profile),
        assignment=None,
        status=status,
        mismatches=_rows_to_mismatches(construction_rows) + _rows_to_mismatches(symmetry_rows),
        details={
            "joint_valid_to_q": joint,
            "construction_mismatch_count": len(construction_rows),
            "symmetry_mismatch_count": len(symmetry_rows),
            "substitution_valid_to_q": substituted.valid_to_q,
        },
    )
    return _finish(report, started)


def verify_thm31(which: str, profile: TruncationProfile) -> VerificationReport:
    """Companion evaluations, adjudication mode: report mismatches, never assume."""
    started = time.perf_counter()
    if which not in ("3_4", "3_5"):
        raise SeriesError(f"which must be '3_4' or '3_5', got {which!r}")
    left = build_thm31_side(f"{which}_left", profile)
    right = build_thm31_side(f"{which}_right", profile)
    rows = compare_series(left, right)
    report = VerificationReport(
        case=f"thm{which}",
        mode="formal",
        caps=_caps_dict(profile),
        assignment=None,
        status="verified" if not rows else "mismatch",
        mismatches=_rows_to_mismatches(rows),
        details={
            "joint_valid_to_q": min(left.valid_to_q, right.valid_to_q),
            "adjudication": "mismatch table reported as found; equality is not assumed",
        },
    )
    return _finish(report, started)


# ------------------------------------------------------------ rational checkers


def _qps_summand(assign: RationalAssignment, n: int, cap_q: int) -> TruncatedSeries:
    a, b, c, N = assign.a, assign.b, assign.c, assign.N
    fac = []
    fac += pochhammer_factors(a, 0, 1, n)
    fac += pochhammer_factors(b, 0, 1, n)
    fac += pochhammer_factors(1, -N, 1, n)
    fac += pochhammer_factors(c, 0, 1, n, inverted=True)
    fac += pochhammer_factors(1, 1, 1, n, inverted=True)
    fac += pochhammer_factors(Fraction(a) * b / c, 1 - N, 1, n, inverted=True)
    return product_series(fac, cap_q, q_shift=n, label=f"balanced-sum term n={n}")


def _qps_lhs(assign: RationalAssignment, cap_q: int) -> TruncatedSeries:
    total = TruncatedSeries.zero(q_only_profile(cap_q))
    for n in range(assign.N + 1):
        total = total + _qps_summand(assign, n, cap_q)
    return total


def _qps_rhs(assign: RationalAssignment, cap_q: int) -> TruncatedSeries:
    a, b, c, N = assign.a, assign.b, assign.c, assign.N
    fac = []
    fac += pochhammer_factors(Fraction(c) / a, 0, 1, N)
    fac += pochhammer_factors(Fraction(c) / b, 0, 1, N)
    fac += pochhammer_factors(c, 0, 1, N, inverted=True)
    fac += pochhammer_factors(Fraction(c) / (Fraction(a) * b), 0, 1, N, inverted=True)
    return product_series(fac, cap_q, label="balanced-sum product side")


def verify_qps(assign: RationalAssignment, cap_q: int) -> VerificationReport:
    """Terminating balanced summation: the n-sum up to N vs the product form.

    The printed product side elsewhere mixes subscripts n and N; the checker
    evaluates the standard all-N product and records that normalization.
    The n = N + 1 summand is confirmed to vanish (the q^(-N) stream hits a
    zero factor), which is why the sum terminates.
    """
    started = time.perf_counter()
    assign.require("a", "b", "c", "N")
    if assign.N < 0:
        raise SeriesError(f"N must be >= 0, got {assign.N}")
    lhs = _qps_lhs(assign, cap_q)
    rhs = _qps_rhs(assign, cap_q)
    rows = compare_series(lhs, rhs)
    probe_zero = _qps_summand(assign, assign.N + 1, cap_q).is_zero()
    report = VerificationReport(
        case="qps_2_1",
        mode="rational",
        caps={"q": cap_q},
        assignment=assign.as_strings(),
        status="verified" if not rows else "mismatch",
        mismatches=_rows_to_mismatches(rows),
        details={
            "form": "all_N_product",
            "normalization": "product side evaluated with every subscript N",
            "terminates_at": assign.N,
            "next_summand_zero": probe_zero,
        },
    )
    return _finish(report, started)


def _eq22_rhs(assign: RationalAssignment, cap_q: int, with_qn: bool) -> TruncatedSeries:
    a, b, c, N = assign.a, assign.b, assign.c, assign.N
    c_ab = Fraction(c) / (Fraction(a) * b)
    pref = product_series(
        pochhammer_factors(1, 1, 1, N)
        + pochhammer_factors(c_ab, 0, 1, N, inverted=True),
        cap_q,
        label="rewrite prefactor",
    )
    total = TruncatedSeries.zero(q_only_profile(cap_q))
    for n in range(N + 1):
        fac = []
        fac += pochhammer_factors(a, 0, 1, n)
        fac += pochhammer_factors(b, 0, 1, n)
        fac += pochhammer_factors(c_ab, 0, 1, N - n)
        fac += pochhammer_factors(c, 0, 1, n, inverted=True)
        fac += pochhammer_factors(1, 1, 1, n, inverted=True)
        fac += pochhammer_factors(1, 1, 1, N - n, inverted=True)
        total = total + product_series(
            fac,
            cap_q,
            scalar=c_ab**n,
            q_shift=n if with_qn else 0,
            label=f"rewrite term n={n}",
        )
    return pref * total


def verify_eq22(assign: RationalAssignment, cap_q: int) -> VerificationReport:
    """Finite rewrite of the balanced sum, adjudicating the printed q^n factor.

    The rewrite is evaluated in two variants, with and without an extra q^n
    inside each term; the balanced sum is compared against both and the
    report records which variant matched (the q^n-free one is the one that
    does; the q^n from the original sum cancels during the rewrite).
    """
    started = time.perf_counter()
    assign.require("a", "b", "c", "N")
    if assign.N < 0:
        raise SeriesError(f"N must be >= 0, got {assign.N}")
    lhs = _qps_lhs(assign, cap_q)
    rhs_plain = _eq22_rhs(assign, cap_q, with_qn=False)
    rhs_printed = _eq22_rhs(assign, cap_q, with_qn=True)
    rows_plain = compare_series(lhs, rhs_plain)
    rows_printed = compare_series(lhs, rhs_printed)
    if not rows_plain:
        status, matched, rows = "verified", "without_qn", rows_plain
    elif not rows_printed:
        status, matched, rows = "verified", "with_qn", rows_printed
    else:
        status, matched, rows = "mismatch", "none", rows_plain
    report = VerificationReport(
        case="rewrite_2_2",
        mode="rational",
        caps={"q": cap_q},
        assignment=assign.as_strings(),
        status=status,
        mismatches=_rows_to_mismatches(rows),
        details={
            "matched_form": matched,
            "with_qn_mismatch_count": len(rows_printed),
            "without_qn_mismatch_count": len(rows_plain),
        },
    )
    return _finish(report, started)


def _eq23_lhs(assign: RationalAssignment, cap_q: int) -> TruncatedSeries:
    a, b, N = assign.a, assign.b, assign.N
    inv_a = 1 / Fraction(a)
    total = TruncatedSeries.zero(q_only_profile(cap_q))
    for n in range(N + 1):
        fac = []
        fac += pochhammer_factors(a, 0, 1, n)
        fac += pochhammer_factors(inv_a, 1, 1, N - n)
        fac += pochhammer_factors(1, 1, 1, n, inverted=True)
        fac += pochhammer_factors(1, 1, 1, N - n, inverted=True)
        fac += [Factor(Fraction(b), n, True)]
        total = total + product_series(
            fac, cap_q, scalar=inv_a**n, q_shift=n, label=f"specialized term n={n}"
        )
    return total


def _eq23_rhs(assign: RationalAssignment, cap_q: int) -> TruncatedSeries:
    a, b, N = assign.a, assign.b, assign.N
    fac = pochhammer_factors(Fraction(b) / a, 1, 1, N)
    fac += pochhammer_factors(b, 0, 1, N + 1, inverted=True)
    return product_series(fac, cap_q, label="specialized product side")


def verify_eq23(assign: RationalAssignment, cap_q: int) -> VerificationReport:
    """c = b*q specialization of the balanced sum (contains q/a, so a != 0)."""
    started = time.perf_counter()
    assign.require("a", "b", "N")
    if assign.N < 0:
        raise SeriesError(f"N must be >= 0, got {assign.N}")
    if assign.a == 0:
        raise DegenerateParameterError("parameter a must be nonzero (q/a appears)")
    lhs = _eq23_lhs(assign, cap_q)
    rhs = _eq23_rhs(assign, cap_q)
    rows = compare_series(lhs, rhs)
    report = VerificationReport(
        case="eq2_3",
        mode="rational",
        caps={"q": cap_q},
        assignment=assign.as_strings(),
        status="verified" if not rows else "mismatch",
        mismatches=_rows_to_mismatches(rows),
        details={"terminates_at": assign.N},
    )
    return _finish(report, started)


# The double sums below do not gain q-order in the outer index: the
# summands stabilize (mod q^(cap_q+1)) once every moving factor leaves the
# window, after which consecutive summands differ exactly by a power of
# the carrier parameter.  Each builder sums explicitly up to its freeze
# index and closes the geometric tail in exact arithmetic.


def _chain_double_unshifted(assign: RationalAssignment, cap_q: int) -> TruncatedSeries:
    a, b, t = assign.a, assign.b, assign.t
    inv_a = 1 / Fraction(a)

    def smd(N: int, n: int) -> TruncatedSeries:
        s = cached_poch_series(Fraction(a), 0, 1, n, cap_q)
        s = s * cached_poch_series(Fraction(1), 1, 1, n, cap_q, True)
        s = s * cached_poch_series(inv_a, 1, 1, N - n, cap_q)
        s = s * cached_poch_series(Fraction(1), 1, 1, N - n, cap_q, True)
        s = s * geometric_inverse_factor(b, N + n, cap_q)
        s = s * TruncatedSeries.term(q_only_profile(cap_q), 1, e_q=n)
        return s * (inv_a**n * Fraction(t) ** N)

    total = TruncatedSeries.zero(q_only_profile(cap_q))
    tail_scale = Fraction(1) / (1 - Fraction(t))
    for n in range(cap_q + 1):
        n_freeze = n + cap_q + 1
        inner = TruncatedSeries.zero(q_only_profile(cap_q))
        for N in range(n, n_freeze):
            inner = inner + smd(N, n)
        inner = inner + smd(n_freeze, n) * tail_scale
        total = total + inner
    return total


def _chain_double_shifted(assign: RationalAssignment, cap_q: int) -> TruncatedSeries:
    a, b, t = assign.a, assign.b, assign.t
    inv_a = 1 / Fraction(a)

    def smd(N: int, n: int) -> TruncatedSeries:
        s = cached_poch_series(Fraction(a), 0, 1, n, cap_q)
        s = s * cached_poch_series(Fraction(1), 1, 1, n, cap_q, True)
        s = s * cached_poch_series(inv_a, 1, 1, N, cap_q)
        s = s * cached_poch_series(Fraction(1), 1, 1, N, cap_q, True)
        s = s * geometric_inverse_factor(b, N + 2 * n, cap_q)
        s = s * TruncatedSeries.term(q_only_profile(cap_q), 1, e_q=n)
        return s * (inv_a**n * Fraction(t) ** (N + n))

    total = TruncatedSeries.zero(q_only_profile(cap_q))
    tail_scale = Fraction(1) / (1 - Fraction(t))
    n_freeze = cap_q + 1
    for n in range(cap_q + 1):
        inner = TruncatedSeries.zero(q_only_profile(cap_q))
        for N in range(n_freeze):
            inner = inner + smd(N, n)
        inner = inner + smd(n_freeze, n) * tail_scale
        total = total + inner
    return total


def _chain_product_form(assign: RationalAssignment, cap_q: int) -> TruncatedSeries:
    a, b, t = assign.a, assign.b, assign.t
    t_over_a = Fraction(t) / Fraction(a)
    pref = product_series(
        pochhammer_factors(t_over_a, 1, 1, None, cap_q=cap_q)
        + pochhammer_factors(t, 0, 1, None, inverted=True, cap_q=cap_q),
        cap_q,
        label="product-form prefactor",
    )

    def cterm(n: int) -> TruncatedSeries:
        fac = []
        fac += pochhammer_factors(t, 0, 1, n)
        fac += pochhammer_factors(t_over_a, 1, 1, n, inverted=True)
        fac += pochhammer_factors(t, 2 * n + 1, 1, None, cap_q=cap_q)
        fac += pochhammer_factors(
            t_over_a, 2 * n + 1, 1, None, inverted=True, cap_q=cap_q
        )
        return product_series(
            fac, cap_q, scalar=Fraction(b) ** n, label=f"product-form term n={n}"
        )

    return pref * sum_with_geometric_tail(cterm, b, cap_q + 1, cap_q)


def _chain_single_sum(assign: RationalAssignment, cap_q: int, reciprocal: bool) -> TruncatedSeries:
    a, b, t = assign.a, assign.b, assign.t
    x = Fraction(t) / Fraction(a) if reciprocal else Fraction(a) * Fraction(t)

    def dterm(n: int) -> TruncatedSeries:
        fac = pochhammer_factors(x, n + 1, 1, n)
        fac += pochhammer_factors(t, n, 1, n + 1, inverted=True)
        return product_series(
            fac, cap_q, scalar=Fraction(b) ** n, label=f"target term n={n}"
        )

    return sum_with_geometric_tail(dterm, b, cap_q + 1, cap_q)


def _chain_preconditions(assign: RationalAssignment) -> None:
    assign.require("a", "b", "t")
    if assign.a == 0:
        raise DegenerateParameterError("parameter a must be nonzero (q/a appears)")
    if assign.t == 1:
        raise DegenerateParameterError("parameter t must differ from 1 (1 - t divides)")
    if assign.b == 1:
        raise DegenerateParameterError("parameter b must differ from 1 (1 - b divides)")


_CHAIN_BOUND_NOTE = {
    "shift": "outer index <= cap_q (each term carries q^n); inner sums closed by a "
    "geometric tail in t once the moving factors leave the q-window",
    "fine": "double sum as in the shift step; product-form sum closed by a geometric "
    "tail in b past index cap_q + 1",
    "final": "both single sums closed by geometric tails in b past index cap_q + 1",
}


def verify_chain(step: str, assign: RationalAssignment, cap_q: int) -> VerificationReport:
    """One step of the rewriting chain that proves the flagship identity.

    shift: the double sum equals its reindexed (outer index shifted by the
    inner one) form.  fine: the shifted double sum equals the closed
    product form.  final: the product form collapses to the single sum
    target; the target is evaluated both with the factor base a*t and with
    t/a, and the report records which one matched (t/a is the one implied
    by the chain; the printed base a*t reflects an inverted parameter).
    """
    started = time.perf_counter()
    if step not in ("shift", "fine", "final"):
        raise SeriesError(f"step must be shift, fine or final; got {step!r}")
    _chain_preconditions(assign)

    details: Dict[str, object] = {"index_bounds": _CHAIN_BOUND_NOTE[step]}
    if step == "shift":
        lhs = _chain_double_unshifted(assign, cap_q)
        rhs = _chain_double_shifted(assign, cap_q)
        rows = compare_series(lhs, rhs)
        status = "verified" if not rows else "mismatch"
    elif step == "fine":
        lhs = _chain_double_shifted(assign, cap_q)
        rhs = _chain_product_form(assign, cap_q)
        rows = compare_series(lhs, rhs)
        status = "verified" if not rows else "mismatch"
    else:
        lhs = _chain_product_form(assign, cap_q)
        rhs_reciprocal = _chain_single_sum(assign, cap_q, reciprocal=True)
        rhs_printed = _chain_single_sum(assign, cap_q, reciprocal=False)
        rows_reciprocal = compare_series(lhs, rhs_reciprocal)
        rows_printed = compare_series(lhs, rhs_printed)
        if not rows_reciprocal:
            status, rows = "verified", rows_reciprocal
            details["matched_form"] = "t_over_a"
        elif not rows_printed:
            status, rows = "verified", rows_printed
            details["matched_form"] = "a_times_t"
        else:
            status, rows = "mismatch", rows_reciprocal
            details["matched_form"] = "none"
        details["printed_form_mismatch_count"] = len(rows_printed)
    report = VerificationReport(
        case=f"chain_{step}",
        mode="rational",
        caps={"q": cap_q},
        assignment=assign.as_strings(),
        status=status,
        mismatches=_rows_to_mismatches(rows),
        details=details,
    )
    return _finish(report, started)


def _f_rational(first: Fraction, second: Fraction, k1: int, k2: int, cap_q: int) -> TruncatedSeries:
    """f(first, second) with the auxiliary bases realized as q^k1 and q^k2.

    Term n is second^n / prod_{k=0..n} (1 - first * q^(k1*(n-k) + k2*k)).
    Term n is constant (= second^n) once every factor exponent exceeds
    cap_q, i.e. past n = cap_q // min(k1, k2); the remaining geometric
    tail is summed in closed form.
    """
    step = min(k1, k2)

    def term(n: int) -> TruncatedSeries:
        fac = [Factor(first, k1 * (n - k) + k2 * k, True) for k in range(n + 1)]
        return product_series(
            fac, cap_q, scalar=second**n, label=f"symmetric-function term n={n}"
        )

    return sum_with_geometric_tail(term, second, cap_q // step + 1, cap_q)


def verify_f_sym_rational(assign: RationalAssignment, cap_q: int) -> VerificationReport:
    """Symmetry f(alpha, beta) = f(beta, alpha) with general q-power bases.

    The constant stratum of each side is an exact geometric series in the
    respective second argument; it is summed in closed form, which is the
    formal counterpart of the analytic |argument| < 1 condition.
    """
    started = time.perf_counter()
    assign.require("alpha", "beta", "x_exp", "y_exp")
    k1, k2 = assign.x_exp, assign.y_exp
    if k1 < 1 or k2 < 1:
        raise SeriesError(f"x_exp and y_exp must be >= 1, got {k1}, {k2}")
    if assign.alpha == 1 or assign.beta == 1:
        raise DegenerateParameterError("alpha and beta must differ from 1")
    lhs = _f_rational(assign.alpha, assign.beta, k1, k2, cap_q)
    rhs = _f_rational(assign.beta, assign.alpha, k1, k2, cap_q)
    rows = compare_series(lhs, rhs)
    report = VerificationReport(
        case="f_sym",
        mode="rational",
        caps={"q": cap_q},
        assignment=assign.as_strings(),
        status="verified" if not rows else "mismatch",
        mismatches=_rows_to_mismatches(rows),
        details={
            "index_bounds": f"terms constant past n = cap_q // {min(k1, k2)}; "
            "geometric tail summed in closed form",
        },
    )
    return _finish(report, started)


# ----------------------------------------------------------------- case registry


@dataclass(frozen=True)
class IdentityCase:
    """Catalog entry: admissible modes and required rational parameters."""

    name: str
    modes: Tuple[str, ...]
    params: Tuple[str, ...]
    description: str


CASES: Dict[str, IdentityCase] = {
    case.name: case
    for case in [
        IdentityCase(
            "thm1_1",
            ("formal",),
            (),
            "symmetric double series, b<->t exchange",
        ),
        IdentityCase(
            "f_sym",
            ("formal", "rational"),
            ("alpha", "beta", "x_exp", "y_exp"),
            "two-variable symmetric function f(alpha,beta) = f(beta,alpha)",
        ),
        IdentityCase(
            "reduction_a0",
            ("formal",),
            (),
            "a = 0 stratum of the flagship left side equals f(b, t)",
        ),
        IdentityCase(
            "eq3_1_consistency",
            ("formal",),
            (),
            "even-step variant: substitution path vs direct build, plus symmetry",
        ),
        IdentityCase(
            "qps_2_1",
            ("rational",),
            ("a", "b", "c", "N"),
            "terminating balanced summation vs all-N product form",
        ),
        IdentityCase(
            "rewrite_2_2",
            ("rational",),
            ("a", "b", "c", "N"),
            "finite rewrite of the balanced sum (q^n variant adjudicated)",
        ),
        IdentityCase(
            "eq2_3",
            ("rational",),
            ("a", "b", "N"),
            "c = b*q specialization of the balanced sum",
        ),
        IdentityCase(
            "chain_shift",
            ("rational",),
            ("a", "b", "t"),
            "double sum equals its reindexed form",
        ),
        IdentityCase(
            "chain_fine",
            ("rational",),
            ("a", "b", "t"),
            "shifted double sum equals the closed product form",
        ),
        IdentityCase(
            "chain_final",
            ("rational",),
            ("a", "b", "t"),
            "product form collapses to the single-sum target",
        ),
        IdentityCase(
            "thm3_4",
            ("formal",),
            (),
            "companion evaluation in a, b, q (adjudication mode)",
        ),
        IdentityCase(
            "thm3_5",
            ("formal",),
            (),
            "companion evaluation in b, q with pentagonal exponents",
        ),
    ]
}


_RATIONAL_SIDES: Dict[Tuple[str, str], Callable] = {
    ("qps_2_1", "left"): _qps_lhs,
    ("qps_2_1", "right"): _qps_rhs,
    ("rewrite_2_2", "left"): _qps_lhs,
    ("rewrite_2_2", "right"): lambda a, c: _eq22_rhs(a, c, with_qn=False),
    ("eq2_3", "left"): _eq23_lhs,
    ("eq2_3", "right"): _eq23_rhs,
    ("chain_shift", "left"): _chain_double_unshifted,
    ("chain_shift", "right"): _chain_double_shifted,
    ("chain_fine", "left"): _chain_double_shifted,
    ("chain_fine", "right"): _chain_product_form,
    ("chain_final", "left"): _chain_product_form,
    ("chain_final", "right"): lambda a, c: _chain_single_sum(a, c, reciprocal=True),
    ("f_sym", "left"): lambda a, c: _f_rational(a.alpha, a.beta, a.x_exp, a.y_exp, c),
    ("f_sym", "right"): lambda a, c: _f_rational(a.beta, a.alpha, a.x_exp, a.y_exp, c),
}


def rational_series_eval(
    case: str, side: str, assign: RationalAssignment, cap_q: int
) -> TruncatedSeries:
    """Evaluate one side of a rational-mode case as an exact q-series."""
    try:
        builder = _RATIONAL_SIDES[(case, side)]
    except KeyError:
        raise SeriesError(f"no rational-mode side {case}:{side}") from None
    assign.require(*CASES[case].params)
    return builder(assign, cap_q)


def run_case(
    name: str,
    mode: Optional[str] = None,
    profile: Optional[TruncationProfile] = None,
    assign: Optional[RationalAssignment] = None,
    cap_q: Optional[int] = None,
    workers: int = 1,
) -> VerificationReport:
    """Run one catalog case in the requested mode.

    Formal mode needs ``profile``; rational mode needs ``assign`` and
    ``cap_q``.  Raises ``SeriesError`` subclasses for configuration
    problems; mathematical mismatches come back in the report.
    """
    if name not in CASES:
        raise SeriesError(f"unknown identity case {name!r}")
    case = CASES[name]
    if mode is None:
        mode = case.modes[0] if len(case.modes) == 1 else "formal"
    if mode not in case.modes:
        raise SeriesError(
            f"case {name} supports mode(s) {', '.join(case.modes)}; got {mode!r}"
        )
    if mode == "formal":
        if profile is None:
            raise SeriesError("formal mode needs a truncation profile")
        if name == "thm1_1":
            return verify_thm11(profile, workers)
        if name == "f_sym":
            return verify_f_sym_formal(profile, workers)
        if name == "reduction_a0":
            return verify_reduction_a0(profile, workers)
        if name == "eq3_1_consistency":
            return verify_eq31(profile, workers)
        if name == "thm3_4":
            return verify_thm31("3_4", profile)
        if name == "thm3_5":
            return verify_thm31("3_5", profile)
        raise SeriesError(f"case {name} has no formal-mode checker")
    if assign is None or cap_q is None:
        raise SeriesError("rational mode needs an assignment and cap_q")
    assign.require(*case.params)
    if name == "f_sym":
        return verify_f_sym_rational(assign, cap_q)
    if name == "qps_2_1":
        return verify_qps(assign, cap_q)
    if name == "rewrite_2_2":
        return verify_eq22(assign, cap_q)
    if name == "eq2_3":
        return verify_eq23(assign, cap_q)
    if name.startswith("chain_"):
        return verify_chain(name.removeprefix("chain_"), assign, cap_q)
    raise SeriesError(f"case {name} has no rational-mode checker")
