"""Integer partitions: values, constrained enumeration, generating polynomials.

A partition is a weakly decreasing tuple of positive integers.  Its
statistics (weight, length, odd-part count, largest and smallest part) are
pure functions of the parts.  A partition is odd-distinct when no odd
value occurs more than once; odd-distinct partitions are exactly the ones
whose 2-modular conjugate is again a partition.

Enumeration is exhaustive over a finite search space described by a
``ConstraintSet`` and doubles as the brute-force oracle for the series
checks: the generating polynomial sum of a^(odd parts) * q^(weight) over
an enumerated family must match the corresponding series coefficients
computed independently by the series engine.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Tuple

from . import identities
from .series import Monomial, SeriesError, TruncationProfile

__all__ = [
    "ConstraintSet",
    "GeneratingPolynomial",
    "Partition",
    "UnboundedConstraintError",
    "enumerate_partitions",
    "generating_polynomial",
    "is_odd_distinct",
    "series_vs_enumeration_check",
]


class UnboundedConstraintError(SeriesError):
    """The constraint set does not describe a finite search space."""


@dataclass(frozen=True)
class Partition:
    """Weakly decreasing positive parts; ``Partition()`` is the empty partition."""

    parts: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        prev = None
        for p in self.parts:
            if not isinstance(p, int) or isinstance(p, bool) or p <= 0:
                raise SeriesError(f"parts must be positive integers, got {p!r}")
            if prev is not None and p > prev:
                raise SeriesError(f"parts must be weakly decreasing, got {self.parts}")
            prev = p

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def odd_count(self) -> int:
        return sum(1 for p in self.parts if p % 2)

    @property
    def largest(self) -> int:
        """Largest part; 0 for the empty partition."""
        return self.parts[0] if self.parts else 0

    @property
    def smallest(self) -> int:
        """Smallest part; 0 for the empty partition."""
        return self.parts[-1] if self.parts else 0

    def is_odd_distinct(self) -> bool:
        odds = [p for p in self.parts if p % 2]
        return len(odds) == len(set(odds))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse the text form: comma-separated parts, '' or '()' for empty."""
        text = text.strip()
        if text in ("", "()"):
            return cls()
        try:
            parts = tuple(int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise SeriesError(f"cannot parse partition {text!r}: {exc}") from None
        return cls(parts)

    def text(self) -> str:
        """Canonical text form; the empty partition renders as '()'."""
        return ",".join(str(p) for p in self.parts) if self.parts else "()"

    def __str__(self) -> str:
        return self.text()


def is_odd_distinct(p: Partition) -> bool:
    """True iff no odd part value occurs more than once."""
    return p.is_odd_distinct()


@dataclass(frozen=True)
class ConstraintSet:
    """Finite description of a partition family.

    ``weight`` pins the weight exactly and excludes ``weight_min`` /
    ``weight_max``; ``length`` pins the number of parts exactly and
    excludes ``max_length``.  Part bounds apply to every part, so they are
    vacuous for the empty partition.
    """

    weight: Optional[int] = None
    weight_min: Optional[int] = None
    weight_max: Optional[int] = None
    min_part: Optional[int] = None
    max_part: Optional[int] = None
    length: Optional[int] = None
    max_length: Optional[int] = None
    odd_parts_distinct: bool = False

    def __post_init__(self) -> None:
        if self.weight is not None and (
            self.weight_min is not None or self.weight_max is not None
        ):
            raise SeriesError("give either an exact weight or a weight range, not both")
        if self.length is not None and self.max_length is not None:
            raise SeriesError("give either an exact length or a max length, not both")
        for name in ("weight", "weight_min", "weight_max", "length", "max_length"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise SeriesError(f"{name} must be >= 0, got {v}")
        if self.min_part is not None and self.min_part < 1:
            raise SeriesError(f"min_part must be >= 1, got {self.min_part}")
        if self.max_part is not None and self.max_part < 1:
            raise SeriesError(f"max_part must be >= 1, got {self.max_part}")

    def weight_window(self) -> Tuple[int, Optional[int]]:
        if self.weight is not None:
            return (self.weight, self.weight)
        return (self.weight_min or 0, self.weight_max)

    def length_window(self) -> Tuple[int, Optional[int]]:
        if self.length is not None:
            return (self.length, self.length)
        return (0, self.max_length)

    def effective_bounds(self) -> Tuple[int, int]:
        """(max weight, max length) of the finite search space.

        Raises ``UnboundedConstraintError`` when neither a weight bound nor
        a (max_part, length bound) pair is present.
        """
        w_lo, w_hi = self.weight_window()
        l_lo, l_hi = self.length_window()
        if w_hi is None and (self.max_part is None or l_hi is None):
            raise UnboundedConstraintError(
                "need a weight bound, or max_part together with a length bound"
            )
        if w_hi is None:
            w_hi = self.max_part * l_hi
        if l_hi is None:
            # every part is >= min_part (>= 1), so length <= weight bound
            l_hi = w_hi // (self.min_part or 1)
        return (w_hi, l_hi)

    def satisfied_by(self, p: Partition) -> bool:
        w_lo, w_hi = self.weight_window()
        l_lo, l_hi = self.length_window()
        if p.weight < w_lo or (w_hi is not None and p.weight > w_hi):
            return False
        if p.length < l_lo or (l_hi is not None and p.length > l_hi):
            return False
        if self.min_part is not None and any(x < self.min_part for x in p.parts):
            return False
        if self.max_part is not None and any(x > self.max_part for x in p.parts):
            return False
        if self.odd_parts_distinct and not p.is_odd_distinct():
            return False
        return True


def enumerate_partitions(c: ConstraintSet) -> List[Partition]:
    """All partitions satisfying the constraints, descending-lexicographic.

    Exhaustive search over weakly decreasing part sequences; the constraint
    set must be finite (see ``ConstraintSet.effective_bounds``).
    """
    w_hi_eff, l_hi_eff = c.effective_bounds()
    w_lo, w_hi = c.weight_window()
    l_lo, l_hi = c.length_window()
    w_hi = w_hi_eff if w_hi is None else w_hi
    l_hi = l_hi_eff if l_hi is None else l_hi
    lo_part = c.min_part or 1
    hi_part = c.max_part if c.max_part is not None else w_hi

    found: List[Partition] = []
    stack: List[int] = []

    def emit() -> None:
        w = sum(stack)
        if w_lo <= w and l_lo <= len(stack):
            found.append(Partition(tuple(stack)))

    def rec(prev: int, weight: int) -> None:
        emit()
        if len(stack) >= l_hi:
            return
        top = min(prev, hi_part, w_hi - weight)
        for v in range(top, lo_part - 1, -1):
            if c.odd_parts_distinct and stack and v == stack[-1] and v % 2:
                continue
            stack.append(v)
            rec(v, weight + v)
            stack.pop()

    rec(hi_part, 0)
    found.sort(key=lambda p: p.parts, reverse=True)
    return found


@dataclass
class GeneratingPolynomial:
    """Exact counts per (odd-part count, weight): sum of a^o * q^w over a family."""

    counts: Dict[Tuple[int, int], int]

    @classmethod
    def from_partitions(cls, parts: Iterable[Partition]) -> "GeneratingPolynomial":
        counter: Counter = Counter()
        for p in parts:
            counter[(p.odd_count, p.weight)] += 1
        return cls(dict(counter))

    def total(self) -> int:
        return sum(self.counts.values())

    def mismatches(self, other: "GeneratingPolynomial"):
        """Rows ((a_exp, q_exp), self count, other count) where counts differ."""
        keys = set(self.counts) | set(other.counts)
        rows = [
            (k, self.counts.get(k, 0), other.counts.get(k, 0))
            for k in keys
            if self.counts.get(k, 0) != other.counts.get(k, 0)
        ]
        rows.sort(key=lambda r: (r[0][1], r[0][0]))
        return rows

    def minus(self, other: "GeneratingPolynomial"):
        """Monomials (with positive multiplicity) present here beyond ``other``."""
        rows = []
        for k in set(self.counts) | set(other.counts):
            d = self.counts.get(k, 0) - other.counts.get(k, 0)
            if d > 0:
                rows.append((k, d))
        rows.sort(key=lambda r: (r[0][1], r[0][0]))
        return rows

    def __str__(self) -> str:
        if not self.counts:
            return "0"
        bits = []
        for (o, w), n in sorted(self.counts.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mono = []
            if o == 1:
                mono.append("a")
            elif o > 1:
                mono.append(f"a^{o}")
            if w == 1:
                mono.append("q")
            elif w > 1:
                mono.append(f"q^{w}")
            body = "*".join(mono) if mono else "1"
            bits.append(body if n == 1 and mono else f"{n}*{body}" if mono else str(n))
        return " + ".join(bits)


def generating_polynomial(c: ConstraintSet, weight_cap: int) -> GeneratingPolynomial:
    """Exact generating polynomial of the family, restricted to weight <= cap."""
    if c.weight is not None:
        if c.weight > weight_cap:
            return GeneratingPolynomial({})
        capped = c
    else:
        w_hi = c.weight_max if c.weight_max is not None else None
        new_hi = weight_cap if w_hi is None else min(w_hi, weight_cap)
        capped = replace(c, weight_max=new_hi)
    return GeneratingPolynomial.from_partitions(enumerate_partitions(capped))


def series_vs_enumeration_check(
    n: int, profile: TruncationProfile
) -> identities.VerificationReport:
    """Coefficient of t^n in the even-step left side vs direct enumeration.

    For n >= 1 that coefficient counts odd-distinct partitions with every
    part in [2n, 4n], graded by a^(odd parts) * b^(parts) * q^(weight),
    truncated by the profile caps.  The n = 0 window is the formal stratum
    1/(1 - b) (powers of b at q^0), checked as such: there is no partition
    reading for parts of size zero.
    """
    import time

    started = time.perf_counter()
    if n < 0:
        raise SeriesError(f"window index must be >= 0, got {n}")
    if n > profile.cap_t:
        raise SeriesError(f"window index {n} exceeds cap_t={profile.cap_t}")
    lhs = identities.build_eq31_side("left", profile)
    got: Dict[Tuple[int, int, int], object] = {}
    for m, coeff in lhs.terms.items():
        if m[2] == n:
            got[(m[0], m[1], m[3])] = coeff

    expected: Dict[Tuple[int, int, int], int] = {}
    if n == 0:
        for k in range(profile.cap_b + 1):
            expected[(0, k, 0)] = 1
    else:
        family = ConstraintSet(
            weight_max=profile.cap_q,
            min_part=2 * n,
            max_part=4 * n,
            max_length=profile.cap_b,
            odd_parts_distinct=True,
        )
        for p in enumerate_partitions(family):
            if p.odd_count > profile.cap_a:
                continue
            key = (p.odd_count, p.length, p.weight)
            expected[key] = expected.get(key, 0) + 1

    rows = []
    for key in set(got) | set(expected):
        x = got.get(key, 0)
        y = expected.get(key, 0)
        if x != y:
            rows.append((Monomial(key[0], key[1], n, key[2]), x, y))
    rows.sort(key=lambda r: r[0].order_key())

    report = identities.VerificationReport(
        case="eq3_1_window",
        mode="formal",
        caps={
            "a": profile.cap_a,
            "b": profile.cap_b,
            "t": profile.cap_t,
            "q": profile.cap_q,
        },
        assignment={"window": str(n)},
        status="verified" if not rows else "mismatch",
        mismatches=[
            identities.Mismatch(m, _as_fraction(x), _as_fraction(y)) for m, x, y in rows
        ],
        details={
            "window": n,
            "reading": "formal 1/(1-b) stratum" if n == 0 else f"parts in [{2*n}, {4*n}]",
        },
    )
    report.duration_ms = (time.perf_counter() - started) * 1000.0
    return report


def _as_fraction(x) -> "Fraction":
    from fractions import Fraction

    return Fraction(x)
