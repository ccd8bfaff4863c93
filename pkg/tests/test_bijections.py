"""Partition maps and the finite-box audit, against brute-force oracles."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsid.bijections import (
    BijectionBox,
    BijectionError,
    audit_bijection,
    gamma,
    gamma_inverse,
    ordinary_conjugate,
    sigma_gamma,
    two_modular_conjugate,
)
from qsid.partitions import ConstraintSet, Partition, enumerate_partitions

P = Partition.parse


# ----------------------------------------------------- independent sigma oracle


def sigma_by_diagram(lam: Partition) -> Partition:
    """Materialize the 2-modular diagram and sum its columns (test oracle)."""
    rows = []
    for part in lam.parts:
        width = (part + 1) // 2
        labels = [2] * width
        if part % 2:
            labels[-1] = 1
        rows.append(labels)
    if not rows:
        return Partition()
    width = max(len(r) for r in rows)
    cols = []
    for j in range(width):
        cols.append(sum(r[j] for r in rows if len(r) > j))
    return Partition(tuple(cols))


# -------------------------------------------------------------------- gamma


def test_gamma_known_vectors():
    assert gamma(P("20,13,12,12,10"), 5) == P("10,10,10,10,10,10,3,2,2")
    assert gamma(P("20,17,13"), 5) == P("10,10,10,10,7,3")


def test_gamma_single_marker():
    for M in (1, 2, 5):
        assert gamma(Partition((2 * M,)), M) == Partition((2 * M,))


def test_gamma_empty():
    assert gamma(Partition(), 3) == Partition()


def test_gamma_preconditions():
    with pytest.raises(BijectionError):
        gamma(P("9,8"), 5)  # part below 2M
    with pytest.raises(BijectionError):
        gamma(P("11,11"), 5)  # odd part repeats
    with pytest.raises(BijectionError):
        gamma(P("4,4"), 0)  # M must be positive


def test_gamma_statistics():
    p = P("20,13,12,12,10")
    image = gamma(p, 5)
    assert image.weight == p.weight
    assert image.odd_count == p.odd_count
    assert image.largest == 10
    assert image.length == p.length + sum(1 for x in p.parts if x > 10)


# ------------------------------------------------------------- gamma inverse


def test_gamma_inverse_known_vectors():
    assert gamma_inverse(P("10,10,10,10,7,3"), 3, 5) == P("20,17,13")
    # same image, different length stratum: this is why j must be supplied
    assert gamma_inverse(P("10,10,10,10,7,3"), 4, 5) == P("17,13,10,10")
    assert gamma(P("17,13,10,10"), 5) == P("10,10,10,10,7,3")


def test_gamma_inverse_trivial_marker():
    for M in (1, 3):
        assert gamma_inverse(Partition((2 * M,)), 1, M) == Partition((2 * M,))


def test_gamma_inverse_rejects_non_images():
    with pytest.raises(BijectionError):
        gamma_inverse(P("10,7,3"), 3, 5)  # too few markers
    with pytest.raises(BijectionError):
        gamma_inverse(P("12,10"), 1, 5)  # part above 2M
    with pytest.raises(BijectionError):
        gamma_inverse(P("10,10,7,3,2"), 2, 5)  # too many remainders


@given(st.integers(1, 4), st.data())
@settings(max_examples=60, deadline=None)
def test_gamma_roundtrip_random(M, data):
    # parts within [2M, 4M], so every remainder stays within the marker bound
    j = data.draw(st.integers(1, 4))
    parts = sorted(
        data.draw(st.lists(st.integers(2 * M, 4 * M), min_size=j, max_size=j)),
        reverse=True,
    )
    seen_odd = set()
    cleaned = []
    for x in parts:
        if x % 2:
            if x in seen_odd:
                continue
            seen_odd.add(x)
        cleaned.append(x)
    p = Partition(tuple(sorted(cleaned, reverse=True)))
    assert gamma_inverse(gamma(p, M), p.length, M) == p


# ---------------------------------------------------------------- conjugation


def test_sigma_known_vectors():
    assert two_modular_conjugate(P("10,10,10,10,10,10,3,2,2")) == P("18,13,12,12,12")
    assert two_modular_conjugate(P("12,12,12,8,5,1")) == P("11,10,9,8,6,6")
    # column-sum value for the marked form of the three-part example;
    # weight preservation (50) pins this vector
    assert two_modular_conjugate(P("10,10,10,10,7,3")) == P("12,11,10,9,8")


def test_sigma_rejects_repeated_odd():
    with pytest.raises(BijectionError):
        two_modular_conjugate(P("5,5,2"))


def test_sigma_empty():
    assert two_modular_conjugate(Partition()) == Partition()


def _odd_distinct_upto(weight_cap):
    return enumerate_partitions(
        ConstraintSet(weight_min=0, weight_max=weight_cap, odd_parts_distinct=True)
    )


def test_sigma_matches_diagram_oracle():
    for p in _odd_distinct_upto(16):
        assert two_modular_conjugate(p) == sigma_by_diagram(p)


def test_sigma_involution_and_statistics_small():
    for p in _odd_distinct_upto(18):
        image = two_modular_conjugate(p)
        assert two_modular_conjugate(image) == p
        assert image.weight == p.weight
        assert image.odd_count == p.odd_count
        assert image.length == (p.largest + 1) // 2
        assert (image.largest + 1) // 2 == p.length


def test_sigma_on_even_parts_is_doubled_ordinary_conjugate():
    for p in _odd_distinct_upto(20):
        if any(x % 2 for x in p.parts):
            continue
        halved = Partition(tuple(x // 2 for x in p.parts))
        doubled = Partition(tuple(2 * x for x in ordinary_conjugate(halved).parts))
        assert two_modular_conjugate(p) == doubled


# ------------------------------------------------------------------ composed


def test_sigma_gamma_known_vectors():
    assert sigma_gamma(P("20,13,12,12,10"), 5) == P("18,13,12,12,12")
    assert sigma_gamma(P("20,17,13"), 5) == P("12,11,10,9,8")


def test_sigma_gamma_single_part():
    for M in (1, 2, 4):
        assert sigma_gamma(Partition((2 * M,)), M) == Partition((2,) * M)


def test_sigma_gamma_box_statistics():
    # three parts in [10, 20]: images must have 5 parts, each in [6, 12]
    for p in enumerate_partitions(
        ConstraintSet(length=3, min_part=10, max_part=20, odd_parts_distinct=True)
    ):
        image = sigma_gamma(p, 5)
        assert image.length == 5
        assert all(6 <= x <= 12 for x in image.parts)


# -------------------------------------------------------------------- audits


def test_audit_box_1_2_exact_confirms_bijection():
    report = audit_bijection(BijectionBox(1, 2))
    e = report.exact
    assert report.passed
    assert e.domain_size == e.codomain_size == 5
    assert e.weight_preserved.failed == 0
    assert e.odd_count_preserved.failed == 0
    assert e.codomain_membership.failed == 0
    assert e.injective and e.surjective
    assert e.genpoly_equal
    assert e.middle_equals_domain and e.middle_equals_codomain


def test_audit_box_1_2_printed_reproduces_discrepancy():
    report = audit_bijection(BijectionBox(1, 2, "printed"))
    assert not report.printed.genpoly_equal
    assert report.printed.genpoly_mismatches == [
        ((0, 2), 0, 1),
        ((1, 3), 0, 1),
        ((0, 4), 1, 2),
    ]
    # the <= reading adds exactly 1, q^2, a*q^3, q^4 to the codomain side
    assert report.le_adds_codomain == [
        ((0, 0), 1),
        ((0, 2), 1),
        ((1, 3), 1),
        ((0, 4), 1),
    ]
    assert report.le_adds_domain == [((0, 0), 1)]
    # the strict reading of the part bounds drops only the empty partition
    assert report.printed_genpoly_strict_mismatches == report.printed.genpoly_mismatches


def test_audit_symmetric_box_is_trivially_balanced():
    report = audit_bijection(BijectionBox(2, 2))
    assert report.passed
    assert report.exact.domain_size == report.exact.codomain_size


def test_audit_3_5_processes_known_vectors():
    report = audit_bijection(BijectionBox(3, 5))
    assert report.passed
    assert report.exact.domain_size == 231
    domain = enumerate_partitions(
        ConstraintSet(length=3, min_part=10, max_part=20, odd_parts_distinct=True)
    )
    assert P("20,17,13") in domain


def test_audit_enumeration_guard():
    with pytest.raises(BijectionError):
        audit_bijection(BijectionBox(3, 3), enum_limit=10)


def test_audit_guard_env_override(monkeypatch):
    monkeypatch.setenv("QSID_ENUM_LIMIT", "10")
    with pytest.raises(BijectionError):
        audit_bijection(BijectionBox(3, 3))


def test_audit_rejects_bad_box():
    with pytest.raises(BijectionError):
        BijectionBox(0, 2)
    with pytest.raises(BijectionError):
        BijectionBox(1, 2, "loose")


def test_audit_reports_revalidate():
    for box in (BijectionBox(1, 1), BijectionBox(2, 3), BijectionBox(3, 2)):
        assert audit_bijection(box).revalidate()


def test_audit_workers_equivalence():
    r1 = audit_bijection(BijectionBox(2, 2), workers=1)
    r2 = audit_bijection(BijectionBox(2, 2), workers=4)
    assert r1.exact.genpoly_mismatches == r2.exact.genpoly_mismatches
    assert r1.exact.domain_size == r2.exact.domain_size
    assert r1.passed == r2.passed
