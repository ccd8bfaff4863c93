"""Series engine: operation examples, error contracts, and ring properties."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsid.series import (
    MONO_ONE,
    Monomial,
    NegativeExponentError,
    NonNilpotentError,
    ProfileMismatchError,
    TruncatedSeries,
    TruncationProfile,
    ValidityError,
    coefficient,
    compare_series,
    invert_one_minus,
    pochhammer_finite,
    pochhammer_infinite,
    series_add,
    series_mul,
    shift_a_by_q,
    substitute_q_power,
    swap_b_t,
)

PROF = TruncationProfile(3, 3, 3, 8)


def test_module_doctests():
    import doctest

    import qsid.series

    result = doctest.testmod(qsid.series)
    assert result.failed == 0 and result.attempted > 0


def term(profile, coeff, a=0, b=0, t=0, q=0):
    return TruncatedSeries.term(profile, coeff, e_a=a, e_b=b, e_t=t, e_q=q)


# ----------------------------------------------------------- dense q-oracle


def dense_mul(xs, ys, cap):
    """Independent dense polynomial product in q alone (coefficient lists)."""
    out = [0] * (cap + 1)
    for i, x in enumerate(xs):
        if x == 0:
            continue
        for j, y in enumerate(ys):
            if i + j > cap:
                break
            out[i + j] += x * y
    return out


def dense_from_series(s, cap):
    out = [0] * (cap + 1)
    for m, c in s.terms.items():
        assert m[:3] == (0, 0, 0)
        out[m[3]] += c
    return out


# ------------------------------------------------------------------ addition


def test_add_cancellation():
    one_plus_q = TruncatedSeries.one(PROF) + term(PROF, 1, q=1)
    one_minus_q = TruncatedSeries.one(PROF) - term(PROF, 1, q=1)
    assert series_add(one_plus_q, one_minus_q) == TruncatedSeries.constant(PROF, 2)


def test_add_identity_element():
    s = term(PROF, 3, a=1, q=2) + term(PROF, Fraction(1, 2), b=1)
    assert series_add(s, TruncatedSeries.zero(PROF)) == s


def test_add_like_term_merge():
    s = term(PROF, 1, a=1, b=1, q=2)
    assert series_add(s, s) == term(PROF, 2, a=1, b=1, q=2)


def test_add_profile_mismatch():
    other = TruncatedSeries.one(TruncationProfile(1, 1, 1, 4))
    with pytest.raises(ProfileMismatchError):
        series_add(TruncatedSeries.one(PROF), other)


# ------------------------------------------------------------------- product


def test_mul_telescoping_within_cap():
    prof = TruncationProfile(0, 0, 0, 3)
    lhs = TruncatedSeries.one(prof) - term(prof, 1, q=1)
    rhs = sum(
        (term(prof, 1, q=k) for k in range(4)), start=TruncatedSeries.zero(prof)
    )
    assert series_mul(lhs, rhs) == TruncatedSeries.one(prof)


def test_mul_identity_element():
    s = TruncatedSeries.one(PROF) + term(PROF, 1, a=1, b=1, q=2)
    assert series_mul(s, TruncatedSeries.one(PROF)) == s


def test_mul_geometric_cancellation_in_b():
    geom = sum(
        (term(PROF, 1, b=k) for k in range(PROF.cap_b + 1)),
        start=TruncatedSeries.zero(PROF),
    )
    one_minus_b = TruncatedSeries.one(PROF) - term(PROF, 1, b=1)
    assert series_mul(one_minus_b, geom) == TruncatedSeries.one(PROF)


def test_mul_valid_to_q_is_min():
    x = TruncatedSeries(PROF, {MONO_ONE: 1}, valid_to_q=5)
    y = TruncatedSeries(PROF, {MONO_ONE: 1}, valid_to_q=7)
    assert (x * y).valid_to_q == 5
    assert (x + y).valid_to_q == 5


# ----------------------------------------------------------------- inversion


def test_invert_geometric_q():
    prof = TruncationProfile(0, 0, 0, 3)
    inv = invert_one_minus(term(prof, 1, q=1))
    assert dense_from_series(inv, 3) == [1, 1, 1, 1]


def test_invert_geometric_b():
    prof = TruncationProfile(0, 2, 0, 4)
    inv = invert_one_minus(term(prof, 1, b=1))
    assert inv == term(prof, 1) + term(prof, 1, b=1) + term(prof, 1, b=2)


def test_invert_two_term_roundtrip():
    x = term(PROF, 1, b=1, q=1) + term(PROF, 1, q=2)
    inv = invert_one_minus(x)
    assert (TruncatedSeries.one(PROF) - x) * inv == TruncatedSeries.one(PROF)


def test_invert_rejects_constant_term():
    with pytest.raises(NonNilpotentError):
        invert_one_minus(TruncatedSeries.one(PROF))


# --------------------------------------------------------------- pochhammer


def test_pochhammer_finite_single_factor():
    got = pochhammer_finite(-1, Monomial(e_a=1, e_b=1), 2, 1, 1, PROF)
    assert got == TruncatedSeries.one(PROF) + term(PROF, 1, a=1, b=1, q=2)


def test_pochhammer_finite_empty_product():
    assert pochhammer_finite(-1, Monomial(e_a=1), 5, 1, 0, PROF) == TruncatedSeries.one(PROF)


def test_pochhammer_finite_two_factors():
    got = pochhammer_finite(1, Monomial(e_b=1), 1, 1, 2, PROF)
    want = (
        TruncatedSeries.one(PROF)
        - term(PROF, 1, b=1, q=1)
        - term(PROF, 1, b=1, q=2)
        + term(PROF, 1, b=2, q=3)
    )
    assert got == want


def test_pochhammer_finite_negative_exponent():
    with pytest.raises(NegativeExponentError):
        pochhammer_finite(1, MONO_ONE, -2, 1, 1, PROF)


def test_pochhammer_infinite_euler_product():
    prof = TruncationProfile(0, 0, 0, 5)
    got = pochhammer_infinite(1, MONO_ONE, 1, 1, prof)
    # oracle: multiply the factors densely, independent of the engine
    want = [1]
    for k in range(1, 6):
        factor = [0] * (k + 1)
        factor[0], factor[k] = 1, -1
        want = dense_mul(want, factor, 5)
    assert dense_from_series(got, 5) == want == [1, -1, -1, 0, 0, 1]


def test_pochhammer_infinite_cap_zero():
    prof = TruncationProfile(0, 0, 0, 0)
    assert pochhammer_infinite(1, MONO_ONE, 1, 1, prof) == TruncatedSeries.one(prof)


def test_pochhammer_infinite_linear_t_terms():
    prof = TruncationProfile(0, 0, 1, 3)
    got = pochhammer_infinite(1, Monomial(e_t=1), 1, 1, prof)
    want = (
        TruncatedSeries.one(prof)
        - term(prof, 1, t=1, q=1)
        - term(prof, 1, t=1, q=2)
        - term(prof, 1, t=1, q=3)
    )
    assert got == want


def test_pochhammer_infinite_rejects_stationary_formal_base():
    with pytest.raises(NonNilpotentError):
        pochhammer_infinite(1, Monomial(e_b=1), 0, 1, PROF)


# ------------------------------------------------------------- substitutions


def test_substitute_square():
    s = TruncatedSeries.one(PROF) + term(PROF, 1, q=1)
    assert substitute_q_power(s, 2) == TruncatedSeries.one(PROF) + term(PROF, 1, q=2)


def test_substitute_drops_over_cap():
    prof = TruncationProfile(0, 0, 0, 5)
    assert substitute_q_power(term(prof, 1, q=3), 3).is_zero()


def test_substitute_validity_formula():
    s = TruncatedSeries(PROF, {MONO_ONE: 1}, valid_to_q=3)
    assert substitute_q_power(s, 2).valid_to_q == min(PROF.cap_q, 7)


def test_shift_a_simple():
    assert shift_a_by_q(term(PROF, 1, a=1, b=1, q=2), -1) == term(PROF, 1, a=1, b=1, q=1)


def test_shift_a_negative_exponent_error():
    s = term(PROF, 1, a=2, q=1)
    with pytest.raises(NegativeExponentError):
        shift_a_by_q(s, -1)


def test_shift_a_validity_penalty():
    s = term(PROF, 1, a=1, q=4)
    assert shift_a_by_q(s, -1).valid_to_q == PROF.cap_q - PROF.cap_a
    assert shift_a_by_q(s, 1).valid_to_q == PROF.cap_q


def test_swap_examples():
    s = term(PROF, 1, b=1, t=2)
    assert swap_b_t(s) == term(PROF, 1, b=2, t=1)
    sym = term(PROF, 1, b=1, t=1) + TruncatedSeries.one(PROF)
    assert swap_b_t(sym) == sym


def test_swap_requires_symmetric_caps():
    prof = TruncationProfile(1, 2, 3, 4)
    with pytest.raises(ProfileMismatchError):
        swap_b_t(TruncatedSeries.one(prof))


# -------------------------------------------------------------- coefficients


def test_coefficient_reads_and_zero():
    s = term(PROF, Fraction(3, 2), a=1, q=2)
    assert coefficient(s, Monomial(1, 0, 0, 2)) == Fraction(3, 2)
    assert coefficient(TruncatedSeries.zero(PROF), Monomial(1, 1, 1, 1)) == 0


def test_coefficient_outside_caps():
    with pytest.raises(ValidityError):
        coefficient(TruncatedSeries.one(PROF), Monomial(0, 0, 0, PROF.cap_q + 1))


def test_coefficient_outside_validity():
    s = TruncatedSeries(PROF, {MONO_ONE: 1}, valid_to_q=2)
    with pytest.raises(ValidityError):
        coefficient(s, Monomial(0, 0, 0, 3))


def test_compare_series_reports_in_canonical_order():
    x = term(PROF, 1, q=1) + term(PROF, 1, a=1)
    y = term(PROF, 2, q=1) + term(PROF, 1, a=1) + term(PROF, 1, b=1)
    rows = compare_series(x, y)
    assert [r[0] for r in rows] == [Monomial(0, 1, 0, 0), Monomial(0, 0, 0, 1)]


# ---------------------------------------------------------------- properties

SMALL = TruncationProfile(2, 2, 2, 4)


@st.composite
def small_series(draw):
    n = draw(st.integers(0, 5))
    terms = {}
    for _ in range(n):
        m = Monomial(
            draw(st.integers(0, SMALL.cap_a)),
            draw(st.integers(0, SMALL.cap_b)),
            draw(st.integers(0, SMALL.cap_t)),
            draw(st.integers(0, SMALL.cap_q)),
        )
        c = Fraction(draw(st.integers(-4, 4)), draw(st.integers(1, 3)))
        if c:
            terms[m] = c
    return TruncatedSeries(SMALL, terms)


@given(small_series(), small_series(), small_series())
@settings(max_examples=60, deadline=None)
def test_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z


@given(small_series())
@settings(max_examples=40, deadline=None)
def test_invert_roundtrip_property(x):
    x = x - TruncatedSeries.constant(SMALL, x.constant_term)
    inv = invert_one_minus(x)
    assert (TruncatedSeries.one(SMALL) - x) * inv == TruncatedSeries.one(SMALL)


@given(
    st.integers(0, 3),
    st.integers(0, 3),
    st.integers(0, 3),
    st.integers(1, 2),
)
@settings(max_examples=40, deadline=None)
def test_pochhammer_splice(n1, n2, offset, step):
    base = Monomial(e_b=1)
    whole = pochhammer_finite(1, base, offset, step, n1 + n2, SMALL)
    first = pochhammer_finite(1, base, offset, step, n1, SMALL)
    second = pochhammer_finite(1, base, offset + n1 * step, step, n2, SMALL)
    assert whole == first * second


@given(small_series(), small_series(), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_substitute_is_multiplicative(x, y, k):
    lhs = substitute_q_power(x * y, k)
    rhs = substitute_q_power(x, k) * substitute_q_power(y, k)
    assert lhs == rhs
    assert lhs.valid_to_q == rhs.valid_to_q


@given(small_series(), small_series())
@settings(max_examples=40, deadline=None)
def test_swap_is_ring_homomorphism_and_involution(x, y):
    assert swap_b_t(x * y) == swap_b_t(x) * swap_b_t(y)
    assert swap_b_t(x + y) == swap_b_t(x) + swap_b_t(y)
    assert swap_b_t(swap_b_t(x)) == x
