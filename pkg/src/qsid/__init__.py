"""qsid: exact q-series identity verification and partition bijection auditing.

The package has four layers:

- ``series``: exact truncated power series in a, b, t, q over the
  rationals, with q-shifted-factorial constructors and substitutions.
- ``identities``: builders for both sides of every cataloged identity and
  the checkers that compare them coefficient by coefficient.
- ``partitions`` / ``bijections``: brute-force partition enumeration (the
  independent oracle) plus the subtract-and-mark map and 2-modular
  conjugation with an exhaustive finite-box audit.
- ``cli``: the ``qsid`` command with machine-readable reports.
"""

__version__ = "0.1.0"

from .series import (  # noqa: F401
    Monomial,
    NegativeExponentError,
    NonNilpotentError,
    ProfileMismatchError,
    SeriesError,
    TruncatedSeries,
    TruncationProfile,
    ValidityError,
    coefficient,
    compare_series,
    invert_one_minus,
    pochhammer_finite,
    pochhammer_infinite,
    q_only_profile,
    series_add,
    series_mul,
    shift_a_by_q,
    substitute_q_power,
    swap_b_t,
    unit_monomial,
)
from .rational import (  # noqa: F401
    DegenerateParameterError,
    Factor,
    RationalAssignment,
    pochhammer_factors,
    product_series,
    sum_with_geometric_tail,
)
from .identities import (  # noqa: F401
    CASES,
    IdentityCase,
    Mismatch,
    VerificationReport,
    build_eq31_side,
    build_f_series,
    build_thm11_side,
    build_thm31_side,
    rational_series_eval,
    run_case,
    verify_chain,
    verify_eq22,
    verify_eq23,
    verify_eq31,
    verify_f_sym_rational,
    verify_qps,
    verify_thm11,
    verify_thm31,
)
from .partitions import (  # noqa: F401
    ConstraintSet,
    GeneratingPolynomial,
    Partition,
    UnboundedConstraintError,
    enumerate_partitions,
    generating_polynomial,
    is_odd_distinct,
    series_vs_enumeration_check,
)
from .bijections import (  # noqa: F401
    AuditReport,
    BijectionBox,
    BijectionError,
    audit_bijection,
    gamma,
    gamma_inverse,
    ordinary_conjugate,
    sigma_gamma,
    two_modular_conjugate,
)
