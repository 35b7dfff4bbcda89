"""Truncated Taylor calculus for ladder operators on entire functions.

Core objects: total-degree-truncated series with exactness tracking
(:mod:`entireops.series`), a normal-ordered operator algebra with
convolution symbols and the one-axis family ``M_F - a z_j``
(:mod:`entireops.operators`), joint-kernel solvers
(:mod:`entireops.kernel`), completeness rank tests
(:mod:`entireops.completeness`), the exact ladder calculus with semi-norm
convergence diagnostics (:mod:`entireops.fhc`), and finite-horizon orbit
statistics (:mod:`entireops.orbit`).  The ``entireops`` CLI runs bundled or
user-supplied scenario files over all of it.
"""

from .series import (
    ApproximationWarning,
    Bounds,
    Index,
    SemiNormSpec,
    TruncatedSeries,
    coefficient_vector,
    differentiate,
    evaluate,
    graded_key,
    index_binomial,
    index_factorial,
    index_order,
    linear_combine,
    make_series,
    monomial,
    monomial_basis,
    multiply_coordinate,
    seminorm_bound,
    translate,
    with_cutoff,
    zero_series,
)
from .operators import (
    CommutationReport,
    ConvolutionSymbol,
    CROperator,
    WeylOperator,
    apply_convolution,
    apply_cr_operator,
    apply_weyl,
    characteristic_roundtrip,
    commutator,
    dual_pairing,
    verify_commutation,
)
from .kernel import (
    AxisKernelProblem,
    KernelReport,
    joint_kernel,
    solve_kernel_axis,
    verify_kernel,
)
from .completeness import (
    ApproximationResult,
    CompletenessReport,
    SpanMatrix,
    approximate_target,
    derivative_span,
    rank_report,
    sample_box,
    translate_span,
)
from .fhc import (
    ConvergenceReport,
    LadderVector,
    apply_lowering,
    apply_raising,
    convergence_report,
    nilpotency_index,
    operator_power_on_basis,
    raising_power_scalar,
    realize,
    verify_right_inverse,
)
from .orbit import OrbitRecord, iterate_orbit, measure_visits, visit_density

__version__ = "0.1.0"
