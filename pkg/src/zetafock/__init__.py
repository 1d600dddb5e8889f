"""Exact computer algebra for a twisted free-boson realization of the
positive-part differential-operator Lie algebra.

Subpackages cover Bernoulli/zeta arithmetic, cyclotomic scalars, windowed
Laurent series, the abstract Lie algebra, the twisted Fock module with its
quadratic operators, and the twisted vertex-operator field engine with its
verification suites.
"""

from .bernoulli import bernoulli_number, bernoulli_poly, zeta_negative
from .cyclotomic import Cyclotomic, cyclo
from .diffop import (
    DiffOpElement,
    GeneratorIndex,
    bar_central_term,
    bracket,
    cocycle_psi,
    decompose,
    generator,
)
from .fields import (
    OperatorSeries,
    VoaVector,
    assemble_operator,
    correction_series,
    generating_L,
    generators_corollary_check,
    genfun_check,
    genfun_coefficient,
    homogeneous_commutator_check,
    iterate_commutator_check,
    iterate_identity_check,
    iterate_operator,
    jacobi_check,
    k_prefactor_series,
    lbar_bracket_check,
    mwa_iterate,
    prop63_series,
    square_bracket_coeff,
    square_bracket_series,
    twisted_x_series,
    twisted_y_series,
    virasoro_axiom_check,
)
from .fock import (
    FockVector,
    QuadOperator,
    TwistSetup,
    apply_mode,
    apply_operator,
    basis_vectors,
    delta_genfun,
    graded_dimension_check,
    quad_operator,
    rep_check,
    vacuum_correction,
)
from .reports import CheckRecord, Report
from .series import TruncatedSeries, WindowError

__all__ = [
    "CheckRecord",
    "Cyclotomic",
    "DiffOpElement",
    "FockVector",
    "GeneratorIndex",
    "OperatorSeries",
    "QuadOperator",
    "Report",
    "TruncatedSeries",
    "TwistSetup",
    "VoaVector",
    "WindowError",
    "apply_mode",
    "apply_operator",
    "assemble_operator",
    "bar_central_term",
    "basis_vectors",
    "bernoulli_number",
    "bernoulli_poly",
    "bracket",
    "cocycle_psi",
    "correction_series",
    "cyclo",
    "decompose",
    "delta_genfun",
    "generating_L",
    "generator",
    "generators_corollary_check",
    "genfun_check",
    "genfun_coefficient",
    "graded_dimension_check",
    "homogeneous_commutator_check",
    "iterate_commutator_check",
    "iterate_identity_check",
    "iterate_operator",
    "jacobi_check",
    "k_prefactor_series",
    "lbar_bracket_check",
    "mwa_iterate",
    "prop63_series",
    "quad_operator",
    "rep_check",
    "square_bracket_coeff",
    "square_bracket_series",
    "twisted_x_series",
    "twisted_y_series",
    "vacuum_correction",
    "virasoro_axiom_check",
    "zeta_negative",
]
