"""Exact symbolic checks for Courant algebroids, 1-derivations and their compatibility."""

from __future__ import annotations

from .algebroid import PreLieAlgebroidData, ProtoBialgebroidData, check_lie, koszul_eval, prelie_differential, tangent_algebroid
from .bundle import CourantData, NonClosedFormError, check_courant_axioms, courant_bracket, make_double, make_twisted_TM
from .cartan import (
    Bivector,
    EndoTM,
    KForm,
    Multivector,
    SymBilinear,
    exterior_d,
    interior_product,
    levi_civita,
    lie_bracket,
    lie_derivative,
    nijenhuis_torsion,
    schouten_square,
    wedge,
)
from .compat import (
    ConcomitantPair,
    NotLagrangianError,
    bfield_transform,
    bivector_graph,
    bivector_graph_PN,
    check_CN,
    check_dirac,
    check_dual_IM,
    check_H_r_compatible,
    check_IM,
    check_lagrangian,
    cotangent_frame,
    form_graph,
    gauge_equivalent,
    kahler_form,
    lagrangian_invariance,
    tangent_frame,
    tau_matrix,
)
from .deriv import (
    MultiSection,
    NonInvariantError,
    OneDerivation,
    apply_D,
    check_nijenhuis,
    check_self_dual,
    dualize,
    make_lift,
    make_metric_derivation,
    restrict_to_invariant,
)
from .field import Chart, ExpressionError, RatFunc, parse_expr
from .linalg import Matrix
from .report import CheckReport, Entry, Witness
from .split import NonTransverseError, check_manin, extract_proto, induced_bivector, induced_bivector_identity

__version__ = "0.1.0"
