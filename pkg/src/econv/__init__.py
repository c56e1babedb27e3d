"""Evenly convex analysis toolkit.

Coupling-based conjugation, eps-subdifferentials with their product
structure, eps-directional derivatives, star-differences, and necessary
optimality checkers for difference-of-convex problems on R^n (n <= 2).
"""

from ._kernels import backend_name
from .conjugate import (
    CElementaryMinorant,
    ConjugateOf,
    EvalContext,
    WGridFunction,
    biconjugate,
    c_conjugate,
    c_prime_conjugate,
    dom_fc_member,
    eprime_convexity_check,
    fenchel_conjugate,
)
from .dc import (
    DCProblem,
    ProductWSet,
    check_derivative_lower_bound,
    check_dc_subdiff_inclusion,
    check_eps_necessary,
    check_global_necessary,
    check_derivative_set_identity,
    dc_value,
    eps_directional_derivative,
    is_eps_minimizer,
    star_difference_member,
    conjugate_difference_gap,
)
from .extreal import INF, NEG_INF, TolerancePolicy, add_conj, sub_conj, sub_dc
from .functions import (
    Affine,
    GridFunction,
    Indicator,
    QuadraticRestricted,
    SumFunction,
    XLogXOverY,
    grid_sample,
)
from .grids import GridSpec
from .report import Report, Verdict, exit_code
from .sets import (
    FlaggedConvexSet,
    SupportValue,
    interval_set,
    member,
    normal_cone_member,
    strictly_separates,
    support,
    whole_space,
)
from .spaces import DualTriple, XHalfspace, WHalfspace, coupling_c, coupling_additivity_holds, w_halfspace_member
from .subdiff import (
    CSubdiffDescriptor,
    c_eps_subdiff_member,
    c_subdiff_descriptor,
    check_conjugate_flip,
    check_subdiff_in_domfc,
    check_sum_rule,
    cprime_subdiff_member,
    envelope_reconstruct,
    fenchel_eps_subdiff_member,
    v_cone_member,
)

__version__ = "0.1.0"
