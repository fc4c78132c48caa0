"""Generalized quadrangles and small maximal partial ovoids."""

from .classical import (
    build,
    elliptic_q3_section,
    elliptic_q5,
    hermitian_h,
    parabolic_q4,
    symplectic_w,
)
from .geometry import (
    Quadrangle,
    check_perp_identities,
    dualize,
    from_lines,
    locally_sparse,
    verify_axioms,
)
from .gf import Field, make_field
from .ovoid import (
    PartialOvoid,
    RunParams,
    RunResult,
    compute_p,
    counting_lower_bound,
    diagnostics_properties,
    first_round,
    greedy_complete,
    greedy_random,
    is_maximal,
    is_partial_ovoid,
    second_round,
    two_round,
)

__version__ = "0.1.0"
