"""carrollkit: geometric mechanics of Carroll particles.

The package covers the Carroll group in 3+1 and 2+1 dimensions and the
doubly centrally extended planar Carroll group, the coadjoint machinery
and Casimir invariants of their duals, the presymplectic dynamics of the
free, electromagnetic and gravitational particle models, and the free
quantum equation with its group representations.
"""

from .backend import BACKEND_NAME, COMPILED
from .coadjoint import (
    CasimirSet,
    Moment,
    adjoint,
    casimirs,
    coadjoint,
    coadjoint_dual,
    moment_map,
    pair,
)
from .dynamics import (
    EomResult,
    Trajectory,
    conserved_drift,
    effective_mass_sq,
    eom,
    eom_from_kernel,
    integrate,
    kernel_basis,
    presymplectic_matrix,
    spin_chart,
)
from .lie_core import (
    AlgebraElement,
    GroupElement,
    Kind,
    KindMismatchError,
    MatrixPatternError,
    act_event,
    bracket,
    compose,
    group_exp,
    inverse,
    to_matrix,
    to_matrix_group,
)
from .scenarios import (
    EvolutionPoint,
    Scenario,
    Tag,
    em2d_ext,
    em3d_spin,
    em3d_spinless,
    free2d_ext,
    free3d,
    free_spin3d,
    photon2d,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "BACKEND_NAME",
    "COMPILED",
    "CasimirSet",
    "EomResult",
    "EvolutionPoint",
    "GroupElement",
    "Kind",
    "KindMismatchError",
    "MatrixPatternError",
    "Moment",
    "Scenario",
    "Tag",
    "Trajectory",
    "act_event",
    "adjoint",
    "bracket",
    "casimirs",
    "coadjoint",
    "coadjoint_dual",
    "compose",
    "conserved_drift",
    "effective_mass_sq",
    "em2d_ext",
    "em3d_spin",
    "em3d_spinless",
    "eom",
    "eom_from_kernel",
    "free2d_ext",
    "free3d",
    "free_spin3d",
    "group_exp",
    "integrate",
    "inverse",
    "kernel_basis",
    "moment_map",
    "pair",
    "photon2d",
    "presymplectic_matrix",
    "spin_chart",
    "to_matrix",
    "to_matrix_group",
]
