from .exceptions import (
    BadLambda,
    NoConvergence,
    InadmissibleMacroState,
)
from .structures import (
    ComboMeta,
    JumpVectorState,
    LaminateResult,
    LaminateBatch,
)
from .mixing import (
    mix_voigt,
    mix_reuss,
    mix_hill,
    laminate_projector,
    milton_laminate,
)
from .small_strain import (
    symmetric_jump_matrix,
    small_strain_jump,
    phase_strains,
    small_strain_stiffness,
)
from .finite_strain import (
    LaminateTolerance,
    LaminateSolver,
    jump_matrix,
    phase_gradients,
    traction_residual,
    jump_hessian,
    effective_tangent,
    admissibility_bounds,
    back_project,
    finite_strain_solve,
)
from .thermal import (
    thermal_jump,
    thermal_phase_gradients,
)


__all__ = (
    "BadLambda",
    "NoConvergence",
    "InadmissibleMacroState",

    "ComboMeta",
    "JumpVectorState",
    "LaminateResult",
    "LaminateBatch",

    "mix_voigt",
    "mix_reuss",
    "mix_hill",
    "laminate_projector",
    "milton_laminate",

    "symmetric_jump_matrix",
    "small_strain_jump",
    "phase_strains",
    "small_strain_stiffness",

    "LaminateTolerance",
    "LaminateSolver",
    "jump_matrix",
    "phase_gradients",
    "traction_residual",
    "jump_hessian",
    "effective_tangent",
    "admissibility_bounds",
    "back_project",
    "finite_strain_solve",

    "thermal_jump",
    "thermal_phase_gradients",
)
