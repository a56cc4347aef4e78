from .exceptions import (
    SolverNoConvergence,
    CGBreakdown,
    LoadPathFailed,
    IncompatibleSolverConfig,
)
from .config import (
    Scheme,
    GreenKind,
    MaterialEvaluation,
    SolverConfig,
)
from .grid import (
    SimGrid,
    field_mean,
    field_norm,
    pin_mean,
)
from .green import (
    difference_symbols,
    gradient_symbols,
    GreenOperator,
    green_continuous,
    green_rotated,
    green_staggered,
)
from .staggered import (
    forward_difference,
    backward_difference,
    staggered_gradient,
    staggered_divergence,
    StaggeredOperators,
    staggered_operators,
)
from .reference import (
    ReferenceMedium,
    reference_medium,
)
from .material_map import (
    EvaluationStats,
    CellTangent,
    MaterialMap,
)
from .dfmg import (
    subcell_offsets,
    assemble_subcell,
    scatter_subcell,
    DfmgTangent,
    dfmg_evaluate,
    dfmg_stress,
)
from .schemes import (
    StepReport,
    ConvergenceReport,
    equilibrium_residual,
    CellSolver,
    basic_scheme,
    newton_cg,
)
from .loading import (
    RECOVERABLE_ERRORS,
    load_path,
    load_stepping,
    rotated_loading,
    rotate_stress,
)


__all__ = (
    "SolverNoConvergence",
    "CGBreakdown",
    "LoadPathFailed",
    "IncompatibleSolverConfig",

    "Scheme",
    "GreenKind",
    "MaterialEvaluation",
    "SolverConfig",

    "SimGrid",
    "field_mean",
    "field_norm",
    "pin_mean",

    "difference_symbols",
    "gradient_symbols",
    "GreenOperator",
    "green_continuous",
    "green_rotated",
    "green_staggered",

    "forward_difference",
    "backward_difference",
    "staggered_gradient",
    "staggered_divergence",
    "StaggeredOperators",
    "staggered_operators",

    "ReferenceMedium",
    "reference_medium",

    "EvaluationStats",
    "CellTangent",
    "MaterialMap",

    "subcell_offsets",
    "assemble_subcell",
    "scatter_subcell",
    "DfmgTangent",
    "dfmg_evaluate",
    "dfmg_stress",

    "StepReport",
    "ConvergenceReport",
    "equilibrium_residual",
    "CellSolver",
    "basic_scheme",
    "newton_cg",

    "RECOVERABLE_ERRORS",
    "load_path",
    "load_stepping",
    "rotated_loading",
    "rotate_stress",
)
