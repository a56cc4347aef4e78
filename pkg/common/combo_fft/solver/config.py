import enum
from typing import Any, Dict

import attr

from .exceptions import IncompatibleSolverConfig


class Scheme(enum.Enum):
    BASIC = "basic"
    NEWTON_CG = "newton_cg"


class GreenKind(enum.Enum):
    CONTINUOUS = "continuous"
    ROTATED = "rotated"
    STAGGERED = "staggered"


class MaterialEvaluation(enum.Enum):
    PER_CELL = "per_cell"
    DFMG = "dfmg"


def _positive(instance, attribute, value):
    if not value > 0:
        raise IncompatibleSolverConfig(
            f"'{attribute.name}' must be positive, got {value}"
        )


def _non_negative(instance, attribute, value):
    if value < 0:
        raise IncompatibleSolverConfig(
            f"'{attribute.name}' must not be negative, got {value}"
        )


def _enum_converter(enum_class):
    def _convert(value):
        try:
            return enum_class(value)
        except ValueError:
            expected = ", ".join(item.value for item in enum_class)
            raise IncompatibleSolverConfig(
                f"unknown {enum_class.__name__} '{value}',"
                f" expected one of: {expected}"
            )
    return _convert


@attr.s(frozen=True)
class SolverConfig(object):
    """Options of the periodic cell solver.

    Args:
        scheme (Scheme): Basic fixed-point scheme or Newton-CG.
        green (GreenKind): Discretization of the Green operator.
        material_evaluation (MaterialEvaluation): Per cell or doubly-fine
            material grid (staggered only).
        tol_equilibrium (float): Tolerance of the equilibrium residual.
        max_outer (int): Maximum outer iterations including the first
            residual evaluation.
        cg_tol (float): Relative tolerance of the Krylov solver.
        cg_max (int): Maximum Krylov iterations.
        load_steps (int): Number of linear load steps.
        max_bisections (int): Load step bisections before giving up.
        line_search_halvings (int): Newton step halvings.
        combo (bool): Use composite boxels, majority phase otherwise.
        workers (int): Threads of the FFT.
        residual_floor (float): Stress floor of the residual normalization
            relative to the reference stiffness.
    """

    scheme = attr.ib(
        default=Scheme.NEWTON_CG, converter=_enum_converter(Scheme)
    )
    green = attr.ib(
        default=GreenKind.ROTATED, converter=_enum_converter(GreenKind)
    )
    material_evaluation = attr.ib(
        default=MaterialEvaluation.PER_CELL,
        converter=_enum_converter(MaterialEvaluation),
    )
    tol_equilibrium = attr.ib(default=1e-8, converter=float,
                              validator=_positive)
    max_outer = attr.ib(default=1000, converter=int, validator=_positive)
    cg_tol = attr.ib(default=1e-8, converter=float, validator=_positive)
    cg_max = attr.ib(default=1000, converter=int, validator=_positive)
    load_steps = attr.ib(default=1, converter=int, validator=_positive)
    max_bisections = attr.ib(default=5, converter=int,
                             validator=_non_negative)
    line_search_halvings = attr.ib(default=4, converter=int,
                                   validator=_non_negative)
    combo = attr.ib(default=True, converter=bool)
    workers = attr.ib(default=1, converter=int, validator=_positive)
    residual_floor = attr.ib(default=1e-12, converter=float,
                             validator=_non_negative)

    def __attrs_post_init__(self):
        if (
            self.material_evaluation is MaterialEvaluation.DFMG
            and self.green is not GreenKind.STAGGERED
        ):
            raise IncompatibleSolverConfig(
                "doubly-fine material grid requires the staggered"
                f" Green operator, got '{self.green.value}'"
            )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverConfig":
        known = {field.name for field in attr.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise IncompatibleSolverConfig(
                f"unknown options {', '.join(sorted(unknown))}"
            )
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        data = attr.asdict(self)
        for key, value in data.items():
            if isinstance(value, enum.Enum):
                data[key] = value.value
        return data
