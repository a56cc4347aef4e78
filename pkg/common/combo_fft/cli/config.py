"""Run configuration of the batch pipeline.

A run is described by one JSON object. Missing keys take defaults, unknown
keys are rejected. Command line options patch the loaded data before
validation:

    --override solver.scheme=basic --override dims=[32,32,32]

Values of overrides are parsed as JSON and fall back to plain strings.
"""
import os
import copy
import enum
import json
from typing import Any, Dict, List, Optional, Sequence

import attr
import numpy as np

from combo_fft.exceptions import ComboError
from combo_fft.materials import MaterialLaw, create_law, material_from_dict
from combo_fft.laminate import LaminateTolerance
from combo_fft.imaging import NormalMethod, NormalCentering, LaplaceMethod
from combo_fft.solver import SolverConfig
from combo_fft.postprocess import PushForward

from .exceptions import ArgValueError, ConfigInvalid

DEFAULT_F_BAR = (
    (1.0, 0.5, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
)
DEFAULT_MATERIALS = {
    "plus": {"model": "neo_hookean", "E": 10.0, "nu": 0.3},
    "minus": {"model": "neo_hookean", "E": 1.0, "nu": 0.0},
}
SLICE_FIELDS = tuple(
    name + suffix
    for suffix in ("", "_plus", "_minus")
    for name in ("F", "P", "E", "sigma", "von_mises")
)
ORACLE_TYPES = ("sphere", "plane")
BENCH_VARIANTS = ("reference", "second_moment", "barycenter", "majority")


def _enum_converter(enum_class):
    def _convert(value):
        if isinstance(value, enum_class):
            return value
        try:
            return enum_class(value)
        except ValueError:
            expected = ", ".join(item.value for item in enum_class)
            raise ValueError(
                f"unknown {enum_class.__name__} '{value}',"
                f" expected one of: {expected}"
            )
    return _convert


def _int_triple(value):
    if isinstance(value, int):
        value = (value, value, value)
    result = tuple(int(item) for item in value)
    if len(result) != 3:
        raise ValueError(f"expected 3 values, got {list(value)}")
    return result


def _float_triple(value):
    result = tuple(float(item) for item in value)
    if len(result) != 3:
        raise ValueError(f"expected 3 values, got {list(value)}")
    return result


def _matrix(value):
    rows = tuple(tuple(float(item) for item in row) for row in value)
    if len(rows) != 3 or any(len(row) != 3 for row in rows):
        raise ValueError(f"expected 3x3 matrix, got {value}")
    return rows


def _positive_items(instance, attribute, value):
    if min(value) <= 0:
        raise ConfigInvalid(
            attribute.name, f"values must be positive, got {list(value)}"
        )


def _positive(instance, attribute, value):
    if value <= 0:
        raise ConfigInvalid(attribute.name, f"must be positive, got {value}")


def _to_data(value):
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {key: _to_data(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_data(item) for item in value]
    return value


def _build(cls, data, prefix):
    """Create attrs record from config data with prefixed error keys."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigInvalid(prefix, f"expected an object, got {data!r}")
    known = {field.name for field in attr.fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigInvalid(f"{prefix}.{key}", "unknown key")
    try:
        return cls(**data)
    except ConfigInvalid as exc:
        raise ConfigInvalid(f"{prefix}.{exc.key}", exc.reason)
    except (ComboError, TypeError, ValueError) as exc:
        raise ConfigInvalid(prefix, str(exc))


def _validate_oracle(instance, attribute, value):
    if value is None:
        return
    if value.get("type") not in ORACLE_TYPES:
        raise ConfigInvalid(
            "oracle.type",
            f"expected one of {', '.join(ORACLE_TYPES)},"
            f" got {value.get('type')!r}"
        )
    if value["type"] == "plane" and "normal" not in value:
        raise ConfigInvalid("oracle.normal", "plane oracle needs a normal")


@attr.s(frozen=True)
class NormalSettings(object):
    """Interface normal identification.

    'oracle' optionally names analytic normals to compare against,
    {"type": "sphere", "center": [...]} or {"type": "plane", "normal": [...]}.
    """

    method = attr.ib(
        default=NormalMethod.SECOND_MOMENT,
        converter=_enum_converter(NormalMethod),
    )
    centering = attr.ib(
        default=NormalCentering.CENTROID,
        converter=_enum_converter(NormalCentering),
    )
    laplace = attr.ib(
        default=LaplaceMethod.DIRECT,
        converter=_enum_converter(LaplaceMethod),
    )
    oracle = attr.ib(default=None, validator=_validate_oracle)


def _validate_determinant(instance, attribute, value):
    determinant = float(np.linalg.det(np.asarray(value)))
    if not determinant > 0.0:
        raise ConfigInvalid(
            attribute.name,
            f"determinant must be positive, got {determinant:.6g}"
        )


def _validate_rotation(instance, attribute, value):
    if value is None:
        return
    for key in ("axis", "angle"):
        if key not in value:
            raise ConfigInvalid(f"rotation.{key}", "missing key")


@attr.s(frozen=True)
class LoadingSettings(object):
    """Macroscopic loading.

    Args:
        F_bar (Tuple[Tuple[float]]): Target macroscopic gradient.
        rotation (Optional[Dict[str, Any]]): Rotate the load case by
            'angle' degrees about 'axis'.
    """

    F_bar = attr.ib(
        default=DEFAULT_F_BAR, converter=_matrix,
        validator=_validate_determinant,
    )
    rotation = attr.ib(default=None, validator=_validate_rotation)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.F_bar, dtype=float)


def _validate_slice_field(instance, attribute, value):
    if value not in SLICE_FIELDS:
        raise ConfigInvalid(
            attribute.name,
            f"unknown field '{value}', expected one of:"
            f" {', '.join(SLICE_FIELDS)}"
        )


@attr.s(frozen=True)
class SliceSpec(object):
    field = attr.ib(validator=_validate_slice_field)
    axis = attr.ib(converter=int)
    index = attr.ib(converter=int)


def _slices(value):
    result = []
    for position, item in enumerate(value or ()):
        if isinstance(item, SliceSpec):
            result.append(item)
        else:
            result.append(_build(SliceSpec, item, f"slices[{position}]"))
    return tuple(result)


@attr.s(frozen=True)
class PostSettings(object):
    push_forward = attr.ib(
        default=PushForward.MIDPOINT,
        converter=_enum_converter(PushForward),
    )
    slices = attr.ib(default=(), converter=_slices)
    cell_table = attr.ib(default=True, converter=bool)


def _positive_factor_triples(instance, attribute, value):
    for factors in value:
        _positive_items(instance, attribute, factors)


def _validate_variants(instance, attribute, value):
    for variant in value:
        if variant not in BENCH_VARIANTS:
            raise ConfigInvalid(
                attribute.name,
                f"unknown variant '{variant}', expected one of:"
                f" {', '.join(BENCH_VARIANTS)}"
            )


@attr.s(frozen=True)
class BenchSettings(object):
    """Benchmark suite of 'combo bench'.

    Args:
        suite (str): Suite name, e.g. 'sphere-desk'.
        fine (int): Voxels per edge of the reference image.
        factors (Tuple[Tuple[int, int, int]]): Coarsening factors of the
            ComBo runs, a single int coarsens all axes alike.
        variants (Tuple[str]): Runs per factor.
    """

    suite = attr.ib(default="sphere-desk")
    fine = attr.ib(default=64, converter=int, validator=_positive)
    factors = attr.ib(
        default=((8, 8, 8), (4, 4, 4)),
        converter=lambda value: tuple(_int_triple(item) for item in value),
        validator=_positive_factor_triples,
    )
    variants = attr.ib(
        default=("second_moment", "barycenter", "majority"),
        converter=tuple,
        validator=_validate_variants,
    )


def _validate_materials(instance, attribute, value):
    for phase in ("plus", "minus"):
        if phase not in value:
            raise ConfigInvalid(f"materials.{phase}", "missing phase")
    for phase in value:
        if phase not in ("plus", "minus"):
            raise ConfigInvalid(f"materials.{phase}", "unknown key")
        try:
            create_law(material_from_dict(value[phase]))
        except ComboError as exc:
            raise ConfigInvalid(f"materials.{phase}", str(exc))


def _solver_config(value):
    if isinstance(value, SolverConfig):
        return value
    try:
        return SolverConfig.from_dict(value or {})
    except ComboError as exc:
        raise ConfigInvalid("solver", str(exc))


def _laminate_tolerance(value):
    if isinstance(value, LaminateTolerance):
        return value
    return _build(LaminateTolerance, value, "laminate")


def _section(cls, name):
    def _convert(value):
        if isinstance(value, cls):
            return value
        return _build(cls, value, name)
    return _convert


def _validate_input(instance, attribute, value):
    if instance.geometry is None and instance.image is None:
        raise ConfigInvalid("geometry", "either geometry or image is needed")


@attr.s(frozen=True)
class RunConfig(object):
    """Configuration of a pipeline run.

    Args:
        geometry (Optional[Dict[str, Any]]): Analytic shape of 'generate'.
        image (Optional[str]): Existing phase image used instead.
        dims (Tuple[int, int, int]): Voxels of the generated image.
        lengths (Tuple[float, float, float]): Cell edge lengths.
        factors (Tuple[int, int, int]): Coarsening factors.
        normals (NormalSettings): Normal identification.
        materials (Dict[str, Dict[str, Any]]): Laws of phase 'plus' and
            'minus'.
        loading (LoadingSettings): Macroscopic loading.
        solver (SolverConfig): Solver options.
        laminate (LaminateTolerance): Laminate kernel options.
        post (PostSettings): Exports of 'post'.
        bench (BenchSettings): Suite of 'bench'.
        out (str): Output directory.
        seed (int): Seed of random geometries.
        threads (int): Threads of the transforms.
        store_field (bool): Dump the deformation gradient field.
    """

    geometry = attr.ib(factory=lambda: {"shape": "sphere", "radius": 0.4})
    image = attr.ib(default=None, validator=_validate_input)
    dims = attr.ib(
        default=(64, 64, 64), converter=_int_triple,
        validator=_positive_items,
    )
    lengths = attr.ib(
        default=(1.0, 1.0, 1.0), converter=_float_triple,
        validator=_positive_items,
    )
    factors = attr.ib(
        default=(8, 8, 8), converter=_int_triple,
        validator=_positive_items,
    )
    normals = attr.ib(
        factory=NormalSettings, converter=_section(NormalSettings, "normals")
    )
    materials = attr.ib(
        factory=lambda: copy.deepcopy(DEFAULT_MATERIALS),
        validator=_validate_materials,
    )
    loading = attr.ib(
        factory=LoadingSettings,
        converter=_section(LoadingSettings, "loading"),
    )
    solver = attr.ib(factory=SolverConfig, converter=_solver_config)
    laminate = attr.ib(
        factory=LaminateTolerance, converter=_laminate_tolerance
    )
    post = attr.ib(
        factory=PostSettings, converter=_section(PostSettings, "post")
    )
    bench = attr.ib(
        factory=BenchSettings, converter=_section(BenchSettings, "bench")
    )
    out = attr.ib(default="combo_out", converter=str)
    seed = attr.ib(default=0, converter=int)
    threads = attr.ib(default=1, converter=int, validator=_positive)
    store_field = attr.ib(default=True, converter=bool)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Validated configuration.

        Raises:
            ConfigInvalid: Unknown key or invalid value.
        """
        if not isinstance(data, dict):
            raise ConfigInvalid("<root>", "configuration must be an object")
        known = {field.name for field in attr.fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigInvalid(key, "unknown key")
        try:
            return cls(**data)
        except ConfigInvalid:
            raise
        except (ComboError, TypeError, ValueError) as exc:
            raise ConfigInvalid("<root>", str(exc))

    def to_dict(self) -> Dict[str, Any]:
        """Effective configuration, loadable with 'from_dict'."""
        data = {}
        for field in attr.fields(RunConfig):
            value = getattr(self, field.name)
            if isinstance(value, SolverConfig):
                value = value.to_dict()
            elif attr.has(type(value)):
                value = attr.asdict(value, recurse=True)
            data[field.name] = _to_data(value)
        return data

    def laws(self) -> Dict[str, MaterialLaw]:
        return {
            phase: create_law(material_from_dict(self.materials[phase]))
            for phase in ("plus", "minus")
        }

    def solver_config(self) -> SolverConfig:
        """Solver options with the configured thread count."""
        return attr.evolve(self.solver, workers=self.threads)

    def geometry_spec(self) -> Dict[str, Any]:
        """Geometry with the run seed filled in for random shapes."""
        spec = dict(self.geometry or {})
        if spec.get("shape") == "fiber_pack":
            spec.setdefault("seed", self.seed)
        return spec

    def path(self, *parts) -> str:
        return os.path.join(self.out, *parts)


def parse_override(text: str):
    """Split 'KEY=VALUE' into the key path and decoded value.

    Raises:
        ArgValueError: Text has no '=' or an empty key.
    """
    key, separator, raw_value = text.partition("=")
    key = key.strip()
    if not separator or not key:
        raise ArgValueError(
            f"Expected KEY=VALUE, got '{text}'", "'--override'"
        )
    try:
        value = json.loads(raw_value)
    except ValueError:
        value = raw_value
    return key.split("."), value


def apply_overrides(
    data: Dict[str, Any], overrides: Sequence[str]
) -> Dict[str, Any]:
    """Copy of config data with dotted overrides applied."""
    data = copy.deepcopy(data)
    for text in overrides:
        path, value = parse_override(text)
        target = data
        for position, key in enumerate(path[:-1]):
            child = target.get(key)
            if child is None:
                child = {}
                target[key] = child
            if not isinstance(child, dict):
                raise ConfigInvalid(
                    ".".join(path[:position + 1]), "is not an object"
                )
            target = child
        target[path[-1]] = value
    return data


def load_run_config(
    filepath: Optional[str] = None,
    overrides: Sequence[str] = (),
    out: Optional[str] = None,
    threads: Optional[int] = None,
    seed: Optional[int] = None,
) -> RunConfig:
    """Configuration from JSON file patched by command line options.

    Raises:
        ConfigInvalid: File is unreadable or data are invalid.
        ArgValueError: Override has invalid format.
    """
    data: Dict[str, Any] = {}
    if filepath:
        if not os.path.exists(filepath):
            raise ConfigInvalid("--config", f"'{filepath}' does not exist")
        try:
            with open(filepath, "r") as stream:
                data = json.load(stream)
        except ValueError as exc:
            raise ConfigInvalid("--config", f"invalid JSON ({exc})")

    data = apply_overrides(data, overrides)
    options: List = [("out", out), ("threads", threads), ("seed", seed)]
    for key, value in options:
        if value is not None:
            data[key] = value
    return RunConfig.from_dict(data)


def store_run_config(config: RunConfig, filepath: str):
    os.makedirs(os.path.dirname(os.path.abspath(filepath)), exist_ok=True)
    with open(filepath, "w") as stream:
        json.dump(config.to_dict(), stream, indent=4, sort_keys=True)
