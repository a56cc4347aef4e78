from typing import Any, Dict, Union

import attr
import numpy as np

from combo_fft.tensors import isotropic_mandel

from .exceptions import BadMaterialParameters


def lame_parameters(young: float, poisson: float):
    """Lamé parameters (λ, μ) of Young's modulus and Poisson ratio."""
    lam = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson))
    mu = young / (2.0 * (1.0 + poisson))
    return lam, mu


def _validate_young(instance, attribute, value):
    if not value > 0.0:
        raise BadMaterialParameters(f"E must be positive, got {value}")


def _validate_poisson(instance, attribute, value):
    if not -1.0 < value < 0.5:
        raise BadMaterialParameters(
            f"nu must be in (-1, 0.5), got {value}"
        )


def _as_matrix(shape):
    def _convert(value):
        matrix = np.asarray(value, dtype=float)
        if matrix.shape != shape:
            raise BadMaterialParameters(
                f"Expected matrix of shape {shape}, got {matrix.shape}"
            )
        return matrix
    return _convert


def _validate_spd(instance, attribute, value):
    if not np.allclose(value, value.T, rtol=1e-10, atol=1e-12):
        raise BadMaterialParameters(f"'{attribute.name}' is not symmetric")
    if np.min(np.linalg.eigvalsh(0.5 * (value + value.T))) <= 0.0:
        raise BadMaterialParameters(
            f"'{attribute.name}' is not positive definite"
        )


@attr.s(frozen=True)
class NeoHookeanParams(object):
    """Compressible Neo-Hookean material.

    Args:
        E (float): Young's modulus.
        nu (float): Poisson ratio.
    """

    E = attr.ib(converter=float, validator=_validate_young)
    nu = attr.ib(converter=float, validator=_validate_poisson)

    @property
    def lam(self):
        return lame_parameters(self.E, self.nu)[0]

    @property
    def mu(self):
        return lame_parameters(self.E, self.nu)[1]

    def to_data(self):
        return {"model": "neo_hookean", "E": self.E, "nu": self.nu}


@attr.s(frozen=True, eq=False)
class LinearElasticParams(object):
    """Linear elastic stiffness in Mandel form."""

    stiffness = attr.ib(converter=_as_matrix((6, 6)), validator=_validate_spd)

    @classmethod
    def isotropic(cls, lam, mu):
        return cls(isotropic_mandel(lam, mu))

    @classmethod
    def from_engineering(cls, young, poisson):
        _validate_young(None, None, young)
        _validate_poisson(None, None, poisson)
        return cls.isotropic(*lame_parameters(young, poisson))

    def to_data(self):
        return {"model": "linear", "stiffness": self.stiffness.tolist()}


@attr.s(frozen=True, eq=False)
class ThermalParams(object):
    """Conductivity tensor of linear heat conduction."""

    kappa = attr.ib(converter=_as_matrix((3, 3)), validator=_validate_spd)

    def to_data(self):
        return {"model": "thermal", "kappa": self.kappa.tolist()}


MaterialParams = Union[NeoHookeanParams, LinearElasticParams, ThermalParams]


def _neo_hookean_from_data(data):
    return NeoHookeanParams(E=data.pop("E"), nu=data.pop("nu"))


def _linear_from_data(data):
    if "stiffness" in data:
        return LinearElasticParams(data.pop("stiffness"))
    if "lambda" in data:
        return LinearElasticParams.isotropic(
            float(data.pop("lambda")), float(data.pop("mu"))
        )
    return LinearElasticParams.from_engineering(
        float(data.pop("E")), float(data.pop("nu"))
    )


def _thermal_from_data(data):
    return ThermalParams(data.pop("kappa"))


_BUILDERS = {
    "neo_hookean": _neo_hookean_from_data,
    "linear": _linear_from_data,
    "thermal": _thermal_from_data,
}


def material_from_dict(data: Dict[str, Any]) -> MaterialParams:
    """Create material parameters from config data.

    Args:
        data (dict[str, Any]): Material definition with 'model' key. Models
            'neo_hookean' (E, nu), 'linear' (E, nu | lambda, mu |
            stiffness) and 'thermal' (kappa) are supported.

    Returns:
        MaterialParams: Parameters object.

    Raises:
        BadMaterialParameters: Unknown model or invalid values.

    """
    data = dict(data)
    model = data.pop("model", None)
    builder = _BUILDERS.get(model)
    if builder is None:
        raise BadMaterialParameters(f"Unknown material model '{model}'")

    try:
        params = builder(data)
    except KeyError as exc:
        raise BadMaterialParameters(
            f"Material '{model}' is missing key {exc}"
        )

    if data:
        raise BadMaterialParameters(
            f"Unknown keys for material '{model}': {sorted(data)}"
        )
    return params
