from .exceptions import (
    InadmissibleDeformation,
    BadMaterialParameters,
)
from .parameters import (
    lame_parameters,
    NeoHookeanParams,
    LinearElasticParams,
    ThermalParams,
    MaterialParams,
    material_from_dict,
)
from .constitutive import (
    check_admissible,
    right_cauchy_green,
    neo_hookean,
    pk2_to_pk1,
    tangent_pk1,
    linear_stress,
    thermal_flux,
    green_lagrange_strain,
    cauchy_stress,
    von_mises,
)
from .laws import (
    TangentOperator,
    DenseTangent,
    NeoHookeanTangent,
    MaterialLaw,
    NeoHookeanLaw,
    LinearElasticLaw,
    create_law,
)


__all__ = (
    "InadmissibleDeformation",
    "BadMaterialParameters",

    "lame_parameters",
    "NeoHookeanParams",
    "LinearElasticParams",
    "ThermalParams",
    "MaterialParams",
    "material_from_dict",

    "check_admissible",
    "right_cauchy_green",
    "neo_hookean",
    "pk2_to_pk1",
    "tangent_pk1",
    "linear_stress",
    "thermal_flux",
    "green_lagrange_strain",
    "cauchy_stress",
    "von_mises",

    "TangentOperator",
    "DenseTangent",
    "NeoHookeanTangent",
    "MaterialLaw",
    "NeoHookeanLaw",
    "LinearElasticLaw",
    "create_law",
)
