from .exceptions import (
    BadShapeSpec,
    NonDividingFactor,
    BadCoarseningFactors,
    DegenerateBarycenters,
    TooFewInterfaceVoxels,
)
from .image import (
    PhaseImage,
    store_image,
    load_image,
)
from .shapes import (
    SHAPE_GENERATORS,
    cell_coordinates,
    minimal_image,
    rotation_matrix,
    generate,
)
from .coarsening import (
    BoxelKind,
    NormalFlag,
    ComboGrid,
    coarsen,
    block_view,
    majority_phases,
    volume_fraction_report,
    store_grid,
    load_grid,
)
from .normals import (
    NormalMethod,
    NormalCentering,
    LaplaceMethod,
    local_positions,
    stencil_weights,
    boxel_barycenter_normal,
    normal_barycenter,
    laplace_weights,
    boxel_second_moment_normal,
    normal_second_moment,
    compute_normals,
    boxel_centers,
    interface_centroids,
    radial_normals,
    colinearity,
)
from .facets import (
    Facet,
    FacetGapReport,
    cut_volume_fraction,
    facet_offset,
    facet_polygon,
    facet_export,
    segment_hausdorff,
    facet_gap,
)


__all__ = (
    "BadShapeSpec",
    "NonDividingFactor",
    "BadCoarseningFactors",
    "DegenerateBarycenters",
    "TooFewInterfaceVoxels",

    "PhaseImage",
    "store_image",
    "load_image",

    "SHAPE_GENERATORS",
    "cell_coordinates",
    "minimal_image",
    "rotation_matrix",
    "generate",

    "BoxelKind",
    "NormalFlag",
    "ComboGrid",
    "coarsen",
    "block_view",
    "majority_phases",
    "volume_fraction_report",
    "store_grid",
    "load_grid",

    "NormalMethod",
    "NormalCentering",
    "LaplaceMethod",
    "local_positions",
    "stencil_weights",
    "boxel_barycenter_normal",
    "normal_barycenter",
    "laplace_weights",
    "boxel_second_moment_normal",
    "normal_second_moment",
    "compute_normals",
    "boxel_centers",
    "interface_centroids",
    "radial_normals",
    "colinearity",

    "Facet",
    "FacetGapReport",
    "cut_volume_fraction",
    "facet_offset",
    "facet_polygon",
    "facet_export",
    "segment_hausdorff",
    "facet_gap",
)
