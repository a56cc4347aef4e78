import numpy as np
import pytest

from combo_fft.exceptions import ArtifactFormatError
from combo_fft.imaging import (
    BadShapeSpec,
    NonDividingFactor,
    BadCoarseningFactors,
    DegenerateBarycenters,
    TooFewInterfaceVoxels,
    PhaseImage,
    store_image,
    load_image,
    generate,
    BoxelKind,
    NormalFlag,
    coarsen,
    majority_phases,
    volume_fraction_report,
    store_grid,
    load_grid,
    NormalCentering,
    LaplaceMethod,
    boxel_barycenter_normal,
    normal_barycenter,
    laplace_weights,
    boxel_second_moment_normal,
    normal_second_moment,
    compute_normals,
    interface_centroids,
    radial_normals,
    colinearity,
    cut_volume_fraction,
    facet_offset,
    facet_polygon,
    facet_export,
    segment_hausdorff,
    facet_gap,
)

PLANE_ANGLE = np.deg2rad(76.0)


@pytest.fixture(scope="module")
def sphere_256():
    yield generate({"shape": "sphere", "radius": 0.4}, (256, 256, 256))


@pytest.fixture
def plane_boxel():
    """Padded 48x18 image with a 16x6 boxel cut by a tilted plane."""
    normal = [np.cos(PLANE_ANGLE), np.sin(PLANE_ANGLE), 0.0]
    image = generate(
        {"shape": "plane", "normal": normal, "point": [24.0, 9.5, 0.5]},
        (48, 18, 1),
        (48.0, 18.0, 1.0),
    )
    grid = coarsen(image, (16, 6, 1))
    position = int(np.flatnonzero(
        np.all(grid.composite_indices == (1, 1, 0), axis=1)
    )[0])
    yield image, grid, position, np.asarray(normal)


@pytest.fixture
def slab():
    """Phase + on 5 <= j < 11 of a 16^3 image."""
    indicator = np.zeros((16, 16, 16), dtype=np.uint8)
    indicator[:, 5:11, :] = 1
    image = PhaseImage(indicator)
    yield image, coarsen(image, (8, 8, 8))


def _normals_by_index(grid, normals):
    return {
        tuple(index): normal
        for index, normal in zip(grid.composite_indices, normals)
    }


def test_sphere_fraction(sphere_256):
    expected = 4.0 / 3.0 * np.pi * 0.4 ** 3
    fraction = sphere_256.volume_fraction
    assert abs(fraction - expected) / expected < 1e-3, (
        f"Sphere fraction {fraction} differs from {expected}"
    )


def test_sphere_composite_count(sphere_256):
    grid = coarsen(sphere_256, (8, 8, 8))
    assert grid.dims == (32, 32, 32)
    assert grid.composite_count == 2624, (
        f"Expected 2624 composite boxels, got {grid.composite_count}"
    )
    assert grid.global_c_plus == sphere_256.volume_fraction, (
        "Coarsening changed the global volume fraction"
    )
    assert int(grid.counts.sum()) == sphere_256.inclusion_count


def test_empty_sphere():
    image = generate({"shape": "sphere", "radius": 0.0}, (9, 9, 9))
    assert image.inclusion_count == 0
    grid = coarsen(image, (3, 3, 3))
    assert np.all(grid.kind == BoxelKind.PURE_MATRIX)
    assert grid.composite_count == 0


def test_other_shapes_fractions():
    octahedron = generate({"shape": "octahedron", "radius": 0.4}, (64,) * 3)
    expected = 4.0 / 3.0 * 0.4 ** 3
    assert abs(octahedron.volume_fraction - expected) / expected < 2e-2

    fiber = generate(
        {"shape": "fiber", "axis": "z", "radius": 0.25}, (64, 64, 8)
    )
    expected = np.pi * 0.25 ** 2
    assert abs(fiber.volume_fraction - expected) / expected < 1e-2
    # infinite fiber is constant along its axis
    assert np.all(fiber.indicator == fiber.indicator[:, :, :1])


def test_cross_ply_fraction(printer):
    image = generate({"shape": "cross_ply"}, (100, 100, 100))
    expected = 2.0 * np.pi * 0.2 ** 2 / 0.5
    printer(f"cross-ply fraction {image.volume_fraction:.6f}")
    assert abs(image.volume_fraction - expected) < 5e-3, (
        f"Cross-ply fraction {image.volume_fraction} differs from {expected}"
    )
    # fibers of the lower ply run along x, of the upper ply along y
    lower = image.indicator[:, :, :50]
    upper = image.indicator[:, :, 50:]
    assert np.all(lower == lower[:1])
    assert np.all(upper == upper[:, :1])

    rotated = generate(
        {"shape": "cross_ply", "rotation_axis": "z", "rotation_angle": 45},
        (100, 100, 100),
    )
    assert abs(rotated.volume_fraction - expected) < 2e-2
    assert not np.array_equal(rotated.indicator, image.indicator)


def test_fiber_pack_deterministic():
    shape = {
        "shape": "fiber_pack",
        "seed": 3,
        "count": 6,
        "radius": 0.05,
        "length": 0.5,
        "orientation_spread": 20.0,
    }
    first = generate(shape, (32, 32, 32))
    second = generate(shape, (32, 32, 32))
    other = generate(dict(shape, seed=4), (32, 32, 32))
    assert np.array_equal(first.indicator, second.indicator)
    assert not np.array_equal(first.indicator, other.indicator)
    assert 0.0 < first.volume_fraction < 0.2


def test_bad_shapes():
    with pytest.raises(BadShapeSpec):
        generate({"shape": "torus"}, (8, 8, 8))
    with pytest.raises(BadShapeSpec):
        generate({"shape": "sphere", "radius": -1.0}, (8, 8, 8))
    with pytest.raises(BadShapeSpec):
        generate({"shape": "sphere", "diameter": 1.0}, (8, 8, 8))
    with pytest.raises(BadShapeSpec):
        generate({"shape": "cross_ply", "spacing": 0.3}, (8, 8, 8))
    with pytest.raises(BadShapeSpec):
        generate({"shape": "sphere", "radius": 0.1}, (8, 0, 8))


def test_image_roundtrip(tmp_path):
    image = generate(
        {"shape": "sphere", "radius": 0.3}, (8, 6, 4), (2.0, 1.5, 1.0)
    )
    filepath = str(tmp_path / "image.json")
    store_image(image, filepath)
    loaded = load_image(filepath)
    assert np.array_equal(loaded.indicator, image.indicator)
    assert loaded.lengths == image.lengths

    with pytest.raises(ArtifactFormatError):
        load_image(str(tmp_path / "missing.json"))
    with pytest.raises(ArtifactFormatError):
        load_grid(filepath)


def test_non_dividing_factor():
    image = PhaseImage(np.zeros((10, 8, 8), dtype=np.uint8))
    with pytest.raises(NonDividingFactor) as excinfo:
        coarsen(image, (4, 4, 4))
    assert excinfo.value.axis == 0


def test_coarsening_factor_count():
    image = PhaseImage(np.zeros((8, 8, 8), dtype=np.uint8))
    with pytest.raises(BadCoarseningFactors) as excinfo:
        coarsen(image, (2, 2))
    assert list(excinfo.value.factors) == [2, 2]
    assert "got [2, 2]" in str(excinfo.value)


def test_coarsen_counts_and_majority():
    indicator = np.zeros((4, 2, 2), dtype=np.uint8)
    indicator[0] = 1
    indicator[2, 0] = 1
    image = PhaseImage(indicator)
    grid = coarsen(image, (2, 2, 2))
    assert grid.counts.ravel().tolist() == [4, 2]
    assert grid.kind.ravel().tolist() == [
        BoxelKind.COMPOSITE, BoxelKind.COMPOSITE
    ]
    assert grid.c_plus.ravel().tolist() == [0.5, 0.25]
    # ties go to phase +
    assert majority_phases(grid).ravel().tolist() == [True, False]

    report = volume_fraction_report(grid)
    assert report["composite_count"] == 2
    assert report["global_c_plus"] == image.volume_fraction
    assert report["min_composite_c_plus"] == 0.25
    assert report["majority_error"] == pytest.approx(0.5 - 0.375)


def test_grid_roundtrip(tmp_path, slab):
    image, grid = slab
    grid = compute_normals(image, grid)
    filepath = str(tmp_path / "grid.json")
    store_grid(grid, filepath)
    loaded = load_grid(filepath)
    assert np.array_equal(loaded.counts, grid.counts)
    assert np.array_equal(loaded.normals, grid.normals)
    assert loaded.factors == grid.factors
    assert loaded.global_c_plus == grid.global_c_plus


def test_axis_aligned_normals(slab):
    image, grid = slab
    expected = {0: np.array([0.0, -1.0, 0.0]), 1: np.array([0.0, 1.0, 0.0])}
    for method_normals in (
        normal_barycenter(image, grid)[0],
        normal_second_moment(image, grid)[0],
        normal_second_moment(
            image, grid, centering=NormalCentering.BOXEL_CENTER
        )[0],
    ):
        for index, normal in zip(grid.composite_indices, method_normals):
            reference = expected[int(index[1])]
            assert normal @ reference >= 1.0 - 1e-10, (
                f"Boxel {tuple(index)} normal {normal} is not {reference}"
            )


def test_plane_boxel_normals(printer, plane_boxel):
    image, grid, position, reference = plane_boxel
    barycenter = normal_barycenter(image, grid)[0][position]
    second_moment = normal_second_moment(image, grid)[0][position]
    bary_colinearity = float(colinearity(barycenter, reference))
    moment_colinearity = float(colinearity(second_moment, reference))
    printer(
        f"colinearity barycenter {bary_colinearity:.6f}"
        f" second moment {moment_colinearity:.6f}"
    )
    assert abs(bary_colinearity - 0.776) < 1e-2
    assert moment_colinearity >= 0.999
    assert moment_colinearity > bary_colinearity
    # in-plane normal for a flat boxel
    assert abs(second_moment[2]) < 1e-12


def test_degenerate_barycenters():
    i, j, k = np.indices((2, 2, 2))
    checkerboard = ((i + j + k) % 2).astype(np.uint8)
    with pytest.raises(DegenerateBarycenters):
        boxel_barycenter_normal(checkerboard, (1.0, 1.0, 1.0))

    image = PhaseImage(checkerboard)
    grid = coarsen(image, (2, 2, 2))
    normals, flags = normal_barycenter(image, grid)
    assert flags[0] & NormalFlag.DEGENERATE
    assert np.linalg.norm(normals[0]) == pytest.approx(1.0)


def test_too_few_interface_voxels():
    weights = np.zeros((4, 4, 4))
    weights[1, 1, 1] = weights[2, 2, 2] = 1.0
    with pytest.raises(TooFewInterfaceVoxels) as excinfo:
        boxel_second_moment_normal(weights, (1.0, 1.0, 1.0))
    assert excinfo.value.count == 2

    indicator = np.zeros((4, 4, 4), dtype=np.uint8)
    indicator[:2] = 1
    image = PhaseImage(indicator)
    grid = coarsen(image, (4, 4, 4))
    normals, flags = normal_second_moment(
        image, grid, weights=np.zeros((4, 4, 4))
    )
    assert flags[0] & NormalFlag.BARYCENTER_FALLBACK
    assert np.allclose(normals[0], [1.0, 0.0, 0.0], atol=1e-12)


def test_laplace_weights_step():
    indicator = np.zeros((8, 1, 1), dtype=np.uint8)
    indicator[4:] = 1
    image = PhaseImage(indicator, (8.0, 2.0, 3.0))
    weights = laplace_weights(image).ravel()
    # axis weight r1 = h2 h3 / h1 = 6
    assert weights.tolist() == [6.0, 0.0, 0.0, 6.0, 6.0, 0.0, 0.0, 6.0]

    uniform = PhaseImage(np.ones((4, 4, 4), dtype=np.uint8))
    assert np.all(laplace_weights(uniform) == 0.0)


def test_laplace_weights_fft_matches_direct():
    image = generate(
        {"shape": "sphere", "radius": 0.3}, (24, 16, 12), (1.0, 0.8, 1.3)
    )
    direct = laplace_weights(image, LaplaceMethod.DIRECT)
    spectral = laplace_weights(image, LaplaceMethod.FFT)
    assert np.max(np.abs(direct - spectral)) < 1e-10
    # interior of a phase has no weight
    assert direct[12, 8, 6] == 0.0
    assert direct[0, 0, 0] == 0.0


def test_mirror_symmetry():
    shape = {"shape": "sphere", "radius": 0.3, "center": [0.375, 0.5625, 0.5]}
    mirrored_shape = dict(shape, center=[0.625, 0.5625, 0.5])
    image = generate(shape, (64, 64, 64))
    mirrored = generate(mirrored_shape, (64, 64, 64))
    assert np.array_equal(mirrored.indicator, image.indicator[::-1])

    grid = coarsen(image, (8, 8, 8))
    mirrored_grid = coarsen(mirrored, (8, 8, 8))
    reflection = np.array([-1.0, 1.0, 1.0])
    for method in ("barycenter", "second_moment"):
        normals = _normals_by_index(
            grid, compute_normals(image, grid, method).normals[
                grid.composite_mask
            ]
        )
        mirrored_normals = _normals_by_index(
            mirrored_grid,
            compute_normals(mirrored, mirrored_grid, method).normals[
                mirrored_grid.composite_mask
            ],
        )
        assert len(normals) == len(mirrored_normals)
        for (i, j, k), normal in normals.items():
            other = mirrored_normals[(grid.dims[0] - 1 - i, j, k)]
            assert np.allclose(other, reflection * normal, atol=1e-10), (
                f"{method} normal of boxel {(i, j, k)} is not mirrored"
            )


def test_sphere_normal_colinearity(printer, sphere_256):
    grid = coarsen(sphere_256, (8, 8, 8))
    positions = interface_centroids(sphere_256, grid)
    reference = radial_normals(grid, positions=positions)
    moment = compute_normals(sphere_256, grid, "second_moment")
    barycenter = compute_normals(sphere_256, grid, "barycenter")
    mask = grid.composite_mask
    moment_mean = float(np.mean(colinearity(moment.normals[mask], reference)))
    bary_mean = float(np.mean(
        colinearity(barycenter.normals[mask], reference)
    ))
    printer(
        f"mean colinearity second moment {moment_mean:.5f}"
        f" barycenter {bary_mean:.5f}"
    )
    assert moment_mean >= 0.995
    assert moment_mean > bary_mean


def test_interface_centroids_inside_boxels(sphere_256):
    grid = coarsen(sphere_256, (8, 8, 8))
    positions = interface_centroids(sphere_256, grid)
    corners = grid.composite_indices * grid.boxel_size
    assert positions.shape == (grid.composite_count, 3)
    assert np.all(positions >= corners)
    assert np.all(positions <= corners + grid.boxel_size)
    radii = np.linalg.norm(positions - 0.5, axis=-1)
    # interface weights straddle the sphere surface
    assert np.max(np.abs(radii - 0.4)) < 2.0 / 256 * np.sqrt(3.0)

    at_centers = radial_normals(grid)
    assert at_centers.shape == positions.shape
    assert np.allclose(np.linalg.norm(at_centers, axis=-1), 1.0)


def test_cut_volume_fraction_simple():
    assert cut_volume_fraction([1.0, 0.0, 0.0], 0.25, [1.0, 1.0, 1.0]) == (
        pytest.approx(0.25)
    )
    normal = np.ones(3) / np.sqrt(3.0)
    # corner tetrahedron of the unit cube
    offset = 0.5 / np.sqrt(3.0)
    assert cut_volume_fraction(normal, offset, [1.0, 1.0, 1.0]) == (
        pytest.approx(0.5 ** 3 / 6.0)
    )
    assert cut_volume_fraction(-normal, 0.0, [1.0, 2.0, 3.0]) == (
        pytest.approx(1.0)
    )


def test_facet_offset_matches_volume():
    rng = np.random.default_rng(11)
    normals = rng.normal(size=(50, 3))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    c_plus = rng.uniform(0.01, 0.99, 50)
    size = np.array([1.0, 0.5, 2.0])
    offsets = facet_offset(normals, c_plus, size)
    volumes = cut_volume_fraction(normals, offsets, size)
    assert np.max(np.abs(volumes - c_plus)) < 1e-8


def test_mid_plane_facet():
    size = np.ones(3)
    normal = np.array([1.0, 0.0, 0.0])
    offset = float(facet_offset(normal, 0.5, size))
    assert offset == pytest.approx(0.5, abs=1e-12)
    vertices = facet_polygon(normal, offset, size)
    assert vertices.shape == (4, 3)
    assert np.allclose(vertices[:, 0], 0.5)


def test_slab_facets(slab):
    image, grid = slab
    grid = compute_normals(image, grid)
    facets = facet_export(grid)
    assert len(facets) == grid.composite_count
    for facet in facets:
        assert facet.area == pytest.approx(0.25)
        expected_y = 5.0 / 16.0 if facet.index[1] == 0 else 11.0 / 16.0
        assert np.allclose(facet.vertices[:, 1], expected_y)

    report = facet_gap(grid, facets)
    assert report.matched_faces > 0
    assert report.unmatched_faces == 0
    assert report.max_gap < 1e-12


def test_segment_hausdorff():
    first = (np.zeros(3), np.array([1.0, 0.0, 0.0]))
    second = (np.array([0.0, 1.0, 0.0]), np.array([2.0, 1.0, 0.0]))
    assert segment_hausdorff(first, second) == pytest.approx(np.sqrt(2.0))


def test_second_moment_facets_fit_better(printer):
    image = generate({"shape": "sphere", "radius": 0.35}, (64, 64, 64))
    grid = coarsen(image, (8, 4, 2))
    moment = facet_gap(compute_normals(image, grid, "second_moment"))
    barycenter = facet_gap(compute_normals(image, grid, "barycenter"))
    printer(
        f"mean facet gap second moment {moment.mean_gap:.5f}"
        f" barycenter {barycenter.mean_gap:.5f}"
    )
    assert moment.mean_gap < barycenter.mean_gap
