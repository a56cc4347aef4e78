"""Pipeline stages of the command line front-end.

Every stage reads the artifacts of the previous one from the output
directory and writes its own next to them:

    generate  image.json
    coarsen   grid.json, volume_fractions.json
    normals   normals.json, normals_report.json
    solve     result.json, field.json, jumps.json
    post      post/averages.json, post/tractions.csv, post/cells.csv,
              post/slice_*.json
"""
import os
import sys
import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from combo_fft.exceptions import ArtifactFormatError, ComboError
from combo_fft.utils import create_header, store_header
from combo_fft.imaging import (
    ComboGrid,
    PhaseImage,
    generate,
    store_image,
    load_image,
    coarsen,
    volume_fraction_report,
    store_grid,
    load_grid,
    compute_normals,
    interface_centroids,
    radial_normals,
    colinearity,
    facet_export,
    facet_gap,
)
from combo_fft.laminate import NoConvergence
from combo_fft.solver import (
    MaterialMap,
    SimGrid,
    CellSolver,
    ConvergenceReport,
    load_stepping,
    rotated_loading,
    RECOVERABLE_ERRORS,
    LoadPathFailed,
)
from combo_fft.postprocess import (
    IOFailure,
    PhaseAverages,
    InterfaceSample,
    recover_phase_fields,
    phase_averages,
    derived_fields,
    interface_tractions,
    traction_table,
    cell_table,
    store_table,
    store_slice,
    store_field,
    load_field,
    store_result_bundle,
    table_components,
)

from .config import RunConfig
from .console import echo
from .exceptions import ConfigInvalid, SolverFailed, UpstreamArtifactMissing

IMAGE_FILE = "image.json"
GRID_FILE = "grid.json"
NORMALS_FILE = "normals.json"
VOLUME_REPORT_FILE = "volume_fractions.json"
NORMALS_REPORT_FILE = "normals_report.json"
RESULT_FILE = "result.json"
FIELD_FILE = "field.json"
JUMPS_FILE = "jumps.json"
POST_DIR = "post"

SOLVER_ERRORS = RECOVERABLE_ERRORS + (LoadPathFailed, NoConvergence)

log = logging.getLogger(__name__)


def _load_upstream(loader, filepath: str, stage: str):
    if not os.path.exists(filepath):
        raise UpstreamArtifactMissing(filepath, stage)
    try:
        return loader(filepath)
    except ArtifactFormatError as exc:
        raise UpstreamArtifactMissing(filepath, stage, exc.reason)


def _store_report(filepath: str, kind: str, report: Dict[str, Any]):
    store_header(filepath, create_header(kind, **report))


def _progress_enabled() -> bool:
    return bool(sys.__stdout__) and sys.stdout.isatty()


def input_image(config: RunConfig) -> PhaseImage:
    """Phase image of the run, an explicit image path wins."""
    if config.image:
        return _load_upstream(load_image, config.image, "generate")
    return _load_upstream(load_image, config.path(IMAGE_FILE), "generate")


def solver_grid(config: RunConfig) -> ComboGrid:
    """Grid with normals when available, the plain coarsening otherwise."""
    normals_path = config.path(NORMALS_FILE)
    if os.path.exists(normals_path):
        return _load_upstream(load_grid, normals_path, "normals")
    return _load_upstream(load_grid, config.path(GRID_FILE), "coarsen")


def build_material_map(
    config: RunConfig, grid: ComboGrid, combo: Optional[bool] = None
) -> MaterialMap:
    """Materials of a grid with the configured laws.

    Raises:
        UpstreamArtifactMissing: Composite boxels without normals.
    """
    if combo is None:
        combo = config.solver.combo
    laws = config.laws()
    if combo and grid.composite_count and not grid.has_normals:
        raise UpstreamArtifactMissing(
            config.path(NORMALS_FILE), "normals",
            "composite boxels need normals"
        )
    return MaterialMap.from_grid(
        grid,
        laws["plus"],
        laws["minus"],
        combo=combo,
        tolerance=config.laminate,
    )


def target_loading(
    config: RunConfig,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Macroscopic gradient of the run and the rotation applied to it."""
    F_bar = config.loading.matrix
    rotation = config.loading.rotation
    if rotation is None:
        return F_bar, None
    try:
        return rotated_loading(F_bar, rotation["axis"], rotation["angle"])
    except ComboError as exc:
        raise ConfigInvalid("loading.rotation", str(exc))


def solve_cell(
    config: RunConfig,
    sim_grid: SimGrid,
    material_map: MaterialMap,
    F_target: np.ndarray,
) -> Tuple[np.ndarray, ConvergenceReport]:
    """Load-stepped solution of one cell problem.

    Raises:
        SolverFailed: Load path could not be completed.
    """
    solver_config = config.solver_config()
    solver = CellSolver(sim_grid, material_map, solver_config)
    try:
        return load_stepping(
            F_target,
            solver_config.load_steps,
            solver,
            progress=_progress_enabled(),
        )
    except SOLVER_ERRORS as exc:
        raise SolverFailed(exc)


def cmd_generate(config: RunConfig) -> PhaseImage:
    """Rasterize the configured geometry."""
    if not config.geometry:
        raise ConfigInvalid("geometry", "'generate' needs a geometry")
    image = generate(config.geometry_spec(), config.dims, config.lengths)
    filepath = config.path(IMAGE_FILE)
    store_image(image, filepath)
    echo(
        f">>> Generated {config.geometry_spec().get('shape')} image"
        f" {image.dims} with volume fraction {image.volume_fraction:.6f}"
    )
    echo(f"  - {filepath}")
    return image


def cmd_coarsen(config: RunConfig) -> ComboGrid:
    """Coarsen the image into boxels and report volume fractions."""
    image = input_image(config)
    grid = coarsen(image, config.factors)
    store_grid(grid, config.path(GRID_FILE))

    report = volume_fraction_report(grid)
    _store_report(
        config.path(VOLUME_REPORT_FILE), "volume_fraction_report", report
    )
    echo(f">>> composite boxels: {grid.composite_count}")
    echo(
        f"  - boxels {report['boxel_count']},"
        f" composite share {100 * report['composite_share']:.2f}%"
    )
    echo(f"  - global c+ {report['global_c_plus']:.6f}")
    echo(
        f"  - majority assignment c+ {report['majority_c_plus']:.6f}"
        f" (error {report['majority_error']:+.6f})"
    )
    if report["min_composite_c_plus"] is not None:
        echo(
            f"  - composite c+ in [{report['min_composite_c_plus']:.4f},"
            f" {report['max_composite_c_plus']:.4f}]"
        )
    return grid


def oracle_normals(
    image: PhaseImage, grid: ComboGrid, oracle: Dict[str, Any]
) -> np.ndarray:
    """Analytic normals of composite boxels.

    Sphere normals are evaluated at the interface centroid of each boxel.
    """
    if oracle["type"] == "sphere":
        positions = interface_centroids(image, grid)
        return radial_normals(grid, oracle.get("center"), positions)
    normal = np.asarray(oracle["normal"], dtype=float)
    normal = normal / np.linalg.norm(normal)
    return np.broadcast_to(normal, (grid.composite_count, 3))


def cmd_normals(config: RunConfig) -> Tuple[ComboGrid, Dict[str, Any]]:
    """Identify normals and report their quality."""
    image = input_image(config)
    grid = _load_upstream(load_grid, config.path(GRID_FILE), "coarsen")
    settings = config.normals
    grid = compute_normals(
        image, grid, settings.method, settings.centering, settings.laplace
    )
    store_grid(grid, config.path(NORMALS_FILE))

    gap = facet_gap(grid)
    report: Dict[str, Any] = {
        "method": settings.method.value,
        "composite_count": grid.composite_count,
        "flagged": int(np.count_nonzero(grid.flags[grid.composite_mask])),
        "facet_gap": {
            "mean": gap.mean_gap,
            "max": gap.max_gap,
            "matched_faces": gap.matched_faces,
            "unmatched_faces": gap.unmatched_faces,
        },
        "colinearity": None,
    }
    echo(
        f">>> Identified {grid.composite_count} normals"
        f" with '{settings.method.value}'"
    )
    if settings.oracle is not None and grid.composite_count:
        normals = grid.normals[grid.composite_mask]
        reference = oracle_normals(image, grid, settings.oracle)
        values = colinearity(normals, reference)
        report["colinearity"] = {
            "oracle": settings.oracle["type"],
            "mean": float(np.mean(values)),
            "min": float(np.min(values)),
            "max": float(np.max(values)),
        }
        echo(
            f"  - colinearity mean {report['colinearity']['mean']:.5f},"
            f" min {report['colinearity']['min']:.5f}"
        )
    echo(f"  - facet gap mean {gap.mean_gap:.4g}")
    _store_report(config.path(NORMALS_REPORT_FILE), "normals_report", report)
    return grid, report


def _echo_stress(label: str, P_bar: Optional[np.ndarray]):
    if P_bar is None:
        echo(f"  - {label}: absent")
        return
    values = ", ".join(
        f"{name} {value:.4f}"
        for name, value in table_components(P_bar).items()
    )
    echo(f"  - {label}: {values}")


def cmd_solve(config: RunConfig) -> Tuple[PhaseAverages, ConvergenceReport]:
    """Solve the cell problem and write the result bundle."""
    grid = solver_grid(config)
    material_map = build_material_map(config, grid)
    sim_grid = SimGrid.from_combo_grid(grid, workers=config.threads)
    F_target, rotation = target_loading(config)

    echo(
        f">>> Solving {grid.dims} cells"
        f" ({material_map.composite_count} composite)"
        f" with {config.solver.scheme.value}/{config.solver.green.value}"
    )
    F, report = solve_cell(config, sim_grid, material_map, F_target)
    try:
        averages = phase_averages(recover_phase_fields(F, material_map))
    except SOLVER_ERRORS as exc:
        raise SolverFailed(exc)

    metadata: Dict[str, Any] = {
        "dims": list(grid.dims),
        "factors": list(grid.factors),
        "composite_boxels": material_map.composite_count,
        "combo": config.solver.combo,
        "F_bar": F_target.tolist(),
        "c_plus_exact": grid.global_c_plus,
        "c_plus_solver": material_map.plus_fraction,
    }
    if rotation is not None:
        metadata["rotation"] = rotation.tolist()
        metadata["P_bar_unrotated"] = (rotation.T @ averages.P_bar).tolist()
    store_result_bundle(
        config.path(RESULT_FILE),
        averages,
        report.to_dict(),
        report.timings(),
        metadata,
    )
    if config.store_field:
        store_field(config.path(FIELD_FILE), F)
        jumps = material_map.warm_start()
        if jumps is not None:
            store_field(config.path(JUMPS_FILE), jumps, name="jumps")

    echo(
        f">>> Converged in {report.outer_iterations} outer iterations"
        f" ({len(report.steps)} load steps, {report.bisections} bisections)"
    )
    _echo_stress("P_bar", averages.P_bar)
    _echo_stress("P_bar+", averages.P_plus)
    _echo_stress("P_bar-", averages.P_minus)
    return averages, report


def _load_solution(config: RunConfig, material_map: MaterialMap):
    try:
        F = load_field(config.path(FIELD_FILE))
    except IOFailure as exc:
        raise UpstreamArtifactMissing(exc.path, "solve", exc.reason)
    if tuple(F.shape) != tuple(material_map.dims) + (3, 3):
        raise UpstreamArtifactMissing(
            config.path(FIELD_FILE), "solve",
            f"field of shape {F.shape} does not match the grid"
        )
    jumps_path = config.path(JUMPS_FILE)
    if material_map.composite_count and os.path.exists(jumps_path):
        try:
            jumps = load_field(jumps_path)
        except IOFailure as exc:
            raise UpstreamArtifactMissing(exc.path, "solve", exc.reason)
        if jumps.shape == (material_map.composite_count, 3):
            material_map.restore({0: jumps})
    return F


def cmd_post(
    config: RunConfig,
) -> Tuple[PhaseAverages, List[InterfaceSample]]:
    """Recover phase fields of a solution and export tables and slices."""
    grid = solver_grid(config)
    material_map = build_material_map(config, grid)
    F = _load_solution(config, material_map)
    try:
        recovered = recover_phase_fields(F, material_map)
    except SOLVER_ERRORS as exc:
        raise SolverFailed(exc)
    averages = phase_averages(recovered)

    samples: List[InterfaceSample] = []
    if recovered.composite_count:
        samples = interface_tractions(
            recovered, facet_export(grid), config.post.push_forward
        )
    store_table(
        traction_table(samples), config.path(POST_DIR, "tractions.csv")
    )

    fields = derived_fields(recovered)
    if config.post.cell_table:
        store_table(
            cell_table(recovered, fields), config.path(POST_DIR, "cells.csv")
        )
    for item in config.post.slices:
        filename = f"slice_{item.field}_{item.axis}_{item.index}.json"
        store_slice(
            config.path(POST_DIR, filename),
            fields[item.field],
            item.axis,
            item.index,
            name=item.field,
        )

    max_jump = max((sample.jump for sample in samples), default=0.0)
    report = averages.to_dict()
    report.update({
        "push_forward": config.post.push_forward.value,
        "interface_samples": len(samples),
        "max_traction_jump": max_jump,
        "max_recovery_iterations": int(np.max(recovered.iterations))
        if recovered.composite_count else 0,
    })
    _store_report(
        config.path(POST_DIR, "averages.json"), "phase_averages", report
    )
    echo(
        f">>> Exported {len(samples)} interface samples"
        f" and {len(config.post.slices)} slices"
    )
    _echo_stress("P_bar+", averages.P_plus)
    _echo_stress("P_bar-", averages.P_minus)
    return averages, samples
