"""Desk-scale benchmark suites.

A suite rasterizes one geometry at the fine resolution, solves it voxel by
voxel as reference and compares coarsened runs against it: ComBo with each
normal method and the majority assignment without composite boxels.
"""
import logging
from typing import List

import enlighten

from combo_fft.imaging import (
    PhaseImage,
    generate,
    coarsen,
    compute_normals,
)
from combo_fft.solver import MaterialMap, SimGrid
from combo_fft.postprocess import (
    BenchRow,
    compare_rows,
    store_bench_table,
)

from .commands import build_material_map, solve_cell, target_loading
from .config import RunConfig
from .console import echo, echo_table
from .exceptions import ConfigInvalid

BENCH_FILE = "bench.json"
BENCH_SUITES = {
    "sphere-desk": {"shape": "sphere", "radius": 0.4},
    "octahedron-desk": {"shape": "octahedron", "radius": 0.45},
    "cross-ply-desk": {"shape": "cross_ply"},
    "fiber-desk": {"shape": "fiber", "axis": "z", "radius": 0.3},
}

log = logging.getLogger(__name__)


def _resolution(dims) -> str:
    return "x".join(str(item) for item in dims)


def _reference_run(config: RunConfig, image: PhaseImage, F_target):
    laws = config.laws()
    material_map = MaterialMap.from_image(image, laws["plus"], laws["minus"])
    sim_grid = SimGrid.from_image(image, workers=config.threads)
    _, report = solve_cell(config, sim_grid, material_map, F_target)
    return report.steps[-1].P_bar


def _coarse_run(config, image, factors, variant, F_target):
    grid = coarsen(image, factors)
    combo = variant != "majority"
    if combo:
        settings = config.normals
        grid = compute_normals(
            image, grid, variant, settings.centering, settings.laplace
        )
    material_map = build_material_map(config, grid, combo=combo)
    sim_grid = SimGrid.from_combo_grid(grid, workers=config.threads)
    _, report = solve_cell(config, sim_grid, material_map, F_target)
    return grid, report.steps[-1].P_bar


def cmd_bench(config: RunConfig) -> List[BenchRow]:
    """Run the configured suite and write the comparison table."""
    settings = config.bench
    shape = BENCH_SUITES.get(settings.suite)
    if shape is None:
        raise ConfigInvalid(
            "bench.suite",
            f"unknown suite '{settings.suite}', expected one of:"
            f" {', '.join(BENCH_SUITES)}"
        )
    fine_dims = (settings.fine, settings.fine, settings.fine)
    for factors in settings.factors:
        if any(settings.fine % factor for factor in factors):
            raise ConfigInvalid(
                "bench.factors",
                f"factors {list(factors)} do not divide {settings.fine}"
            )

    F_target, _ = target_loading(config)
    image = generate(shape, fine_dims, config.lengths)
    variants = [item for item in settings.variants if item != "reference"]
    runs = [(factors, variant)
            for factors in settings.factors
            for variant in variants]
    echo(
        f">>> Bench '{settings.suite}': reference {_resolution(fine_dims)}"
        f" and {len(runs)} coarse runs"
    )

    manager = enlighten.get_manager()
    progress_bar = manager.counter(
        total=len(runs) + 1, desc="Bench runs", units="runs",
        color=(64, 128, 222)
    )
    try:
        reference = BenchRow(
            settings.suite,
            _resolution(fine_dims),
            "reference",
            _reference_run(config, image, F_target),
        )
        progress_bar.update()
        rows = [reference]
        for factors, variant in runs:
            grid, P_bar = _coarse_run(
                config, image, factors, variant, F_target
            )
            rows.append(BenchRow(
                settings.suite, _resolution(grid.dims), variant, P_bar
            ))
            progress_bar.update()
    finally:
        progress_bar.close()

    rows = compare_rows(rows, reference)
    store_bench_table(rows, config.path(BENCH_FILE))

    table = []
    for row in rows:
        data = row.to_dict()
        if row.error is not None:
            data["error"] = f"{100 * row.error:.4f}%"
        table.append(data)
    echo_table(
        table,
        ("resolution", "variant", "XX", "XY", "YX", "YY", "error"),
    )
    return rows
