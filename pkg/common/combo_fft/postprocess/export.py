"""Plot-ready exports of solutions.

Tables are CSV files with the column schemas below. Field dumps and slices
are raw little-endian f64 data next to a JSON header carrying
'file_version', like all other artifacts.

Column schemas:
    tractions: i, j, k, X, Y, Z, N1, N2, N3, T1, T2, T3, T_norm,
        t1, t2, t3, t_norm, area, spatial_area, jump
    cells: i, j, k, c_plus, P11 .. P33, von_mises, von_mises_plus,
        von_mises_minus
    bench: run, resolution, variant, XX, XY, YX, YY, error
"""
import os
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import attr
import numpy as np
import pandas as pd

from combo_fft.exceptions import ArtifactFormatError
from combo_fft.utils import (
    create_header,
    store_header,
    load_header,
    sibling_path,
    write_raw,
    read_raw,
)

from .averages import PhaseAverages, error_norm, table_components
from .exceptions import IOFailure
from .recovery import RecoveredFields
from .tractions import InterfaceSample

FIELD_KIND = "field"
SLICE_KIND = "field_slice"
RESULT_KIND = "result"
BENCH_KIND = "bench_table"
RAW_DTYPE = "<f8"
HEADER_DTYPE = "f8"

TRACTION_COLUMNS = (
    "i", "j", "k",
    "X", "Y", "Z",
    "N1", "N2", "N3",
    "T1", "T2", "T3", "T_norm",
    "t1", "t2", "t3", "t_norm",
    "area", "spatial_area", "jump",
)
STRESS_COLUMNS = tuple(
    f"P{row + 1}{column + 1}" for row in range(3) for column in range(3)
)
CELL_COLUMNS = (
    ("i", "j", "k", "c_plus")
    + STRESS_COLUMNS
    + ("von_mises", "von_mises_plus", "von_mises_minus")
)
BENCH_COLUMNS = (
    "run", "resolution", "variant", "XX", "XY", "YX", "YY", "error",
)

log = logging.getLogger(__name__)


def traction_table(samples: Sequence[InterfaceSample]) -> pd.DataFrame:
    """Facet tractions as table with the 'tractions' schema."""
    rows = []
    for sample in samples:
        T = np.asarray(sample.T_material, dtype=float)
        t = np.asarray(sample.t_spatial, dtype=float)
        rows.append(
            list(sample.index)
            + list(np.asarray(sample.centroid, dtype=float))
            + list(np.asarray(sample.normal, dtype=float))
            + list(T) + [float(np.linalg.norm(T))]
            + list(t) + [float(np.linalg.norm(t))]
            + [sample.area, sample.spatial_area, sample.jump]
        )
    return pd.DataFrame(rows, columns=list(TRACTION_COLUMNS))


def cell_table(
    recovered: RecoveredFields, fields: Dict[str, np.ndarray]
) -> pd.DataFrame:
    """Per-cell stresses with the 'cells' schema.

    Args:
        recovered (RecoveredFields): Recovered phase fields.
        fields (Dict[str, np.ndarray]): Output of 'derived_fields'.

    """
    dims = recovered.dims
    i, j, k = np.unravel_index(np.arange(int(np.prod(dims))), dims)
    data = {
        "i": i,
        "j": j,
        "k": k,
        "c_plus": recovered.c_plus.reshape(-1),
    }
    stress = recovered.P.reshape(-1, 9)
    for position, name in enumerate(STRESS_COLUMNS):
        data[name] = stress[:, position]
    for name in ("von_mises", "von_mises_plus", "von_mises_minus"):
        data[name] = fields[name].reshape(-1)
    return pd.DataFrame(data, columns=list(CELL_COLUMNS))


def store_table(frame: pd.DataFrame, filepath: str):
    """Write table as CSV.

    Raises:
        IOFailure: File could not be written.
    """
    try:
        dirpath = os.path.dirname(os.path.abspath(filepath))
        os.makedirs(dirpath, exist_ok=True)
        frame.to_csv(filepath, index=False)
    except OSError as exc:
        raise IOFailure(filepath, str(exc))
    log.debug(f"Stored {len(frame)} rows to '{filepath}'")


def load_table(
    filepath: str, columns: Optional[Sequence[str]] = None
) -> pd.DataFrame:
    """Read CSV table, optionally checking its column schema.

    Raises:
        IOFailure: File is missing, unreadable or has other columns.
    """
    if not os.path.exists(filepath):
        raise IOFailure(filepath, "file does not exist")
    try:
        frame = pd.read_csv(filepath)
    except (OSError, ValueError) as exc:
        raise IOFailure(filepath, str(exc))

    if columns is not None and tuple(frame.columns) != tuple(columns):
        raise IOFailure(
            filepath,
            f"expected columns {list(columns)} got {list(frame.columns)}"
        )
    return frame


def _store_raw(filepath, header, array):
    try:
        write_raw(sibling_path(filepath, "raw"), array, RAW_DTYPE)
        store_header(filepath, header)
    except OSError as exc:
        raise IOFailure(filepath, str(exc))


def _load_raw(filepath, kind):
    try:
        header = load_header(filepath, kind)
        shape = tuple(int(item) for item in header["shape"])
        data = read_raw(sibling_path(filepath, "raw"), RAW_DTYPE, shape)
    except (ArtifactFormatError, KeyError, TypeError, ValueError) as exc:
        raise IOFailure(filepath, str(exc))
    return data, header


def field_slice(field: np.ndarray, axis: int, index: int) -> np.ndarray:
    """Plane 'index' of a cell field normal to 'axis'.

    Raises:
        IndexError: Axis or index out of range.
    """
    if axis not in (0, 1, 2):
        raise IndexError(f"Slice axis must be 0, 1 or 2, got {axis}")
    size = field.shape[axis]
    if not 0 <= index < size:
        raise IndexError(
            f"Slice index {index} out of range for axis {axis}"
            f" of size {size}"
        )
    return np.take(field, index, axis=axis)


def store_slice(
    filepath: str,
    field: np.ndarray,
    axis: int,
    index: int,
    name: str = "",
):
    """Store one plane of a cell field as raw f64 with JSON header.

    Raises:
        IOFailure: Slice is out of range or could not be written.
    """
    try:
        plane = field_slice(np.asarray(field, dtype=float), axis, index)
    except IndexError as exc:
        raise IOFailure(filepath, str(exc))

    raw_path = sibling_path(filepath, "raw")
    header = create_header(
        SLICE_KIND,
        name=name,
        axis=int(axis),
        index=int(index),
        field_shape=list(np.shape(field)),
        shape=list(plane.shape),
        dtype=HEADER_DTYPE,
        raw_file=os.path.basename(raw_path),
    )
    _store_raw(filepath, header, plane)


def load_slice(filepath: str) -> Tuple[np.ndarray, Dict[str, Any]]:
    """Load plane stored with 'store_slice' with its header."""
    return _load_raw(filepath, SLICE_KIND)


def store_field(filepath: str, field: np.ndarray, name: str = "F"):
    """Dump a full field (n1, n2, n3, ...) as raw f64 with JSON header."""
    field = np.asarray(field, dtype=float)
    raw_path = sibling_path(filepath, "raw")
    header = create_header(
        FIELD_KIND,
        name=name,
        shape=list(field.shape),
        dtype=HEADER_DTYPE,
        raw_file=os.path.basename(raw_path),
    )
    _store_raw(filepath, header, field)


def load_field(filepath: str) -> np.ndarray:
    return _load_raw(filepath, FIELD_KIND)[0]


def store_result_bundle(
    filepath: str,
    averages: PhaseAverages,
    convergence: Dict[str, Any],
    timings: Dict[str, Any],
    metadata: Optional[Dict[str, Any]] = None,
):
    """Write the JSON report of a solve.

    Wall times sit in their own 'timings' block, everything else is
    reproducible for identical inputs.

    Args:
        filepath (str): Path to JSON report.
        averages (PhaseAverages): Averaged stresses.
        convergence (Dict[str, Any]): Serialized convergence report.
        timings (Dict[str, Any]): Wall times.
        metadata (Optional[Dict[str, Any]]): Additional reproducible data.

    """
    header = create_header(
        RESULT_KIND,
        result=averages.to_dict(),
        convergence=convergence,
        timings=timings,
        metadata=metadata or {},
    )
    try:
        store_header(filepath, header)
    except OSError as exc:
        raise IOFailure(filepath, str(exc))


def load_result_bundle(filepath: str) -> Dict[str, Any]:
    try:
        return load_header(filepath, RESULT_KIND)
    except ArtifactFormatError as exc:
        raise IOFailure(filepath, exc.reason)


@attr.s
class BenchRow(object):
    """Averaged stress of one benchmark run.

    Args:
        run (str): Benchmark case, e.g. 'sphere'.
        resolution (str): Grid resolution, e.g. '8x8x8'.
        variant (str): 'reference' or the normal method in use.
        P_bar (np.ndarray): Averaged stress.
        error (Optional[float]): Relative error to the reference run.
    """

    run = attr.ib()
    resolution = attr.ib()
    variant = attr.ib()
    P_bar = attr.ib()
    error = attr.ib(default=None)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "run": self.run,
            "resolution": self.resolution,
            "variant": self.variant,
        }
        data.update(table_components(self.P_bar))
        data["error"] = self.error
        return data


def compare_rows(rows: List[BenchRow], reference: BenchRow) -> List[BenchRow]:
    """Rows with relative errors of their stress to the reference."""
    return [
        attr.evolve(
            row,
            error=None if row is reference
            else error_norm(row.P_bar, reference.P_bar),
        )
        for row in rows
    ]


def bench_table(rows: Sequence[BenchRow]) -> pd.DataFrame:
    """Benchmark rows with the 'bench' schema."""
    return pd.DataFrame(
        [row.to_dict() for row in rows], columns=list(BENCH_COLUMNS)
    )


def store_bench_table(rows: Sequence[BenchRow], filepath: str):
    """Write benchmark rows as JSON and as CSV next to it."""
    header = create_header(
        BENCH_KIND,
        columns=list(BENCH_COLUMNS),
        rows=[row.to_dict() for row in rows],
    )
    try:
        store_header(filepath, header)
    except OSError as exc:
        raise IOFailure(filepath, str(exc))
    store_table(bench_table(rows), sibling_path(filepath, "csv"))
