import os
import json
import logging
from typing import Any, Dict, Optional

import numpy as np
import semver

from .exceptions import ArtifactFormatError

LOG_ENV_KEY = "COMBO_LOG"
ARTIFACT_FILE_VERSION = "1.0.0"
LOG_LEVELS_BY_NAME = {
    "notset": logging.NOTSET,
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
    "critical": logging.CRITICAL,
}

ArtifactHeader = Dict[str, Any]


def parse_log_level(value: str) -> int:
    """Convert log level name or integer string to logging level.

    Args:
        value (str): Level name ('debug', 'info', ...) or integer 0-50.

    Returns:
        int: Logging level.

    Raises:
        ValueError: When value is not a known level.

    """
    low_value = str(value).strip().lower()
    if low_value.isdigit():
        log_level = int(low_value)
        if 0 <= log_level <= 50:
            return log_level
    elif low_value in LOG_LEVELS_BY_NAME:
        return LOG_LEVELS_BY_NAME[low_value]

    expected = ", ".join(LOG_LEVELS_BY_NAME)
    raise ValueError(
        f"Unexpected log level \"{value}\". Expected: {expected}"
        " or integer [0-50]."
    )


def get_log_level() -> int:
    """Log level defined by 'COMBO_LOG' environment variable."""
    value = os.getenv(LOG_ENV_KEY)
    if not value:
        return logging.WARNING
    return parse_log_level(value)


def configure_logging(level: Optional[int] = None):
    """Set up root logger of the process.

    Args:
        level (Optional[int]): Logging level. Value from environment is used
            when not passed.

    """
    if level is None:
        level = get_log_level()
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)-8s %(name)s: %(message)s",
    )
    logging.getLogger().setLevel(level)


def create_header(kind: str, **data) -> ArtifactHeader:
    """Create JSON header of an artifact."""
    header = {
        "file_version": ARTIFACT_FILE_VERSION,
        "kind": kind,
    }
    header.update(data)
    return header


def store_header(filepath: str, header: ArtifactHeader):
    dirpath = os.path.dirname(os.path.abspath(filepath))
    os.makedirs(dirpath, exist_ok=True)
    with open(filepath, "w") as stream:
        json.dump(header, stream, indent=4, sort_keys=True)


def load_header(filepath: str, kind: str) -> ArtifactHeader:
    """Load and validate JSON header of an artifact.

    Args:
        filepath (str): Path to header file.
        kind (str): Expected artifact kind.

    Returns:
        dict[str, Any]: Header data.

    Raises:
        ArtifactFormatError: Header is missing or incompatible.

    """
    if not os.path.exists(filepath):
        raise ArtifactFormatError(filepath, "file does not exist")

    try:
        with open(filepath, "r") as stream:
            header = json.load(stream)
    except ValueError as exc:
        raise ArtifactFormatError(filepath, f"invalid JSON ({exc})")

    file_version = header.get("file_version")
    if not file_version:
        raise ArtifactFormatError(filepath, "missing 'file_version'")

    try:
        version = semver.VersionInfo.parse(file_version)
    except ValueError:
        raise ArtifactFormatError(
            filepath, f"invalid file version '{file_version}'"
        )
    current = semver.VersionInfo.parse(ARTIFACT_FILE_VERSION)
    if version.major != current.major:
        raise ArtifactFormatError(
            filepath,
            f"file version {file_version} is not compatible"
            f" with {ARTIFACT_FILE_VERSION}"
        )

    if header.get("kind") != kind:
        raise ArtifactFormatError(
            filepath,
            f"expected kind '{kind}' got '{header.get('kind')}'"
        )
    return header


def sibling_path(header_path: str, suffix: str) -> str:
    """Path of raw data file next to a header.

    Example:
        'out/image.json' with suffix 'raw' -> 'out/image.raw'
        'out/grid.json' with suffix 'c_plus.raw' -> 'out/grid.c_plus.raw'

    """
    root, _ = os.path.splitext(header_path)
    return f"{root}.{suffix}"


def write_raw(filepath: str, array: np.ndarray, dtype: str):
    """Write array as raw little-endian C-ordered data."""
    data = np.ascontiguousarray(array, dtype=np.dtype(dtype))
    os.makedirs(os.path.dirname(os.path.abspath(filepath)), exist_ok=True)
    data.tofile(filepath)


def read_raw(filepath: str, dtype: str, shape) -> np.ndarray:
    """Read raw little-endian data written by 'write_raw'."""
    if not os.path.exists(filepath):
        raise ArtifactFormatError(filepath, "raw data file does not exist")
    data = np.fromfile(filepath, dtype=np.dtype(dtype))
    expected = int(np.prod(shape))
    if data.size != expected:
        raise ArtifactFormatError(
            filepath, f"expected {expected} values, found {data.size}"
        )
    return data.reshape(shape)
