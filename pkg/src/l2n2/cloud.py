"""Point-cloud container and file ingestion.

A :class:`PointCloud` is an n x D matrix of ambient Euclidean coordinates,
one sample point per row.  Two on-disk formats are supported:

* delimited text -- one point per row, configurable delimiter, optional
  single header line (auto-detected);
* raw binary   -- a 16-byte header (8-byte magic ``L2N2PTS\\0``, then
  uint32 n, uint32 D, both little-endian) followed by n*D little-endian
  float64 values in row-major order.
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PointCloud",
    "as_cloud",
    "read_delimited",
    "write_delimited",
    "read_binary",
    "write_binary",
    "read_cloud",
    "write_cloud",
]

BINARY_MAGIC = b"L2N2PTS\x00"
_HEADER = struct.Struct("<8sII")


@dataclass(frozen=True)
class PointCloud:
    """n x D coordinate matrix, one sample point per row.

    Coordinates are stored as a C-contiguous float64 array.  The cloud
    must contain at least two points (nearest-neighbor statistics are
    undefined otherwise) and all entries must be finite.
    """

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError(f"expected a 2-d point matrix, got shape {pts.shape}")
        n, D = pts.shape
        if n < 2:
            raise ValueError(f"need at least 2 points, got {n}")
        if D < 1:
            raise ValueError("ambient dimension must be >= 1")
        bad = ~np.isfinite(pts)
        if bad.any():
            rows = np.unique(np.nonzero(bad)[0])
            shown = ", ".join(str(r) for r in rows[:5])
            more = "" if rows.size <= 5 else f" (+{rows.size - 5} more)"
            raise ValueError(f"non-finite coordinates in rows [{shown}]{more}")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def D(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n


def as_cloud(data) -> PointCloud:
    """Coerce an array-like (or pass through a PointCloud) to PointCloud."""
    if isinstance(data, PointCloud):
        return data
    return PointCloud(np.asarray(data, dtype=np.float64))


# ---------------------------------------------------------------------------
# delimited text
# ---------------------------------------------------------------------------

def _sniff_delimiter(line: str) -> str | None:
    # None means "any whitespace" for numpy
    if "," in line:
        return ","
    if "\t" in line:
        return "\t"
    if ";" in line:
        return ";"
    return None


def _is_numeric_row(line: str, delimiter: str | None) -> bool:
    fields = line.split(delimiter) if delimiter else line.split()
    if not fields:
        return False
    for f in fields:
        try:
            float(f)
        except ValueError:
            return False
    return True


def read_delimited(path: str | os.PathLike, delimiter: str | None = None) -> PointCloud:
    """Read a delimited numeric text file, one point per row.

    If ``delimiter`` is None it is sniffed from the first data line
    (comma, tab, semicolon, otherwise whitespace).  A single leading
    header line of non-numeric field names is detected and skipped.
    """
    with open(path, "r", encoding="utf-8") as fh:
        first = ""
        while True:
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: empty file")
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                first = stripped
                break
    if delimiter is None:
        delimiter = _sniff_delimiter(first)
    skip = 0 if _is_numeric_row(first, delimiter) else 1
    data = np.loadtxt(path, delimiter=delimiter, skiprows=skip, ndmin=2, comments="#")
    return PointCloud(data)


def write_delimited(cloud: PointCloud, path: str | os.PathLike,
                    delimiter: str = ",", header: bool = False) -> None:
    cloud = as_cloud(cloud)
    head = delimiter.join(f"x{i}" for i in range(cloud.D)) if header else ""
    np.savetxt(path, cloud.points, delimiter=delimiter, header=head, comments="")


# ---------------------------------------------------------------------------
# raw binary
# ---------------------------------------------------------------------------

def read_binary(path: str | os.PathLike) -> PointCloud:
    """Read the 16-byte-header little-endian float64 binary format."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, n, D = _HEADER.unpack(header)
        if magic != BINARY_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, not a point-cloud file")
        data = np.fromfile(fh, dtype="<f8", count=n * D)
    if data.size != n * D:
        raise ValueError(f"{path}: expected {n * D} values, found {data.size}")
    return PointCloud(data.reshape(n, D))


def write_binary(cloud: PointCloud, path: str | os.PathLike) -> None:
    cloud = as_cloud(cloud)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(BINARY_MAGIC, cloud.n, cloud.D))
        cloud.points.astype("<f8").tofile(fh)


def read_cloud(path: str | os.PathLike, fmt: str = "auto",
               delimiter: str | None = None) -> PointCloud:
    """Read a point cloud, auto-detecting binary vs. delimited by magic bytes."""
    if fmt == "auto":
        with open(path, "rb") as fh:
            fmt = "binary" if fh.read(8) == BINARY_MAGIC else "delimited"
    if fmt == "binary":
        return read_binary(path)
    if fmt == "delimited":
        return read_delimited(path, delimiter=delimiter)
    raise ValueError(f"unknown format {fmt!r} (use 'delimited', 'binary' or 'auto')")


def write_cloud(cloud: PointCloud, path: str | os.PathLike, fmt: str = "delimited",
                delimiter: str = ",") -> None:
    if fmt == "binary":
        write_binary(cloud, path)
    elif fmt == "delimited":
        write_delimited(cloud, path, delimiter=delimiter)
    else:
        raise ValueError(f"unknown format {fmt!r} (use 'delimited' or 'binary')")
