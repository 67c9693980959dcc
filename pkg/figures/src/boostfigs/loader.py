"""CSV loading with schema checks shared by every render script.

All inputs are the plain-text CSV tables written by ``boost run``: a single
header line followed by float rows.  Anything else (missing file, empty
table, unknown column) raises :class:`DataError` so the scripts can exit
cleanly instead of drawing from garbage.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


class DataError(Exception):
    """Raised when an expected input file is missing or malformed."""


def load_table(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Read a CSV file as (header, float matrix with one row per line)."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"missing input file: {path}")
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
    if not header:
        raise DataError(f"empty input file: {path}")
    names = header.split(",")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise DataError(f"non-numeric data in {path}: {exc}") from exc
    if data.size == 0:
        raise DataError(f"no data rows in {path}")
    if data.shape[1] != len(names):
        raise DataError(f"{path}: {data.shape[1]} columns but "
                        f"{len(names)} header fields")
    return names, data


def load_columns(path: str | Path, *names: str) -> tuple[np.ndarray, ...]:
    """Return the named columns of a CSV table, in the order requested."""
    header, data = load_table(path)
    out = []
    for name in names:
        if name not in header:
            raise DataError(f"{path}: expected column {name!r}, "
                            f"found {header}")
        out.append(data[:, header.index(name)])
    return tuple(out)


def column_block(path: str | Path, prefix: str) -> tuple[np.ndarray,
                                                         np.ndarray]:
    """Return (time, matrix) where the matrix gathers all ``prefix*``
    columns in header order."""
    header, data = load_table(path)
    if header[0] != "time":
        raise DataError(f"{path}: first column must be 'time'")
    idx = [i for i, name in enumerate(header) if name.startswith(prefix)]
    if not idx:
        raise DataError(f"{path}: no columns starting with {prefix!r}")
    return data[:, 0], data[:, idx]


def load_qfunc(path: str | Path) -> tuple[np.ndarray, np.ndarray,
                                          np.ndarray]:
    """Read a flattened Husimi table (re, im, Q) back into grid form."""
    re, im, q = load_columns(path, "re", "im", "Q")
    re_axis = np.unique(re)
    im_axis = np.unique(im)
    if re_axis.size * im_axis.size != q.size:
        raise DataError(f"{path}: samples do not form a complete grid")
    return re_axis, im_axis, q.reshape(im_axis.size, re_axis.size)


def load_almost_periods(path: str | Path) -> tuple[np.ndarray, np.ndarray,
                                                   np.ndarray]:
    """Return (h, time-in-periods, is_convergent) from almost_periods.csv."""
    return load_columns(path, "h", "time", "is_convergent")
