"""Tab-separated tables and the JSON run manifest."""

from __future__ import annotations

import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .dynamics import ObservableSeries

SCALAR_KEYS = ("entropy", "centroid", "width", "leakage")
VALUE_FMT = "%.17g"


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def density_table(series: ObservableSeries, key: str) -> str:
    """One row per instant: ``t`` then the value on each site ``-L..L``."""
    sites = series.sites
    buf = io.StringIO()
    buf.write(f"# bosewalk density table: {key}\n")
    buf.write(f"# sites: {' '.join(str(int(s)) for s in sites)}\n")
    buf.write("# t\t" + "\t".join(str(int(s)) for s in sites) + "\n")
    table = np.column_stack([series.times, series[key]])
    np.savetxt(buf, table, fmt=VALUE_FMT, delimiter="\t")
    return buf.getvalue()


def scalar_columns(series: ObservableSeries, stderr: dict | None = None) -> list[str]:
    keys = [k for k in SCALAR_KEYS if k in series]
    keys += sorted(k for k in series.data if k.startswith(("centroid_n", "width_n")))
    cols = []
    for k in keys:
        cols.append(k)
        if stderr is not None:
            cols.append(f"{k}_stderr")
    return cols


def scalar_table(series: ObservableSeries, stderr: dict | None = None) -> str:
    cols = scalar_columns(series, stderr)
    buf = io.StringIO()
    buf.write("# bosewalk scalar series\n")
    buf.write("# t\t" + "\t".join(cols) + "\n")
    data = [series.times]
    for c in cols:
        if c.endswith("_stderr"):
            data.append(stderr[c[:-len("_stderr")]])
        else:
            data.append(series[c])
    np.savetxt(buf, np.column_stack(data), fmt=VALUE_FMT, delimiter="\t")
    return buf.getvalue()


def density_keys(series: ObservableSeries) -> list[str]:
    return ["density"] + [f"n{k}" for k in range(1, series.N + 1) if f"n{k}" in series]


def table_filename(key: str) -> str:
    return "n.tsv" if key == "density" else f"{key}.tsv"


def write_series(outdir: Path, series: ObservableSeries, formats=("tsv",),
                 stderr: dict | None = None) -> list[str]:
    """Write tables for ``series`` into ``outdir``; returns the file names."""
    outdir = Path(outdir)
    files = []
    if "tsv" in formats:
        for key in density_keys(series):
            name = table_filename(key)
            atomic_write(outdir / name, density_table(series, key))
            files.append(name)
        atomic_write(outdir / "scalars.tsv", scalar_table(series, stderr))
        files.append("scalars.tsv")
    if "npz" in formats:
        arrays = {"times": series.times, "sites": series.sites, **series.data}
        if stderr:
            arrays.update({f"{k}_stderr": v for k, v in stderr.items()})
        np.savez(outdir / "series.npz", **arrays)
        files.append("series.npz")
    return files


def read_table(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of :func:`density_table`: returns (times, sites, values)."""
    header = None
    with open(path) as fh:
        for line in fh:
            if line.startswith("# t\t"):
                header = line[2:].rstrip("\n").split("\t")
                break
    if header is None:
        raise ValueError(f"{path} has no column header")
    data = np.loadtxt(path, comments="#", delimiter="\t", ndmin=2)
    return data[:, 0], np.array([int(s) for s in header[1:]]), data[:, 1:]


def read_scalars(path: Path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        for line in fh:
            if line.startswith("# t\t"):
                cols = line[2:].rstrip("\n").split("\t")
                break
        else:
            raise ValueError(f"{path} has no column header")
    data = np.loadtxt(path, comments="#", delimiter="\t", ndmin=2)
    return {c: data[:, j] for j, c in enumerate(cols)}


def write_manifest(outdir: Path, manifest: dict) -> None:
    atomic_write(Path(outdir) / "manifest.json",
                 json.dumps(manifest, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serialisable: {type(obj)}")
