"""
Running a bundled experiment from the command line
==================================================

Every figure setup ships as a config file. ``bosewalk run`` writes density
tables (one row per instant, one column per site), a scalar series table and
a JSON manifest with everything needed to reproduce the run. Here we drive
the same entry point from Python, then read the tables back.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from bosewalk import cli
from bosewalk.output import read_scalars, read_table
from _plot import heatmap

out = Path(tempfile.mkdtemp()) / "fig2d"
status = cli.main(["run", "fig2d", "--output-dir", str(out)])
print("exit status", status, "| files:", sorted(p.name for p in out.iterdir()))

manifest = json.loads((out / "manifest.json").read_text())
print("basis dimension", manifest["basis_dimension"],
      "| max eigensolver residual", f"{manifest['eigensolver']['max_residual']:.1e}",
      "| edge leak", manifest["edge_leak"]["flagged"])

times, sites, n2 = read_table(out / "n2.tsv")
scalars = read_scalars(out / "scalars.tsv")
print("n2 width at the last instant:", round(float(scalars["width_n2"][-1]), 3))
print("first header lines of n2.tsv:")
print("".join((out / "n2.tsv").read_text().splitlines(keepends=True)[:2]), end="")

heatmap("cli_fig2d_n2", times, sites, n2, "fig2d, n2")

# a parameter sweep writes one directory per value plus summary.tsv, e.g.
#   bosewalk sweep fig9a --param lambda --values 0.5,1,2,3 --workers 4
