"""Command line experiment runner.

    bosewalk run <config> [--output-dir D] [--workers K] [--seed S]
    bosewalk sweep <config> --param P --values v1,v2,... [--output-dir D] [--workers K]
    bosewalk list

``<config>`` is a path or the name of a bundled config (``fig1a``...).
Relative output directories are placed under ``$BOSEWALK_OUTPUT_ROOT``
(default: the working directory).
"""

from __future__ import annotations

import argparse
import os
import platform
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .config import SCHEMA, ConfigError, ExperimentConfig, bundled_names, resolve
from .dynamics import EdgeLeakWarning, EigensolverError, simulate
from .ensemble import run_ensemble
from .fock import DimensionError
from .observables import dominant_frequency, growth_rate
from .output import atomic_write, write_manifest, write_series

OUTPUT_ROOT_ENV = "BOSEWALK_OUTPUT_ROOT"

EXIT_OK, EXIT_CONFIG, EXIT_DIMENSION, EXIT_EIGENSOLVER = 0, 2, 3, 4

CONVENTIONS = {
    "entropy_log": "natural",
    "entropy_cut": "A = sites -L..cut, B = cut+1..L",
    "ensemble_average": "pointwise in t over realisations; stderr = std(ddof=1)/sqrt(n)",
    "long_range": "V * sum_i sum_{k!=0} |k|^-alpha n_i n_{i+k} (each pair in both orders)",
    "gaussian_exponent": "-(k-k0)^2 / (2 sigma2)",
    "phase_generator": "Philox(SeedSequence(seed, spawn_key=(r,))).random()",
}


def output_dir(cfg: ExperimentConfig, override: str | None) -> Path:
    if override:
        return Path(override)
    d = Path(cfg["output"]["directory"] or cfg.name)
    if d.is_absolute():
        return d
    return Path(os.environ.get(OUTPUT_ROOT_ENV, ".")) / d


def execute(cfg: ExperimentConfig, outdir: Path, workers: int = 1) -> dict:
    """Run one configuration and write its outputs; returns the manifest."""
    t0 = time.perf_counter()
    basis = cfg.basis()
    params, ini, grid = cfg.params(), cfg.initial(), cfg.grid()
    observers = cfg.observers()
    g = cfg["grid"]
    cut = cfg["observables"]["cut"]
    manifest = {
        "name": cfg.name,
        "config": cfg.to_dict(),
        "config_text": cfg.dumps(),
        "version": __version__,
        "environment": {"python": platform.python_version(), "numpy": np.__version__,
                        "scipy": scipy.__version__},
        "basis_dimension": basis.dim,
        "conventions": CONVENTIONS,
    }
    ens = cfg.ensemble()
    if ens is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EdgeLeakWarning)
            series, spec = simulate(basis, params, ini.build(basis), grid, observers, cut=cut,
                                    leak_threshold=g["leak_threshold"],
                                    halt_on_leak=g["halt_on_leak"])
        stderr = None
        manifest["mode"] = "single"
        manifest["eigensolver"] = {"max_residual": spec.residual,
                                   "orthonormality_error": spec.orthonormality_error}
        manifest["edge_leak"] = {"flagged": series.leak_flagged, "time": series.leak_time,
                                 "halted": series.halted, "threshold": g["leak_threshold"]}
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EdgeLeakWarning)
            avg = run_ensemble(basis, params, ini, grid, ens, observers, workers=workers,
                               cut=cut, leak_threshold=g["leak_threshold"])
        series, stderr = avg.mean, avg.stderr
        manifest["mode"] = "ensemble"
        manifest["ensemble"] = {"n_realizations": avg.count, "seed": ens.seed,
                                "phases": avg.phases}
        manifest["eigensolver"] = {"max_residual": avg.max_residual}
        manifest["edge_leak"] = {"flagged_realizations": avg.flagged,
                                 "flagged_fraction": avg.flagged_fraction,
                                 "threshold": g["leak_threshold"]}
    outdir.mkdir(parents=True, exist_ok=True)
    manifest["files"] = write_series(outdir, series, cfg["output"]["formats"], stderr)
    manifest["samples"] = len(series)
    manifest["wall_time_s"] = time.perf_counter() - t0
    write_manifest(outdir, manifest)
    manifest["_series"] = series
    return manifest


def summarize(series) -> dict:
    """Scalar endpoints of one run for the sweep summary."""
    t = series.times
    nan = float("nan")
    row = {
        "final_width": float(series["width"][-1]) if "width" in series else nan,
        "final_entropy": float(series["entropy"][-1]) if "entropy" in series else nan,
        "centroid_frequency": dominant_frequency(t, series["centroid"]) if "centroid" in series else nan,
        "width_frequency": dominant_frequency(t, series["width"]) if "width" in series else nan,
        "n2_width_rate": nan,
    }
    if "width_n2" in series and len(t) >= 4:
        half = t >= t[-1] / 2
        w = series["width_n2"][half]
        ok = np.isfinite(w)
        if ok.sum() >= 2:
            row["n2_width_rate"] = growth_rate(t[half][ok], w[ok])
    return row


SUMMARY_COLUMNS = ("final_width", "final_entropy", "centroid_frequency", "width_frequency",
                   "n2_width_rate")


def find_key(param: str) -> tuple[str, str]:
    if "." in param:
        section, key = param.split(".", 1)
        if section in SCHEMA and key in SCHEMA[section]:
            return section, key
        raise ConfigError(f"unknown parameter {param!r}")
    hits = [(s, param) for s, keys in SCHEMA.items() if param in keys]
    if len(hits) != 1:
        raise ConfigError(f"unknown or ambiguous parameter {param!r}; use section.key")
    section, key = hits[0]
    if SCHEMA[section][key][0] not in (int, float):
        raise ConfigError(f"parameter {param!r} is not a numeric scalar")
    return section, key


def sweep(cfg: ExperimentConfig, param: str, values: list[str], outdir: Path,
          workers: int = 1) -> list[dict]:
    section, key = find_key(param)
    if not values:
        raise ConfigError("sweep needs at least one value")
    configs = [(v, cfg.replace(section, key, v)) for v in values]  # validate all first
    rows = []
    for raw, sub in configs:
        m = execute(sub, outdir / f"{key}={raw}", workers)
        rows.append({"value": float(sub[section][key]), **summarize(m["_series"])})
    lines = [f"# bosewalk sweep summary: {section}.{key}",
             "# value\t" + "\t".join(SUMMARY_COLUMNS)]
    for r in rows:
        lines.append("\t".join(repr(float(r[c])) for c in ("value",) + SUMMARY_COLUMNS))
    atomic_write(outdir / "summary.tsv", "\n".join(lines) + "\n")
    return rows


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bosewalk", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"bosewalk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment")
    r.add_argument("config")
    r.add_argument("--output-dir")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--seed", type=int)

    s = sub.add_parser("sweep", help="run an experiment for several values of one parameter")
    s.add_argument("config")
    s.add_argument("--param", required=True)
    s.add_argument("--values", required=True, help="comma separated list")
    s.add_argument("--output-dir")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--seed", type=int)

    sub.add_parser("list", help="list bundled configs")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        print("\n".join(bundled_names()))
        return EXIT_OK
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        cfg = resolve(args.config)
        if args.seed is not None and cfg.ensemble_enabled:
            cfg = cfg.replace("ensemble", "seed", args.seed)
        out = output_dir(cfg, args.output_dir)
        if args.command == "run":
            m = execute(cfg, out, args.workers)
            print(f"wrote {len(m['files']) + 1} files to {out}")
        else:
            values = [v.strip() for v in args.values.split(",") if v.strip()]
            sweep(cfg, args.param, values, out, args.workers)
            print(f"wrote {len(values)} runs and summary.tsv to {out}")
    except ConfigError as exc:
        print(f"bosewalk: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DimensionError as exc:
        print(f"bosewalk: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except EigensolverError as exc:
        print(f"bosewalk: eigensolver failure: {exc}", file=sys.stderr)
        return EXIT_EIGENSOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
