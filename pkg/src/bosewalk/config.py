"""Experiment configuration files.

A config is an INI file of flat sections::

    [lattice]
    L = 40

    [particles]
    N = 2

    [model]
    U = 2.0
    F = 0.1

    [initial]
    type = adjacent

    [grid]
    t_max = 30
    dt = 0.1

Every key is optional and falls back to ``SCHEMA``; unknown sections or keys
are errors. The ``[ensemble]`` section switches the run to a disorder
ensemble over the phase ``phi``. Lists are comma separated.
"""

from __future__ import annotations

import configparser
import io
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .dynamics import BUILTIN_OBSERVERS, TimeGrid
from .ensemble import EnsembleSpec
from .fock import DEFAULT_MAX_DIM, MAX_PARTICLES, InitialSpec, build_basis
from .hamiltonian import GOLDEN_TAU, ModelParams
from .observables import LEAK_THRESHOLD

FORMATS = ("tsv", "npz")

# section -> key -> (type, default); type is one of int, float, bool, str, "ints", "strs"
SCHEMA: dict[str, dict[str, tuple[Any, Any]]] = {
    "lattice": {"L": (int, 40), "max_dim": (int, DEFAULT_MAX_DIM)},
    "particles": {"N": (int, 1)},
    "model": {"J": (float, 1.0), "U": (float, 0.0), "F": (float, 0.0), "V": (float, 0.0),
              "alpha": (float, 3.0), "lambda": (float, 0.0), "tau": (float, GOLDEN_TAU),
              "phi": (float, 0.0)},
    "initial": {"type": (str, "localized"), "k0": (int, 0), "sigma2": (float, 25.0),
                "sites": ("ints", ())},
    "grid": {"t_max": (float, 10.0), "dt": (float, 0.1),
             "leak_threshold": (float, LEAK_THRESHOLD), "halt_on_leak": (bool, True)},
    "ensemble": {"n_realizations": (int, 100), "seed": (int, 0)},
    "observables": {"density": (bool, True), "components": (bool, True),
                    "entropy": (bool, False), "cut": (int, 0), "statistics": (bool, True)},
    "output": {"directory": (str, ""), "formats": ("strs", ("tsv",))},
}


class ConfigError(ValueError):
    def __init__(self, message: str, section: str | None = None, key: str | None = None,
                 line: int | None = None):
        where = ""
        if section:
            where = f"[{section}]" + (f" {key}" if key else "")
        if line:
            where = f"line {line}: {where}"
        super().__init__(f"{where}: {message}" if where else message)
        self.section, self.key, self.line = section, key, line


def _locate(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return n
            continue
        if current == section and key is not None:
            k = re.split(r"[=:]", line, maxsplit=1)[0].strip()
            if k == key:
                return n
    return None


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _convert(kind, raw: str):
    raw = raw.strip()
    if kind is bool:
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    if kind is str:
        return raw
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if kind == "ints":
        return tuple(int(p) for p in parts)
    return tuple(parts)


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved configuration: every schema key present with a typed value."""

    values: dict
    ensemble_enabled: bool = False
    name: str = "experiment"

    def __getitem__(self, section: str) -> dict:
        return self.values[section]

    # -- builders -----------------------------------------------------------
    def basis(self):
        return build_basis(self["lattice"]["L"], self["particles"]["N"],
                           max_dim=self["lattice"]["max_dim"])

    def params(self) -> ModelParams:
        m = self["model"]
        return ModelParams(J=m["J"], U=m["U"], F=m["F"], V=m["V"], alpha=m["alpha"],
                           lam=m["lambda"], tau=m["tau"], phi=m["phi"])

    def initial(self) -> InitialSpec:
        i = self["initial"]
        return InitialSpec(i["type"], i["k0"], i["sigma2"], tuple(i["sites"]))

    def grid(self) -> TimeGrid:
        return TimeGrid(self["grid"]["t_max"], self["grid"]["dt"])

    def ensemble(self) -> EnsembleSpec | None:
        if not self.ensemble_enabled:
            return None
        e = self["ensemble"]
        return EnsembleSpec(e["n_realizations"], e["seed"])

    def observers(self) -> tuple[str, ...]:
        o = self["observables"]
        names = ["density"]
        for key in ("components", "entropy", "statistics"):
            if o[key]:
                names.append(key)
        return tuple(names)

    def replace(self, section: str, key: str, value) -> "ExperimentConfig":
        """Copy with one key overridden; the result is re-validated."""
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError("unknown key", section, key)
        values = {s: dict(v) for s, v in self.values.items()}
        kind = SCHEMA[section][key][0]
        values[section][key] = _convert(kind, value) if isinstance(value, str) else value
        if kind is float:
            values[section][key] = float(values[section][key])
        cfg = ExperimentConfig(values, self.ensemble_enabled or section == "ensemble", self.name)
        validate(cfg)
        return cfg

    # -- serialisation ------------------------------------------------------
    def dumps(self) -> str:
        out = io.StringIO()
        for section, keys in SCHEMA.items():
            if section == "ensemble" and not self.ensemble_enabled:
                continue
            out.write(f"[{section}]\n")
            for key in keys:
                out.write(f"{key} = {_format(self.values[section][key])}\n")
            out.write("\n")
        return out.getvalue()

    def to_dict(self) -> dict:
        d = {s: {k: (list(v) if isinstance(v, tuple) else v) for k, v in keys.items()}
             for s, keys in self.values.items()
             if s != "ensemble" or self.ensemble_enabled}
        return d


def loads(text: str, name: str = "experiment") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="\0none")
    parser.optionxform = str  # keys are case sensitive (L, N, U ...)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(str(exc).splitlines()[0], line=line) from None

    values = {s: {k: d for k, (_, d) in keys.items()} for s, keys in SCHEMA.items()}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError("unknown section", section, line=_locate(text, section))
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError("unknown key", section, key, _locate(text, section, key))
            kind = SCHEMA[section][key][0]
            try:
                values[section][key] = _convert(kind, raw)
            except ValueError as exc:
                raise ConfigError(str(exc), section, key, _locate(text, section, key)) from None
    cfg = ExperimentConfig(values, parser.has_section("ensemble"), name)
    validate(cfg, text)
    return cfg


def load(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    return loads(path.read_text(), name=path.stem)


def bundled_names() -> list[str]:
    root = resources.files("bosewalk") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def resolve(spec: str | Path) -> ExperimentConfig:
    """Load a config file, or a bundled config by name (``fig1a``)."""
    path = Path(spec)
    if path.exists():
        return load(path)
    res = resources.files("bosewalk") / "configs" / f"{spec}.cfg"
    if res.is_file():
        return loads(res.read_text(), name=str(spec))
    raise ConfigError(f"no such config file or bundled config: {spec}")


def validate(cfg: ExperimentConfig, text: str = "") -> None:
    def fail(section, key, msg):
        raise ConfigError(msg, section, key, _locate(text, section, key) if text else None)

    v = cfg.values
    L = v["lattice"]["L"]
    if L < 1:
        fail("lattice", "L", "must be >= 1")
    if v["lattice"]["max_dim"] < 1:
        fail("lattice", "max_dim", "must be >= 1")
    N = v["particles"]["N"]
    if not 1 <= N <= MAX_PARTICLES:
        fail("particles", "N", f"must be in 1..{MAX_PARTICLES}")

    m = v["model"]
    if not m["J"] > 0:
        fail("model", "J", "must be positive")
    if m["lambda"] < 0:
        fail("model", "lambda", "must be >= 0")
    if m["V"] != 0 and not m["alpha"] > 0:
        fail("model", "alpha", "must be positive when V != 0")
    if not 0 <= m["phi"] < 1:
        fail("model", "phi", "must lie in [0, 1)")

    i = v["initial"]
    if i["type"] not in InitialSpec.KINDS:
        fail("initial", "type", f"must be one of {', '.join(InitialSpec.KINDS)}")
    if not -L <= i["k0"] <= L:
        fail("initial", "k0", f"outside lattice [-{L}, {L}]")
    if i["sigma2"] < 0:
        fail("initial", "sigma2", "must be >= 0")
    if i["type"] == "sites":
        if len(i["sites"]) != N:
            fail("initial", "sites", f"needs exactly N = {N} entries")
    if i["type"] != "gaussian":
        try:
            sites = InitialSpec(i["type"], i["k0"], i["sigma2"], i["sites"]).occupied_sites(N)
        except ValueError as exc:
            fail("initial", "type", str(exc))
        if any(not -L <= s <= L for s in sites):
            fail("initial", "sites" if i["type"] == "sites" else "k0",
                 f"initial occupation {sites} leaves the lattice")

    g = v["grid"]
    if not g["dt"] > 0:
        fail("grid", "dt", "must be positive")
    if not g["t_max"] >= g["dt"]:
        fail("grid", "t_max", "must be >= dt")
    if not g["leak_threshold"] > 0:
        fail("grid", "leak_threshold", "must be positive")

    e = v["ensemble"]
    if e["n_realizations"] < 1:
        fail("ensemble", "n_realizations", "must be >= 1")
    if not 0 <= e["seed"] < 2 ** 64:
        fail("ensemble", "seed", "must be a non-negative 64-bit integer")

    o = v["observables"]
    if not -L <= o["cut"] < L:
        fail("observables", "cut", f"bond after site cut must satisfy -{L} <= cut < {L}")

    out = v["output"]
    bad = [f for f in out["formats"] if f not in FORMATS]
    if bad or not out["formats"]:
        fail("output", "formats", f"formats must be a non-empty subset of {FORMATS}")
    assert set(cfg.observers()) <= set(BUILTIN_OBSERVERS)
