"""Exact diagonalisation and spectral time propagation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg

from .fock import FockBasis, QuantumState
from .hamiltonian import HermitianOperator, ModelParams, build_hamiltonian
from . import observables as obs

RESIDUAL_TOL = 1e-10
BUILTIN_OBSERVERS = ("density", "components", "entropy", "statistics", "norm", "energy")


class EigensolverError(RuntimeError):
    pass


class EdgeLeakWarning(UserWarning):
    """Density reached the open boundary; later samples are unreliable."""


@dataclass(frozen=True)
class SpectralDecomposition:
    operator: HermitianOperator
    energies: np.ndarray
    vectors: np.ndarray
    residual: float
    orthonormality_error: float

    @property
    def basis(self) -> FockBasis:
        return self.operator.basis

    def overlaps(self, ini: QuantumState) -> np.ndarray:
        if ini.basis is not self.basis:
            raise ValueError("initial state and Hamiltonian use different bases")
        return self.vectors.T @ ini.amplitudes


def diagonalize(H: HermitianOperator, check: bool = True) -> SpectralDecomposition:
    """Full eigendecomposition, energies ascending.

    With ``check`` the per-column residual ``|H v - E v|`` is verified against
    ``1e-10 * ||H||_F`` and the eigenvector matrix against orthonormality.
    """
    A = H.matrix
    fro = float(np.linalg.norm(A))
    try:
        E, V = scipy.linalg.eigh(A, driver="evd", check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(
            f"eigh failed for dim={A.shape[0]}, ||H||_F={fro:.6g}: {exc}") from exc
    residual = orth = float("nan")
    if check:
        residual = float(np.abs(A @ V - V * E).max(axis=0).max()) if A.size else 0.0
        orth = float(np.abs(V.T @ V - np.eye(len(E))).max()) if A.size else 0.0
        scale = max(fro, 1.0)
        if residual > RESIDUAL_TOL * scale or orth > RESIDUAL_TOL:
            raise EigensolverError(
                f"inaccurate eigendecomposition: dim={len(E)}, ||H||_F={fro:.6g}, "
                f"residual={residual:.3e}, orthonormality error={orth:.3e}")
    E.setflags(write=False)
    V.setflags(write=False)
    return SpectralDecomposition(H, E, V, residual, orth)


def evolve_amplitudes(spec: SpectralDecomposition, ini: QuantumState,
                      times: np.ndarray) -> np.ndarray:
    """Amplitudes at each time, shape (T, dim)."""
    c = spec.overlaps(ini)
    t = np.atleast_1d(np.asarray(times, dtype=float))
    phases = np.exp(-1j * np.outer(t, spec.energies)) * c
    return phases @ spec.vectors.T


def evolve(spec: SpectralDecomposition, ini: QuantumState, t: float) -> QuantumState:
    """|psi(t)> = sum_m <psi_m|ini> exp(-i E_m t) |psi_m>."""
    amps = evolve_amplitudes(spec, ini, np.array([t]))[0]
    return QuantumState(ini.basis, amps, ini.time + t)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform instants ``0, dt, ..., t_max`` unless explicit ``times`` are given."""

    t_max: float
    dt: float = 0.1
    times: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.times is not None:
            t = np.asarray(self.times, dtype=float)
            if t.ndim != 1 or t.size == 0 or np.any(np.diff(t) <= 0) or t[0] < 0:
                raise ValueError("explicit times must be a non-empty increasing sequence >= 0")
            return
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_max >= self.dt:
            raise ValueError(f"t_max ({self.t_max}) must be >= dt ({self.dt})")

    @classmethod
    def explicit(cls, times: Sequence[float]) -> "TimeGrid":
        t = tuple(float(x) for x in times)
        return cls(t_max=max(t) if t else 0.0, dt=0.0, times=t)

    @property
    def instants(self) -> np.ndarray:
        if self.times is not None:
            return np.asarray(self.times, dtype=float)
        n = int(np.floor(self.t_max / self.dt + 1e-9))
        return self.dt * np.arange(n + 1)

    def __len__(self):
        return len(self.instants)


@dataclass
class ObservableSeries:
    """Observables sampled on a time grid.

    ``data`` maps observable names to arrays whose first axis is time:
    ``density`` and ``n1``.. ``nN`` are (T, M); ``entropy``, ``centroid``,
    ``width``, ``leakage``, ``norm``, ``energy`` are (T,). Component moments
    appear as ``centroid_n2`` etc.
    """

    times: np.ndarray
    sites: np.ndarray
    N: int
    data: dict[str, np.ndarray] = field(default_factory=dict)
    leak_flagged: bool = False
    leak_time: float | None = None
    halted: bool = False

    def __getitem__(self, key: str) -> np.ndarray:
        return self.data[key]

    def __contains__(self, key: str) -> bool:
        return key in self.data

    def __len__(self):
        return len(self.times)

    def at(self, t: float) -> int:
        """Index of the sample closest to time ``t``."""
        return int(np.argmin(np.abs(self.times - t)))


def _chunks(n: int, size: int) -> Iterator[slice]:
    for start in range(0, n, size):
        yield slice(start, min(start + size, n))


def run_evolution(spec: SpectralDecomposition, ini: QuantumState, grid: TimeGrid,
                  observers: Sequence = ("density",), *, cut: int = 0,
                  leak_threshold: float = obs.LEAK_THRESHOLD, halt_on_leak: bool = True,
                  chunk: int | None = None) -> ObservableSeries:
    """Propagate ``ini`` over ``grid`` and record observers at each instant.

    ``observers`` holds built-in names (see ``BUILTIN_OBSERVERS``) or
    ``(name, callable)`` pairs; callables receive a :class:`QuantumState`.
    The total density is always recorded because it feeds the edge-leak
    monitor. When the outermost sites hold at least ``leak_threshold`` the
    series is flagged; with ``halt_on_leak`` it is also truncated after the
    offending instant.
    """
    basis = ini.basis
    names = set()
    custom = []
    for o in observers:
        if isinstance(o, str):
            if o not in BUILTIN_OBSERVERS:
                raise ValueError(f"unknown observer {o!r}")
            names.add(o)
        else:
            custom.append(o)

    times = grid.instants
    T = len(times)
    sites = basis.lattice.sites
    if chunk is None:
        chunk = max(1, min(T, 2_000_000 // max(basis.dim, 1)))

    data: dict[str, np.ndarray] = {"density": np.empty((T, basis.M)),
                                   "leakage": np.empty(T)}
    if "components" in names:
        for k in range(1, basis.N + 1):
            data[f"n{k}"] = np.empty((T, basis.M))
    if "entropy" in names:
        data["entropy"] = np.empty(T)
    if "statistics" in names:
        data["centroid"] = np.empty(T)
        data["width"] = np.empty(T)
        if "components" in names:
            for k in range(1, basis.N + 1):
                data[f"centroid_n{k}"] = np.empty(T)
                data[f"width_n{k}"] = np.empty(T)
    if "norm" in names:
        data["norm"] = np.empty(T)
    if "energy" in names:
        data["energy"] = np.empty(T)
    for name, _ in custom:
        data[name] = [None] * T

    stop = T
    for sl in _chunks(T, chunk):
        amps = evolve_amplitudes(spec, ini, times[sl])
        dens = obs.batch_density(basis, amps)
        c, w, leak = obs.batch_packet_statistics(dens, sites)
        data["density"][sl] = dens
        data["leakage"][sl] = leak
        if "statistics" in names:
            data["centroid"][sl] = c
            data["width"][sl] = w
        if "components" in names:
            for k, nk in obs.batch_components(basis, amps).items():
                data[f"n{k}"][sl] = nk
                if "statistics" in names:
                    ck, wk, _ = obs.batch_packet_statistics(nk, sites)
                    data[f"centroid_n{k}"][sl] = ck
                    data[f"width_n{k}"][sl] = wk
        if "entropy" in names:
            data["entropy"][sl] = obs.batch_entropy(basis, amps, cut)
        if "norm" in names:
            data["norm"][sl] = np.linalg.norm(amps, axis=1)
        if "energy" in names:
            Hpsi = amps @ spec.operator.matrix
            data["energy"][sl] = np.einsum("ti,ti->t", amps.conj(), Hpsi).real
        for name, fn in custom:
            for j, t in zip(range(sl.start, sl.stop), times[sl]):
                data[name][j] = fn(QuantumState(basis, amps[j - sl.start], ini.time + t))
        hits = np.nonzero(leak >= leak_threshold)[0]
        if hits.size and halt_on_leak:
            stop = sl.start + int(hits[0]) + 1
            break

    for name, _ in custom:
        data[name] = np.asarray(data[name][:stop] if stop < T else data[name])
    series = ObservableSeries(times[:stop].copy(), sites.copy(), basis.N,
                              {k: v[:stop] for k, v in data.items()})
    hits = np.nonzero(series.data["leakage"] >= leak_threshold)[0]
    if hits.size:
        series.leak_flagged = True
        series.leak_time = float(series.times[hits[0]])
        series.halted = halt_on_leak and stop < T
        warnings.warn(
            f"edge leakage {series.data['leakage'][hits[0]]:.2e} >= {leak_threshold:.0e} "
            f"at t={series.leak_time:g}" + (" (evolution halted)" if series.halted else ""),
            EdgeLeakWarning, stacklevel=2)
    return series


def simulate(basis: FockBasis, params: ModelParams, ini: QuantumState, grid: TimeGrid,
             observers: Sequence = ("density",), **kwargs):
    """Build H, diagonalise and evolve: one full single-realisation pipeline.

    Returns ``(series, decomposition)``.
    """
    spec = diagonalize(build_hamiltonian(basis, params))
    return run_evolution(spec, ini, grid, observers, **kwargs), spec
