"""Quasiperiodic-disorder ensembles over the phase phi.

Realisation ``r`` always gets the phase ``phase(seed, r)`` no matter how
many workers run or in which order, and the reduction is a sequential pass
in increasing ``r``. Every realisation is computed with BLAS restricted to
one thread so results are bit-identical between serial and pooled runs.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .dynamics import EdgeLeakWarning, ObservableSeries, TimeGrid, simulate
from .fock import FockBasis, InitialSpec, build_basis
from .hamiltonian import ModelParams
from .observables import LEAK_THRESHOLD


def phase(seed: int, r: int) -> float:
    """Disorder phase in [0, 1) for realisation ``r``.

    Drawn from a Philox counter-based generator keyed by
    ``SeedSequence(seed, spawn_key=(r,))``: a pure function of (seed, r).
    """
    if r < 0:
        raise ValueError("realisation index must be >= 0")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(r),))
    return float(np.random.Generator(np.random.Philox(ss)).random())


@dataclass(frozen=True)
class EnsembleSpec:
    n_realizations: int = 100
    seed: int = 0

    def __post_init__(self):
        if int(self.n_realizations) != self.n_realizations or self.n_realizations < 1:
            raise ValueError(f"n_realizations must be a positive integer, got {self.n_realizations!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def indices(self) -> range:
        return range(self.n_realizations)


@dataclass
class AveragedSeries:
    """Pointwise mean and standard error of every observable over realisations."""

    mean: ObservableSeries
    stderr: dict[str, np.ndarray]
    count: int
    indices: tuple[int, ...]
    phases: np.ndarray
    flagged: list[int] = field(default_factory=list)
    max_residual: float = 0.0

    @property
    def flagged_fraction(self) -> float:
        return len(self.flagged) / self.count

    def merge(self, other: "AveragedSeries") -> "AveragedSeries":
        """Combine two ensembles over disjoint realisation sets."""
        if set(self.indices) & set(other.indices):
            raise ValueError("realisation sets overlap")
        n1, n2 = self.count, other.count
        n = n1 + n2
        mean, err = {}, {}
        for k, m1 in self.mean.data.items():
            m2 = other.mean.data[k]
            m = (n1 * m1 + n2 * m2) / n
            # Chan et al. pairwise update of the sum of squared deviations
            ss1 = _sum_sq(self.stderr[k], n1)
            ss2 = _sum_sq(other.stderr[k], n2)
            ss = ss1 + ss2 + (m2 - m1) ** 2 * n1 * n2 / n
            mean[k] = m
            err[k] = np.sqrt(ss / (n - 1) / n)
        order = np.argsort(np.concatenate([self.indices, other.indices]), kind="stable")
        series = ObservableSeries(self.mean.times, self.mean.sites, self.mean.N, mean,
                                  self.mean.leak_flagged or other.mean.leak_flagged)
        return AveragedSeries(
            series, err, n,
            tuple(np.concatenate([self.indices, other.indices])[order].tolist()),
            np.concatenate([self.phases, other.phases])[order],
            sorted(self.flagged + other.flagged),
            max(self.max_residual, other.max_residual))


def _sum_sq(stderr: np.ndarray, n: int) -> np.ndarray:
    if n < 2:
        return np.zeros_like(stderr, dtype=float)
    return stderr ** 2 * n * (n - 1)


def _realization(job):
    basis, params, ini, grid, observers, cut, leak_threshold, seed, r = job
    phi = phase(seed, r)
    with threadpool_limits(limits=1), warnings.catch_warnings():
        warnings.simplefilter("ignore", EdgeLeakWarning)
        series, spec = simulate(basis, params.with_phase(phi), ini.build(basis), grid,
                                observers, cut=cut, leak_threshold=leak_threshold,
                                halt_on_leak=False)
    return r, phi, series, spec.residual


_BASIS_CACHE: dict = {}


def _pool_job(job):
    # workers rebuild the basis once instead of unpickling it per realisation
    (L, N, max_dim), rest = job[0], job[1:]
    key = (L, N, max_dim)
    if key not in _BASIS_CACHE:
        _BASIS_CACHE[key] = build_basis(L, N, max_dim)
    return _realization((_BASIS_CACHE[key],) + rest)


def run_ensemble(basis: FockBasis, params: ModelParams, ini: InitialSpec, grid: TimeGrid,
                 spec: EnsembleSpec, observers: Sequence[str] = ("density", "statistics"), *,
                 indices: Iterable[int] | None = None, workers: int = 1, cut: int = 0,
                 leak_threshold: float = LEAK_THRESHOLD) -> AveragedSeries:
    """Average observables over disorder phases ``phase(spec.seed, r)``.

    ``params.phi`` is ignored. ``indices`` overrides ``spec.indices`` (for
    splitting one ensemble into parts); duplicates are rejected. Realisations
    whose density touched the boundary are listed in ``flagged`` and the run
    carries on.
    """
    idx = sorted(spec.indices if indices is None else indices)
    if not idx or len(set(idx)) != len(idx) or idx[0] < 0:
        raise ValueError("realisation indices must be distinct non-negative integers")
    for o in observers:
        if not isinstance(o, str):
            raise TypeError("ensembles only accept built-in observer names")

    results: dict[int, tuple] = {}
    if workers <= 1:
        for r in idx:
            out = _realization((basis, params, ini, grid, tuple(observers), cut,
                                leak_threshold, spec.seed, r))
            results[r] = out[1:]
    else:
        lat = basis.lattice
        if lat.n_sites is not None:
            raise ValueError("parallel ensembles need a standard 2L+1 lattice")
        key = (lat.L, basis.N, basis.max_dim)
        jobs = [(key, params, ini, grid, tuple(observers), cut, leak_threshold, spec.seed, r)
                for r in idx]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for out in pool.map(_pool_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))):
                results[out[0]] = out[1:]

    # deterministic reduction: slots in increasing realisation index
    phases = np.array([results[r][0] for r in idx])
    runs = [results[r][1] for r in idx]
    keys = list(runs[0].data)
    n = len(idx)
    mean, err = {}, {}
    for k in keys:
        stack = np.stack([s.data[k] for s in runs])
        mean[k] = stack.mean(axis=0)
        err[k] = (stack.std(axis=0, ddof=1) / np.sqrt(n)) if n > 1 else np.full_like(mean[k], np.nan)
    if n == 1:
        mean = {k: runs[0].data[k].copy() for k in keys}
    flagged = [r for r, s in zip(idx, runs) if s.leak_flagged]
    series = ObservableSeries(runs[0].times.copy(), runs[0].sites.copy(), basis.N, mean,
                              leak_flagged=bool(flagged))
    if flagged:
        warnings.warn(f"{len(flagged)}/{n} realisations reached the lattice edge",
                      EdgeLeakWarning, stacklevel=2)
    return AveragedSeries(series, err, n, tuple(idx), phases, flagged,
                          max(results[r][2] for r in idx))
