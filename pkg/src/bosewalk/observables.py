"""Measured quantities: densities, occupation-resolved densities, entanglement.

Functions taking a :class:`QuantumState` have batched counterparts prefixed
with ``batch_`` that accept an amplitude array of shape (T, dim).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fock import FockBasis, QuantumState

EDGE_WINDOW = 2
LEAK_THRESHOLD = 1e-4
EIG_CUTOFF = 1e-14


@dataclass(frozen=True)
class DensityProfile:
    """Site-resolved density; ``components[k]`` is n_k, k = 1..N, when computed."""

    sites: np.ndarray
    n: np.ndarray
    components: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return float(self.n.sum())


def _probabilities(amps: np.ndarray) -> np.ndarray:
    return amps.real ** 2 + amps.imag ** 2


def batch_density(basis: FockBasis, amps: np.ndarray) -> np.ndarray:
    """n(i) for each row of ``amps``; returns shape (T, M)."""
    return _probabilities(np.atleast_2d(amps)) @ basis.states


def batch_components(basis: FockBasis, amps: np.ndarray) -> dict[int, np.ndarray]:
    """n_k(i) = k * P(n_i = k) for k = 1..N, each of shape (T, M)."""
    prob = _probabilities(np.atleast_2d(amps))
    occ = basis.states
    return {k: prob @ (k * (occ == k)) for k in range(1, basis.N + 1)}


def batch_pair_density(basis: FockBasis, amps: np.ndarray) -> np.ndarray:
    """<a_i^dag a_i^dag a_i a_i> = <n_i (n_i - 1)>, shape (T, M)."""
    occ = basis.states
    return _probabilities(np.atleast_2d(amps)) @ (occ * (occ - 1))


def density(state: QuantumState) -> DensityProfile:
    return DensityProfile(state.basis.lattice.sites,
                          batch_density(state.basis, state.amplitudes)[0])


def density_components(state: QuantumState) -> DensityProfile:
    basis = state.basis
    comps = {k: v[0] for k, v in batch_components(basis, state.amplitudes).items()}
    return DensityProfile(basis.lattice.sites,
                          batch_density(basis, state.amplitudes)[0], comps)


# ---------------------------------------------------------------- entanglement

@dataclass(frozen=True)
class Bipartition:
    """Fock states split into (left configuration, right configuration).

    ``A`` holds sites ``lo..cut`` and ``B`` holds ``cut+1..hi``. Because the
    particle number in A is conserved by the split, the coefficient matrix is
    block diagonal in ``n_A``; each block is stored as index arrays.
    """

    cut: int
    n_left: np.ndarray
    left_index: np.ndarray
    right_index: np.ndarray
    left_configs: dict[int, np.ndarray]
    right_configs: dict[int, np.ndarray]


@lru_cache(maxsize=32)
def bipartition(basis: FockBasis, cut: int) -> Bipartition:
    lat = basis.lattice
    if not lat.lo <= cut < lat.hi:
        raise ValueError(f"cut after site {cut} is not strictly inside [{lat.lo}, {lat.hi}]")
    split = lat.storage_index(cut) + 1
    left, right = basis.states[:, :split], basis.states[:, split:]
    n_left = left.sum(axis=1)
    left_index = np.empty(basis.dim, dtype=np.int64)
    right_index = np.empty(basis.dim, dtype=np.int64)
    lconf, rconf = {}, {}
    for nA in range(basis.N + 1):
        rows = np.nonzero(n_left == nA)[0]
        if rows.size == 0:
            continue
        lconf[nA], left_index[rows] = np.unique(left[rows], axis=0, return_inverse=True)
        rconf[nA], right_index[rows] = np.unique(right[rows], axis=0, return_inverse=True)
    return Bipartition(cut, n_left, left_index, right_index, lconf, rconf)


def _coefficient_blocks(basis: FockBasis, amps: np.ndarray, cut: int):
    """Yield (n_A, C) with C of shape (T, dim_A, dim_B) for each particle sector."""
    bp = bipartition(basis, cut)
    amps = np.atleast_2d(amps)
    T = amps.shape[0]
    for nA, lconf in bp.left_configs.items():
        rows = np.nonzero(bp.n_left == nA)[0]
        C = np.zeros((T, len(lconf), len(bp.right_configs[nA])), dtype=np.complex128)
        C[:, bp.left_index[rows], bp.right_index[rows]] = amps[:, rows]
        yield nA, C


def batch_schmidt_weights(basis: FockBasis, amps: np.ndarray, cut: int) -> np.ndarray:
    """Eigenvalues of rho_A for each row, shape (T, rank_max), zero padded."""
    pieces = []
    for _, C in _coefficient_blocks(basis, amps, cut):
        s = np.linalg.svd(C, compute_uv=False)
        pieces.append(s ** 2)
    return np.concatenate(pieces, axis=1)


def _entropy_from_weights(p: np.ndarray) -> np.ndarray:
    p = np.where(p > EIG_CUTOFF, p, 1.0)
    return -(p * np.log(p)).sum(axis=-1)


def batch_entropy(basis: FockBasis, amps: np.ndarray, cut: int = 0) -> np.ndarray:
    """Von Neumann entropy (natural log) of the left block ``lo..cut``."""
    return _entropy_from_weights(batch_schmidt_weights(basis, amps, cut))


def reduced_density_matrix(state: QuantumState, cut: int = 0, keep: str = "A") -> np.ndarray:
    """Dense rho over all configurations of the kept side, ordered by sector."""
    if keep not in ("A", "B"):
        raise ValueError("keep must be 'A' or 'B'")
    blocks = []
    for _, C in _coefficient_blocks(state.basis, state.amplitudes, cut):
        C = C[0]
        blocks.append(C @ C.conj().T if keep == "A" else C.T @ C.conj())
    dim = sum(b.shape[0] for b in blocks)
    rho = np.zeros((dim, dim), dtype=np.complex128)
    o = 0
    for b in blocks:
        k = b.shape[0]
        rho[o:o + k, o:o + k] = b
        o += k
    return rho


def entanglement_entropy(state: QuantumState, cut: int = 0, keep: str = "A") -> float:
    """S = -Tr rho log rho for the bipartition after site ``cut``."""
    if keep == "A":
        return float(batch_entropy(state.basis, state.amplitudes, cut)[0])
    p = np.linalg.eigvalsh(reduced_density_matrix(state, cut, keep))
    return float(_entropy_from_weights(p))


# ------------------------------------------------------------ packet statistics

def batch_packet_statistics(profiles: np.ndarray, sites: np.ndarray,
                            window: int = EDGE_WINDOW):
    """Centroid, width and edge weight for each row of ``profiles`` (T, M).

    Moments are normalised by the row sum, so n_k components give their own
    centroid and width. Rows with zero weight give NaN moments.
    """
    prof = np.atleast_2d(profiles)
    w = prof.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = prof @ sites / w
        var = prof @ (sites.astype(float) ** 2) / w - c ** 2
    width = np.sqrt(np.clip(var, 0.0, None))
    leak = prof[:, :window].sum(axis=1) + prof[:, -window:].sum(axis=1)
    return c, width, leak


def packet_statistics(profile: DensityProfile, window: int = EDGE_WINDOW):
    """(centroid, width, edge_leakage) of the total density."""
    c, w, leak = batch_packet_statistics(profile.n, profile.sites, window)
    return float(c[0]), float(w[0]), float(leak[0])


def dominant_frequency(times: np.ndarray, series: np.ndarray) -> float:
    """Angular frequency of the largest non-zero FFT bin of a uniformly sampled series.

    Sample over a whole number of periods, excluding the endpoint, so the
    frequencies of interest sit exactly on bins. NaN for a constant series.
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(series, dtype=float)
    if t.size < 4 or np.ptp(x) < 1e-12:
        return float("nan")
    dt = t[1] - t[0]
    if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
        raise ValueError("dominant_frequency needs a uniform time grid")
    power = np.abs(np.fft.rfft(x - x.mean()))
    k = 1 + int(np.argmax(power[1:]))
    return float(2.0 * np.pi * np.fft.rfftfreq(t.size, dt)[k])


def growth_rate(times: np.ndarray, series: np.ndarray) -> float:
    """Least-squares slope of ``series`` against ``times``."""
    return float(np.polyfit(np.asarray(times, float), np.asarray(series, float), 1)[0])
