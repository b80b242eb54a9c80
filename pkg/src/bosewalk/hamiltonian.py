"""Dense Bose-Hubbard Hamiltonian with tilt, long-range and quasiperiodic terms."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from math import sqrt

import numpy as np

from .fock import FockBasis, LatticeSpec

GOLDEN_TAU = (sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ModelParams:
    """Couplings, in units of the tunnelling ``J``.

    ``V`` and ``alpha`` set ``V * sum_i sum_{k != 0} n_i n_{i+k} / |k|**alpha``, a sum
    over both signs of ``k``, so every pair at distance d carries ``2 V / d**alpha``;
    ``lam``, ``tau`` and ``phi`` the on-site energies ``lam * cos(2 pi (tau i + phi))``.
    """

    J: float = 1.0
    U: float = 0.0
    F: float = 0.0
    V: float = 0.0
    alpha: float = 3.0
    lam: float = 0.0
    tau: float = GOLDEN_TAU
    phi: float = 0.0

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError(f"J must be positive, got {self.J}")
        if self.V != 0 and not self.alpha > 0:
            raise ValueError(f"alpha must be positive when V != 0, got {self.alpha}")
        if self.lam < 0:
            raise ValueError(f"disorder amplitude must be non-negative, got {self.lam}")

    def with_phase(self, phi: float) -> "ModelParams":
        return replace(self, phi=phi)

    def asdict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class HermitianOperator:
    """Real symmetric matrix acting on ``basis``."""

    basis: FockBasis
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectation(self, amplitudes: np.ndarray) -> float:
        return float(np.real(np.vdot(amplitudes, self.matrix @ amplitudes)))


def disorder_profile(lattice: LatticeSpec, lam: float, tau: float = GOLDEN_TAU,
                     phi: float = 0.0) -> np.ndarray:
    """On-site energies ``lam * cos(2 pi (tau i + phi))`` for ``i = -L..L``."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    if lam == 0:
        return np.zeros(lattice.M)
    return lam * np.cos(2.0 * np.pi * (tau * lattice.sites + phi))


def diagonal_energies(basis: FockBasis, params: ModelParams) -> np.ndarray:
    occ = basis.states.astype(float)
    sites = basis.lattice.sites.astype(float)
    eps = params.F * sites + disorder_profile(basis.lattice, params.lam, params.tau, params.phi)
    diag = 0.5 * params.U * (occ * (occ - 1.0)).sum(axis=1) + occ @ eps
    if params.V != 0 and basis.N > 1:
        d = np.abs(np.subtract.outer(sites, sites))
        with np.errstate(divide="ignore"):
            w = np.where(d > 0, d ** (-params.alpha), 0.0)
        # n^T W n with symmetric W visits every pair in both orders
        diag += params.V * ((occ @ w) * occ).sum(axis=1)
    return diag


def hopping_pairs(basis: FockBasis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All right-hops ``a_{i+1}^dag a_i``: returns (target, source, sqrt factor)."""
    pos = basis.positions
    dim, N = pos.shape
    M = basis.M
    targets, sources, amps = [], [], []
    for j in range(N):
        p = pos[:, j]
        # among identical particles only the last one hops (same final state)
        ok = p + 1 < M
        if j + 1 < N:
            ok &= pos[:, j + 1] != p
        src = np.nonzero(ok)[0]
        new = pos[src].copy()
        new[:, j] += 1
        new.sort(axis=1)
        occ = basis.states
        n_from = occ[src, p[src]]
        n_to = occ[src, p[src] + 1]
        targets.append(basis.rank_positions(new))
        sources.append(src)
        amps.append(np.sqrt(n_from * (n_to + 1.0)))
    return np.concatenate(targets), np.concatenate(sources), np.concatenate(amps)


def build_hamiltonian(basis: FockBasis, params: ModelParams) -> HermitianOperator:
    H = np.zeros((basis.dim, basis.dim))
    tgt, src, amp = hopping_pairs(basis)
    H[tgt, src] = -params.J * amp
    H[src, tgt] = -params.J * amp
    H[np.diag_indices(basis.dim)] = diagonal_energies(basis, params)
    H.setflags(write=False)
    return HermitianOperator(basis, H)
