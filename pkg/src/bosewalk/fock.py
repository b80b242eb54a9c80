"""Fixed-N bosonic Fock space on an open 1D chain and initial states.

Sites carry physical labels ``i = -L..L``; storage index is ``i + L``.
Basis states are ordered descending-lexicographically in their occupation
vectors, which is the same as ascending lexicographic order of the sorted
tuple of particle positions. That second view gives a cheap integer rank.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np

MAX_PARTICLES = 3
DEFAULT_MAX_DIM = 20_000


class DimensionError(ValueError):
    """Requested Hilbert space is larger than the allowed dense cap."""


@dataclass(frozen=True)
class LatticeSpec:
    """Open chain with ``M = 2L + 1`` sites labelled ``-L..L``.

    ``LatticeSpec.chain(M)`` builds an arbitrary-length chain labelled
    ``0..M-1``; it exists for small hand-checkable cases such as two sites.
    """

    L: int
    n_sites: int | None = field(default=None, repr=False)
    first_site: int | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n_sites is None:
            if int(self.L) != self.L or self.L < 1:
                raise ValueError(f"half_length L must be a positive integer, got {self.L!r}")
        elif self.n_sites < 2:
            raise ValueError("a chain needs at least two sites")

    @classmethod
    def chain(cls, M: int, first_site: int = 0) -> "LatticeSpec":
        return cls(L=(M - 1) // 2, n_sites=M, first_site=first_site)

    @property
    def M(self) -> int:
        return 2 * self.L + 1 if self.n_sites is None else self.n_sites

    @property
    def lo(self) -> int:
        return -self.L if self.first_site is None else self.first_site

    @property
    def hi(self) -> int:
        return self.lo + self.M - 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def storage_index(self, site: int) -> int:
        if not self.lo <= site <= self.hi:
            raise ValueError(f"site {site} outside lattice [{self.lo}, {self.hi}]")
        return int(site) - self.lo


class FockBasis:
    """All occupation vectors of ``N`` bosons on ``M`` sites.

    Attributes
    ----------
    N : int
        Particle number.
    lattice : LatticeSpec
    states : ndarray, shape (dim, M)
        Occupation vectors, read-only.
    positions : ndarray, shape (dim, N)
        Sorted storage positions of the particles in each state.
    """

    def __init__(self, lattice: LatticeSpec, N: int, max_dim: int = DEFAULT_MAX_DIM):
        if int(N) != N or not 1 <= N <= MAX_PARTICLES:
            raise ValueError(f"particle number must be in 1..{MAX_PARTICLES}, got {N!r}")
        M = lattice.M
        dim = comb(M + N - 1, N)
        if dim > max_dim:
            raise DimensionError(
                f"basis dimension C({M + N - 1},{N}) = {dim} exceeds cap {max_dim}"
            )
        self.N = int(N)
        self.lattice = lattice
        self.max_dim = max_dim

        pos = np.array(list(combinations_with_replacement(range(M), N)), dtype=np.int64)
        pos = pos.reshape(dim, N)
        occ = np.zeros((dim, M), dtype=np.int64)
        rows = np.repeat(np.arange(dim), N)
        np.add.at(occ, (rows, pos.ravel()), 1)

        self._weights = M ** np.arange(N - 1, -1, -1, dtype=np.int64)
        self._keys = pos @ self._weights
        for arr in (pos, occ, self._keys):
            arr.setflags(write=False)
        self.positions = pos
        self.states = occ

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    @property
    def M(self) -> int:
        return self.lattice.M

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"FockBasis(L={self.lattice.L}, N={self.N}, dim={self.dim})"

    def rank(self, occupations: np.ndarray) -> np.ndarray:
        """Basis indices of a stack of occupation vectors, shape (..., M).

        Raises ``KeyError`` if any vector is not in the basis.
        """
        occ = np.asarray(occupations, dtype=np.int64)
        flat = occ.reshape(-1, self.M)
        if np.any(flat < 0) or np.any(flat.sum(axis=1) != self.N):
            raise KeyError("occupation vector not in this fixed-N basis")
        # repeat each site label by its occupation -> sorted positions
        sites = np.arange(self.M)
        pos = np.stack([np.repeat(sites, row) for row in flat]) if len(flat) else \
            np.empty((0, self.N), dtype=np.int64)
        idx = np.searchsorted(self._keys, pos @ self._weights)
        return idx.reshape(occ.shape[:-1])

    def index_of(self, occupations: Sequence[int]) -> int:
        return int(self.rank(np.asarray(occupations)))

    def rank_positions(self, positions: np.ndarray) -> np.ndarray:
        """Vectorised rank from sorted particle positions, shape (..., N)."""
        return np.searchsorted(self._keys, np.asarray(positions) @ self._weights)

    @cached_property
    def index_map(self) -> dict[tuple[int, ...], int]:
        return {tuple(int(x) for x in s): j for j, s in enumerate(self.states)}


def build_basis(L: int, N: int, max_dim: int = DEFAULT_MAX_DIM) -> FockBasis:
    return FockBasis(LatticeSpec(L), N, max_dim=max_dim)


@dataclass(frozen=True)
class QuantumState:
    """Normalised amplitude vector over a Fock basis at time ``time``."""

    basis: FockBasis
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, basis dim is {self.basis.dim}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "QuantumState") -> complex:
        if other.basis is not self.basis:
            raise ValueError("states live in different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "QuantumState") -> float:
        return abs(self.overlap(other))


def _normalised(basis: FockBasis, amps: np.ndarray) -> QuantumState:
    nrm = np.linalg.norm(amps)
    if nrm == 0:
        raise ValueError("initial state has zero norm on this lattice")
    return QuantumState(basis, amps / nrm)


def make_product_state(basis: FockBasis, occupied_sites: Iterable[int]) -> QuantumState:
    """Fock state prod_k a_k^dag |vac> (normalised), sites given with multiplicity.

    ``[0, 0]`` gives the doubly occupied site 0, ``[0, 1]`` two adjacent bosons.
    """
    sites = list(occupied_sites)
    if len(sites) != basis.N:
        raise ValueError(f"expected {basis.N} sites, got {len(sites)}")
    occ = np.zeros(basis.M, dtype=np.int64)
    for s in sites:
        occ[basis.lattice.storage_index(int(s))] += 1
    amps = np.zeros(basis.dim, dtype=np.complex128)
    amps[basis.index_of(occ)] = 1.0
    return QuantumState(basis, amps)


def make_gaussian_state(basis: FockBasis, k0: int = 0, sigma2: float = 25.0) -> QuantumState:
    """N bosons all in the single-particle mode exp(-(k-k0)^2 / (2 sigma2)).

    ``sigma2 == 0`` is the localised limit: all particles on site ``k0``.
    """
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be non-negative, got {sigma2}")
    basis.lattice.storage_index(int(k0))
    if sigma2 == 0:
        return make_product_state(basis, [k0] * basis.N)

    # (sum_k g_k a_k^dag)^N |vac> has weight prod_k g_k^{n_k} / sqrt(n_k!) up to N!
    occ = basis.states
    log_fact = np.array([0.5 * np.log(factorial(n)) for n in range(basis.N + 1)])
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        log_g = -((basis.lattice.sites - k0) ** 2) / (2.0 * sigma2)
        logw = np.where(occ > 0, occ * log_g, 0.0).sum(axis=1) - log_fact[occ].sum(axis=1)
    amps = np.exp(logw - logw.max())
    return _normalised(basis, amps.astype(np.complex128))


@dataclass(frozen=True)
class InitialSpec:
    """Declarative description of an initial state.

    kind is one of ``gaussian``, ``localized``, ``adjacent``, ``same_site``,
    ``separated`` or ``sites`` (explicit list in ``sites``).
    """

    kind: str = "adjacent"
    k0: int = 0
    sigma2: float = 25.0
    sites: tuple[int, ...] = field(default=())

    KINDS = ("gaussian", "localized", "adjacent", "same_site", "separated", "sites")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown initial state kind {self.kind!r}; expected one of {self.KINDS}")

    def occupied_sites(self, N: int) -> list[int]:
        k0 = self.k0
        if self.kind in ("localized", "same_site"):
            return [k0] * N
        if self.kind == "adjacent":
            return [k0 + j for j in range(N)]
        if self.kind == "separated":
            # neighbours separated by one empty site, centred on k0
            return [k0 - (N - 1) + 2 * j for j in range(N)]
        if self.kind == "sites":
            return list(self.sites)
        raise ValueError(f"{self.kind!r} is not a product state")

    def build(self, basis: FockBasis) -> QuantumState:
        if self.kind == "gaussian":
            return make_gaussian_state(basis, self.k0, self.sigma2)
        return make_product_state(basis, self.occupied_sites(basis.N))
