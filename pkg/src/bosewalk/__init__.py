"""Continuous-time quantum walks of a few interacting bosons on a 1D lattice."""

from .fock import (DimensionError, FockBasis, InitialSpec, LatticeSpec, QuantumState,
                   build_basis, make_gaussian_state, make_product_state)
from .hamiltonian import (GOLDEN_TAU, HermitianOperator, ModelParams, build_hamiltonian,
                          disorder_profile)
from .dynamics import (EdgeLeakWarning, EigensolverError, ObservableSeries,
                       SpectralDecomposition, TimeGrid, diagonalize, evolve,
                       run_evolution, simulate)
from .observables import (DensityProfile, density, density_components,
                          entanglement_entropy, packet_statistics, reduced_density_matrix)

__version__ = "0.1.0"
