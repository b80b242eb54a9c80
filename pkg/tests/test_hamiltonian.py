import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bosewalk import (FockBasis, LatticeSpec, ModelParams, build_basis, build_hamiltonian,
                      disorder_profile)
from bosewalk.hamiltonian import GOLDEN_TAU

from oracles import project, single_particle_matrix, tensor_hamiltonian


def two_site(N):
    return FockBasis(LatticeSpec.chain(2), N)


def test_two_site_single_particle():
    H = build_hamiltonian(two_site(1), ModelParams(J=1.0)).matrix
    np.testing.assert_array_equal(H, [[0, -1], [-1, 0]])


def test_two_site_two_bosons():
    basis = two_site(2)             # order (2,0), (1,1), (0,2)
    H = build_hamiltonian(basis, ModelParams(J=1.0, U=2.0)).matrix
    r2 = np.sqrt(2)
    expected = np.array([[2, -r2, 0], [-r2, 0, -r2], [0, -r2, 2]])
    np.testing.assert_allclose(H, expected, atol=1e-15)
    ref = project(tensor_hamiltonian(2, 2, [0, 1], U=2.0), basis)
    np.testing.assert_allclose(H, ref, atol=1e-14)


def test_tilt_diagonal():
    H = build_hamiltonian(build_basis(1, 1), ModelParams(J=1.0, F=0.5)).matrix
    np.testing.assert_allclose(np.diag(H), [-0.5, 0.0, 0.5])


def test_disorder_profile_values():
    lat = LatticeSpec(2)
    eps = disorder_profile(lat, 2.0, GOLDEN_TAU, 0.0)
    assert eps[2] == pytest.approx(2.0)                         # site 0
    assert eps[3] == pytest.approx(2.0 * np.cos(2 * np.pi * GOLDEN_TAU))
    np.testing.assert_array_equal(disorder_profile(lat, 0.0), np.zeros(5))
    shifted = disorder_profile(lat, 1.0, GOLDEN_TAU, 0.25)
    assert shifted[2] == pytest.approx(0.0, abs=1e-15)


def test_disorder_enters_diagonal():
    basis = build_basis(3, 1)
    p = ModelParams(lam=1.5, phi=0.3)
    H = build_hamiltonian(basis, p).matrix
    np.testing.assert_allclose(np.diag(H), disorder_profile(basis.lattice, 1.5, GOLDEN_TAU, 0.3))


def test_long_range_pair_energy():
    # two bosons at distance d: each ordered pair contributes V / d^alpha
    basis = build_basis(3, 2)
    H = build_hamiltonian(basis, ModelParams(V=1.0, alpha=3.0)).matrix
    occ = np.zeros(7, dtype=int)
    occ[[1, 3]] = 1
    j = basis.index_of(occ)
    assert H[j, j] == pytest.approx(2 * 2.0 ** -3)


def test_parameter_validation():
    with pytest.raises(ValueError):
        ModelParams(J=0)
    with pytest.raises(ValueError):
        ModelParams(lam=-1)
    with pytest.raises(ValueError):
        ModelParams(V=1.0, alpha=0.0)


@settings(max_examples=25, deadline=None)
@given(M=st.integers(2, 4), N=st.integers(1, 3),
       U=st.floats(-5, 5), F=st.floats(-1, 1), V=st.floats(-2, 2),
       alpha=st.floats(0.5, 4), lam=st.floats(0, 3), phi=st.floats(0, 1))
def test_matches_tensor_product_oracle(M, N, U, F, V, alpha, lam, phi):
    lattice = LatticeSpec.chain(M, first_site=-(M // 2))
    basis = FockBasis(lattice, N)
    p = ModelParams(J=1.0, U=U, F=F, V=V, alpha=alpha, lam=lam, phi=phi)
    eps = disorder_profile(lattice, lam, p.tau, phi)
    ref = project(tensor_hamiltonian(M, N, lattice.sites, J=1.0, U=U, F=F, V=V,
                                     alpha=alpha, eps=eps), basis)
    np.testing.assert_allclose(build_hamiltonian(basis, p).matrix, ref, atol=1e-12)


@pytest.mark.parametrize("L, N", [(3, 1), (4, 2), (3, 3)])
def test_hermitian_and_read_only(L, N):
    H = build_hamiltonian(build_basis(L, N), ModelParams(U=1.3, F=0.2, V=0.4, lam=0.7)).matrix
    np.testing.assert_array_equal(H, H.T)
    with pytest.raises(ValueError):
        H[0, 0] = 1.0


@pytest.mark.parametrize("N", [1, 2, 3])
def test_parity_symmetry_without_tilt_or_disorder(N):
    basis = build_basis(4, N)
    H = build_hamiltonian(basis, ModelParams(U=2.0, V=0.5)).matrix
    perm = basis.rank(basis.states[:, ::-1])
    np.testing.assert_allclose(H[np.ix_(perm, perm)], H, atol=1e-14)


def test_single_particle_reduces_to_tridiagonal():
    basis = build_basis(6, 1)
    p = ModelParams(J=0.7, U=3.0, F=0.2, V=1.0, lam=1.0, phi=0.1)
    eps = disorder_profile(basis.lattice, 1.0, p.tau, 0.1)
    # single-particle basis is ordered with the particle on the leftmost site first
    ref = single_particle_matrix(basis.lattice.sites, J=0.7, F=0.2, eps=eps)
    np.testing.assert_allclose(build_hamiltonian(basis, p).matrix, ref, atol=1e-14)
