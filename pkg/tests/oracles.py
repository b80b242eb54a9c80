"""Independent reference constructions used by the tests.

Everything here works in the full tensor-product space of M truncated
oscillators (local dimension N+1) built with Kronecker products, and only
projects onto the fixed-N basis at the end. None of it shares code with the
package's Fock-space machinery apart from reading ``basis.states``.
"""

from itertools import product

import numpy as np
from scipy.special import jv


def local_ops(nmax):
    a = np.diag(np.sqrt(np.arange(1, nmax + 1)), k=1)
    return a, a.T, np.diag(np.arange(nmax + 1.0))


def site_op(op, i, M):
    d = op.shape[0]
    out = np.eye(1)
    for j in range(M):
        out = np.kron(out, op if j == i else np.eye(d))
    return out


def tensor_hamiltonian(M, N, sites, J=1.0, U=0.0, F=0.0, V=0.0, alpha=3.0, eps=None):
    """Bose-Hubbard + tilt + long-range (both orders of each pair) + on-site energies."""
    a, ad, n = local_ops(N)
    A = [site_op(a, i, M) for i in range(M)]
    Ad = [site_op(ad, i, M) for i in range(M)]
    Nn = [site_op(n, i, M) for i in range(M)]
    dim = (N + 1) ** M
    H = np.zeros((dim, dim))
    for i in range(M - 1):
        H += -J * (Ad[i + 1] @ A[i] + Ad[i] @ A[i + 1])
    for i in range(M):
        H += 0.5 * U * Nn[i] @ (Nn[i] - np.eye(dim))
        H += F * sites[i] * Nn[i]
        if eps is not None:
            H += eps[i] * Nn[i]
    for i in range(M):
        for k in range(M):
            if k != i:
                H += V * abs(k - i) ** (-alpha) * Nn[i] @ Nn[k]
    return H


def tensor_index(occ, nmax):
    """Index of an occupation vector in the Kronecker product space (site 0 most significant)."""
    idx = 0
    for x in occ:
        idx = idx * (nmax + 1) + int(x)
    return idx


def project(H_full, basis):
    rows = [tensor_index(s, basis.N) for s in basis.states]
    return H_full[np.ix_(rows, rows)]


def project_vector(v_full, basis):
    return v_full[[tensor_index(s, basis.N) for s in basis.states]]


def embed_vector(amps, basis):
    out = np.zeros((basis.N + 1) ** basis.M, dtype=complex)
    out[[tensor_index(s, basis.N) for s in basis.states]] = amps
    return out


def gaussian_state_tensor(M, N, sites, k0, sigma2):
    """(sum_k g_k a_k^dag)^N |vac>, normalised, in the tensor space."""
    _, ad, _ = local_ops(N)
    g = np.exp(-((np.asarray(sites) - k0) ** 2) / (2.0 * sigma2))
    B = sum(g[k] * site_op(ad, k, M) for k in range(M))
    v = np.zeros((N + 1) ** M)
    v[0] = 1.0
    for _ in range(N):
        v = B @ v
    return v / np.linalg.norm(v)


def partial_trace_entropy(v_full, M, nmax, split):
    """Entropy of the first ``split`` sites by reshaping the tensor-space vector."""
    d = nmax + 1
    psi = v_full.reshape(d ** split, d ** (M - split))
    rho = psi @ psi.conj().T
    p = np.linalg.eigvalsh(rho)
    p = p[p > 1e-14]
    return float(-(p * np.log(p)).sum())


def single_particle_matrix(sites, J=1.0, F=0.0, eps=None):
    M = len(sites)
    H = np.diag(F * np.asarray(sites, dtype=float))
    if eps is not None:
        H += np.diag(eps)
    H -= J * (np.eye(M, k=1) + np.eye(M, k=-1))
    return H


def bessel_density(sites, t, J=1.0):
    """n_i(t) = J_i(2 J t)^2 on the infinite chain, start at site 0."""
    return jv(np.asarray(sites)[None, :], 2.0 * J * np.atleast_1d(t)[:, None]) ** 2


def brute_force_basis(M, N):
    """All occupation vectors with sum N, sorted descending lexicographically."""
    states = [s for s in product(range(N + 1), repeat=M) if sum(s) == N]
    return sorted(states, reverse=True)
