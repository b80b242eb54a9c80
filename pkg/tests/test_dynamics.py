import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bosewalk import (EdgeLeakWarning, EigensolverError, FockBasis, LatticeSpec, ModelParams,
                      QuantumState, TimeGrid, build_basis, build_hamiltonian, diagonalize,
                      evolve, make_product_state, run_evolution, simulate)
from bosewalk.dynamics import evolve_amplitudes

from oracles import bessel_density

# small lattices reach the boundary quickly; tests that care catch the warning
pytestmark = pytest.mark.filterwarnings("ignore::bosewalk.EdgeLeakWarning")


@pytest.fixture(scope="module")
def free_chain():
    basis = build_basis(50, 1)
    return basis, diagonalize(build_hamiltonian(basis, ModelParams()))


@pytest.fixture(scope="module")
def interacting():
    basis = build_basis(8, 2)
    spec = diagonalize(build_hamiltonian(basis, ModelParams(U=2.0, F=0.1, V=0.5, lam=0.8)))
    return basis, spec


def test_two_site_spectra():
    E1 = diagonalize(build_hamiltonian(FockBasis(LatticeSpec.chain(2), 1), ModelParams())).energies
    np.testing.assert_allclose(E1, [-1, 1], atol=1e-14)
    E2 = diagonalize(build_hamiltonian(FockBasis(LatticeSpec.chain(2), 2), ModelParams())).energies
    np.testing.assert_allclose(E2, [-2, 0, 2], atol=1e-14)


def test_residuals_and_orthonormality(interacting):
    _, spec = interacting
    assert spec.residual < 1e-12
    assert spec.orthonormality_error < 1e-12
    assert np.all(np.diff(spec.energies) >= 0)


def test_wannier_stark_ladder():
    F = 0.1
    basis = build_basis(50, 1)
    E = diagonalize(build_hamiltonian(basis, ModelParams(F=F))).energies
    k = len(E) // 3
    np.testing.assert_allclose(np.diff(E[k:2 * k]), F, atol=1e-3)


def test_evolve_at_zero_is_identity(interacting):
    basis, spec = interacting
    psi = make_product_state(basis, [0, 1])
    np.testing.assert_allclose(evolve(spec, psi, 0.0).amplitudes, psi.amplitudes, atol=1e-13)


@pytest.mark.parametrize("t", [1.0, 5.0, 10.0])
def test_single_particle_bessel(free_chain, t):
    basis, spec = free_chain
    psi = evolve(spec, make_product_state(basis, [0]), t)
    n = np.abs(psi.amplitudes) ** 2
    np.testing.assert_allclose(n, bessel_density(basis.lattice.sites, t)[0], atol=1e-8)


def test_two_level_revival():
    # two sites: full return after t = pi (splitting 2J)
    basis = FockBasis(LatticeSpec.chain(2), 1)
    spec = diagonalize(build_hamiltonian(basis, ModelParams()))
    psi = make_product_state(basis, [0])
    assert evolve(spec, psi, np.pi).fidelity(psi) == pytest.approx(1.0, abs=1e-13)
    assert evolve(spec, psi, np.pi / 2).fidelity(psi) == pytest.approx(0.0, abs=1e-13)


@settings(max_examples=15, deadline=None)
@given(t=st.floats(0, 200), s=st.floats(0, 50))
def test_norm_energy_and_composition(interacting, t, s):
    basis, spec = interacting
    H = spec.operator
    psi0 = make_product_state(basis, [0, 0])
    psi_t = evolve(spec, psi0, t)
    assert abs(psi_t.norm - 1) < 1e-12
    assert H.expectation(psi_t.amplitudes) == pytest.approx(H.expectation(psi0.amplitudes),
                                                            abs=1e-10)
    two_step = evolve(spec, psi_t, s)
    np.testing.assert_allclose(two_step.amplitudes, evolve(spec, psi0, t + s).amplitudes,
                               atol=1e-10)


def test_time_reversal(interacting):
    basis, spec = interacting
    psi0 = make_product_state(basis, [-1, 2])
    back = evolve(spec, evolve(spec, psi0, 7.3), -7.3)
    np.testing.assert_allclose(back.amplitudes, psi0.amplitudes, atol=1e-12)


def test_density_parity_symmetric():
    basis = build_basis(10, 2)
    series, _ = simulate(basis, ModelParams(U=2.0), make_product_state(basis, [0, 0]),
                         TimeGrid(3.0, 0.5), ("density",))
    np.testing.assert_allclose(series["density"], series["density"][:, ::-1], atol=1e-12)


def test_run_evolution_grid_and_norm(interacting):
    basis, spec = interacting
    series = run_evolution(spec, make_product_state(basis, [0, 1]), TimeGrid(10.0, 0.1),
                           ("norm", "energy"), halt_on_leak=False)
    assert len(series) == 101
    assert series.times[-1] == pytest.approx(10.0)
    np.testing.assert_allclose(series["norm"], 1.0, atol=1e-10)
    np.testing.assert_allclose(series["density"].sum(axis=1), 2.0, atol=1e-10)
    assert np.ptp(series["energy"]) < 1e-10


def test_chunking_does_not_change_results(interacting):
    basis, spec = interacting
    psi = make_product_state(basis, [0, 1])
    a = run_evolution(spec, psi, TimeGrid(5.0, 0.1), ("components", "entropy", "statistics"),
                      halt_on_leak=False)
    b = run_evolution(spec, psi, TimeGrid(5.0, 0.1), ("components", "entropy", "statistics"),
                      halt_on_leak=False, chunk=7)
    assert a.data.keys() == b.data.keys()
    for k in a.data:
        np.testing.assert_allclose(a[k], b[k], atol=1e-13)


@pytest.mark.parametrize("t_max, dt", [(10.0, -0.1), (10.0, 0.0), (0.05, 0.1), (1.0, float("nan"))])
def test_malformed_grid_rejected(t_max, dt):
    with pytest.raises(ValueError):
        TimeGrid(t_max, dt)


def test_explicit_grid():
    g = TimeGrid.explicit([0.0, 0.5, 2.0])
    np.testing.assert_array_equal(g.instants, [0.0, 0.5, 2.0])
    with pytest.raises(ValueError):
        TimeGrid.explicit([1.0, 0.5])


def test_edge_leak_halts_and_warns():
    basis = build_basis(5, 1)
    spec = diagonalize(build_hamiltonian(basis, ModelParams()))
    psi = make_product_state(basis, [0])
    with pytest.warns(EdgeLeakWarning):
        s = run_evolution(spec, psi, TimeGrid(10.0, 0.1))
    assert s.leak_flagged and s.halted
    assert s.times[-1] == s.leak_time < 10.0
    assert s["leakage"][-1] >= 1e-4
    assert np.all(s["leakage"][:-1] < 1e-4)


def test_edge_leak_flag_without_halt():
    basis = build_basis(5, 1)
    spec = diagonalize(build_hamiltonian(basis, ModelParams()))
    with pytest.warns(EdgeLeakWarning):
        s = run_evolution(spec, make_product_state(basis, [0]), TimeGrid(10.0, 0.1),
                          halt_on_leak=False)
    assert s.leak_flagged and not s.halted and len(s) == 101


def test_no_leak_no_warning(free_chain):
    basis, spec = free_chain
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        s = run_evolution(spec, make_product_state(basis, [0]), TimeGrid(5.0, 0.5))
    assert not s.leak_flagged and s.leak_time is None


def test_custom_observer(interacting):
    basis, spec = interacting
    psi0 = make_product_state(basis, [0, 1])

    def survival(state: QuantumState) -> float:
        return state.fidelity(psi0) ** 2

    s = run_evolution(spec, psi0, TimeGrid(2.0, 0.5), ["density", ("survival", survival)],
                      halt_on_leak=False)
    assert s["survival"][0] == pytest.approx(1.0)
    amps = evolve_amplitudes(spec, psi0, s.times)
    np.testing.assert_allclose(s["survival"], np.abs(amps @ psi0.amplitudes.conj()) ** 2,
                               atol=1e-13)


def test_unknown_observer(interacting):
    basis, spec = interacting
    with pytest.raises(ValueError):
        run_evolution(spec, make_product_state(basis, [0, 1]), TimeGrid(1.0), ["spin"])


def test_basis_mismatch(interacting):
    _, spec = interacting
    other = build_basis(8, 2)
    with pytest.raises(ValueError):
        evolve(spec, make_product_state(other, [0, 1]), 1.0)


def test_eigensolver_error_on_nonfinite():
    basis = build_basis(2, 1)
    with pytest.raises(EigensolverError):
        diagonalize(build_hamiltonian(basis, ModelParams(F=float("nan"))))
