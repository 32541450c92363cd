import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickeising import (ModelParams, ReducedIsingParams, ResourceError, TruncationError,
                        dicke_ising_dense_ground_state, free_energy_density, ising_dense_free_energy,
                        ising_dense_spectrum, observables)
from dickeising.finite_oracle import (MAX_COUPLED_SITES, MAX_ISING_SITES, DenseSpectrum,
                                      dicke_ising_hamiltonian, ising_hamiltonian, joint_parity,
                                      oracle_report, spin_parity)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


def _site(op, i, N):
    mats = [np.eye(2, dtype=complex)] * N
    mats[i] = op
    return reduce(np.kron, mats)


def _kron_ising(N, h, J=1.0):
    """Textbook tensor-product construction, independent of the bit tricks."""
    H = -h * sum(_site(SZ, i, N) for i in range(N))
    for i in range(N):
        H = H - J * _site(SY, i, N) @ _site(SY, (i + 1) % N, N)
    return H


def _kron_coupled(N, n_max, m):
    nb = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, nb)), 1)
    sx = sum(_site(SX, i, N) for i in range(N))
    H = np.kron(_kron_ising(N, m.h, m.J), np.eye(nb))
    H = H + m.omega * np.kron(np.eye(1 << N), a.T @ a)
    return H + m.g / math.sqrt(N) * np.kron(sx, a + a.T)


# --- Ising chain ------------------------------------------------------------------


def test_two_site_zero_field_spectrum():
    np.testing.assert_allclose(ising_dense_spectrum(2, 0.0).eigenvalues, [-2, -2, 2, 2], atol=1e-12)


@pytest.mark.parametrize("N, h, J", [(2, 0.7, 1.0), (3, 0.3, 1.0), (4, 1.3, 0.6), (5, 0.0, 1.0)])
def test_sparse_hamiltonian_matches_tensor_products(N, h, J):
    np.testing.assert_allclose(ising_hamiltonian(N, h, J).toarray(), _kron_ising(N, h, J).real, atol=1e-12)


@given(st.integers(3, 8), st.floats(0.0, 3.0))
@settings(max_examples=10)
def test_spectrum_traces(N, h):
    ev = ising_dense_spectrum(N, h).eigenvalues
    assert abs(ev.sum()) < 1e-9 * (1 << N)
    # Tr H^2 counts N field terms and N bonds, each squaring to the identity
    assert np.sum(ev ** 2) == pytest.approx((1 << N) * N * (h * h + 1.0), rel=1e-10)


@pytest.mark.parametrize("N", [3, 4, 6])
def test_zero_field_levels_are_doubly_degenerate(N):
    ev = ising_dense_spectrum(N, 0.0).eigenvalues
    np.testing.assert_allclose(ev[0::2], ev[1::2], atol=1e-10)


def test_parity_commutes_with_chain():
    H = ising_hamiltonian(6, 0.8).toarray()
    P = np.diag(spin_parity(6).astype(float))
    assert np.linalg.norm(H @ P - P @ H) == 0.0


def test_dense_free_energy_converges():
    p = ReducedIsingParams(beta_t=0.5, h_t=2.0)
    f_inf = free_energy_density(p)
    errs = [abs(ising_dense_free_energy(n, p.h_t, p.beta_t) - f_inf) for n in (6, 8, 10, 12)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.02


def test_dense_free_energy_direct_sum():
    ev = ising_dense_spectrum(4, 0.9).eigenvalues
    direct = -math.log(np.sum(np.exp(-1.5 * ev))) / (4 * 1.5)
    assert ising_dense_free_energy(4, 0.9, 1.5) == pytest.approx(direct, rel=1e-13)


def test_size_limits():
    with pytest.raises(ResourceError):
        ising_dense_spectrum(MAX_ISING_SITES + 1, 1.0)
    with pytest.raises(ResourceError):
        dicke_ising_dense_ground_state(MAX_COUPLED_SITES + 1, ModelParams(0.5, 1.0, 1.0, 1.0, 1.0))


def test_dense_spectrum_validation():
    with pytest.raises(ValueError):
        DenseSpectrum(np.array([1.0, 0.0]), 2)
    with pytest.raises(ValueError):
        DenseSpectrum(np.array([0.0, 1.0]), 4)


# --- coupled model -----------------------------------------------------------------

SR = ModelParams(h=0.2, J=0.5, g=1.0, omega=1.0, beta=100.0)


def test_coupled_hamiltonian_matches_tensor_products():
    m = ModelParams(h=0.4, J=0.8, g=0.9, omega=1.3, beta=1.0)
    np.testing.assert_allclose(dicke_ising_hamiltonian(3, 5, m).toarray(), _kron_coupled(3, 5, m).real,
                               atol=1e-12)


def test_joint_parity_commutes():
    m = ModelParams(h=0.7, J=1.0, g=0.9, omega=1.3, beta=1.0)
    H = dicke_ising_hamiltonian(4, 8, m).toarray()
    P = np.diag(joint_parity(4, 8).astype(float))
    assert np.linalg.norm(H @ P - P @ H) < 1e-10


def test_ground_state_matches_full_diagonalization():
    m = ModelParams(h=0.4, J=0.8, g=0.9, omega=1.3, beta=1.0)
    gs = dicke_ising_dense_ground_state(3, m, n_max=24)
    e = np.linalg.eigvalsh(_kron_coupled(3, gs.n_max, m).real)
    assert gs.energy == pytest.approx(e[0], abs=1e-10)
    assert isinstance(gs.sector_gap, float)


def test_decoupled_cavity():
    m = ModelParams(h=0.6, J=1.0, g=0.0, omega=1.0, beta=1.0)
    gs = dicke_ising_dense_ground_state(4, m)
    assert gs.energy == pytest.approx(ising_dense_spectrum(4, 0.6).eigenvalues[0], abs=1e-10)
    assert gs.mean_photon_number < 1e-20


def test_cutoff_convergence():
    gs = dicke_ising_dense_ground_state(4, SR, n_max=8)
    assert gs.tail_population < 1e-8 and gs.n_max > 8
    wider = dicke_ising_dense_ground_state(4, SR, n_max=gs.n_max + 4)
    assert abs(wider.energy - gs.energy) < 1e-6
    assert abs(wider.mean_photon_number - gs.mean_photon_number) < 1e-6


def test_cutoff_budget():
    with pytest.raises(TruncationError):
        dicke_ising_dense_ground_state(8, SR, n_max=100)


@pytest.fixture(scope="module")
def trend():
    return {n: dicke_ising_dense_ground_state(n, SR) for n in (4, 6, 8)}


@pytest.mark.slow
def test_finite_size_trend_towards_mean_field(trend):
    mf = observables(SR)
    photons = [trend[n].mean_photon_number / n for n in (4, 6, 8)]
    gaps = [abs(p - mf.x_sq) for p in photons]
    assert gaps[0] > gaps[1] > gaps[2]
    assert photons[-1] == pytest.approx(mf.x_sq, rel=0.2)
    for n, gs in trend.items():
        assert gs.mean_sx == pytest.approx(mf.s_x, rel=0.2)
        assert gs.mean_sx < 0


def test_oracle_report_layout():
    m = ModelParams(h=2.0, J=1.0, g=0.3, omega=1.0, beta=1.0)
    rep = oracle_report(m, sizes=(2, 4), ising_sizes=(4, 6))
    assert [r["N"] for r in rep["coupled"]] == [2, 4]
    assert rep["ising"][1]["abs_error"] < rep["ising"][0]["abs_error"]
    assert set(rep["mean_field"]) == {"x_sq", "s_x"}
