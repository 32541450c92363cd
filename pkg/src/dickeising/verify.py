"""Self-checks run by ``dickeising verify``.

Each check compares two independent routes to the same number and reports
the residual against a tolerance.  A check passes when the residual is
strictly below its tolerance, so a zero tolerance always fails.
"""

import numpy as np

from .finite_oracle import (dicke_ising_dense_ground_state, dicke_ising_hamiltonian,
                            ising_dense_free_energy, ising_dense_spectrum, joint_parity)
from .ising import (ReducedIsingParams, free_energy_density, free_energy_density_finite,
                    magnetization)
from .landau import coefficient_i2, landau_coefficients
from .meanfield import ModelParams, ReducedParams, minimize, reduced_free_energy
from .metrology import blue_estimator


def _two_site_spectrum(q):
    ev = ising_dense_spectrum(2, 0.0).eigenvalues
    return float(np.max(np.abs(ev - np.array([-2.0, -2.0, 2.0, 2.0])))), 1e-12


def _dense_convergence(q, max_sites):
    p = ReducedIsingParams(beta_t=1.0, h_t=2.0)
    f_inf = free_energy_density(p, q)
    sizes = [n for n in (6, 8, 10, 12) if n <= max_sites]
    errs = [abs(ising_dense_free_energy(n, p.h_t, p.beta_t) - f_inf) for n in sizes]
    # any growth of the error with N is added to the final error
    growth = sum(max(0.0, b - a) for a, b in zip(errs, errs[1:]))
    return errs[-1] + growth, 1e-3


def _finite_sum(q):
    p = ReducedIsingParams(beta_t=1.0, h_t=2.0)
    return abs(free_energy_density_finite(p, 512) - free_energy_density(p, q)), 1e-3


def _magnetization_fd(q):
    d = 1e-5
    f = [free_energy_density(ReducedIsingParams(2.0, 1.0 + s * d), q) for s in (-1, 1)]
    return abs(magnetization(ReducedIsingParams(2.0, 1.0), q) + (f[1] - f[0]) / (2 * d)), 1e-6


def _parity(q):
    m = ModelParams(h=0.7, J=1.0, g=0.9, omega=1.3, beta=1.0)
    H = dicke_ising_hamiltonian(4, 8, m).toarray()
    P = np.diag(joint_parity(4, 8).astype(float))
    return float(np.linalg.norm(H @ P - P @ H)), 1e-10


def _decoupled(q):
    gs = dicke_ising_dense_ground_state(4, ModelParams(h=0.6, J=1.0, g=0.0, omega=1.0, beta=1.0))
    e0 = ising_dense_spectrum(4, 0.6).eigenvalues[0]
    return abs(gs.energy - e0) + gs.mean_photon_number, 1e-9


def _landau_expansion(q):
    beta_t, h_t, omega_t, x = 3.0, 0.8, 0.2, 1e-2
    c = landau_coefficients(beta_t, h_t, q)
    direct = float(reduced_free_energy(np.hypot(h_t, x), ReducedParams(h_t, beta_t, omega_t), q))
    return abs(c.quartic(x, omega_t) - direct) / abs(direct), 1e-8


def _stationarity(q):
    p = ReducedParams(h_t=0.2, beta_t=10.0, omega_t=0.25)
    sol = minimize(p, q)
    return abs(float(coefficient_i2(p.beta_t, sol.h_eff_t, q)) + p.omega_t), 1e-8


def _blue(q, seed):
    rng = np.random.default_rng(seed)
    mu_p = rng.normal(size=40)
    s2 = rng.uniform(0.5, 2.0, size=40)
    d = blue_estimator(np.arange(40.0), np.zeros(40), mu_p, s2)
    unbiased = abs(float(np.sum(d.weights * mu_p)) - 1.0)
    collinear = 1.0 - abs(np.corrcoef(d.weights, mu_p / s2)[0, 1])
    return max(unbiased, collinear), 1e-10


def run_checks(q, tol_scale=1.0, max_sites=10, seed=0):
    """Run every check and return a JSON-ready report."""
    checks = [
        ("two_site_spectrum", lambda: _two_site_spectrum(q)),
        ("dense_free_energy_convergence", lambda: _dense_convergence(q, max_sites)),
        ("finite_sum_vs_integral", lambda: _finite_sum(q)),
        ("magnetization_vs_difference", lambda: _magnetization_fd(q)),
        ("joint_parity_commutator", lambda: _parity(q)),
        ("decoupled_cavity_ground_state", lambda: _decoupled(q)),
        ("landau_quartic_model", lambda: _landau_expansion(q)),
        ("mean_field_stationarity", lambda: _stationarity(q)),
        ("blue_constraints", lambda: _blue(q, seed)),
    ]
    out = []
    for name, fn in checks:
        residual, tol = fn()
        tol *= tol_scale
        out.append({"name": name, "residual": float(residual), "tolerance": float(tol),
                    "passed": bool(residual < tol)})
    return {"checks": out, "passed": all(c["passed"] for c in out), "tol_scale": tol_scale}
