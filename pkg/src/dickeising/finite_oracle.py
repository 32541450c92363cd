"""Exact diagonalization of small chains, used as an independent check.

Basis convention: computational states are ordered as the Kronecker product
of site factors with spin 1 slowest and the boson (when present) fastest.
Spin state ``|0>`` is sigma^z = +1.  In integer labels spin ``i`` (1-based)
is bit ``N - i`` of the spin index, so the ordering matches ``np.kron``.

Both Hamiltonians commute with the string ``prod_i sigma^z_i`` (times the
boson parity in the coupled case), so every matrix is diagonalized one parity
block at a time.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.special import logsumexp

from ._validation import ResourceError, TruncationError, check_int, check_positive

MAX_ISING_SITES = 12
MAX_COUPLED_SITES = 8
MAX_COUPLED_DIMENSION = 20000
TAIL_TOLERANCE = 1e-8


@dataclass(frozen=True)
class DenseSpectrum:
    eigenvalues: np.ndarray
    dimension: int

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.shape != (self.dimension,):
            raise ValueError("eigenvalue count must equal the dimension")
        if np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be sorted ascending")


def _bits(N):
    states = np.arange(1 << N)
    # column i holds the occupation (0 = up) of spin i + 1
    return (states[:, None] >> (N - 1 - np.arange(N))[None, :]) & 1


def spin_parity(N):
    """Diagonal of ``prod_i sigma^z_i``: +1 for an even number of down spins."""
    return 1 - 2 * (_bits(N).sum(axis=1) % 2)


def ising_hamiltonian(N, h, J=1.0):
    """Sparse ``-h sum sigma^z_i - J sum sigma^y_i sigma^y_{i+1}`` with periodic closure.

    The closing bond ``(N, 1)`` is always added, so for ``N = 2`` the single
    bond appears twice.
    """
    N = check_int("N", N, minimum=2)
    dim = 1 << N
    bits = _bits(N)
    states = np.arange(dim)
    diag = -h * (1 - 2 * bits).sum(axis=1).astype(float)
    rows, cols, vals = [states], [states], [diag]
    for i in range(N):
        j = (i + 1) % N
        mask = (1 << (N - 1 - i)) | (1 << (N - 1 - j))
        # sigma^y |b> = i (-1)^b |1-b>, so sigma^y_i sigma^y_j carries -(-1)^(b_i+b_j)
        sign = 1 - 2 * ((bits[:, i] + bits[:, j]) % 2)
        rows.append(states ^ mask)
        cols.append(states)
        vals.append(J * sign.astype(float))
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(dim, dim))


def _sector_eigvalsh(H, parity):
    out = []
    for sector in (1, -1):
        idx = np.nonzero(parity == sector)[0]
        out.append(scipy.linalg.eigvalsh(H[idx][:, idx].toarray()))
    return np.sort(np.concatenate(out))


def ising_dense_spectrum(N, h_t):
    """Full spectrum of the periodic chain in units of ``J``."""
    N = check_int("N", N, minimum=2)
    if N > MAX_ISING_SITES:
        raise ResourceError(f"dense Ising diagonalization is limited to N <= {MAX_ISING_SITES}")
    H = ising_hamiltonian(N, h_t)
    return DenseSpectrum(_sector_eigvalsh(H, spin_parity(N)), 1 << N)


def ising_dense_free_energy(N, h_t, beta_t):
    """Exact free energy per spin ``-(1/(N beta_t)) log Tr exp(-beta_t H/J)``."""
    check_positive("beta_t", beta_t)
    ev = ising_dense_spectrum(N, h_t).eigenvalues
    return -float(logsumexp(-beta_t * ev)) / (N * beta_t)


# --- spins coupled to the cavity mode ---------------------------------------


def _boson_ops(n_max):
    n = np.arange(n_max + 1, dtype=float)
    a = sp.diags(np.sqrt(n[1:]), 1, format="csr")
    return a, sp.diags(n, format="csr")


def collective_sx(N):
    """Sparse ``sum_i sigma^x_i``."""
    dim = 1 << N
    states = np.arange(dim)
    rows = np.concatenate([states ^ (1 << (N - 1 - i)) for i in range(N)])
    cols = np.tile(states, N)
    return sp.csr_matrix((np.ones(N * dim), (rows, cols)), shape=(dim, dim))


def dicke_ising_hamiltonian(N, n_max, m):
    """Sparse ``H_Ising + omega a^dag a + (g / sqrt N) sum sigma^x (a + a^dag)``."""
    N = check_int("N", N, minimum=2)
    n_max = check_int("n_max", n_max, minimum=1)
    a, num = _boson_ops(n_max)
    eye_b = sp.identity(n_max + 1, format="csr")
    eye_s = sp.identity(1 << N, format="csr")
    H = sp.kron(ising_hamiltonian(N, m.h, m.J), eye_b)
    H = H + m.omega * sp.kron(eye_s, num)
    H = H + (m.g / math.sqrt(N)) * sp.kron(collective_sx(N), a + a.T)
    return H.tocsr()


def joint_parity(N, n_max):
    """Diagonal of ``(-1)^(a^dag a) prod_i sigma^z_i`` in the coupled basis."""
    boson = 1 - 2 * (np.arange(n_max + 1) % 2)
    return np.kron(spin_parity(N), boson)


@dataclass(frozen=True)
class GroundState:
    energy: float
    mean_photon_number: float
    mean_sx: float
    n_max: int
    tail_population: float
    sector_gap: float


def _sector_ground(H, idx):
    block = H[idx][:, idx].toarray()
    w, v = scipy.linalg.eigh(block, subset_by_index=[0, 0])
    return w[0], v[:, 0]


def _ground_state_at(N, n_max, m):
    H = dicke_ising_hamiltonian(N, n_max, m)
    parity = joint_parity(N, n_max)
    dim = H.shape[0]
    vecs, energies = [], []
    for sector in (1, -1):
        idx = np.nonzero(parity == sector)[0]
        e, v = _sector_ground(H, idx)
        full = np.zeros(dim)
        full[idx] = v
        energies.append(e)
        vecs.append(full)
    order = np.argsort(energies)
    ground = vecs[order[0]]
    nb = n_max + 1
    boson_n = np.tile(np.arange(nb, dtype=float), 1 << N)
    photons = float(ground @ (boson_n * ground))
    tail = float(np.sum(ground.reshape(-1, nb)[:, -1] ** 2))

    # x and s_x vanish in each parity sector; mixing the two sector ground
    # states selects one of the two symmetry-broken branches, x >= 0 picked
    a, _ = _boson_ops(n_max)
    quad = sp.kron(sp.identity(1 << N), a + a.T).tocsr()
    sx = sp.kron(collective_sx(N), sp.identity(nb)).tocsr()
    mixed = (vecs[0] + vecs[1]) / math.sqrt(2.0)
    if mixed @ (quad @ mixed) < 0:
        mixed = (vecs[0] - vecs[1]) / math.sqrt(2.0)
    mean_sx = float(mixed @ (sx @ mixed)) / N
    gap = float(abs(energies[1] - energies[0]))
    return GroundState(float(energies[order[0]]), photons, mean_sx, n_max, tail, gap)


def dicke_ising_dense_ground_state(N, m, n_max=32):
    """Ground energy, ``<a^dag a>`` and ``<sum sigma^x>/N`` of the full model.

    The boson space is truncated at ``n_max`` quanta and doubled until the
    ground-state population of the top level is below ``1e-8``; exceeding the
    dimension budget raises :class:`~dickeising.TruncationError`.
    """
    N = check_int("N", N, minimum=2)
    if N > MAX_COUPLED_SITES:
        raise ResourceError(f"coupled dense diagonalization is limited to N <= {MAX_COUPLED_SITES}")
    if m.J < 0 or m.g < 0:
        raise ResourceError("couplings must be non-negative")
    n_max = check_int("n_max", n_max, minimum=1)
    while True:
        if (1 << N) * (n_max + 1) > MAX_COUPLED_DIMENSION:
            raise TruncationError(
                f"boson cutoff n_max={n_max} needed for N={N} exceeds the dense budget")
        gs = _ground_state_at(N, n_max, m)
        if gs.tail_population < TAIL_TOLERANCE:
            return gs
        n_max *= 2


def oracle_report(m, sizes=(4, 6, 8), n_max=32, ising_sizes=(6, 8, 10, 12), q=None):
    """JSON-ready comparison of dense results with the thermodynamic-limit formulas."""
    from .ising import ReducedIsingParams, free_energy_density
    from .meanfield import observables
    from .quadrature import DEFAULT_QUADRATURE

    q = DEFAULT_QUADRATURE if q is None else q
    report = {"inputs": {"h": m.h, "J": m.J, "g": m.g, "omega": m.omega, "beta": m.beta,
                         "sizes": list(sizes), "n_max": n_max, "ising_sizes": list(ising_sizes)}}
    if m.J > 0:
        p = ReducedIsingParams.from_physical(m.beta, m.h, m.J)
        f_inf = free_energy_density(p, q)
        report["ising"] = [
            {"N": n, "f_dense": ising_dense_free_energy(n, p.h_t, p.beta_t),
             "f_limit": f_inf}
            for n in ising_sizes]
        for row in report["ising"]:
            row["abs_error"] = abs(row["f_dense"] - row["f_limit"])
    mf = observables(m, q)
    coupled = []
    for n in sizes:
        gs = dicke_ising_dense_ground_state(n, m, n_max)
        coupled.append({"N": n, "energy": gs.energy, "photons_per_spin": gs.mean_photon_number / n,
                        "mean_sx": gs.mean_sx, "n_max": gs.n_max,
                        "tail_population": gs.tail_population, "sector_gap": gs.sector_gap})
    report["coupled"] = coupled
    report["mean_field"] = {"x_sq": mf.x_sq, "s_x": mf.s_x}
    return report
