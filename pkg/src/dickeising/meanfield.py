"""Mean-field thermodynamics of the Ising chain coupled to a cavity mode.

Replacing the spin-cavity coupling by its mean field leaves an Ising chain in
the effective field ``h_eff = sqrt(h**2 + 4 g**2 x**2)`` plus a displaced
oscillator.  Eliminating the spin mean field through its stationarity
condition, the free energy per spin in units of ``J`` becomes::

    F(h_eff) = f_ising(beta_t, h_eff) + omega_t * (h_eff**2 - h_t**2)

with ``omega_t = omega J / (4 g**2)``, minimized over ``h_eff >= h_t``.  The
``h_t``-independent part ``G(u) = f_ising(beta_t, u) + omega_t u**2`` decides
everything: its stationary points solve ``I2(beta_t, u) + omega_t = 0`` and
they do not move when ``h_t`` changes, so one landscape per
``(beta_t, omega_t)`` serves every field value.
"""

import enum
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ._validation import DomainError, check_int, check_nonnegative, check_positive
from .ising import ising_free_energy, ising_magnetization, log2cosh
from .landau import coefficient_i2, zero_field_coefficients
from .quadrature import DEFAULT_QUADRATURE

log = logging.getLogger(__name__)

N_SCAN = 256


class Phase(str, enum.Enum):
    NORMAL = "normal"
    SUPERRADIANT = "superradiant"


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the full Hamiltonian, in one common energy unit.

    ``J = 0`` is accepted and selects the independent-spin (pure Dicke)
    branch; ``g = 0`` decouples the cavity.
    """

    h: float
    J: float
    g: float
    omega: float
    beta: float

    def __post_init__(self):
        check_nonnegative("h", self.h)
        check_nonnegative("J", self.J)
        check_nonnegative("g", self.g)
        check_positive("omega", self.omega)
        check_positive("beta", self.beta)

    def reduced(self):
        """Dimensionless :class:`ReducedParams`; needs ``J > 0``."""
        if self.J <= 0:
            raise DomainError("reduced parameters need J > 0; J = 0 uses the Dicke branch")
        # a coupling whose square underflows is a decoupled cavity
        g_sq = self.g ** 2
        omega_t = math.inf if g_sq == 0 else self.omega * self.J / (4.0 * g_sq)
        return ReducedParams(h_t=self.h / self.J, beta_t=self.beta * self.J, omega_t=omega_t)

    def scaled(self, factor):
        """Same physics with every energy multiplied by ``factor``."""
        return ModelParams(self.h * factor, self.J * factor, self.g * factor,
                           self.omega * factor, self.beta / factor)


@dataclass(frozen=True)
class ReducedParams:
    """``h_t = h/J``, ``beta_t = beta J``, ``omega_t = omega J / 4g^2`` (``inf`` for ``g = 0``)."""

    h_t: float
    beta_t: float
    omega_t: float

    def __post_init__(self):
        check_nonnegative("h_t", self.h_t)
        check_positive("beta_t", self.beta_t)
        check_positive("omega_t", self.omega_t, allow_inf=True)


@dataclass(frozen=True)
class MeanFieldSolution:
    x_t_sq: float
    h_eff_t: float
    s_x: float
    free_energy: float
    phase: Phase


class InteriorMinimum(NamedTuple):
    h_star: float
    value: float


class Landscape(NamedTuple):
    """Stationary structure of ``G(u)`` on ``u > 0`` at fixed ``(beta_t, omega_t)``.

    ``minima`` and ``maxima`` hold ``(u, G(u))`` pairs in increasing ``u``;
    ``g_zero`` is ``G(0)``.
    """

    beta_t: float
    omega_t: float
    minima: tuple
    maxima: tuple
    g_zero: float


def g_function(beta_t, omega_t, u, q=DEFAULT_QUADRATURE):
    """``G(u) = f_ising(beta_t, u) + omega_t u^2``, vectorized in ``u``."""
    u = np.asarray(u, dtype=float)
    return ising_free_energy(beta_t, u, q) + omega_t * u * u


def reduced_free_energy(h_eff_t, p, q=DEFAULT_QUADRATURE, constrained=True):
    """Free energy per spin ``F/(N J)`` at effective field ``h_eff_t``.

    The additive constant is dropped.  With ``constrained`` (default) an
    effective field below ``p.h_t`` is rejected; curve plotting passes
    ``constrained=False``.
    """
    h_eff = np.asarray(h_eff_t, dtype=float)
    if constrained and np.any(h_eff < p.h_t):
        raise DomainError("h_eff_t must be >= h_t")
    if math.isinf(p.omega_t):
        if np.any(h_eff != p.h_t):
            raise DomainError("with g = 0 the only admissible h_eff_t is h_t")
        return ising_free_energy(p.beta_t, h_eff, q)
    return ising_free_energy(p.beta_t, h_eff, q) + p.omega_t * (h_eff * h_eff - p.h_t ** 2)


def _scan_grid(omega_t, n_scan):
    # G' > 0 beyond 1/(2 omega_t) because |dm/du| <= 1; twice that is safe
    u_max = max(4.0, 1.0 / omega_t)
    grid = np.linspace(0.0, 4.0, n_scan + 1)
    if u_max > 4.0:
        grid = np.concatenate([grid, np.geomspace(4.0, u_max, 65)[1:]])
    return grid


def _slope_sign_function(beta_t, omega_t, q):
    """``I2(u) + omega_t``, which has the sign of ``G'(u)`` for ``u > 0``."""
    i2_zero = zero_field_coefficients(beta_t)[0]

    def phi(u):
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u, dtype=float)
        zero = u == 0
        out[zero] = i2_zero + omega_t
        if np.any(~zero):
            out[~zero] = coefficient_i2(beta_t, u[~zero], q) + omega_t
        return out

    return phi


def _resolve_close_pairs(phi, grid, vals):
    """Add grid points where a pair of roots may hide between two scan nodes.

    A minimum and maximum born close together make ``phi`` dip through zero
    and back inside one scan cell.  Each same-sign local dip of ``|phi|`` on
    the scan is minimized in its two neighbouring cells; a sign flip found
    there is added to the grid so the root loop sees both crossings.
    """
    extra = []
    for i in range(1, len(grid) - 1):
        a, b, c = vals[i - 1], vals[i], vals[i + 1]
        s = math.copysign(1.0, b)
        if b == 0 or s * a <= 0 or s * c <= 0 or not (abs(b) <= abs(a) and abs(b) <= abs(c)):
            continue
        res = minimize_scalar(lambda u: s * float(phi(np.array([u]))[0]),
                              bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                              options={"xatol": 1e-13})
        if s * res.fun < 0:
            extra.append(res.x)
    if not extra:
        return grid, vals
    grid = np.concatenate([grid, extra])
    vals = np.concatenate([vals, phi(np.asarray(extra))])
    order = np.argsort(grid, kind="stable")
    return grid[order], vals[order]


@lru_cache(maxsize=8192)
def landscape(beta_t, omega_t, q=DEFAULT_QUADRATURE, n_scan=N_SCAN):
    """Locate every interior stationary point of ``G`` by scan and bisection.

    The sign of ``G'(u) = 2 u (I2(beta_t, u) + omega_t)`` is scanned on
    ``[0, max(4, 1/omega_t)]``; each sign change is refined with Brent's
    method on the analytic derivative.  Results are cached per
    ``(beta_t, omega_t, q, n_scan)``.
    """
    beta_t = check_positive("beta_t", beta_t)
    omega_t = check_positive("omega_t", omega_t)
    phi = _slope_sign_function(beta_t, omega_t, q)
    grid = _scan_grid(omega_t, n_scan)
    vals = phi(grid)
    grid, vals = _resolve_close_pairs(phi, grid, vals)
    minima, maxima = [], []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0 and i > 0:
            continue
        if (a < 0 <= b) or (a > 0 >= b):
            if b == 0:
                root = grid[i + 1]
            else:
                root = brentq(lambda u: float(phi(np.array([u]))[0]), max(grid[i], 1e-300), grid[i + 1],
                              xtol=1e-13, rtol=4 * np.finfo(float).eps)
            pair = (root, float(g_function(beta_t, omega_t, root, q)))
            (minima if a < 0 else maxima).append(pair)
    if len(minima) > 1:
        log.warning("G(u) has %d local minima at beta_t=%g omega_t=%g", len(minima), beta_t, omega_t)
    return Landscape(beta_t, omega_t, tuple(minima), tuple(maxima),
                     float(ising_free_energy(beta_t, 0.0, q)))


def interior_minimum(beta_t, omega_t, q=DEFAULT_QUADRATURE):
    """Lowest interior local minimum of ``G(u)`` on ``u > 0``, or ``None``.

    ``G`` does not depend on ``h_t``.  Absence of a minimum means no
    superradiant phase exists at this ``(beta_t, omega_t)`` for any field.
    """
    if math.isinf(omega_t):
        return None
    land = landscape(float(beta_t), float(omega_t), q)
    if not land.minima:
        return None
    u, val = min(land.minima, key=lambda m: m[1])
    return InteriorMinimum(u, val)


def minimize(p, q=DEFAULT_QUADRATURE):
    """Global minimizer of the reduced free energy over ``h_eff_t >= h_t``.

    Candidates are the boundary ``h_eff_t = h_t`` and every interior local
    minimum of ``G`` lying above ``h_t``.  An exact tie between boundary and
    interior values resolves to the superradiant phase.  The order parameter
    is taken with ``x >= 0``, so ``s_x <= 0``.
    """
    f_boundary = float(ising_free_energy(p.beta_t, p.h_t, q))
    normal = MeanFieldSolution(0.0, p.h_t, 0.0, f_boundary, Phase.NORMAL)
    if math.isinf(p.omega_t):
        return normal
    land = landscape(float(p.beta_t), float(p.omega_t), q)
    candidates = [m for m in land.minima if m[0] > p.h_t]
    if not candidates:
        return normal
    u, g_val = min(candidates, key=lambda m: m[1])
    g_boundary = f_boundary + p.omega_t * p.h_t ** 2
    if g_val > g_boundary:
        return normal
    x_sq = u * u - p.h_t ** 2
    return MeanFieldSolution(
        x_t_sq=x_sq,
        h_eff_t=u,
        s_x=-2.0 * p.omega_t * math.sqrt(x_sq),
        free_energy=g_val - p.omega_t * p.h_t ** 2,
        phase=Phase.SUPERRADIANT,
    )


def photon_free_energy(beta, omega):
    """Thermal cavity term ``(1/beta) log(1 - exp(-beta omega))``.

    Intensive, so it never affects the minimization; reported on request.
    """
    return math.log(-math.expm1(-beta * omega)) / beta


# --- independent-spin (J = 0) branch ---------------------------------------


def _dicke_effective_field(m):
    """Minimizing ``h_eff`` for ``J = 0``.

    ``F/N = (omega / 4g^2)(u^2 - h^2) - log(2cosh(beta u))/beta`` is convex
    past its single interior stationary point, the root of
    ``tanh(beta u) = omega u / (2 g^2)``.
    """
    if m.g ** 2 == 0:
        return m.h
    kappa = m.omega / (2.0 * m.g ** 2)
    if m.beta <= kappa:
        return m.h
    u_star = brentq(lambda u: math.tanh(m.beta * u) - kappa * u, 1e-300, 2.0 / kappa,
                    xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return max(u_star, m.h)


def _dicke_state(m):
    u = _dicke_effective_field(m)
    x_sq = 0.0 if m.g ** 2 == 0 else max(u * u - m.h * m.h, 0.0) / (4.0 * m.g ** 2)
    if u <= m.h:
        x_sq = 0.0
    m_mag = math.tanh(m.beta * u)
    m_z = 0.0 if u == 0 else m_mag * m.h / u
    # at the stationary point -(omega/g) x equals -tanh(beta u) * 2 g x / u,
    # whose factors are each bounded by one
    s_x = 0.0 if x_sq == 0 else -m_mag * min(1.0, math.sqrt(u * u - m.h * m.h) / u)
    phase = Phase.SUPERRADIANT if x_sq > 0 else Phase.NORMAL
    f = (m.omega * x_sq - float(log2cosh(m.beta * u)) / m.beta)
    return x_sq, s_x, m_z, u, phase, f


def _coupled_state(m, q):
    p = m.reduced()
    sol = minimize(p, q)
    x_sq = 0.0 if sol.x_t_sq == 0 else (m.J / (2.0 * m.g)) ** 2 * sol.x_t_sq
    if sol.h_eff_t == 0:
        m_z = 0.0
    else:
        m_z = float(ising_magnetization(p.beta_t, sol.h_eff_t, q)) * p.h_t / sol.h_eff_t
    return x_sq, sol.s_x, m_z, sol.h_eff_t * m.J, sol.phase, sol.free_energy * m.J


def mean_field_state(m, q=DEFAULT_QUADRATURE):
    """``(x_sq, s_x, m_z, h_eff, phase, free_energy_per_spin)`` in physical units."""
    if m.J == 0:
        return _dicke_state(m)
    return _coupled_state(m, q)


@dataclass(frozen=True)
class Observables:
    x_sq: float
    s_x: float
    m_z: float
    chi: float
    h_eff: float
    phase: Phase
    boundary_adjacent: bool

    def as_dict(self):
        d = asdict(self)
        d["phase"] = self.phase.value
        return d


def _m_z_at(m, h, q):
    # m_z is odd in h, which lets the difference stencil straddle h = 0
    state = mean_field_state(ModelParams(abs(h), m.J, m.g, m.omega, m.beta), q)
    return math.copysign(state[2], h), state[4]


def observables(m, q=DEFAULT_QUADRATURE):
    """Order parameter, spin mean field, z magnetization and susceptibility.

    ``x_sq`` is the physical ``x^2 = <a + a^dag>^2 / 4N``.  ``m_z`` projects
    the magnetization along the effective field back onto the original z
    axis.  ``chi = d m_z / d h`` is a central difference with step
    ``1e-4 max(J, h)`` and a fresh minimization at each side; when the phase
    differs across the stencil the point is flagged ``boundary_adjacent``.
    """
    x_sq, s_x, m_z, h_eff, phase, _ = mean_field_state(m, q)
    scale = max(m.J, m.h)
    if scale == 0:
        scale = max(m.g, m.omega)
    dh = 1e-4 * scale
    up, ph_up = _m_z_at(m, m.h + dh, q)
    down, ph_down = _m_z_at(m, m.h - dh, q)
    chi = (up - down) / (2.0 * dh)
    adjacent = len({phase, ph_up, ph_down}) > 1
    return Observables(x_sq, s_x, m_z, chi, h_eff, phase, adjacent)


# --- simplex sweeps ----------------------------------------------------------


def simplex_points(total, resolution):
    """Barycentric grid ``(i, j, k)`` with ``i + j + k = resolution``.

    Returned as an ``(n, 6)`` array ``[h, J, g, i/res, j/res, k/res]`` in a
    fixed order: ``i`` (the field index) outer, ``j`` inner.
    """
    resolution = check_int("resolution", resolution, minimum=2)
    rows = []
    for i in range(resolution + 1):
        for j in range(resolution + 1 - i):
            k = resolution - i - j
            b = np.array([i, j, k], dtype=float) / resolution
            rows.append([total * b[0], total * b[1], total * b[2], *b])
    return np.array(rows)


SWEEP_COLUMNS = ["h", "J", "g", "bary_h", "bary_J", "bary_g", "x_sq", "s_x", "m_z", "chi",
                 "h_eff", "phase", "boundary_adjacent", "on_dicke_curve", "on_heff_curve", "error"]


def _sweep_point(args):
    h, J, g, omega, beta, q = args
    try:
        obs = observables(ModelParams(h, J, g, omega, beta), q)
        return obs.as_dict(), ""
    except Exception as exc:  # recorded in-row; the sweep carries on
        return None, f"{type(exc).__name__}: {exc}"


def _neighbours(i, j, resolution):
    for di, dj in ((1, -1), (-1, 1), (1, 0), (-1, 0), (0, 1), (0, -1)):
        a, b = i + di, j + dj
        if a >= 0 and b >= 0 and a + b <= resolution:
            yield a, b


def simplex_sweep(total, omega, beta, resolution, q=DEFAULT_QUADRATURE, workers=1):
    """Evaluate :func:`observables` on the slice ``h + J + g = total``.

    Returns a list of row dicts keyed by :data:`SWEEP_COLUMNS`.  The marker
    flags are grid-level: ``on_dicke_curve`` marks superradiant points with a
    normal neighbour; ``on_heff_curve`` marks points where ``h_eff / J - 1``
    changes sign towards a neighbour and this point is the closer one.
    Per-point failures fill ``error`` and leave NaNs.
    """
    total = check_positive("total", total)
    check_positive("omega", omega)
    check_positive("beta", beta)
    pts = simplex_points(total, resolution)
    jobs = [(float(r[0]), float(r[1]), float(r[2]), omega, beta, q) for r in pts]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sweep_point, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        results = [_sweep_point(j) for j in jobs]

    rows = []
    index = {}
    for n, (r, (obs, err)) in enumerate(zip(pts, results)):
        row = dict(zip(SWEEP_COLUMNS[:6], (float(v) for v in r)))
        if obs is None:
            row.update(x_sq=math.nan, s_x=math.nan, m_z=math.nan, chi=math.nan,
                       h_eff=math.nan, phase="", boundary_adjacent=False)
        else:
            row.update(obs)
        row["error"] = err
        rows.append(row)
        i = int(round(r[3] * resolution))
        j = int(round(r[4] * resolution))
        index[(i, j)] = n

    for (i, j), n in index.items():
        row = rows[n]
        nbrs = [rows[index[ab]] for ab in _neighbours(i, j, resolution)]
        row["on_dicke_curve"] = bool(row["phase"] == Phase.SUPERRADIANT.value and any(
            nb["phase"] == Phase.NORMAL.value for nb in nbrs))
        d = _heff_offset(row)
        row["on_heff_curve"] = bool(math.isfinite(d) and any(
            math.isfinite(_heff_offset(nb)) and (_heff_offset(nb) > 0) != (d > 0)
            and abs(d) <= abs(_heff_offset(nb)) for nb in nbrs))
    return rows


def _heff_offset(row):
    if not row["J"] > 0 or not math.isfinite(row["h_eff"]):
        return math.nan
    return row["h_eff"] / row["J"] - 1.0
