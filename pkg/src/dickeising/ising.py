"""Free-fermion thermodynamics of the periodic transverse-field Ising chain.

All quantities are per spin and in units of the spin coupling ``J``.  The
dimensionless inputs are the inverse temperature ``beta_t = beta * J`` and the
field ``h_t = h / J``.  After the Jordan-Wigner and Bogoliubov steps the chain
is a gas of free fermions with dispersion ``2 * J * e(k)`` where
``e(k) = sqrt(1 + h_t**2 - 2 h_t cos k)``, so every thermodynamic quantity is
a single Brillouin-zone average handled by :mod:`dickeising.quadrature`.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import DomainError, check_int, check_positive
from .quadrature import DEFAULT_QUADRATURE, periodic_mean

# Upper bound for the thermal-width node floor, keeps beta_t ~ 1e4 affordable.
_MAX_MIN_INTERVALS = 1 << 16


@dataclass(frozen=True)
class ReducedIsingParams:
    """Dimensionless Ising parameters ``beta_t = beta*J`` and ``h_t = h/J``."""

    beta_t: float
    h_t: float

    def __post_init__(self):
        check_positive("beta_t", self.beta_t)
        if not np.isfinite(self.h_t) or self.h_t < 0:
            raise DomainError(f"h_t must be finite and >= 0, got {self.h_t!r}")

    @classmethod
    def from_physical(cls, beta, h, J):
        """Build from inverse temperature, field and coupling (``J > 0``)."""
        check_positive("J", J)
        check_positive("beta", beta)
        return cls(beta_t=beta * J, h_t=h / J)


def dispersion(k, h_t):
    """Quasiparticle energy ``epsilon(k) / J = 2 sqrt(1 + h_t^2 - 2 h_t cos k)``."""
    if np.any(np.asarray(h_t) < 0):
        raise DomainError("h_t must be >= 0")
    return 2.0 * _half_energy(k, h_t)


def _half_energy(k, u):
    # clip guards the exact zero at k=0, u=1 against -0.0 from rounding
    return np.sqrt(np.maximum(1.0 + u * u - 2.0 * u * np.cos(k), 0.0))


def log2cosh(x):
    """``log(2 cosh x)`` for ``x >= 0`` without overflow."""
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x))


def tanhc(beta, e):
    """``tanh(beta * e) / e`` with its limit ``beta`` at ``e = 0``."""
    e = np.asarray(e, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.tanh(beta * e) / e
    return np.where(e > 0, out, beta * np.ones_like(out))


def min_intervals(beta_t):
    """Node floor that resolves the thermal scale ``1/beta_t`` near ``k = 0``."""
    return int(min(16 * beta_t, _MAX_MIN_INTERVALS))


def _fe_integrand(k, beta_t, u):
    return log2cosh(beta_t * _half_energy(k, u))


def _mag_integrand(k, beta_t, u):
    e = _half_energy(k, u)
    return tanhc(beta_t, e) * (u - np.cos(k))


def ising_free_energy(beta_t, h_t, q=DEFAULT_QUADRATURE):
    """Free energy per spin ``F/(N J)`` at scalar ``beta_t`` and scalar or 1-D ``h_t``.

    Vectorized in ``h_t``; each field value converges on its own node count.
    """
    u = np.asarray(h_t, dtype=float)
    if u.ndim == 0:
        return -periodic_mean(_fe_integrand, q, beta_t, float(u),
                              min_intervals=min_intervals(beta_t)) / beta_t
    vals = periodic_mean(_fe_integrand, q, beta_t, u.reshape(-1, 1),
                         min_intervals=min_intervals(beta_t))
    return -vals.reshape(u.shape) / beta_t


def ising_magnetization(beta_t, h_t, q=DEFAULT_QUADRATURE):
    """``-d f / d h_t``, the transverse magnetization per spin, vectorized in ``h_t``."""
    u = np.asarray(h_t, dtype=float)
    if u.ndim == 0:
        return periodic_mean(_mag_integrand, q, beta_t, float(u),
                             min_intervals=min_intervals(beta_t))
    vals = periodic_mean(_mag_integrand, q, beta_t, u.reshape(-1, 1),
                         min_intervals=min_intervals(beta_t))
    return vals.reshape(u.shape)


def free_energy_density(p, q=DEFAULT_QUADRATURE):
    """Thermodynamic-limit free energy per spin, ``F_Ising / (N J)``.

    Evaluates ``-(1/beta_t) <log 2cosh(beta_t e(k))>`` over the Brillouin
    zone.  Raises :class:`~dickeising.ConvergenceError` if the quadrature
    does not settle within ``q.max_doublings``.
    """
    return ising_free_energy(p.beta_t, p.h_t, q)


def free_energy_density_finite(p, N):
    """Free energy per spin of the ``N``-site quadratic fermion chain.

    Sums over the ``N`` momenta ``k = 2 pi n / N``.  The parity-dependent
    boundary term of the exact spin chain is not included, so this differs
    from the dense spin calculation at order ``1/N``.
    """
    N = check_int("N", N, minimum=2)
    k = 2.0 * np.pi * np.arange(N) / N
    return -float(np.sum(log2cosh(p.beta_t * _half_energy(k, p.h_t)))) / (N * p.beta_t)


def magnetization(p, q=DEFAULT_QUADRATURE):
    """Magnetization along the field, ``m = -d f / d h_t``, in ``[0, 1]``.

    The field derivative is taken analytically under the integral:
    ``m = <tanh(beta_t e) (h_t - cos k) / e>``.
    """
    return ising_magnetization(p.beta_t, p.h_t, q)
