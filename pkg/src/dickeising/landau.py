"""Ginzburg-Landau coefficients of the mean-field free energy.

At fixed ``(beta_t, h_t)`` the Ising part of the reduced free energy depends on
the order parameter only through ``s = x_t**2`` via the effective field
``u = sqrt(h_t**2 + s)``.  ``I2`` and ``I4`` are the first two Taylor
coefficients in ``s`` at ``s = 0``.  They are computed by differentiating the
Brillouin-zone integrand analytically; finite differences are only used by the
tests.

Writing ``E = e**2 = 1 + u**2 - 2 u cos k`` the derivatives at ``s = 0`` are
``E' = 1 - cos k / h_t`` and ``E'' = cos k / (2 h_t**3)``, and::

    I2 = -< tanh(b e)/e * E'/2 >
    I4 = -1/2 < tanh(b e)/e * E''/2 + E'**2/4 * b**3 rho(b e) >

with ``rho(z) = (sech(z)**2 - tanh(z)/z) / z**2``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize

from ._validation import DomainError, NoSolutionError, check_positive
from .ising import _half_energy, ising_free_energy, min_intervals, tanhc
from .quadrature import DEFAULT_QUADRATURE, periodic_mean

# below this z the series for rho is used; the direct form cancels badly
_RHO_SERIES_CUTOFF = 1e-2


@dataclass(frozen=True)
class LandauCoeffs:
    I0: float
    I2: float
    I4: float

    def quartic(self, x_t, omega_t=0.0):
        """Evaluate ``I0 + (I2 + omega_t) x^2 + I4 x^4``."""
        s = np.asarray(x_t, dtype=float) ** 2
        return self.I0 + (self.I2 + omega_t) * s + self.I4 * s * s


def _sech2(z):
    ez = np.exp(-2.0 * np.abs(z))
    return 4.0 * ez / (1.0 + ez) ** 2


def _rho(z):
    z = np.asarray(z, dtype=float)
    small = z < _RHO_SERIES_CUTOFF
    zs = np.where(small, 1.0, z)
    direct = (_sech2(zs) - np.tanh(zs) / zs) / (zs * zs)
    z2 = z * z
    series = -2.0 / 3.0 + 8.0 / 15.0 * z2 - 34.0 / 105.0 * z2 * z2
    return np.where(small, series, direct)


def _i2_integrand(k, beta_t, h):
    c = np.cos(k)
    e = _half_energy(k, h)
    return tanhc(beta_t, e) * (1.0 - c / h) / 2.0


def _i4_integrand(k, beta_t, h):
    c = np.cos(k)
    e = _half_energy(k, h)
    dE = 1.0 - c / h
    d2E = c / (2.0 * h ** 3)
    return 0.5 * (tanhc(beta_t, e) * d2E / 2.0 + dE * dE / 4.0 * beta_t ** 3 * _rho(beta_t * e))


# below this field the series in h_t**2 replaces the quadrature, whose
# integrand cancels like 1/h_t**3
_SMALL_FIELD = 0.15
_SERIES_TERMS = 24


def _series_exp(a):
    """Taylor coefficients of ``exp(a(t))`` for a series with ``a[0] == 0``."""
    out = np.zeros_like(a)
    out[0] = 1.0
    n = np.arange(len(a))
    for m in range(1, len(a)):
        out[m] = np.dot(n[1:m + 1] * a[1:m + 1], out[m - 1::-1][:m]) / m
    return out


def _series_log1p(a):
    """Taylor coefficients of ``log(1 + a(t))``."""
    out = np.zeros_like(a)
    out[0] = np.log1p(a[0])
    for m in range(1, len(a)):
        acc = m * a[m] - np.dot(np.arange(1, m) * out[1:m], a[m - 1:0:-1])
        out[m] = acc / (m * (1.0 + a[0]))
    return out


def _p_series(beta_t, e0, order):
    """Taylor coefficients in ``t`` of ``log 2cosh(beta_t sqrt(e0 + t))``."""
    n = np.arange(order + 1)
    binom = np.ones(order + 1)
    for m in range(1, order + 1):
        binom[m] = binom[m - 1] * (0.5 - (m - 1)) / m
    s = beta_t * np.sqrt(e0) * binom / e0 ** n
    sigma = s.copy()
    sigma[0] = 0.0
    tail = np.exp(-2.0 * s[0]) * _series_exp(-2.0 * sigma)
    return s + _series_log1p(tail)


def _small_field_i2_i4(beta_t, h):
    """``(I2, I4)`` from the exact power series in ``w = h_t**2``.

    Averaging over ``k`` kills odd powers of ``cos k`` and leaves
    ``<log 2cosh(b e)> = sum_j C(2j, j) p_2j(1 + w) w**j`` where ``p_n`` are
    the Taylor coefficients of ``log 2cosh(b sqrt(E))`` about ``E = 1 + w``.
    Converges for ``w < 1/4``.
    """
    w = h * h
    J = _SERIES_TERMS
    p = _p_series(beta_t, 1.0 + w, 2 * J + 2)
    d1 = d2 = 0.0
    c = 1.0
    for j in range(J + 1):
        if j:
            c *= (2 * j) * (2 * j - 1) / (j * j)
        d1 += c * ((2 * j + 1) * p[2 * j + 1] * w ** j + (j * p[2 * j] * w ** (j - 1) if j else 0.0))
        t2 = (2 * j + 1) * (2 * j + 2) * p[2 * j + 2] * w ** j
        if j >= 1:
            t2 += 2 * j * (2 * j + 1) * p[2 * j + 1] * w ** (j - 1)
        if j >= 2:
            t2 += j * (j - 1) * p[2 * j] * w ** (j - 2)
        d2 += c * t2
    return -d1 / beta_t, -d2 / (2.0 * beta_t)


def _check_field(h_t):
    h = np.asarray(h_t, dtype=float)
    if np.any(~np.isfinite(h)) or np.any(h <= 0):
        raise DomainError("Landau expansion needs h_t > 0; the expansion in x^2 is singular at h_t = 0")
    return h


def _batched(integrand, beta_t, h, q):
    if h.ndim == 0:
        return periodic_mean(integrand, q, beta_t, float(h), min_intervals=min_intervals(beta_t))
    out = periodic_mean(integrand, q, beta_t, h.reshape(-1, 1), min_intervals=min_intervals(beta_t))
    return out.reshape(h.shape)


def _coefficient(which, integrand, beta_t, h_t, q):
    h = _check_field(h_t)
    flat = np.atleast_1d(h).astype(float)
    out = np.empty_like(flat)
    small = flat < _SMALL_FIELD
    for i in np.nonzero(small)[0]:
        out[i] = _small_field_i2_i4(beta_t, flat[i])[which]
    if np.any(~small):
        out[~small] = -_batched(integrand, beta_t, flat[~small], q)
    return float(out[0]) if h.ndim == 0 else out.reshape(h.shape)


def coefficient_i2(beta_t, h_t, q=DEFAULT_QUADRATURE):
    """``I2(beta_t, h_t)``; vectorized in ``h_t``."""
    return _coefficient(0, _i2_integrand, beta_t, h_t, q)


def coefficient_i4(beta_t, h_t, q=DEFAULT_QUADRATURE):
    """``I4(beta_t, h_t)``; vectorized in ``h_t``."""
    return _coefficient(1, _i4_integrand, beta_t, h_t, q)


def landau_coefficients(beta_t, h_t, q=DEFAULT_QUADRATURE):
    """Return :class:`LandauCoeffs` at ``(beta_t, h_t)``; requires ``h_t > 0``."""
    check_positive("beta_t", beta_t)
    h = float(_check_field(h_t))
    return LandauCoeffs(
        I0=ising_free_energy(beta_t, h, q),
        I2=coefficient_i2(beta_t, h, q),
        I4=coefficient_i4(beta_t, h, q),
    )


def zero_field_coefficients(beta_t):
    """Limits of ``(I2, I4)`` as ``h_t -> 0``, in closed form.

    At zero field the Brillouin-zone average can be done term by term: with
    ``P(E) = log 2cosh(b sqrt(E))`` one gets ``I2 = -(P' + P'')/b`` and
    ``I4 = -(P''/2 + P''' + P''''/4)/b`` at ``E = 1``.
    """
    b = check_positive("beta_t", beta_t)
    t = np.tanh(b)
    L1, L2 = t, 1.0 - t * t
    L3 = -2.0 * t * L2
    L4 = L2 * (6.0 * t * t - 2.0)
    y1, y2, y3, y4 = 0.5, -0.25, 0.375, -15.0 / 16.0
    P1 = b * L1 * y1
    P2 = b * b * L2 * y1 ** 2 + b * L1 * y2
    P3 = b ** 3 * L3 * y1 ** 3 + 3 * b * b * L2 * y1 * y2 + b * L1 * y3
    P4 = (b ** 4 * L4 * y1 ** 4 + 6 * b ** 3 * L3 * y1 ** 2 * y2
          + b * b * L2 * (3 * y2 ** 2 + 4 * y1 * y3) + b * L1 * y4)
    return -(P1 + P2) / b, -(P2 / 2 + P3 + P4 / 4) / b


def second_order_condition(beta_t, h_t, omega_t, q=DEFAULT_QUADRATURE):
    """``I2 + omega_t``; its roots in ``h_t`` are second-order critical fields."""
    return coefficient_i2(beta_t, h_t, q) + omega_t


def max_neg_I2(q=DEFAULT_QUADRATURE, beta_range=(0.05, 50.0), h_range=(0.05, 10.0), n_grid=200):
    """Supremum of ``-I2`` over a log-spaced ``(beta_t, h_t)`` box.

    Coarse grid search (first maximum in row-major order wins ties) followed
    by a bounded Nelder-Mead polish in log coordinates.  Returns
    ``(value, (beta_t, h_t))``.
    """
    betas = np.geomspace(*beta_range, n_grid)
    hs = np.geomspace(*h_range, n_grid)
    grid = np.array([-coefficient_i2(b, hs, q) for b in betas])
    i, j = np.unravel_index(np.argmax(grid), grid.shape)

    lo = np.log([beta_range[0], h_range[0]])
    hi = np.log([beta_range[1], h_range[1]])
    res = minimize(
        lambda p: float(coefficient_i2(np.exp(p[0]), np.exp(p[1]), q)),
        x0=np.log([betas[i], hs[j]]),
        method="Nelder-Mead",
        bounds=list(zip(lo, hi)),
        options={"xatol": 1e-9, "fatol": 1e-14, "maxiter": 2000},
    )
    if -res.fun >= grid[i, j]:
        return float(-res.fun), (float(np.exp(res.x[0])), float(np.exp(res.x[1])))
    return float(grid[i, j]), (float(betas[i]), float(hs[j]))


def critical_beta():
    """Smallest ``beta_t`` at which ``I4`` can vanish.

    The ``I4 = 0`` curve ends on the ``h_t -> 0`` axis; the endpoint solves
    ``I4(beta_t, 0) = 0`` with the closed-form zero-field coefficient.  Below
    this inverse temperature no first-order transition exists.
    """
    return brentq(lambda b: zero_field_coefficients(b)[1], 0.5, 3.0, xtol=1e-14, rtol=1e-14)


def i4_zero_field(beta_t, q=DEFAULT_QUADRATURE, h_max=3.0, n_scan=96):
    """Field ``h_t`` on the ``I4 = 0`` curve at this ``beta_t``, or ``None``.

    For ``beta_t`` above :func:`critical_beta` the coefficient is negative at
    small field and turns positive once; that crossing is bracketed on a
    scan and bisected.
    """
    if zero_field_coefficients(beta_t)[1] >= 0:
        return None
    hs = np.geomspace(1e-6, h_max, n_scan)
    vals = coefficient_i4(beta_t, hs, q)
    if vals[0] >= 0:
        # crossing lies below the resolvable field; beta_t is just above beta_c
        return 0.0
    up = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    if up.size == 0:
        return None
    j = up[0]
    return brentq(lambda h: coefficient_i4(beta_t, h, q), hs[j], hs[j + 1], xtol=1e-13, rtol=1e-13)


def _neg_i2_on_curve(beta_t, q):
    h = i4_zero_field(beta_t, q)
    if h is None:
        raise NoSolutionError(f"no I4 = 0 point at beta_t={beta_t}")
    if h == 0.0:
        return -zero_field_coefficients(beta_t)[0], h
    return -coefficient_i2(beta_t, h, q), h


def omega_window(q=DEFAULT_QUADRATURE, beta_max=1e3):
    """Range of ``omega_t`` for which a tricritical point exists.

    The lower end is ``-I2`` at the zero-field end of the ``I4 = 0`` curve;
    the upper end is its large-``beta_t`` limit, the supremum of ``-I2``.
    """
    lo = -zero_field_coefficients(critical_beta())[0]
    hi, _ = _neg_i2_on_curve(beta_max, q)
    return lo, hi


def tricritical_point(omega_t, q=DEFAULT_QUADRATURE, beta_max=1e3):
    """Solve ``I4 = 0`` and ``I2 + omega_t = 0`` simultaneously.

    Walks the ``I4 = 0`` curve, parametrized by ``beta_t``, and bisects in
    ``beta_t`` for ``-I2 = omega_t``.  Along the curve ``-I2`` rises
    monotonically from about 0.2996 at ``beta_t = beta_c`` to the supremum of
    ``-I2`` at zero temperature; outside that window
    :class:`~dickeising.NoSolutionError` is raised.  Returns
    ``(beta_t, h_t)``.
    """
    omega_t = check_positive("omega_t", omega_t)
    bc = critical_beta()
    lo_val = -zero_field_coefficients(bc)[0]
    if omega_t <= lo_val:
        raise NoSolutionError(
            f"omega_t={omega_t} is below the I4 = 0 curve (needs > {lo_val:.6f})")
    hi_val, _ = _neg_i2_on_curve(beta_max, q)
    if omega_t >= hi_val:
        raise NoSolutionError(
            f"omega_t={omega_t} exceeds the bound on -I2 ({hi_val:.6f}); no transition")

    b_lo = bc * (1.0 + 1e-6)
    b_hi = 2.0 * bc
    while _neg_i2_on_curve(b_hi, q)[0] < omega_t:
        b_lo, b_hi = b_hi, min(2.0 * b_hi, beta_max)
    if _neg_i2_on_curve(b_lo, q)[0] > omega_t:
        # solution sits between beta_c and the first probe, where h -> 0
        b_lo = bc * (1.0 + 1e-12)
    b = brentq(lambda x: _neg_i2_on_curve(x, q)[0] - omega_t, b_lo, b_hi, xtol=1e-12, rtol=1e-12)
    return b, _neg_i2_on_curve(b, q)[1]
