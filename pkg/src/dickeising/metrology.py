"""Temperature estimation from photon counts across the discontinuous transition.

The cavity is modelled as a displaced thermal state: for ``N`` spins with
order parameter ``x`` the count has mean ``mu = N x^2 + nbar`` and variance
``sigma^2 = N x^2 (1 + 2 nbar) + nbar + nbar^2`` where ``nbar`` is the
Bose-Einstein occupation at the system temperature.  Near the first-order
field the finite-size order parameter is modelled as
``N x_t^2 = N max(tanh(N^gamma s (h_t - h_c)), 0)`` with ``s`` the side on
which the superradiant phase lies.

Counts recorded while scanning ``h_t`` are combined linearly.  The best
linear unbiased estimator of a small shift ``delta`` of ``beta_t`` weights
each reading by ``mu'/sigma^2`` and reaches the variance
``(sum mu'^2 / sigma^2)^-1``.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import (DegenerateDesignError, OutOfRegionError, check_increasing, check_int,
                          check_positive)
from .meanfield import Phase, ReducedParams, minimize, observables
from .phase_diagram import TransitionKind, classify_landscape
from .quadrature import DEFAULT_QUADRATURE

DEFAULT_G_OVER_J = 2.0


def thermal_occupation(beta, omega):
    """Bose-Einstein occupation ``1 / (exp(beta omega) - 1)``."""
    return 1.0 / math.expm1(check_positive("beta", beta) * check_positive("omega", omega))


@dataclass(frozen=True)
class PhotonStats:
    mean: float
    variance: float


def photon_moments(N, x_sq, nbar):
    """Mean and variance of the photon count for physical order parameter ``x_sq``."""
    N_x = np.asarray(N, dtype=float) * np.asarray(x_sq, dtype=float)
    return N_x + nbar, N_x * (1.0 + 2.0 * nbar) + nbar + nbar * nbar


def photon_stats(m, N, q=DEFAULT_QUADRATURE):
    """Photon-count moments at the mean-field order parameter of ``m``."""
    N = check_int("N", N, minimum=1)
    x_sq = observables(m, q).x_sq
    mean, var = photon_moments(N, x_sq, thermal_occupation(m.beta, m.omega))
    return PhotonStats(float(mean), float(var))


def tanh_order_parameter(h_t, h_c, N, gamma, side=1):
    """Finite-size ``N x_t^2 = N max(tanh(N^gamma side (h_t - h_c)), 0)``.

    ``side = +1`` places the ordered phase above ``h_c``, ``-1`` below it.
    """
    check_positive("N", N)
    check_positive("gamma", gamma)
    z = N ** gamma * side * (np.asarray(h_t, dtype=float) - h_c)
    return N * np.maximum(np.tanh(z), 0.0)


@dataclass
class EstimatorDesign:
    """Scan grid with BLUE weights and the resulting variance.

    ``weights[i]`` applies to each single reading at ``grid[i]``;
    ``repeats[i]`` readings are taken there, so unbiasedness reads
    ``sum(repeats * weights * mu_prime) = 1``.
    """

    grid: np.ndarray
    weights: np.ndarray
    predicted_variance: float
    mu: np.ndarray
    sigma2: np.ndarray
    mu_prime: np.ndarray
    repeats: np.ndarray
    reference_beta: Optional[float] = None
    info: dict = field(default_factory=dict)

    @property
    def offset(self):
        """Constant ``c`` making the estimate ``c + sum g_i y_i`` vanish at ``delta = 0``."""
        return -float(np.sum(self.repeats * self.weights * self.mu))

    def estimate(self, counts_mean):
        """Estimate from per-point averaged counts ``counts_mean`` (shape ``(..., n)``)."""
        return np.asarray(counts_mean) @ (self.repeats * self.weights) + self.offset

    def variance_of(self, weights):
        """Variance of a linear estimator with arbitrary per-reading ``weights``."""
        w = np.asarray(weights, dtype=float)
        return float(np.sum(self.repeats * w * w * self.sigma2))

    def rows(self):
        return [{"h_t": float(h), "mu": float(a), "sigma2": float(b), "mu_prime": float(c),
                 "weight": float(w), "repeats": float(r)}
                for h, a, b, c, w, r in zip(self.grid, self.mu, self.sigma2, self.mu_prime,
                                             self.weights, self.repeats)]


DESIGN_COLUMNS = ["h_t", "mu", "sigma2", "mu_prime", "weight", "repeats"]


def blue_estimator(grid, mu_of_h, mu_prime_of_h, sigma2_of_h, repeats=None):
    """Best linear unbiased estimator for a parameter shift from scanned counts.

    Parameters
    ----------
    grid : array_like
        Scan points.
    mu_of_h, mu_prime_of_h, sigma2_of_h : callable or array_like
        Count mean, its derivative with respect to the estimated parameter and
        count variance, either as functions of the grid or as arrays on it.
    repeats : array_like, optional
        Number of readings per point (may be fractional for continuum
        designs); defaults to one each.

    Returns
    -------
    EstimatorDesign
        With weights ``g_i = V mu'_i / sigma^2_i`` and
        ``V = (sum repeats mu'^2 / sigma^2)^-1``.
    """
    grid = np.asarray(grid, dtype=float)

    def on_grid(f):
        return np.asarray(f(grid) if callable(f) else f, dtype=float) * np.ones_like(grid)

    mu, mu_p, s2 = on_grid(mu_of_h), on_grid(mu_prime_of_h), on_grid(sigma2_of_h)
    reps = np.ones_like(grid) if repeats is None else np.asarray(repeats, dtype=float) * np.ones_like(grid)
    if np.any(s2 <= 0) or not np.all(np.isfinite(s2)):
        raise DegenerateDesignError("count variances must be positive and finite")
    if np.any(reps < 0):
        raise DegenerateDesignError("repeats must be non-negative")
    info = float(np.sum(reps * mu_p * mu_p / s2))
    if not info > 0:
        raise DegenerateDesignError("no scan point is sensitive to the parameter")
    var = 1.0 / info
    return EstimatorDesign(grid, var * mu_p / s2, var, mu, s2, mu_p, reps)


@dataclass(frozen=True)
class GridSpec:
    """Scan layout in the scaled coordinate ``z = N^gamma side (h_t - h_c)``.

    The disordered side ``[-z_max, 0)`` is sampled uniformly.  The ordered
    side is sampled geometrically from ``z_floor`` up to ``z_max`` so that the
    sharp rise of ``mu'^2 / sigma^2`` just past ``h_c`` is resolved at every
    ``N``.  Readings are distributed with uniform ``density`` per unit
    ``h_t``, realised as trapezoid repeat weights.
    """

    z_max: float = 10.0
    n_disordered: int = 64
    n_ordered: int = 512
    z_floor_factor: float = 1e-3
    density: float = 1000.0

    def refined(self, factor=2):
        return GridSpec(self.z_max, self.n_disordered * factor, self.n_ordered * factor,
                        self.z_floor_factor, self.density)


def _trapezoid_weights(x):
    w = np.zeros_like(x)
    d = np.diff(x)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


@dataclass(frozen=True)
class OperatingPoint:
    """First-order critical field and its temperature slope at ``(omega_t, beta0_t)``."""

    omega_t: float
    beta0_t: float
    h_c: float
    h_c_prime: float
    side: int


def operating_point(omega_t, beta0_t, q=DEFAULT_QUADRATURE, step=1e-3):
    """Locate ``h_c(beta0_t)`` and ``dh_c/dbeta_t``.

    The slope is the Richardson combination of central differences with
    steps ``step*beta0_t`` and half that, accurate to fourth order.
    """
    check_positive("omega_t", omega_t)
    check_positive("beta0_t", beta0_t)
    d = step * beta0_t
    offsets = (-d, -d / 2, 0.0, d / 2, d)
    fields = []
    for off in offsets:
        b = beta0_t + off
        c = classify_landscape(b, omega_t, q)
        if c.kind is not TransitionKind.FIRST:
            raise OutOfRegionError(
                f"no discontinuous transition at omega_t={omega_t:g}, beta_t={b:g} ({c.kind.value})")
        fields.append(c.h_t_crit)
    h_c = fields[2]
    coarse = (fields[4] - fields[0]) / (2 * d)
    fine = (fields[3] - fields[1]) / d
    # probe which side of h_c is ordered, just inside the pocket
    probe = 1e-6 * max(h_c, 1.0)
    above = minimize(ReducedParams(h_c + probe, beta0_t, omega_t), q).phase is Phase.SUPERRADIANT
    return OperatingPoint(omega_t, beta0_t, h_c, (4 * fine - coarse) / 3, 1 if above else -1)


def _photon_scale(omega_t, g_over_J):
    # physical x^2 = (J/2g)^2 x_t^2 and omega/J = 4 omega_t (g/J)^2
    return 1.0 / (4.0 * g_over_J ** 2), 4.0 * omega_t * g_over_J ** 2


def design_for(op, N, gamma, grid_spec=GridSpec(), g_over_J=DEFAULT_G_OVER_J):
    """BLUE design for ``delta beta_t`` at an :class:`OperatingPoint`.

    ``mu'`` chains the analytic derivative of the tanh model through the
    finite-difference slope ``h_c'`` and adds the temperature dependence of
    ``nbar``.
    """
    N = check_positive("N", N)
    gamma = check_positive("gamma", gamma)
    c, omega_over_J = _photon_scale(op.omega_t, check_positive("g_over_J", g_over_J))
    nbar = 1.0 / math.expm1(op.beta0_t * omega_over_J)
    nbar_prime = -omega_over_J * nbar * (1.0 + nbar)
    eps = nbar * (1.0 + nbar) / (N * c * (1.0 + 2.0 * nbar))
    z_floor = max(grid_spec.z_floor_factor * min(eps, 1.0), 1e-300)
    # each side is integrated on its own so no reading straddles h_c
    z_neg = np.linspace(-grid_spec.z_max, 0.0, grid_spec.n_disordered + 1)
    z_pos = np.geomspace(z_floor, grid_spec.z_max, grid_spec.n_ordered)
    w_pos = _trapezoid_weights(z_pos)
    w_pos[0] += z_floor
    z = np.concatenate([z_neg, z_pos])
    dz = np.concatenate([_trapezoid_weights(z_neg), w_pos])
    scale = N ** gamma
    h = op.h_c + op.side * z / scale

    t = np.maximum(np.tanh(z), 0.0)
    dt = np.where(z > 0, 1.0 / np.cosh(np.minimum(z, 350.0)) ** 2, 0.0)
    mu = N * c * t + nbar
    sigma2 = N * c * t * (1.0 + 2.0 * nbar) + nbar + nbar * nbar
    # d z / d beta_t = -scale side h_c'
    mu_prime = N * c * dt * (-scale * op.side * op.h_c_prime) + nbar_prime
    repeats = grid_spec.density * dz / scale
    order = np.argsort(h)
    design = blue_estimator(h[order], mu[order], mu_prime[order], sigma2[order], repeats[order])
    design.reference_beta = op.beta0_t
    design.info = {"N": N, "gamma": gamma, "h_c": op.h_c, "h_c_prime": op.h_c_prime,
                   "nbar": nbar, "photon_scale": c, "eps": eps}
    return design


def temperature_estimator_variance(omega_t, beta0_t, N, gamma, grid_spec=GridSpec(),
                                   q=DEFAULT_QUADRATURE, g_over_J=DEFAULT_G_OVER_J):
    """Predicted variance of the best linear estimate of ``delta beta_t``."""
    op = operating_point(omega_t, beta0_t, q)
    return design_for(op, N, gamma, grid_spec, g_over_J).predicted_variance


def continuum_variance(op, N, gamma, density, g_over_J=DEFAULT_G_OVER_J):
    """Closed-form variance for a dense uniform scan, ignoring the ``nbar'`` term.

    ``V = (1 + 2 nbar) / (density N^(1+gamma) c h_c'^2 K(eps))`` with
    ``K(eps) = (1 - eps^2) log((1 + eps)/eps) - 1/2 + eps`` and
    ``eps = nbar (1 + nbar) / (N c (1 + 2 nbar))``.
    """
    c, omega_over_J = _photon_scale(op.omega_t, g_over_J)
    nbar = 1.0 / math.expm1(op.beta0_t * omega_over_J)
    eps = nbar * (1.0 + nbar) / (N * c * (1.0 + 2.0 * nbar))
    K = (1.0 - eps ** 2) * math.log1p(1.0 / eps) - 0.5 + eps
    return (1.0 + 2.0 * nbar) / (density * N ** (1.0 + gamma) * c * op.h_c_prime ** 2 * K)


@dataclass(frozen=True)
class ScalingFit:
    N_values: tuple
    variances: tuple
    fitted_exponent: float
    gamma: float
    intercept: float

    @property
    def residual(self):
        return abs(self.fitted_exponent + (1.0 + self.gamma))

    def rows(self):
        fit = [10 ** (self.intercept + self.fitted_exponent * math.log10(n)) for n in self.N_values]
        return [{"N": n, "variance": v, "fit": f} for n, v, f in zip(self.N_values, self.variances, fit)]


SCALING_COLUMNS = ["N", "variance", "fit"]


def sensitivity_scan(omega_t, beta0_t, N_list, gamma, q=DEFAULT_QUADRATURE, grid_spec=GridSpec(),
                     g_over_J=DEFAULT_G_OVER_J):
    """Variance over ``N_list`` and the least-squares exponent in log-log."""
    Ns = check_increasing("N_list", N_list)
    if Ns.size < 3:
        raise OutOfRegionError("N_list needs at least three sizes")
    op = operating_point(omega_t, beta0_t, q)
    var = np.array([design_for(op, n, gamma, grid_spec, g_over_J).predicted_variance for n in Ns])
    slope, intercept = np.polyfit(np.log10(Ns), np.log10(var), 1)
    return ScalingFit(tuple(int(n) if float(n).is_integer() else float(n) for n in Ns),
                      tuple(float(v) for v in var), float(slope), float(gamma), float(intercept))


def critical_field_shift(omega_t, beta0_t, rel_temperature=0.01, q=DEFAULT_QUADRATURE):
    """Relative move of the first-order field for a temperature change of ``rel_temperature``.

    Returns ``(h_c_colder, h_c, h_c_hotter)`` and the two relative shifts
    ``(h_c_colder - h_c)/h_c`` and ``(h_c_hotter - h_c)/h_c``.
    """
    fields = []
    for b in (beta0_t / (1.0 - rel_temperature), beta0_t, beta0_t / (1.0 + rel_temperature)):
        c = classify_landscape(b, omega_t, q)
        if c.kind is not TransitionKind.FIRST:
            raise OutOfRegionError(f"no discontinuous transition at beta_t={b:g}")
        fields.append(c.h_t_crit)
    h0 = fields[1]
    return tuple(fields), ((fields[0] - h0) / h0, (fields[2] - h0) / h0)


def order_parameter_cut(omega_t, beta_t, h_grid, q=DEFAULT_QUADRATURE):
    """Mean-field ``x_t^2`` along a field scan at fixed ``(omega_t, beta_t)``."""
    return np.array([minimize(ReducedParams(float(h), beta_t, omega_t), q).x_t_sq for h in h_grid])


def simulate_estimates(design, delta, n_trials, rng):
    """Gaussian count draws with the design's moments, shifted by ``delta mu'``.

    Each trial averages ``repeats`` readings per point, so the per-point mean
    count has variance ``sigma^2 / repeats``.  Returns ``n_trials`` estimates.
    """
    n_trials = check_int("n_trials", n_trials, minimum=1)
    keep = design.repeats > 0
    mean = design.mu[keep] + delta * design.mu_prime[keep]
    sd = np.sqrt(design.sigma2[keep] / design.repeats[keep])
    w = (design.repeats * design.weights)[keep]
    out = np.empty(n_trials)
    chunk = max(1, (1 << 22) // max(1, keep.sum()))
    for lo in range(0, n_trials, chunk):
        n = min(chunk, n_trials - lo)
        counts = mean + sd * rng.standard_normal((n, mean.size))
        out[lo:lo + n] = counts @ w + design.offset
    return out
