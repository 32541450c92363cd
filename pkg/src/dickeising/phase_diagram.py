"""Transition lines in the ``(1/beta_t, h_t)`` plane at fixed ``omega_t``.

Because the stationary points of ``G(u) = f_ising(beta_t, u) + omega_t u^2``
do not depend on ``h_t``, the whole field dependence at one temperature
follows from a single landscape:

* no interior minimum: no transition at any field;
* an interior minimum ``h_star`` lower than ``G(0)``: the superradiant phase
  fills ``h_t < h_star`` and the only transition, at ``h_star``, is
  continuous;
* an interior minimum above ``G(0)``, behind a local maximum ``u_m``: the
  superradiant phase is the pocket ``h1 < h_t < h_star``, where ``h1`` in
  ``(0, u_m)`` solves ``G(h1) = G(h_star)``.  The lower edge is a
  discontinuous transition with jump ``h_star**2 - h1**2`` in ``x_t**2``;
  the upper edge stays continuous.

The pocket is born at the tricritical point where ``u_m`` and ``h_star``
merge, which is where ``I4`` changes sign along ``I2 + omega_t = 0``.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import bisect

from ._validation import check_increasing, check_positive
from .landau import coefficient_i2, critical_beta, i4_zero_field
from .meanfield import g_function, landscape
from .quadrature import DEFAULT_QUADRATURE


class TransitionKind(str, enum.Enum):
    NO_TRANSITION_LINE = "none"
    SECOND = "second"
    FIRST = "first"


class Order(str, enum.Enum):
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class Classification:
    """What happens at fixed ``(beta_t, omega_t)`` as ``h_t`` is lowered.

    ``h_t_crit`` is the field of the transition that names ``kind``: the
    discontinuous lower edge for ``FIRST`` and ``h_star`` for ``SECOND``.
    ``h_star`` is always the continuous upper edge when a transition exists.
    """

    kind: TransitionKind
    h_t_crit: Optional[float] = None
    h_star: Optional[float] = None
    jump_x_t_sq: float = 0.0
    residual: float = 0.0


@dataclass(frozen=True)
class BoundaryPoint:
    omega_t: float
    beta_t: float
    h_t_crit: float
    order: Order
    jump_x_t_sq: float = 0.0
    residual: float = 0.0

    @property
    def inv_beta_t(self):
        return 1.0 / self.beta_t

    def as_row(self):
        return {
            "omega_t": self.omega_t,
            "beta_t": self.beta_t,
            "inv_beta_t": self.inv_beta_t,
            "h_t_crit": self.h_t_crit,
            "order": self.order.value,
            "jump_x_t_sq": self.jump_x_t_sq,
            "residual": self.residual,
        }


DIAGRAM_COLUMNS = ["omega_t", "beta_t", "inv_beta_t", "h_t_crit", "order", "jump_x_t_sq", "residual"]


def default_beta_grid(n=96, inv_min=0.05, inv_max=1.0):
    """``beta_t`` values for ``1/beta_t`` evenly spaced in ``[inv_min, inv_max]``, ascending."""
    return np.sort(1.0 / np.linspace(inv_min, inv_max, n))


def _first_order_field(beta_t, omega_t, u_peak, g_star, q):
    """Solve ``G(h) = G(h_star)`` on ``(0, u_peak)`` where ``G`` increases."""

    def gap(h):
        return float(g_function(beta_t, omega_t, h, q)) - g_star

    h1 = bisect(gap, 0.0, u_peak, xtol=1e-10, maxiter=200)
    return h1, gap(h1)


def classify_landscape(beta_t, omega_t, q=DEFAULT_QUADRATURE):
    """:func:`classify` keyed directly on ``(beta_t, omega_t)``."""
    beta_t = check_positive("beta_t", beta_t)
    omega_t = check_positive("omega_t", omega_t, allow_inf=True)
    if math.isinf(omega_t):
        return Classification(TransitionKind.NO_TRANSITION_LINE)
    land = landscape(beta_t, omega_t, q)
    if not land.minima:
        return Classification(TransitionKind.NO_TRANSITION_LINE)
    h_star, g_star = min(land.minima, key=lambda m: m[1])
    peaks = [m for m in land.maxima if m[0] < h_star]
    if g_star <= land.g_zero or not peaks:
        residual = float(coefficient_i2(beta_t, h_star, q)) + omega_t
        return Classification(TransitionKind.SECOND, h_star, h_star, 0.0, residual)
    u_peak = max(peaks, key=lambda m: m[1])[0]
    h1, residual = _first_order_field(beta_t, omega_t, u_peak, g_star, q)
    return Classification(TransitionKind.FIRST, h1, h_star, h_star ** 2 - h1 ** 2, residual)


def classify(p, q=DEFAULT_QUADRATURE):
    """Transition type met when lowering ``h_t`` at the ``(beta_t, omega_t)`` of ``p``.

    ``p.h_t`` plays no role: the landscape that decides the answer is
    independent of the field.
    """
    return classify_landscape(p.beta_t, p.omega_t, q)


def second_order_branch(omega_t, beta_grid=None, q=DEFAULT_QUADRATURE):
    """Continuous transition field ``h_star`` for each ``beta_t`` that has one.

    Temperatures without an interior minimum are skipped.  Each point
    carries the residual ``I2(beta_t, h_star) + omega_t``.
    """
    beta_grid = check_increasing("beta_grid", default_beta_grid() if beta_grid is None else beta_grid)
    out = []
    for b in beta_grid:
        c = classify_landscape(float(b), omega_t, q)
        if c.h_star is None:
            continue
        residual = float(coefficient_i2(float(b), c.h_star, q)) + omega_t
        out.append(BoundaryPoint(omega_t, float(b), c.h_star, Order.SECOND, 0.0, residual))
    return out


def first_order_branch(omega_t, beta_grid=None, q=DEFAULT_QUADRATURE):
    """Discontinuous transition field ``h1`` for each ``beta_t`` that has one.

    The residual is the free-energy gap ``G(h1) - G(h_star)``; the recorded
    jump is ``h_star**2 - h1**2``.
    """
    beta_grid = check_increasing("beta_grid", default_beta_grid() if beta_grid is None else beta_grid)
    out = []
    for b in beta_grid:
        c = classify_landscape(float(b), omega_t, q)
        if c.kind is TransitionKind.FIRST:
            out.append(BoundaryPoint(omega_t, float(b), c.h_t_crit, Order.FIRST, c.jump_x_t_sq, c.residual))
    return out


@dataclass
class Diagram:
    """Boundary points of every requested ``omega_t`` plus the ``I4 = 0`` locus."""

    points: List[BoundaryPoint] = field(default_factory=list)
    i4_curve: List[tuple] = field(default_factory=list)

    def rows(self, order=None):
        return [p.as_row() for p in self.points if order is None or p.order is order]


def i4_curve(beta_grid=None, q=DEFAULT_QUADRATURE):
    """``(beta_t, h_t)`` pairs on ``I4 = 0`` for grid temperatures above the critical one."""
    beta_grid = check_increasing("beta_grid", default_beta_grid() if beta_grid is None else beta_grid)
    b_c = critical_beta()
    out = []
    for b in beta_grid:
        if b <= b_c:
            continue
        h = i4_zero_field(float(b), q)
        if h is not None:
            out.append((float(b), float(h)))
    return out


def trace_diagram(omega_list, beta_grid=None, q=DEFAULT_QUADRATURE):
    """Both branches for each ``omega_t`` and the ``I4 = 0`` locus, sorted by ``(omega_t, beta_t)``."""
    beta_grid = check_increasing("beta_grid", default_beta_grid() if beta_grid is None else beta_grid)
    omegas = sorted(check_positive("omega_t", w) for w in omega_list)
    if not omegas:
        return Diagram()
    points = []
    for w in omegas:
        points.extend(second_order_branch(w, beta_grid, q))
        points.extend(first_order_branch(w, beta_grid, q))
    points.sort(key=lambda p: (p.omega_t, p.beta_t, p.order.value))
    return Diagram(points, i4_curve(beta_grid, q))
