import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dickeising import (DomainError, Order, Phase, ReducedParams, TransitionKind, classify,
                        first_order_branch, minimize, second_order_branch, trace_diagram,
                        tricritical_point)
from dickeising.landau import coefficient_i2, coefficient_i4
from dickeising.meanfield import g_function
from dickeising.phase_diagram import DIAGRAM_COLUMNS, classify_landscape, default_beta_grid

EPS = 1e-6


def _phase(h_t, beta_t, omega_t):
    return minimize(ReducedParams(h_t, beta_t, omega_t)).phase


def test_high_temperature_weak_cavity_is_second_order():
    c = classify(ReducedParams(h_t=0.0, beta_t=0.8, omega_t=0.25))
    assert c.kind is TransitionKind.SECOND
    assert c.h_t_crit == c.h_star and c.jump_x_t_sq == 0.0


def test_low_temperature_below_window_is_second_order():
    # omega_t = 0.25 lies below the window that hosts a tricritical point
    c = classify(ReducedParams(h_t=0.0, beta_t=20.0, omega_t=0.25))
    assert c.kind is TransitionKind.SECOND


@pytest.mark.parametrize("beta_t", [0.5, 2.0, 20.0, 200.0])
def test_strong_cavity_cost_has_no_transition(beta_t):
    assert classify(ReducedParams(0.0, beta_t, 0.40)).kind is TransitionKind.NO_TRANSITION_LINE


def test_decoupled_cavity_has_no_transition():
    assert classify(ReducedParams(0.5, 2.0, math.inf)).kind is TransitionKind.NO_TRANSITION_LINE


def test_operating_point_is_first_order():
    c = classify_landscape(1 / 0.77, 0.301)
    assert c.kind is TransitionKind.FIRST
    assert c.h_t_crit < c.h_star
    assert c.jump_x_t_sq == pytest.approx(c.h_star ** 2 - c.h_t_crit ** 2, rel=1e-14)


def test_classification_ignores_field():
    ref = classify(ReducedParams(0.0, 10.0, 0.32))
    for h in (0.1, 0.7, 5.0):
        assert classify(ReducedParams(h, 10.0, 0.32)) == ref


@pytest.mark.parametrize("beta_t, omega_t", [(10.0, 0.32), (1 / 0.77, 0.301), (50.0, 0.33)])
def test_first_order_edges_match_field_scan(beta_t, omega_t):
    # independent route: full minimization on a dense field grid
    c = classify_landscape(beta_t, omega_t)
    hs = np.linspace(0.0, c.h_star + 0.2, 2001)
    sr = np.array([_phase(h, beta_t, omega_t) is Phase.SUPERRADIANT for h in hs])
    on = np.flatnonzero(sr)
    step = hs[1] - hs[0]
    assert abs(hs[on[0]] - c.h_t_crit) <= step
    assert abs(hs[on[-1]] - c.h_star) <= step
    assert np.all(sr[on[0]:on[-1] + 1])


@pytest.mark.parametrize("beta_t, omega_t", [(10.0, 0.32), (1 / 0.77, 0.301), (50.0, 0.33)])
def test_first_order_jump_matches_minimizer(beta_t, omega_t):
    c = classify_landscape(beta_t, omega_t)
    below = minimize(ReducedParams(c.h_t_crit * (1 - EPS), beta_t, omega_t))
    above = minimize(ReducedParams(c.h_t_crit * (1 + EPS), beta_t, omega_t))
    assert below.phase is Phase.NORMAL and above.phase is Phase.SUPERRADIANT
    assert above.x_t_sq == pytest.approx(c.jump_x_t_sq, rel=1e-4)


@pytest.mark.parametrize("omega_t", [0.1, 0.25, 0.31])
def test_second_order_branch_consistency(omega_t):
    pts = second_order_branch(omega_t, default_beta_grid(24))
    assert pts
    for p in pts:
        assert p.order is Order.SECOND
        assert abs(p.residual) < 1e-8
        assert abs(float(coefficient_i2(p.beta_t, p.h_t_crit)) + omega_t) < 1e-8
        assert _phase(p.h_t_crit * (1 - EPS), p.beta_t, omega_t) is Phase.SUPERRADIANT
        assert _phase(p.h_t_crit * (1 + EPS), p.beta_t, omega_t) is Phase.NORMAL


@pytest.mark.parametrize("omega_t", [0.301, 0.31, 0.33])
def test_first_order_branch_consistency(omega_t):
    pts = first_order_branch(omega_t, default_beta_grid(24))
    assert pts
    for p in pts:
        assert p.order is Order.FIRST
        assert abs(p.residual) < 1e-8
        # the superradiant pocket lies above the discontinuous edge
        assert _phase(p.h_t_crit * (1 - EPS), p.beta_t, omega_t) is Phase.NORMAL
        assert _phase(p.h_t_crit * (1 + EPS), p.beta_t, omega_t) is Phase.SUPERRADIANT
        h_star = classify_landscape(p.beta_t, omega_t).h_star
        gap = float(g_function(p.beta_t, omega_t, p.h_t_crit) - g_function(p.beta_t, omega_t, h_star))
        assert abs(gap) < 1e-8


def test_no_first_order_outside_window():
    grid = default_beta_grid(24)
    assert first_order_branch(0.1, grid) == []
    assert first_order_branch(0.25, grid) == []
    assert second_order_branch(0.34, grid) == []


@pytest.mark.parametrize("omega_t", [0.305, 0.31, 0.33])
def test_first_order_branch_ends_at_tricritical_point(omega_t):
    b_tc, h_tc = tricritical_point(omega_t)
    assert abs(float(coefficient_i4(b_tc, h_tc))) < 1e-8
    assert abs(float(coefficient_i2(b_tc, h_tc)) + omega_t) < 1e-8
    just_below = classify_landscape(b_tc * (1 - 1e-3), omega_t)
    assert just_below.kind is TransitionKind.NO_TRANSITION_LINE
    near = [classify_landscape(b_tc * (1 + d), omega_t) for d in (1e-3, 1e-4, 1e-5)]
    assert all(c.kind is TransitionKind.FIRST for c in near)
    # both edges close in on the tricritical field and the jump vanishes like sqrt(beta - beta_tc)
    assert abs(near[-1].h_t_crit - h_tc) < 0.01 and abs(near[-1].h_star - h_tc) < 0.01
    dist = [abs(c.h_t_crit - h_tc) for c in near]
    assert dist[0] > dist[1] > dist[2]
    for a, b in zip(near, near[1:]):
        assert b.jump_x_t_sq / a.jump_x_t_sq == pytest.approx(10 ** -0.5, rel=0.05)


def test_weaker_cavity_cost_extends_superradiance():
    grid = default_beta_grid(24)
    strong = {p.beta_t: p.h_t_crit for p in second_order_branch(0.1, grid)}
    weak = {p.beta_t: p.h_t_crit for p in second_order_branch(0.3, grid)}
    common = sorted(set(strong) & set(weak))
    assert common and set(weak) <= set(strong)
    assert all(strong[b] > weak[b] for b in common)


def test_operating_point_on_traced_diagram():
    d = trace_diagram([0.301], np.array([1 / 0.77]))
    first = d.rows(Order.FIRST)
    assert len(first) == 1 and first[0]["h_t_crit"] == pytest.approx(0.20826848891150268, rel=1e-8)
    assert len(d.rows(Order.SECOND)) == 1


def test_trace_diagram_layout():
    grid = default_beta_grid(16)
    d = trace_diagram([0.31, 0.1], grid)
    keys = [(p.omega_t, p.beta_t, p.order.value) for p in d.points]
    assert keys == sorted(keys)
    assert all(set(r) == set(DIAGRAM_COLUMNS) for r in d.rows())
    for b, h in d.i4_curve:
        assert h == 0.0 or abs(float(coefficient_i4(b, h))) < 1e-8
    assert trace_diagram([]).points == []


def test_default_grid_and_validation():
    g = default_beta_grid(10, 0.1, 1.0)
    assert np.all(np.diff(g) > 0) and g[0] == pytest.approx(1.0) and g[-1] == pytest.approx(10.0)
    with pytest.raises(DomainError):
        second_order_branch(0.25, np.array([2.0, 1.0]))
    with pytest.raises(DomainError):
        trace_diagram([-0.1])


@given(st.floats(0.3, 60.0), st.floats(0.02, 0.34))
def test_classification_agrees_with_minimizer(beta_t, omega_t):
    c = classify_landscape(beta_t, omega_t)
    if c.kind is TransitionKind.NO_TRANSITION_LINE:
        for h in (0.0, 0.5, 1.0, 2.0):
            assert _phase(h, beta_t, omega_t) is Phase.NORMAL
        return
    assert _phase(c.h_star * (1 + 1e-5), beta_t, omega_t) is Phase.NORMAL
    mid = 0.5 * (c.h_t_crit + c.h_star) if c.kind is TransitionKind.FIRST else 0.5 * c.h_star
    assert _phase(mid, beta_t, omega_t) is Phase.SUPERRADIANT
