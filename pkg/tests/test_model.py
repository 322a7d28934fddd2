import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fig_params
from oracles import fd_jacobian, field
from nodsis.errors import DegenerateParameterError, DomainError
from nodsis.model import (
    ModelParams,
    State,
    analytic_jacobian,
    f1,
    f2,
    jacobian_arrays,
    nodsis_vector_field,
    sis_vector_field,
    urgency,
)

P_FIG = dict(k_p=0.7, k_x=0.3, u0=0.7)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0.0, 0.3, 0.7, 0.3, 0.7)
    with pytest.raises(ValueError):
        ModelParams(0.5, 0.3, -0.1, 0.3, 0.7)
    with pytest.raises(ValueError):
        ModelParams(0.5, 0.3, 0.7, 0.3, 0.7, tau_x=0.0)
    with pytest.raises(ValueError):
        ModelParams(float("nan"), 0.3, 0.7, 0.3, 0.7)


def test_assumption1_flag():
    assert fig_params(0.5).assumption1_holds
    assert not fig_params(0.5, u0=0.2).assumption1_holds  # k_p + u0 = 0.9
    assert not fig_params(0.5, u0=1.0).assumption1_holds


def test_state_rejects_points_outside_region():
    State(0.0, -1.0)
    State(1.0, 1.0)
    for p, x in [(-1e-12, 0), (1.0 + 1e-12, 0), (0.5, 1.0 + 1e-12), (0.5, -1.1)]:
        with pytest.raises(DomainError):
            State(p, x)


@pytest.mark.parametrize(
    "p,x,expected",
    [(0.0, 0.0, 0.7), (1.0, 0.0, 1.4), (0.5, -0.5, 1.125)],
)
def test_urgency_examples(p, x, expected):
    assert urgency(p, x, fig_params(0.5)) == pytest.approx(expected, abs=1e-15)


def test_vector_field_vanishes_at_iife():
    for beta in (0.1, 0.5, 0.9):
        d = nodsis_vector_field(State(0, 0), fig_params(beta))
        assert (d.dp, d.dx) == (0.0, 0.0)


def test_vector_field_vanishes_at_iee():
    params = fig_params(0.36)
    d = nodsis_vector_field(State(1 - 0.3 / 0.36, 0.0), params)
    assert 1 - 0.3 / 0.36 == pytest.approx(1 / 6, abs=1e-15)
    assert abs(d.dp) < 1e-16 and d.dx == 0.0


def test_vector_field_worked_example():
    # u = 0.35 + 0.3 + 0.7 = 1.35 at (0.5, 1)
    d = nodsis_vector_field(State(0.5, 1.0), fig_params(0.75))
    assert d.dp == pytest.approx(0.225, abs=1e-15)
    assert d.dx == pytest.approx(-1 + math.tanh(1.35), abs=1e-15)
    assert d.dx == pytest.approx(-0.1259467, abs=1e-7)


def test_vector_field_matches_short_time_flow():
    # forward difference of a tiny RK4 step approximates the field
    from oracles import rk4_reference

    params = fig_params(0.75)
    args = (0.75, 0.3, 0.7, 0.3, 0.7)
    h = 1e-5
    p1, x1 = rk4_reference(0.5, 1.0, args, h, 1)
    d = nodsis_vector_field(State(0.5, 1.0), params)
    assert (p1 - 0.5) / h == pytest.approx(d.dp, abs=1e-5)
    assert (x1 - 1.0) / h == pytest.approx(d.dx, abs=1e-5)


def test_sis_baseline_examples():
    params = fig_params(0.75)
    assert sis_vector_field(0.0, params) == 0.0
    assert sis_vector_field(1 - 0.3 / 0.75, params) == pytest.approx(0.0, abs=1e-16)
    assert sis_vector_field(0.6, params) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        sis_vector_field(0.5, params, alpha=0.0)


def test_f1_limit_at_zero():
    assert f1(0.0, fig_params(0.5)) == pytest.approx(3 / 7, abs=1e-15)
    assert f1(0.0, fig_params(0.5, u0=0.2)) == pytest.approx(8 / 7, abs=1e-15)


def test_f1_series_branch_is_continuous():
    params = fig_params(0.5)
    xs = np.array([0.99e-4, 1.01e-4, -0.99e-4, -1.01e-4])
    direct = (np.arctanh(xs) / xs - 0.3 * xs**2 - 0.7) / 0.7
    assert np.allclose(f1(xs, params), direct, rtol=0, atol=1e-15)


def test_f1_f2_domain_errors():
    params = fig_params(0.5)
    for x in (1.0, -1.0, 1.5, 1 - 1e-10):
        with pytest.raises(DomainError):
            f1(x, params)
        with pytest.raises(DomainError):
            f2(x, params)
    with pytest.raises(DegenerateParameterError):
        f1(0.1, ModelParams(0.5, 0.3, 0.0, 0.3, 0.7))
    f1(1 - 1e-9, params)  # closed endpoint of the evaluation interval


def test_f2_at_zero():
    params = fig_params(0.75)
    assert f2(0.0, params) == pytest.approx((1 - 0.7) / 0.7 + 0.3 / 0.75 - 1, abs=1e-15)


def _sign_changes(vals):
    s = np.sign(vals)
    return int(np.count_nonzero(s[:-1] * s[1:] < 0))


def test_f2_root_counts():
    xs = np.linspace(-1 + 1e-9, 1 - 1e-9, 20001)
    assert _sign_changes(f2(xs, fig_params(0.75))) == 2
    assert _sign_changes(f2(xs, fig_params(0.25, u0=0.2))) == 0


def test_f1_even():
    xs = np.linspace(1e-6, 1 - 1e-9, 1000)
    params = fig_params(0.5)
    assert np.max(np.abs(f1(xs, params) - f1(-xs, params))) < 1e-12


@pytest.mark.parametrize("kp,kx,u0", [(0.7, 0.3, 0.7), (0.5, 0.1, 0.6), (0.9, 0.32, 0.2), (0.95, 0.0, 0.9), (0.4, 0.2, 0.65)])
def test_f1_f2_convex_positive_weak_peer_pressure(kp, kx, u0):
    params = ModelParams(0.6, 0.3, kp, kx, u0)
    xs = np.linspace(-1 + 1e-3, 1 - 1e-3, 10_000)
    for fn in (f1, f2):
        v = fn(xs, params)
        assert np.min(v[:-2] - 2 * v[1:-1] + v[2:]) >= -1e-9
    assert np.min(f1(xs, params)) > 0


def test_jacobian_closed_forms():
    J = analytic_jacobian(State(0, 0), fig_params(0.36))
    assert J.matrix == pytest.approx(np.diag([0.06, -0.3]), abs=1e-15)
    params = fig_params(0.36)
    J = analytic_jacobian(State(1 - 0.3 / 0.36, 0.0), params)
    assert J.j21 == 0.0
    assert J.j22 == pytest.approx((0.7 - 1) + 0.7 * (1 - 0.3 / 0.36), abs=1e-15)
    assert J.j12 == pytest.approx(0.3 - 0.3**2 / 0.36, abs=1e-15)
    assert J.j11 == pytest.approx(-0.36 + 0.3, abs=1e-15)


def test_jacobian_eigenvalues_satisfy_characteristic_polynomial():
    J = analytic_jacobian(State(0.4, -0.3), fig_params(0.75))
    tr, det = J.j11 + J.j22, J.j11 * J.j22 - J.j12 * J.j21
    for lam in J.eigenvalues:
        assert abs(lam * lam - tr * lam + det) <= 1e-9 * max(1.0, abs(lam) ** 2)


def test_jacobian_matches_finite_differences_on_grid():
    params = fig_params(0.75, taux=1.7)
    args = (0.75, 0.3, 0.7, 0.3, 0.7, 1.7)
    p, x = np.meshgrid(np.linspace(0, 1, 50), np.linspace(-1, 1, 50), indexing="ij")
    fd = fd_jacobian(p, x, args)
    j11, j12, j21, j22 = jacobian_arrays(p, x, params)
    analytic = np.stack([np.stack([j11, j12], -1), np.stack([j21, j22], -1)], -2)
    assert np.max(np.abs(analytic - fd)) < 1e-6


def test_cooperative_in_seeking_quadrant():
    params = fig_params(0.75)
    p, x = np.meshgrid(np.linspace(0, 1, 101), np.linspace(0, 1, 101), indexing="ij")
    _, j12, j21, _ = jacobian_arrays(p, x, params)
    assert np.all(j12 >= 0) and np.all(j21 >= 0)


def test_sech2_does_not_overflow():
    params = ModelParams(0.5, 0.3, 0.7, 50.0, 300.0)
    J = analytic_jacobian(State(1.0, 1.0), params)
    assert all(math.isfinite(v) for v in (J.j11, J.j12, J.j21, J.j22))


params_st = st.builds(
    ModelParams,
    beta_bar=st.floats(0.01, 2.0),
    delta=st.floats(0.01, 2.0),
    k_p=st.floats(0.0, 2.0),
    k_x=st.floats(0.0, 2.0),
    u0=st.floats(0.0, 2.0),
    tau_x=st.floats(0.1, 5.0),
)


@settings(max_examples=200, deadline=None)
@given(params=params_st, x=st.floats(-1.0, 1.0), p=st.floats(0.0, 1.0))
def test_boundary_conditions_of_trapping_region(params, x, p):
    d0 = nodsis_vector_field(State(0.0, x), params)
    d1 = nodsis_vector_field(State(1.0, x), params)
    dm = nodsis_vector_field(State(p, -1.0), params)
    dpl = nodsis_vector_field(State(p, 1.0), params)
    assert d0.dp == 0.0
    assert d1.dp <= 0.0
    assert dm.dx >= 0.0
    assert dpl.dx <= 0.0
    assert all(math.isfinite(v) for v in (d0.dp, d0.dx, d1.dp, dm.dx, dpl.dx))


@settings(max_examples=100, deadline=None)
@given(params=params_st, p=st.floats(0.0, 1.0), x=st.floats(-1.0, 1.0))
def test_field_agrees_with_oracle_formula(params, p, x):
    d = nodsis_vector_field(State(p, x), params)
    dp, dx = field(p, x, params.beta_bar, params.delta, params.k_p, params.k_x, params.u0, params.tau_x)
    assert d.dp == pytest.approx(float(dp), abs=1e-14)
    assert d.dx == pytest.approx(float(dx), abs=1e-14)
