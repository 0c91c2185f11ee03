import math

import numpy as np
import pytest

from hgf import calculus, reduction, solutions
from conftest import order_ok
from hgf.errors import ConstraintError, DomainError, NumericalError
from hgf.model import Params


def _r38(a1=0.5, a4=0.7, a3=1.0, beta=0.3):
    return reduction.reduced_system("R38", beta=beta, a1=a1, a3=a3, a4=a4)


def test_rhs_r38_decoupled_growth():
    sys = _r38(a1=0.5, beta=0.3)
    out = reduction.rhs(sys, (2.0, 0.0, 0.0), 0.0)
    growth = 1 + 0.3**2 * 0.5**2
    assert out[0] == pytest.approx(2.0 * growth, rel=1e-15)
    assert out[1] == out[2] == 0.0


def test_rhs_r58_steady_point():
    p = Params(1, 1, 1, 1, 1)
    sys = reduction.reduced_system("R58", alpha=1.3, params=p)
    out = reduction.rhs(sys, (0, 0, 0, 0, 1, 0), 0.0)
    np.testing.assert_array_equal(out, 0.0)


def test_rhs_l36_homogeneous_zero():
    sys = reduction.reduced_system("L36", alpha=1.0, a1=0.5, beta=0.2,
                                   kappa1=0.25, kappa2=1.0)
    np.testing.assert_array_equal(reduction.rhs(sys, (0.0, 0.0), 0.7), 0.0)


def test_rhs_dimension_mismatch():
    with pytest.raises(ConstraintError, match="dimension"):
        reduction.rhs(_r38(), (1.0, 2.0), 0.0)


def test_reduced_system_coefficient_checking():
    with pytest.raises(ConstraintError, match="missing"):
        reduction.reduced_system("R38", beta=0.1, a1=0.5, a3=1.0)
    with pytest.raises(ConstraintError, match="unexpected"):
        reduction.reduced_system("T2d", a1=0.5, a4=1.0, alpha=2.0)
    with pytest.raises(ConstraintError, match="d1-normalized"):
        reduction.reduced_system(
            "R58", alpha=1.0, params=Params(1, 1, 1, 1, 1, d1=2.0))


def test_integrate_r38_matches_closed_form():
    a1, a4, beta = 0.5, 0.7, 0.3
    d1, d2v = 1.3, 0.4
    sys = _r38(a1=a1, a4=a4, beta=beta)
    y0 = np.asarray(reduction.closed_form_R38("i", a1, d1, d2v, beta, 0.0,
                                              a4=a4))
    traj = reduction.integrate(sys, y0, (0.0, 3.0), max_step=0.05)
    ts = np.linspace(0, 3, 121)
    exact = np.stack(reduction.closed_form_R38("i", a1, d1, d2v, beta, ts,
                                               a4=a4), axis=1)
    assert np.max(np.abs(traj.evaluate(ts) - exact)) < 1e-7


@pytest.mark.parametrize("case", ["i", "ii", "iii"])
def test_r38_oracle_equivalence_all_cases(case, rng):
    # node values from the adaptive integrator stay within a small multiple
    # of the integrator tolerance of the closed forms, 20 draws per case
    rel_tol = 1e-9
    for _ in range(20):
        a1 = rng.uniform(0.1, 1.0)
        beta = rng.uniform(-0.5, 0.5)
        d1 = rng.uniform(0.2, 3.0)
        d2v = rng.uniform(0.1, 2.0)
        if case == "i":
            kw, a3v = {"a4": rng.uniform(0.05, 0.95)}, 1.0
            a4v = kw["a4"]
        elif case == "ii":
            kw, a3v = {"a4": rng.uniform(0.05, 0.95)}, 0.0
            a4v = kw["a4"]
        else:
            kw, a3v = {"a3": rng.uniform(0.1, 1.5)}, None
            a3v = kw["a3"]
            a4v = 1.0 + a1 + kw["a3"]
        sys = reduction.reduced_system("R38", beta=beta, a1=a1, a3=a3v,
                                       a4=a4v)
        y0 = np.asarray(reduction.closed_form_R38(case, a1, d1, d2v, beta,
                                                  0.0, **kw))
        traj = reduction.integrate(sys, y0, (0.0, 3.0), rel_tol=rel_tol)
        exact = np.stack(reduction.closed_form_R38(case, a1, d1, d2v, beta,
                                                   traj.xs, **kw), axis=1)
        scale = np.max(np.abs(exact))
        dev = float(np.max(np.abs(traj.ys - exact)))
        assert dev <= 10 * (rel_tol * scale * 50 + 1e-12), (case, dev, scale)


def test_integrate_steady_state_constant():
    p = Params(1, 1, 1, 1, 1)
    sys = reduction.reduced_system("R58", alpha=1.0, params=p)
    traj = reduction.integrate(sys, np.array([0, 0, 0, 0, 1, 0.0]),
                               (0.0, 5.0))
    assert np.max(np.abs(traj.ys - traj.ys[0])) == 0.0


def test_integrate_l36_bounded_both_directions():
    sys = reduction.reduced_system("L36", alpha=5 / math.sqrt(6), a1=0.5,
                                   beta=3.0, kappa1=0.25, kappa2=1.0)
    right = reduction.integrate(sys, (1.0, 0.0), (0.0, 20.0))
    left = reduction.integrate(sys, (1.0, 0.0), (0.0, -20.0))
    assert np.isfinite(right.ys).all() and np.isfinite(left.ys).all()
    assert left.xs[0] == pytest.approx(-20.0)
    assert np.all(np.diff(left.xs) > 0)  # stored ascending


def test_integrate_tolerance_validation():
    with pytest.raises(ConstraintError, match="tolerances"):
        reduction.integrate(_r38(), (1.0, 1.0, 1.0), (0, 1), rel_tol=0.5)


def test_integrate_blowup_reports_reach_point():
    # logistic-type quadratic growth from far outside the basin
    sys = _r38(a1=1.0, a4=1.0, a3=1.0, beta=0.0)
    with pytest.raises(NumericalError, match="t ="):
        reduction.integrate(sys, (0.0, -50.0, 0.0), (0.0, 10.0))


def test_closed_form_r38_values_and_limits():
    a1, a4, d1, d2v, beta = 0.5, 0.7, 1.3, 0.4, 0.3
    U, V, W = reduction.closed_form_R38("i", a1, d1, d2v, beta, 0.0, a4=a4)
    assert float(U) == pytest.approx(d2v, rel=1e-14)
    assert float(V) == pytest.approx((1 + a1) * d1 / (a1 * (1 + a1 * a4)),
                                     rel=1e-14)
    assert float(W) == pytest.approx((1 - a4) * d1 / (1 + a1 * a4), rel=1e-14)
    _, V, W = reduction.closed_form_R38("i", a1, d1, d2v, beta, 40.0, a4=a4)
    assert float(V) == pytest.approx((1 + a1) / (a1 * (1 + a1 * a4)), rel=1e-12)
    assert float(W) == pytest.approx((1 - a4) / (1 + a1 * a4), rel=1e-12)


def test_closed_form_r38_case_ii_a4_one():
    W = reduction.closed_form_R38("ii", 0.5, 1.5, 0.5, 0.2,
                                  np.linspace(0, 2, 9), a4=1.0)[2]
    np.testing.assert_array_equal(W, 0.0)


def test_closed_form_r38_denominator_error():
    with pytest.raises(DomainError, match="vanishes at t ="):
        reduction.closed_form_R38("i", 0.5, 2.0, 0.5, 0.2,
                                  np.linspace(-5, 0, 11), a4=0.7)


def test_reconstruct_a34_beta_zero_is_plane_shift():
    U = lambda om: np.sin(om)
    V = lambda om: np.cos(om)
    W = lambda om: 0.5 * om
    a = reduction.make_ansatz("A34", alpha=2.0, beta=0.0, a1=0.5)
    t, x = 0.7, np.linspace(-1, 1, 5)
    u, v, w = reduction.reconstruct(a, {"U": U, "V": V, "W": W}, t, x)
    om = x - 2.0 * t
    np.testing.assert_allclose(u, np.sin(om), rtol=1e-15)
    np.testing.assert_allclose(v, np.cos(om) - np.sin(om) / 0.5, rtol=1e-14)
    np.testing.assert_allclose(w, 0.5 * om, rtol=1e-15)


def test_reconstruct_a37_at_x_zero():
    U = lambda t: 2.0 + t
    V = lambda t: 1.0 + t
    a = reduction.make_ansatz("A37", beta=0.4, a1=0.5)
    u, v, w = reduction.reconstruct(a, {"U": U, "V": V}, 0.3, 0.0)
    assert float(u) == pytest.approx(2.3, rel=1e-15)
    assert float(v) == pytest.approx(1.3 - 2.3 / 0.5, rel=1e-14)
    assert float(w) == 0.0


def test_t2a_gamma_zero_matches_a34():
    profs = {"U": np.sin, "V": np.cos, "W": np.tanh}
    t2a = reduction.make_ansatz("T2a", alpha=1.5, beta=0.3, gamma=0.0,
                                a1=0.5, a4=0.8)
    a34 = reduction.make_ansatz("A34", alpha=1.5, beta=0.3, a1=0.5)
    t, x = 0.4, np.linspace(-2, 2, 9)
    for a, b in zip(reduction.reconstruct(t2a, profs, t, x),
                    reduction.reconstruct(a34, profs, t, x)):
        np.testing.assert_allclose(a, b, rtol=1e-14)


def test_verify_reduction_pairing_enforced():
    sys = _r38()
    a34 = reduction.make_ansatz("A34", alpha=1.0, beta=0.3, a1=0.5)
    with pytest.raises(ConstraintError, match="pairs with"):
        reduction.verify_reduction(sys, a34, Params(1, 1, 1, 1, 1), {},
                                   (0.5, -1, 1), [4e-3, 2e-3])


def test_r38_profiles_through_a37_give_fam40(fam40_std):
    # closed separable profiles fed through the t-based ansatz reproduce
    # the closed-form family pointwise and pass the residual refinement
    a1, a4, beta = 0.1, 0.5, fam40_std.meta["beta"]
    d1, d2v = 2.0, 0.5

    def U(t):
        return reduction.closed_form_R38("i", a1, d1, d2v, beta, t, a4=a4)[0]

    def V(t):
        return reduction.closed_form_R38("i", a1, d1, d2v, beta, t, a4=a4)[1]

    def W(t):
        return reduction.closed_form_R38("i", a1, d1, d2v, beta, t, a4=a4)[2]

    ansatz = reduction.make_ansatz("A37", beta=beta, a1=a1)
    profs = {"U": U, "V": V, "W": W}
    t, x = 0.5, np.linspace(0, 5, 11)
    for a, b in zip(reduction.reconstruct(ansatz, profs, t, x),
                    fam40_std.evaluate(t, x)):
        np.testing.assert_allclose(a, b, rtol=1e-12)
    rep = reduction.verify_reduction(_r38(a1=a1, a4=a4, beta=beta), ansatz,
                                     fam40_std.params, profs,
                                     (0.5, 0.0, 5.0), [8e-3, 4e-3, 2e-3])
    assert all(order_ok(o) for o in rep.order_estimate)


def test_r58_plane_ansatz_with_tf63_profiles(tf63_std):
    sys = reduction.reduced_system("R58", alpha=tf63_std.speed,
                                   params=tf63_std.params)
    profs = {
        "U": lambda om: tf63_std.evaluate(0.0, om)[0],
        "V": lambda om: tf63_std.evaluate(0.0, om)[1],
        "W": lambda om: tf63_std.evaluate(0.0, om)[2],
    }
    ansatz = reduction.make_ansatz("plane", alpha=tf63_std.speed)
    rep = reduction.verify_reduction(sys, ansatz, tf63_std.params, profs,
                                     (0.5, -8.0, 8.0), [8e-3, 4e-3, 2e-3])
    assert all(order_ok(o) for o in rep.order_estimate)


@pytest.mark.parametrize("sid", ["T2a", "T2b", "T2c", "T2d"])
def test_table2_rows_reconstruct_solutions(sid):
    a1, a4 = 0.5, 0.8
    coeffs = {
        "T2a": dict(alpha=1.2, beta=0.3, a1=a1, a4=a4),
        "T2b": dict(alpha=1.2, gamma=0.15, a1=a1, a4=a4),
        "T2c": dict(beta=0.3, a1=a1, a4=a4),
        "T2d": dict(a1=a1, a4=a4),
    }[sid]
    sys = reduction.reduced_system(sid, **coeffs)
    akw = dict(coeffs)
    if sid in ("T2a", "T2c", "T2d"):
        akw["gamma"] = 0.15  # enters the ansatz only, not the reduced system
    ansatz = reduction.make_ansatz(sid, **akw)
    p = Params(a1=a1, a2=1.0, a3=0.0, a4=a4, a5=a1 * a4)
    if sid in ("T2a", "T2b"):
        y0 = np.array([0.15, 0.0, 0.2, 0.0, 0.25, 0.0])
        traj = reduction.dense_profile(sys, y0, 0.0, -6.0, 6.0, step=2e-3)
        window = (0.5, -5.0, 5.0)
    else:
        y0 = np.array([0.15, 0.2, 0.25])
        traj = reduction.dense_profile(sys, y0, 0.0, -0.1, 1.2, step=1e-3)
        window = (0.5, 0.0, 3.0)
    profs = reduction.trajectory_profiles(sys, traj)
    rep = reduction.verify_reduction(sys, ansatz, p, profs, window,
                                     [8e-3, 4e-3, 2e-3])
    assert all(order_ok(o) for o in rep.order_estimate), rep.order_estimate


def test_dense_profile_matches_adaptive():
    sys = reduction.reduced_system("L36", alpha=5 / math.sqrt(6), a1=0.5,
                                   beta=3.0, kappa1=0.3, kappa2=1.0)
    dense = reduction.dense_profile(sys, (1.0, 0.0), 0.0, -5.0, 5.0,
                                    step=5e-3)
    adaptive = reduction.integrate(sys, (1.0, 0.0), (0.0, 5.0),
                                   max_step=0.05)
    xs = np.linspace(0, 5, 101)
    np.testing.assert_allclose(dense.evaluate(xs)[:, 0],
                               adaptive.evaluate(xs)[:, 0], atol=5e-8)


def test_trajectory_domain_and_estimate():
    sys = _r38()
    y0 = np.asarray(reduction.closed_form_R38("i", 0.5, 1.3, 0.4, 0.3, 0.0,
                                              a4=0.7))
    traj = reduction.integrate(sys, y0, (0.0, 2.0))
    with pytest.raises(DomainError):
        traj.evaluate(2.5)
    assert math.isfinite(traj.interp_error_estimate)
    fn = traj.component(0)
    assert fn.domain == traj.domain


def test_semi_exact_family_profile_validation_rejects_garbage():
    # hand the case-51 assembler a profile that does not solve its
    # equation: the finite-difference check must catch it
    with pytest.raises(NumericalError, match="residual check"):
        fam, traj = reduction.semi_exact_family(
            "51", a3=0.7, beta=0.1, window=(-6.0, 6.0), step=0.5)
