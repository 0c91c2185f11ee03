import math

import numpy as np
import pytest

from hgf import calculus, model, reduction, solutions, symmetry
from hgf.calculus import SpaceGrid
from hgf.errors import ConstraintError, NumericalError
from hgf.model import Params, Solution


def _const_sampler(u, v, w):
    def evaluate(t, x):
        z = np.zeros(np.broadcast(np.asarray(t), np.asarray(x)).shape)
        return (u + z, v + z, w + z)
    return Solution(evaluate=evaluate, params=Params(1, 1, 1, 1, 1))


def test_spacegrid_validation():
    with pytest.raises(ConstraintError):
        SpaceGrid(0.0, 1.0, 4)
    with pytest.raises(ConstraintError):
        SpaceGrid(1.0, 0.0, 11)
    g = SpaceGrid(0.0, 1.0, 11)
    assert g.h == pytest.approx(0.1)


def test_sample_constant():
    s = calculus.sample(_const_sampler(0, 0, 1), SpaceGrid(-1, 1, 5), 0.3)
    np.testing.assert_array_equal(s.u, 0.0)
    np.testing.assert_array_equal(s.w, 1.0)


def test_sample_nonfinite_names_grid_point():
    def evaluate(t, x):
        u = np.where(np.asarray(x) == 0.5, np.nan, 1.0)
        return (u, u, u)

    with pytest.raises(NumericalError, match="x = 0.5"):
        calculus.sample(Solution(evaluate=evaluate), SpaceGrid(0, 1, 5), 0.0)


def test_sample_tf63_center_values(tf63_std):
    s = calculus.sample(tf63_std, SpaceGrid(-2, 2, 5), 0.0)
    assert s.u[2] == pytest.approx(0.2325, abs=1e-15)
    assert s.v[2] == pytest.approx(0.35, abs=1e-15)
    assert s.w[2] == pytest.approx(0.5, abs=1e-15)


def test_sample_fisher_center():
    s = calculus.sample(solutions.fisher_tf(), SpaceGrid(-2, 2, 5), 0.0)
    assert s.u[2] == pytest.approx(0.25, abs=1e-15)
    np.testing.assert_array_equal(s.v, 0.0)  # undefined -> zeros


def test_residual_exact_steady_zero():
    p = Params(1, 1, 1, 1, 1)
    rep = calculus.pde_residual(p, _const_sampler(0, 0, 0),
                                SpaceGrid(-1, 1, 21), 0.0, 1e-3)
    assert max(rep.linf) == 0.0


def test_residual_tf63_small(tf63_std):
    n = int(round(10 / 1e-3)) + 1
    rep = calculus.pde_residual(tf63_std.params, tf63_std,
                                SpaceGrid(-5, 5, n), 0.0, 1e-3)
    assert max(rep.linf) <= 1e-4


def test_residual_detects_perturbation(tf63_std):
    def perturbed(t, x):
        u, v, w = tf63_std.evaluate(t, x)
        return (u, v, w + 0.01)

    grid = SpaceGrid(-5, 5, 2001)
    base = calculus.pde_residual(tf63_std.params, tf63_std, grid, 0.0, 5e-3)
    bad = calculus.pde_residual(tf63_std.params,
                                Solution(evaluate=perturbed), grid, 0.0, 5e-3)
    assert base.linf[2] < 1e-5
    assert bad.linf[2] > 1e-3  # ~ |dC3/dw| * 0.01 scale
    assert bad.linf[0] == pytest.approx(base.linf[0], abs=1e-12)


def test_refinement_orders_fisher():
    fisher = solutions.fisher_tf()
    rep = calculus.refinement_study(fisher.params, fisher, (0.0, -10, 10),
                                    [8e-3, 4e-3, 2e-3])
    assert 1.8 <= rep.order_estimate[0] <= 2.2
    assert rep.order_estimate[1] is None
    assert len(rep.history) == 3


def test_refinement_zero_sentinel():
    p = Params(1, 1, 1, 1, 1)
    rep = calculus.refinement_study(p, _const_sampler(0, 0, 1),
                                    (0.0, -1, 1), [4e-2, 2e-2, 1e-2])
    assert all(o == math.inf for o in rep.order_estimate)


def test_refinement_non_solution_flat_order():
    p = Params(1, 1, 1, 1, 1)

    def evaluate(t, x):
        x = np.asarray(x, dtype=float)
        f = np.sin(x + t) + 1.2
        return (f, 0.5 * f, 0.3 * f)

    rep = calculus.refinement_study(p, Solution(evaluate=evaluate),
                                    (0.0, -3, 3), [8e-3, 4e-3, 2e-3])
    assert all(abs(o) < 0.5 for o in rep.order_estimate)


def test_refinement_h_sequence_validation(tf63_std):
    with pytest.raises(ConstraintError):
        calculus.refinement_study(tf63_std.params, tf63_std, (0, -1, 1),
                                  [1e-3, 2e-3])


def test_residual_linear_in_heat_part():
    # adding eps*P to v of a case-2 solution changes r2 exactly by the
    # discrete heat residual of P (the kinetics there do not involve v)
    p = Params(0.0, 0.0, 1.0, 1.0, 0.0, d2=2.0)
    base = solutions.embed_fisher(p)
    prof = symmetry.heat_exponential(0.5, 0.3)
    eps = 0.25

    def shifted(t, x):
        u, v, w = base.evaluate(t, x)
        return (u, v + eps * prof(t, x, p.d2), w)

    grid = SpaceGrid(-3, 3, 301)
    t, dt = 0.4, 2e-2
    _, f_base = calculus.pde_residual(p, base, grid, t, dt,
                                      return_fields=True)
    _, f_shift = calculus.pde_residual(p, Solution(evaluate=shifted), grid,
                                       t, dt, return_fields=True)
    x = grid.x()
    lap = (prof(t, x[:-2], p.d2) - 2 * prof(t, x[1:-1], p.d2)
           + prof(t, x[2:], p.d2)) / grid.h**2
    ddt = (prof(t + dt, x[1:-1], p.d2) - prof(t - dt, x[1:-1], p.d2)) / (2 * dt)
    expected = eps * (p.d2 * lap - ddt)
    np.testing.assert_allclose(f_shift[1] - f_base[1], expected,
                               rtol=0, atol=1e-13)


def test_reflection_equivariance(tf63_std):
    refl = model.reflect_solution(tf63_std)
    a, b = -12.0, 4.0
    grid = SpaceGrid(a, b, 801)
    rep = calculus.pde_residual(tf63_std.params, tf63_std, grid, 0.3, 2e-2)
    mirr = calculus.pde_residual(tf63_std.params, refl,
                                 SpaceGrid(-b, -a, 801), 0.3, 2e-2)
    # mirrored grid points are not bitwise negations of the original ones;
    # that roundoff enters the stencil amplified by 1/h^2
    atol = 100 * np.finfo(float).eps / grid.h**2
    for r1, r2 in zip(rep.linf, mirr.linf):
        assert r2 == pytest.approx(r1, abs=atol)
    for r1, r2 in zip(rep.l2, mirr.l2):
        assert r2 == pytest.approx(r1, abs=atol)


def test_translation_invariance(tf63_std):
    s, alpha = 0.8, tf63_std.speed
    rep0 = calculus.pde_residual(tf63_std.params, tf63_std,
                                 SpaceGrid(-8, 8, 1601), 0.0, 1e-2)
    rep1 = calculus.pde_residual(tf63_std.params, tf63_std,
                                 SpaceGrid(-8 + alpha * s, 8 + alpha * s,
                                           1601), s, 1e-2)
    for r1, r2 in zip(rep0.linf, rep1.linf):
        assert r2 == pytest.approx(r1, rel=2e-2)


def test_refinement_independent_of_thread_count(tf63_std, monkeypatch):
    def study():
        return calculus.refinement_study(tf63_std.params, tf63_std,
                                         (0.0, -10, 10), [8e-3, 4e-3, 2e-3])

    monkeypatch.setenv("HGF_THREADS", "1")
    serial = study()
    monkeypatch.setenv("HGF_THREADS", "4")
    threaded = study()
    assert serial.linf == threaded.linf
    assert serial.l2 == threaded.l2
    assert serial.order_estimate == threaded.order_estimate


def test_ode_residual_tf63_profiles_in_R58(tf63_std):
    sys = reduction.reduced_system("R58", alpha=tf63_std.speed,
                                   params=tf63_std.params)

    def profiles(om):
        return np.stack(tf63_std.evaluate(0.0, om))

    rep = calculus.ode_refinement(sys, profiles, (-10, 10),
                                  [8e-3, 4e-3, 2e-3])
    assert all(1.8 <= o <= 2.2 for o in rep.order_estimate)


def test_ode_residual_closed_r38_profiles():
    a1, a4, d1, d2v, beta = 0.5, 0.7, 1.3, 0.4, 0.3
    sys = reduction.reduced_system("R38", beta=beta, a1=a1, a3=1.0, a4=a4)

    def profiles(t):
        return np.stack(reduction.closed_form_R38("i", a1, d1, d2v, beta, t,
                                                  a4=a4))

    rep = calculus.ode_refinement(sys, profiles, (0.0, 3.0),
                                  [8e-3, 4e-3, 2e-3])
    assert all(1.8 <= o <= 2.2 for o in rep.order_estimate)


def test_ode_residual_zero_profiles_exact():
    p = Params(1, 1, 1, 1, 1)
    sys = reduction.reduced_system("R58", alpha=1.0, params=p)

    def profiles(om):
        om = np.asarray(om)
        return np.stack((np.zeros_like(om), np.zeros_like(om),
                         np.ones_like(om)))

    rep = calculus.ode_residual(sys, profiles, (-5, 5), 1e-2)
    assert max(rep.linf) == 0.0


@pytest.mark.parametrize("case,a3,a4", [("50", 1.0, 0.4), ("51", 0.7, 1.7)])
def test_w_profiles_satisfy_third_equation(case, a3, a4):
    # the closed w-profiles paired with the logistic front solve the third
    # equation of R47 identically (d = 1)
    sys = reduction.reduced_system("R47", alpha=solutions.FISHER_SPEED,
                                   beta=0.0, a3=a3, a4=a4, d=1.0)
    W = solutions.w_profile_50(a4) if case == "50" else solutions.w_profile_51()

    def profiles(om):
        om = np.asarray(om)
        return np.stack((solutions._fisher_u(0.0, om), np.zeros_like(om),
                         W(om)))

    rep = calculus.ode_refinement(sys, profiles, (-10, 10),
                                  [8e-3, 4e-3, 2e-3])
    assert 1.8 <= rep.order_estimate[0] <= 2.2
    assert 1.8 <= rep.order_estimate[2] <= 2.2
    # the v-equation is forced (V = 0 is not a solution there)
    assert abs(rep.order_estimate[1]) < 0.5
