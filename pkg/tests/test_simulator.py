import numpy as np
import pytest

from hgf import calculus, simulator, solutions
from hgf.calculus import SpaceGrid
from hgf.errors import ConstraintError, NumericalError
from hgf.model import Params


def test_stability_bound_formula():
    grid = SpaceGrid(0.0, 0.05 * 100, 101)  # h = 0.05
    p = Params(1, 1, 1, 1, 1, d1=1.0, d2=4.3793, d3=3.0)
    dt = simulator.stability_bound(p, grid, 0.4)
    assert dt == pytest.approx(0.4 * 0.05**2 / (2 * 4.3793), rel=1e-12)


def test_stability_bound_quarters_when_h_halves():
    p = Params(1, 1, 1, 1, 1)
    g1 = SpaceGrid(0, 1, 11)
    g2 = SpaceGrid(0, 1, 21)
    assert simulator.stability_bound(p, g1, 0.4) == pytest.approx(
        4 * simulator.stability_bound(p, g2, 0.4), rel=1e-12)


def test_zero_safety_rejected():
    p = Params(1, 1, 1, 1, 1)
    with pytest.raises(ConstraintError):
        simulator.stability_bound(p, SpaceGrid(0, 1, 11), 0.0)
    with pytest.raises(ConstraintError, match="cfl_safety"):
        simulator.SimConfig(params=p, grid=SpaceGrid(0, 1, 11), t_end=1.0,
                            initial=(None, None, None), cfl_safety=0.0)


def test_zero_initial_stays_zero():
    p = Params(1, 1, 1, 1, 1)
    n = 41
    cfg = simulator.SimConfig(
        params=p, grid=SpaceGrid(-2, 2, n), t_end=0.2,
        initial=(np.zeros(n), np.zeros(n), np.zeros(n)),
        bc=simulator.BoundaryCondition("neumann-zero"), snapshot_every=20)
    run = simulator.run(cfg)
    for s in run.snapshots:
        assert np.max(np.abs(s.stack())) == 0.0


def test_steady_001_preserved():
    p = Params(0.5, 1.0, 2.0, 1.0, 0.5)
    n = 41
    cfg = simulator.SimConfig(
        params=p, grid=SpaceGrid(-2, 2, n), t_end=0.5,
        initial=(np.zeros(n), np.zeros(n), np.ones(n)),
        bc=simulator.BoundaryCondition("neumann-zero"), snapshot_every=100)
    run = simulator.run(cfg)
    drift = np.max(np.abs(run.snapshots[-1].w - 1.0))
    assert drift <= 1e-13 * run.steps


def test_tf63_transport_self_convergence(tf63_std):
    def err(n):
        g = SpaceGrid(-15.0, 25.0, n)
        cfg = simulator.SimConfig(
            params=tf63_std.params, grid=g, t_end=0.5, initial=tf63_std,
            bc=simulator.BoundaryCondition("pinned-to-exact",
                                           family=tf63_std),
            snapshot_every=10**9)
        run = simulator.run(cfg)
        s = run.snapshots[-1]
        exact = tf63_std.evaluate(s.t, g.x())
        return max(np.max(np.abs(a - b))
                   for a, b in zip((s.u, s.v, s.w), exact))

    e_coarse, e_fine = err(401), err(801)
    assert e_coarse / e_fine == pytest.approx(4.0, rel=0.15)


def test_speed_from_analytic_snapshots(tf63_std):
    grid = SpaceGrid(-30, 50, 1601)
    snaps = [calculus.sample(tf63_std, grid, t) for t in np.linspace(0, 8, 17)]
    est = simulator.measure_front_speed(snaps, "w", 0.5)
    assert abs(est.speed - tf63_std.speed) <= 1e-3 * tf63_std.speed
    assert est.r_squared >= 0.999999
    assert est.reliable


def test_speed_no_crossing_on_constant():
    grid = SpaceGrid(-1, 1, 11)
    snaps = [calculus.FieldState(grid=grid, t=float(t), u=np.full(11, 0.7),
                                 v=np.zeros(11), w=np.zeros(11))
             for t in range(4)]
    with pytest.raises(NumericalError, match="no level-0.5 crossing"):
        simulator.measure_front_speed(snaps, "u", 0.5)


def test_speed_multiple_crossings_on_pulse():
    tf65 = solutions.make_tf65(1.0)  # w is a pulse, not a front
    grid = SpaceGrid(-30, 30, 601)
    snaps = [calculus.sample(tf65, grid, t) for t in (0.0, 0.5, 1.0)]
    with pytest.raises(NumericalError, match="multiple"):
        simulator.measure_front_speed(snaps, "w", 0.1, fit_window=(0.0, 1.0))


def test_determinism_bit_identical(tf63_std):
    def snapshots():
        cfg = simulator.SimConfig(
            params=tf63_std.params, grid=SpaceGrid(-10, 15, 251), t_end=0.3,
            initial=tf63_std, bc=simulator.dirichlet_at_endpoints(tf63_std),
            snapshot_every=37)
        return simulator.run(cfg).snapshots

    a, b = snapshots(), snapshots()
    assert len(a) == len(b)
    for s1, s2 in zip(a, b):
        np.testing.assert_array_equal(s1.stack(), s2.stack())


def test_fisher_comparison_principle():
    # decoupled logistic component started inside [0, 1] stays there
    p = Params(0.0, 0.0, 0.0, 1.0, 0.0)
    grid = SpaceGrid(-20, 20, 201)
    x = grid.x()
    u0 = 1.0 / (1.0 + np.exp(x))
    cfg = simulator.SimConfig(
        params=p, grid=grid, t_end=1.0, initial=(u0, np.zeros_like(x),
                                                 np.zeros_like(x)),
        bc=simulator.BoundaryCondition("neumann-zero"), snapshot_every=200)
    run = simulator.run(cfg)
    for s in run.snapshots:
        assert np.all(s.u >= -1e-8) and np.all(s.u <= 1 + 1e-8)


def test_blowup_aborts_with_partial_run():
    p = Params(0.0, 0.0, 0.0, 1.0, 0.0)
    n = 21
    cfg = simulator.SimConfig(
        params=p, grid=SpaceGrid(0, 2, n), t_end=1.0,
        initial=(np.full(n, -1e4), np.zeros(n), np.zeros(n)),
        bc=simulator.BoundaryCondition("neumann-zero"), snapshot_every=1)
    with pytest.raises(NumericalError, match="step") as err:
        simulator.run(cfg)
    partial = err.value.partial
    assert partial.aborted_at is not None
    assert len(partial.snapshots) >= 1
    assert np.isfinite(partial.snapshots[-1].stack()).all()


def test_dirichlet_requires_triples():
    with pytest.raises(ConstraintError, match="dirichlet"):
        simulator.BoundaryCondition("dirichlet", left=(0, 0, 0))
    with pytest.raises(ConstraintError, match="unknown bc"):
        simulator.BoundaryCondition("weird")
