"""Method-of-lines time integration and traveling-front speed measurement.

Space is discretized with the second-order central Laplacian, time with
classic RK4 under the diffusive stability bound

    dt = cfl_safety * h^2 / (2 * max(d1, d2, d3)).

Boundary handling: Dirichlet (fixed triples), zero-flux (mirror ghost
point), or pinned-to-exact (boundary values follow a family evaluator,
precomputed per RK stage).  The update is per-cell independent and
sequential, so identical configurations produce bit-identical snapshots
regardless of worker settings; the hot loop lives in `hgf._kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._kernels import mol_run
from .calculus import FieldState, SpaceGrid
from .errors import ConstraintError, NumericalError
from .model import Params

_COMPONENT_INDEX = {"u": 0, "v": 1, "w": 2}


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary handling: "dirichlet" (left/right triples), "neumann-zero",
    or "pinned-to-exact" (family evaluator supplies the boundary values)."""

    kind: str
    left: tuple[float, float, float] | None = None
    right: tuple[float, float, float] | None = None
    family: object = None

    def __post_init__(self):
        if self.kind == "dirichlet":
            if self.left is None or self.right is None:
                raise ConstraintError("dirichlet bc needs left and right triples")
        elif self.kind == "pinned-to-exact":
            if self.family is None:
                raise ConstraintError("pinned-to-exact bc needs a family")
        elif self.kind != "neumann-zero":
            raise ConstraintError(f"unknown bc kind {self.kind!r}")


def dirichlet_at_endpoints(family) -> BoundaryCondition:
    """Dirichlet values pinned to a front family's asymptotic states."""
    if family.endpoint_states is None:
        raise ConstraintError("family has no endpoint states")
    left, right = family.endpoint_states
    return BoundaryCondition(kind="dirichlet", left=tuple(left),
                             right=tuple(right))


@dataclass(frozen=True)
class SimConfig:
    params: Params
    grid: SpaceGrid
    t_end: float
    initial: object  # family-like sampler or (u, v, w) arrays
    t0: float = 0.0
    cfl_safety: float = 0.4
    bc: BoundaryCondition = field(
        default_factory=lambda: BoundaryCondition(kind="neumann-zero"))
    snapshot_every: int = 100

    def __post_init__(self):
        if not (0.0 < self.cfl_safety < 1.0):
            raise ConstraintError("cfl_safety must lie in (0, 1)")
        if not self.t_end > self.t0:
            raise ConstraintError("t_end must exceed t0")
        if self.snapshot_every < 1:
            raise ConstraintError("snapshot_every must be >= 1")


@dataclass
class SimRun:
    config: SimConfig
    dt: float
    steps: int
    snapshots: list[FieldState]
    rhs_evaluations: int
    aborted_at: int | None = None

    @property
    def times(self) -> np.ndarray:
        return np.asarray([s.t for s in self.snapshots])


def stability_bound(params: Params, grid: SpaceGrid, cfl_safety: float) -> float:
    """Sufficient explicit time step for the diffusive part."""
    if not cfl_safety > 0:
        raise ConstraintError("cfl_safety must be > 0")
    h = grid.h
    dmax = max(params.diffusivities)
    return cfl_safety * h * h / (2.0 * dmax)


def _initial_fields(config: SimConfig) -> np.ndarray:
    x = config.grid.x()
    init = config.initial
    if hasattr(init, "evaluate"):
        vals = init.evaluate(config.t0, x)
        F = np.zeros((3, config.grid.n))
        for k, arr in enumerate(vals):
            if arr is not None:
                F[k] = np.broadcast_to(np.asarray(arr, float), (config.grid.n,))
    else:
        F = np.zeros((3, config.grid.n))
        for k, arr in enumerate(init):
            if arr is not None:
                F[k] = np.asarray(arr, dtype=float)
        if F.shape != (3, config.grid.n):
            raise ConstraintError("initial arrays must match the grid")
    if not np.isfinite(F).all():
        raise ConstraintError("initial data must be finite")
    return F


def _bc_mode_table(config: SimConfig, dt: float, nsteps: int):
    bc = config.bc
    if bc.kind == "neumann-zero":
        return 1, np.zeros((1, 3, 3, 2))
    if bc.kind == "dirichlet":
        table = np.empty((1, 3, 3, 2))
        for c in range(3):
            table[0, :, c, 0] = bc.left[c]
            table[0, :, c, 1] = bc.right[c]
        return 0, table
    # pinned-to-exact: boundary values at every stage time of every step
    t0 = config.t0
    steps = np.arange(nsteps, dtype=float)
    stage_times = np.stack([t0 + steps * dt,
                            t0 + (steps + 0.5) * dt,
                            t0 + (steps + 1.0) * dt], axis=1)  # (nsteps, 3)
    table = np.empty((nsteps, 3, 3, 2))
    for side, xb in enumerate((config.grid.x_min, config.grid.x_max)):
        vals = bc.family.evaluate(stage_times.ravel(), xb)
        for c, arr in enumerate(vals):
            col = np.zeros(stage_times.size) if arr is None \
                else np.asarray(arr, float).reshape(stage_times.size)
            table[:, :, c, side] = col.reshape(nsteps, 3)
    return 0, table


def run(config: SimConfig) -> SimRun:
    """Integrate the semi-discrete system; snapshots every
    `snapshot_every` steps plus the final state.

    A non-finite state aborts with the last good snapshots attached to the
    raised error (`.partial` attribute) together with the failing step.
    """
    grid = config.grid
    dt0 = stability_bound(config.params, grid, config.cfl_safety)
    span = config.t_end - config.t0
    nsteps = max(1, int(math.ceil(span / dt0 - 1e-12)))
    dt = span / nsteps
    F = _initial_fields(config)
    bc_mode, bc_table = _bc_mode_table(config, dt, nsteps)

    snap_steps = list(range(config.snapshot_every, nsteps + 1,
                            config.snapshot_every))
    if not snap_steps or snap_steps[-1] != nsteps:
        snap_steps.append(nsteps)
    snap_steps_arr = np.asarray(snap_steps, dtype=np.int64)
    snaps = np.empty((len(snap_steps) + 1, 3, grid.n))
    snaps[0] = F

    dco = np.asarray(config.params.diffusivities)
    aco = np.asarray(config.params.a_coefficients)
    status = mol_run(F.copy(), dco, aco, grid.h, dt, nsteps, bc_mode,
                     bc_table, snap_steps_arr, snaps)

    def state(idx: int, step: int) -> FieldState:
        return FieldState(grid=grid, t=config.t0 + step * dt,
                          u=snaps[idx, 0].copy(), v=snaps[idx, 1].copy(),
                          w=snaps[idx, 2].copy())

    if status >= 0:
        good = [state(0, 0)]
        for j, s in enumerate(snap_steps):
            if s < status:
                good.append(state(j + 1, s))
        partial = SimRun(config=config, dt=dt, steps=status, snapshots=good,
                         rhs_evaluations=4 * status, aborted_at=status)
        err = NumericalError(
            f"non-finite state detected at step {status} "
            f"(t = {config.t0 + status * dt}); last good snapshot attached"
        )
        err.partial = partial
        raise err

    snapshots = [state(0, 0)]
    snapshots.extend(state(j + 1, s) for j, s in enumerate(snap_steps))
    return SimRun(config=config, dt=dt, steps=nsteps, snapshots=snapshots,
                  rhs_evaluations=4 * nsteps)


# ---------------------------------------------------------------------------
# front speed measurement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpeedEstimate:
    component: str
    level: float
    speed: float
    intercept: float
    fit_window: tuple[float, float]
    r_squared: float
    crossing_times: np.ndarray
    crossing_positions: np.ndarray
    reliable: bool

    def as_dict(self) -> dict:
        return {
            "component": self.component,
            "level": self.level,
            "speed": self.speed,
            "intercept": self.intercept,
            "fit_window": list(self.fit_window),
            "r_squared": self.r_squared,
            "n_crossings": int(len(self.crossing_times)),
            "reliable": self.reliable,
        }


def _level_crossing(x: np.ndarray, f: np.ndarray, level: float,
                    t: float) -> float:
    d = f - level
    hits = np.nonzero(d[:-1] * d[1:] < 0.0)[0]
    exact = np.nonzero(d == 0.0)[0]
    count = len(hits) + len(exact)
    if count == 0:
        raise NumericalError(
            f"no level-{level} crossing in snapshot at t = {t}"
        )
    if count > 1:
        raise NumericalError(
            f"multiple level-{level} crossings (non-monotone profile) "
            f"in snapshot at t = {t}"
        )
    if len(exact) == 1:
        return float(x[exact[0]])
    i = int(hits[0])
    return float(x[i] + (x[i + 1] - x[i]) * (level - f[i]) / (f[i + 1] - f[i]))


def measure_front_speed(run_or_snapshots, component: str, level: float,
                        fit_window: tuple[float, float] | None = None,
                        r2_threshold: float = 0.999) -> SpeedEstimate:
    """Fit the level-crossing trajectory x_cross(t) with a straight line.

    Crossings are located by linear interpolation between adjacent grid
    points, one per snapshot (profiles must cross the level monotonically).
    The default fit window is the last half of the run; estimates with
    r^2 below `r2_threshold` are flagged unreliable, not rejected.
    """
    snapshots: Sequence[FieldState] = (
        run_or_snapshots.snapshots
        if hasattr(run_or_snapshots, "snapshots") else run_or_snapshots
    )
    if component not in _COMPONENT_INDEX:
        raise ConstraintError("component must be one of u, v, w")
    times = np.asarray([s.t for s in snapshots])
    if fit_window is None:
        mid = times[0] + 0.5 * (times[-1] - times[0])
        fit_window = (mid, float(times[-1]))
    lo, hi = fit_window
    used = [s for s in snapshots if lo - 1e-12 <= s.t <= hi + 1e-12]
    if len(used) < 2:
        raise ConstraintError("fit window contains fewer than 2 snapshots")
    ts = np.asarray([s.t for s in used])
    xs = np.asarray([
        _level_crossing(s.grid.x(), getattr(s, component), level, s.t)
        for s in used
    ])
    slope, intercept = np.polyfit(ts, xs, 1)
    pred = slope * ts + intercept
    ss_res = float(np.add.reduce((xs - pred) ** 2))
    ss_tot = float(np.add.reduce((xs - xs.mean()) ** 2))
    if ss_tot <= 1e-300:
        r2 = 1.0 if ss_res <= 1e-300 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return SpeedEstimate(
        component=component,
        level=level,
        speed=float(slope),
        intercept=float(intercept),
        fit_window=(float(lo), float(hi)),
        r_squared=float(r2),
        crossing_times=ts,
        crossing_positions=xs,
        reliable=bool(r2 >= r2_threshold),
    )
