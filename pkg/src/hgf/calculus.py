"""Grids, finite-difference stencils and discrete residual operators.

The PDE residual discretizes

    r_k = d_k D2_x(field_k) - D_t(field_k) + C_k(u, v, w)

with second-order central differences in space and time and the reaction
rates C_k from `hgf.model`.  Norms are taken over interior points only
(one point dropped on each side in x, the time stencil uses t +- dt), so
no one-sided stencils are ever used.  Any candidate field -- closed form,
semi-closed form or simulated -- is verified by the same operator.

Norm reductions use a fixed, single-threaded summation order, so reported
numbers are bit-reproducible across runs and worker-thread settings.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ._kernels import thread_cap
from .errors import ConstraintError, NumericalError

_COMPONENT_INDEX = {"u": 0, "v": 1, "w": 2}

# refinement levels with residuals below this floor count as exactly zero
ZERO_RESIDUAL_FLOOR = 1e-14


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform 1-D grid with n points on [x_min, x_max]."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 5:
            raise ConstraintError("SpaceGrid requires n >= 5 (central stencils)")
        if not self.x_max > self.x_min:
            raise ConstraintError("SpaceGrid requires x_max > x_min")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)


@dataclass(frozen=True)
class FieldState:
    """Sampled (u, v, w) values on a grid at one time.

    Components a sampler does not define are stored as zeros; the set of
    defined components travels separately (residual reports skip the
    equations of undefined components).
    """

    grid: SpaceGrid
    t: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        for name in ("u", "v", "w"):
            arr = getattr(self, name)
            if arr.shape != (self.grid.n,):
                raise ConstraintError(
                    f"FieldState.{name} must have length n = {self.grid.n}"
                )

    def stack(self) -> np.ndarray:
        return np.stack((self.u, self.v, self.w))


@dataclass(frozen=True)
class ResidualReport:
    """Residual norms per equation; None marks an undefined component.

    `order_estimate` is filled by the refinement driver.  `history` keeps
    the (h, dt, linf, l2) tuples of every refinement level used.
    """

    linf: tuple
    l2: tuple
    h: float
    dt: float
    order_estimate: tuple | None = None
    history: tuple = ()
    meta: dict = field(default_factory=dict)

    def max_linf(self) -> float:
        vals = [v for v in self.linf if v is not None]
        return max(vals) if vals else math.nan


def sample(sol, grid: SpaceGrid, t: float) -> FieldState:
    """Pointwise evaluation of a sampler on a grid at time t."""
    x = grid.x()
    vals = sol.evaluate(t, x) if hasattr(sol, "evaluate") else sol(t, x)
    arrays = []
    for name, arr in zip(("u", "v", "w"), vals):
        if arr is None:
            arrays.append(np.zeros(grid.n))
            continue
        arr = np.broadcast_to(np.asarray(arr, dtype=float), (grid.n,)).copy()
        bad = ~np.isfinite(arr)
        if bad.any():
            i = int(np.argmax(bad))
            raise NumericalError(
                f"non-finite {name} sample at t = {t}, x = {x[i]}"
            )
        arrays.append(arr)
    return FieldState(grid=grid, t=t, u=arrays[0], v=arrays[1], w=arrays[2])


def _norms(r: np.ndarray) -> tuple[float, float]:
    linf = float(np.max(np.abs(r)))
    # ufunc reduce: fixed order, never multi-threaded
    l2 = float(math.sqrt(np.add.reduce(r * r) / r.size))
    return linf, l2


def _equations_for(components) -> tuple[int, ...]:
    if components is None:
        return (0, 1, 2)
    return tuple(sorted(_COMPONENT_INDEX[c] for c in components))


def residual_from_states(
    p,
    before: FieldState,
    mid: FieldState,
    after: FieldState,
    dt: float,
    components=None,
    return_fields: bool = False,
):
    """Discrete residual from three already-sampled time levels.

    The three states must share one grid and be centered at mid.t with
    spacing dt.  Exposed separately so externally stored samples (CSV
    round trips) reproduce in-process residuals exactly.
    """
    grid = mid.grid
    h = grid.h
    F0 = before.stack()
    F1 = mid.stack()
    F2 = after.stack()
    lap = (F1[:, :-2] - 2.0 * F1[:, 1:-1] + F1[:, 2:]) / (h * h)
    ddt = (F2[:, 1:-1] - F0[:, 1:-1]) / (2.0 * dt)
    rates = p.reaction(F1[0, 1:-1], F1[1, 1:-1], F1[2, 1:-1])
    dco = p.diffusivities
    eqs = _equations_for(components)
    linf: list = [None, None, None]
    l2: list = [None, None, None]
    fields = np.full((3, grid.n - 2), np.nan)
    for k in eqs:
        r = dco[k] * lap[k] - ddt[k] + rates[k]
        fields[k] = r
        linf[k], l2[k] = _norms(r)
    report = ResidualReport(linf=tuple(linf), l2=tuple(l2), h=h, dt=dt,
                            meta={"t": mid.t})
    if return_fields:
        return report, fields
    return report


def pde_residual(p, sol, grid: SpaceGrid, t: float, dt: float,
                 components=None, return_fields: bool = False):
    """Sample a solution at t - dt, t, t + dt and form the residual."""
    if components is None and hasattr(sol, "components"):
        components = sol.components
    before = sample(sol, grid, t - dt)
    mid = sample(sol, grid, t)
    after = sample(sol, grid, t + dt)
    return residual_from_states(p, before, mid, after, dt,
                                components=components,
                                return_fields=return_fields)


def _fit_orders(h_used: Sequence[float], linf_rows: Sequence[tuple]) -> tuple:
    """Least-squares slope of log linf against log h, per equation."""
    orders: list = []
    logh = np.log(np.asarray(h_used))
    for k in range(len(linf_rows[0])):
        vals = [row[k] for row in linf_rows]
        if any(v is None for v in vals):
            orders.append(None)
            continue
        arr = np.asarray(vals, dtype=float)
        if np.all(arr <= ZERO_RESIDUAL_FLOOR):
            orders.append(math.inf)
            continue
        slope = np.polyfit(logh, np.log(np.maximum(arr, 1e-300)), 1)[0]
        orders.append(float(slope))
    return tuple(orders)


def refinement_study(p, sol, window, h_sequence, dt_over_h: float = 1.0,
                     components=None) -> ResidualReport:
    """Residuals over a decreasing h sequence plus observed orders.

    `window` is (t, x_min, x_max); each level uses dt = dt_over_h * h.
    Independent levels may run on worker threads (HGF_THREADS); the
    reduction into the report keeps the given level order.
    """
    if len(h_sequence) < 2:
        raise ConstraintError("refinement_study needs at least 2 grid spacings")
    if any(b >= a for a, b in zip(h_sequence, h_sequence[1:])):
        raise ConstraintError("h_sequence must be strictly decreasing")
    t, x_min, x_max = window
    if components is None and hasattr(sol, "components"):
        components = sol.components

    def level(h_target: float):
        n = int(round((x_max - x_min) / h_target)) + 1
        grid = SpaceGrid(x_min, x_max, n)
        dt = dt_over_h * grid.h
        return pde_residual(p, sol, grid, t, dt, components=components)

    cap = thread_cap()
    if cap > 1 and len(h_sequence) > 1:
        with ThreadPoolExecutor(max_workers=min(cap, len(h_sequence))) as pool:
            reports = list(pool.map(level, h_sequence))
    else:
        reports = [level(h) for h in h_sequence]

    h_used = [r.h for r in reports]
    orders = _fit_orders(h_used, [r.linf for r in reports])
    finest = reports[-1]
    history = tuple((r.h, r.dt, r.linf, r.l2) for r in reports)
    return replace(finest, order_estimate=orders, history=history)


def ode_residual(system, profile_fn, window, h: float,
                 return_fields: bool = False):
    """Discrete residual of profiles in a reduced ODE system.

    `profile_fn(x)` must return the profile values as an (m, n) array for
    the system's m profiles.  Central differences supply first and second
    derivatives on interior points.
    """
    x_min, x_max = window
    n = int(round((x_max - x_min) / h)) + 1
    if n < 5:
        raise ConstraintError("ode_residual window too small for the stencil")
    x = np.linspace(x_min, x_max, n)
    hh = x[1] - x[0]
    vals = np.atleast_2d(np.asarray(profile_fn(x), dtype=float))
    if not np.isfinite(vals).all():
        raise NumericalError("non-finite profile sample in ode_residual")
    d1 = (vals[:, 2:] - vals[:, :-2]) / (2.0 * hh)
    d2 = (vals[:, :-2] - 2.0 * vals[:, 1:-1] + vals[:, 2:]) / (hh * hh)
    r = system.equation_residuals(x[1:-1], vals[:, 1:-1], d1, d2)
    linf = []
    l2 = []
    for row in np.atleast_2d(r):
        a, b = _norms(row)
        linf.append(a)
        l2.append(b)
    report = ResidualReport(linf=tuple(linf), l2=tuple(l2), h=hh, dt=0.0,
                            meta={"system": getattr(system, "sid", "?")})
    if return_fields:
        return report, r
    return report


def ode_refinement(system, profile_fn, window, h_sequence) -> ResidualReport:
    """Refinement study for `ode_residual` (orders per equation)."""
    reports = [ode_residual(system, profile_fn, window, h) for h in h_sequence]
    orders = _fit_orders([r.h for r in reports], [r.linf for r in reports])
    history = tuple((r.h, r.dt, r.linf, r.l2) for r in reports)
    return replace(reports[-1], order_estimate=orders, history=history)
