"""Reduced ODE systems, profile integration and ansatz reconstruction.

Catalog ids (CLI contract).  Second-order systems are integrated in
first-order form with the state (U, U', V, V', W, W'); first-order ones
use (U, V, W); the scalar linear profile equations use (Y, Y').

    R35   front-shaped reduction with free u-exponent (omega-based)
    R38   separable reduction of the same system (t-based)
    R47   reduction of the a1 = 0, a2 = 1 system (omega-based)
    R58   plane-wave reduction of the general system (omega-based)
    T2a-d reductions tied to the no-logistic-w system (two omega-based,
          two t-based rows)
    L36   linear equation for the free u-profile of the semi35 families
    L52   linear equation for the free v-profile of the semi50/51 families

`integrate` is an embedded Runge-Kutta 4(5) pair with PI step control;
`dense_profile` tabulates a profile on a uniform grid with fixed-step RK4
(numba hot path) and returns a trajectory whose quintic interpolant is
accurate enough to sit below second-order stencil floors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import make_interp_spline

from . import calculus, solutions
from ._kernels import SYS_CODES, ode_rhs, ode_rk4_table
from .errors import ConstraintError, DomainError, NumericalError
from .model import Params, Solution

SQRT6 = math.sqrt(6.0)


# ---------------------------------------------------------------------------
# reduced systems
# ---------------------------------------------------------------------------

_SECOND_ORDER = {"R35", "R47", "R58", "T2a", "T2b", "L36", "L52"}
_DIMS = {"R35": 6, "R38": 3, "R47": 6, "R58": 6, "T2a": 6, "T2b": 6,
         "T2c": 3, "T2d": 3, "L36": 2, "L52": 2}
_IVAR = {"R35": "omega", "R38": "t", "R47": "omega", "R58": "omega",
         "T2a": "omega", "T2b": "omega", "T2c": "t", "T2d": "t",
         "L36": "omega", "L52": "omega"}


@dataclass(frozen=True)
class ReducedSystem:
    """One reduced ODE system in first-order form."""

    sid: str
    coeffs: dict
    code: int
    kcoeffs: np.ndarray = field(repr=False)
    dim: int = 0

    @property
    def second_order(self) -> bool:
        return self.sid in _SECOND_ORDER

    @property
    def ivar(self) -> str:
        return _IVAR[self.sid]

    @property
    def profile_indices(self) -> tuple[int, ...]:
        if self.dim == 6:
            return (0, 2, 4)
        if self.dim == 3:
            return (0, 1, 2)
        return (0,)

    def rhs(self, x: float, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.dim,):
            raise ConstraintError(
                f"{self.sid} state must have dimension {self.dim}, "
                f"got shape {y.shape}"
            )
        return ode_rhs(self.code, self.kcoeffs, float(x), y)

    def rhs_nodes(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        out = np.empty_like(ys)
        for i in range(ys.shape[0]):
            out[i] = ode_rhs(self.code, self.kcoeffs, float(xs[i]), ys[i])
        return out

    def equation_residuals(self, x, vals, D1, D2):
        """Equation left-hand sides from sampled profiles and their
        finite-difference derivatives (one row per equation)."""
        c = self.coeffs
        sid = self.sid
        if sid in ("R35", "T2a"):
            al, a1, be, a4 = c["alpha"], c["a1"], c["beta"], c["a4"]
            U, V, W = vals
            e0 = D2[0] + al * D1[0] + U * (1.0 + a1 * be - a1 * V)
            e1 = D2[1] + al * D1[1] + V * (1.0 - a1 * V + a1 * W)
            if sid == "R35":
                a3, d = c["a3"], c["d"]
                e2 = d * D2[2] + al * D1[2] + a3 * W * (1.0 - W) \
                    - a1 * a4 * V * W
            else:
                e2 = D2[2] + al * D1[2] - a1 * a4 * V * W
            return np.stack((e0, e1, e2))
        if sid == "T2b":
            al, ga, a1, a4 = c["alpha"], c["gamma"], c["a1"], c["a4"]
            U, V, W = vals
            s = (a4 - 1.0) * V + W + (1.0 - a4) / a1
            e0 = D2[0] + al * D1[0] - a1 * U * V - ga * s
            e1 = D2[1] + al * D1[1] + V * (1.0 - a1 * V + a1 * W)
            e2 = D2[2] + al * D1[2] - a1 * a4 * V * W
            return np.stack((e0, e1, e2))
        if sid == "R38":
            be, a1, a3, a4 = c["beta"], c["a1"], c["a3"], c["a4"]
            U, V, W = vals
            e0 = D1[0] + U * (a1 * V - 1.0 - be * be * a1 * a1)
            e1 = D1[1] + V * (a1 * V - a1 * W - 1.0)
            e2 = D1[2] + W * (a3 * W + a1 * a4 * V - a3)
            return np.stack((e0, e1, e2))
        if sid == "R47":
            al, be, a3, a4, d = c["alpha"], c["beta"], c["a3"], c["a4"], c["d"]
            U, V, W = vals
            e0 = D2[0] + al * D1[0] + U * (1.0 - U)
            e1 = D2[1] + al * D1[1] + V * (1.0 - U) + U * (W - be)
            e2 = d * D2[2] + al * D1[2] + a3 * W * (1.0 - W) - a4 * U * W
            return np.stack((e0, e1, e2))
        if sid == "R58":
            p: Params = c["params"]
            al = c["alpha"]
            U, V, W = vals
            g = 1.0 - U - p.a1 * V
            e0 = D2[0] + al * D1[0] + U * g
            e1 = p.d2 * D2[1] + al * D1[1] + p.a2 * V * g + U * W \
                + p.a1 * V * W
            e2 = p.d3 * D2[2] + al * D1[2] + p.a3 * W * (1.0 - W) \
                - p.a4 * U * W - p.a5 * V * W
            return np.stack((e0, e1, e2))
        if sid in ("T2c", "T2d"):
            a1, a4 = c["a1"], c["a4"]
            U, V, W = vals
            if sid == "T2c":
                be = c["beta"]
                e0 = D1[0] + U * (a1 * V - 1.0 - a1 * a1 * be * be)
            else:
                e0 = D1[0] + U * (a1 * V - 1.0)
            e1 = D1[1] + V * (a1 * V - a1 * W - 1.0)
            e2 = D1[2] + a1 * a4 * V * W
            return np.stack((e0, e1, e2))
        if sid == "L36":
            al, a1, be = c["alpha"], c["a1"], c["beta"]
            k1, k2 = c["kappa1"], c["kappa2"]
            U = vals[0]
            ph = 1.0 - np.tanh(k2 * np.asarray(x) / (2.0 * SQRT6))
            e0 = D2[0] + al * D1[0] + U * (1.0 + a1 * be - k1 * ph * ph)
            return e0[np.newaxis, :]
        if sid == "L52":
            al, be = c["alpha"], c["beta"]
            V = vals[0]
            ph = 1.0 - np.tanh(np.asarray(x) / (2.0 * SQRT6))
            U = 0.25 * ph * ph
            if c["case"] == "50":
                W = 0.25 * (1.0 - c["a4"]) * ph * ph
            else:
                W = 1.0 - 0.25 * ph * ph
            e0 = D2[0] + al * D1[0] + V * (1.0 - U) + U * (W - be)
            return e0[np.newaxis, :]
        raise ConstraintError(f"unknown system {sid!r}")


def reduced_system(sid: str, **coeffs) -> ReducedSystem:
    """Build a catalog system; coefficient names are checked strictly."""
    sid = sid if sid in _DIMS else sid.upper()
    if sid not in _DIMS:
        raise ConstraintError(f"unknown reduced system id {sid!r}")
    need = {
        "R35": ("alpha", "a1", "beta", "a3", "a4", "d"),
        "R38": ("beta", "a1", "a3", "a4"),
        "R47": ("alpha", "beta", "a3", "a4", "d"),
        "R58": ("alpha", "params"),
        "T2a": ("alpha", "beta", "a1", "a4"),
        "T2b": ("alpha", "gamma", "a1", "a4"),
        "T2c": ("beta", "a1", "a4"),
        "T2d": ("a1", "a4"),
        "L36": ("alpha", "a1", "beta", "kappa1", "kappa2"),
        "L52": ("alpha", "beta", "case", "a4"),
    }[sid]
    if sid == "L52":
        coeffs.setdefault("alpha", solutions.FISHER_SPEED)
        coeffs.setdefault("a4", 0.0)
    missing = [k for k in need if k not in coeffs]
    extra = [k for k in coeffs if k not in need]
    if missing or extra:
        raise ConstraintError(
            f"{sid} expects coefficients {need}; missing {missing}, "
            f"unexpected {extra}"
        )
    if sid == "R58":
        p: Params = coeffs["params"]
        if p.d1 != 1.0:
            raise ConstraintError(
                "R58 reduces the d1-normalized system; call "
                "Params.with_unit_d1() first"
            )
        kc = np.array([coeffs["alpha"], p.a1, p.a2, p.a3, p.a4, p.a5,
                       p.d2, p.d3])
    elif sid == "L52":
        if coeffs["case"] not in ("50", "51"):
            raise ConstraintError("L52 case must be '50' or '51'")
        kc = np.array([coeffs["alpha"], coeffs["beta"], coeffs["a4"],
                       1.0 if coeffs["case"] == "50" else 0.0])
    else:
        order = {
            "R35": ("alpha", "a1", "beta", "a3", "a4", "d"),
            "R38": ("beta", "a1", "a3", "a4"),
            "R47": ("alpha", "beta", "a3", "a4", "d"),
            "T2a": ("alpha", "beta", "a1", "a4"),
            "T2b": ("alpha", "gamma", "a1", "a4"),
            "T2c": ("beta", "a1", "a4"),
            "T2d": ("a1", "a4"),
            "L36": ("alpha", "a1", "beta", "kappa1", "kappa2"),
        }[sid]
        kc = np.array([float(coeffs[k]) for k in order])
    return ReducedSystem(sid=sid, coeffs=dict(coeffs), code=SYS_CODES[sid],
                         kcoeffs=kc, dim=_DIMS[sid])


def rhs(sys: ReducedSystem, state, ivar: float) -> np.ndarray:
    """Derivative of the first-order state at ivar."""
    return sys.rhs(ivar, np.asarray(state, dtype=float))


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------


@dataclass
class ProfileTrajectory:
    """Sampled ODE solution with dense evaluation.

    `rule` selects the interpolant: "cubic" (Hermite, uses stored
    derivatives) or "quintic" (B-spline through the nodes; needed when the
    result feeds second-difference stencils).  `interp_error_estimate` is
    the max observed cubic/quintic disagreement at interval midpoints.
    """

    xs: np.ndarray
    ys: np.ndarray
    fs: np.ndarray
    rule: str = "cubic"
    meta: dict = field(default_factory=dict)
    interp_error_estimate: float = math.nan
    _spline: object = field(default=None, repr=False)

    def __post_init__(self):
        if np.any(np.diff(self.xs) <= 0):
            raise ConstraintError("trajectory sample grid must be increasing")
        if math.isnan(self.interp_error_estimate) and len(self.xs) >= 8:
            mids = 0.5 * (self.xs[:-1] + self.xs[1:])
            if len(mids) > 512:
                mids = mids[:: len(mids) // 512 + 1]
            a = self._eval_cubic(mids)
            b = self._eval_quintic(mids)
            self.interp_error_estimate = float(np.max(np.abs(a - b)))

    @property
    def domain(self) -> tuple[float, float]:
        return (float(self.xs[0]), float(self.xs[-1]))

    def _check_domain(self, x):
        lo, hi = self.domain
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            raise DomainError(
                f"evaluation outside trajectory domain [{lo}, {hi}]"
            )

    def _eval_cubic(self, x):
        xs, ys, fs = self.xs, self.ys, self.fs
        j = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(xs) - 2)
        dx = xs[j + 1] - xs[j]
        s = (x - xs[j]) / dx
        s2 = s * s
        s3 = s2 * s
        h00 = 2.0 * s3 - 3.0 * s2 + 1.0
        h10 = s3 - 2.0 * s2 + s
        h01 = -2.0 * s3 + 3.0 * s2
        h11 = s3 - s2
        return (h00[:, None] * ys[j] + (h10 * dx)[:, None] * fs[j]
                + h01[:, None] * ys[j + 1] + (h11 * dx)[:, None] * fs[j + 1])

    def _eval_quintic(self, x):
        if self._spline is None:
            k = 5 if len(self.xs) > 5 else 3
            self._spline = make_interp_spline(self.xs, self.ys, k=k, axis=0)
        return self._spline(x)

    def evaluate(self, x, rule: str | None = None) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        self._check_domain(x)
        rule = rule or self.rule
        if rule == "cubic":
            return self._eval_cubic(x)
        if rule == "quintic":
            return self._eval_quintic(x)
        raise ConstraintError(f"unknown interpolation rule {rule!r}")

    def component(self, i: int, rule: str | None = None) -> Callable:
        def fn(x):
            scalar = np.isscalar(x)
            out = self.evaluate(x, rule=rule)[:, i]
            return float(out[0]) if scalar else out

        fn.domain = self.domain
        return fn

    def profile_matrix(self, indices: Sequence[int],
                       rule: str | None = None) -> Callable:
        """Callable x -> (m, n) matrix of the selected state components."""

        def fn(x):
            vals = self.evaluate(x, rule=rule)
            return vals[:, list(indices)].T

        fn.domain = self.domain
        return fn


# ---------------------------------------------------------------------------
# integrators
# ---------------------------------------------------------------------------

# Fehlberg 4(5) tableau
_RK_C = (0.0, 0.25, 3.0 / 8.0, 12.0 / 13.0, 1.0, 0.5)
_RK_A = (
    (),
    (0.25,),
    (3.0 / 32.0, 9.0 / 32.0),
    (1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0),
    (439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0),
    (-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0),
)
_RK_B5 = (16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0,
          -9.0 / 50.0, 2.0 / 55.0)
_RK_B4 = (25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0)
_RK_E = tuple(b5 - b4 for b5, b4 in zip(_RK_B5, _RK_B4))


def integrate(sys: ReducedSystem, y0, span, rel_tol: float = 1e-9,
              abs_tol: float = 1e-12, max_step: float | None = None,
              max_nodes: int = 4_000_000) -> ProfileTrajectory:
    """Adaptive embedded RK4(5) with PI step-size control.

    Propagates the fifth-order solution; the local error estimate comes
    from the embedded fourth-order weights.  Step-size underflow (stiff or
    blowing-up problems) raises with the reach point.
    """
    if not (0.0 < rel_tol <= 1e-2 and 0.0 < abs_tol <= 1e-2):
        raise ConstraintError("tolerances must lie in (0, 1e-2]")
    x0, x1 = float(span[0]), float(span[1])
    if x0 == x1:
        raise ConstraintError("integration span is empty")
    y = np.asarray(y0, dtype=float)
    if y.shape != (sys.dim,):
        raise ConstraintError(
            f"initial state must have dimension {sys.dim}"
        )
    if not np.isfinite(y).all():
        raise ConstraintError("initial state must be finite")
    direction = 1.0 if x1 > x0 else -1.0
    total = abs(x1 - x0)
    hmax = total if max_step is None else min(abs(max_step), total)
    h = min(hmax, total / 100.0, 0.1)
    x = x0
    xs = [x]
    yss = [y.copy()]
    fss = [sys.rhs(x, y)]
    err_prev = 1.0
    k = [None] * 6
    while (x1 - x) * direction > 1e-14 * max(1.0, abs(x1)):
        h = min(h, abs(x1 - x))
        if h < 1e-13 * max(1.0, abs(x)):
            raise NumericalError(
                f"step-size underflow at {sys.ivar} = {x} "
                f"(reached from {x0} toward {x1})"
            )
        hs = h * direction
        k[0] = sys.rhs(x, y)
        failed = False
        for i in range(1, 6):
            yi = y.copy()
            for j, a in enumerate(_RK_A[i]):
                yi += hs * a * k[j]
            if not np.isfinite(yi).all():
                failed = True
                break
            k[i] = sys.rhs(x + _RK_C[i] * hs, yi)
        if not failed:
            y5 = y.copy()
            err = np.zeros_like(y)
            for i in range(6):
                y5 += hs * _RK_B5[i] * k[i]
                err += hs * _RK_E[i] * k[i]
            failed = not np.isfinite(y5).all()
        if failed:
            h *= 0.25
            continue
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y5))
        err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
        if err_norm <= 1.0:
            x = x1 if abs(x1 - (x + hs)) <= 1e-14 * max(1.0, abs(x1)) \
                else x + hs
            y = y5
            xs.append(x)
            yss.append(y.copy())
            fss.append(sys.rhs(x, y))
            if len(xs) > max_nodes:
                raise NumericalError("node budget exceeded")
            e = max(err_norm, 1e-16)
            fac = 0.9 * e ** (-0.14) * max(err_prev, 1e-16) ** 0.08
            err_prev = e
            h = min(h * min(max(fac, 0.2), 5.0), hmax)
        else:
            h *= max(0.1, 0.9 * err_norm ** (-0.2))
    xs = np.asarray(xs)
    ys = np.asarray(yss)
    fs = np.asarray(fss)  # rhs is dy/dx regardless of sweep direction
    if direction < 0:
        xs = xs[::-1].copy()
        ys = ys[::-1].copy()
        fs = fs[::-1].copy()
    return ProfileTrajectory(xs=xs, ys=ys, fs=fs, rule="cubic",
                             meta={"sid": sys.sid, "rel_tol": rel_tol,
                                   "abs_tol": abs_tol})


def dense_profile(sys: ReducedSystem, y0, x0: float, x_left: float,
                  x_right: float, step: float = 5e-3) -> ProfileTrajectory:
    """Uniform fixed-step RK4 tabulation around x0 (numba hot path).

    Sweeps backward to x_left and forward to x_right from the anchor x0;
    the returned trajectory defaults to the quintic rule so its second
    derivatives stay below second-order stencil floors for grid spacings
    down to ~1e-3.
    """
    if not (x_left <= x0 <= x_right):
        raise ConstraintError("need x_left <= x0 <= x_right")
    if step <= 0:
        raise ConstraintError("step must be positive")
    y = np.asarray(y0, dtype=float)
    if y.shape != (sys.dim,):
        raise ConstraintError(f"initial state must have dimension {sys.dim}")
    n_r = int(math.ceil((x_right - x0) / step - 1e-12))
    n_l = int(math.ceil((x0 - x_left) / step - 1e-12))
    out_r = np.empty((n_r + 1, sys.dim))
    ode_rk4_table(sys.code, sys.kcoeffs, y, float(x0), step, n_r + 1, out_r)
    out_l = np.empty((n_l + 1, sys.dim))
    ode_rk4_table(sys.code, sys.kcoeffs, y, float(x0), -step, n_l + 1, out_l)
    xs = x0 + step * np.arange(-n_l, n_r + 1)
    ys = np.concatenate((out_l[:0:-1], out_r), axis=0)
    if not np.isfinite(ys).all():
        raise NumericalError("dense profile tabulation produced non-finite "
                             "values (blow-up); shrink the window")
    fs = sys.rhs_nodes(xs, ys)
    return ProfileTrajectory(xs=xs, ys=ys, fs=fs, rule="quintic",
                             meta={"sid": sys.sid, "step": step})


# ---------------------------------------------------------------------------
# closed-form solutions of R38
# ---------------------------------------------------------------------------


def closed_form_R38(case: str, a1: float, delta1: float, delta2: float,
                    beta: float, t, a4: float | None = None,
                    a3: float | None = None):
    """Closed solutions (U, V, W) of R38 for the three special cases.

    Case wiring matches fam40: (i) a3 = 1, (ii) a3 = 0, (iii)
    a4 = 1 + a1 + a3 with a3 != 0.  delta1, delta2 must be positive; the
    shared denominator must stay positive over the requested times (it can
    vanish only at negative t, for delta1 > 1).
    """
    if not (delta1 > 0 and delta2 > 0):
        raise ConstraintError("closed_form_R38 needs delta1, delta2 > 0")
    if a1 == 0.0:
        raise ConstraintError("closed_form_R38 needs a1 != 0")
    t = np.asarray(t, dtype=float)
    growth = 1.0 + beta * beta * a1 * a1
    if case == "i":
        if a4 is None:
            raise ConstraintError("case i needs a4")
        r = 1.0
        kappa = (1.0 + a1) / (1.0 + a1 * a4)
    elif case == "ii":
        if a4 is None:
            raise ConstraintError("case ii needs a4")
        if a4 == 0.0:
            raise ConstraintError("case ii needs a4 != 0")
        r = float(a4)
        kappa = 1.0 / a4
    elif case == "iii":
        if a3 is None or a3 == 0.0:
            raise ConstraintError("case iii needs a3 != 0")
        a4 = 1.0 + a1 + a3
        r = 1.0 + a1
        kappa = 1.0 / (1.0 + a1)
    else:
        raise ConstraintError(f"unknown R38 case {case!r}")
    m = (1.0 - delta1) * np.exp(-r * t) + delta1
    if np.any(m <= 0):
        tcrit = math.log((delta1 - 1.0) / delta1) / r
        raise DomainError(
            f"denominator 1 - delta1 + delta1*e^(r t) vanishes at "
            f"t = {tcrit}; requested span crosses it"
        )
    logD = r * t + np.log(m)
    g = delta1 / m
    U = delta2 * np.exp(growth * t - kappa * logD)
    if case == "i":
        V = (1.0 + a1) / (a1 * (1.0 + a1 * a4)) * g
        W = (1.0 - a4) / (1.0 + a1 * a4) * g
    elif case == "ii":
        V = g / a1
        W = (1.0 - a4) * (delta1 - 1.0) / a1 * np.exp(-logD)
    else:
        V = g / a1
        W = (1.0 - delta1) * np.exp(-logD)
    return (U, V, W + np.zeros_like(U))


# ---------------------------------------------------------------------------
# ansatz reconstruction
# ---------------------------------------------------------------------------

ANSATZ_IDS = ("A34", "A37", "A44", "plane", "T2a", "T2b", "T2c", "T2d")

# system -> the ansatz that reconstructs a PDE solution from its profiles
PAIRINGS = {"R35": "A34", "R38": "A37", "R47": "A44", "R58": "plane",
            "T2a": "T2a", "T2b": "T2b", "T2c": "T2c", "T2d": "T2d",
            "L36": "A34", "L52": "A44"}

_OMEGA_BASED = {"A34", "A44", "plane", "T2a", "T2b"}


@dataclass(frozen=True)
class Ansatz:
    """Algebraic reconstruction rule from profiles to PDE fields."""

    aid: str
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    a1: float = 0.0
    a4: float = 0.0

    @property
    def omega_based(self) -> bool:
        return self.aid in _OMEGA_BASED


def make_ansatz(aid: str, **kw) -> Ansatz:
    if aid not in ANSATZ_IDS:
        raise ConstraintError(f"unknown ansatz id {aid!r}")
    need = {
        "A34": ("alpha", "beta", "a1"),
        "A37": ("beta", "a1"),
        "A44": ("alpha", "beta", "gamma"),
        "plane": ("alpha",),
        "T2a": ("alpha", "beta", "gamma", "a1", "a4"),
        "T2b": ("alpha", "gamma", "a1", "a4"),
        "T2c": ("beta", "gamma", "a1", "a4"),
        "T2d": ("gamma", "a1", "a4"),
    }[aid]
    missing = [k for k in need if k not in kw]
    extra = [k for k in kw if k not in need]
    if missing or extra:
        raise ConstraintError(
            f"{aid} expects coefficients {need}; missing {missing}, "
            f"unexpected {extra}"
        )
    if aid in ("A34", "A37", "T2a", "T2b", "T2c", "T2d") and kw.get("a1") == 0:
        raise ConstraintError(f"{aid} requires a1 != 0")
    if aid == "T2a" and 1.0 + kw["beta"] * kw["a1"] == 0.0:
        raise ConstraintError("T2a requires 1 + beta*a1 != 0 (use T2b)")
    if aid == "T2c" and kw["beta"] == 0.0:
        raise ConstraintError("T2c requires beta != 0 (use T2d)")
    return Ansatz(aid=aid, **kw)


def _profile(profiles, name):
    fn = profiles.get(name)
    if fn is None:
        return lambda s: np.zeros_like(np.asarray(s, dtype=float))
    return fn


def reconstruct(ansatz: Ansatz, profiles, t, x):
    """Compose profiles through the ansatz at (t, x); exact algebra only."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    U = _profile(profiles, "U")
    V = _profile(profiles, "V")
    W = _profile(profiles, "W")
    a = ansatz
    if a.aid in ("A34", "A44", "plane", "T2a", "T2b"):
        om = x - a.alpha * t
        if a.aid == "A34":
            up = np.exp(-a.beta * a.a1 * t) * U(om)
            return (up, V(om) - up / a.a1, W(om) + np.zeros_like(up))
        if a.aid == "A44":
            u = U(om)
            shift = a.beta * t + a.gamma * np.exp(t)
            v = V(om) + shift * u - a.gamma * np.exp(t)
            return (u + np.zeros_like(v), v, W(om) + np.zeros_like(v))
        if a.aid == "plane":
            u = U(om)
            z = np.zeros_like(u)
            return (u, V(om) + z, W(om) + z)
        s = (a.a4 - 1.0) * V(om) + W(om) + (1.0 - a.a4) / a.a1
        if a.aid == "T2a":
            u = np.exp(-a.beta * a.a1 * t) * U(om) \
                + a.gamma * np.exp(t) / (1.0 + a.beta * a.a1) * s
        else:
            u = np.exp(t) * (U(om) + a.gamma * s * t)
        return (u, V(om) - u / a.a1, W(om) + np.zeros_like(u))
    if a.aid == "A37":
        e = np.exp(-a.beta * a.a1 * x)
        u = U(t) * e
        return (u, V(t) - u / a.a1, W(t) + np.zeros_like(u))
    # T2c / T2d: profiles over t, explicit x dependence
    s = (a.a4 - 1.0) * V(t) + W(t) + (1.0 - a.a4) / a.a1
    if a.aid == "T2c":
        u = np.exp(-a.beta * a.a1 * x) * U(t) \
            + a.gamma * np.exp(t) / (a.beta * a.a1) * s
    else:
        u = U(t) + a.gamma * np.exp(t) * s * x
    return (u, V(t) - u / a.a1, W(t) + np.zeros_like(u))


def ansatz_solution(ansatz: Ansatz, profiles, params: Params,
                    key: str = "") -> Solution:
    """Wrap an ansatz + profiles as a full (t, x) sampler."""

    def evaluate(t, x):
        return reconstruct(ansatz, profiles, t, x)

    return Solution(evaluate=evaluate, params=params, key=key,
                    meta={"ansatz": ansatz.aid})


def trajectory_profiles(sys: ReducedSystem, traj: ProfileTrajectory,
                        rule: str | None = "quintic") -> dict:
    """Profile callables {"U", "V", "W"} (or a single one) from a
    trajectory of `sys`."""
    idx = sys.profile_indices
    names = ("U", "V", "W") if len(idx) == 3 else (
        ("V",) if sys.sid == "L52" else ("U",))
    return {n: traj.component(i, rule=rule) for n, i in zip(names, idx)}


def verify_reduction(sys: ReducedSystem, ansatz: Ansatz, params: Params,
                     profiles, window, h_sequence,
                     dt_over_h: float = 1.0) -> calculus.ResidualReport:
    """Reconstruct the PDE field from profiles and run the residual
    refinement study.

    `window` is (t, lo, hi); for omega-based ansaetze (lo, hi) is the
    window in the wave variable and the x-grid is shifted by alpha*t, for
    t-based ones it is the plain x-window.  The system/ansatz pairing is
    enforced.
    """
    if PAIRINGS[sys.sid] != ansatz.aid:
        raise ConstraintError(
            f"system {sys.sid} pairs with ansatz {PAIRINGS[sys.sid]}, "
            f"not {ansatz.aid}"
        )
    t, lo, hi = window
    if ansatz.omega_based:
        x_lo, x_hi = lo + ansatz.alpha * t, hi + ansatz.alpha * t
    else:
        x_lo, x_hi = lo, hi
    sol = ansatz_solution(ansatz, profiles, params)
    return calculus.refinement_study(params, sol, (t, x_lo, x_hi),
                                     h_sequence, dt_over_h=dt_over_h)


# ---------------------------------------------------------------------------
# checked builder for the semi-exact families
# ---------------------------------------------------------------------------


def semi_exact_family(case: str, *, a1: float | None = None,
                      a4: float | None = None, a3: float | None = None,
                      beta: float = 0.0, gamma: float = 0.0,
                      window=(-22.0, 22.0), step: float = 5e-3,
                      y0=(1.0, 0.0), anchor: float | None = None,
                      check_h: float = 2e-3):
    """Integrate the free profile of a semi-exact family and assemble it.

    Returns (family, trajectory).  The initial data `y0` is imposed at
    `anchor` (default: 0 clamped into the window; anchoring at the left
    edge keeps backward-growing modes out of the table entirely).  The
    tabulated profile is validated against its linear ODE by a
    finite-difference residual before use; a profile that fails the check
    (wrong coefficients, wrong case) is rejected instead of producing a
    silently wrong family.
    """
    lo, hi = float(window[0]), float(window[1])
    if case in ("35-i", "35-ii", "35-iii"):
        cd = solutions.semi35_case(case, a1, a4, a3)
        sys = reduced_system("L36", alpha=cd["alpha"], a1=a1, beta=beta,
                             kappa1=cd["kappa1"], kappa2=cd["kappa2"])
    elif case in ("50", "51"):
        sys = reduced_system("L52", beta=beta, case=case,
                             a4=0.0 if case == "51" else a4)
    else:
        raise ConstraintError(f"unknown semi-exact case {case!r}")
    if anchor is None:
        anchor = min(max(0.0, lo), hi)
    elif not lo <= anchor <= hi:
        raise ConstraintError("anchor must lie inside the profile window")
    traj = dense_profile(sys, np.asarray(y0, dtype=float), anchor, lo, hi,
                         step=step)
    prof = traj.profile_matrix((0,))
    inner = (lo + 4 * check_h, hi - 4 * check_h)
    report = calculus.ode_residual(sys, prof, inner, check_h)
    scale = 1.0 + float(np.max(np.abs(traj.ys[:, 0])))
    if report.linf[0] > 1e-5 * scale:
        raise NumericalError(
            f"profile fails its ODE residual check: linf = "
            f"{report.linf[0]:.3e} against scale {scale:.3e}"
        )
    fam = solutions.make_semi_exact(case, traj.component(0), a1=a1, a4=a4,
                                    a3=a3, beta=beta, gamma=gamma,
                                    window=window)
    return fam, traj
