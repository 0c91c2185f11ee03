"""Parameter space, reaction kinetics and steady states of the
three-component hunter-gatherer / farmer (HGF) reaction-diffusion system.

Two parameter records exist: `OriginalParams` holds the dimensional
coefficients of the population model (diffusivities, growth rates,
carrying capacities, conversion rates); `Params` holds the eight
nondimensional coefficients a1..a5, d1..d3 of the rescaled system

    u_t = d1 u_xx + u (1 - u - a1 v)
    v_t = d2 v_xx + a2 v (1 - u - a1 v) + u w + a1 v w
    w_t = d3 w_xx + a3 w (1 - w) - a4 u w - a5 v w

All operations here are pure functions of immutable records and are safe
to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np

from .errors import ConstraintError

# absolute tolerance on kinetics components when deciding "is a steady
# state"; closed-form states are exact so only roundoff remains
STEADY_TOL = 1e-12


@dataclass(frozen=True)
class OriginalParams:
    """Dimensional coefficients of the population model.

    d_f, d_c, d_h: diffusivities of initial farmers, converted farmers and
    hunter-gatherers; r_f, r_c, r_h: intrinsic growth rates; K, L: carrying
    capacities; e1, e2: conversion rates of hunter-gatherers to initial and
    converted farmers.
    """

    d_f: float
    d_c: float
    d_h: float
    r_f: float
    r_c: float
    r_h: float
    K: float
    L: float
    e1: float
    e2: float

    def __post_init__(self):
        for name in ("d_f", "d_c", "d_h", "K", "L", "e1", "r_f"):
            if not getattr(self, name) > 0:
                raise ConstraintError(
                    f"OriginalParams requires {name} > 0 "
                    f"(got {name} = {getattr(self, name)!r})"
                )
        for name in ("e2", "r_c", "r_h"):
            if getattr(self, name) < 0:
                raise ConstraintError(
                    f"OriginalParams requires {name} >= 0 "
                    f"(got {name} = {getattr(self, name)!r})"
                )

    @property
    def diffusivities(self) -> tuple[float, float, float]:
        return (self.d_f, self.d_c, self.d_h)

    def reaction(self, F, C, H):
        """Dimensional reaction rates for the (F, C, H) densities."""
        crowd = 1.0 - (self.e1 * F + self.e2 * C) / self.K
        r1 = self.r_f * F * crowd
        r2 = self.r_c * C * crowd + self.e1 * F * H + self.e2 * C * H
        r3 = self.r_h * H * (1.0 - H / self.L) - self.e1 * F * H - self.e2 * C * H
        return (r1, r2, r3)


@dataclass(frozen=True)
class Params:
    """Nondimensional coefficients a1..a5 and diffusivities d1..d3."""

    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    d1: float = 1.0
    d2: float = 1.0
    d3: float = 1.0

    def __post_init__(self):
        if self.a4 == 0:
            raise ConstraintError("Params requires a4 != 0")
        for name in ("d1", "d2", "d3"):
            if not getattr(self, name) > 0:
                raise ConstraintError(
                    f"Params requires {name} > 0 (got {getattr(self, name)!r})"
                )

    @property
    def diffusivities(self) -> tuple[float, float, float]:
        return (self.d1, self.d2, self.d3)

    @property
    def a_coefficients(self) -> tuple[float, float, float, float, float]:
        return (self.a1, self.a2, self.a3, self.a4, self.a5)

    def reaction(self, u, v, w):
        """Reaction rates (C1, C2, C3); defined for all real triples."""
        g = 1.0 - u - self.a1 * v
        c1 = u * g
        c2 = self.a2 * v * g + u * w + self.a1 * v * w
        c3 = self.a3 * w * (1.0 - w) - self.a4 * u * w - self.a5 * v * w
        return (c1, c2, c3)

    def with_unit_d1(self) -> "Params":
        """Equivalent coefficient set with d1 scaled to 1 (space rescaling)."""
        return replace(self, d1=1.0, d2=self.d2 / self.d1, d3=self.d3 / self.d1)


def rescale_params(orig: OriginalParams) -> Params:
    """Map dimensional coefficients onto the nondimensional ones.

    a1 = e2 L / r_f, a2 = r_c / r_f, a3 = r_h / r_f, a4 = K / r_f,
    a5 = e2 K L / r_f^2; diffusivities pass through unchanged.
    K = 0 or r_f = 0 are rejected (they would force a4 = 0 or divide by
    zero) -- `OriginalParams` already refuses to hold them.
    """
    if orig.r_f == 0:
        raise ConstraintError("rescale_params requires r_f != 0")
    if orig.K == 0:
        raise ConstraintError("rescale_params requires K != 0 (a4 would vanish)")
    r = orig.r_f
    return Params(
        a1=orig.e2 * orig.L / r,
        a2=orig.r_c / r,
        a3=orig.r_h / r,
        a4=orig.K / r,
        a5=orig.e2 * orig.K * orig.L / (r * r),
        d1=orig.d_f,
        d2=orig.d_c,
        d3=orig.d_h,
    )


def kinetics(p, state):
    """Reaction rates of `p` at a (u, v, w) triple (scalars or arrays)."""
    u, v, w = state
    return p.reaction(u, v, w)


# ---------------------------------------------------------------------------
# solution samplers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Solution:
    """A (t, x) -> (u, v, w) sampler bundled with its coefficient set.

    `evaluate` must broadcast over numpy arrays in t and x and return a
    triple of arrays; entries for components the sampler does not define
    are None (the catalog treats undefined components as identically zero
    when kinetics are needed).
    """

    evaluate: Callable = field(repr=False)
    params: Params | None = None
    components: tuple[str, ...] = ("u", "v", "w")
    speed: float | None = None
    endpoint_states: tuple | None = None  # ((u,v,w) as x -> -inf, as x -> +inf)
    t_limit: Callable | None = field(default=None, repr=False)
    warnings: tuple[str, ...] = ()
    key: str = ""
    meta: dict = field(default_factory=dict)

    def __call__(self, t, x):
        return self.evaluate(t, x)


def as_solution(fn, params=None, **kw) -> Solution:
    """Wrap a plain (t, x) sampler callable."""
    return Solution(evaluate=fn, params=params, **kw)


def reflect_solution(sol) -> Solution:
    """Mirror a sampler in space: returns (t, x) -> sol(t, -x).

    An involution; endpoint states swap sides and a traveling front's
    speed changes sign.
    """
    base_eval = sol.evaluate if hasattr(sol, "evaluate") else sol

    def evaluate(t, x):
        return base_eval(t, np.negative(x))

    if isinstance(sol, Solution):
        return replace(
            sol,
            evaluate=evaluate,
            speed=None if sol.speed is None else -sol.speed,
            endpoint_states=None
            if sol.endpoint_states is None
            else tuple(reversed(sol.endpoint_states)),
            t_limit=None,
            meta={**sol.meta, "reflected": not sol.meta.get("reflected", False)},
        )
    return Solution(evaluate=evaluate)


def unrescale_solution(orig: OriginalParams, sol) -> Solution:
    """Dimensional sampler (T, X) -> (F, C, H) from a nondimensional one.

    Uses the substitution that produces the nondimensional system exactly:
    the dimensional field at (T, X) is read off the nondimensional solution
    at (r_f T, sqrt(r_f) X), with amplitudes F = (K/e1) u, C = (K L / r_f) v,
    H = L w.
    """
    base_eval = sol.evaluate if hasattr(sol, "evaluate") else sol
    r = orig.r_f
    sq = math.sqrt(r)
    cF = orig.K / orig.e1
    cC = orig.K * orig.L / r
    cH = orig.L

    def evaluate(T, X):
        u, v, w = base_eval(np.asarray(T) * r, np.asarray(X) * sq)
        F = None if u is None else cF * u
        C = None if v is None else cC * v
        H = None if w is None else cH * w
        return (F, C, H)

    comps = sol.components if hasattr(sol, "components") else ("u", "v", "w")
    return Solution(evaluate=evaluate, params=None, components=comps,
                    meta={"dimensional": True})


# ---------------------------------------------------------------------------
# steady states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SteadyState:
    """A constant solution, or an affine family of them.

    kind is "isolated-point", "line-family" or "plane-family"; `point` is
    the anchor state and `directions` the 0, 1 or 2 direction vectors of
    the family.  `label` is a human-readable parametrization.
    """

    kind: str
    point: tuple[float, float, float]
    directions: tuple[tuple[float, float, float], ...] = ()
    label: str = ""

    def sample(self, *s: float) -> tuple[float, float, float]:
        out = np.asarray(self.point, dtype=float)
        for si, d in zip(s, self.directions):
            out = out + si * np.asarray(d)
        return tuple(out)

    def distance(self, state) -> float:
        """Euclidean distance from `state` to the represented set."""
        q = np.asarray(state, dtype=float) - np.asarray(self.point, dtype=float)
        for d in self.directions:
            dv = np.asarray(d, dtype=float)
            dv = dv / np.linalg.norm(dv)
            q = q - np.dot(q, dv) * dv
        return float(np.linalg.norm(q))

    def contains(self, state, tol: float = 1e-9) -> bool:
        return self.distance(state) <= tol


def _near(x: float, y: float, tol: float = 1e-14) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def steady_states(p: Params) -> list[SteadyState]:
    """All constant solutions of the kinetics, exact case analysis.

    Continuum families arising from degenerate coefficient combinations are
    returned symbolically as line (or plane) families rather than sampled;
    every returned state satisfies kinetics = 0 identically.
    """
    a1, a2, a3, a4, a5 = p.a_coefficients
    out: list[SteadyState] = []

    out.append(SteadyState("isolated-point", (0.0, 0.0, 0.0), label="(0, 0, 0)"))

    # u = 0, v = 0 branch: a3 w (1 - w) = 0
    if a3 != 0.0:
        out.append(SteadyState("isolated-point", (0.0, 0.0, 1.0), label="(0, 0, 1)"))
    else:
        out.append(
            SteadyState("line-family", (0.0, 0.0, 0.0), ((0.0, 0.0, 1.0),),
                        label="(0, 0, s)")
        )

    # coexistence line u + a1 v = 1, w = 0 (always a steady family)
    out.append(
        SteadyState(
            "line-family",
            (1.0, 0.0, 0.0),
            ((-a1, 1.0, 0.0),),
            label=f"(1 - {a1}*s, s, 0)",
        )
    )

    # u = 0, v free, w = 0: needs a2 (1 - a1 v) = 0
    if a2 == 0.0:
        out.append(
            SteadyState("line-family", (0.0, 0.0, 0.0), ((0.0, 1.0, 0.0),),
                        label="(0, s, 0)")
        )
    # (a2 != 0, a1 != 0 gives the point (0, 1/a1, 0), already on the
    # coexistence line)

    # u = 0, v != 0, w != 0: a2 (1 - a1 v) + a1 w = 0 and a3 (1 - w) = a5 v
    if a1 == 0.0:
        if a2 == 0.0:
            if a3 != 0.0:
                # line a5 v + a3 w = a3
                out.append(
                    SteadyState(
                        "line-family",
                        (0.0, 0.0, 1.0),
                        ((0.0, 1.0, -a5 / a3),),
                        label=f"(0, s, 1 - {a5 / a3}*s)",
                    )
                )
            elif a5 == 0.0:
                # kinetics vanish on the whole u = 0 plane
                out.append(
                    SteadyState(
                        "plane-family",
                        (0.0, 0.0, 0.0),
                        ((0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
                        label="(0, s, r)",
                    )
                )
            # a3 = 0, a5 != 0 forces v = 0, covered above
    else:
        det = a1 * (a2 * a3 + a5)
        if det != 0.0:
            vstar = a3 * (a1 + a2) / det
            wstar = a2 * (a1 * a3 - a5) / det
            cand = (0.0, vstar, wstar)
            if max(abs(c) for c in kinetics(p, cand)) <= STEADY_TOL and not any(
                s.contains(cand, tol=1e-12) for s in out
            ):
                out.append(
                    SteadyState("isolated-point", cand,
                                label=f"(0, {vstar}, {wstar})")
                )
        else:
            # rows of the 2x2 system are proportional (a5 = -a2 a3)
            if a3 == 0.0 and a2 != 0.0:
                # single constraint w = a2 v - a2 / a1 with a5 = 0
                out.append(
                    SteadyState(
                        "line-family",
                        (0.0, 0.0, -a2 / a1),
                        ((0.0, 1.0, a2),),
                        label=f"(0, s, {a2}*s - {a2 / a1})",
                    )
                )
            elif _near(a1 + a2, 0.0):
                # both equations collapse onto a1 v + w = 1
                out.append(
                    SteadyState(
                        "line-family",
                        (0.0, 0.0, 1.0),
                        ((0.0, 1.0, -a1),),
                        label=f"(0, s, 1 - {a1}*s)",
                    )
                )
            # otherwise inconsistent: no states on this branch
    return out
