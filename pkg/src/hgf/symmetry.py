"""Operator catalog: admissibility cases, finite one-parameter group flows
and solution-to-solution verification.

Each operator kind carries exactly the coefficients its closed-form flow
needs.  Invariance is verified numerically: apply the finite flow to a
known solution and check that the residual of the transformed field still
vanishes to stencil order.  The symbolic machinery behind the catalog is
out of scope; the flows below are the integrated characteristic systems
of the catalog generators.

Flow catalog (eps is the group parameter, fields at fixed (t, x)):

    Pt, Px                  time / space translations (always admissible)
    I                       (v, w) -> (e^eps v, e^eps w)
    Xinf(P)                 v -> v + eps P(t, x),  P_t = d2 P_xx
    Q1                      u -> e^(-a1 eps) u, v -> v + (1-e^(-a1 eps)) u/a1
    UdV                     v -> v + eps u
    Q2                      v -> v + eps e^t (u - 1)
    ExpA4WdV                v -> v + eps e^(a4 t) w
    WdV_minus_a4WdW         w -> e^(-a4 eps) w, v -> v + (1-e^(-a4 eps)) w/a4
    Case9Op                 u -> u + eps e^t s, v -> v - (eps/a1) e^t s with
                            the flow invariant s = ((a4-1)/a1) u + (a4-1) v
                            + w + (1-a4)/a1
    Case10Op                v -> v + eps u, w -> w + eps (a2-1)(u-1)
    Case12_WdV_minus_WdW    w -> e^(-eps) w, v -> v + (1-e^(-eps)) w
    Case12_UdV_plus_1mUdW   v -> v + eps u, w -> w + eps (1-u)
    Case12_ExpMinusT        v -> v + eps e^(-t) u, w -> w - eps e^(-t) u
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import calculus
from .errors import ConstraintError
from .model import Params, Solution

OP_KINDS = (
    "Pt", "Px", "I", "Xinf", "Q1", "UdV", "Q2", "ExpA4WdV",
    "WdV_minus_a4WdW", "Case9Op", "Case10Op", "Case12_WdV_minus_WdW",
    "Case12_UdV_plus_1mUdW", "Case12_ExpMinusT",
)

_REL_TOL = 1e-12


def _eq(x: float, y: float) -> bool:
    return abs(x - y) <= _REL_TOL * max(1.0, abs(x), abs(y))


# ---------------------------------------------------------------------------
# heat-equation profiles for Xinf
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeatProfile:
    """Closed-form solution of P_t = d2 P_xx (four kinds, all exact)."""

    kind: str
    c0: float = 0.0
    c1: float = 0.0
    amp: float = 1.0
    b: float = 0.0
    mu: float = 1.0

    def __call__(self, t, x, d2: float):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return self.c0 + np.zeros(np.broadcast(t, x).shape)
        if self.kind == "affine":
            return self.c0 + self.c1 * x + 0.0 * t
        if self.kind == "exponential":
            return self.amp * np.exp(self.mu * x + d2 * self.mu**2 * t)
        if self.kind == "decaying-mode":
            return np.exp(-d2 * self.mu**2 * t) * (
                self.amp * np.cos(self.mu * x) + self.b * np.sin(self.mu * x)
            )
        raise ConstraintError(f"unknown heat profile kind {self.kind!r}")


def heat_constant(c0: float = 1.0) -> HeatProfile:
    return HeatProfile(kind="constant", c0=c0)


def heat_affine(c0: float, c1: float) -> HeatProfile:
    return HeatProfile(kind="affine", c0=c0, c1=c1)


def heat_exponential(amp: float, mu: float) -> HeatProfile:
    return HeatProfile(kind="exponential", amp=amp, mu=mu)


def heat_decaying(amp: float, b: float, mu: float) -> HeatProfile:
    return HeatProfile(kind="decaying-mode", amp=amp, b=b, mu=mu)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetryOp:
    """One catalog operator with the coefficients its flow needs."""

    kind: str
    a1: float | None = None
    a2: float | None = None
    a4: float | None = None
    d2: float | None = None
    profile: HeatProfile | None = None

    def __post_init__(self):
        if self.kind not in OP_KINDS:
            raise ConstraintError(f"unknown operator kind {self.kind!r}")
        need = {"Q1": ("a1",), "ExpA4WdV": ("a4",),
                "WdV_minus_a4WdW": ("a4",), "Case9Op": ("a1", "a4"),
                "Case10Op": ("a2",), "Xinf": ("d2",)}.get(self.kind, ())
        for name in need:
            if getattr(self, name) is None:
                raise ConstraintError(f"{self.kind} needs coefficient {name}")
        if self.kind == "Xinf" and self.profile is None:
            object.__setattr__(self, "profile", heat_constant(1.0))
        if self.kind in ("Q1", "Case9Op") and self.a1 == 0:
            raise ConstraintError(f"{self.kind} needs a1 != 0")

    # -- pointwise action ---------------------------------------------------

    def point_map(self, eps: float, t, x, u, v, w):
        """Finite flow acting on a prolonged point (t, x, u, v, w)."""
        k = self.kind
        if k == "Pt":
            return (t + eps, x, u, v, w)
        if k == "Px":
            return (t, x + eps, u, v, w)
        if k == "I":
            f = math.exp(eps)
            return (t, x, u, f * v, f * w)
        if k == "Xinf":
            return (t, x, u, v + eps * self.profile(t, x, self.d2), w)
        if k == "Q1":
            f = math.exp(-self.a1 * eps)
            return (t, x, f * u, v + (1.0 - f) * u / self.a1, w)
        if k == "UdV":
            return (t, x, u, v + eps * u, w)
        if k == "Q2":
            return (t, x, u, v + eps * np.exp(t) * (u - 1.0), w)
        if k == "ExpA4WdV":
            return (t, x, u, v + eps * np.exp(self.a4 * t) * w, w)
        if k == "WdV_minus_a4WdW":
            f = math.exp(-self.a4 * eps)
            return (t, x, u, v + (1.0 - f) * w / self.a4, f * w)
        if k == "Case9Op":
            a1, a4 = self.a1, self.a4
            s = ((a4 - 1.0) / a1) * u + (a4 - 1.0) * v + w + (1.0 - a4) / a1
            shift = eps * np.exp(t) * s
            return (t, x, u + shift, v - shift / a1, w)
        if k == "Case10Op":
            return (t, x, u, v + eps * u, w + eps * (self.a2 - 1.0) * (u - 1.0))
        if k == "Case12_WdV_minus_WdW":
            f = math.exp(-eps)
            return (t, x, u, v + (1.0 - f) * w, f * w)
        if k == "Case12_UdV_plus_1mUdW":
            return (t, x, u, v + eps * u, w + eps * (1.0 - u))
        # Case12_ExpMinusT
        shift = eps * np.exp(-np.asarray(t, dtype=float)) * u
        return (t, x, u, v + shift, w - shift)

    # -- infinitesimals -----------------------------------------------------

    def eta(self, t, x, u, v, w):
        """Field-direction generator components (eta1, eta2, eta3)."""
        k = self.kind
        z = np.zeros(np.broadcast(np.asarray(t), np.asarray(u)).shape)
        if k in ("Pt", "Px"):
            return (z, z, z)
        if k == "I":
            return (z, v + z, w + z)
        if k == "Xinf":
            return (z, self.profile(t, x, self.d2) + z, z)
        if k == "Q1":
            return (-self.a1 * u + z, u + z, z)
        if k == "UdV":
            return (z, u + z, z)
        if k == "Q2":
            return (z, np.exp(t) * (u - 1.0) + z, z)
        if k == "ExpA4WdV":
            return (z, np.exp(self.a4 * t) * w + z, z)
        if k == "WdV_minus_a4WdW":
            return (z, w + z, -self.a4 * w + z)
        if k == "Case9Op":
            a1, a4 = self.a1, self.a4
            s = ((a4 - 1.0) / a1) * u + (a4 - 1.0) * v + w + (1.0 - a4) / a1
            e = np.exp(t) * s
            return (e + z, -e / a1 + z, z)
        if k == "Case10Op":
            return (z, u + z, (self.a2 - 1.0) * (u - 1.0) + z)
        if k == "Case12_WdV_minus_WdW":
            return (z, w + z, -w + z)
        if k == "Case12_UdV_plus_1mUdW":
            return (z, u + z, 1.0 - u + z)
        e = np.exp(-np.asarray(t, dtype=float)) * u
        return (z, e + z, -e + z)

    @property
    def xi(self) -> tuple[float, float]:
        """(t, x)-direction generator components."""
        if self.kind == "Pt":
            return (1.0, 0.0)
        if self.kind == "Px":
            return (0.0, 1.0)
        return (0.0, 0.0)

    def admissible_for(self, p: Params) -> bool:
        """Is this operator in the catalog for coefficient set p, with
        matching coefficient data?"""
        if self.kind in ("Pt", "Px"):
            return True
        checks = {"a1": self.a1, "a2": self.a2, "a4": self.a4, "d2": self.d2}
        for name, val in checks.items():
            if val is not None and not _eq(val, getattr(p, name)):
                return False
        for case, ops in admissible_ops(p):
            if case.case == 0:
                continue
            if any(op.kind == self.kind for op in ops):
                return True
        return False


def pt() -> SymmetryOp:
    return SymmetryOp(kind="Pt")


def px() -> SymmetryOp:
    return SymmetryOp(kind="Px")


def xinf(profile: HeatProfile, d2: float) -> SymmetryOp:
    return SymmetryOp(kind="Xinf", profile=profile, d2=d2)


# ---------------------------------------------------------------------------
# the twelve parameter cases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CaseId:
    """One catalog row: its coefficient predicate and operator set."""

    case: int
    label: str
    predicate: Callable = field(repr=False)
    make_ops: Callable = field(repr=False)

    def operators(self, p: Params) -> tuple[SymmetryOp, ...]:
        return self.make_ops(p)


def _z(x) -> bool:
    return x == 0.0


CASES: tuple[CaseId, ...] = (
    CaseId(1, "a1=0, a3=0, a5=0, a2!=0",
           lambda p: _z(p.a1) and _z(p.a3) and _z(p.a5) and p.a2 != 0,
           lambda p: (SymmetryOp("I"),)),
    CaseId(2, "a1=0, a2=0, a5=0, a3!=0",
           lambda p: _z(p.a1) and _z(p.a2) and _z(p.a5) and p.a3 != 0,
           lambda p: (xinf(heat_constant(1.0), p.d2),)),
    CaseId(3, "a1=0, a2=0, a3=0, a5=0",
           lambda p: _z(p.a1) and _z(p.a2) and _z(p.a3) and _z(p.a5),
           lambda p: (SymmetryOp("I"), xinf(heat_constant(1.0), p.d2))),
    CaseId(4, "d1=d2, a2=1, a5=a1*a4, a1!=0",
           lambda p: p.d1 == p.d2 and p.a2 == 1.0 and p.a1 != 0
           and _eq(p.a5, p.a1 * p.a4),
           lambda p: (SymmetryOp("Q1", a1=p.a1),)),
    CaseId(5, "d1=d2, a1=0, a2=1, a5=0, a3!=0",
           lambda p: p.d1 == p.d2 and _z(p.a1) and p.a2 == 1.0
           and _z(p.a5) and p.a3 != 0,
           lambda p: (SymmetryOp("UdV"), SymmetryOp("Q2"))),
    CaseId(6, "d1=d2, a1=0, a2=1, a3=0, a5=0",
           lambda p: p.d1 == p.d2 and _z(p.a1) and p.a2 == 1.0
           and _z(p.a3) and _z(p.a5),
           lambda p: (SymmetryOp("UdV"), SymmetryOp("I"), SymmetryOp("Q2"))),
    CaseId(7, "d2=d3, a1=0, a2=a4, a3=0, a5=0",
           lambda p: p.d2 == p.d3 and _z(p.a1) and _eq(p.a2, p.a4)
           and _z(p.a3) and _z(p.a5),
           lambda p: (SymmetryOp("ExpA4WdV", a4=p.a4), SymmetryOp("I"))),
    CaseId(8, "d2=d3, a1=0, a2=0, a3=0, a5=0",
           lambda p: p.d2 == p.d3 and _z(p.a1) and _z(p.a2) and _z(p.a3)
           and _z(p.a5),
           lambda p: (SymmetryOp("WdV_minus_a4WdW", a4=p.a4),
                      SymmetryOp("I"), xinf(heat_constant(1.0), p.d2))),
    CaseId(9, "d1=d2=d3, a2=1, a3=0, a5=a1*a4, a1!=0",
           lambda p: p.d1 == p.d2 == p.d3 and p.a2 == 1.0 and _z(p.a3)
           and p.a1 != 0 and _eq(p.a5, p.a1 * p.a4),
           lambda p: (SymmetryOp("Q1", a1=p.a1),
                      SymmetryOp("Case9Op", a1=p.a1, a4=p.a4))),
    CaseId(10, "d1=d2=d3, a1=0, a3=0, a4=1, a5=0, a2 not in {0,1}",
           lambda p: p.d1 == p.d2 == p.d3 and _z(p.a1) and _z(p.a3)
           and p.a4 == 1.0 and _z(p.a5) and p.a2 not in (0.0, 1.0),
           lambda p: (SymmetryOp("I"), SymmetryOp("Case10Op", a2=p.a2))),
    CaseId(11, "d1=d2=d3, a1=0, a2=1, a3=0, a4=1, a5=0",
           lambda p: p.d1 == p.d2 == p.d3 and _z(p.a1) and p.a2 == 1.0
           and _z(p.a3) and p.a4 == 1.0 and _z(p.a5),
           lambda p: (SymmetryOp("UdV"), SymmetryOp("ExpA4WdV", a4=1.0),
                      SymmetryOp("I"), SymmetryOp("Q2"))),
    CaseId(12, "d1=d2=d3, a1=0, a2=0, a3=0, a4=1, a5=0",
           lambda p: p.d1 == p.d2 == p.d3 and _z(p.a1) and _z(p.a2)
           and _z(p.a3) and p.a4 == 1.0 and _z(p.a5),
           lambda p: (SymmetryOp("Case12_WdV_minus_WdW"),
                      SymmetryOp("Case12_UdV_plus_1mUdW"),
                      SymmetryOp("Case12_ExpMinusT"),
                      SymmetryOp("I"), xinf(heat_constant(1.0), p.d2))),
)

_PRINCIPAL = CaseId(0, "principal (all coefficient sets)",
                    lambda p: True, lambda p: (pt(), px()))


def admissible_ops(p: Params) -> list[tuple[CaseId, tuple[SymmetryOp, ...]]]:
    """Every satisfied catalog case with its operators.

    The principal translations always appear first (case number 0); the
    remaining entries list only each case's nontrivial extensions.
    """
    out = [(_PRINCIPAL, _PRINCIPAL.operators(p))]
    for case in CASES:
        if case.predicate(p):
            out.append((case, case.operators(p)))
    return out


# ---------------------------------------------------------------------------
# flows on solutions
# ---------------------------------------------------------------------------


def _full_fields(sol, t, x):
    vals = sol.evaluate(t, x) if hasattr(sol, "evaluate") else sol(t, x)
    shape = np.broadcast(np.asarray(t), np.asarray(x)).shape
    return tuple(
        np.zeros(shape) if f is None else np.asarray(f, dtype=float)
        for f in vals
    )


def flow(op: SymmetryOp, eps: float, sol) -> Solution:
    """Transformed solution under the finite flow of `op`.

    The pairing must be admissible: `op` has to belong to a catalog case
    satisfied by the solution's coefficient set (undefined components of
    the input are treated as identically zero).
    """
    params = getattr(sol, "params", None)
    if params is not None and not op.admissible_for(params):
        raise ConstraintError(
            f"operator {op.kind} is not admissible for params {params}"
        )

    if op.kind in ("Pt", "Px"):
        def evaluate(t, x):
            t = np.asarray(t, dtype=float)
            x = np.asarray(x, dtype=float)
            if op.kind == "Pt":
                return _full_fields(sol, t - eps, x)
            return _full_fields(sol, t, x - eps)
    else:
        def evaluate(t, x):
            t = np.asarray(t, dtype=float)
            x = np.asarray(x, dtype=float)
            u, v, w = _full_fields(sol, t, x)
            _, _, u2, v2, w2 = op.point_map(eps, t, x, u, v, w)
            z = np.zeros(np.broadcast(t, x).shape)
            return (u2 + z, v2 + z, w2 + z)

    base_key = getattr(sol, "key", "")
    return Solution(evaluate=evaluate, params=params,
                    key=f"{base_key}+{op.kind}({eps})" if base_key else "",
                    meta={"op": op.kind, "eps": eps})


def flow_group_check(op: SymmetryOp, eps1: float, eps2: float,
                     points, rel_tol: float = 1e-12) -> bool:
    """One-parameter group axioms on a point sample set.

    Checks flow(eps1) o flow(eps2) = flow(eps1 + eps2) and
    flow(0) = identity, entrywise within `rel_tol` relative.
    """
    t, x, u, v, w = (np.asarray(a, dtype=float) for a in points)

    def close(a, b):
        a = np.broadcast_arrays(a, b)[0]
        scale = 1.0 + np.maximum(np.abs(a), np.abs(np.asarray(b)))
        return bool(np.all(np.abs(a - b) <= rel_tol * scale))

    step2 = op.point_map(eps2, t, x, u, v, w)
    comp = op.point_map(eps1, *step2)
    direct = op.point_map(eps1 + eps2, t, x, u, v, w)
    ident = op.point_map(0.0, t, x, u, v, w)
    orig = (t, x, u, v, w)
    return all(close(a, b) for a, b in zip(comp, direct)) and all(
        close(a, b) for a, b in zip(ident, orig)
    )


def infinitesimal_consistency(op: SymmetryOp, points,
                              eps: float = 1e-6) -> float:
    """Max relative gap between (flow(eps) - id)/eps and the generator.

    Ties the implemented finite flows back to the catalog infinitesimals;
    only meaningful for field-direction operators.
    """
    if op.kind in ("Pt", "Px"):
        raise ConstraintError("translations have no field-direction generator")
    t, x, u, v, w = (np.asarray(a, dtype=float) for a in points)
    moved = op.point_map(eps, t, x, u, v, w)
    etas = op.eta(t, x, u, v, w)
    worst = 0.0
    for before, after, gen in zip((u, v, w), moved[2:], etas):
        fd = (after - before) / eps
        gap = np.abs(fd - gen) / (1.0 + np.abs(gen))
        worst = max(worst, float(np.max(gap)))
    return worst


def verify_flow_maps_solutions(op: SymmetryOp, eps: float, sol, window,
                               h: float, dt_over_h: float = 1.0):
    """Residual reports before and after the flow on the same window.

    `window` is (t, x_min, x_max).  A passing pair has after-norms bounded
    by a small multiple of the before-norms plus stencil truncation.
    """
    t, x_min, x_max = window
    params = sol.params
    n = int(round((x_max - x_min) / h)) + 1
    grid = calculus.SpaceGrid(x_min, x_max, n)
    dt = dt_over_h * grid.h
    before = calculus.pde_residual(params, sol, grid, t, dt)
    after = calculus.pde_residual(params, flow(op, eps, sol), grid, t, dt,
                                  components=("u", "v", "w"))
    return before, after
