"""Catalog of closed-form and semi-closed-form exact solutions.

Every builder returns a `FamilyInstance` (alias of `hgf.model.Solution`):
an immutable record bundling the evaluator, the coefficient set of the
system the family solves, its validity constraints, wave speed and
asymptotic endpoints.  Catalog keys (the CLI contract):

    fisher      scalar traveling front of the logistic equation (u only)
    fam40-*     three-parameter separable families, cases i / ii / iii
    semi35-*    front-shaped v, w with an injected numeric u-profile
    semi50/51   front-shaped u, w with an injected numeric v-profile
    tf63        one-parameter family of three-component fronts
    tf65        fixed-speed front family of the decoupled (a1 = 0) system

Semi-exact families take their numeric profile as an injected dependency
(any vectorized callable); integration policy lives in `hgf.reduction`.
Parameter choices that are mathematically exact but biologically invalid
(negative a2 or a5) construct fine and carry a warning instead of failing,
so residual tests can exercise them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConstraintError, DomainError
from .model import Params, Solution

FamilyInstance = Solution

SQRT6 = math.sqrt(6.0)
FISHER_SPEED = 5.0 / SQRT6


def _phi(arg):
    """The front shape 1 - tanh(arg); numerically stable for all arguments."""
    return 1.0 - np.tanh(arg)


@dataclass(frozen=True)
class TravelingFrame:
    """Wave frame omega = x - alpha t; invariant under the co-moving shift
    (t, x) -> (t + s, x + alpha s)."""

    alpha: float

    def omega(self, t, x):
        return np.asarray(x, dtype=float) - self.alpha * np.asarray(t,
                                                                    dtype=float)


@dataclass(frozen=True)
class TanhAnsatzParams:
    """Front template U = s1 (1-tanh(mu w))^k1, V = s2 (1-tanh(mu w))^k2,
    W = 1 - s3 (1-tanh(mu w))^k3.

    Connecting (U0, V0, 0) to (0, 0, 1) forces the endpoint constraints
    1 - 2^k1 s1 - a1 2^k2 s2 = 0 and 1 - 2^k3 s3 = 0.
    """

    sigma1: float
    sigma2: float
    sigma3: float
    k1: float
    k2: float
    k3: float
    mu: float

    def endpoint_defects(self, a1: float) -> tuple[float, float]:
        d1 = 1.0 - 2.0**self.k1 * self.sigma1 - a1 * 2.0**self.k2 * self.sigma2
        d2 = 1.0 - 2.0**self.k3 * self.sigma3
        return (d1, d2)


# ---------------------------------------------------------------------------
# scalar logistic front
# ---------------------------------------------------------------------------

_FISHER_PARAMS = Params(a1=0.0, a2=0.0, a3=0.0, a4=1.0, a5=0.0)


def _fisher_u(t, x):
    om = np.asarray(x, dtype=float) - FISHER_SPEED * np.asarray(t, dtype=float)
    return 0.25 * _phi(om / (2.0 * SQRT6)) ** 2


def fisher_tf() -> FamilyInstance:
    """Front u = (1/4)(1 - tanh(omega/(2 sqrt 6)))^2 at speed 5/sqrt(6).

    Defines the u component only; v and w are left undefined (treated as
    zero wherever kinetics are needed).
    """

    def evaluate(t, x):
        return (_fisher_u(t, x), None, None)

    return FamilyInstance(
        evaluate=evaluate,
        params=_FISHER_PARAMS,
        components=("u",),
        speed=FISHER_SPEED,
        endpoint_states=((1.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
        key="fisher",
        meta={"speed": FISHER_SPEED},
    )


def embed_fisher(params: Params | None = None) -> FamilyInstance:
    """The logistic front embedded as (u, 0, 0) in the full system.

    Valid for any coefficient set with d1 = 1: both remaining equations are
    annihilated by v = w = 0.
    """
    p = _FISHER_PARAMS if params is None else params
    if p.d1 != 1.0:
        raise ConstraintError("embed_fisher requires d1 = 1")

    def evaluate(t, x):
        u = _fisher_u(t, x)
        z = np.zeros_like(u)
        return (u, z, z.copy())

    return FamilyInstance(
        evaluate=evaluate,
        params=p,
        speed=FISHER_SPEED,
        endpoint_states=((1.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
        key="fisher-embedded",
    )


# ---------------------------------------------------------------------------
# tf63: one-parameter family of three-component fronts
# ---------------------------------------------------------------------------


def tf63_parameter_values(a1: float, delta: float, a3: float, d3: float) -> dict:
    """Derived wave speed and coefficients of the tf63 family.

    Requires delta > 0 and a1*delta < 1/2; the remaining coefficients are
    forced by the front shape:

        alpha = (5 - 4 a1 d) / sqrt(6 - 12 a1 d)
        d2    = (-3 - 5 d + 6 a1 d + 4 a1 d^2) / (d (-3 + 2 a1 d))
        a2    = (3 - 10 d + 6 a1 d + 8 a1 d^2) / (6 d (-3 + 2 a1 d))
        a4    = d3 / 3
        a5    = (5 - d3 + 6 a3 - 4 a1 d + 2 a1 d3 d) / (12 d)

    with d = delta.
    """
    if not delta > 0:
        raise ConstraintError("tf63 requires delta > 0 (v would be negative)")
    ad = a1 * delta
    if ad > 0.5:
        raise ConstraintError(
            "tf63 requires a1*delta <= 1/2 (steepness would be complex)"
        )
    if ad == 0.5:
        raise ConstraintError(
            "tf63 requires a1*delta < 1/2 (zero steepness, speed undefined)"
        )
    if abs(-3.0 + 2.0 * ad) < 1e-300:
        raise ConstraintError("tf63: a1*delta = 3/2 makes d2 singular")
    alpha = (5.0 - 4.0 * ad) / math.sqrt(6.0 - 12.0 * ad)
    den = delta * (-3.0 + 2.0 * ad)
    d2 = (-3.0 - 5.0 * delta + 6.0 * ad + 4.0 * ad * delta) / den
    a2 = (3.0 - 10.0 * delta + 6.0 * ad + 8.0 * ad * delta) / (6.0 * den)
    a4 = d3 / 3.0
    a5 = (5.0 - d3 + 6.0 * a3 - 4.0 * ad + 2.0 * ad * d3) / (12.0 * delta)
    return {"alpha": alpha, "d2": d2, "a2": a2, "a4": a4, "a5": a5,
            "mu": math.sqrt(1.0 - 2.0 * ad) / (2.0 * SQRT6)}


def _tf63_advisory_bounds(a1: float, delta: float, a3: float, d3: float) -> dict:
    """Companion inequalities as printed in the source catalog (advisory).

    The printed a3 bound points the opposite way from what direct
    nonnegativity of a5 requires, and the printed d3 bound excludes
    coefficient sets whose direct checks pass; both are therefore recorded
    but never enforced.
    """
    ad = a1 * delta
    bounds = {
        "a3_upper_printed": (-5.0 + 4.0 * ad + d3 - 2.0 * ad * d3) / 6.0,
        "d3_lower_printed": (5.0 - 4.0 * ad) / (1.0 - 2.0 * ad),
    }
    bounds["a3_ok_printed"] = a3 <= bounds["a3_upper_printed"]
    bounds["d3_ok_printed"] = d3 >= bounds["d3_lower_printed"]
    if delta > 1.0:
        a1_up = 1.0 / (2.0 * delta)
    elif delta >= 0.3:
        a1_up = (-3.0 + 10.0 * delta) / (2.0 * delta * (3.0 + 4.0 * delta))
    else:
        a1_up = None
    bounds["a1_upper_printed"] = a1_up
    bounds["a1_ok_printed"] = None if a1_up is None else a1 <= a1_up
    return bounds


def make_tf63(a1: float, delta: float, a3: float = 1.0,
              d3: float = 3.0) -> FamilyInstance:
    """One-parameter front family connecting (1-2*a1*delta, 2*delta, 0)
    to (0, 0, 1).

    The first diffusivity is normalized to 1; d2, a2, a4, a5 and the speed
    are forced by (a1, delta, a3, d3).  d2 <= 0 is a hard error; negative
    a2 or a5 only warns (exactness is unaffected, the biological reading
    is not).
    """
    vals = tf63_parameter_values(a1, delta, a3, d3)
    if not vals["d2"] > 0:
        raise ConstraintError(
            f"tf63: derived d2 = {vals['d2']} is not positive"
        )
    warnings = []
    if vals["a2"] < 0:
        warnings.append(
            f"derived a2 = {vals['a2']} < 0: solution exact, biology invalid"
        )
    if vals["a5"] < 0:
        warnings.append(
            f"derived a5 = {vals['a5']} < 0: solution exact, biology invalid"
        )
    advisory = _tf63_advisory_bounds(a1, delta, a3, d3)
    direct_ok = vals["a2"] >= 0 and vals["a5"] >= 0
    printed_ok = bool(advisory["a3_ok_printed"] and advisory["d3_ok_printed"])
    if direct_ok != printed_ok:
        warnings.append(
            "advisory printed bounds disagree with directly evaluated "
            "coefficient signs; direct evaluation is authoritative"
        )
    p = Params(a1=a1, a2=vals["a2"], a3=a3, a4=vals["a4"], a5=vals["a5"],
               d1=1.0, d2=vals["d2"], d3=d3)
    frame = TravelingFrame(vals["alpha"])
    mu = vals["mu"]
    amp = 0.25 * (1.0 - 2.0 * a1 * delta)
    shape = TanhAnsatzParams(sigma1=amp, sigma2=delta, sigma3=0.5,
                             k1=2.0, k2=1.0, k3=1.0, mu=mu)

    def evaluate(t, x):
        T = np.tanh(mu * frame.omega(t, x))
        u = amp * (1.0 - T) ** 2
        v = delta - delta * T
        w = 0.5 + 0.5 * T
        return (u, v, w)

    left = (1.0 - 2.0 * a1 * delta, 2.0 * delta, 0.0)
    return FamilyInstance(
        evaluate=evaluate,
        params=p,
        speed=frame.alpha,
        endpoint_states=(left, (0.0, 0.0, 1.0)),
        warnings=tuple(warnings),
        key="tf63",
        meta={"a1": a1, "delta": delta, "a3": a3, "d3": d3, **vals,
              "advisory_bounds": advisory, "tanh_shape": shape},
    )


# ---------------------------------------------------------------------------
# tf65: fixed-speed front of the decoupled system
# ---------------------------------------------------------------------------


def make_tf65(d: float) -> FamilyInstance:
    """Front family of the a1 = 0 system

        u_t = u_xx + u(1-u)
        v_t = (1/2) v_xx + v(1-u) + u w
        w_t = d w_xx + ((5-d)/6) w(1-w) - (5/3) u w

    at the fixed speed 5/sqrt(6), connecting (1, 8(3d-5)/(3(d-5)), 0) to
    the origin.  Admissible for 0 < d <= 5/3; d = 5/3 collapses v and w to
    zero and leaves the scalar logistic front.
    """
    if not (0.0 < d <= 5.0 / 3.0):
        raise ConstraintError("tf65 requires 0 < d <= 5/3")
    amp = (3.0 * d - 5.0) / (3.0 * (d - 5.0))
    p = Params(a1=0.0, a2=1.0, a3=(5.0 - d) / 6.0, a4=5.0 / 3.0, a5=0.0,
               d1=1.0, d2=0.5, d3=d)
    mu = 1.0 / (2.0 * SQRT6)
    alpha = FISHER_SPEED

    def evaluate(t, x):
        om = np.asarray(x, dtype=float) - alpha * np.asarray(t, dtype=float)
        T = np.tanh(mu * om)
        ph = 1.0 - T
        u = 0.25 * ph**2
        v = amp * ph**3
        w = 1.5 * amp * (1.0 - T**2)
        return (u, v, w)

    return FamilyInstance(
        evaluate=evaluate,
        params=p,
        speed=alpha,
        endpoint_states=((1.0, 8.0 * amp, 0.0), (0.0, 0.0, 0.0)),
        key="tf65",
        meta={"d": d, "v_amplitude": amp},
    )


# ---------------------------------------------------------------------------
# fam40: separable three-parameter families (cases i / ii / iii)
# ---------------------------------------------------------------------------


def fam40_restrictions(a1: float, a4: float) -> dict:
    """Positivity restrictions of the case-(i) family.

    Components stay nonnegative on x in (0, inf), t >= 0 when beta takes
    the balanced value sqrt((1-a4)/(a1(1+a1 a4))), a4 < 1, delta1 > 1 and
    delta2 < (1+a1)/(1+a1 a4).
    """
    if a1 <= 0 or not a4 < 1:
        raise ConstraintError(
            "positivity restrictions need a1 > 0 and a4 < 1"
        )
    return {
        "beta": math.sqrt((1.0 - a4) / (a1 * (1.0 + a1 * a4))),
        "delta1_min": 1.0,
        "delta2_max": (1.0 + a1) / (1.0 + a1 * a4),
    }


def _fam40_case(case: str, a1: float, a4, a3):
    """Resolve case wiring: returns (a3_eff, a4_eff, growth rate r)."""
    if a1 == 0.0:
        raise ConstraintError("fam40 requires a1 != 0")
    if case == "i":
        if a3 is not None and a3 != 1.0:
            raise ConstraintError("fam40-i fixes a3 = 1")
        if a4 is None:
            raise ConstraintError("fam40-i needs a4")
        return 1.0, float(a4), 1.0
    if case == "ii":
        if a3 is not None and a3 != 0.0:
            raise ConstraintError("fam40-ii fixes a3 = 0")
        if a4 is None:
            raise ConstraintError("fam40-ii needs a4")
        return 0.0, float(a4), float(a4)
    if case == "iii":
        if a3 is None or a3 == 0.0:
            raise ConstraintError("fam40-iii needs a3 != 0")
        a4_eff = 1.0 + a1 + a3
        if a4 is not None and abs(a4 - a4_eff) > 1e-12 * max(1.0, abs(a4_eff)):
            raise ConstraintError(
                f"fam40-iii forces a4 = 1 + a1 + a3 = {a4_eff}, got {a4}"
            )
        return float(a3), a4_eff, 1.0 + a1
    raise ConstraintError(f"unknown fam40 case {case!r}")


def make_fam40(case: str, a1: float, a4: float | None, beta: float,
               delta1: float, delta2: float, a3: float | None = None,
               d3: float = 1.0) -> FamilyInstance:
    """Separable family u = e^(-beta a1 x) * U(t), v = V(t) - u/a1, w = W(t).

    Case wiring: (i) a3 = 1, (ii) a3 = 0, (iii) a4 = 1 + a1 + a3 with
    a3 != 0.  delta1, delta2 must be positive; the w-diffusivity d3 is free
    because w depends on t only.  The evaluator fails with the critical
    time when the shared denominator 1 - delta1 + delta1 e^(r t) is not
    positive (possible only for t < 0 with delta1 > 1).
    """
    if not (delta1 > 0 and delta2 > 0):
        raise ConstraintError("fam40 requires delta1 > 0 and delta2 > 0")
    a3_eff, a4_eff, r = _fam40_case(case, a1, a4, a3)
    p = Params(a1=a1, a2=1.0, a3=a3_eff, a4=a4_eff, a5=a1 * a4_eff,
               d1=1.0, d2=1.0, d3=d3)
    growth = 1.0 + beta * beta * a1 * a1
    ba1 = beta * a1

    if case == "i":
        kappa = (1.0 + a1) / (1.0 + a1 * a4_eff)
        cV = (1.0 + a1) / (a1 * (1.0 + a1 * a4_eff))
        cW = (1.0 - a4_eff) / (1.0 + a1 * a4_eff)
    elif case == "ii":
        kappa = 1.0 / a4_eff
        cV = 1.0 / a1
        cW = (1.0 - a4_eff) * (delta1 - 1.0) / a1
    else:
        kappa = 1.0 / (1.0 + a1)
        cV = 1.0 / a1
        cW = 1.0 - delta1

    def _denparts(t):
        t = np.asarray(t, dtype=float)
        m = (1.0 - delta1) * np.exp(-r * t) + delta1
        if np.any(m <= 0):
            tcrit = math.log((delta1 - 1.0) / delta1) / r
            raise DomainError(
                f"fam40 denominator vanishes at t = {tcrit}; "
                f"requested times must stay above it"
            )
        return m, r * t + np.log(m)  # (e^{-rt} D, log D)

    def evaluate(t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        m, logD = _denparts(t)
        u = delta2 * np.exp(growth * t - ba1 * x - kappa * logD)
        g = delta1 / m
        if case == "i":
            v = cV * g - u / a1
            w = cW * g + np.zeros_like(u)
        elif case == "ii":
            v = cV * g - u / a1
            w = cW * np.exp(-logD) + np.zeros_like(u)
        else:
            v = cV * g - u / a1
            w = cW * np.exp(-logD) + np.zeros_like(u)
        return (u, v, w)

    t_limit = None
    if case == "i":
        u_amp = delta2 * delta1**-kappa

        def t_limit(x):
            x = np.asarray(x, dtype=float)
            decay = np.exp(-ba1 * x)
            u = u_amp * decay
            v = cV - (u_amp / a1) * decay
            w = cW + np.zeros_like(u)
            return (u, v, w)

    return FamilyInstance(
        evaluate=evaluate,
        params=p,
        t_limit=t_limit,
        key=f"fam40-{case}",
        meta={"case": case, "a1": a1, "a4": a4_eff, "a3": a3_eff,
              "beta": beta, "delta1": delta1, "delta2": delta2,
              "growth_exponent": growth, "kappa": kappa},
    )


# ---------------------------------------------------------------------------
# semi-exact families: closed tanh parts plus one injected numeric profile
# ---------------------------------------------------------------------------


def semi35_case(case: str, a1: float, a4: float | None,
                a3: float | None = None) -> dict:
    """Closed data of the semi35 cases: speed, linear-equation coefficients
    kappa1/kappa2 and the closed V, W profiles."""
    if a1 == 0.0:
        raise ConstraintError("semi35 requires a1 != 0")
    if case == "35-i":
        if a4 is None:
            raise ConstraintError("semi35-i needs a4")
        a3_eff, a4_eff = 1.0, float(a4)
        kappa1 = (1.0 + a1) / (4.0 * (1.0 + a1 * a4_eff))
        kappa2 = 1.0
        cV = (1.0 + a1) / (4.0 * a1 * (1.0 + a1 * a4_eff))
        cW = (1.0 - a4_eff) / (4.0 * (1.0 + a1 * a4_eff))

        def V(om):
            return cV * _phi(kappa2 * np.asarray(om) / (2.0 * SQRT6)) ** 2

        def W(om):
            return cW * _phi(kappa2 * np.asarray(om) / (2.0 * SQRT6)) ** 2

    elif case == "35-ii":
        if a4 is None or a4 <= 0:
            raise ConstraintError("semi35-ii needs a4 > 0")
        a3_eff, a4_eff = 0.0, float(a4)
        kappa1 = 0.25
        kappa2 = math.sqrt(a4_eff)

        def V(om):
            return _phi(kappa2 * np.asarray(om) / (2.0 * SQRT6)) ** 2 / (4.0 * a1)

        def W(om):
            ph = _phi(kappa2 * np.asarray(om) / (2.0 * SQRT6))
            return (1.0 - a4_eff) / (4.0 * a1) * (ph**2 - 4.0)

    elif case == "35-iii":
        if a3 is None or a3 == 0.0:
            raise ConstraintError("semi35-iii needs a3 != 0")
        if 1.0 + a1 <= 0:
            raise ConstraintError("semi35-iii needs 1 + a1 > 0")
        a3_eff = float(a3)
        a4_eff = 1.0 + a1 + a3_eff
        kappa1 = 0.25
        kappa2 = math.sqrt(1.0 + a1)

        def V(om):
            return _phi(kappa2 * np.asarray(om) / (2.0 * SQRT6)) ** 2 / (4.0 * a1)

        def W(om):
            return 1.0 - 0.25 * _phi(kappa2 * np.asarray(om) / (2.0 * SQRT6)) ** 2

    else:
        raise ConstraintError(f"unknown semi35 case {case!r}")
    alpha = FISHER_SPEED * kappa2
    return {"a3": a3_eff, "a4": a4_eff, "alpha": alpha,
            "kappa1": kappa1, "kappa2": kappa2, "V": V, "W": W}


def w_profile_50(a4: float) -> Callable:
    """Closed w-profile paired with the logistic u when d = a3 = 1."""

    def W(om):
        return 0.25 * (1.0 - a4) * _phi(np.asarray(om) / (2.0 * SQRT6)) ** 2

    return W


def w_profile_51() -> Callable:
    """Closed w-profile paired with the logistic u when d = 1, a4 = 1 + a3."""

    def W(om):
        return 1.0 - 0.25 * _phi(np.asarray(om) / (2.0 * SQRT6)) ** 2

    return W


def _check_profile_window(profile, window):
    dom = getattr(profile, "domain", None)
    if window is not None and dom is not None:
        lo, hi = min(window), max(window)
        if lo < dom[0] or hi > dom[1]:
            raise DomainError(
                f"profile domain {dom} does not cover the requested "
                f"window ({lo}, {hi})"
            )


def make_semi_exact(case: str, profile: Callable, *, a1: float | None = None,
                    a4: float | None = None, a3: float | None = None,
                    beta: float = 0.0, gamma: float = 0.0,
                    window=None) -> FamilyInstance:
    """Assemble a semi-exact family from closed tanh parts and a numeric
    profile.

    For the 35-cases `profile` is the u-profile U(omega) of the linear
    equation L36; for cases 50/51 it is the v-profile V(omega) of L52.
    The profile is injected, not solved here: integrate it with
    `hgf.reduction` (see `reduction.semi_exact_family` for the checked
    one-call builder).  A profile that is identically zero while the
    linear equation's forcing is not gets rejected rather than silently
    zeroed.
    """
    _check_profile_window(profile, window)
    if case in ("35-i", "35-ii", "35-iii"):
        cd = semi35_case(case, a1, a4, a3)
        alpha = cd["alpha"]
        V, W = cd["V"], cd["W"]
        p = Params(a1=a1, a2=1.0, a3=cd["a3"], a4=cd["a4"],
                   a5=a1 * cd["a4"], d1=1.0, d2=1.0, d3=1.0)
        ba1 = beta * a1

        def evaluate(t, x):
            t = np.asarray(t, dtype=float)
            x = np.asarray(x, dtype=float)
            om = x - alpha * t
            up = np.exp(-ba1 * t) * np.asarray(profile(om), dtype=float)
            return (up, V(om) - up / a1, W(om) + np.zeros_like(up))

        meta = {"case": case, "a1": a1, "a4": cd["a4"], "a3": cd["a3"],
                "beta": beta, "alpha": alpha,
                "kappa1": cd["kappa1"], "kappa2": cd["kappa2"]}
        return FamilyInstance(evaluate=evaluate, params=p, speed=alpha,
                              key=f"semi{case}", meta=meta)

    if case in ("50", "51"):
        if case == "50":
            if a4 is None:
                raise ConstraintError("semi50 needs a4")
            a3_eff, a4_eff = 1.0, float(a4)
            W = w_profile_50(a4_eff)
        else:
            if a3 is None:
                raise ConstraintError("semi51 needs a3")
            a3_eff = float(a3)
            a4_eff = 1.0 + a3_eff
            W = w_profile_51()
        alpha = FISHER_SPEED
        p = Params(a1=0.0, a2=1.0, a3=a3_eff, a4=a4_eff, a5=0.0,
                   d1=1.0, d2=1.0, d3=1.0)

        # a zero v-profile solves the linear equation only when the
        # forcing U (W - beta) vanishes identically
        probe = np.linspace(-30.0, 30.0, 601)
        if window is not None:
            probe = np.linspace(min(window), max(window), 601)
        pv = np.asarray(profile(probe), dtype=float)
        if np.max(np.abs(pv)) == 0.0:
            forcing = _fisher_u(0.0, probe) * (W(probe) - beta)
            if np.max(np.abs(forcing)) > 1e-12:
                raise ConstraintError(
                    "zero v-profile demanded but the linear equation's "
                    "forcing U*(W - beta) is nonzero"
                )

        def evaluate(t, x):
            t = np.asarray(t, dtype=float)
            x = np.asarray(x, dtype=float)
            om = x - alpha * t
            u = _fisher_u(t, x)
            shift = beta * t + gamma * np.exp(t)
            v = np.asarray(profile(om), dtype=float) + shift * u - gamma * np.exp(t)
            return (u, v, W(om) + np.zeros_like(u))

        meta = {"case": case, "a3": a3_eff, "a4": a4_eff, "beta": beta,
                "gamma": gamma, "alpha": alpha}
        return FamilyInstance(evaluate=evaluate, params=p, speed=alpha,
                              key=f"semi{case}", meta=meta)

    raise ConstraintError(f"unknown semi-exact case {case!r}")


# ---------------------------------------------------------------------------
# catalog metadata (CLI contract)
# ---------------------------------------------------------------------------

CATALOG = {
    "fisher": {
        "params": [],
        "constraints": "none; defines u only, speed 5/sqrt(6)",
    },
    "fam40-i": {
        "params": ["a1", "a4", "beta", "delta1", "delta2"],
        "constraints": "a1 != 0, delta1 > 0, delta2 > 0; a3 = 1, a5 = a1*a4",
    },
    "fam40-ii": {
        "params": ["a1", "a4", "beta", "delta1", "delta2"],
        "constraints": "a1 != 0, delta1 > 0, delta2 > 0; a3 = 0, a5 = a1*a4",
    },
    "fam40-iii": {
        "params": ["a1", "a3", "beta", "delta1", "delta2"],
        "constraints": "a1 != 0, a3 != 0, a4 = 1+a1+a3, a5 = a1*a4",
    },
    "semi35-i": {
        "params": ["a1", "a4", "beta"],
        "constraints": "a1 != 0; numeric u-profile; a3 = 1, d = 1",
        "profile": "L36",
    },
    "semi35-ii": {
        "params": ["a1", "a4", "beta"],
        "constraints": "a1 != 0, a4 > 0; numeric u-profile; a3 = 0, d = 1",
        "profile": "L36",
    },
    "semi35-iii": {
        "params": ["a1", "a3", "beta"],
        "constraints": "a1 != 0, a3 != 0, a4 = 1+a1+a3; numeric u-profile",
        "profile": "L36",
    },
    "semi50": {
        "params": ["a4", "beta", "gamma"],
        "constraints": "numeric v-profile; a1 = 0, a2 = 1, a3 = 1, d = 1",
        "profile": "L52",
    },
    "semi51": {
        "params": ["a3", "beta", "gamma"],
        "constraints": "numeric v-profile; a1 = 0, a2 = 1, a4 = 1+a3, d = 1",
        "profile": "L52",
    },
    "tf63": {
        "params": ["a1", "delta", "a3", "d3"],
        "constraints": "delta > 0, a1*delta < 1/2, derived d2 > 0; "
                       "connects (1-2*a1*delta, 2*delta, 0) to (0, 0, 1)",
    },
    "tf65": {
        "params": ["d"],
        "constraints": "0 < d <= 5/3; fixed speed 5/sqrt(6)",
    },
}
