"""Command-line front end.

Subcommands: catalog, eval, residual, simulate, speed, symmetry, reduce.
Field data goes to CSV (header ``t,x,u,v,w``, 17 significant digits, empty
cells for components a family does not define); structured results go to
JSON reports validating against `REPORT_SCHEMA`.

Exit codes: 0 success, 1 constraint/validation error (the message names
the violated constraint), 2 numerical failure (blow-up, missing level
crossing, step underflow).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import calculus, model, reduction, simulator, solutions, symmetry
from .errors import ConstraintError, NumericalError

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "hgf report",
    "type": "object",
    "additionalProperties": False,
    "required": ["command", "inputs", "results", "warnings"],
    "properties": {
        "command": {"type": "string"},
        "inputs": {"type": "object"},
        "results": {"type": "object"},
        "residual": {
            "type": "object",
            "additionalProperties": False,
            "required": ["linf", "l2"],
            "properties": {
                "linf": {"type": "array",
                         "items": {"type": ["number", "null"]}},
                "l2": {"type": "array",
                       "items": {"type": ["number", "null"]}},
                "order": {"type": ["array", "null"],
                          "items": {"type": ["number", "null"]}},
                "h": {"type": "number"},
                "dt": {"type": "number"},
                "history": {"type": "array"},
            },
        },
        "speed": {"type": "object"},
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
}

CONFIG_KEYS = {"params", "family", "grid", "time", "bc", "seed"}
PARAM_KEYS = ("a1", "a2", "a3", "a4", "a5", "d1", "d2", "d3")


def _finite_or_none(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def residual_block(report: calculus.ResidualReport) -> dict:
    block = {
        "linf": [_finite_or_none(v) for v in report.linf],
        "l2": [_finite_or_none(v) for v in report.l2],
        "h": report.h,
        "dt": report.dt,
    }
    if report.order_estimate is not None:
        block["order"] = [_finite_or_none(o) for o in report.order_estimate]
    if report.history:
        block["history"] = [
            {"h": h, "dt": dt,
             "linf": [_finite_or_none(v) for v in linf],
             "l2": [_finite_or_none(v) for v in l2]}
            for h, dt, linf, l2 in report.history
        ]
    return block


def make_report(command: str, inputs: dict, results: dict,
                residual: dict | None = None, speed: dict | None = None,
                warnings=()) -> dict:
    report = {
        "command": command,
        "inputs": inputs,
        "results": results,
        "warnings": list(warnings),
    }
    if residual is not None:
        report["residual"] = residual
    if speed is not None:
        report["speed"] = speed
    return report


def validate_report(report: dict) -> None:
    """Validate against REPORT_SCHEMA (jsonschema when available)."""
    try:
        import jsonschema
    except ImportError:  # fall back to the structural essentials
        missing = {"command", "inputs", "results", "warnings"} - set(report)
        if missing:
            raise ConstraintError(f"report missing keys {sorted(missing)}")
        unknown = set(report) - set(REPORT_SCHEMA["properties"])
        if unknown:
            raise ConstraintError(f"report has unknown keys {sorted(unknown)}")
        return
    jsonschema.validate(report, REPORT_SCHEMA)


def _emit_report(report: dict, out: str | None) -> None:
    validate_report(report)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# CSV I/O
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def write_fields_csv(fh, t, x, vals) -> int:
    """Rows t,x,u,v,w; undefined components print as empty cells."""
    cols = [None if v is None else np.broadcast_to(
        np.asarray(v, dtype=float), np.shape(x)) for v in vals]
    rows = 0
    for i in range(len(x)):
        cells = [_fmt(t), _fmt(x[i])]
        cells.extend("" if c is None else _fmt(c[i]) for c in cols)
        fh.write(",".join(cells) + "\n")
        rows += 1
    return rows


def write_snapshots_csv(path, snapshots) -> int:
    rows = 0
    with open(path, "w") as fh:
        fh.write("t,x,u,v,w\n")
        for s in snapshots:
            rows += write_fields_csv(fh, s.t, s.grid.x(), (s.u, s.v, s.w))
    return rows


def read_snapshots_csv(path) -> list[calculus.FieldState]:
    """Rebuild snapshot states from a ``t,x,u,v,w`` CSV."""
    groups: dict[float, list] = {}
    order: list[float] = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "t,x,u,v,w":
            raise ConstraintError(f"unexpected CSV header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            t = float(parts[0])
            vals = [float(p) if p else math.nan for p in parts[1:5]]
            if t not in groups:
                groups[t] = []
                order.append(t)
            groups[t].append(vals)
    snapshots = []
    for t in order:
        arr = np.asarray(groups[t])
        x = arr[:, 0]
        grid = calculus.SpaceGrid(float(x[0]), float(x[-1]), len(x))
        if not np.allclose(grid.x(), x, rtol=0, atol=1e-9 * max(1, abs(x[-1]))):
            raise ConstraintError(f"snapshot at t = {t} is not on a uniform grid")
        snapshots.append(calculus.FieldState(
            grid=grid, t=t, u=arr[:, 1].copy(), v=arr[:, 2].copy(),
            w=arr[:, 3].copy()))
    return snapshots


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------


def load_config(path) -> dict:
    cfg = json.loads(Path(path).read_text())
    if not isinstance(cfg, dict):
        raise ConstraintError("config must be a JSON object")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConstraintError(f"config has unknown keys {sorted(unknown)}")
    if "params" in cfg:
        bad = set(cfg["params"]) - set(PARAM_KEYS)
        if bad:
            raise ConstraintError(f"config params has unknown keys {sorted(bad)}")
    if "grid" in cfg:
        bad = set(cfg["grid"]) - {"x_min", "x_max", "n"}
        if bad:
            raise ConstraintError(f"config grid has unknown keys {sorted(bad)}")
    if "time" in cfg:
        bad = set(cfg["time"]) - {"t0", "t_end", "cfl_safety", "snapshot_every"}
        if bad:
            raise ConstraintError(f"config time has unknown keys {sorted(bad)}")
    if "bc" in cfg:
        bad = set(cfg["bc"]) - {"kind", "left", "right"}
        if bad:
            raise ConstraintError(f"config bc has unknown keys {sorted(bad)}")
    if "family" in cfg:
        fam = cfg["family"]
        if "key" not in fam:
            raise ConstraintError("config family needs a 'key'")
        if fam["key"] not in solutions.CATALOG:
            raise ConstraintError(f"unknown family key {fam['key']!r}")
    return cfg


# ---------------------------------------------------------------------------
# family construction from flags / config
# ---------------------------------------------------------------------------

_FAMILY_FLAGS = ("a1", "a2", "a3", "a4", "a5", "d", "d3", "delta", "beta",
                 "gamma", "delta1", "delta2")
_PROFILE_FLAGS = ("profile_lo", "profile_hi", "profile_step", "anchor",
                  "y0", "dy0")


def _merge_family_args(args, config) -> tuple[str, dict, list[str]]:
    """Family key and parameters; flags win over config with a warning."""
    warnings: list[str] = []
    fam_cfg = dict(config.get("family", {})) if config else {}
    key = getattr(args, "family", None) or fam_cfg.pop("key", None)
    if key is None:
        raise ConstraintError("no family given (flag --family or config)")
    if key not in solutions.CATALOG:
        raise ConstraintError(f"unknown family key {key!r}")
    params = {}
    for name in _FAMILY_FLAGS + _PROFILE_FLAGS:
        if name in fam_cfg:
            params[name] = fam_cfg.pop(name)
    fam_cfg.pop("key", None)
    if fam_cfg:
        raise ConstraintError(
            f"config family has unknown keys {sorted(fam_cfg)}")
    for name in _FAMILY_FLAGS + _PROFILE_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            if name in params and params[name] != val:
                warnings.append(
                    f"flag --{name.replace('_', '-')} = {val} overrides "
                    f"config value {params[name]}"
                )
            params[name] = val
    return key, params, warnings


def build_family(key: str, fp: dict):
    """Instantiate a catalog family from a parameter dict."""

    def need(*names):
        missing = [n for n in names if fp.get(n) is None]
        if missing:
            raise ConstraintError(
                f"family {key} needs parameters {missing}"
            )
        return [fp[n] for n in names]

    if key == "fisher":
        return solutions.fisher_tf()
    if key == "tf63":
        a1, delta = need("a1", "delta")
        return solutions.make_tf63(a1, delta, a3=fp.get("a3", 1.0),
                                   d3=fp.get("d3", 3.0))
    if key == "tf65":
        (d,) = need("d")
        return solutions.make_tf65(d)
    if key.startswith("fam40-"):
        case = key.split("-", 1)[1]
        a1, beta, d1v, d2v = need("a1", "beta", "delta1", "delta2")
        return solutions.make_fam40(case, a1, fp.get("a4"), beta, d1v, d2v,
                                    a3=fp.get("a3"), d3=fp.get("d3", 1.0))
    if key.startswith("semi"):
        case = key[4:]
        lo = fp.get("profile_lo", -25.0)
        hi = fp.get("profile_hi", 25.0)
        step = fp.get("profile_step", 5e-3)
        anchor = fp.get("anchor", lo)
        y0 = (fp.get("y0", 1.0), fp.get("dy0", 0.0))
        if case.startswith("35"):
            a1, beta = need("a1", "beta")
            fam, _ = reduction.semi_exact_family(
                case, a1=a1, a4=fp.get("a4"), a3=fp.get("a3"), beta=beta,
                window=(lo, hi), step=step, y0=y0, anchor=anchor)
        else:
            fam, _ = reduction.semi_exact_family(
                case, a4=fp.get("a4"), a3=fp.get("a3"),
                beta=fp.get("beta", 0.0), gamma=fp.get("gamma", 0.0),
                window=(lo, hi), step=step, y0=y0, anchor=anchor)
        return fam
    raise ConstraintError(f"unknown family key {key!r}")


def _default_window(key: str, fam, t: float):
    if key.startswith("fam40"):
        return (0.0, 10.0)
    if key.startswith("semi"):
        sp = fam.speed or 0.0
        return (-20.0 + sp * t, 20.0 + sp * t)
    return (-30.0, 30.0)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_catalog(args) -> int:
    if args.json:
        report = make_report(
            "catalog", {}, {
                "families": solutions.CATALOG,
                "symmetry_cases": [
                    {"case": c.case, "label": c.label} for c in symmetry.CASES
                ],
            })
        _emit_report(report, args.out)
        return 0
    print("solution families:")
    for key, info in solutions.CATALOG.items():
        params = ", ".join(info["params"]) or "-"
        print(f"  {key:<12} params: {params:<32} {info['constraints']}")
    print("\nsymmetry cases (beyond the principal translations Pt, Px):")
    for c in symmetry.CASES:
        print(f"  case {c.case:>2}: {c.label}")
    return 0


def _cmd_eval(args, config) -> int:
    key, fp, warns = _merge_family_args(args, config)
    fam = build_family(key, fp)
    if args.n < 1:
        raise ConstraintError("--n must be >= 1")
    x = np.linspace(args.xmin, args.xmax, args.n)
    vals = fam.evaluate(args.t, x)
    vals = tuple(None if v is None else np.broadcast_to(
        np.asarray(v, float), x.shape) for v in vals)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("t,x,u,v,w\n")
        write_fields_csv(out, args.t, x, vals)
    finally:
        if args.out:
            out.close()
    for w in (*warns, *fam.warnings):
        print(f"warning: {w}", file=sys.stderr)
    return 0


def _cmd_residual(args, config) -> int:
    key, fp, warns = _merge_family_args(args, config)
    fam = build_family(key, fp)
    t = args.t
    window = tuple(args.window) if args.window else _default_window(key, fam, t)
    if args.refine:
        h_seq = args.h_seq or [4e-3, 2e-3, 1e-3]
        rep = calculus.refinement_study(fam.params, fam,
                                        (t, window[0], window[1]), h_seq)
    else:
        h = args.h or 2e-3
        dt = args.dt or h
        n = int(round((window[1] - window[0]) / h)) + 1
        grid = calculus.SpaceGrid(window[0], window[1], n)
        rep = calculus.pde_residual(fam.params, fam, grid, t, dt)
    inputs = {"family": key, "family_params": fam.meta,
              "t": t, "window": list(window)}
    results = {"params": {k: getattr(fam.params, k) for k in PARAM_KEYS},
               "components": list(fam.components)}
    report = make_report("residual", _jsonable(inputs), _jsonable(results),
                         residual=residual_block(rep),
                         warnings=(*warns, *fam.warnings))
    _emit_report(report, args.out)
    return 0


def _bc_from_config(cfg_bc, fam) -> simulator.BoundaryCondition:
    if cfg_bc is None:
        if fam is not None and fam.endpoint_states is not None:
            return simulator.dirichlet_at_endpoints(fam)
        return simulator.BoundaryCondition("neumann-zero")
    kind = cfg_bc.get("kind")
    if kind == "dirichlet":
        return simulator.BoundaryCondition(
            "dirichlet", left=tuple(cfg_bc["left"]),
            right=tuple(cfg_bc["right"]))
    if kind == "neumann-zero":
        return simulator.BoundaryCondition("neumann-zero")
    if kind == "pinned-to-exact":
        if fam is None:
            raise ConstraintError("pinned-to-exact bc needs a family")
        return simulator.BoundaryCondition("pinned-to-exact", family=fam)
    raise ConstraintError(f"unknown bc kind {kind!r}")


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    key, fp, warns = _merge_family_args(args, config)
    fam = build_family(key, fp)
    if "grid" not in config or "time" not in config:
        raise ConstraintError("simulate config needs 'grid' and 'time' blocks")
    g = config["grid"]
    grid = calculus.SpaceGrid(g["x_min"], g["x_max"], int(g["n"]))
    tm = config["time"]
    if "params" in config:
        given = model.Params(**config["params"])
        for k in PARAM_KEYS:
            if not math.isclose(getattr(given, k), getattr(fam.params, k),
                                rel_tol=1e-12, abs_tol=0.0):
                warns = [*warns,
                         f"config params.{k} = {getattr(given, k)} differs "
                         f"from the family-induced value "
                         f"{getattr(fam.params, k)}; the family wins"]
                break
    cfg = simulator.SimConfig(
        params=fam.params, grid=grid, t_end=tm["t_end"], initial=fam,
        t0=tm.get("t0", 0.0), cfl_safety=tm.get("cfl_safety", 0.4),
        bc=_bc_from_config(config.get("bc"), fam),
        snapshot_every=tm.get("snapshot_every", 100))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    run = simulator.run(cfg)
    rows = write_snapshots_csv(outdir / "snapshots.csv", run.snapshots)
    results = {
        "steps": run.steps, "dt": run.dt, "snapshots": len(run.snapshots),
        "csv_rows": rows, "rhs_evaluations": run.rhs_evaluations,
        "params": {k: getattr(fam.params, k) for k in PARAM_KEYS},
    }
    inputs = {"config": str(args.config), "family": key,
              "grid": {"x_min": grid.x_min, "x_max": grid.x_max,
                       "n": grid.n, "h": grid.h},
              "time": dict(tm), "seed": config.get("seed")}
    report = make_report("simulate", _jsonable(inputs), _jsonable(results),
                         warnings=(*warns, *fam.warnings))
    _emit_report(report, str(outdir / "report.json"))
    if not args.quiet:
        print(f"wrote {outdir / 'snapshots.csv'} ({rows} rows) and "
              f"{outdir / 'report.json'}")
    return 0


def _cmd_speed(args) -> int:
    rundir = Path(args.run)
    snaps = read_snapshots_csv(rundir / "snapshots.csv")
    fit_window = tuple(args.fit_window) if args.fit_window else None
    est = simulator.measure_front_speed(snaps, args.component, args.level,
                                        fit_window=fit_window)
    warns = [] if est.reliable else [
        f"fit quality r^2 = {est.r_squared} below 0.999: estimate unreliable"
    ]
    inputs = {"run": str(rundir), "component": args.component,
              "level": args.level, "fit_window": list(est.fit_window),
              "snapshots": len(snaps)}
    report = make_report("speed", _jsonable(inputs),
                         {"n_snapshots": len(snaps)},
                         speed=_jsonable(est.as_dict()), warnings=warns)
    _emit_report(report, args.out)
    return 0


def _load_params_file(path) -> dict:
    """A params JSON file: either the bare eight-coefficient object or a
    full run-config containing a `params` block."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ConstraintError("params file must be a JSON object")
    if "params" in data:
        data = load_config(path).get("params", {})
    bad = set(data) - set(PARAM_KEYS)
    if bad:
        raise ConstraintError(f"params file has unknown keys {sorted(bad)}")
    return data


def _params_from_args(args, config) -> tuple[model.Params, list[str]]:
    warns: list[str] = []
    vals = dict(config.get("params", {})) if config else {}
    if getattr(args, "params_file", None):
        vals.update(_load_params_file(args.params_file))
    for k in PARAM_KEYS:
        v = getattr(args, f"p_{k}", None)
        if v is not None:
            if k in vals and vals[k] != v:
                warns.append(f"flag --{k} = {v} overrides file value {vals[k]}")
            vals[k] = v
    missing = [k for k in ("a1", "a2", "a3", "a4", "a5") if k not in vals]
    if missing:
        raise ConstraintError(f"symmetry list needs coefficients {missing}")
    return model.Params(**vals), warns


def _cmd_symmetry(args, config) -> int:
    if args.symmetry_cmd == "list":
        p, warns = _params_from_args(args, config)
        entries = symmetry.admissible_ops(p)
        ops_flat: list[str] = []
        cases = []
        for case, ops in entries:
            names = [o.kind for o in ops]
            ops_flat.extend(n for n in names if n not in ops_flat)
            cases.append({"case": case.case, "label": case.label,
                          "operators": names})
        report = make_report(
            "symmetry-list",
            _jsonable({"params": {k: getattr(p, k) for k in PARAM_KEYS}}),
            {"operators": ops_flat, "cases": cases}, warnings=warns)
        _emit_report(report, args.out)
        return 0

    # verify
    key, fp, warns = _merge_family_args(args, config)
    fam = build_family(key, fp)
    op = _op_from_args(args, fam.params)
    t = args.t
    window = tuple(args.window) if args.window else _default_window(key, fam, t)
    h = args.h or 2e-3
    before, after = symmetry.verify_flow_maps_solutions(
        op, args.eps, fam, (t, window[0], window[1]), h)
    results = {"op": op.kind, "eps": args.eps,
               "before": residual_block(before),
               "after": residual_block(after)}
    if args.refine:
        flowed = symmetry.flow(op, args.eps, fam)
        rep = calculus.refinement_study(
            fam.params, flowed, (t, window[0], window[1]),
            args.h_seq or [4e-3, 2e-3, 1e-3])
        results["after_refined"] = residual_block(rep)
    report = make_report("symmetry-verify",
                         _jsonable({"family": key, "t": t,
                                    "window": list(window), "h": h}),
                         _jsonable(results),
                         warnings=(*warns, *fam.warnings))
    _emit_report(report, args.out)
    return 0


def _op_from_args(args, params: model.Params) -> symmetry.SymmetryOp:
    kind = args.op
    if kind not in symmetry.OP_KINDS:
        raise ConstraintError(f"unknown operator kind {kind!r}")
    if kind == "Xinf":
        hk = args.heat_kind or "decaying-mode"
        prof = {
            "constant": lambda: symmetry.heat_constant(args.heat_a),
            "affine": lambda: symmetry.heat_affine(args.heat_a, args.heat_b),
            "exponential": lambda: symmetry.heat_exponential(
                args.heat_a, args.heat_mu),
            "decaying-mode": lambda: symmetry.heat_decaying(
                args.heat_a, args.heat_b, args.heat_mu),
        }.get(hk)
        if prof is None:
            raise ConstraintError(f"unknown heat profile kind {hk!r}")
        return symmetry.xinf(prof(), params.d2)
    kw = {}
    if kind in ("Q1", "Case9Op"):
        kw["a1"] = params.a1
    if kind in ("ExpA4WdV", "WdV_minus_a4WdW", "Case9Op"):
        kw["a4"] = params.a4
    if kind == "Case10Op":
        kw["a2"] = params.a2
    return symmetry.SymmetryOp(kind, **kw)


_SYSTEM_COEFF_FLAGS = {
    "R35": ("alpha", "a1", "beta", "a3", "a4", "d"),
    "R38": ("beta", "a1", "a3", "a4"),
    "R47": ("alpha", "beta", "a3", "a4", "d"),
    "R58": ("alpha", "a1", "a2", "a3", "a4", "a5", "d2", "d3"),
    "T2a": ("alpha", "beta", "a1", "a4"),
    "T2b": ("alpha", "gamma", "a1", "a4"),
    "T2c": ("beta", "a1", "a4"),
    "T2d": ("a1", "a4"),
    "L36": ("alpha", "a1", "beta", "kappa1", "kappa2"),
    "L52": ("alpha", "beta", "a4"),
}


def _build_system(args) -> reduction.ReducedSystem:
    sid = args.system
    if sid not in _SYSTEM_COEFF_FLAGS:
        raise ConstraintError(f"unknown system id {sid!r}")
    if sid == "R58":
        p = model.Params(a1=_req(args, "a1"), a2=_req(args, "a2"),
                         a3=_req(args, "a3"), a4=_req(args, "a4"),
                         a5=_req(args, "a5"), d1=1.0,
                         d2=_req(args, "d2"), d3=_req(args, "d3"))
        return reduction.reduced_system("R58", alpha=_req(args, "alpha"),
                                        params=p)
    if sid == "L52":
        if args.case not in ("50", "51"):
            raise ConstraintError("L52 needs --case 50 or 51")
        return reduction.reduced_system(
            "L52", beta=_req(args, "beta"), case=args.case,
            a4=args.a4 if args.a4 is not None else 0.0)
    kw = {}
    for name in _SYSTEM_COEFF_FLAGS[sid]:
        kw[name] = _req(args, name)
    return reduction.reduced_system(sid, **kw)


def _req(args, name):
    v = getattr(args, name, None)
    if v is None:
        raise ConstraintError(f"system {args.system} needs --{name}")
    return v


_STATE_HEADERS = {
    6: ("U", "dU", "V", "dV", "W", "dW"),
    3: ("U", "V", "W"),
    2: ("Y", "dY"),
}


_REDUCE_COEFF_NAMES = ("alpha", "beta", "gamma", "a1", "a2", "a3", "a4",
                       "a5", "d", "d2", "d3", "kappa1", "kappa2", "delta1",
                       "delta2", "case")


def _cmd_reduce(args) -> int:
    warns: list[str] = []
    results: dict = {}
    if args.params_file:
        vals = json.loads(Path(args.params_file).read_text())
        bad = set(vals) - set(_REDUCE_COEFF_NAMES)
        if bad:
            raise ConstraintError(
                f"reduce params file has unknown keys {sorted(bad)}")
        for name, v in vals.items():
            if getattr(args, name, None) is None:
                setattr(args, name, v)
            elif getattr(args, name) != v:
                warns.append(f"flag --{name} = {getattr(args, name)} "
                             f"overrides file value {v}")
    if args.system == "R38" and args.case in ("i", "ii", "iii"):
        for name in ("a1", "beta", "delta1", "delta2"):
            _req(args, name)
        kw = {"a4": args.a4} if args.case in ("i", "ii") else {"a3": args.a3}
        y0 = np.asarray(reduction.closed_form_R38(
            args.case, args.a1, args.delta1, args.delta2, args.beta,
            0.0, **kw), dtype=float) if args.y0 is None else \
            np.asarray([float(s) for s in args.y0.split(",")])
        a3v = {"i": 1.0, "ii": 0.0, "iii": args.a3}[args.case]
        a4v = args.a4 if args.case in ("i", "ii") else 1.0 + args.a1 + args.a3
        sys_ = reduction.reduced_system("R38", beta=args.beta, a1=args.a1,
                                        a3=a3v, a4=a4v)
    else:
        sys_ = _build_system(args)
        if args.y0 is not None:
            y0 = np.asarray([float(s) for s in args.y0.split(",")])
        else:
            y0 = np.zeros(sys_.dim)
            y0[0] = 1.0
    span = tuple(args.span)
    traj = reduction.integrate(sys_, y0, span, rel_tol=args.rel_tol,
                               abs_tol=args.abs_tol, max_step=args.max_step)
    if args.traj_out:
        headers = _STATE_HEADERS[sys_.dim]
        with open(args.traj_out, "w") as fh:
            fh.write(sys_.ivar + "," + ",".join(headers) + "\n")
            for i in range(len(traj.xs)):
                fh.write(",".join(
                    [_fmt(traj.xs[i])] + [_fmt(v) for v in traj.ys[i]]) + "\n")
    results.update({"system": sys_.sid, "nodes": int(len(traj.xs)),
                    "span": list(span),
                    "interp_error_estimate": traj.interp_error_estimate})

    if args.verify:
        if args.system == "R38" and args.case in ("i", "ii", "iii"):
            ts = np.linspace(span[0], span[1], 301)
            kw = {"a4": args.a4} if args.case in ("i", "ii") \
                else {"a3": args.a3}
            exact = np.stack(reduction.closed_form_R38(
                args.case, args.a1, args.delta1, args.delta2, args.beta,
                ts, **kw), axis=1)
            dev = float(np.max(np.abs(traj.evaluate(ts) - exact)))
            results["oracle_max_deviation"] = dev
        else:
            warns.append("--verify oracle comparison is available for "
                         "R38 with --case only; skipped")
    report = make_report(
        "reduce",
        _jsonable({"system": sys_.sid, "coeffs": sys_.coeffs,
                   "y0": list(map(float, y0)), "span": list(span),
                   "rel_tol": args.rel_tol, "abs_tol": args.abs_tol}),
        _jsonable(results), warnings=warns)
    _emit_report(report, args.out)
    return 0


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return _finite_or_none(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, model.Params):
        return {k: getattr(obj, k) for k in PARAM_KEYS}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    if callable(obj):
        return repr(obj)
    return obj


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", help="catalog family key")
    for name in _FAMILY_FLAGS:
        p.add_argument(f"--{name.replace('_', '-')}", type=float, default=None)
    p.add_argument("--profile-lo", type=float, default=None,
                   help="semi families: profile window lower edge")
    p.add_argument("--profile-hi", type=float, default=None,
                   help="semi families: profile window upper edge")
    p.add_argument("--profile-step", type=float, default=None,
                   help="semi families: uniform tabulation step")
    p.add_argument("--anchor", type=float, default=None,
                   help="semi families: where the profile initial data is "
                        "imposed (default: window left edge, which keeps "
                        "every homogeneous mode decaying)")
    p.add_argument("--y0", type=float, default=None,
                   help="initial profile value for the semi families")
    p.add_argument("--dy0", type=float, default=None)
    p.add_argument("--config", default=None, help="JSON run-config file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hgf",
        description="verification lab for the three-component "
                    "hunter-gatherer/farmer reaction-diffusion system")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("catalog", help="list families and symmetry cases")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)

    p = sub.add_parser("eval", help="sample a family to CSV")
    _add_family_flags(p)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--xmin", type=float, required=True)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("residual", help="PDE residual of a family")
    _add_family_flags(p)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--window", type=float, nargs=2, default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--refine", action="store_true")
    p.add_argument("--h-seq", type=float, nargs="+", default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("simulate", help="method-of-lines run from a config")
    _add_family_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("speed", help="front speed from a simulate run dir")
    p.add_argument("--run", required=True)
    p.add_argument("--component", choices=("u", "v", "w"), required=True)
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--fit-window", type=float, nargs=2, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("symmetry", help="operator catalog commands")
    ssub = p.add_subparsers(dest="symmetry_cmd", required=True)
    pl = ssub.add_parser("list")
    for k in PARAM_KEYS:
        pl.add_argument(f"--{k}", dest=f"p_{k}", type=float, default=None)
    pl.add_argument("--params", dest="params_file", default=None,
                    help="JSON file with the eight coefficients")
    pl.add_argument("--config", default=None)
    pl.add_argument("--out", default=None)
    pv = ssub.add_parser("verify")
    _add_family_flags(pv)
    pv.add_argument("--op", required=True)
    pv.add_argument("--eps", type=float, required=True)
    pv.add_argument("--t", type=float, default=0.5)
    pv.add_argument("--window", type=float, nargs=2, default=None)
    pv.add_argument("--h", type=float, default=None)
    pv.add_argument("--refine", action="store_true")
    pv.add_argument("--h-seq", type=float, nargs="+", default=None)
    pv.add_argument("--heat-kind", default=None)
    pv.add_argument("--heat-a", type=float, default=0.7)
    pv.add_argument("--heat-b", type=float, default=0.4)
    pv.add_argument("--heat-mu", type=float, default=1.0)
    pv.add_argument("--out", default=None)

    p = sub.add_parser("reduce", help="integrate a reduced ODE system")
    p.add_argument("--system", required=True)
    p.add_argument("--case", default=None)
    p.add_argument("--params", dest="params_file", default=None,
                   help="JSON file with coefficient values (flags win)")
    for name in ("alpha", "beta", "gamma", "a1", "a2", "a3", "a4", "a5",
                 "d", "d2", "d3", "kappa1", "kappa2", "delta1", "delta2"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--y0", default=None, help="comma-separated initial state")
    p.add_argument("--span", type=float, nargs=2, required=True)
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    p.add_argument("--max-step", type=float, default=None)
    p.add_argument("--traj-out", default=None, help="trajectory CSV path")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out", default=None, help="report JSON path")
    return ap


def dispatch(argv) -> int:
    """Run one CLI invocation; returns the process exit code."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    try:
        config = None
        if getattr(args, "config", None):
            config = load_config(args.config)
        if args.cmd == "catalog":
            return _cmd_catalog(args)
        if args.cmd == "eval":
            return _cmd_eval(args, config)
        if args.cmd == "residual":
            return _cmd_residual(args, config)
        if args.cmd == "simulate":
            return _cmd_simulate(args)
        if args.cmd == "speed":
            return _cmd_speed(args)
        if args.cmd == "symmetry":
            return _cmd_symmetry(args, config)
        if args.cmd == "reduce":
            return _cmd_reduce(args)
        raise ConstraintError(f"unknown command {args.cmd!r}")
    except ConstraintError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
