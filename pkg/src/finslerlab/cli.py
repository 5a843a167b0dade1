"""Batch front door: JSON configs in, verdict reports and grid dumps out.

Commands
--------
analyze    full grid report (phi, spray, determinant, density, S/u) as JSON
verify     one named verdict with residual statistics; exit 0 pass, 1 fail
construct  build a profile (Berwald-type family or a Randers branch) and
           write it back out as a self-contained, loadable config
sample     the analyze grid as deterministic CSV (regression fixture format)

Exit codes: 0 pass, 1 verdict fail, 2 config error, 3 numeric failure,
4 regularity failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .douglas import douglas_verdict, fit_q
from .errors import (
    AdmissibilityError,
    ConfigError,
    CrossCheckError,
    DegenerateInputError,
    DomainError,
    DomainExitError,
    ParseError,
    QuadratureError,
    RegularityError,
    UnknownIdentifierError,
)
from .expr import ScalarFunction, parse_expression, to_string
from .families import (
    SampledFunction,
    bh_classification_residuals,
    bh_solve_g,
    build_berwald_family,
    family_pde_residual,
    ht_condition_residual,
    ht_solve_h,
)
from .geometry import (
    BerwaldFamilyProfile,
    MetricSpec,
    embed_point,
    family_data,
    general_phi_spec,
    metric_determinant,
    phi_jet,
    randers_spec,
    regularity_scan,
    s_fractions,
    spray_values,
)
from .oracle import finsler_norm, s_by_distortion
from .quadrature import QuadratureRule
from .randers import covariant_b_coefficients
from .scurvature import isotropy_profile, reduced_s, reduced_s_given_f
from .volume import BH, CONSTANT, HT, CustomDensity, density, f_coefficient

CSV_HEADER = "r,s,phi,P,Q,Q_s,detg,sigma,f_r,S_over_u"

CHECKS = ("isotropy", "douglas", "berwald-family", "bh-classification", "ht-parallel", "oracle")
FAMILIES = ("berwald", "randers-bh", "randers-ht")


# -- config loading ----------------------------------------------------------


@dataclass
class RunConfig:
    raw: dict
    n: int
    metric: dict
    volume: object
    grid: dict | None
    tolerances: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int = 0
    construct: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)
    c_const: float | None = None


def _expect(cond: bool, message: str, key: str) -> None:
    if not cond:
        raise ConfigError(message, key=key)


def _radial_fn(obj, key: str):
    """Accept an expression string, a number, or a sampled table."""
    if isinstance(obj, str):
        try:
            return ScalarFunction.from_text(obj)
        except (ParseError, UnknownIdentifierError) as exc:
            raise ConfigError(f"bad expression for {key}: {exc}", key=key) from exc
    if isinstance(obj, (int, float)):
        return ScalarFunction.constant(float(obj))
    if isinstance(obj, dict) and "table" in obj:
        t = obj["table"]
        for want in ("r_nodes", "values", "derivs", "second_derivs"):
            _expect(want in t, f"sampled table for {key} lacks '{want}'", f"{key}.table")
        try:
            return SampledFunction(t["r_nodes"], t["values"], t["derivs"], t["second_derivs"])
        except ValueError as exc:
            raise ConfigError(f"bad sampled table for {key}: {exc}", key=f"{key}.table") from exc
    raise ConfigError(f"{key} must be an expression string, number, or table", key=key)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}", key="<file>") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc}", key="<file>") from exc
    _expect(isinstance(raw, dict), "config root must be a JSON object", "<root>")
    _expect("n" in raw, "missing dimension 'n'", "n")
    n = raw["n"]
    _expect(isinstance(n, int) and n >= 2, "'n' must be an integer >= 2", "n")
    _expect("metric" in raw and isinstance(raw["metric"], dict), "missing 'metric' object", "metric")
    metric = raw["metric"]
    _expect(
        metric.get("kind") in ("general", "randers", "berwald-family"),
        "metric.kind must be one of general | randers | berwald-family",
        "metric.kind",
    )
    volume = _load_volume(raw.get("volume", "bh"))
    grid = raw.get("grid")
    if grid is not None:
        _expect(isinstance(grid, dict), "'grid' must be an object", "grid")
        for want in ("r_min", "r_max"):
            _expect(want in grid, f"grid lacks '{want}'", f"grid.{want}")
        _expect(0.0 < grid["r_min"] < grid["r_max"], "grid range must satisfy 0 < r_min < r_max", "grid")
        grid = {
            "r_min": float(grid["r_min"]),
            "r_max": float(grid["r_max"]),
            "r_count": int(grid.get("r_count", 21)),
            "s_count": int(grid.get("s_count", 21)),
        }
        _expect(grid["r_count"] >= 2 and grid["s_count"] >= 5, "grid counts too small", "grid")
    seed = raw.get("seed", 0)
    _expect(isinstance(seed, int), "'seed' must be an integer", "seed")
    c_const = raw.get("c_const")
    if c_const is not None:
        _expect(isinstance(c_const, (int, float)) and c_const > 0, "'c_const' must be positive", "c_const")
        c_const = float(c_const)
    return RunConfig(
        raw=raw,
        n=n,
        metric=metric,
        volume=volume,
        grid=grid,
        tolerances=raw.get("tolerances", {}) or {},
        output=raw.get("output", {}) or {},
        seed=seed,
        construct=raw.get("construct", {}) or {},
        oracle=raw.get("oracle", {}) or {},
        c_const=c_const,
    )


def _load_volume(obj):
    if isinstance(obj, str):
        kind = obj.lower()
        if kind == "bh":
            return BH
        if kind == "ht":
            return HT
        if kind == "constant":
            return CONSTANT
        raise ConfigError("volume must be bh | ht | constant | {kind: custom, sigma: ...}", key="volume")
    if isinstance(obj, dict) and obj.get("kind") == "custom":
        _expect("sigma" in obj, "custom volume lacks 'sigma'", "volume.sigma")
        return CustomDensity(_radial_fn(obj["sigma"], "volume.sigma"))
    raise ConfigError("volume must be bh | ht | constant | {kind: custom, sigma: ...}", key="volume")


def _default_domain(cfg: RunConfig) -> tuple[float, float]:
    dom = cfg.metric.get("r_domain")
    if dom is not None:
        _expect(
            isinstance(dom, (list, tuple)) and len(dom) == 2 and 0.0 < dom[0] < dom[1],
            "metric.r_domain must be [r_min, r_max] with 0 < r_min < r_max",
            "metric.r_domain",
        )
        return float(dom[0]), float(dom[1])
    _expect(cfg.grid is not None, "need metric.r_domain or a grid to fix the domain", "metric.r_domain")
    # pad so boundary radii keep room for the density cross-check stencil
    return 0.9 * cfg.grid["r_min"], 1.1 * cfg.grid["r_max"]


def build_spec(cfg: RunConfig) -> MetricSpec:
    kind = cfg.metric["kind"]
    domain = _default_domain(cfg)
    if kind == "general":
        _expect("phi" in cfg.metric, "general metric lacks 'phi'", "metric.phi")
        try:
            return general_phi_spec(cfg.metric["phi"], cfg.n, domain)
        except (ParseError, UnknownIdentifierError) as exc:
            raise ConfigError(f"bad expression for metric.phi: {exc}", key="metric.phi") from exc
    if kind == "randers":
        for want in ("f", "g", "h"):
            _expect(want in cfg.metric, f"randers metric lacks '{want}'", f"metric.{want}")
        f, g, h = (_radial_fn(cfg.metric[k], f"metric.{k}") for k in ("f", "g", "h"))
        return randers_spec(f, g, h, cfg.n, domain)
    for want in ("c2", "chi", "r0"):
        _expect(want in cfg.metric, f"berwald-family metric lacks '{want}'", f"metric.{want}")
    c2 = _radial_fn(cfg.metric["c2"], "metric.c2")
    _expect(isinstance(c2, ScalarFunction), "family c2 must be closed form", "metric.c2")
    try:
        chi = parse_expression(str(cfg.metric["chi"]), {"w"})
    except (ParseError, UnknownIdentifierError) as exc:
        raise ConfigError(f"bad expression for metric.chi: {exc}", key="metric.chi") from exc
    r0 = float(cfg.metric["r0"])
    _expect(domain[0] <= r0 <= domain[1], "family anchor r0 outside r_domain", "metric.r0")
    return MetricSpec(BerwaldFamilyProfile(c2=c2, chi=chi, r0=r0), cfg.n, domain)


def _grids(cfg: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    _expect(cfg.grid is not None, "this command needs a 'grid' section", "grid")
    g = cfg.grid
    r_values = np.linspace(g["r_min"], g["r_max"], g["r_count"])
    return r_values, s_fractions(g["s_count"])


def _rule(args) -> QuadratureRule | None:
    return QuadratureRule(n=args.quad) if args.quad else None


# -- report plumbing ---------------------------------------------------------


def _fmt17(x: float) -> str:
    return "%.17g" % float(x)


def _residual_block(res: np.ndarray, r_of, s_of) -> dict:
    """Summary statistics for a residual array with point lookups."""
    flat = np.abs(np.asarray(res, dtype=float)).ravel()
    i = int(np.argmax(flat))
    return {
        "max": float(flat[i]),
        "mean": float(np.mean(flat)),
        "argmax": {"r": r_of(i), "s": s_of(i)},
    }


def _write_text(args, cfg: RunConfig, text: str) -> None:
    path = args.out or cfg.output.get("path")
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)


def _dump_report(args, cfg: RunConfig, report: dict) -> None:
    _write_text(args, cfg, json.dumps(report, indent=2, sort_keys=True) + "\n")


# -- commands ----------------------------------------------------------------


def _grid_rows(cfg: RunConfig, spec: MetricSpec, rule) -> tuple[list[dict], list[dict]]:
    r_values, fracs = _grids(cfg)
    rows, per_radius = [], []
    for r in r_values:
        r = float(r)
        s_row = r * fracs
        sigma = density(cfg.volume, spec, r, rule)
        f_r = f_coefficient(cfg.volume, spec, r, rule)
        sv = spray_values(spec, r, s_row)
        jet = phi_jet(spec, r, s_row)
        phi = np.broadcast_to(np.asarray(jet.d(0, 0)), s_row.shape)
        detg = np.broadcast_to(np.asarray(metric_determinant(spec, r, s_row)), s_row.shape)
        red = np.broadcast_to(
            np.asarray(reduced_s_given_f(spec, r, s_row, f_r)), s_row.shape
        )
        c_row = red / ((spec.n + 1) * phi)
        for j, s in enumerate(s_row):
            rows.append(
                {
                    "r": r,
                    "s": float(s),
                    "phi": float(phi[j]),
                    "P": float(np.broadcast_to(np.asarray(sv.P), s_row.shape)[j]),
                    "Q": float(np.broadcast_to(np.asarray(sv.Q), s_row.shape)[j]),
                    "Q_s": float(np.broadcast_to(np.asarray(sv.Q_s), s_row.shape)[j]),
                    "detg": float(detg[j]),
                    "sigma": float(sigma),
                    "f_r": float(f_r),
                    "S_over_u": float(red[j]),
                    "c": float(c_row[j]),
                }
            )
        per_radius.append(
            {
                "r": r,
                "sigma": float(sigma),
                "f_r": float(f_r),
                "c_mean": float(np.mean(c_row)),
                "c_spread": float(np.max(c_row) - np.min(c_row)),
            }
        )
    return rows, per_radius


def cmd_analyze(cfg: RunConfig, args) -> int:
    spec = build_spec(cfg)
    rule = _rule(args)
    scan = regularity_scan(spec)
    rows, per_radius = _grid_rows(cfg, spec, rule)
    report = {
        "config_echo": cfg.raw,
        "regularity": {
            "passed": bool(scan.passed),
            "worst_margin": float(scan.worst_margin),
            "worst_point": {"r": scan.worst_point[0], "s": scan.worst_point[1]},
            "worst_condition": int(scan.worst_condition),
        },
        "per_radius": per_radius,
        "grid": rows,
    }
    _dump_report(args, cfg, report)
    return 0


def cmd_sample(cfg: RunConfig, args) -> int:
    spec = build_spec(cfg)
    rows, _ = _grid_rows(cfg, spec, _rule(args))
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join(_fmt17(row[k]) for k in CSV_HEADER.split(",")))
    _write_text(args, cfg, "\n".join(lines) + "\n")
    return 0


def _verify_isotropy(cfg, spec, args, rule) -> tuple[bool, dict, list]:
    r_values, fracs = _grids(cfg)
    tol = args.tol if args.tol is not None else cfg.tolerances.get("isotropy")
    prof = isotropy_profile(spec, cfg.volume, r_values, s_fracs=fracs, tolerance=tol, rule=rule)
    dev = np.abs(prof.c_values - prof.c_mean[:, None])
    ns = fracs.size
    block = _residual_block(
        dev,
        lambda i: float(r_values[i // ns]),
        lambda i: float(r_values[i // ns] * fracs[i % ns]),
    )
    per_radius = [
        {
            "r": float(r),
            "c": float(prof.c_mean[i]),
            "f_r": float(prof.f_values[i]),
            "spread": float(prof.c_spread[i]),
            "tolerance": prof.tolerance,
        }
        for i, r in enumerate(r_values)
    ]
    return prof.passed, block, per_radius


def _verify_douglas(cfg, spec, args, rule) -> tuple[bool, dict, list]:
    r_values, fracs = _grids(cfg)
    tol = args.tol if args.tol is not None else cfg.tolerances.get("douglas")
    fit = douglas_verdict(spec, r_values, fracs, tolerance=tol)
    dev = np.empty((r_values.size, fracs.size))
    for i, r in enumerate(r_values):
        s_row = float(r) * fracs
        q = np.broadcast_to(np.asarray(spray_values(spec, float(r), s_row).Q), s_row.shape)
        dev[i] = np.abs(q - fit.c1[i] - fit.c2[i] * s_row * s_row)
    ns = fracs.size
    block = _residual_block(
        dev,
        lambda i: float(r_values[i // ns]),
        lambda i: float(r_values[i // ns] * fracs[i % ns]),
    )
    per_radius = [
        {
            "r": float(r),
            "c1": float(fit.c1[i]),
            "c2": float(fit.c2[i]),
            "max_residual": float(fit.max_residual[i]),
            "odd_residual": float(fit.odd_residual[i]),
            "tolerance": float(fit.tolerance[i]),
        }
        for i, r in enumerate(r_values)
    ]
    return fit.passed, block, per_radius


def _verify_family(cfg, spec, args, rule) -> tuple[bool, dict, list]:
    _expect(
        cfg.metric["kind"] == "berwald-family",
        "--check berwald-family needs a berwald-family metric",
        "metric.kind",
    )
    built = build_berwald_family(
        spec.profile.c2, spec.profile.chi, spec.profile.r0, spec.r_domain, cfg.n
    )
    r_values, fracs = _grids(cfg)
    dev = np.empty((r_values.size, fracs.size))
    for i, r in enumerate(r_values):
        dev[i] = np.abs(
            np.broadcast_to(
                np.asarray(family_pde_residual(spec, spec.profile.c2, float(r), float(r) * fracs)),
                fracs.shape,
            )
        )
    ns = fracs.size
    block = _residual_block(
        dev,
        lambda i: float(r_values[i // ns]),
        lambda i: float(r_values[i // ns] * fracs[i % ns]),
    )
    tol = args.tol if args.tol is not None else 1e-8
    passed = bool(block["max"] <= tol and built.douglas.passed and built.regularity.passed)
    per_radius = [
        {
            "r": float(r),
            "c1": float(built.douglas.c1[i]) if i < built.douglas.r_grid.size else None,
            "c2": float(built.douglas.c2[i]) if i < built.douglas.r_grid.size else None,
            "pde_residual": float(np.max(dev[i])),
        }
        for i, r in enumerate(r_values)
    ]
    return passed, block, per_radius


def _randers_profiles(cfg):
    _expect(cfg.metric["kind"] == "randers", "this check needs a randers metric", "metric.kind")
    return tuple(_radial_fn(cfg.metric[k], f"metric.{k}") for k in ("f", "g", "h"))


def _verify_bh_classification(cfg, spec, args, rule) -> tuple[bool, dict, list]:
    f, g, h = _randers_profiles(cfg)
    r_values, _ = _grids(cfg)
    per_radius, res2 = [], []
    for r in r_values:
        bc = bh_classification_residuals(f, g, h, float(r))
        res2.append(bc.res2)
        per_radius.append(
            {
                "r": float(r),
                "c": float(bc.c),
                "res1": float(bc.res1),
                "res2": float(bc.res2),
                "printed_ode_residual": float(bc.printed_ode_residual),
            }
        )
    res2 = np.asarray(res2)
    block = _residual_block(res2, lambda i: float(r_values[i]), lambda i: None)
    cmax = max(abs(p["c"]) for p in per_radius)
    tol = args.tol if args.tol is not None else 1e-8 * (1.0 + cmax)
    return bool(block["max"] <= tol), block, per_radius


def _verify_ht_parallel(cfg, spec, args, rule) -> tuple[bool, dict, list]:
    f, g, h = _randers_profiles(cfg)
    r_values, _ = _grids(cfg)
    if cfg.c_const is not None:
        c_const = cfg.c_const
    else:
        cs = r_values * r_values * np.asarray(f.value(r_values), dtype=float)
        _expect(
            float(np.max(cs) - np.min(cs)) <= 1e-6 * (1.0 + float(np.mean(np.abs(cs)))),
            "metric.f is not c/r^2 for a constant c; set 'c_const' explicitly",
            "c_const",
        )
        c_const = float(np.mean(cs))
    per_radius, worst = [], []
    for r in r_values:
        u1, u2 = covariant_b_coefficients(f, g, h, float(r))
        ht_res = ht_condition_residual(c_const, g, h, float(r))
        worst.append(max(abs(u1), abs(u2), abs(ht_res)))
        per_radius.append(
            {
                "r": float(r),
                "u1": float(u1),
                "u2": float(u2),
                "ht_residual": float(ht_res),
            }
        )
    worst = np.asarray(worst)
    block = _residual_block(worst, lambda i: float(r_values[i]), lambda i: None)
    tol = args.tol if args.tol is not None else 1e-8
    return bool(block["max"] <= tol), block, per_radius


def _verify_oracle(cfg, spec, args, rule) -> tuple[bool, dict, list]:
    r_values, _ = _grids(cfg)
    lo, hi = float(r_values[0]), float(r_values[-1])
    span = hi - lo
    points = int(cfg.oracle.get("points", 10))
    seed = args.seed if args.seed is not None else cfg.seed
    rng = np.random.default_rng(seed)
    tol = args.tol if args.tol is not None else 1e-4
    per_radius, diffs, states = [], [], []
    for _ in range(points):
        r = float(rng.uniform(lo + 0.05 * span, hi - 0.05 * span))
        frac = float(rng.uniform(-0.9, 0.9))
        x, y = embed_point(r, r * frac, cfg.n)
        y = y * float(rng.uniform(0.5, 2.0))
        u = float(np.linalg.norm(y))
        s = float(np.dot(x, y) / u)
        s_num = s_by_distortion(spec, cfg.volume, x, y, rule=rule)
        s_ana = u * float(reduced_s(spec, cfg.volume, r, s, rule))
        diff = abs(s_num - s_ana)
        diffs.append(diff)
        states.append((r, s))
        per_radius.append(
            {
                "r": r,
                "s": s,
                "oracle": float(s_num),
                "analytic": float(s_ana),
                "diff": float(diff),
                "band": float(tol * (1.0 + abs(s_ana))),
            }
        )
    diffs = np.asarray(diffs)
    block = _residual_block(
        diffs, lambda i: states[i][0], lambda i: states[i][1]
    )
    passed = all(p["diff"] <= p["band"] for p in per_radius)
    return passed, block, per_radius


_VERIFIERS = {
    "isotropy": _verify_isotropy,
    "douglas": _verify_douglas,
    "berwald-family": _verify_family,
    "bh-classification": _verify_bh_classification,
    "ht-parallel": _verify_ht_parallel,
    "oracle": _verify_oracle,
}


def cmd_verify(cfg: RunConfig, args) -> int:
    spec = build_spec(cfg)
    passed, block, per_radius = _VERIFIERS[args.check](cfg, spec, args, _rule(args))
    report = {
        "config_echo": cfg.raw,
        "check": args.check,
        "verdict": "pass" if passed else "fail",
        "residuals": block,
        "per_radius": per_radius,
    }
    _dump_report(args, cfg, report)
    print(f"{args.check}: {'PASS' if passed else 'FAIL'} (max residual {block['max']:.3e})")
    return 0 if passed else 1


def _construct_berwald(cfg: RunConfig, args) -> dict:
    p = cfg.construct
    for want in ("c2", "chi", "r0", "domain"):
        _expect(want in p, f"construct section lacks '{want}'", f"construct.{want}")
    lo, hi = float(p["domain"][0]), float(p["domain"][1])
    built = build_berwald_family(p["c2"], p["chi"], float(p["r0"]), (lo, hi), cfg.n)
    prof = built.spec.profile
    data = family_data(prof)
    nodes = np.linspace(lo, hi, int(p.get("table_points", 101)))
    tables = {"r_nodes": nodes.tolist(), "g": [], "J": [], "I2": []}
    for r in nodes:
        g_jet, j_jet, i2_jet = data.rdata(float(r))
        tables["g"].append(float(g_jet.d(0, 0)))
        tables["J"].append(float(j_jet.d(0, 0)))
        tables["I2"].append(float(i2_jet.d(0, 0)))
    pad = 0.05 * (hi - lo)
    return {
        "n": cfg.n,
        "metric": {
            "kind": "berwald-family",
            "c2": str(prof.c2),
            "chi": to_string(prof.chi),
            "r0": prof.r0,
            "r_domain": [lo, hi],
        },
        "volume": "bh",
        "grid": {"r_min": lo + pad, "r_max": hi - pad, "r_count": 11, "s_count": 11},
        "tables": tables,
        "diagnostics": {
            "pde_max_residual": built.pde_max_residual,
            "douglas_passed": built.douglas.passed,
            "douglas_max_residual": float(np.max(built.douglas.max_residual)),
            "regularity_passed": built.regularity.passed,
            "regularity_worst_margin": float(built.regularity.worst_margin),
        },
    }


def _table_dict(sol) -> dict:
    return {
        "table": {
            "r_nodes": sol.r_nodes.tolist(),
            "values": sol.values.tolist(),
            "derivs": sol.derivs.tolist(),
            "second_derivs": sol.second_derivs.tolist(),
        }
    }


def _construct_randers_bh(cfg: RunConfig, args) -> dict:
    p = cfg.construct
    for want in ("f", "h", "g_at_r0", "r_range"):
        _expect(want in p, f"construct section lacks '{want}'", f"construct.{want}")
    lo, hi = float(p["r_range"][0]), float(p["r_range"][1])
    sol = bh_solve_g(
        p["f"], p["h"], float(p["g_at_r0"]), (lo, hi),
        steps=int(p.get("steps", 400)), r0=p.get("r0"),
    )
    pad = 0.05 * (hi - lo)
    return {
        "n": cfg.n,
        "metric": {
            "kind": "randers",
            "f": p["f"],
            "g": _table_dict(sol),
            "h": p["h"],
            "r_domain": [lo, hi],
        },
        "volume": "bh",
        "grid": {"r_min": lo + pad, "r_max": hi - pad, "r_count": 11, "s_count": 11},
        "diagnostics": {
            "max_node_residual": sol.max_node_residual,
            "admissibility_margin": sol.admissibility_margin,
        },
    }


def _construct_randers_ht(cfg: RunConfig, args) -> dict:
    p = cfg.construct
    for want in ("c_const", "g", "h_at_r0", "r_range"):
        _expect(want in p, f"construct section lacks '{want}'", f"construct.{want}")
    c_const = float(p["c_const"])
    lo, hi = float(p["r_range"][0]), float(p["r_range"][1])
    sol = ht_solve_h(
        c_const, p["g"], float(p["h_at_r0"]), (lo, hi),
        steps=int(p.get("steps", 400)), r0=p.get("r0"),
    )
    pad = 0.05 * (hi - lo)
    return {
        "n": cfg.n,
        "c_const": c_const,
        "metric": {
            "kind": "randers",
            "f": f"{_fmt17(c_const)}/r^2",
            "g": p["g"],
            "h": _table_dict(sol),
            "r_domain": [lo, hi],
        },
        "volume": "ht",
        "grid": {"r_min": lo + pad, "r_max": hi - pad, "r_count": 11, "s_count": 11},
        "diagnostics": {
            "max_node_residual": sol.max_node_residual,
            "admissible": sol.admissible,
            "admissibility_margin": sol.admissibility_margin,
        },
    }


def cmd_construct(cfg: RunConfig, args) -> int:
    builder = {
        "berwald": _construct_berwald,
        "randers-bh": _construct_randers_bh,
        "randers-ht": _construct_randers_ht,
    }[args.family]
    out = builder(cfg, args)
    out["config_echo"] = cfg.raw
    _dump_report(args, cfg, out)
    return 0


# -- entry point -------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="finslerlab",
        description="verification lab for spherically symmetric Finsler metrics",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, needs in (
        ("analyze", ()),
        ("verify", ("check",)),
        ("construct", ("family",)),
        ("sample", ()),
    ):
        p = sub.add_parser(name)
        p.add_argument("config", help="path to a JSON run configuration")
        if "check" in needs:
            p.add_argument("--check", required=True, choices=CHECKS)
        if "family" in needs:
            p.add_argument("--family", required=True, choices=FAMILIES)
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--quad", type=int, default=None, help="quadrature node count")
        p.add_argument("--seed", type=int, default=None, help="seed override")
    return ap


_COMMANDS = {
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "construct": cmd_construct,
    "sample": cmd_sample,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, ParseError, UnknownIdentifierError, DegenerateInputError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RegularityError as exc:
        print(f"regularity failure: {exc}", file=sys.stderr)
        return 4
    except (
        QuadratureError,
        CrossCheckError,
        DomainError,
        DomainExitError,
        AdmissibilityError,
        OverflowError,
        ZeroDivisionError,
    ) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
