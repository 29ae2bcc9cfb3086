"""Scenario-driven command line: project points, run verification suites,
write profile CSVs, and solve the projection equation.

Exit codes: 0 all checks pass, 1 at least one check failed (or a solve did
not converge), 2 configuration or usage error. Rows with status "finding"
record expected numerical observations and never affect the exit code.

Outputs are deterministic for a fixed config and seed: no timestamps, keys
sorted, every real formatted by report.format_real.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import equation as eq
from . import geometry as geo
from . import levelset as ls
from . import integral as ig
from . import report as rp
from .fixed_point import DELTA, fixed_point, g_values, h_values
from .config import load_config
from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    LevelRangeError,
    PreconditionError,
    SpecValidationError,
)
from .functional import j_value, j_value_batch, residual_sq
from .sets import is_bounded

__all__ = ["main"]

RAY_LAMBDAS = (-2.0, -1.0, -0.5, 0.0, 0.5, 0.9, 0.99)
DEFAULT_H_GRID = (1.25, 1.5, 2.0, 4.0)
N_PROBES = 8
CONTINUITY_PITCH_REL = 1e-3


def _write_out(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _g_grid(cfg):
    return sorted(v for v in cfg.lambda_grid if abs(v) < 1.0 - DELTA)


def _h_grid(cfg):
    grid = cfg.h_lambda_grid if cfg.h_lambda_grid else DEFAULT_H_GRID
    return sorted(float(v) for v in grid)


def _require_origin_outside(proj, cfg):
    if proj.p0_norm_sq <= cfg.tolerances.report:
        raise PreconditionError("0 in X: ||P(0)||^2 is below the report tolerance")


def _suite_geometry(cfg):
    proj = cfg.make_projector()
    n = cfg.budgets.n_samples
    seed = cfg.seed
    idem_tol = 1e-6 if proj.is_iterative else 1e-10
    rng = np.random.default_rng(np.random.SeedSequence([seed, 43]))
    probes = rng.normal(size=(N_PROBES, proj.dim)) * 5.0
    vi = max(
        geo.check_variational_inequality(proj, probes[k], n, seed + k)
        for k in range(N_PROBES)
    )
    ray = max(geo.check_ray_invariance(proj, probes[k], RAY_LAMBDAS) for k in range(N_PROBES))
    checks = [
        rp.check("nonexpansive_violation", geo.check_nonexpansive(proj, n, seed), 1e-9,
                 "max ||P(x)-P(y)|| - ||x-y|| over sampled pairs"),
        rp.check("idempotence_violation", geo.check_idempotence(proj, n, seed), idem_tol,
                 "max ||P(P(x))-P(x)|| over samples"),
        rp.check("variational_inequality_violation", vi, 1e-9,
                 "max <P(u)-u, P(u)-x> over probes u and sampled x in X"),
        rp.check("ray_invariance_violation", ray, 1e-8,
                 "max ||P(u+lambda*(P(u)-u))-P(u)|| over probes and lambda < 1"),
        rp.check("neg_fixed_point_residual", geo.check_neg_fixed_point(proj), 1e-10,
                 "||P(-P(0))-P(0)||; -P(0) is the fixed point of x -> -P(x)"),
    ]
    return checks, {}


def _max_adjacent(values):
    v = np.asarray(values, dtype=np.float64)
    return float(np.max(np.diff(v)))


def _suite_t1(cfg):
    proj = cfg.make_projector()
    _require_origin_outside(proj, cfg)
    tols = cfg.tolerances
    budgets = cfg.budgets
    p0_sq = proj.p0_norm_sq
    r_grid = cfg.r_grid(p0_sq)
    g_grid = _g_grid(cfg)
    h_grid = _h_grid(cfg)
    checks = []

    fixed_lams = list(g_grid) + [1.0 / lam for lam in h_grid]
    residuals = [
        fixed_point(proj, lam, tol=tols.fixed_point, max_iter=budgets.max_iter).residual
        for lam in fixed_lams
    ]
    checks.append(rp.check("fixed_point_residual_max", max(residuals), tols.fixed_point,
                           "max ||lambda*P(y)-y|| at the computed fixed points"))
    if len(g_grid) >= 2:
        g_vals = g_values(proj, g_grid)
        checks.append(rp.check("g_increasing_violation", _max_adjacent(-np.asarray(g_vals)), 0.0,
                               "g must increase along the lambda grid"))
    if len(h_grid) >= 2:
        h_vals = h_values(proj, h_grid)
        checks.append(rp.check("h_decreasing_violation", _max_adjacent(h_vals), 0.0,
                               "h must decrease along the lambda grid"))

    xs, vs = [], []
    x_level, v_sphere, x_slack, v_slack = [], [], [], []
    for i, r in enumerate(r_grid):
        x_hat = ls.minimal_norm_point(proj, r, tol=tols.bisection)
        v_hat = ls.sphere_max_point(proj, r, tol=tols.bisection)
        xs.append(x_hat)
        vs.append(v_hat)
        x_level.append(abs(j_value(proj, x_hat) - r))
        v_sphere.append(abs(float(v_hat @ v_hat) - r))
        samples, _ = ls.level_set_samples(proj, r, budgets.n_samples, cfg.seed + 31 * i)
        if samples.shape[0]:
            min_sq = float(np.min(np.einsum("ij,ij->i", samples, samples)))
            x_slack.append(float(x_hat @ x_hat) - min_sq)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 41, i]))
        on_sphere = geo.sample_sphere(rng, budgets.n_samples, proj.dim, r)
        v_slack.append(float(np.max(j_value_batch(proj, on_sphere))) - j_value(proj, v_hat))
    checks.append(rp.check("x_hat_level_residual_max", max(x_level), 10.0 * tols.bisection,
                           "max |J(x_hat_r) - r| over the level grid"))
    checks.append(rp.check("v_hat_sphere_residual_max", max(v_sphere), 10.0 * tols.bisection,
                           "max | ||v_hat_r||^2 - r | over the level grid"))
    checks.append(rp.check("x_hat_min_norm_slack_max", max(x_slack), 1e-6,
                           "max ||x_hat_r||^2 minus the smallest sampled level-set norm"))
    checks.append(rp.check("v_hat_max_j_slack_max", max(v_slack), 1e-8,
                           "max sampled-sphere J minus J(v_hat_r)"))

    pitch = CONTINUITY_PITCH_REL * p0_sq
    fine = np.arange(float(r_grid[0]), float(r_grid[-1]), pitch)
    dr = np.diff(r_grid)
    for which, points in (("x_hat", xs), ("v_hat", vs)):
        steps = np.linalg.norm(np.diff(np.asarray(points), axis=0), axis=1)
        lip = max(float(np.max(steps / dr)), 1e-12)
        jump = ls.continuity_scan(proj, which, fine)
        checks.append(rp.check(f"{which}_continuity_max_jump", jump, 10.0 * lip * pitch,
                               "fine-scan jumps vs 10x the coarse-grid slope estimate"))

    if is_bounded(proj.set):
        rows = ls.gamma_profile_report(proj, r_grid, tol=tols.bisection)
        gammas = np.array([row.gamma for row in rows])
        checks.append(rp.check("gamma_decreasing_violation", _max_adjacent(gammas), -1e-9,
                               "gamma must strictly decrease along the level grid"))
        checks.append(rp.check("gamma_second_difference_violation",
                               -min(row.second_diff for row in rows), 0.0,
                               "central second differences of gamma must be positive"))
        checks.append(rp.check("eigen_residual_max",
                               max(row.eigen_residual for row in rows), 1e-6,
                               "max ||P(v_hat_r) - h_inv(r)*v_hat_r||"))
        checks.append(rp.check("envelope_residual_max",
                               max(row.envelope_residual for row in rows), 5e-4,
                               "max |gamma_fd - (1 - h_inv(r))|"))
        checks.append(rp.check("phi_slope_residual_max",
                               max(abs(row.phi_fd - 0.5 * row.h_inv) for row in rows), 5e-4,
                               "max |phi_fd - h_inv(r)/2|"))
        direct = [ls.gamma_direct(proj, row.r, budgets.n_starts, cfg.seed) for row in rows]
        checks.append(rp.check("gamma_vs_direct_max",
                               max(abs(row.gamma - d) for row, d in zip(rows, direct)), 1e-6,
                               "bisection-based gamma vs direct sphere minimization"))
        checks.append(rp.finding("slope_neg_h_inv_residual_max",
                                 max(row.slope_neg_h_inv_residual for row in rows),
                                 "residual of the claimed slope gamma' = -h_inv(r); the measured "
                                 "slope satisfies gamma' = 1 - h_inv(r) instead (envelope_residual_max)"))
        offsets = [row.phi + 0.5 * row.gamma for row in rows]
        checks.append(rp.finding("sphere_sup_offset_spread",
                                 max(offsets) - min(offsets),
                                 "phi(r) + gamma(r)/2 equals (r + ||P(0)||^2)/2 and varies with r; "
                                 "it is not a single constant"))
    extra = {
        "r_grid": [float(r) for r in r_grid],
        "g_lambda_grid": [float(v) for v in g_grid],
        "h_lambda_grid": [float(v) for v in h_grid],
    }
    return checks, extra


def _suite_t2(cfg):
    if cfg.potential is None:
        raise SpecValidationError("suite t2 requires a potential in the config")
    proj = cfg.make_projector()
    q = cfg.potential
    tols = cfg.tolerances
    budgets = cfg.budgets
    checks = []

    mono = eq.check_monotone(q, budgets.n_samples, cfg.seed)
    checks.append(rp.check("monotonicity_violation", -mono, 1e-12,
                           "negated min of <Q(x)-Q(y), x-y> over sampled pairs"))

    r_grid = proj.p0_norm_sq * 2.0 ** np.arange(-3, 6)
    est = eq.lambda_star_estimate(proj, q, r_grid, samples_per_r=64, seed=cfg.seed,
                                  n_starts=budgets.n_starts)
    checks.append(rp.check("lambda_star_nonnegative", -est.value, 0.0,
                           "the solvability threshold estimate must be >= 0"))

    solutions = []
    failed = []
    worst = 0.0
    for lam in sorted(v for v in cfg.lambda_grid if v > 0.0):
        try:
            res = eq.solve_projection_equation(proj, q, lam, tol=tols.optimizer,
                                               max_iter=budgets.max_iter)
            solutions.append({
                "lambda": lam,
                "x": [float(v) for v in res.point],
                "residual": res.residual,
                "iterations": res.iterations,
            })
            worst = max(worst, res.residual)
        except ConvergenceError as exc:
            failed.append(lam)
            worst = max(worst, float(exc.last_residual or np.inf))
    if solutions or failed:
        detail = "max ||P(x)+lambda*Q(x)|| over the solved lambda grid"
        if failed:
            detail += "; no convergence at lambda in " + json.dumps(failed)
        checks.append(rp.check("solve_residual_max", worst, tols.optimizer, detail))

    lam_c = est.value + 0.1
    try:
        res_c = eq.solve_projection_equation(proj, q, lam_c, tol=tols.optimizer,
                                             max_iter=budgets.max_iter)
        consistency = res_c.residual
    except ConvergenceError as exc:
        consistency = float(exc.last_residual or np.inf)
    checks.append(rp.check("lambda_star_consistency_residual", consistency, tols.optimizer,
                           "the equation must be solvable at lambda_star_estimate + 0.1"))

    extra = {
        "lambda_star_estimate": est.value,
        "argmin_r": est.argmin_r,
        "solutions": solutions,
    }
    return checks, extra


def _suite_t3(cfg):
    if cfg.measure_space is None:
        raise SpecValidationError("suite t3 requires a measure_space in the config")
    proj = cfg.make_projector()
    _require_origin_outside(proj, cfg)
    space = cfg.measure_space
    budgets = cfg.budgets
    p0_sq = proj.p0_norm_sq
    r_grid = cfg.r_grid(p0_sq)
    records = []
    unhalved = []
    halved = []
    for r in r_grid:
        rec = ig.verify_extrema_equalities(space, proj, r, n_starts=budgets.n_starts,
                                           seed=cfg.seed)
        records.append(rec)
        w_pt = ls.sphere_min_point(proj, r, budgets.n_starts, cfg.seed)
        inf_j = j_value(proj, w_pt)
        max_res = residual_sq(proj, w_pt)
        unhalved.append(abs(inf_j - (r + p0_sq - max_res)))
        halved.append(abs(inf_j - 0.5 * (r + p0_sq - max_res)))
    checks = [
        rp.check("gap_min_max", max(rec.gap_min for rec in records), 1e-4,
                 "max relative gap between the class infimum and the sphere bound"),
        rp.check("gap_max_max", max(rec.gap_max for rec in records), 1e-4,
                 "max relative gap between the class supremum and the sphere bound"),
        rp.check("constant_attainment_failures",
                 float(sum(not rec.attained_by_constant for rec in records)), 0.0,
                 "levels where a constant extremizer missed feasibility or its bound"),
        rp.check("search_undercut_max",
                 max(rec.rhs_min - rec.lhs_min for rec in records), 1e-6,
                 "search over the constraint class must never beat the sphere infimum"),
        rp.check("sphere_inf_j_identity_residual_max", max(halved), 1e-6,
                 "max |inf J on the sphere - (r + ||P(0)||^2 - max residual)/2|"),
        rp.finding("unhalved_sphere_inf_identity_residual_max", max(unhalved),
                   "without the factor 1/2 the sphere infimum identity fails by this much; "
                   "the halved form holds (sphere_inf_j_identity_residual_max)"),
    ]
    extra = {
        "eta_mass": space.eta_mass,
        "records": [dataclasses.asdict(rec) for rec in records],
    }
    return checks, extra


_SUITES = {
    "geometry": _suite_geometry,
    "t1": _suite_t1,
    "t2": _suite_t2,
    "t3": _suite_t3,
}


def _cmd_project(cfg, args):
    if len(args.point) == 1 and args.point[0].lstrip().startswith("["):
        try:
            point = json.loads(args.point[0])
        except json.JSONDecodeError as exc:
            raise SpecValidationError(f"point is not valid JSON: {exc}") from exc
        if not isinstance(point, list):
            raise SpecValidationError("point must be a JSON array")
    else:
        try:
            point = [float(v) for v in args.point]
        except ValueError as exc:
            raise SpecValidationError(f"point coordinates must be numbers: {exc}") from exc
    if len(point) != cfg.dimension:
        raise DimensionMismatchError(
            f"point has {len(point)} coordinates, expected dimension {cfg.dimension}"
        )
    proj = cfg.make_projector()
    out = proj.project(np.asarray(point, dtype=np.float64))
    _write_out(rp.emit_json([float(v) for v in out]), args.out)
    return 0


def _cmd_verify(cfg, args):
    checks, extra = _SUITES[args.suite](cfg)
    payload = rp.checks_payload(args.suite, checks, extra)
    _write_out(rp.emit_json(payload), args.out)
    return 1 if rp.has_fail(checks) else 0


def _cmd_profile(cfg, args):
    proj = cfg.make_projector()
    if args.kind == "g":
        grid = _g_grid(cfg)
        text = rp.profile_csv(grid, g_values(proj, grid) if grid else [])
    elif args.kind == "h":
        grid = _h_grid(cfg)
        text = rp.profile_csv(grid, h_values(proj, grid) if grid else [])
    else:
        _require_origin_outside(proj, cfg)
        rows = ls.gamma_profile_report(proj, cfg.r_grid(proj.p0_norm_sq),
                                       tol=cfg.tolerances.bisection)
        text = rp.gamma_csv(rows)
    _write_out(text, args.out)
    return 0


def _cmd_solve_eq(cfg, args):
    if cfg.potential is None:
        raise SpecValidationError("solve-eq requires a potential in the config")
    lam = float(args.lam)
    if not lam > 0.0:
        raise SpecValidationError("--lambda must be > 0")
    try:
        res = eq.solve_projection_equation(cfg.make_projector(), cfg.potential, lam,
                                           tol=cfg.tolerances.optimizer,
                                           max_iter=cfg.budgets.max_iter)
    except ConvergenceError as exc:
        payload = {"no_solution_found": True, "best_residual": float(exc.last_residual or np.inf)}
        _write_out(rp.emit_json(payload), args.out)
        return 1
    payload = {
        "x": [float(v) for v in res.point],
        "residual": res.residual,
        "iterations": res.iterations,
    }
    _write_out(rp.emit_json(payload), args.out)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="projkit",
        description="Verification toolkit for metric projections onto convex sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_proj = sub.add_parser("project", help="print the projection of a point")
    p_proj.add_argument("config")
    p_proj.add_argument("point", nargs="+", help="coordinates, or one JSON array")

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("config")
    p_ver.add_argument("--suite", required=True, choices=sorted(_SUITES))

    p_prof = sub.add_parser("profile", help="write a profile CSV")
    p_prof.add_argument("kind", choices=["g", "h", "gamma"])
    p_prof.add_argument("config")

    p_solve = sub.add_parser("solve-eq", help="solve P(x) + lambda*Q(x) = 0")
    p_solve.add_argument("config")
    p_solve.add_argument("--lambda", dest="lam", type=float, required=True)

    for p in (p_proj, p_ver, p_prof, p_solve):
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


_COMMANDS = {
    "project": _cmd_project,
    "verify": _cmd_verify,
    "profile": _cmd_profile,
    "solve-eq": _cmd_solve_eq,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=int(args.seed))
        return _COMMANDS[args.command](cfg, args)
    except (SpecValidationError, PreconditionError, LevelRangeError,
            DimensionMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
