"""Command-line front end: one subcommand per pipeline stage plus named
experiment suites with CSV/JSON/SVG artifacts.

Exit-code contract: 0 when every asserted inequality holds with margin
beyond its error bar, 2 for usage errors, 1 otherwise.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from .boundary import parse_bc, robin
from .convex_geometry import class_membership
from .counterexample import counterexample_scan, first_reversed
from .domains import concentric_annulus, eccentric_annulus
from .fem_eig import richardson_estimate, solve_domain
from .flow import (
    MembershipRefusal,
    advance_fronts,
    hersch_weinberger_check,
    record_subdomain_eigenvalues,
)
from .mesh import StarAnnularDomain, TriMesh, build_transfinite_mesh
from .morse3d import classify_critical_points, saddle_sphere_section, trace_flow
from .shell_radial import (
    ShellProblem,
    maxmin_split,
    monotonicity_scan,
    smallest_eigenvalue,
)
from .svgplot import fronts_svg, plot_svg

CSV_FMT = "{:.12g}"


def _csv_cell(x):
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return CSV_FMT.format(x)
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_csv_cell(x) for x in row) + "\n")


def _plain(obj):
    """Dataclasses/arrays/numpy scalars to JSON-ready structures."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _plain(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def json_dumps(obj) -> str:
    # Python serializes floats with the shortest representation that
    # round-trips exactly (at most 17 significant digits)
    return json.dumps(_plain(obj), indent=2, sort_keys=True)


def emit_json(obj, path=None):
    text = json_dumps(obj)
    if path:
        with open(path, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_shell(args) -> int:
    prob = ShellProblem(args.dim, args.alpha, args.beta,
                        parse_bc(args.inner), parse_bc(args.outer))
    res = smallest_eigenvalue(prob, tol=args.tol)
    payload = {"lambda": res.lam, "zero_count": res.zero_count,
               "residual": res.residual}
    if args.json:
        emit_json(payload)
    else:
        print(f"lambda_1 = {res.lam:.12g}  (zero_count={res.zero_count}, "
              f"residual={res.residual:.3g})")
    if args.profile_csv:
        write_csv(args.profile_csv, ["r", "u"],
                  list(zip(res.r.tolist(), res.profile.tolist())))
    return 0


def _steiner_check_2d(domain: StarAnnularDomain, delta=0.25,
                      n_samples=200_000, seed=0):
    """Monte-Carlo area of the delta-parallel body of the inner loop against
    the planar Steiner polynomial A + P*delta + pi*delta^2."""
    from .domains import _point_polygon_distance

    theta = np.arange(domain.n_samples) * (2 * np.pi / domain.n_samples)
    poly = domain.boundary_points("inner", theta)
    lo = poly.min(axis=0) - delta
    hi = poly.max(axis=0) + delta
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, hi, size=(n_samples, 2))
    rel = pts - domain.center
    r = np.hypot(rel[:, 0], rel[:, 1])
    th = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2 * np.pi)
    inside = r <= domain.radius_inner(th)
    near = _point_polygon_distance(pts, poly) <= delta
    hit = inside | near
    box = float(np.prod(hi - lo))
    p_hat = hit.mean()
    estimate = box * p_hat
    sigma = box * math.sqrt(max(p_hat * (1 - p_hat), 1e-30) / n_samples)
    area = 0.5 * abs(float(np.sum(
        poly[:, 0] * np.roll(poly[:, 1], -1)
        - np.roll(poly[:, 0], -1) * poly[:, 1])))
    perim = float(np.sum(np.hypot(
        *(np.roll(poly, -1, axis=0) - poly).T)))
    predicted = area + perim * delta + math.pi * delta ** 2
    return {"delta": delta, "mc_area": estimate, "mc_sigma": sigma,
            "steiner_area": predicted,
            "ok": bool(abs(estimate - predicted) <= 3 * sigma)}


def cmd_match(args) -> int:
    domain = StarAnnularDomain.load(args.domain)
    report = class_membership(domain=domain)
    payload = _plain(report)
    if args.steiner_check:
        payload["steiner_check"] = _steiner_check_2d(domain)
    emit_json(payload)
    ok = report.in_class and payload.get("steiner_check", {"ok": True})["ok"]
    return 0 if ok else 1


def cmd_mesh(args) -> int:
    domain = StarAnnularDomain.load(args.domain)
    mesh = build_transfinite_mesh(domain, args.ntheta, args.nr,
                                  grading=args.grading)
    mesh.save(args.out)
    emit_json({"n_vertices": mesh.n_vertices, "n_triangles": mesh.n_triangles,
               "area": mesh.area(), "out": args.out})
    return 0


def cmd_fem(args) -> int:
    mesh = TriMesh.load(args.mesh)
    bc_in, bc_out = parse_bc(args.inner), parse_bc(args.outer)
    potential = None
    if args.potential:
        with open(args.potential) as f:
            potential = np.asarray(json.load(f), dtype=float)
    if args.levels > 1:
        if mesh.domain is None:
            print("richardson extrapolation needs a mesh with its domain "
                  "attached", file=sys.stderr)
            return 2
        rich = richardson_estimate(mesh.domain, bc_in, bc_out,
                                   levels=args.levels, tol=args.tol)
        payload = {"lambda": rich.lam, "error_bar": rich.error_bar,
                   "order": rich.order, "levels": args.levels}
        sol = None
    else:
        sol = solve_domain(mesh, bc_in, bc_out, potential=potential,
                           tol=args.tol)
        payload = {"lambda": sol.lam, "residual": sol.residual}
    if args.json:
        emit_json(payload)
    else:
        print(f"lambda_1 = {payload['lambda']:.12g}")
    if args.eigvec:
        if sol is None:
            sol = solve_domain(mesh, bc_in, bc_out, potential=potential,
                               tol=args.tol)
        rows = list(zip(mesh.vertices[:, 0].tolist(),
                        mesh.vertices[:, 1].tolist(),
                        sol.nodal_values.tolist()))
        write_csv(args.eigvec, ["x", "y", "u"], rows)
    return 0


def cmd_flow(args) -> int:
    mesh = TriMesh.load(args.mesh)
    bc_in, bc_out = parse_bc(args.inner), parse_bc(args.outer)
    sol = solve_domain(mesh, bc_in, bc_out)
    record = advance_fronts(sol, t_end=-abs(args.tmax), dt=args.dt)
    if args.subdomain_eig:
        kind, _, every = args.subdomain_eig.partition(":")
        if kind != "every" or not every.isdigit():
            print("--subdomain-eig expects every:k", file=sys.stderr)
            return 2
        # index 0 is the seed itself: the swept region is empty there
        indices = list(range(int(every), len(record.times), int(every)))
        if not indices or indices[-1] != len(record.times) - 1:
            indices.append(len(record.times) - 1)
        record_subdomain_eigenvalues(record, bc_in, bc_out, indices)
    if args.csv:
        rows = []
        for i, t in enumerate(record.times):
            rn = record.lam_rn.get(i, (math.nan, math.nan))
            nr = record.lam_nr.get(i, (math.nan, math.nan))
            rows.append((t, record.areas_in[i], record.areas_out[i],
                         rn[0], rn[1], nr[0], nr[1]))
        write_csv(args.csv, ["t", "area_in", "area_out", "lam_rn",
                             "lam_rn_bar", "lam_nr", "lam_nr_bar"], rows)
    if args.svg:
        fronts_svg(record, path=args.svg)
    emit_json({"t_stop": record.t_stop, "stop_reason": record.stop_reason,
               "area_in": record.areas_in[-1],
               "area_out": record.areas_out[-1],
               "coverage": (record.areas_in[-1] + record.areas_out[-1])
               / mesh.area()})
    return 0


def cmd_hw_verify(args) -> int:
    domain = StarAnnularDomain.load(args.domain)
    try:
        report = hersch_weinberger_check(domain, args.hin, args.hout,
                                         fem_levels=args.levels)
    except MembershipRefusal as exc:
        emit_json({"refused": True, "membership": _plain(exc.report)})
        return 1
    emit_json(report)
    return 0 if report.passed else 1


def cmd_counterexample(args) -> int:
    k_values = [float(k) for k in args.k.split(",")]
    rows = counterexample_scan(args.alpha, k_values)
    header = ["k", "beta_k", "lambda_domain", "lambda_domain_bar",
              "lambda_shell", "lambda_rect", "reversed"]
    table = [(r.k, r.beta_k, r.lambda_domain, r.lambda_domain_bar,
              r.lambda_shell, r.lambda_rect, r.reversed) for r in rows]
    if args.csv:
        write_csv(args.csv, header, table)
    print(",".join(header))
    for row in table:
        print(",".join(_csv_cell(x) for x in row))
    fr = first_reversed(rows)
    print(f"first reversed k: {fr}")
    ok = all(r.error is None for r in rows) and rows[-1].reversed
    return 0 if ok else 1


def cmd_morse3d(args) -> int:
    did = False
    status = 0
    if args.classify:
        did = True
        points = classify_critical_points()
        emit_json([{"location": p.location,
                    "hessian_eigenvalues": p.hessian_eigenvalues,
                    "index": p.index} for p in points])
        if [p.index for p in points] != [0, 1, 0]:
            status = 1
    if args.trace:
        did = True
        x0 = [float(v) for v in args.trace.split(",")]
        direction = "ascent" if args.ascent else "descent"
        traj = trace_flow(x0, direction=direction)
        emit_json({"start": x0, "direction": direction,
                   "steps": len(traj.times) - 1,
                   "limit": traj.limit})
    if args.section is not None:
        did = True
        circle = saddle_sphere_section(args.section)
        if args.csv:
            write_csv(args.csv, ["x", "y", "z"],
                      [tuple(p) for p in circle.tolist()])
        print(f"section verified with {len(circle)} samples")
    if not did:
        print("nothing to do: pass --classify, --trace, or --section",
              file=sys.stderr)
        return 2
    return status


# ---------------------------------------------------------------------------
# Suites


@dataclasses.dataclass
class ExperimentConfig:
    suite: str
    out_dir: str = "."
    domain_file: str | None = None
    bc_inner: str = "robin:1.0"
    bc_outer: str = "robin:1.0"
    tol: float = 1e-10
    alpha: float = 0.5
    k_values: tuple = (2.0, 4.0, 8.0, 16.0)
    grid: tuple = (1.5, 2.0, 3.0, 4.0)
    tmax: float = 3.0
    dt: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.domain_file and not os.path.exists(self.domain_file):
            raise FileNotFoundError(self.domain_file)


def _suite_shell_tables(cfg, results):
    bc = parse_bc(cfg.bc_inner)
    rn = monotonicity_scan(2, 1.0, None, bc, cfg.grid, "rn_outer",
                           tol=cfg.tol)
    grid_in = [0.25 * g for g in cfg.grid if 0.25 * g < 1.0] or [0.5]
    nr = monotonicity_scan(2, None, 1.0, bc, grid_in, "nr_inner", tol=cfg.tol)
    write_csv(os.path.join(cfg.out_dir, "shell_rn.csv"),
              ["outer_radius", "lambda"], rn)
    write_csv(os.path.join(cfg.out_dir, "shell_nr.csv"),
              ["inner_radius", "lambda"], nr)
    prob = ShellProblem(2, 1.0, 2.0, bc, bc)
    delta_star, lam_split = maxmin_split(prob, tol=cfg.tol)
    lam_direct = smallest_eigenvalue(prob, tol=cfg.tol).lam
    # lambda-vs-delta curves around the crossing
    deltas = np.linspace(1.1, 1.9, 17)
    from .boundary import neumann

    curve_rn = [(d, smallest_eigenvalue(
        ShellProblem(2, 1.0, d, bc, neumann()), tol=cfg.tol).lam)
        for d in deltas]
    curve_nr = [(d, smallest_eigenvalue(
        ShellProblem(2, d, 2.0, neumann(), bc), tol=cfg.tol).lam)
        for d in deltas]
    plot_svg([("lambda_rn", np.array(curve_rn)),
              ("lambda_nr", np.array(curve_nr)),
              ("_crossing", np.array([[delta_star, lam_split]] * 2))],
             title="max-min split", xlabel="delta", ylabel="lambda",
             path=os.path.join(cfg.out_dir, "maxmin.svg"))
    results["delta_star"] = delta_star
    results["lambda_split"] = lam_split
    results["lambda_direct"] = lam_direct
    ok = (all(a > b for (_, a), (_, b) in zip(rn, rn[1:]))
          and all(a < b for (_, a), (_, b) in zip(nr, nr[1:]))
          and abs(lam_split - lam_direct) < 1e-6 * max(1.0, lam_direct))
    return ok, (f"RN table decreasing, NR table increasing; max-min split "
                f"matches the direct eigenvalue to "
                f"{abs(lam_split - lam_direct):.2e}")


def _suite_hw_verify(cfg, results):
    if cfg.domain_file:
        domain = StarAnnularDomain.load(cfg.domain_file)
    else:
        domain = eccentric_annulus(1.0, 2.0, offset=0.3)
    h_in = parse_bc(cfg.bc_inner).h
    h_out = parse_bc(cfg.bc_outer).h
    report = hersch_weinberger_check(domain, h_in, h_out)
    results["report"] = _plain(report)
    return report.passed, (f"lambda(domain)={report.lam_domain:.6g} <= "
                           f"lambda(shell)={report.lam_shell:.6g}, margin "
                           f"{report.margin:.3g} (bar "
                           f"{report.lam_domain_bar:.1e})")


def _suite_flow_sweep(cfg, results):
    if cfg.domain_file:
        domain = StarAnnularDomain.load(cfg.domain_file)
    else:
        domain = concentric_annulus(1.0, 2.0)
    mesh = build_transfinite_mesh(domain, 96, 12)
    bc_in, bc_out = parse_bc(cfg.bc_inner), parse_bc(cfg.bc_outer)
    sol = solve_domain(mesh, bc_in, bc_out)
    record = advance_fronts(sol, t_end=-abs(cfg.tmax), dt=cfg.dt)
    coverage = (record.areas_in[-1] + record.areas_out[-1]) / mesh.area()
    rows = list(zip(record.times, record.areas_in, record.areas_out))
    write_csv(os.path.join(cfg.out_dir, "sweep.csv"),
              ["t", "area_in", "area_out"], rows)
    fronts_svg(record, path=os.path.join(cfg.out_dir, "fronts.svg"))
    results["coverage"] = coverage
    results["t_stop"] = record.t_stop
    results["stop_reason"] = record.stop_reason
    return coverage >= 0.99, f"area coverage {coverage:.4f} (need >= 0.99)"


def _suite_counterexample(cfg, results):
    rows = counterexample_scan(cfg.alpha, cfg.k_values)
    write_csv(os.path.join(cfg.out_dir, "counterexample.csv"),
              ["k", "beta_k", "lambda_domain", "lambda_domain_bar",
               "lambda_shell", "lambda_rect", "reversed"],
              [(r.k, r.beta_k, r.lambda_domain, r.lambda_domain_bar,
                r.lambda_shell, r.lambda_rect, r.reversed) for r in rows])
    results["rows"] = _plain(rows)
    results["first_reversed"] = first_reversed(rows)
    ok = all(r.error is None for r in rows) and rows[-1].reversed
    return ok, f"first reversed k = {results['first_reversed']}"


def _suite_morse3d(cfg, results):
    points = classify_critical_points()
    results["critical_points"] = [
        {"location": _plain(p.location), "index": p.index,
         "hessian_eigenvalues": _plain(p.hessian_eigenvalues)}
        for p in points]
    circle = saddle_sphere_section(4.0)
    write_csv(os.path.join(cfg.out_dir, "section.csv"), ["x", "y", "z"],
              [tuple(p) for p in circle.tolist()])
    ok = [p.index for p in points] == [0, 1, 0]
    return ok, f"{len(points)} critical points, indices " \
               f"{[p.index for p in points]}"


def _suite_geometry_checks(cfg, results):
    from .convex_geometry import (
        alexandrov_fenchel_check,
        cube,
        icosphere,
        matched_shell,
    )

    rows = alexandrov_fenchel_check(cube(2.0))
    af_ok = all(r[4] for r in rows)
    spec = matched_shell(cube(2.0), 16 * math.pi, 8.0, 3)
    ball = icosphere(3, radius=2.0)
    dom_report = class_membership(inner=cube(1.0), outer=ball)
    results["alexandrov_fenchel"] = _plain(rows)
    results["matched_shell"] = {"alpha": spec.alpha, "beta": spec.beta}
    results["membership_ball_minus_cube"] = _plain(dom_report)
    ok = af_ok and dom_report.in_class
    return ok, f"AF chain ok={af_ok}; ball-minus-cube in class: " \
               f"{dom_report.in_class}"


_SUITES = {
    "shell-tables": _suite_shell_tables,
    "hw-verify": _suite_hw_verify,
    "flow-sweep": _suite_flow_sweep,
    "counterexample": _suite_counterexample,
    "morse3d": _suite_morse3d,
    "geometry-checks": _suite_geometry_checks,
}


def run_suite(cfg: ExperimentConfig) -> int:
    if cfg.suite not in _SUITES:
        raise ValueError(f"unknown suite {cfg.suite!r}; choose from "
                         f"{sorted(_SUITES)}")
    os.makedirs(cfg.out_dir, exist_ok=True)
    results = {"suite": cfg.suite, "seed": cfg.seed}
    ok, summary = _SUITES[cfg.suite](cfg, results)
    results["passed"] = ok
    emit_json(results, os.path.join(cfg.out_dir, "results.json"))
    with open(os.path.join(cfg.out_dir, "summary.txt"), "w") as f:
        f.write(f"suite: {cfg.suite}\npassed: {ok}\n{summary}\n")
    print(f"[{cfg.suite}] {'PASS' if ok else 'FAIL'}: {summary}")
    return 0 if ok else 1


def cmd_suite(args) -> int:
    overrides = {}
    if args.config:
        with open(args.config) as f:
            overrides = json.load(f)
    fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(overrides) - fields
    if unknown:
        print(f"unknown config keys: {sorted(unknown)}", file=sys.stderr)
        return 2
    params = {"suite": args.name, "out_dir": args.out}
    params.update({k: tuple(v) if isinstance(v, list) else v
                   for k, v in overrides.items()})
    try:
        cfg = ExperimentConfig(**params)
        return run_suite(cfg)
    except (ValueError, FileNotFoundError) as exc:
        print(str(exc), file=sys.stderr)
        return 2


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shellspec",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("shell", help="radial shell eigenvalue")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--inner", default="robin:1.0")
    s.add_argument("--outer", default="robin:1.0")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--json", action="store_true")
    s.add_argument("--profile-csv")
    s.set_defaults(func=cmd_shell)

    s = sub.add_parser("match", help="comparison-class membership")
    s.add_argument("--domain", required=True)
    s.add_argument("--steiner-check", action="store_true")
    s.set_defaults(func=cmd_match)

    s = sub.add_parser("mesh", help="build a transfinite mesh")
    s.add_argument("--domain", required=True)
    s.add_argument("--ntheta", type=int, default=64)
    s.add_argument("--nr", type=int, default=8)
    s.add_argument("--grading", type=float, default=1.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_mesh)

    s = sub.add_parser("fem", help="first eigenvalue on a mesh")
    s.add_argument("--mesh", required=True)
    s.add_argument("--inner", default="robin:1.0")
    s.add_argument("--outer", default="robin:1.0")
    s.add_argument("--potential")
    s.add_argument("--levels", type=int, default=1)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--json", action="store_true")
    s.add_argument("--eigvec")
    s.set_defaults(func=cmd_fem)

    s = sub.add_parser("flow", help="backward-time front sweep")
    s.add_argument("--mesh", required=True)
    s.add_argument("--inner", default="robin:1.0")
    s.add_argument("--outer", default="robin:1.0")
    s.add_argument("--tmax", type=float, default=3.0)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--subdomain-eig")
    s.add_argument("--csv")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_flow)

    s = sub.add_parser("hw-verify", help="shell-comparison pipeline")
    s.add_argument("--domain", required=True)
    s.add_argument("--hin", type=float, default=1.0)
    s.add_argument("--hout", type=float, default=1.0)
    s.add_argument("--levels", type=int, default=3)
    s.set_defaults(func=cmd_hw_verify)

    s = sub.add_parser("counterexample", help="reversal scan")
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--k", default="2,4,8,16")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("morse3d", help="explicit 3D Morse function")
    s.add_argument("--classify", action="store_true")
    s.add_argument("--trace")
    s.add_argument("--descent", action="store_true")
    s.add_argument("--ascent", action="store_true")
    s.add_argument("--section", type=float)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_morse3d)

    s = sub.add_parser("suite", help="named experiment suite")
    s.add_argument("name", choices=sorted(_SUITES))
    s.add_argument("--out", default=".")
    s.add_argument("--config")
    s.set_defaults(func=cmd_suite)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
