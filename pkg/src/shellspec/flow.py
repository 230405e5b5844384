"""Gradient-flow machinery on computed first eigenfunctions: backward-time
flow of the two boundary loops, swept subdomains with mixed eigenvalues,
the shell-comparison verdict for a domain, the effectless-cut estimate, and
the tilt-and-cutoff perturbation that makes the eigenfunction a Morse
function without moving the eigenvalue.

Fronts are closed Lagrangian polylines advanced by dphi/ds = +grad(u)
(s = -t): the eigenfunction increases away from both boundary loops, so
gradient ascent moves each loop into the interior.  A front point freezes
when the local speed |grad u| drops below a fixed fraction of the global
maximum — the continuous flow takes infinite time to reach critical points,
and the area-exhaustion measurement reports what the truncation missed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from matplotlib.tri import LinearTriInterpolator, Triangulation

from .boundary import BoundaryCondition, neumann
from .convex_geometry import class_membership
from .fem_eig import EigenSolution, richardson_estimate, solve_domain
from .mesh import MeshingError, StarAnnularDomain, TriMesh, build_transfinite_mesh
from .shell_radial import ShellProblem, smallest_eigenvalue


class FlowDegenerateError(RuntimeError):
    """Front self-intersection or front collision; carries the last record."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class RemeshError(RuntimeError):
    pass


class CollarError(ValueError):
    pass


class MembershipRefusal(ValueError):
    def __init__(self, report):
        super().__init__("domain is outside the comparison class")
        self.report = report


# ---------------------------------------------------------------------------
# Gradient field


def gradient_field(solution: EigenSolution) -> np.ndarray:
    """Area-weighted average of the constant P1 triangle gradients."""
    mesh = solution.mesh_ref
    p = mesh.vertices[mesh.triangles]
    u = solution.nodal_values[mesh.triangles]
    b = p[:, [1, 2, 0], 1] - p[:, [2, 0, 1], 1]
    c = p[:, [2, 0, 1], 0] - p[:, [1, 2, 0], 0]
    area = mesh.signed_areas()
    gx = np.sum(u * b, axis=1) / (2 * area)
    gy = np.sum(u * c, axis=1) / (2 * area)
    out = np.zeros_like(mesh.vertices)
    w = np.zeros(mesh.n_vertices)
    for k in range(3):
        np.add.at(out[:, 0], mesh.triangles[:, k], gx * area)
        np.add.at(out[:, 1], mesh.triangles[:, k], gy * area)
        np.add.at(w, mesh.triangles[:, k], area)
    out /= w[:, None]
    return out


def _interpolators(solution: EigenSolution):
    mesh = solution.mesh_ref
    tri = Triangulation(mesh.vertices[:, 0], mesh.vertices[:, 1], mesh.triangles)
    g = gradient_field(solution)
    return (LinearTriInterpolator(tri, g[:, 0]),
            LinearTriInterpolator(tri, g[:, 1]))


# ---------------------------------------------------------------------------
# Front advance


@dataclass
class FlowFront:
    t: float
    points: np.ndarray  # (n, 2) ordered closed polyline
    origin: str  # "inner" | "outer"
    arclength_params: np.ndarray  # theta labels inherited from the seed


@dataclass
class SweepRecord:
    times: list = field(default_factory=list)
    fronts_in: list = field(default_factory=list)
    fronts_out: list = field(default_factory=list)
    areas_in: list = field(default_factory=list)
    areas_out: list = field(default_factory=list)
    lam_rn: dict = field(default_factory=dict)  # time index -> (lam, bar)
    lam_nr: dict = field(default_factory=dict)
    freeze_t_in: np.ndarray | None = None
    freeze_t_out: np.ndarray | None = None
    center: np.ndarray | None = None
    solution: EigenSolution | None = None
    stop_reason: str = ""

    @property
    def t_stop(self):
        return self.times[-1]


def _shoelace(points):
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_intersect(p, q):
    """Any proper intersection between segment sets p and q ((n,2,2) arrays)."""
    a, b = p[:, 0], p[:, 1]
    c, d = q[:, 0], q[:, 1]

    def cross(o, u, v):
        return ((u[:, 0] - o[:, 0]) * (v[:, 1] - o[:, 1])
                - (u[:, 1] - o[:, 1]) * (v[:, 0] - o[:, 0]))

    na, nb = len(a), len(c)
    A = np.repeat(np.arange(na), nb)
    B = np.tile(np.arange(nb), na)
    a, b, c, d = a[A], b[A], c[B], d[B]
    d1 = cross(c, d, a)
    d2 = cross(c, d, b)
    d3 = cross(a, b, c)
    d4 = cross(a, b, d)
    hit = (d1 * d2 < 0) & (d3 * d4 < 0)
    return bool(np.any(hit))


def _polyline_self_intersects(points):
    n = len(points)
    seg = np.stack([points, np.roll(points, -1, axis=0)], axis=1)
    # adjacent segments always share endpoints; the proper test excludes them
    return _segments_intersect(seg, seg)


def _resample_closed(points, params, h):
    """Arc-length resampling keeping adjacent spacing within [h/2, 2h]."""
    d = np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)
    if np.all((d >= 0.5 * h) & (d <= 2.0 * h)):
        return points, params
    s = np.concatenate([[0.0], np.cumsum(d)])
    total = s[-1]
    n_new = max(8, int(round(total / h)))
    s_new = np.linspace(0.0, total, n_new, endpoint=False)
    closed = np.vstack([points, points[:1]])
    phase = np.unwrap(params)
    phase = np.concatenate([phase, [phase[0] + 2 * np.pi * np.sign(phase[1] - phase[0] + 1e-30)]])
    x = np.interp(s_new, s, closed[:, 0])
    y = np.interp(s_new, s, closed[:, 1])
    th = np.mod(np.interp(s_new, s, phase), 2 * np.pi)
    return np.column_stack([x, y]), th


def _seed_front(mesh: TriMesh, which: str, center):
    loop = mesh.boundary_loop(which)
    pts = mesh.vertices[loop]
    theta = np.mod(np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0]),
                   2 * np.pi)
    if _shoelace(pts) < 0:
        pts, theta = pts[::-1], theta[::-1]
    return pts.copy(), theta


def advance_fronts(solution: EigenSolution, t_end: float, dt: float,
                   eps_stop_frac: float = 1e-3, resample: bool = True,
                   check_every: int = 5) -> SweepRecord:
    """Flow both boundary loops to time t_end < 0 with classical 4th-order
    steps of size dt, freezing points whose speed drops below the threshold."""
    if t_end >= 0 or dt <= 0:
        raise ValueError("need t_end < 0 and dt > 0")
    mesh = solution.mesh_ref
    ix, iy = _interpolators(solution)
    gmax = float(np.max(np.hypot(*gradient_field(solution).T)))
    eps_stop = eps_stop_frac * gmax

    if mesh.domain is not None:
        center = np.asarray(mesh.domain.center, dtype=float)
    else:
        center = mesh.vertices[mesh.boundary_loop("inner")].mean(axis=0)

    def velocity(pts):
        vx = ix(pts[:, 0], pts[:, 1])
        vy = iy(pts[:, 0], pts[:, 1])
        bad = np.ma.getmaskarray(vx) | np.ma.getmaskarray(vy)
        v = np.column_stack([np.ma.filled(vx, 0.0), np.ma.filled(vy, 0.0)])
        v[bad] = 0.0  # left the mesh: freeze in place
        return v

    fronts = {}
    for which in ("inner", "outer"):
        pts, theta = _seed_front(mesh, which, center)
        fronts[which] = {
            "pts": pts, "theta": theta,
            "alive": np.ones(len(pts), bool),
            "freeze_t": np.full(len(pts), np.nan),
        }
    seed_area = {w: abs(_shoelace(fronts[w]["pts"])) for w in fronts}
    h_target = {w: float(np.mean(np.linalg.norm(
        np.roll(fronts[w]["pts"], -1, axis=0) - fronts[w]["pts"], axis=1)))
        for w in fronts}

    record = SweepRecord(center=center, solution=solution)

    def snapshot(t):
        record.times.append(t)
        fi, fo = fronts["inner"], fronts["outer"]
        record.fronts_in.append(FlowFront(t, fi["pts"].copy(), "inner",
                                          fi["theta"].copy()))
        record.fronts_out.append(FlowFront(t, fo["pts"].copy(), "outer",
                                           fo["theta"].copy()))
        record.areas_in.append(abs(_shoelace(fi["pts"])) - seed_area["inner"])
        record.areas_out.append(seed_area["outer"] - abs(_shoelace(fo["pts"])))

    snapshot(0.0)
    n_steps = int(round(-t_end / dt))
    for step in range(1, n_steps + 1):
        t = -step * dt
        for which, f in fronts.items():
            if not np.any(f["alive"]):
                continue
            p = f["pts"]
            k1 = velocity(p)
            k2 = velocity(p + 0.5 * dt * k1)
            k3 = velocity(p + 0.5 * dt * k2)
            k4 = velocity(p + dt * k3)
            move = (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            move[~f["alive"]] = 0.0
            f["pts"] = p + move
            speed = np.hypot(*velocity(f["pts"]).T)
            newly_frozen = f["alive"] & (speed < eps_stop)
            f["freeze_t"][newly_frozen] = t
            f["alive"] &= ~newly_frozen
            if resample and np.all(f["alive"]):
                f["pts"], f["theta"] = _resample_closed(
                    f["pts"], f["theta"], h_target[which])
                f["alive"] = np.ones(len(f["pts"]), bool)
                f["freeze_t"] = np.full(len(f["pts"]), np.nan)
        snapshot(t)

        if step % check_every == 0 or step == n_steps:
            for which, f in fronts.items():
                if _polyline_self_intersects(f["pts"]):
                    record.stop_reason = f"{which} front self-intersection at t={t:.4f}"
                    raise FlowDegenerateError(record.stop_reason, record)
            si = np.stack([fronts["inner"]["pts"],
                           np.roll(fronts["inner"]["pts"], -1, axis=0)], axis=1)
            so = np.stack([fronts["outer"]["pts"],
                           np.roll(fronts["outer"]["pts"], -1, axis=0)], axis=1)
            if _segments_intersect(si, so):
                record.stop_reason = f"front collision at t={t:.4f}"
                raise FlowDegenerateError(record.stop_reason, record)

        if not (np.any(fronts["inner"]["alive"]) or np.any(fronts["outer"]["alive"])):
            record.stop_reason = "all front points below the speed threshold"
            break
    else:
        record.stop_reason = "reached t_end"

    for which, key in (("inner", "freeze_t_in"), ("outer", "freeze_t_out")):
        ft = fronts[which]["freeze_t"].copy()
        ft[np.isnan(ft)] = record.times[-1]
        setattr(record, key, ft)
    return record


# ---------------------------------------------------------------------------
# Swept-subdomain eigenvalues


def _radii_on_grid(points, center, m):
    """Radius samples of a star-shaped closed polyline on the uniform grid."""
    rel = points - center
    theta = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2 * np.pi)
    r = np.hypot(rel[:, 0], rel[:, 1])
    order = np.argsort(theta)
    theta, r = theta[order], r[order]
    if np.any(np.diff(theta) <= 0):
        raise RemeshError("front is not star-shaped about the center")
    grid = np.arange(m) * (2 * np.pi / m)
    theta_ext = np.concatenate([theta - 2 * np.pi, theta, theta + 2 * np.pi])
    r_ext = np.tile(r, 3)
    return np.interp(grid, theta_ext, r_ext)


def subdomain_eigen(record: SweepRecord, side: str, bc_original: BoundaryCondition,
                    time_index: int = -1, n_theta: int = 96, n_r: int = 6,
                    error_bar: bool = False, potential: np.ndarray | None = None):
    """First eigenvalue of the region swept from one boundary loop.

    The original boundary keeps its condition; the moving front gets the
    natural (Neumann) condition.  The front must be star-shaped about the
    sweep center so the transfinite mesher applies.  `potential` gives nodal
    values on the sweep's original mesh (e.g. the perturbation potential of
    the flowed eigenfunction) and is interpolated onto the submesh.
    """
    center = record.center
    t = record.times[time_index]
    front = (record.fronts_in if side == "inner" else record.fronts_out)[time_index]
    seed = (record.fronts_in if side == "inner" else record.fronts_out)[0]
    try:
        m = 4 * n_theta
        r_seed = _radii_on_grid(seed.points, center, m)
        r_front = _radii_on_grid(front.points, center, m)
    except RemeshError as exc:
        raise RemeshError(f"{exc} (side={side}, t={t:.4f})") from exc
    if side == "inner":
        r_in, r_out = r_seed, r_front
        bc_in, bc_out = bc_original, neumann()
    else:
        r_in, r_out = r_front, r_seed
        bc_in, bc_out = neumann(), bc_original
    if np.any(r_out <= r_in):
        raise RemeshError(f"degenerate swept region (side={side}, t={t:.4f})")
    domain = StarAnnularDomain(center, r_in, r_out)
    mesh = build_transfinite_mesh(domain, n_theta, n_r)

    def sampled_potential(sub):
        if potential is None:
            return None
        src = record.solution.mesh_ref
        tri = Triangulation(src.vertices[:, 0], src.vertices[:, 1],
                            src.triangles)
        interp = LinearTriInterpolator(tri, potential)
        vals = interp(sub.vertices[:, 0], sub.vertices[:, 1])
        return np.ma.filled(vals, 0.0)

    lam = solve_domain(mesh, bc_in, bc_out,
                       potential=sampled_potential(mesh)).lam
    if not error_bar:
        return lam
    from .mesh import refine

    fine = refine(mesh)
    lam_fine = solve_domain(fine, bc_in, bc_out,
                            potential=sampled_potential(fine)).lam
    return lam_fine, abs(lam_fine - lam)


def record_subdomain_eigenvalues(record: SweepRecord, bc_inner, bc_outer,
                                 indices, **kw):
    """Fill lam_rn/lam_nr at the given time indices (Lemma 3.3 sampling)."""
    for idx in indices:
        record.lam_rn[idx] = subdomain_eigen(record, "inner", bc_inner,
                                             time_index=idx, error_bar=True, **kw)
        record.lam_nr[idx] = subdomain_eigen(record, "outer", bc_outer,
                                             time_index=idx, error_bar=True, **kw)
    return record


# ---------------------------------------------------------------------------
# Shell-comparison verdict


@dataclass
class ComparisonReport:
    lam_domain: float
    lam_domain_bar: float
    lam_shell: float
    alpha: float
    beta: float
    margin: float  # lam_shell - lam_domain
    passed: bool
    membership: object


def hersch_weinberger_check(domain: StarAnnularDomain, h_in: float, h_out: float,
                            fem_levels: int = 3, n_theta: int = 64,
                            n_r: int = 8) -> ComparisonReport:
    """Shell-comparison pipeline: the concentric shell with matched inner
    perimeter and outer perimeter maximizes the first Robin eigenvalue over
    the admissible class, so lam(domain) <= lam(shell) up to FEM error.
    The parameters map h = 0 to Neumann and h = inf to Dirichlet."""
    from .boundary import from_h

    report = class_membership(domain=domain)
    if not report.in_class:
        raise MembershipRefusal(report)
    bc_in, bc_out = from_h(h_in), from_h(h_out)
    rich = richardson_estimate(domain, bc_in, bc_out,
                               levels=fem_levels, n_theta=n_theta, n_r=n_r)
    shell = ShellProblem(2, report.alpha, report.beta, bc_in, bc_out)
    lam_shell = smallest_eigenvalue(shell).lam
    margin = lam_shell - rich.lam
    return ComparisonReport(rich.lam, rich.error_bar, lam_shell,
                            report.alpha, report.beta, margin,
                            margin >= -rich.error_bar, report)


# ---------------------------------------------------------------------------
# Effectless-cut estimate


@dataclass
class CutEstimate:
    points: np.ndarray
    gap_widths: np.ndarray
    warning: str | None


def effectless_cut_estimate(record: SweepRecord, m: int = 256,
                            gap_factor: float = 0.5) -> CutEstimate:
    """Midcurve between the two terminal fronts, paired per seed angle.

    Where the fronts stalled at similar places the midcurve approximates the
    interface where the eigenfunction's normal derivative vanishes."""
    center = record.center
    r_in = _radii_on_grid(record.fronts_in[-1].points, center, m)
    r_out = _radii_on_grid(record.fronts_out[-1].points, center, m)
    r_mid = 0.5 * (r_in + r_out)
    grid = np.arange(m) * (2 * np.pi / m)
    pts = center + np.column_stack([r_mid * np.cos(grid), r_mid * np.sin(grid)])
    gaps = np.abs(r_out - r_in)
    warning = None
    spread_in = float(np.ptp(record.freeze_t_in))
    spread_out = float(np.ptp(record.freeze_t_out))
    t_total = abs(record.t_stop)
    if t_total > 0 and max(spread_in, spread_out) > gap_factor * t_total:
        warning = "fronts stalled at very different times across angles"
    return CutEstimate(pts, gaps, warning)


def cut_normal_derivative(solution: EigenSolution, cut_points: np.ndarray):
    """Max |grad u . n| on the cut relative to max |grad u| on the mesh."""
    ix, iy = _interpolators(solution)
    tangent = np.roll(cut_points, -1, axis=0) - np.roll(cut_points, 1, axis=0)
    tangent /= np.linalg.norm(tangent, axis=1)[:, None]
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    gx = np.ma.filled(ix(cut_points[:, 0], cut_points[:, 1]), 0.0)
    gy = np.ma.filled(iy(cut_points[:, 0], cut_points[:, 1]), 0.0)
    g = gradient_field(solution)
    gmax = float(np.max(np.hypot(g[:, 0], g[:, 1])))
    return float(np.max(np.abs(gx * normal[:, 0] + gy * normal[:, 1]))) / gmax


# ---------------------------------------------------------------------------
# Morse perturbation


@dataclass
class MorsePerturbation:
    a: np.ndarray
    collar: float
    u_n: np.ndarray
    potential: np.ndarray
    sup_norm_V: float
    lam_original: float
    lam_perturbed: float


def _boundary_distance(mesh: TriMesh):
    """Vertex distances to the closest point of either boundary loop."""
    d = np.full(mesh.n_vertices, np.inf)
    p = mesh.vertices
    for which in ("inner", "outer"):
        loop = mesh.boundary_loop(which)
        a = mesh.vertices[loop]
        b = mesh.vertices[np.roll(loop, -1)]
        e = b - a
        ee = np.sum(e * e, axis=1)
        for k in range(len(a)):
            t = np.clip(((p - a[k]) @ e[k]) / ee[k], 0.0, 1.0)
            proj = a[k] + t[:, None] * e[k]
            d = np.minimum(d, np.hypot(*(p - proj).T))
    return d


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def morse_perturb(solution: EigenSolution, a, collar: float,
                  bc_inner=None, bc_outer=None,
                  core_offset: float | None = None,
                  min_speed_frac: float = 1e-3,
                  verify: bool = True) -> MorsePerturbation:
    """Tilt the eigenfunction by a cutoff linear function, u_n = u + phi (a.x),
    and compute the potential under which u_n is still a first eigenfunction
    with the original eigenvalue.

    The cutoff phi vanishes on a collar of the boundary, so the boundary
    conditions are untouched; within the collar the gradient must stay
    bounded away from zero (the construction needs the tilt supported away
    from the critical set).  V solves the variational identity
    int V u_n phi_i = int (grad u_n . grad phi_i cancelled against
    lam u_n phi_i), i.e. the discrete eigen-residual of u_n is pushed onto
    the potential, so (lam, u_n) is an exact eigenpair of the perturbed
    discrete problem.  The difference form makes a = 0 give exactly V = 0.
    """
    import scipy.sparse as sp
    from scipy.sparse.linalg import splu as _splu

    from .fem_eig import ConvergenceError, assemble, weighted_mass_matrix

    mesh = solution.mesh_ref
    a = np.asarray(a, dtype=float).reshape(2)
    if collar <= 0:
        raise CollarError("collar width must be positive")
    if bc_inner is None or bc_outer is None:
        raise ValueError("the boundary conditions of the solve are required")
    if "dirichlet" in (bc_inner.kind, bc_outer.kind):
        raise ValueError("the construction applies to Robin/Neumann problems")

    d = _boundary_distance(mesh)
    # the tilt must vanish identically on the mesh layers nearest the
    # boundary: the eigen-residual of rows whose test functions touch those
    # layers cannot be absorbed by a potential that is zero there
    if core_offset is None:
        core_offset = 0.4 * collar
    if not 0 <= core_offset < collar:
        raise CollarError("core offset must lie inside the collar")
    phi = _smoothstep((d - core_offset) / (collar - core_offset))

    g = gradient_field(solution)
    speed = np.hypot(g[:, 0], g[:, 1])
    in_collar = phi < 1.0
    if np.any(speed[in_collar] < min_speed_frac * speed.max()):
        raise CollarError("critical set intrudes into the cutoff collar")

    u = solution.nodal_values
    w = phi * (mesh.vertices @ a)
    u_n = u + w
    if np.any(u_n <= 0):
        raise CollarError("tilt too large: perturbed function loses positivity")

    lam = solution.lam
    K, M, _ = assemble(mesh, bc_inner, bc_outer)
    boundary = np.zeros(mesh.n_vertices, dtype=bool)
    boundary[mesh.boundary_inner.ravel()] = True
    boundary[mesh.boundary_outer.ravel()] = True
    interior = np.flatnonzero(~boundary)
    # nodes one element layer inside the boundary: the boundary rows couple
    # to the tilt and the potential only through them
    ring = np.zeros(mesh.n_vertices, dtype=bool)
    for tri in mesh.triangles:
        if boundary[tri].any():
            ring[tri] = True
    ring &= ~boundary
    ring_idx = np.flatnonzero(ring)

    potential = np.zeros(mesh.n_vertices)
    if np.any(a != 0):
        # Interior rows determine the potential, but a P1 potential bleeds
        # one element layer past its support, so the boundary rows pick up
        # its tail.  A compensating correction to the tilt on the first
        # interior ring restores them; both unknowns are found from one
        # square linear system (all rows of the perturbed eigen-equation),
        # iterated once or twice because the weighting by u_n lags behind
        # the tilt correction.
        shifted = (K - lam * M).tocsc()
        for _ in range(6):
            u_n = u + w
            # (lam M - K) u = 0 for the computed eigenpair, so the residual
            # of u_n is linear in the tilt
            B = weighted_mass_matrix(mesh, u_n)
            C = sp.hstack([B[:, interior], shifted[:, ring_idx]]).tocsc()
            z = _splu(C).solve(-(shifted @ w))
            potential[:] = 0.0
            potential[interior] = z[: len(interior)]
            w[ring_idx] += z[len(interior):]
            u_n = u + w
            P = weighted_mass_matrix(mesh, potential)
            res = K @ u_n + P @ u_n - lam * (M @ u_n)
            if np.max(np.abs(res)) < 1e-12 * max(1.0, abs(lam)):
                break
        else:
            raise ConvergenceError(
                "perturbation solves did not reach machine residual")

    lam_perturbed = np.nan
    if verify:
        lam_perturbed = solve_domain(mesh, bc_inner, bc_outer,
                                     potential=potential).lam
    return MorsePerturbation(a, collar, u_n, potential,
                             float(np.max(np.abs(potential))),
                             solution.lam, lam_perturbed)


# ---------------------------------------------------------------------------
# Discrete critical points


def critical_points(values: np.ndarray, mesh: TriMesh):
    """Classify interior vertices by the sign pattern of their link.

    Ties broken lexicographically by (value, vertex index) so the comparison
    is a strict total order.  Returns (point, kind) with kind in
    {"min", "max", "saddle", "degenerate"}; "degenerate" marks links with
    three or more sign alternations (multiple saddles).
    """
    n = mesh.n_vertices
    neighbors = [set() for _ in range(n)]
    for tri in mesh.triangles:
        for i in range(3):
            neighbors[tri[i]].update((tri[(i + 1) % 3], tri[(i + 2) % 3]))
    boundary = set(mesh.boundary_inner.ravel()) | set(mesh.boundary_outer.ravel())

    out = []
    verts = mesh.vertices
    for v in range(n):
        if v in boundary:
            continue
        nb = np.fromiter(neighbors[v], dtype=int)
        ang = np.arctan2(verts[nb, 1] - verts[v, 1], verts[nb, 0] - verts[v, 0])
        nb = nb[np.argsort(ang)]
        higher = np.array([(values[u], u) > (values[v], v) for u in nb])
        if np.all(higher):
            out.append((verts[v], "min"))
            continue
        if not np.any(higher):
            out.append((verts[v], "max"))
            continue
        flips = int(np.sum(higher != np.roll(higher, 1)))
        if flips == 4:
            out.append((verts[v], "saddle"))
        elif flips >= 6:
            # a link alternating three or more times marks a multiple
            # (monkey-type) saddle
            out.append((verts[v], "degenerate"))
    return out
