"""Quermassintegrals of convex bodies in 2D/3D, matched-shell radii, class
membership of annular domains, and Steiner/Alexandrov-Fenchel check oracles.

Conventions (outer parallel body at distance d):

    |E_d| = sum_i C(N,i) W_i(E) d^i,
    W_0 = volume,  W_1 = |boundary| / N,  W_N = |B_1|,

and for a polytope in 3D the d^2 coefficient is half the sum of edge
length times exterior dihedral angle, so W_2 = sum_e len_e * theta_e / 6.
For a ball, W_{N-1}(B_r) = |B_1| r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class GeometryError(ValueError):
    pass


def unit_ball_volume(dim: int) -> float:
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


# ---------------------------------------------------------------------------
# 2D bodies


@dataclass
class ConvexBody2D:
    """Convex polygon with counterclockwise vertices."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise GeometryError("need at least 3 planar vertices")
        self.vertices = v
        scale = float(np.max(np.ptp(v, axis=0)))
        if scale == 0:
            raise GeometryError("degenerate polygon")
        e = np.roll(v, -1, axis=0) - v
        f = np.roll(e, -1, axis=0)
        cross = e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0]
        if np.any(cross < -1e-12 * scale**2):
            raise GeometryError("polygon is not convex (or not counterclockwise)")
        if self.area() <= 0:
            raise GeometryError("polygon has non-positive area")

    def area(self) -> float:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        return 0.5 * float(np.sum(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]))

    def perimeter(self) -> float:
        e = np.roll(self.vertices, -1, axis=0) - self.vertices
        return float(np.sum(np.hypot(e[:, 0], e[:, 1])))

    def scaled(self, c: float) -> "ConvexBody2D":
        return ConvexBody2D(self.vertices * c)


def quermassintegrals_2d(body: ConvexBody2D):
    """(W0, W1, W2) = (area, perimeter/2, pi)."""
    return body.area(), body.perimeter() / 2.0, math.pi


# ---------------------------------------------------------------------------
# 3D bodies


@dataclass
class ConvexBody3D:
    """Convex polytope given by vertices and outward-oriented faces.

    Edges and dihedral angles are derived from the face list on demand
    (single source of truth).
    """

    vertices: np.ndarray
    faces: list

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise GeometryError("vertices must be (n, 3)")
        self.faces = [list(map(int, f)) for f in self.faces]
        n_edges = sum(len(f) for f in self.faces) // 2
        euler = len(self.vertices) - n_edges + len(self.faces)
        if euler != 2:
            raise GeometryError(f"Euler characteristic {euler} != 2")

    def face_normal(self, face):
        pts = self.vertices[face]
        n = np.zeros(3)
        for i in range(1, len(pts) - 1):
            n += np.cross(pts[i] - pts[0], pts[i + 1] - pts[0])
        norm = np.linalg.norm(n)
        if norm == 0:
            raise GeometryError("degenerate face")
        return n / norm

    def edges_with_faces(self):
        """Derived edge list: {(a, b): [face indices]} with a < b."""
        edges = {}
        for fi, face in enumerate(self.faces):
            for i in range(len(face)):
                a, b = face[i], face[(i + 1) % len(face)]
                key = (min(a, b), max(a, b))
                edges.setdefault(key, []).append(fi)
        for key, fs in edges.items():
            if len(fs) != 2:
                raise GeometryError(f"edge {key} not shared by exactly two faces")
        return edges

    def volume(self) -> float:
        vol = 0.0
        for face in self.faces:
            pts = self.vertices[face]
            for i in range(1, len(pts) - 1):
                vol += np.dot(pts[0], np.cross(pts[i], pts[i + 1])) / 6.0
        return float(vol)

    def surface_area(self) -> float:
        area = 0.0
        for face in self.faces:
            pts = self.vertices[face]
            for i in range(1, len(pts) - 1):
                area += 0.5 * np.linalg.norm(
                    np.cross(pts[i] - pts[0], pts[i + 1] - pts[0]))
        return float(area)

    def scaled(self, c: float) -> "ConvexBody3D":
        return ConvexBody3D(self.vertices * c, self.faces)

    def triangulated_faces(self):
        tris = []
        for face in self.faces:
            for i in range(1, len(face) - 1):
                tris.append((face[0], face[i], face[i + 1]))
        return np.array(tris, dtype=int)

    def contains(self, points, tol=1e-12):
        """Half-space test against every face plane (convex body)."""
        p = np.atleast_2d(points)
        inside = np.ones(len(p), dtype=bool)
        for face in self.faces:
            n = self.face_normal(face)
            off = np.dot(n, self.vertices[face[0]])
            inside &= p @ n <= off + tol
        return inside


def quermassintegral_top_3d(body: ConvexBody3D) -> float:
    """W2 of a convex polytope: sum over edges of length * exterior dihedral / 6."""
    total = 0.0
    for (a, b), (f1, f2) in body.edges_with_faces().items():
        n1 = body.face_normal(body.faces[f1])
        n2 = body.face_normal(body.faces[f2])
        theta = math.atan2(np.linalg.norm(np.cross(n1, n2)),
                           float(np.dot(n1, n2)))
        # convexity: the faces must bend outward across every edge
        mid_out = 0.5 * (body.vertices[a] + body.vertices[b]) \
            - body.vertices.mean(axis=0)
        if np.dot(n1 + n2, mid_out) < 0:
            raise GeometryError("non-convex dihedral angle")
        total += np.linalg.norm(body.vertices[b] - body.vertices[a]) * theta
    return total / 6.0


def quermassintegrals_3d(body: ConvexBody3D):
    """(W0, W1, W2, W3) = (volume, area/3, edge-angle sum/6, 4*pi/3)."""
    return (body.volume(), body.surface_area() / 3.0,
            quermassintegral_top_3d(body), 4.0 * math.pi / 3.0)


def quermassintegrals(body):
    if isinstance(body, ConvexBody2D):
        return quermassintegrals_2d(body)
    return quermassintegrals_3d(body)


def cube(side=1.0, center=(0.0, 0.0, 0.0)) -> ConvexBody3D:
    h = side / 2.0
    c = np.asarray(center, dtype=float)
    verts = c + h * np.array([[sx, sy, sz] for sx in (-1, 1)
                              for sy in (-1, 1) for sz in (-1, 1)])
    faces = [[0, 1, 3, 2], [4, 6, 7, 5], [0, 4, 5, 1],
             [2, 3, 7, 6], [0, 2, 6, 4], [1, 5, 7, 3]]
    return ConvexBody3D(verts, faces)


def regular_tetrahedron(edge=1.0) -> ConvexBody3D:
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]],
                 dtype=float) * (edge / (2 * math.sqrt(2)))
    faces = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]
    body = ConvexBody3D(v, faces)
    # orient all faces outward
    fixed = []
    for f in faces:
        n = body.face_normal(f)
        if np.dot(n, v[f].mean(axis=0)) < 0:
            f = f[::-1]
        fixed.append(f)
    return ConvexBody3D(v, fixed)


def convex_hull_body(points) -> ConvexBody3D:
    """Convex hull of a 3D point cloud with outward-oriented faces."""
    from scipy.spatial import ConvexHull

    hull = ConvexHull(np.asarray(points, dtype=float))
    remap = {old: new for new, old in enumerate(hull.vertices)}
    verts = hull.points[hull.vertices]
    faces = []
    for simplex, eq in zip(hull.simplices, hull.equations):
        f = [remap[i] for i in simplex]
        pts = verts[f]
        n = np.cross(pts[1] - pts[0], pts[2] - pts[0])
        if np.dot(n, eq[:3]) < 0:
            f = f[::-1]
        faces.append(f)
    return ConvexBody3D(verts, faces)


def icosphere(subdivisions=3, radius=1.0) -> ConvexBody3D:
    """Geodesic sphere from a subdivided icosahedron (2562 vertices at level 4)."""
    phi = (1 + math.sqrt(5)) / 2
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1]], dtype=float)
    verts /= np.linalg.norm(verts[0])
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    verts = list(map(tuple, verts))
    for _ in range(subdivisions):
        cache = {}
        new_faces = []

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                p = np.asarray(verts[i]) + np.asarray(verts[j])
                p /= np.linalg.norm(p)
                cache[key] = len(verts)
                verts.append(tuple(p))
            return cache[key]

        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return ConvexBody3D(radius * np.asarray(verts), [list(f) for f in faces])


# ---------------------------------------------------------------------------
# Monte-Carlo Steiner oracle


def _point_triangle_distances(points, a, b, c):
    """Distance from each point to triangle (a, b, c), vectorized over points."""
    ab, ac = b - a, c - a
    ap = points - a
    d1 = ap @ ab
    d2 = ap @ ac
    bp = points - b
    d3 = bp @ ab
    d4 = bp @ ac
    cp = points - c
    d5 = cp @ ab
    d6 = cp @ ac
    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2
    denom = va + vb + vc
    v = np.where(denom != 0, vb / np.where(denom == 0, 1, denom), 0.0)
    w = np.where(denom != 0, vc / np.where(denom == 0, 1, denom), 0.0)
    closest = a + v[:, None] * ab + w[:, None] * ac
    # clamp to edges/vertices where the barycentric projection leaves the triangle
    region_a = (d1 <= 0) & (d2 <= 0)
    region_b = (d3 >= 0) & (d4 <= d3)
    region_c = (d6 >= 0) & (d5 <= d6)
    t_ab = np.clip(np.where(ab @ ab > 0, d1 / (ab @ ab), 0), 0, 1)
    t_ac = np.clip(np.where(ac @ ac > 0, d2 / (ac @ ac), 0), 0, 1)
    bc = c - b
    t_bc = np.clip((points - b) @ bc / (bc @ bc), 0, 1)
    on_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    on_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    on_bc = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
    closest = np.where(on_bc[:, None], b + t_bc[:, None] * bc, closest)
    closest = np.where(on_ac[:, None], a + t_ac[:, None] * ac, closest)
    closest = np.where(on_ab[:, None], a + t_ab[:, None] * ab, closest)
    closest = np.where(region_c[:, None], c, closest)
    closest = np.where(region_b[:, None], b, closest)
    closest = np.where(region_a[:, None], a, closest)
    diff = points - closest
    return np.sqrt(np.sum(diff * diff, axis=1))


def distance_to_body(points, body: ConvexBody3D):
    """Distance from points to the convex polytope (0 inside)."""
    p = np.atleast_2d(points).astype(float)
    d = np.full(len(p), np.inf)
    v = body.vertices
    for ta, tb, tc in body.triangulated_faces():
        d = np.minimum(d, _point_triangle_distances(p, v[ta], v[tb], v[tc]))
    d[body.contains(p)] = 0.0
    return d


def steiner_volume_mc(body: ConvexBody3D, delta: float, n_samples: int = 10**6,
                      seed: int = 0):
    """Monte-Carlo volume of the outer parallel body E_delta.

    Returns (volume_estimate, sigma).  Fixed seed for reproducible CI bands.
    """
    rng = np.random.default_rng(seed)
    lo = body.vertices.min(axis=0) - delta
    hi = body.vertices.max(axis=0) + delta
    box = float(np.prod(hi - lo))
    hits = 0
    chunk = 200_000
    remaining = n_samples
    while remaining > 0:
        m = min(chunk, remaining)
        pts = rng.uniform(lo, hi, size=(m, 3))
        hits += int(np.sum(distance_to_body(pts, body) <= delta))
        remaining -= m
    p = hits / n_samples
    return box * p, box * math.sqrt(max(p * (1 - p), 1e-12) / n_samples)


def steiner_profile(body: ConvexBody3D, deltas=(0.1, 0.2, 0.3, 0.4, 0.5),
                    n_samples: int = 10**6, seed: int = 0):
    """MC parallel-body volumes for several offsets; returns (vols, sigmas)."""
    deltas = np.asarray(deltas, dtype=float)
    vols = np.empty_like(deltas)
    sigmas = np.empty_like(deltas)
    for i, d in enumerate(deltas):
        vols[i], sigmas[i] = steiner_volume_mc(body, d, n_samples, seed + i)
    return vols, sigmas


def steiner_fit_w2(body: ConvexBody3D, deltas=(0.1, 0.2, 0.3, 0.4, 0.5),
                   n_samples: int = 10**6, seed: int = 0, profile=None):
    """Independent W2 oracle: fit a cubic to MC parallel-body volumes and read
    the delta^2 coefficient / 3.  Returns (w2_estimate, sigma_w2)."""
    deltas = np.asarray(deltas, dtype=float)
    if profile is None:
        profile = steiner_profile(body, deltas, n_samples, seed)
    vols, sigmas = profile
    A = np.vander(deltas, 4, increasing=True)
    W = np.diag(1.0 / sigmas**2)
    cov = np.linalg.inv(A.T @ W @ A)
    coef = cov @ (A.T @ W @ vols)
    return coef[2] / 3.0, math.sqrt(cov[2, 2]) / 3.0


# ---------------------------------------------------------------------------
# Matched shells and class membership


@dataclass
class ShellSpec:
    dim: int
    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise GeometryError("alpha must be positive")

    @property
    def ordered(self):
        return self.beta > self.alpha

    def volume(self):
        b1 = unit_ball_volume(self.dim)
        return b1 * (self.beta**self.dim - self.alpha**self.dim)


@dataclass
class MembershipReport:
    in_class: bool
    alpha: float
    beta: float
    volume_domain: float
    volume_shell: float
    convexity_ok: bool
    containment_ok: bool
    ordering_ok: bool
    volume_ok: bool
    constraint: str = "quermassintegral"  # which inner constraint was matched


def matched_shell(inner, outer_perimeter: float, domain_volume: float,
                  dim: int) -> ShellSpec:
    """Radii of the shell matching W_{N-1} on the inner body and boundary
    measure on the outer body.  `inner` is a convex body or W_{N-1} directly.
    No ordering guarantee: beta <= alpha simply means the domain lies outside
    every admissible class."""
    if dim not in (2, 3):
        raise GeometryError("dim must be 2 or 3")
    if isinstance(inner, (ConvexBody2D, ConvexBody3D)):
        w_top_inner = quermassintegrals(inner)[dim - 1]
    else:
        w_top_inner = float(inner)
    if w_top_inner <= 0 or outer_perimeter <= 0 or domain_volume <= 0:
        raise GeometryError("inputs must be positive")
    b1 = unit_ball_volume(dim)
    alpha = w_top_inner / b1  # W_{N-1}(B_a) = |B_1| a
    beta = (outer_perimeter / (dim * b1)) ** (1.0 / (dim - 1))
    return ShellSpec(dim, alpha, beta)


def class_membership(domain=None, inner=None, outer=None,
                     require_inner_convexity=False) -> MembershipReport:
    """Membership in the shell-comparison class.

    Accepts either a 2D StarAnnularDomain (perimeter-matched constraints; no
    convexity needed in the plane unless requested) or a pair of 3D convex
    bodies (quermassintegral-matched inner constraint; convexity of both is
    enforced by the ConvexBody3D invariants).
    """
    if domain is not None:
        perim_in = domain.perimeter("inner")
        perim_out = domain.perimeter("outer")
        vol = domain.area()
        shell = matched_shell(perim_in / 2.0, perim_out, vol, 2)
        convexity_ok = True
        if require_inner_convexity:
            theta = np.arange(domain.n_samples) * (2 * np.pi / domain.n_samples)
            pts = domain.boundary_points("inner", theta)
            try:
                ConvexBody2D(pts)
            except GeometryError:
                convexity_ok = False
        containment_ok = bool(np.all(domain.r_outer > domain.r_inner))
        constraint = "perimeter"
    else:
        if inner is None or outer is None:
            raise GeometryError("need a domain or an inner/outer body pair")
        vol = outer.volume() - inner.volume()
        shell = matched_shell(inner, outer.surface_area(), vol, 3)
        convexity_ok = True  # enforced by body construction
        containment_ok = bool(np.all(outer.contains(inner.vertices, tol=-1e-12)))
        constraint = "quermassintegral"

    ordering_ok = shell.ordered
    volume_shell = shell.volume() if ordering_ok else math.nan
    # tolerance matches the polyline sampling error of the equality cases
    volume_ok = ordering_ok and vol >= volume_shell * (1 - 1e-6)
    in_class = convexity_ok and containment_ok and ordering_ok and volume_ok
    return MembershipReport(in_class, shell.alpha, shell.beta, vol, volume_shell,
                            convexity_ok, containment_ok, ordering_ok, volume_ok,
                            constraint)


def alexandrov_fenchel_check(body, tol=1e-9):
    """Monotone chain (W_j/|B_1|)^{1/(N-j)} >= (W_i/|B_1|)^{1/(N-i)} for i < j.

    Returns rows (i, j, lhs, rhs, ok, equality) with equality flagged only
    within tol (balls)."""
    dim = 2 if isinstance(body, ConvexBody2D) else 3
    ws = quermassintegrals(body)
    b1 = unit_ball_volume(dim)
    rows = []
    for i in range(dim):
        for j in range(i + 1, dim):
            lhs = (ws[j] / b1) ** (1.0 / (dim - j))
            rhs = (ws[i] / b1) ** (1.0 / (dim - i))
            ok = lhs >= rhs * (1 - tol)
            equality = abs(lhs - rhs) <= tol * max(abs(lhs), abs(rhs))
            rows.append((i, j, lhs, rhs, ok, equality))
    return rows


def isoperimetric_deficit(body) -> float:
    """|bd E| - N |B_1|^{1/N} |E|^{(N-1)/N}; nonnegative for convex bodies."""
    if isinstance(body, ConvexBody2D):
        dim, vol, per = 2, body.area(), body.perimeter()
    else:
        dim, vol, per = 3, body.volume(), body.surface_area()
    b1 = unit_ball_volume(dim)
    return per - dim * b1 ** (1.0 / dim) * vol ** ((dim - 1.0) / dim)
