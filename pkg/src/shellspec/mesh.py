"""Doubly-connected planar domains bounded by two star-shaped loops, and
conforming triangulations with tagged inner/outer boundary edges.

A domain is represented by two periodic radius functions about a common
center, sampled at M uniform angles and interpolated piecewise-linearly.
Meshes are structured transfinite grids blending the two loops.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class MeshingError(RuntimeError):
    pass


@dataclass
class StarAnnularDomain:
    """Region between two star-shaped loops about a common center."""

    center: np.ndarray
    r_inner: np.ndarray
    r_outer: np.ndarray

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(2)
        self.r_inner = np.asarray(self.r_inner, dtype=float)
        self.r_outer = np.asarray(self.r_outer, dtype=float)
        if self.r_inner.shape != self.r_outer.shape or self.r_inner.ndim != 1:
            raise MeshingError("radius samples must be 1-d arrays of equal length")
        if len(self.r_inner) < 8:
            raise MeshingError("need at least 8 angular samples")
        if np.any(self.r_inner <= 0):
            raise MeshingError("inner radius function must be positive")
        if np.any(self.r_outer <= self.r_inner):
            raise MeshingError("loops must have a positive gap at every angle")

    @property
    def n_samples(self):
        return len(self.r_inner)

    def _interp(self, samples, theta):
        m = len(samples)
        t = np.asarray(theta, dtype=float) % (2 * np.pi)
        x = t / (2 * np.pi) * m
        i0 = np.floor(x).astype(int) % m
        i1 = (i0 + 1) % m
        w = x - np.floor(x)
        return (1 - w) * samples[i0] + w * samples[i1]

    def radius_inner(self, theta):
        return self._interp(self.r_inner, theta)

    def radius_outer(self, theta):
        return self._interp(self.r_outer, theta)

    def boundary_points(self, which, theta):
        r = self.radius_inner(theta) if which == "inner" else self.radius_outer(theta)
        return self.center + np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def _dense_theta(self, per_segment=64):
        return np.linspace(0.0, 2 * np.pi, self.n_samples * per_segment + 1)

    def perimeter(self, which, per_segment=64):
        theta = self._dense_theta(per_segment)
        pts = self.boundary_points(which, theta)
        return float(np.sum(np.hypot(*(np.diff(pts, axis=0).T))))

    def area(self, per_segment=64):
        theta = self._dense_theta(per_segment)
        ri = self.radius_inner(theta)
        ro = self.radius_outer(theta)
        return float(np.trapezoid(0.5 * (ro**2 - ri**2), theta))

    def to_json(self):
        return {
            "center": self.center.tolist(),
            "r_inner": self.r_inner.tolist(),
            "r_outer": self.r_outer.tolist(),
        }

    @classmethod
    def from_json(cls, data):
        return cls(np.asarray(data["center"]), np.asarray(data["r_inner"]),
                   np.asarray(data["r_outer"]))

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json(), f)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_json(json.load(f))


@dataclass
class TriMesh:
    """P1 triangulation with counterclockwise triangles and tagged boundary."""

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_inner: np.ndarray
    boundary_outer: np.ndarray
    domain: StarAnnularDomain | None = field(default=None, repr=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.triangles = np.asarray(self.triangles, dtype=int)
        self.boundary_inner = np.asarray(self.boundary_inner, dtype=int).reshape(-1, 2)
        self.boundary_outer = np.asarray(self.boundary_outer, dtype=int).reshape(-1, 2)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def signed_areas(self):
        p = self.vertices[self.triangles]
        u = p[:, 1] - p[:, 0]
        v = p[:, 2] - p[:, 0]
        return 0.5 * (u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])

    def area(self):
        return float(np.sum(self.signed_areas()))

    def boundary_nodes(self, which):
        edges = self.boundary_inner if which == "inner" else self.boundary_outer
        return np.unique(edges)

    def boundary_length(self, which):
        edges = self.boundary_inner if which == "inner" else self.boundary_outer
        d = self.vertices[edges[:, 1]] - self.vertices[edges[:, 0]]
        return float(np.sum(np.hypot(d[:, 0], d[:, 1])))

    def boundary_loop(self, which):
        """Vertex indices walking the tagged boundary as a single closed loop."""
        edges = self.boundary_inner if which == "inner" else self.boundary_outer
        nxt = {int(a): int(b) for a, b in edges}
        if len(nxt) != len(edges):
            raise MeshingError("boundary edges do not form a single chain")
        start = int(edges[0, 0])
        loop = [start]
        cur = nxt[start]
        while cur != start:
            loop.append(cur)
            cur = nxt.get(cur)
            if cur is None or len(loop) > len(edges):
                raise MeshingError("boundary walk does not close into one loop")
        return np.array(loop, dtype=int)

    def max_edge_length(self):
        p = self.vertices[self.triangles]
        e = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]])
        return float(np.max(np.hypot(e[..., 0], e[..., 1])))

    def to_json(self):
        return {
            "vertices": self.vertices.tolist(),
            "triangles": self.triangles.tolist(),
            "boundary": {
                "inner": self.boundary_inner.tolist(),
                "outer": self.boundary_outer.tolist(),
            },
        }

    @classmethod
    def from_json(cls, data):
        return cls(np.asarray(data["vertices"]), np.asarray(data["triangles"]),
                   np.asarray(data["boundary"]["inner"]),
                   np.asarray(data["boundary"]["outer"]))

    def save(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json(), f)

    @classmethod
    def load(cls, path):
        with open(path) as f:
            return cls.from_json(json.load(f))


def _blend_fractions(n_r, grading):
    """Fractions s_0=0 < ... < s_{n_r}=1, geometrically clustered toward both
    boundaries when grading != 1 (ratio between consecutive spacings)."""
    if grading == 1.0:
        return np.linspace(0.0, 1.0, n_r + 1)
    half = (n_r + 1) // 2
    w = grading ** np.minimum(np.arange(n_r), np.arange(n_r)[::-1])
    s = np.concatenate([[0.0], np.cumsum(w)])
    return s / s[-1]


def build_transfinite_mesh(domain: StarAnnularDomain, n_theta: int, n_r: int,
                           grading: float = 1.0) -> TriMesh:
    """Structured triangulation blending the two boundary loops radially."""
    if n_theta < 8:
        raise MeshingError("n_theta must be >= 8")
    if n_r < 2:
        raise MeshingError("n_r must be >= 2")
    theta = np.arange(n_theta) * (2 * np.pi / n_theta)
    s = _blend_fractions(n_r, grading)
    ri = domain.radius_inner(theta)
    ro = domain.radius_outer(theta)
    r = (1 - s[:, None]) * ri[None, :] + s[:, None] * ro[None, :]
    x = domain.center[0] + r * np.cos(theta)[None, :]
    y = domain.center[1] + r * np.sin(theta)[None, :]
    vertices = np.stack([x.ravel(), y.ravel()], axis=1)

    def vid(i, j):
        return i * n_theta + (j % n_theta)

    tris = []
    for i in range(n_r):
        for j in range(n_theta):
            a = vid(i, j)
            b = vid(i, j + 1)
            c = vid(i + 1, j + 1)
            d = vid(i + 1, j)
            tris.append((a, d, c))
            tris.append((a, c, b))
    inner = [(vid(0, j), vid(0, j + 1)) for j in range(n_theta)]
    outer = [(vid(n_r, j), vid(n_r, j + 1)) for j in range(n_theta)]
    mesh = TriMesh(vertices, np.array(tris), np.array(inner), np.array(outer),
                   domain=domain)
    if np.any(mesh.signed_areas() <= 0):
        raise MeshingError("transfinite mesh produced inverted triangles")
    return mesh


def refine(mesh: TriMesh) -> TriMesh:
    """Uniform midpoint (red) refinement; boundary midpoints are projected
    back onto the exact boundary curves when the parent domain is attached."""
    verts = list(map(tuple, mesh.vertices))
    midpoint_of = {}

    def midpoint(a, b):
        key = (min(a, b), max(a, b))
        idx = midpoint_of.get(key)
        if idx is None:
            p = 0.5 * (mesh.vertices[a] + mesh.vertices[b])
            idx = len(verts)
            verts.append(tuple(p))
            midpoint_of[key] = idx
        return idx

    tris = []
    for a, b, c in mesh.triangles:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        tris.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])

    projected = {}  # midpoint index -> chord midpoint before projection

    def split_boundary(edges, which):
        out = []
        for a, b in edges:
            m = midpoint(a, b)
            if mesh.domain is not None:
                chord = np.asarray(verts[m])
                p = chord - mesh.domain.center
                th = np.arctan2(p[1], p[0])
                r = (mesh.domain.radius_inner(th) if which == "inner"
                     else mesh.domain.radius_outer(th))
                projected[m] = chord
                verts[m] = tuple(mesh.domain.center
                                 + r * np.array([np.cos(th), np.sin(th)]))
            out.extend([(a, m), (m, b)])
        return out

    inner = split_boundary(mesh.boundary_inner, "inner")
    outer = split_boundary(mesh.boundary_outer, "outer")
    vert_arr = np.array(verts)
    tri_arr = np.array(tris)
    # near boundary corners the projection can fold a triangle; relax the
    # offending midpoints back toward the plain chord midpoint
    for _ in range(40):
        p = vert_arr[tri_arr]
        areas = 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                       - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
        bad = np.flatnonzero(areas <= 0)
        if len(bad) == 0:
            break
        movable = [v for v in np.unique(tri_arr[bad]) if v in projected]
        if not movable:
            break
        for v in movable:
            vert_arr[v] = 0.5 * (vert_arr[v] + projected[v])
    return TriMesh(vert_arr, tri_arr, np.array(inner),
                   np.array(outer), domain=mesh.domain)


def mesh_quality(mesh: TriMesh):
    """Returns (min_angle_degrees, max_edge_aspect, orientation_ok)."""
    p = mesh.vertices[mesh.triangles]
    edges = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]])
    lengths = np.hypot(edges[..., 0], edges[..., 1])
    min_angle = np.inf
    for i in range(3):
        u = -edges[(i + 2) % 3]
        v = edges[i]
        cosang = np.sum(u * v, axis=1) / (lengths[(i + 2) % 3] * lengths[i])
        ang = np.degrees(np.arccos(np.clip(cosang, -1, 1)))
        min_angle = min(min_angle, float(np.min(ang)))
    aspect = float(np.max(np.max(lengths, axis=0) / np.min(lengths, axis=0)))
    orientation_ok = bool(np.all(mesh.signed_areas() > 0))
    return min_angle, aspect, orientation_ok
