"""Generators for the annular domain families used throughout the toolkit:
concentric and eccentric circular annuli, disk-minus-convex-body domains,
outer delta-neighborhoods of convex polygons, and the elongated
rectangle-minus-disk family.
"""

from __future__ import annotations

import numpy as np

from .mesh import MeshingError, StarAnnularDomain

DEFAULT_SAMPLES = 720


def _angles(m):
    return np.arange(m) * (2 * np.pi / m)


def concentric_annulus(alpha, beta, m=DEFAULT_SAMPLES) -> StarAnnularDomain:
    return StarAnnularDomain((0.0, 0.0), np.full(m, float(alpha)),
                             np.full(m, float(beta)))


def eccentric_annulus(alpha, beta, offset, m=DEFAULT_SAMPLES) -> StarAnnularDomain:
    """Inner circle of radius alpha about the origin; outer circle of radius
    beta centered at (offset, 0).  Star-shaped about the origin as long as
    the inner circle stays strictly inside the outer one."""
    theta = _angles(m)
    disc = beta**2 - offset**2 * np.sin(theta) ** 2
    if np.any(disc <= 0):
        raise MeshingError("outer circle does not wrap around the center")
    r_out = offset * np.cos(theta) + np.sqrt(disc)
    return StarAnnularDomain((0.0, 0.0), np.full(m, float(alpha)), r_out)


def _ray_polygon_radius(vertices, theta):
    """Distance from the origin to the polygon boundary along direction theta.

    The polygon must contain the origin strictly; raises if a ray misses or
    hits the boundary more than once (not star-shaped about the origin).
    """
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    radii = np.empty_like(theta)
    d = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    for k, dk in enumerate(d):
        hits = []
        for i in range(n):
            a, b = v[i], v[(i + 1) % n]
            e = b - a
            denom = dk[0] * (-e[1]) - dk[1] * (-e[0])
            if abs(denom) < 1e-14:
                continue
            t = (a[0] * (-e[1]) - a[1] * (-e[0])) / denom
            s = (dk[1] * a[0] - dk[0] * a[1]) / -denom
            if t > 1e-12 and -1e-12 <= s <= 1 + 1e-12:
                hits.append(t)
        if not hits:
            raise MeshingError("polygon does not surround the origin")
        hits = sorted(hits)
        if len(hits) > 1 and hits[-1] > hits[0] * (1 + 1e-9):
            raise MeshingError("polygon is not star-shaped about the origin")
        radii[k] = hits[0]
    return radii


def _point_polygon_distance(points, vertices):
    """Distance from each point to the boundary of the polygon (min over edges)."""
    p = np.atleast_2d(points)
    v = np.asarray(vertices, dtype=float)
    best = np.full(len(p), np.inf)
    n = len(v)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        e = b - a
        t = np.clip(((p - a) @ e) / (e @ e), 0.0, 1.0)
        proj = a + t[:, None] * e
        d = np.hypot(*(p - proj).T)
        best = np.minimum(best, d)
    return best


def disk_minus_polygon(beta, polygon_vertices, m=DEFAULT_SAMPLES) -> StarAnnularDomain:
    """B_beta minus a polygon containing the origin (e.g. a centered square)."""
    theta = _angles(m)
    r_in = _ray_polygon_radius(polygon_vertices, theta)
    return StarAnnularDomain((0.0, 0.0), r_in, np.full(m, float(beta)))


def polygon_delta_neighborhood(polygon_vertices, delta,
                               m=DEFAULT_SAMPLES) -> StarAnnularDomain:
    """Annulus between a convex polygon and its outer delta-neighborhood."""
    theta = _angles(m)
    r_in = _ray_polygon_radius(polygon_vertices, theta)
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    lo = r_in.copy()
    hi = r_in + delta * 1.5
    # distance to the polygon grows monotonically along each ray outside it
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        dmid = _point_polygon_distance(mid[:, None] * dirs, polygon_vertices)
        below = dmid < delta
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return StarAnnularDomain((0.0, 0.0), r_in, 0.5 * (lo + hi))


def rectangle_minus_disk(alpha, k, m=DEFAULT_SAMPLES) -> StarAnnularDomain:
    """The rectangle (-1,1) x (-k,k) minus the closed disk of radius alpha."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if k <= 1:
        raise ValueError("k must exceed 1")
    theta = _angles(m)
    with np.errstate(divide="ignore"):
        rx = np.where(np.abs(np.cos(theta)) > 1e-15,
                      1.0 / np.abs(np.cos(theta)), np.inf)
        ry = np.where(np.abs(np.sin(theta)) > 1e-15,
                      k / np.abs(np.sin(theta)), np.inf)
    r_out = np.minimum(rx, ry)
    return StarAnnularDomain((0.0, 0.0), np.full(m, float(alpha)), r_out)


def regular_polygon_vertices(n_sides, circumradius=1.0, phase=0.0):
    th = phase + _angles(n_sides)
    return np.stack([circumradius * np.cos(th), circumradius * np.sin(th)], axis=1)


def square_vertices(side=1.0, center=(0.0, 0.0)):
    h = side / 2.0
    cx, cy = center
    return np.array([[cx + h, cy + h], [cx - h, cy + h],
                     [cx - h, cy - h], [cx + h, cy - h]])
