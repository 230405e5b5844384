"""An explicit Morse function on R^3 with exactly three critical points.

v interpolates between z(x) = x1^2 + x2^2 + x3^4 - 2 x3^2 inside the ball
|x|^2 <= 2 and |x|^2 outside |x|^2 >= 3, through a C-infinity step in the
radial shell between.  Inside the ball the critical points of z are two
minima at (0,0,+-1) and a saddle at the origin; the interpolation adds no
critical point in the shell, and outside it v = |x|^2 has none away from
the origin.  Everything (value, gradient, Hessian) is closed-form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class SectionMismatchError(RuntimeError):
    """A sampled point of the claimed stable-manifold section failed to
    descend to the saddle."""


# ---------------------------------------------------------------------------
# The smooth step and the function itself


def _bump(s):
    """g(s) = exp(-1/s) for s > 0, extended by 0; with g', g''."""
    s = np.asarray(s, dtype=float)
    pos = s > 0
    g = np.zeros_like(s)
    g1 = np.zeros_like(s)
    g2 = np.zeros_like(s)
    sp = np.where(pos, s, 1.0)
    e = np.where(pos, np.exp(-1.0 / sp), 0.0)
    g[...] = e
    g1[...] = e / sp ** 2 * pos
    g2[...] = e * (1.0 / sp ** 4 - 2.0 / sp ** 3) * pos
    return g, g1, g2


def smoothstep(t):
    """sigma(t): 0 for t <= 2, 1 for t >= 3, strictly increasing between;
    returns (sigma, sigma', sigma'')."""
    t = np.asarray(t, dtype=float)
    A, A1, A2 = _bump(t - 2.0)
    B, B1, B2 = _bump(3.0 - t)
    B1, B2 = -B1, B2  # chain rule for the reversed argument
    D = A + B
    D1 = A1 + B1
    s = A / D
    # the numerators vanish identically outside (2, 3): no cancellation
    num = A1 * B - A * B1
    s1 = num / D ** 2
    s2 = (A2 * B - A * B2) / D ** 2 - 2 * D1 * num / D ** 3
    return s, s1, s2


def v_eval(x):
    """Value, gradient, and Hessian of v at a 3D point."""
    x = np.asarray(x, dtype=float).reshape(3)
    t = float(x @ x)
    x1, x2, x3 = x
    z = x1 ** 2 + x2 ** 2 + x3 ** 4 - 2 * x3 ** 2
    gz = np.array([2 * x1, 2 * x2, 4 * x3 * (x3 ** 2 - 1)])
    Hz = np.diag([2.0, 2.0, 12 * x3 ** 2 - 4.0])
    # exact in the pure regimes: no roundoff from the blend arithmetic
    if t <= 2.0:
        return z, gz, Hz
    if t >= 3.0:
        return t, 2 * x, 2 * np.eye(3)

    s, s1, s2 = smoothstep(t)
    s, s1, s2 = float(s), float(s1), float(s2)
    w = t - z
    gw = 2 * x - gz
    Hw = 2 * np.eye(3) - Hz

    value = z + s * w
    grad = gz + s1 * 2 * x * w + s * gw
    hess = (Hz + w * (s2 * 4 * np.outer(x, x) + 2 * s1 * np.eye(3))
            + 2 * s1 * (np.outer(x, gw) + np.outer(gw, x)) + s * Hw)
    return value, grad, hess


# ---------------------------------------------------------------------------
# Critical points


@dataclass
class CriticalPoint3D:
    location: np.ndarray
    hessian_eigenvalues: np.ndarray
    index: int


def _newton_refine(x0, max_iter=60, tol=1e-12):
    """Damped Newton on the gradient; None when it fails to settle."""
    x = np.asarray(x0, dtype=float).copy()
    _, g, H = v_eval(x)
    for _ in range(max_iter):
        gn = np.linalg.norm(g)
        if gn < tol:
            return x
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(30):
            x_new = x + lam * step
            _, g_new, H_new = v_eval(x_new)
            if np.linalg.norm(g_new) < gn:
                break
            lam *= 0.5
        else:
            return None
        x, g, H = x_new, g_new, H_new
    return x if np.linalg.norm(g) < tol else None


def classify_critical_points(search_box=(-2.0, 2.0), grid_n=33,
                             scale=1.0) -> list[CriticalPoint3D]:
    """Grid scan for small-gradient cells, Newton refinement, dedup, and
    classification by the Hessian inertia.  `scale` classifies scale * v
    (positive scaling must not move points or change indices)."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    lo, hi = search_box
    axis = np.linspace(lo, hi, grid_n)
    X, Y, Z = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
    gnorm = np.array([np.linalg.norm(v_eval(p)[1]) for p in pts])
    # refine from every point in the smallest-gradient percentile
    seeds = pts[gnorm <= np.percentile(gnorm, 2.0)]

    found = []
    for seed in seeds:
        x = _newton_refine(seed)
        if x is None:
            continue
        if not all(np.linalg.norm(x - f) > 1e-6 for f in found):
            continue
        found.append(x)

    out = []
    for x in sorted(found, key=lambda p: p[2]):
        _, _, H = v_eval(x)
        eigs = np.linalg.eigvalsh(scale * H)
        if np.any(np.abs(eigs) < 1e-8):
            raise RuntimeError("degenerate critical point encountered")
        out.append(CriticalPoint3D(x, eigs, int(np.sum(eigs < 0))))
    return out


def shell_gradient_floor(n=40, seed=0) -> float:
    """Minimum |grad v| over a dense sample of the transition shell
    2 < |x|^2 < 3; positive means no critical point hides there."""
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(n ** 2, 3))
    u /= np.linalg.norm(u, axis=1)[:, None]
    radii = np.sqrt(np.linspace(2.0 + 1e-6, 3.0 - 1e-6, n))
    best = math.inf
    for r in radii:
        for d in u[:n]:
            best = min(best, np.linalg.norm(v_eval(r * d)[1]))
    return best


# ---------------------------------------------------------------------------
# Flow lines


@dataclass
class Trajectory:
    points: np.ndarray
    times: np.ndarray
    limit: np.ndarray | None  # critical point reached, if any


def trace_flow(x0, direction="descent", t_max=40.0, dt=0.01,
               settle_tol=1e-6) -> Trajectory:
    """Classical 4th-order integration of -grad(v) (descent) or +grad(v);
    stops once within settle_tol of one of the three critical points."""
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    sign = {"descent": -1.0, "ascent": 1.0}[direction]
    crits = np.array([[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]])

    def f(p):
        return sign * v_eval(p)[1]

    x = np.asarray(x0, dtype=float).reshape(3).copy()
    pts = [x.copy()]
    times = [0.0]
    limit = None
    n_steps = int(round(t_max / dt))
    for step in range(1, n_steps + 1):
        k1 = f(x)
        k2 = f(x + 0.5 * dt * k1)
        k3 = f(x + 0.5 * dt * k2)
        k4 = f(x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        pts.append(x.copy())
        times.append(step * dt)
        d = np.linalg.norm(crits - x, axis=1)
        if d.min() < settle_tol:
            limit = crits[int(d.argmin())].copy()
            break
    return Trajectory(np.array(pts), np.array(times), limit)


def saddle_sphere_section(radius: float = 4.0, n_samples: int = 64,
                          verify: bool = True) -> np.ndarray:
    """Circle where the sphere of the given radius meets the saddle's stable
    manifold.  By the x3 -> -x3 symmetry this is the equator; each sampled
    point must descend to the saddle."""
    theta = np.arange(n_samples) * (2 * np.pi / n_samples)
    circle = np.column_stack([radius * np.cos(theta),
                              radius * np.sin(theta),
                              np.zeros(n_samples)])
    if verify:
        saddle = np.zeros(3)
        for p in circle:
            traj = trace_flow(p, "descent")
            if traj.limit is None or np.linalg.norm(traj.limit - saddle) > 0:
                raise SectionMismatchError(
                    f"descent from {p} did not reach the saddle")
    return circle
