"""First eigenvalue of the Laplacian on a concentric spherical shell by shooting.

The first eigenfunction of the shell B_beta \\ B_alpha (any dimension N >= 2,
any mix of Neumann/Robin/Dirichlet on the two spheres) is radial, so the
eigenvalue problem reduces to the ODE

    u'' + (N-1)/r * u' + lambda * u = 0   on (alpha, beta),

integrated from r = alpha with initial data encoding the inner condition.
The outward normal on the inner sphere is -e_r, so the inner Robin condition
du/dnu + h*u = 0 reads u'(alpha) = h * u(alpha).

Eigenvalues are the roots of the terminal boundary functional; the first
eigenvalue is certified by a zero sign-change count of the profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .boundary import BoundaryCondition, neumann


DEFAULT_STEPS = 4096


class ShootingOverflowError(RuntimeError):
    """Integration blew up (lambda far above the spectrum, or step too large)."""


class BracketExhaustedError(RuntimeError):
    """No eigenvalue bracket found below the configured lambda ceiling."""


class MaxMinConsistencyError(RuntimeError):
    """The RN/NR curves did not cross inside (alpha, beta); solver bug."""


@dataclass(frozen=True)
class ShellProblem:
    dim: int
    alpha: float
    beta: float
    bc_inner: BoundaryCondition
    bc_outer: BoundaryCondition

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("shell dimension must be >= 2")
        if not (0 < self.alpha < self.beta):
            raise ValueError("radii must satisfy 0 < alpha < beta")


@dataclass
class RadialEigenResult:
    lam: float
    r: np.ndarray
    profile: np.ndarray
    zero_count: int
    residual: float


def _initial_data(bc: BoundaryCondition) -> tuple[float, float]:
    if bc.is_dirichlet:
        return 0.0, 1.0
    if bc.is_neumann:
        return 1.0, 0.0
    return 1.0, bc.h


def _terminal_functional(bc: BoundaryCondition, u: float, du: float) -> float:
    if bc.is_dirichlet:
        return u
    if bc.is_neumann:
        return du
    return du + bc.h * u


def shoot(problem: ShellProblem, lam: float, n_steps: int = DEFAULT_STEPS,
          return_profile: bool = False):
    """Integrate the radial ODE and return (terminal_residual, zero_count).

    With return_profile=True also returns the (r, u) samples.  Sign changes
    are counted on the open interval; boundary zeros from Dirichlet initial
    data are not counted.
    """
    if not math.isfinite(lam):
        raise ValueError("lambda must be finite")
    n1 = problem.dim - 1
    a, b = problem.alpha, problem.beta
    h = (b - a) / n_steps
    u, p = _initial_data(problem.bc_inner)

    if return_profile:
        rs = np.empty(n_steps + 1)
        us = np.empty(n_steps + 1)
        rs[0], us[0] = a, u

    zero_count = 0
    last_sign = 0.0 if u == 0.0 else math.copysign(1.0, u)
    r = a
    for i in range(n_steps):
        # classical RK4 on (u' = p, p' = -(N-1)/r p - lam u)
        k1u = p
        k1p = -n1 / r * p - lam * u
        r2 = r + 0.5 * h
        u2 = u + 0.5 * h * k1u
        p2 = p + 0.5 * h * k1p
        k2u = p2
        k2p = -n1 / r2 * p2 - lam * u2
        u3 = u + 0.5 * h * k2u
        p3 = p + 0.5 * h * k2p
        k3u = p3
        k3p = -n1 / r2 * p3 - lam * u3
        r4 = r + h
        u4 = u + h * k3u
        p4 = p + h * k3p
        k4u = p4
        k4p = -n1 / r4 * p4 - lam * u4
        u = u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        p = p + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        r = a + (i + 1) * h
        if not (math.isfinite(u) and math.isfinite(p)):
            raise ShootingOverflowError(
                f"non-finite state at r={r:.6g} for lambda={lam:.6g}")
        if u != 0.0:
            s = math.copysign(1.0, u)
            if last_sign != 0.0 and s != last_sign and i < n_steps - 1:
                zero_count += 1
            last_sign = s
        if return_profile:
            rs[i + 1], us[i + 1] = r, u

    residual = _terminal_functional(problem.bc_outer, u, p)
    if return_profile:
        return residual, zero_count, rs, us
    return residual, zero_count


def _lambda_step(problem: ShellProblem) -> float:
    return (math.pi / (problem.beta - problem.alpha)) ** 2 / 8.0


def _bracket_roots(problem: ShellProblem, n_roots: int, tol: float,
                   lam_max: float | None = None, n_steps: int = DEFAULT_STEPS):
    """Scan lambda upward from 0 and bisect each sign change of the residual.

    Returns the first n_roots roots in increasing order.
    """
    dl = _lambda_step(problem)
    if lam_max is None:
        lam_max = 4000.0 * dl
    roots = []
    lam_lo = dl * 1e-9  # avoid the trivial structure at exactly 0
    res_lo, _ = shoot(problem, lam_lo, n_steps)
    lam = lam_lo
    while len(roots) < n_roots:
        lam_next = lam + dl
        if lam_next > lam_max:
            raise BracketExhaustedError(
                f"no eigenvalue bracket below lambda_max={lam_max:.6g}")
        res_next, _ = shoot(problem, lam_next, n_steps)
        if res_lo == 0.0:
            roots.append(lam)
        elif res_next == 0.0 or (res_lo < 0) != (res_next < 0):
            root = brentq(lambda l: shoot(problem, l, n_steps)[0],
                          lam, lam_next, xtol=tol * lam_next,
                          rtol=max(tol, 1e-15))
            roots.append(root)
        lam, res_lo = lam_next, res_next
    return roots


def smallest_eigenvalue(problem: ShellProblem, tol: float = 1e-10,
                        lam_max: float | None = None,
                        n_steps: int = DEFAULT_STEPS) -> RadialEigenResult:
    """First eigenvalue and radial profile of the shell problem.

    Neumann/Neumann returns lambda = 0 exactly with the constant profile
    (the shooting residual has a trivial root there that must not be
    mistaken for a bracket).  Otherwise the first residual root with a
    sign-definite profile is bisected to relative width tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if problem.bc_inner.is_neumann and problem.bc_outer.is_neumann:
        rs = np.linspace(problem.alpha, problem.beta, n_steps + 1)
        return RadialEigenResult(0.0, rs, np.ones_like(rs), 0, 0.0)

    n_want = 1
    while True:
        roots = _bracket_roots(problem, n_want, tol, lam_max, n_steps)
        lam = roots[-1]
        residual, zero_count, rs, us = shoot(problem, lam, n_steps,
                                             return_profile=True)
        if zero_count == 0:
            break
        n_want += 1  # defensive; the first root is sign-definite in practice

    # normalize the profile to max 1, sign-fixed positive
    peak = us[np.argmax(np.abs(us))]
    us = us / peak
    return RadialEigenResult(lam, rs, us, zero_count, residual)


def monotonicity_scan(dim: int, alpha: float | None, beta: float | None,
                      bc: BoundaryCondition, grid, sweep: str,
                      tol: float = 1e-10, n_steps: int = DEFAULT_STEPS):
    """Eigenvalue table along a radius sweep.

    sweep="rn_outer": fixed inner radius alpha with condition bc, Neumann on
    the swept outer radius; lambda_1^RN(B_r \\ B_alpha) over grid in
    (alpha, inf), expected strictly decreasing.

    sweep="nr_inner": fixed outer radius beta with condition bc, Neumann on
    the swept inner radius; lambda_1^NR(B_beta \\ B_r) over grid in
    (0, beta), expected strictly increasing.
    """
    grid = [float(g) for g in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    rows = []
    if sweep == "rn_outer":
        if alpha is None:
            raise ValueError("rn_outer sweep needs alpha")
        if grid[0] <= alpha:
            raise ValueError("rn_outer sweep radii must exceed alpha")
        for r in grid:
            prob = ShellProblem(dim, alpha, r, bc, neumann())
            rows.append((r, smallest_eigenvalue(prob, tol, n_steps=n_steps).lam))
    elif sweep == "nr_inner":
        if beta is None:
            raise ValueError("nr_inner sweep needs beta")
        if grid[-1] >= beta or grid[0] <= 0:
            raise ValueError("nr_inner sweep radii must lie in (0, beta)")
        for r in grid:
            prob = ShellProblem(dim, r, beta, neumann(), bc)
            rows.append((r, smallest_eigenvalue(prob, tol, n_steps=n_steps).lam))
    else:
        raise ValueError(f"unknown sweep {sweep!r}")
    return rows


def maxmin_split(problem: ShellProblem, tol: float = 1e-10,
                 n_steps: int = DEFAULT_STEPS):
    """Max-min splitting of the shell eigenvalue over intermediate radii.

    Finds delta* in (alpha, beta) where the decreasing curve
    delta -> lambda_1^RN(B_delta \\ B_alpha) crosses the increasing curve
    delta -> lambda_1^NR(B_beta \\ B_delta); the common value equals the
    direct two-sided eigenvalue of the full shell.
    """
    if problem.bc_inner.is_neumann or problem.bc_outer.is_neumann:
        raise ValueError("max-min split needs non-Neumann conditions on both sides")
    a, b = problem.alpha, problem.beta

    def gap(delta):
        inner = ShellProblem(problem.dim, a, delta, problem.bc_inner, neumann())
        outer = ShellProblem(problem.dim, delta, b, neumann(), problem.bc_outer)
        lam_rn = smallest_eigenvalue(inner, tol, n_steps=n_steps).lam
        lam_nr = smallest_eigenvalue(outer, tol, n_steps=n_steps).lam
        return lam_rn - lam_nr, lam_rn, lam_nr

    # bracket the crossing, widening toward the ends if needed
    margin = 0.05
    while True:
        lo, hi = a + margin * (b - a), b - margin * (b - a)
        glo = gap(lo)[0]
        ghi = gap(hi)[0]
        if glo > 0 > ghi:
            break
        margin /= 4.0
        if margin < 1e-6:
            raise MaxMinConsistencyError(
                "RN/NR eigenvalue curves do not cross in (alpha, beta)")

    delta_star = brentq(lambda d: gap(d)[0], lo, hi,
                        xtol=max(tol, 1e-12) * (b - a))
    _, lam_rn, lam_nr = gap(delta_star)
    return delta_star, 0.5 * (lam_rn + lam_nr)
