"""Reversal scan: the first Dirichlet eigenvalue of a long rectangle with a
central disk removed eventually exceeds that of the concentric shell with
the same inner radius and matched outer perimeter.

For the rectangle (-1,1) x (-k,k) minus the closed disk of radius alpha,
the matched shell has outer radius beta_k = (4+4k)/(2*pi).  The shell
eigenvalue decreases to zero as the shell grows, while the domain eigenvalue
stays above the analytic rectangle eigenvalue (pi^2/4)(1+1/k^2), so the
two curves cross and the shell comparison reverses for large k.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .boundary import dirichlet, robin
from .domains import rectangle_minus_disk
from .fem_eig import richardson_estimate
from .mesh import MeshingError
from .shell_radial import ShellProblem, smallest_eigenvalue


@dataclass
class CounterexampleRow:
    k: float
    beta_k: float
    lambda_domain: float
    lambda_domain_bar: float
    lambda_shell: float
    lambda_rect: float
    reversed: bool
    error: str | None = None


def matched_outer_radius(k: float) -> float:
    """Outer radius of the disk whose perimeter equals the rectangle's."""
    return (4.0 + 4.0 * k) / (2.0 * math.pi)


def rectangle_eigenvalue(k: float) -> float:
    """First Dirichlet eigenvalue of the rectangle (-1,1) x (-k,k)."""
    return (math.pi ** 2 / 4.0) * (1.0 + 1.0 / k ** 2)


def thread_count(n_tasks: int) -> int:
    env = os.environ.get("SHELLSPEC_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(n_tasks, os.cpu_count() or 1))


def _mesh_resolution(k: float) -> tuple[int, int]:
    """Angular count grows with the aspect ratio so far-field elements keep
    a bounded aspect; rounded up to a multiple of 32."""
    n_theta = max(96, 32 * math.ceil(16.0 * k / 32.0))
    return n_theta, 16


def _scan_one(alpha: float, k: float, fem_levels: int) -> CounterexampleRow:
    beta = matched_outer_radius(k)
    lam_rect = rectangle_eigenvalue(k)
    lam_shell = smallest_eigenvalue(
        ShellProblem(2, alpha, beta, dirichlet(), dirichlet())).lam
    n_theta, n_r = _mesh_resolution(k)
    try:
        domain = rectangle_minus_disk(alpha, k, m=max(720, 8 * n_theta))
        rich = richardson_estimate(domain, dirichlet(), dirichlet(),
                                   levels=fem_levels, n_theta=n_theta,
                                   n_r=n_r)
    except MeshingError as exc:
        return CounterexampleRow(k, beta, math.nan, math.nan, lam_shell,
                                 lam_rect, False, error=str(exc))
    return CounterexampleRow(k, beta, rich.lam, rich.error_bar, lam_shell,
                             lam_rect,
                             rich.lam - rich.error_bar > lam_shell)


def counterexample_scan(alpha: float, k_values,
                        fem_levels: int = 3) -> list[CounterexampleRow]:
    """One row per aspect ratio k; rows are independent and computed in
    parallel (SHELLSPEC_THREADS caps the pool)."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    k_values = [float(k) for k in k_values]
    if any(k <= 1 for k in k_values):
        raise ValueError("every k must exceed 1")
    n = thread_count(len(k_values))
    if n == 1:
        return [_scan_one(alpha, k, fem_levels) for k in k_values]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda k: _scan_one(alpha, k, fem_levels),
                             k_values))


def first_reversed(rows: list[CounterexampleRow]) -> float | None:
    for row in rows:
        if row.error is None and row.reversed:
            return row.k
    return None


def robin_limit_gap(alpha: float, beta: float, h: float = 1e4) -> float:
    """Relative gap between the shell's Robin eigenvalue at large h and its
    Dirichlet eigenvalue; the Robin values converge to the Dirichlet one."""
    lam_h = smallest_eigenvalue(
        ShellProblem(2, alpha, beta, robin(h), robin(h))).lam
    lam_d = smallest_eigenvalue(
        ShellProblem(2, alpha, beta, dirichlet(), dirichlet())).lam
    return abs(lam_h - lam_d) / lam_d
