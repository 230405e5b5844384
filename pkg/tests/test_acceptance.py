"""End-to-end acceptance checks.

Each test exercises one headline capability of the toolkit at its stated
tolerance, combining modules the way a user would: radial oracles against
closed forms, finite elements against the radial solver, the max-min
splitting, the shell-comparison verdict on non-radial domains, the level-set
sweep with split eigenvalues, the counterexample scan, the critical-point
perturbation, convex-geometry inequalities, and the explicit 3D Morse
function.
"""

import math
import time

import numpy as np
import pytest

from shellspec import (
    EigenSolution,
    ShellProblem,
    advance_fronts,
    alexandrov_fenchel_check,
    build_transfinite_mesh,
    concentric_annulus,
    convex_hull_body,
    counterexample_scan,
    critical_points,
    cube,
    dirichlet,
    disk_minus_polygon,
    eccentric_annulus,
    hersch_weinberger_check,
    maxmin_split,
    monotonicity_scan,
    morse_perturb,
    neumann,
    polygon_delta_neighborhood,
    quermassintegral_top_3d,
    quermassintegrals_3d,
    record_subdomain_eigenvalues,
    regular_polygon_vertices,
    richardson_estimate,
    robin,
    saddle_sphere_section,
    smallest_eigenvalue,
    solve_domain,
    square_vertices,
    steiner_fit_w2,
    trace_flow,
    v_eval,
)
from shellspec.morse3d import classify_critical_points


# ---------------------------------------------------------------------------
# Shared expensive solves


@pytest.fixture(scope="module")
def perturbed_eccentric():
    """Eccentric annulus with a tilt perturbation that makes the ground
    state a Morse function (one max, one saddle, no interior minimum)."""
    dom = eccentric_annulus(1.0, 2.0, offset=0.3)
    mesh = build_transfinite_mesh(dom, 96, 24)
    sol = solve_domain(mesh, robin(0.5), robin(0.5))
    mp = morse_perturb(sol, np.array([1e-3, 0.43e-3]), collar=0.25,
                       bc_inner=robin(0.5), bc_outer=robin(0.5))
    perturbed = EigenSolution(mp.lam_perturbed, mp.u_n, sol.residual, mesh)
    return sol, mp, perturbed


# ---------------------------------------------------------------------------
# 1. Radial solver against a closed form


def test_radial_spherical_shell_dirichlet_closed_form():
    # lambda_1^DD of the 3D shell 1 < |x| < 2 is pi^2 (profile sin(pi(r-1))/r)
    t0 = time.perf_counter()
    res = smallest_eigenvalue(
        ShellProblem(3, 1.0, 2.0, dirichlet(), dirichlet()), tol=1e-12)
    elapsed = time.perf_counter() - t0
    assert res.lam == pytest.approx(math.pi ** 2, rel=1e-8)
    assert res.zero_count == 0
    assert elapsed < 1.0


# ---------------------------------------------------------------------------
# 2. Finite elements against the radial solver


def test_fem_extrapolation_matches_radial_annulus():
    dom = concentric_annulus(1.0, 2.0)
    for bc in (dirichlet(), robin(1.0)):
        rich = richardson_estimate(dom, bc, bc)
        exact = smallest_eigenvalue(ShellProblem(2, 1.0, 2.0, bc, bc)).lam
        assert rich.lam == pytest.approx(exact, rel=1e-3)
        assert abs(rich.order - 2.0) < 0.3
    # double Neumann: ground state is the constant, eigenvalue exactly zero,
    # so the comparison is absolute and the convergence order is undefined
    rich = richardson_estimate(dom, neumann(), neumann())
    assert abs(rich.lam) < 1e-10


# ---------------------------------------------------------------------------
# 3. Monotone radius sweeps and the max-min splitting


def test_sweep_monotonicity_and_maxmin_consistency():
    for dim in (2, 3):
        for h in (0.5, 5.0):
            bc = robin(h)
            rows = monotonicity_scan(dim, 1.0, None, bc,
                                     np.linspace(1.2, 4.0, 10),
                                     sweep="rn_outer")
            lams = [lam for _, lam in rows]
            assert all(a > b for a, b in zip(lams, lams[1:]))
            rows = monotonicity_scan(dim, None, 2.0, bc,
                                     np.linspace(0.2, 1.8, 10),
                                     sweep="nr_inner")
            lams = [lam for _, lam in rows]
            assert all(a < b for a, b in zip(lams, lams[1:]))
            prob = ShellProblem(dim, 1.0, 2.0, bc, bc)
            direct = smallest_eigenvalue(prob).lam
            delta, split = maxmin_split(prob)
            assert 1.0 < delta < 2.0
            assert abs(split - direct) <= 1e-6 * abs(direct)


# ---------------------------------------------------------------------------
# 4. Shell comparison on non-radial domains


def test_shell_comparison_nonradial_domains():
    domains = [
        eccentric_annulus(1.0, 2.0, offset=0.3),
        disk_minus_polygon(2.0, square_vertices(1.0)),
        polygon_delta_neighborhood(regular_polygon_vertices(6, 1.0), 0.5),
    ]
    pairs = [(1.0, 1.0), (10.0, 0.1), (math.inf, math.inf)]
    for dom in domains:
        for h_in, h_out in pairs:
            report = hersch_weinberger_check(dom, h_in, h_out)
            assert report.membership.in_class
            assert report.margin > report.lam_domain_bar
            assert report.passed


# ---------------------------------------------------------------------------
# 5. Split eigenvalues along the sweep stay above the domain eigenvalue


def test_split_eigenvalues_dominate_along_sweep(perturbed_eccentric):
    _, mp, perturbed = perturbed_eccentric
    record = advance_fronts(perturbed, t_end=-4.0, dt=0.01)
    n = len(record.times)
    fractions = np.linspace(0.08, 0.9, 10)
    indices = sorted({max(1, int(f * (n - 1))) for f in fractions})
    assert len(indices) >= 10
    record_subdomain_eigenvalues(record, robin(0.5), robin(0.5), indices,
                                 potential=mp.potential)
    for idx in indices:
        lam_rn, bar_rn = record.lam_rn[idx]
        lam_nr, bar_nr = record.lam_nr[idx]
        assert min(lam_rn, lam_nr) - perturbed.lam > bar_rn + bar_nr


# ---------------------------------------------------------------------------
# 6. The sweep exhausts the domain


def test_sweep_exhausts_domain(perturbed_eccentric):
    sol, _, perturbed = perturbed_eccentric
    record = advance_fronts(perturbed, t_end=-10.0, dt=0.01)
    area_total = perturbed.mesh_ref.domain.area()
    covered = (record.areas_in[-1] + record.areas_out[-1]) / area_total
    assert covered >= 0.99
    # monotone up to front-resampling jitter (below 1% of the swept area)
    tol = 0.01 * max(record.areas_in[-1], record.areas_out[-1])
    assert np.all(np.diff(record.areas_in) >= -tol)
    assert np.all(np.diff(record.areas_out) >= -tol)


# ---------------------------------------------------------------------------
# 7. Matched-shell comparison reverses for spiky domains


def test_reversal_scan_perimeter_matched_shells():
    t0 = time.perf_counter()
    rows = counterexample_scan(0.5, [2, 4, 8, 16])
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0
    shells = [row.lambda_shell for row in rows]
    assert all(a > b for a, b in zip(shells, shells[1:]))
    for row in rows:
        assert row.error is None
        # domain eigenvalue stays above the rectangle lower bound
        assert row.lambda_domain - row.lambda_domain_bar > row.lambda_rect
    last = rows[-1]
    assert last.reversed
    assert last.lambda_domain - last.lambda_domain_bar > last.lambda_shell


# ---------------------------------------------------------------------------
# 8. Eigenvalue-preserving Morse perturbation


def test_morse_perturbation_preserves_eigenvalue(perturbed_eccentric):
    sol, mp, _ = perturbed_eccentric
    mesh = sol.mesh_ref
    rich = richardson_estimate(mesh.domain, robin(0.5), robin(0.5))
    assert abs(mp.lam_perturbed - mp.lam_original) < 10 * rich.error_bar

    # linear response: sup-norm of the added potential scales like |a|
    # (the slope is measured on small tilts, inside the asymptotic regime)
    sups = []
    mags = [1e-2, 1e-3, 1e-4]
    for amag in [1e-1] + mags:
        p = morse_perturb(sol, np.array([1.0, 0.43]) * amag, collar=0.25,
                          bc_inner=robin(0.5), bc_outer=robin(0.5))
        assert abs(p.lam_perturbed - p.lam_original) < 10 * rich.error_bar
        if amag in mags:
            sups.append(p.sup_norm_V)
    slopes = [math.log(sups[i] / sups[i + 1]) / math.log(mags[i] / mags[i + 1])
              for i in range(len(mags) - 1)]
    for s in slopes:
        assert abs(s - 1.0) < 0.2

    kinds = [kind for _, kind in critical_points(mp.u_n, mesh)]
    assert sorted(kinds) == ["max", "saddle"]


# ---------------------------------------------------------------------------
# 9. Convex-geometry cross-checks


def test_convex_geometry_invariants(cube_steiner):
    # Monte-Carlo Steiner fit of the unit cube recovers W2 = pi
    body, deltas, profile = cube_steiner
    w2, sigma = steiner_fit_w2(body, deltas, profile=profile)
    assert quermassintegral_top_3d(cube(1.0)) == pytest.approx(math.pi,
                                                               abs=1e-12)
    assert abs(w2 - math.pi) < 3 * sigma

    # quermassintegral inequality chain on random polytopes
    rng = np.random.default_rng(11)
    for _ in range(100):
        hull = convex_hull_body(rng.standard_normal((12, 3)))
        assert all(ok for (*_, ok, _) in alexandrov_fenchel_check(hull))

    # homogeneity W_j(tK) = t^(3-j) W_j(K)
    w_unit = quermassintegrals_3d(cube(1.0))
    w_scaled = quermassintegrals_3d(cube(2.0))
    for j, (wu, ws) in enumerate(zip(w_unit, w_scaled)):
        assert ws == pytest.approx(2.0 ** (3 - j) * wu, rel=1e-9)


# ---------------------------------------------------------------------------
# 10. Explicit 3D Morse function


def test_morse3d_critical_structure():
    pts = classify_critical_points()
    assert len(pts) == 3
    expected = [
        ((0.0, 0.0, -1.0), (2.0, 2.0, 8.0), 0),
        ((0.0, 0.0, 0.0), (-4.0, 2.0, 2.0), 1),
        ((0.0, 0.0, 1.0), (2.0, 2.0, 8.0), 0),
    ]
    for cp, (loc, eigs, index) in zip(pts, expected):
        assert np.allclose(cp.location, loc, atol=1e-8)
        assert np.allclose(np.sort(cp.hessian_eigenvalues), eigs, atol=1e-8)
        assert cp.index == index

    # descent from the equatorial section of the radius-4 sphere reaches
    # the saddle
    section = saddle_sphere_section(radius=4.0, n_samples=16, verify=False)
    for x0 in section[::4]:
        traj = trace_flow(x0, direction="descent")
        assert traj.limit is not None
        assert np.linalg.norm(traj.limit) < 1e-4

    # gradient consistency against finite differences
    rng = np.random.default_rng(3)
    xs = rng.uniform(-2.5, 2.5, size=(100, 3))
    h = 1e-6
    for x in xs:
        _, grad, _ = v_eval(x)
        fd = np.empty(3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            fd[i] = (v_eval(x + e)[0] - v_eval(x - e)[0]) / (2 * h)
        assert np.allclose(grad, fd, atol=1e-5)
