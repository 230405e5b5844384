import math

import numpy as np
import pytest

from shellspec.boundary import dirichlet, neumann, robin
from shellspec.domains import concentric_annulus, eccentric_annulus
from shellspec.fem_eig import (
    DegenerateProblemError,
    assemble,
    richardson_estimate,
    smallest_eigenpair,
    solve_domain,
)
from shellspec.mesh import StarAnnularDomain, TriMesh, build_transfinite_mesh, refine
from shellspec.shell_radial import ShellProblem, smallest_eigenvalue


@pytest.fixture(scope="module")
def annulus_mesh():
    return build_transfinite_mesh(concentric_annulus(1.0, 2.0), n_theta=64, n_r=8)


def radial_reference(bc_inner, bc_outer):
    return smallest_eigenvalue(ShellProblem(2, 1.0, 2.0, bc_inner, bc_outer)).lam


def rectangle_mesh(width, height, nx, ny):
    """Simple structured triangulation of (0,w)x(0,h); Dirichlet via 'outer'."""
    xs = np.linspace(0, width, nx + 1)
    ys = np.linspace(0, height, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    verts = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return i * (ny + 1) + j

    tris, edges = [], []
    for i in range(nx):
        for j in range(ny):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris += [(a, b, c), (a, c, d)]
    for i in range(nx):
        edges += [(vid(i, 0), vid(i + 1, 0)), (vid(i + 1, ny), vid(i, ny))]
    for j in range(ny):
        edges += [(vid(nx, j), vid(nx, j + 1)), (vid(0, j + 1), vid(0, j))]
    # degenerate inner loop: reuse two outer edges so the data model is satisfied
    return TriMesh(verts, np.array(tris), np.array(edges[:1]), np.array(edges))


def test_neumann_kernel_contains_constants(annulus_mesh):
    K, M, dof_map = assemble(annulus_mesh, neumann(), neumann())
    ones = np.ones(K.shape[0])
    assert np.linalg.norm(K @ ones) < 1e-12
    assert abs(ones @ (M @ ones) - annulus_mesh.area()) < 1e-12


def test_robin_rayleigh_of_constant(annulus_mesh):
    h = 1.5
    K, M, dof_map = assemble(annulus_mesh, robin(h), robin(h))
    ones = np.ones(K.shape[0])
    expected = h * (annulus_mesh.boundary_length("inner")
                    + annulus_mesh.boundary_length("outer")) / annulus_mesh.area()
    assert abs((ones @ (K @ ones)) / (ones @ (M @ ones)) - expected) < 1e-12


def test_dirichlet_elimination(annulus_mesh):
    K, M, dof_map = assemble(annulus_mesh, dirichlet(), neumann())
    n_bnd = len(annulus_mesh.boundary_nodes("inner"))
    assert K.shape[0] == annulus_mesh.n_vertices - n_bnd
    assert np.all(dof_map[annulus_mesh.boundary_nodes("inner")] == -1)


def test_degenerate_all_dirichlet():
    # single ring of elements: every vertex lies on one of the two loops
    n = 8
    t = np.arange(n) * (2 * np.pi / n)
    verts = np.concatenate([
        np.column_stack([np.cos(t), np.sin(t)]),
        np.column_stack([2 * np.cos(t), 2 * np.sin(t)])])
    tris, inner, outer = [], [], []
    for i in range(n):
        j = (i + 1) % n
        tris += [(i, n + i, n + j), (i, n + j, j)]
        inner.append((j, i))
        outer.append((n + i, n + j))
    mesh = TriMesh(verts, np.array(tris), np.array(inner), np.array(outer))
    with pytest.raises(DegenerateProblemError):
        assemble(mesh, dirichlet(), dirichlet())


def test_dd_matches_radial_with_second_order(annulus_mesh):
    ref = radial_reference(dirichlet(), dirichlet())
    errors = []
    mesh = annulus_mesh
    for _ in range(3):
        sol = solve_domain(mesh, dirichlet(), dirichlet())
        errors.append(sol.lam - ref)
        mesh = refine(mesh)
    assert abs(errors[-1]) / ref < 0.01
    ratios = [errors[i] / errors[i + 1] for i in range(2)]
    assert all(3.5 < r < 4.5 for r in ratios)


def test_pure_neumann_zero_mode(annulus_mesh):
    sol = solve_domain(annulus_mesh, neumann(), neumann())
    assert abs(sol.lam) < 1e-10
    assert np.ptp(sol.nodal_values) < 1e-10


def test_robin_matches_radial(annulus_mesh):
    ref = radial_reference(robin(1.0), robin(1.0))
    sol = solve_domain(annulus_mesh, robin(1.0), robin(1.0))
    assert abs(sol.lam - ref) / ref < 0.01


def test_rayleigh_quotient_consistency(annulus_mesh):
    K, M, dof_map = assemble(annulus_mesh, robin(2.0), dirichlet())
    sol = smallest_eigenpair(K, M, annulus_mesh, dof_map)
    x = sol.nodal_values[dof_map >= 0]
    rq = (x @ (K @ x)) / (x @ (M @ x))
    assert abs(rq - sol.lam) < 1e-12 * abs(sol.lam)


def test_first_mode_positive_and_normalized(annulus_mesh):
    sol = solve_domain(annulus_mesh, dirichlet(), robin(3.0))
    inner = np.setdiff1d(np.arange(annulus_mesh.n_vertices),
                         annulus_mesh.boundary_nodes("inner"))
    assert np.max(sol.nodal_values) == 1.0
    assert np.all(sol.nodal_values[inner] > 0)
    assert np.all(sol.nodal_values[annulus_mesh.boundary_nodes("inner")] == 0)


def test_dirichlet_domain_monotonicity():
    # lambda decreases when the rectangle grows
    lam_small = solve_domain(rectangle_mesh(1.0, 1.0, 24, 24),
                             neumann(), dirichlet()).lam
    lam_big = solve_domain(rectangle_mesh(1.5, 1.2, 30, 26),
                           neumann(), dirichlet()).lam
    exact_small = 2 * math.pi**2
    assert lam_small > lam_big
    assert abs(lam_small - exact_small) / exact_small < 0.01


def test_robin_parameter_monotonicity(annulus_mesh):
    lams = [solve_domain(annulus_mesh, robin(h), robin(h)).lam
            for h in (0.25, 1.0, 4.0, 16.0)]
    assert all(a < b for a, b in zip(lams, lams[1:]))


def test_potential_constant_shift_exact(annulus_mesh):
    rng = np.random.default_rng(3)
    V = rng.uniform(0.0, 5.0, annulus_mesh.n_vertices)
    base = solve_domain(annulus_mesh, dirichlet(), robin(2.0), potential=V).lam
    shifted = solve_domain(annulus_mesh, dirichlet(), robin(2.0),
                           potential=V + 7.0).lam
    assert abs(shifted - base - 7.0) < 1e-10


def test_richardson_concentric_dd():
    ref = radial_reference(dirichlet(), dirichlet())
    result = richardson_estimate(concentric_annulus(1.0, 2.0),
                                 dirichlet(), dirichlet(), levels=4)
    assert abs(result.lam - ref) / ref < 1e-3
    assert abs(result.order - 2.0) < 0.3
    assert result.warning is None


def test_richardson_error_bar_shrinks():
    domain = eccentric_annulus(0.5, 2.0, offset=0.4)
    r3 = richardson_estimate(domain, robin(1.0), dirichlet(), levels=3)
    r4 = richardson_estimate(domain, robin(1.0), dirichlet(), levels=4)
    assert r3.error_bar > 0
    assert r4.error_bar < r3.error_bar
