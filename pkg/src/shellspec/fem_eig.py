"""P1 finite-element solver for the first eigenpair of the Laplacian on a
triangulated annular domain with Neumann/Robin/Dirichlet conditions on the
two boundary loops, optionally with a bounded potential.

Weak form of the quotient being minimized:

    ( int |grad v|^2 + h_in int_{inner} v^2 + h_out int_{outer} v^2
      + int V v^2 ) / int v^2.

Dirichlet conditions are imposed by eliminating the boundary nodes, never by
penalty, so K and M stay symmetric.  The potential is integrated with the
exact P1 triple-product rule, which makes the spectral shift
lambda(V + c) = lambda(V) + c hold exactly at the discrete level.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .boundary import BoundaryCondition
from .mesh import TriMesh


class DegenerateProblemError(ValueError):
    pass


class SingularOperatorError(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass
class EigenSolution:
    lam: float
    nodal_values: np.ndarray  # over all mesh vertices, Dirichlet nodes exactly 0
    residual: float
    mesh_ref: TriMesh


@dataclass
class RichardsonResult:
    lam: float
    error_bar: float
    order: float
    lambdas: np.ndarray
    h_values: np.ndarray
    monotone: bool
    warning: str | None = None


def _element_matrices(verts, tris, potential=None):
    """Batched P1 element stiffness/mass (and potential) matrices.

    The potential uses the exact triple-product rule
    int phi_a phi_b phi_c = 2A a!b!c!/(a+b+c+2)!, i.e. A/60 (all distinct),
    A/30 (one pair equal), A/10 (all three equal).
    """
    p = verts[tris]  # (nt, 3, 2)
    b = p[:, [1, 2, 0], 1] - p[:, [2, 0, 1], 1]
    c = p[:, [2, 0, 1], 0] - p[:, [1, 2, 0], 0]
    area = 0.5 * (p[:, 1, 0] * p[:, 2, 1] - p[:, 2, 0] * p[:, 1, 1]
                  - p[:, 0, 0] * (p[:, 2, 1] - p[:, 1, 1])
                  + p[:, 0, 1] * (p[:, 2, 0] - p[:, 1, 0]))
    ke = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) \
        / (4.0 * area)[:, None, None]
    me = area[:, None, None] / 12.0 * (np.ones((3, 3)) + np.eye(3))
    if potential is not None:
        v = potential[tris]  # (nt, 3)
        s = v.sum(axis=1)
        pe = (2.0 * v[:, :, None] + 2.0 * v[:, None, :]
              + (s[:, None, None] - v[:, :, None] - v[:, None, :]))
        diag = 2.0 * s[:, None] + 4.0 * v
        pe[:, np.arange(3), np.arange(3)] = diag
        ke = ke + pe * (area / 60.0)[:, None, None]
    return ke, me, area


def weighted_mass_matrix(mesh: TriMesh, weights):
    """Sparse matrix of int w phi_i phi_j with w interpolated in P1.

    This is the potential term of `assemble` as a standalone operator; by the
    symmetry of the triple products, applying it to a vector v equals applying
    the potential matrix of v to `weights`.
    """
    n = mesh.n_vertices
    weights = np.asarray(weights, dtype=float)
    v = weights[mesh.triangles]
    p = mesh.vertices[mesh.triangles]
    area = 0.5 * (p[:, 1, 0] * p[:, 2, 1] - p[:, 2, 0] * p[:, 1, 1]
                  - p[:, 0, 0] * (p[:, 2, 1] - p[:, 1, 1])
                  + p[:, 0, 1] * (p[:, 2, 0] - p[:, 1, 0]))
    s = v.sum(axis=1)
    be = (2.0 * v[:, :, None] + 2.0 * v[:, None, :]
          + (s[:, None, None] - v[:, :, None] - v[:, None, :]))
    be[:, np.arange(3), np.arange(3)] = 2.0 * s[:, None] + 4.0 * v
    be = be * (area / 60.0)[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    return sp.coo_matrix((be.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble(mesh: TriMesh, bc_inner: BoundaryCondition, bc_outer: BoundaryCondition,
             potential=None):
    """Stiffness K (with Robin boundary mass and potential term) and mass M.

    Returns (K, M, dof_map) where dof_map[vertex] is the reduced index or -1
    on eliminated Dirichlet nodes.
    """
    n = mesh.n_vertices
    verts = mesh.vertices
    tris = mesh.triangles
    if potential is not None:
        potential = np.asarray(potential, dtype=float)
        if potential.shape != (n,):
            raise ValueError("potential must be a nodal vector")

    ke, me, areas = _element_matrices(verts, tris, potential)
    if np.any(areas <= 0):
        raise DegenerateProblemError("inverted or degenerate triangle")
    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    K = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((me.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    dirichlet = np.zeros(n, dtype=bool)
    for bc, edges in ((bc_inner, mesh.boundary_inner), (bc_outer, mesh.boundary_outer)):
        if bc.kind == "dirichlet":
            dirichlet[edges.ravel()] = True
        elif bc.kind == "robin":
            if bc.h <= 0:
                raise ValueError("Robin parameter must be positive")
            br, bc_, bv = [], [], []
            for a, b_ in edges:
                length = float(np.linalg.norm(verts[b_] - verts[a]))
                # exact edge mass for P1 traces: L/6 * [[2,1],[1,2]]
                for (i, j, w) in ((a, a, 2), (b_, b_, 2), (a, b_, 1), (b_, a, 1)):
                    br.append(i)
                    bc_.append(j)
                    bv.append(bc.h * length * w / 6.0)
            K = K + sp.coo_matrix((bv, (br, bc_)), shape=(n, n)).tocsr()

    keep = ~dirichlet
    if not np.any(keep):
        raise DegenerateProblemError("no interior degrees of freedom remain")
    dof_map = -np.ones(n, dtype=int)
    dof_map[keep] = np.arange(int(keep.sum()))
    K = K[keep][:, keep].tocsc()
    M = M[keep][:, keep].tocsc()
    return K, M, dof_map


def _step(lu, M, x):
    y = lu.solve(M @ x)
    norm = np.sqrt(abs(y @ (M @ y)))
    if not np.isfinite(norm) or norm == 0:
        raise SingularOperatorError("inverse iteration produced a null vector")
    return y / norm


def smallest_eigenpair(K, M, mesh: TriMesh, dof_map, tol=1e-10,
                       max_iter=200) -> EigenSolution:
    """Shift-invert inverse iteration with a sparse direct factorization.

    Deterministic all-ones start vector.  A fixed small negative shift (which
    keeps the factorization regular when zero is an eigenvalue, as for pure
    Neumann) isolates the ground state; Rayleigh-quotient shifts then finish
    the job even when the spectral gap is small.
    """
    n = K.shape[0]
    shift = -1e-10 * abs(K.diagonal().sum() / max(M.diagonal().sum(), 1e-300))
    shift = min(shift, -1e-12)

    def factor(sigma):
        try:
            return splu((K - sigma * M).tocsc())
        except RuntimeError as exc:
            raise SingularOperatorError(f"factorization failed: {exc}") from exc

    lu = factor(shift)
    x = np.ones(n)
    x /= np.sqrt(x @ (M @ x))
    lam_old = np.inf
    # warm-up: fixed-shift iterations until the eigenvalue settles
    for _ in range(30):
        x = _step(lu, M, x)
        lam = x @ (K @ x)
        if abs(lam - lam_old) <= 1e-6 * max(1.0, abs(lam)):
            break
        lam_old = lam

    residual = np.inf
    lam_old = np.inf
    for _ in range(max_iter):
        mx = M @ x
        lam = x @ (K @ x)
        residual = float(np.linalg.norm(K @ x - lam * mx) / np.linalg.norm(mx))
        if abs(lam - lam_old) <= tol * max(1.0, abs(lam)) \
                and residual <= 10 * tol * max(1.0, abs(lam)):
            break
        lam_old = lam
        # Rayleigh-quotient shift, nudged off the eigenvalue so the
        # factorization stays usable
        sigma = lam - max(residual, 1e-8 * max(1.0, abs(lam)))
        try:
            lu = factor(sigma)
        except SingularOperatorError:
            lu = factor(sigma * (1 - 1e-8) - 1e-12)
        x = _step(lu, M, x)
    else:
        raise ConvergenceError(
            f"inverse iteration stalled at residual {residual:.3e}")

    if np.sum(x) < 0:
        x = -x
    full = np.zeros(mesh.n_vertices)
    full[dof_map >= 0] = x
    peak = np.max(np.abs(full))
    full /= peak
    return EigenSolution(float(lam), full, residual, mesh)


def solve_domain(mesh: TriMesh, bc_inner, bc_outer, potential=None,
                 tol=1e-10) -> EigenSolution:
    K, M, dof_map = assemble(mesh, bc_inner, bc_outer, potential)
    return smallest_eigenpair(K, M, mesh, dof_map, tol=tol)


def richardson_estimate(domain, bc_inner, bc_outer, levels=3, n_theta=64, n_r=8,
                        potential_fn=None, tol=1e-10) -> RichardsonResult:
    """Extrapolate lambda to h -> 0 from nested uniform refinements.

    Fits lambda_h = lambda + C h^p on the last three levels and reports
    |lambda_finest - lambda_extrapolated| as the error bar.
    """
    from .mesh import build_transfinite_mesh, refine

    if levels < 3:
        raise ValueError("need at least 3 levels")
    mesh = build_transfinite_mesh(domain, n_theta, n_r)
    lams, hs = [], []
    for _ in range(levels):
        potential = None
        if potential_fn is not None:
            potential = potential_fn(mesh.vertices)
        sol = solve_domain(mesh, bc_inner, bc_outer, potential, tol=tol)
        lams.append(sol.lam)
        hs.append(mesh.max_edge_length())
        mesh = refine(mesh)
    lams = np.asarray(lams)
    hs = np.asarray(hs)

    diffs = np.diff(lams)
    monotone = bool(np.all(diffs >= -1e-13 * np.abs(lams[:-1]))
                    or np.all(diffs <= 1e-13 * np.abs(lams[:-1])))
    # refinement halves h: p from the last three values, then lambda from
    # the geometric limit of the tail
    d1, d2 = lams[-2] - lams[-3], lams[-1] - lams[-2]
    warning = None
    if d2 == 0 or d1 == 0 or d1 * d2 <= 0:
        lam_ext = float(lams[-1])
        order = float("nan")
        warning = "extrapolation unreliable: non-geometric eigenvalue sequence"
    else:
        rho = d2 / d1
        order = float(-np.log2(abs(rho)))
        if not monotone or not 0 < rho < 1:
            lam_ext = float(lams[-1])
            warning = "extrapolation unreliable: non-monotone eigenvalue sequence"
        else:
            lam_ext = float(lams[-1] + d2 * rho / (1 - rho))
    error_bar = abs(lams[-1] - lam_ext)
    if error_bar == 0:
        error_bar = abs(d2) if len(lams) > 1 else 0.0
    return RichardsonResult(lam_ext, float(error_bar), order, lams, hs,
                            monotone, warning)
