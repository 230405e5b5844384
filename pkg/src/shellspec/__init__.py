"""Numerical toolkit for first Robin eigenvalues on doubly-connected
domains: radial shell solves, quermassintegral-matched shell comparisons,
FEM eigensolves with Richardson error bars, gradient-flow front sweeps,
the eigenvalue-preserving Morse perturbation, a reversal scan on elongated
domains, and an explicit 3D Morse function.
"""

from .boundary import BoundaryCondition, dirichlet, from_h, neumann, parse_bc, robin
from .convex_geometry import (
    ConvexBody2D,
    ConvexBody3D,
    GeometryError,
    MembershipReport,
    ShellSpec,
    alexandrov_fenchel_check,
    class_membership,
    convex_hull_body,
    cube,
    icosphere,
    matched_shell,
    quermassintegral_top_3d,
    quermassintegrals_2d,
    quermassintegrals_3d,
    regular_tetrahedron,
    steiner_fit_w2,
    steiner_profile,
    steiner_volume_mc,
    unit_ball_volume,
)
from .counterexample import (
    CounterexampleRow,
    counterexample_scan,
    first_reversed,
    matched_outer_radius,
    rectangle_eigenvalue,
)
from .domains import (
    concentric_annulus,
    disk_minus_polygon,
    eccentric_annulus,
    polygon_delta_neighborhood,
    rectangle_minus_disk,
    regular_polygon_vertices,
    square_vertices,
)
from .fem_eig import (
    ConvergenceError,
    DegenerateProblemError,
    EigenSolution,
    RichardsonResult,
    SingularOperatorError,
    assemble,
    richardson_estimate,
    smallest_eigenpair,
    solve_domain,
)
from .flow import (
    CollarError,
    ComparisonReport,
    CutEstimate,
    FlowDegenerateError,
    FlowFront,
    MembershipRefusal,
    MorsePerturbation,
    RemeshError,
    SweepRecord,
    advance_fronts,
    critical_points,
    cut_normal_derivative,
    effectless_cut_estimate,
    gradient_field,
    hersch_weinberger_check,
    morse_perturb,
    record_subdomain_eigenvalues,
    subdomain_eigen,
)
from .mesh import (
    MeshingError,
    StarAnnularDomain,
    TriMesh,
    build_transfinite_mesh,
    mesh_quality,
    refine,
)
from .morse3d import (
    CriticalPoint3D,
    SectionMismatchError,
    classify_critical_points,
    saddle_sphere_section,
    shell_gradient_floor,
    smoothstep,
    trace_flow,
    v_eval,
)
from .shell_radial import (
    BracketExhaustedError,
    MaxMinConsistencyError,
    RadialEigenResult,
    ShellProblem,
    ShootingOverflowError,
    maxmin_split,
    monotonicity_scan,
    shoot,
    smallest_eigenvalue,
)

__version__ = "0.1.0"
