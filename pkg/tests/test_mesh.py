import json
import math

import numpy as np
import pytest

from shellspec.domains import (
    concentric_annulus,
    disk_minus_polygon,
    eccentric_annulus,
    polygon_delta_neighborhood,
    rectangle_minus_disk,
    regular_polygon_vertices,
    square_vertices,
)
from shellspec.mesh import (
    MeshingError,
    StarAnnularDomain,
    TriMesh,
    build_transfinite_mesh,
    mesh_quality,
    refine,
)


@pytest.fixture(scope="module")
def annulus_mesh():
    return build_transfinite_mesh(concentric_annulus(1.0, 2.0), n_theta=64, n_r=8)


def test_transfinite_counts(annulus_mesh):
    assert annulus_mesh.n_vertices == 64 * 9
    assert annulus_mesh.n_triangles == 64 * 8 * 2
    assert len(annulus_mesh.boundary_inner) == 64
    assert len(annulus_mesh.boundary_outer) == 64


def test_positive_orientation(annulus_mesh):
    assert np.all(annulus_mesh.signed_areas() > 0)


def test_boundary_loops_closed(annulus_mesh):
    for which in ("inner", "outer"):
        loop = annulus_mesh.boundary_loop(which)
        assert len(loop) == 64
        assert len(set(loop)) == len(loop)


def test_area_second_order_convergence():
    domain = concentric_annulus(1.0, 2.0)
    exact = 3 * math.pi
    errors = []
    mesh = build_transfinite_mesh(domain, n_theta=32, n_r=4)
    for _ in range(3):
        errors.append(abs(mesh.area() - exact))
        mesh = refine(mesh)
    ratios = [errors[i] / errors[i + 1] for i in range(2)]
    assert all(3.5 < r < 4.5 for r in ratios)


def test_refine_projects_boundary(annulus_mesh):
    fine = refine(annulus_mesh)
    for which, radius in (("inner", 1.0), ("outer", 2.0)):
        pts = fine.vertices[fine.boundary_nodes(which)]
        assert np.allclose(np.hypot(pts[:, 0], pts[:, 1]), radius, atol=1e-12)


def test_mesh_quality(annulus_mesh):
    min_angle, aspect, orientation_ok = mesh_quality(annulus_mesh)
    assert min_angle > 20.0
    assert aspect < 4.0
    assert orientation_ok


def test_mesh_json_roundtrip(tmp_path, annulus_mesh):
    path = tmp_path / "mesh.json"
    annulus_mesh.save(path)
    back = TriMesh.load(path)
    assert np.allclose(back.vertices, annulus_mesh.vertices)
    assert np.array_equal(back.triangles, annulus_mesh.triangles)
    assert np.array_equal(back.boundary_inner, annulus_mesh.boundary_inner)
    data = json.loads(path.read_text())
    assert set(data) >= {"vertices", "triangles", "boundary"}
    assert set(data["boundary"]) == {"inner", "outer"}


def test_domain_json_roundtrip(tmp_path):
    domain = eccentric_annulus(0.5, 2.0, offset=0.4)
    path = tmp_path / "domain.json"
    domain.save(path)
    back = StarAnnularDomain.load(path)
    assert np.allclose(back.r_inner, domain.r_inner)
    assert np.allclose(back.r_outer, domain.r_outer)
    assert np.allclose(back.center, domain.center)


def test_invalid_mesh_rejected():
    with pytest.raises(MeshingError):
        build_transfinite_mesh(concentric_annulus(1.0, 2.0), n_theta=4, n_r=2)


def test_eccentric_annulus_geometry():
    domain = eccentric_annulus(0.5, 2.0, offset=0.4, m=2048)
    assert abs(domain.perimeter("inner") - math.pi) < 1e-3
    assert abs(domain.perimeter("outer") - 4 * math.pi) < 1e-3
    assert abs(domain.area() - math.pi * (4 - 0.25)) < 1e-3
    quality = mesh_quality(build_transfinite_mesh(domain, 64, 8))
    assert quality[2]


def test_disk_minus_square_geometry():
    domain = disk_minus_polygon(2.0, square_vertices(1.0), m=2048)
    assert abs(domain.area() - (4 * math.pi - 1.0)) < 1e-3
    assert abs(domain.perimeter("inner") - 4.0) < 1e-3
    assert abs(domain.perimeter("outer") - 4 * math.pi) < 1e-3


def test_polygon_neighborhood_steiner_identities():
    # 2D Steiner: area pi d^2 + P d, perimeter P + 2 pi d around a hexagon
    hexagon = regular_polygon_vertices(6, 1.0)
    side = 1.0
    perim = 6 * side
    area = 3 * math.sqrt(3) / 2
    d = 0.3
    domain = polygon_delta_neighborhood(hexagon, d, m=4096)
    assert abs(domain.area() - (perim * d + math.pi * d * d)) < 2e-3
    assert abs(domain.perimeter("outer") - (perim + 2 * math.pi * d)) < 2e-3
    assert abs(domain.perimeter("inner") - perim) < 2e-3


def test_rectangle_minus_disk_geometry():
    k = 2.0
    domain = rectangle_minus_disk(0.5, k, m=4096)
    assert abs(domain.area() - (4 * k - math.pi * 0.25)) < 2e-3
    assert abs(domain.perimeter("outer") - (4 + 4 * k)) < 0.05
    assert abs(domain.perimeter("inner") - math.pi) < 1e-3


def test_non_star_shaped_polygon_rejected():
    # U-shaped slot: some rays from the origin cross the boundary three times
    verts = np.array([[1, -1], [1, 1], [0.2, 1], [0.2, 0.2], [-0.2, 0.2],
                      [-0.2, 1], [-1, 1], [-1, -1]], float)
    with pytest.raises(MeshingError):
        disk_minus_polygon(3.0, verts, m=512)
