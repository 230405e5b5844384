"""Shared fixtures; the Monte-Carlo parallel-body profiles are expensive
(millions of samples), so they are computed once per session."""

import numpy as np
import pytest

from shellspec.convex_geometry import cube, regular_tetrahedron, steiner_profile

STEINER_DELTAS = (0.1, 0.2, 0.3, 0.4, 0.5)
STEINER_SAMPLES = 10**6


@pytest.fixture(scope="session")
def cube_steiner():
    body = cube(1.0)
    return body, np.asarray(STEINER_DELTAS), steiner_profile(
        body, STEINER_DELTAS, STEINER_SAMPLES, seed=0)


@pytest.fixture(scope="session")
def tetra_steiner():
    body = regular_tetrahedron(1.0)
    return body, np.asarray(STEINER_DELTAS), steiner_profile(
        body, STEINER_DELTAS, STEINER_SAMPLES, seed=100)
